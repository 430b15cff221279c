#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "radqec/noise.hpp"
#include "radqec/surface_code.hpp"
#include "radqec/util.hpp"

namespace radqec {

struct ShotResult {
    std::vector<uint8_t> detection_events;  // one bit per detector
    std::vector<uint8_t> raw_measurements;  // one bit per measurement record
    uint8_t observable_flip = 0;
    double shot_start_time = 0.0;

    bool operator==(const ShotResult&) const = default;
};

// A pre-sampled error realisation: every fault that fired, in circuit order.
// phase 0 faults act before their op (radiation Y, M noise), phase 1 after
// (Q1/Q2/R noise). Replayable into either simulator.
struct TapeEntry {
    int32_t op_index;
    uint8_t phase;
    int32_t qubit;
    Pauli pauli;
};
using ErrorTape = std::vector<TapeEntry>;

namespace detail {

struct ChannelTable {
    double total = 0.0;               // probability of any non-identity term
    std::vector<double> cumulative;   // running sums over faulting terms
    std::vector<PauliTerm> terms;     // faulting terms only

    static ChannelTable from(const PauliChannel& ch) {
        ChannelTable t;
        double acc = 0.0;
        for (const PauliTerm& term : ch.terms) {
            if (term.a == Pauli::I && term.b == Pauli::I) continue;
            acc += term.prob;
            t.cumulative.push_back(acc);
            t.terms.push_back(term);
        }
        t.total = acc;
        return t;
    }

    // Maps a uniform draw below `total` to a faulting term.
    const PauliTerm& pick(double u) const {
        for (size_t i = 0; i + 1 < cumulative.size(); ++i)
            if (u < cumulative[i]) return terms[i];
        return terms.back();
    }
};

}  // namespace detail

// Pauli-frame simulator. Tracks deviations from the noiseless run, so every
// measurement record flip, detector and observable bit comes out directly;
// raw records equal the flips because the all-zero reference is a valid
// noiseless sample for these circuits (checked against the tableau engine in
// the tests).
class FrameSampler {
   public:
    FrameSampler(const ScheduledCircuit& circuit, NoiseParams noise,
                 std::vector<RadiationEvent> events, uint64_t seed, double start_time = 0.0)
        : circuit_(&circuit),
          events_(std::move(events)),
          rng_(seed),
          fx_(static_cast<size_t>(circuit.n_qubits), 0),
          fz_(static_cast<size_t>(circuit.n_qubits), 0),
          timeline_(static_cast<size_t>(circuit.n_qubits), start_time),
          rec_flips_(static_cast<size_t>(circuit.n_records), 0) {
        q1_ = detail::ChannelTable::from(intrinsic_channel(GateClass::Q1, noise.p));
        q2_ = detail::ChannelTable::from(intrinsic_channel(GateClass::Q2, noise.p));
        m_ = detail::ChannelTable::from(intrinsic_channel(GateClass::M, noise.p));
        r_ = detail::ChannelTable::from(intrinsic_channel(GateClass::R, noise.p));
        spatial_.resize(events_.size());
        for (size_t e = 0; e < events_.size(); ++e) {
            spatial_[e].resize(static_cast<size_t>(circuit.n_qubits));
            for (int32_t q = 0; q < circuit.n_qubits; ++q) {
                double dx = circuit.qubit_coords[static_cast<size_t>(q)].first - events_[e].x;
                double dy = circuit.qubit_coords[static_cast<size_t>(q)].second - events_[e].y;
                spatial_[e][static_cast<size_t>(q)] = spatial_factor(std::sqrt(dx * dx + dy * dy));
            }
        }
        tau_cache_.assign(events_.size(), {-1.0, 0.0});
    }

    // Samples one shot starting at shot_start; the per-qubit timeline carries
    // over between calls, so back-to-back shots see cross-shot idle times.
    ShotResult sample_shot(double shot_start) { return run(shot_start, nullptr, nullptr); }

    // As sample_shot, but records every sampled fault.
    ShotResult sample_shot_recording(double shot_start, ErrorTape& tape_out) {
        tape_out.clear();
        return run(shot_start, &tape_out, nullptr);
    }

    // Applies a pre-sampled tape instead of drawing faults. Consumes no
    // randomness and ignores the timeline.
    ShotResult replay_tape(double shot_start, const ErrorTape& tape) { return run(shot_start, nullptr, &tape); }

   private:
    void apply_pauli(int32_t q, Pauli p) {
        size_t i = static_cast<size_t>(q);
        if (p == Pauli::X || p == Pauli::Y) fx_[i] ^= 1;
        if (p == Pauli::Z || p == Pauli::Y) fz_[i] ^= 1;
    }

    double tau_at(size_t e, double t) {
        auto& [ct, cv] = tau_cache_[e];
        if (ct != t) {
            ct = t;
            cv = tau_rad(events_[e], t);
        }
        return cv;
    }

    void radiation(int32_t op_index, int32_t q, double now, ErrorTape* tape) {
        for (size_t e = 0; e < events_.size(); ++e) {
            const RadiationEvent& ev = events_[e];
            if (now < ev.t_rad || now > ev.t_rad + ev.dt_rad) continue;
            double u = uniform01(rng_);
            double s = spatial_[e][static_cast<size_t>(q)];
            if (u >= s) continue;  // spatial factor alone rules the fault out
            double dt_g = now - timeline_[static_cast<size_t>(q)];
            double temporal = 1.0 - std::exp(-dt_g / tau_at(e, now));
            if (u < s * temporal) {
                apply_pauli(q, Pauli::Y);
                if (tape) tape->push_back({op_index, 0, q, Pauli::Y});
            }
        }
    }

    void intrinsic_1q(int32_t op_index, uint8_t phase, int32_t q, const detail::ChannelTable& tab,
                      ErrorTape* tape) {
        double u = uniform01(rng_);
        if (u >= tab.total) return;
        Pauli p = tab.pick(u).a;
        apply_pauli(q, p);
        if (tape) tape->push_back({op_index, phase, q, p});
    }

    void intrinsic_2q(int32_t op_index, int32_t q0, int32_t q1, ErrorTape* tape) {
        double u = uniform01(rng_);
        if (u >= q2_.total) return;
        const PauliTerm& term = q2_.pick(u);
        if (term.a != Pauli::I) {
            apply_pauli(q0, term.a);
            if (tape) tape->push_back({op_index, 1, q0, term.a});
        }
        if (term.b != Pauli::I) {
            apply_pauli(q1, term.b);
            if (tape) tape->push_back({op_index, 1, q1, term.b});
        }
    }

    ShotResult run(double shot_start, ErrorTape* record, const ErrorTape* replay) {
        const ScheduledCircuit& c = *circuit_;
        std::fill(fx_.begin(), fx_.end(), 0);
        std::fill(fz_.begin(), fz_.end(), 0);
        std::fill(rec_flips_.begin(), rec_flips_.end(), 0);
        size_t rec = 0;
        size_t cursor = 0;  // replay cursor

        auto replay_phase = [&](int32_t op_index, uint8_t phase) {
            while (cursor < replay->size() && (*replay)[cursor].op_index == op_index &&
                   (*replay)[cursor].phase == phase) {
                apply_pauli((*replay)[cursor].qubit, (*replay)[cursor].pauli);
                ++cursor;
            }
        };

        for (size_t oi = 0; oi < c.ops.size(); ++oi) {
            const Op& op = c.ops[oi];
            int32_t io = static_cast<int32_t>(oi);
            double now = shot_start + op.start;

            if (replay) {
                replay_phase(io, 0);
            } else {
                radiation(io, op.q0, now, record);
                if (op.q1 >= 0) radiation(io, op.q1, now, record);
                if (op.kind == OpKind::Measure) intrinsic_1q(io, 0, op.q0, m_, record);
            }

            switch (op.kind) {
                case OpKind::Reset:
                    fx_[static_cast<size_t>(op.q0)] = 0;
                    fz_[static_cast<size_t>(op.q0)] = 0;
                    break;
                case OpKind::Hadamard:
                    std::swap(fx_[static_cast<size_t>(op.q0)], fz_[static_cast<size_t>(op.q0)]);
                    break;
                case OpKind::Cnot:
                    fx_[static_cast<size_t>(op.q1)] ^= fx_[static_cast<size_t>(op.q0)];
                    fz_[static_cast<size_t>(op.q0)] ^= fz_[static_cast<size_t>(op.q1)];
                    break;
                case OpKind::Measure:
                    rec_flips_[rec++] = fx_[static_cast<size_t>(op.q0)];
                    break;
            }

            if (replay) {
                replay_phase(io, 1);
            } else {
                switch (op.kind) {
                    case OpKind::Hadamard: intrinsic_1q(io, 1, op.q0, q1_, record); break;
                    case OpKind::Cnot: intrinsic_2q(io, op.q0, op.q1, record); break;
                    case OpKind::Reset: intrinsic_1q(io, 1, op.q0, r_, record); break;
                    case OpKind::Measure: break;
                }
            }

            double end = now + op.duration;
            timeline_[static_cast<size_t>(op.q0)] = end;
            if (op.q1 >= 0) timeline_[static_cast<size_t>(op.q1)] = end;
        }
        if (rec != rec_flips_.size()) throw std::logic_error("FrameSampler: record count mismatch");

        ShotResult out;
        out.shot_start_time = shot_start;
        out.raw_measurements = rec_flips_;
        out.detection_events.resize(c.detectors.size());
        for (size_t i = 0; i < c.detectors.size(); ++i) {
            uint8_t v = 0;
            for (int32_t ri : c.detectors[i].records) v ^= rec_flips_[static_cast<size_t>(ri)];
            out.detection_events[i] = v;
        }
        uint8_t obs = 0;
        for (int32_t ri : c.observable_records) obs ^= rec_flips_[static_cast<size_t>(ri)];
        out.observable_flip = obs;
        return out;
    }

    const ScheduledCircuit* circuit_;
    std::vector<RadiationEvent> events_;
    std::mt19937_64 rng_;
    std::vector<uint8_t> fx_, fz_;
    std::vector<double> timeline_;
    std::vector<uint8_t> rec_flips_;
    detail::ChannelTable q1_, q2_, m_, r_;
    std::vector<std::vector<double>> spatial_;
    std::vector<std::pair<double, double>> tau_cache_;
};

inline ShotResult sample_shot(const ScheduledCircuit& circuit, NoiseParams noise,
                              const std::vector<RadiationEvent>& events, uint64_t seed,
                              double shot_start = 0.0) {
    FrameSampler s(circuit, noise, events, seed, shot_start);
    return s.sample_shot(shot_start);
}

namespace detail {

inline void write_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

inline void write_bits(std::ostream& os, const std::vector<uint8_t>& bits) {
    write_u32(os, static_cast<uint32_t>(bits.size()));
    std::vector<unsigned char> packed((bits.size() + 7) / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) packed[i / 8] |= static_cast<unsigned char>(1u << (i % 8));
    os.write(reinterpret_cast<const char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
}

inline std::vector<uint8_t> read_bits(std::istream& is) {
    uint32_t n = read_u32(is);
    std::vector<unsigned char> packed((n + 7) / 8);
    is.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    std::vector<uint8_t> bits(n);
    for (size_t i = 0; i < n; ++i) bits[i] = (packed[i / 8] >> (i % 8)) & 1u;
    return bits;
}

}  // namespace detail

// Little-endian binary stream: shot start time (IEEE double), then the two
// length-prefixed bit vectors, then the observable bit.
inline void write_shot(std::ostream& os, const ShotResult& shot) {
    uint64_t t;
    std::memcpy(&t, &shot.shot_start_time, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(t >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
    detail::write_bits(os, shot.detection_events);
    detail::write_bits(os, shot.raw_measurements);
    char obs = static_cast<char>(shot.observable_flip);
    os.write(&obs, 1);
}

inline ShotResult read_shot(std::istream& is) {
    ShotResult shot;
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("read_shot: truncated stream");
    uint64_t t = 0;
    for (int i = 0; i < 8; ++i) t |= static_cast<uint64_t>(b[i]) << (8 * i);
    std::memcpy(&shot.shot_start_time, &t, 8);
    shot.detection_events = detail::read_bits(is);
    shot.raw_measurements = detail::read_bits(is);
    char obs = 0;
    is.read(&obs, 1);
    if (!is) throw std::runtime_error("read_shot: truncated stream");
    shot.observable_flip = static_cast<uint8_t>(obs);
    return shot;
}

}  // namespace radqec
