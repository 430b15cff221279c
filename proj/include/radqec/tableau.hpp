#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "radqec/frame_sim.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

// Stabiliser tableau simulator (CHP style): n destabiliser rows, n stabiliser
// rows and one scratch row, bit-packed 64 qubits per word. Exact state-vector
// -equivalent semantics for Clifford circuits; used as the ground-truth oracle
// for the Pauli-frame sampler.
class TableauSimulator {
   public:
    struct MeasureResult {
        int bit;
        bool random;  // true if the pre-measurement outcome was 50/50
    };

    explicit TableauSimulator(int32_t n)
        : n_(n), words_(static_cast<size_t>((n + 63) / 64)) {
        if (n < 1) throw std::invalid_argument("TableauSimulator: need at least one qubit");
        size_t rows = 2 * static_cast<size_t>(n) + 1;
        x_.assign(rows * words_, 0);
        z_.assign(rows * words_, 0);
        r_.assign(rows, 0);
        for (int32_t i = 0; i < n; ++i) {
            set_bit(x_, static_cast<size_t>(i), i);                       // destabiliser X_i
            set_bit(z_, static_cast<size_t>(n) + static_cast<size_t>(i), i);  // stabiliser Z_i
        }
    }

    void h(int32_t q) {
        for (size_t k = 0; k < 2 * static_cast<size_t>(n_); ++k) {
            uint64_t xb = get_bit(x_, k, q), zb = get_bit(z_, k, q);
            r_[k] ^= static_cast<uint8_t>(xb & zb);
            if (xb != zb) {
                flip_bit(x_, k, q);
                flip_bit(z_, k, q);
            }
        }
    }

    void cx(int32_t c, int32_t t) {
        for (size_t k = 0; k < 2 * static_cast<size_t>(n_); ++k) {
            uint64_t xc = get_bit(x_, k, c), zc = get_bit(z_, k, c);
            uint64_t xt = get_bit(x_, k, t), zt = get_bit(z_, k, t);
            r_[k] ^= static_cast<uint8_t>(xc & zt & (xt ^ zc ^ 1));
            if (xc) flip_bit(x_, k, t);
            if (zt) flip_bit(z_, k, c);
        }
    }

    void pauli(int32_t q, Pauli p) {
        if (p == Pauli::I) return;
        for (size_t k = 0; k < 2 * static_cast<size_t>(n_); ++k) {
            uint64_t xb = get_bit(x_, k, q), zb = get_bit(z_, k, q);
            if (p == Pauli::X) r_[k] ^= static_cast<uint8_t>(zb);
            if (p == Pauli::Z) r_[k] ^= static_cast<uint8_t>(xb);
            if (p == Pauli::Y) r_[k] ^= static_cast<uint8_t>(xb ^ zb);
        }
    }

    // Z-basis measurement. A random outcome is *assigned* the forced bit (the
    // caller owns the gauge); a deterministic outcome is returned as-is.
    MeasureResult measure(int32_t q, int forced) {
        size_t n = static_cast<size_t>(n_);
        size_t p = 2 * n;  // sentinel: not found
        for (size_t k = n; k < 2 * n; ++k)
            if (get_bit(x_, k, q)) {
                p = k;
                break;
            }
        if (p < 2 * n) {
            for (size_t k = 0; k < 2 * n; ++k)
                if (k != p && get_bit(x_, k, q)) rowsum(k, p);
            copy_row(p - n, p);
            zero_row(p);
            set_bit(z_, p, q);
            r_[p] = static_cast<uint8_t>(forced);
            return {forced, true};
        }
        size_t scratch = 2 * n;
        zero_row(scratch);
        r_[scratch] = 0;
        for (size_t i = 0; i < n; ++i)
            if (get_bit(x_, i, q)) rowsum(scratch, n + i);
        return {r_[scratch], false};
    }

    void reset(int32_t q) {
        MeasureResult m = measure(q, 0);
        if (m.bit) pauli(q, Pauli::X);
    }

   private:
    uint64_t get_bit(const std::vector<uint64_t>& a, size_t row, int32_t q) const {
        return (a[row * words_ + static_cast<size_t>(q) / 64] >> (static_cast<size_t>(q) % 64)) & 1u;
    }
    void set_bit(std::vector<uint64_t>& a, size_t row, int32_t q) {
        a[row * words_ + static_cast<size_t>(q) / 64] |= uint64_t{1} << (static_cast<size_t>(q) % 64);
    }
    void flip_bit(std::vector<uint64_t>& a, size_t row, int32_t q) {
        a[row * words_ + static_cast<size_t>(q) / 64] ^= uint64_t{1} << (static_cast<size_t>(q) % 64);
    }
    void zero_row(size_t row) {
        for (size_t w = 0; w < words_; ++w) x_[row * words_ + w] = z_[row * words_ + w] = 0;
        r_[row] = 0;
    }
    void copy_row(size_t dst, size_t src) {
        for (size_t w = 0; w < words_; ++w) {
            x_[dst * words_ + w] = x_[src * words_ + w];
            z_[dst * words_ + w] = z_[src * words_ + w];
        }
        r_[dst] = r_[src];
    }

    // row h *= row i, tracking the sign via the standard phase-exponent sum.
    void rowsum(size_t h, size_t i) {
        int plus = 0, minus = 0;
        for (size_t w = 0; w < words_; ++w) {
            uint64_t x1 = x_[i * words_ + w], z1 = z_[i * words_ + w];
            uint64_t x2 = x_[h * words_ + w], z2 = z_[h * words_ + w];
            uint64_t c11 = x1 & z1, c10 = x1 & ~z1, c01 = ~x1 & z1;
            plus += std::popcount(c11 & z2 & ~x2) + std::popcount(c10 & z2 & x2) +
                    std::popcount(c01 & x2 & ~z2);
            minus += std::popcount(c11 & x2 & ~z2) + std::popcount(c10 & z2 & ~x2) +
                     std::popcount(c01 & x2 & z2);
            x_[h * words_ + w] ^= x1;
            z_[h * words_ + w] ^= z1;
        }
        int sum = (2 * (static_cast<int>(r_[h]) + static_cast<int>(r_[i])) + plus - minus) % 4;
        if (sum < 0) sum += 4;
        if (sum % 2 != 0) throw std::logic_error("TableauSimulator: anticommuting rowsum");
        r_[h] = static_cast<uint8_t>(sum / 2);
    }

    int32_t n_;
    size_t words_;
    std::vector<uint64_t> x_, z_;
    std::vector<uint8_t> r_;
};

struct TableauShot {
    std::vector<uint8_t> raw;         // one bit per measurement record
    std::vector<uint8_t> was_random;  // 1 where the outcome was gauge-assigned
};

// Replays a circuit through the tableau engine applying the given error tape.
// Random measurement outcomes take the matching bit of `gauge` (all zeros if
// null); deterministic outcomes are whatever the state dictates — the caller
// compares those against its frame prediction.
inline TableauShot tableau_replay(const ScheduledCircuit& circuit, const ErrorTape& tape,
                                  const std::vector<uint8_t>* gauge = nullptr) {
    if (gauge && gauge->size() != static_cast<size_t>(circuit.n_records))
        throw std::invalid_argument("tableau_replay: gauge size mismatch");
    TableauSimulator sim(circuit.n_qubits);
    TableauShot shot;
    shot.raw.resize(static_cast<size_t>(circuit.n_records));
    shot.was_random.resize(static_cast<size_t>(circuit.n_records));
    size_t rec = 0;
    size_t cursor = 0;
    auto apply_phase = [&](int32_t op_index, uint8_t phase) {
        while (cursor < tape.size() && tape[cursor].op_index == op_index &&
               tape[cursor].phase == phase) {
            sim.pauli(tape[cursor].qubit, tape[cursor].pauli);
            ++cursor;
        }
    };
    for (size_t oi = 0; oi < circuit.ops.size(); ++oi) {
        const Op& op = circuit.ops[oi];
        int32_t io = static_cast<int32_t>(oi);
        apply_phase(io, 0);
        switch (op.kind) {
            case OpKind::Reset: sim.reset(op.q0); break;
            case OpKind::Hadamard: sim.h(op.q0); break;
            case OpKind::Cnot: sim.cx(op.q0, op.q1); break;
            case OpKind::Measure: {
                int forced = gauge ? static_cast<int>((*gauge)[rec]) : 0;
                auto m = sim.measure(op.q0, forced);
                shot.raw[rec] = static_cast<uint8_t>(m.bit);
                shot.was_random[rec] = m.random ? 1 : 0;
                ++rec;
                break;
            }
        }
        apply_phase(io, 1);
    }
    if (rec != shot.raw.size()) throw std::logic_error("tableau_replay: record count mismatch");
    return shot;
}

// Assembles detectors and the observable from raw records, relative to the
// all-zero noiseless reference.
inline ShotResult shot_from_records(const ScheduledCircuit& circuit, std::vector<uint8_t> raw,
                                    double shot_start = 0.0) {
    ShotResult out;
    out.shot_start_time = shot_start;
    out.detection_events.resize(circuit.detectors.size());
    for (size_t i = 0; i < circuit.detectors.size(); ++i) {
        uint8_t v = 0;
        for (int32_t ri : circuit.detectors[i].records) v ^= raw[static_cast<size_t>(ri)];
        out.detection_events[i] = v;
    }
    uint8_t obs = 0;
    for (int32_t ri : circuit.observable_records) obs ^= raw[static_cast<size_t>(ri)];
    out.observable_flip = obs;
    out.raw_measurements = std::move(raw);
    return out;
}

}  // namespace radqec
