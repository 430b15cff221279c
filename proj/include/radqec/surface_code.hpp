#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "radqec/chip.hpp"

namespace radqec {

enum class Basis : uint8_t { X, Z };

enum class OpKind : uint8_t { Reset, Hadamard, Cnot, Measure };

inline const char* op_name(OpKind k) {
    switch (k) {
        case OpKind::Reset: return "R";
        case OpKind::Hadamard: return "H";
        case OpKind::Cnot: return "CX";
        case OpKind::Measure: return "M";
    }
    return "?";
}

struct Op {
    OpKind kind;
    int32_t q0;
    int32_t q1;  // -1 for single-qubit ops; CNOT control is q0, target q1
    double start;
    double duration;
};

struct Stabiliser {
    Basis type;
    int32_t ancilla;                // local qubit index
    std::array<int32_t, 4> data;    // local data indices in CNOT step order, -1 = absent
    double x = 0.0, y = 0.0;        // ancilla coordinates
};

// Rotated surface code on the diagonal lattice. Data qubits at odd-odd
// coordinates, ancillas at even-even plaquette centres; all in [0, 2d]^2.
struct CodeLayout {
    int32_t distance = 0;
    int32_t n_data = 0;
    std::vector<std::pair<double, double>> coords;  // local index -> (x, y); data first
    std::vector<Stabiliser> stabs;                  // ascending ancilla index
    std::vector<int32_t> observable_support;        // data indices of the logical string
    Basis basis = Basis::Z;

    int32_t n_qubits() const { return static_cast<int32_t>(coords.size()); }
};

struct Detector {
    std::vector<int32_t> records;  // measurement record indices, parity 0 noiselessly
    int32_t host;                  // local index of the hosting stabiliser qubit
    int32_t round;                 // 0..rounds
    double x = 0.0, y = 0.0;
};

struct ScheduledCircuit {
    int32_t n_qubits = 0;
    int32_t rounds = 0;
    Basis basis = Basis::Z;
    GateTimings timings;
    std::vector<Op> ops;
    int32_t n_records = 0;
    std::vector<Detector> detectors;
    std::vector<int32_t> observable_records;
    std::vector<std::pair<double, double>> qubit_coords;  // frame for radiation distances
    double total_duration = 0.0;
};

struct SurfaceCode {
    CodeLayout layout;
    ScheduledCircuit circuit;
};

namespace detail {

// CNOT step offsets, hook-safe: the late pair for X ancillas is horizontal and
// for Z ancillas vertical, so hook errors never shorten the matching logical.
inline constexpr std::array<std::pair<int, int>, 4> kXStepOffsets{{{1, 1}, {-1, 1}, {1, -1}, {-1, -1}}};
inline constexpr std::array<std::pair<int, int>, 4> kZStepOffsets{{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};

}  // namespace detail

inline SurfaceCode build_rotated_surface_code(int32_t d, int32_t r, Basis basis,
                                              GateTimings timings = {}) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("build_rotated_surface_code: distance must be odd and >= 3");
    if (r < 1) throw std::invalid_argument("build_rotated_surface_code: rounds must be >= 1");

    CodeLayout lay;
    lay.distance = d;
    lay.basis = basis;
    lay.n_data = d * d;

    std::map<std::pair<int, int>, int32_t> local_index;
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            int x = 2 * i + 1, y = 2 * j + 1;
            local_index[{x, y}] = static_cast<int32_t>(lay.coords.size());
            lay.coords.emplace_back(x, y);
        }
    }

    struct Plaq {
        int x, y;
        Basis type;
    };
    std::vector<Plaq> plaqs;
    for (int b = 0; b <= d; ++b) {
        for (int a = 0; a <= d; ++a) {
            Basis type = ((a + b) % 2 == 0) ? Basis::X : Basis::Z;
            bool interior = a >= 1 && a <= d - 1 && b >= 1 && b <= d - 1;
            bool bottom_top = (b == 0 || b == d) && a >= 1 && a <= d - 1;
            bool left_right = (a == 0 || a == d) && b >= 1 && b <= d - 1;
            if (interior || (bottom_top && type == Basis::X) || (left_right && type == Basis::Z))
                plaqs.push_back({2 * a, 2 * b, type});
        }
    }
    // Ancilla local indices ascend in (y, x) order after the data block.
    std::sort(plaqs.begin(), plaqs.end(), [](const Plaq& a, const Plaq& b) {
        return std::tie(a.y, a.x) < std::tie(b.y, b.x);
    });
    for (const Plaq& p : plaqs) {
        Stabiliser s;
        s.type = p.type;
        s.x = p.x;
        s.y = p.y;
        s.ancilla = static_cast<int32_t>(lay.coords.size());
        local_index[{p.x, p.y}] = s.ancilla;
        lay.coords.emplace_back(p.x, p.y);
        const auto& offs = (p.type == Basis::X) ? detail::kXStepOffsets : detail::kZStepOffsets;
        for (int k = 0; k < 4; ++k) {
            auto it = local_index.find({p.x + offs[static_cast<size_t>(k)].first,
                                        p.y + offs[static_cast<size_t>(k)].second});
            s.data[static_cast<size_t>(k)] = (it == local_index.end()) ? -1 : it->second;
        }
        lay.stabs.push_back(s);
    }
    if (static_cast<int32_t>(lay.stabs.size()) != d * d - 1)
        throw std::logic_error("build_rotated_surface_code: stabiliser count mismatch");

    // Logical string: Z along the bottom data row, X along the left data column.
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            int x = 2 * i + 1, y = 2 * j + 1;
            if ((basis == Basis::Z && y == 1) || (basis == Basis::X && x == 1))
                lay.observable_support.push_back(local_index.at({x, y}));
        }
    }

    // Schedule. Layers advance sequentially; every op in a layer shares the
    // layer start time and duration.
    ScheduledCircuit circ;
    circ.n_qubits = lay.n_qubits();
    circ.rounds = r;
    circ.basis = basis;
    circ.timings = timings;
    circ.qubit_coords = lay.coords;

    double t = 0.0;
    auto layer_1q = [&](OpKind kind, const std::vector<int32_t>& qs, double dur) {
        for (int32_t q : qs) circ.ops.push_back({kind, q, -1, t, dur});
        if (!qs.empty()) t += dur;
    };

    std::vector<int32_t> all_qubits, all_data, x_ancillas, all_ancillas;
    for (int32_t q = 0; q < circ.n_qubits; ++q) all_qubits.push_back(q);
    for (int32_t q = 0; q < lay.n_data; ++q) all_data.push_back(q);
    for (const Stabiliser& s : lay.stabs) {
        all_ancillas.push_back(s.ancilla);
        if (s.type == Basis::X) x_ancillas.push_back(s.ancilla);
    }

    layer_1q(OpKind::Reset, all_qubits, timings.reset);
    if (basis == Basis::X) layer_1q(OpKind::Hadamard, all_data, timings.single_qubit);

    std::vector<std::vector<int32_t>> record_of_stab(lay.stabs.size());
    for (int cycle = 0; cycle < r; ++cycle) {
        layer_1q(OpKind::Hadamard, x_ancillas, timings.single_qubit);
        for (int step = 0; step < 4; ++step) {
            bool any = false;
            for (const Stabiliser& s : lay.stabs) {
                int32_t dq = s.data[static_cast<size_t>(step)];
                if (dq < 0) continue;
                // X ancilla is control (after H); Z ancilla is target.
                if (s.type == Basis::X)
                    circ.ops.push_back({OpKind::Cnot, s.ancilla, dq, t, timings.two_qubit});
                else
                    circ.ops.push_back({OpKind::Cnot, dq, s.ancilla, t, timings.two_qubit});
                any = true;
            }
            if (any) t += timings.two_qubit;
        }
        layer_1q(OpKind::Hadamard, x_ancillas, timings.single_qubit);
        for (size_t si = 0; si < lay.stabs.size(); ++si) {
            circ.ops.push_back({OpKind::Measure, lay.stabs[si].ancilla, -1, t, timings.measure});
            record_of_stab[si].push_back(circ.n_records++);
        }
        t += timings.measure;
        layer_1q(OpKind::Reset, all_ancillas, timings.reset);
    }

    if (basis == Basis::X) layer_1q(OpKind::Hadamard, all_data, timings.single_qubit);
    std::vector<int32_t> record_of_data(static_cast<size_t>(lay.n_data));
    for (int32_t q = 0; q < lay.n_data; ++q) {
        circ.ops.push_back({OpKind::Measure, q, -1, t, timings.measure});
        record_of_data[static_cast<size_t>(q)] = circ.n_records++;
    }
    t += timings.measure;
    circ.total_duration = t;

    // Detectors live on the basis-matching stabilisers: a round-0 anchor,
    // consecutive-round differences, and a final comparison against the data
    // readout. Round-major ordering.
    for (int round = 0; round <= r; ++round) {
        for (size_t si = 0; si < lay.stabs.size(); ++si) {
            const Stabiliser& s = lay.stabs[si];
            if (s.type != basis) continue;
            Detector det;
            det.host = s.ancilla;
            det.round = round;
            det.x = s.x;
            det.y = s.y;
            if (round == 0) {
                det.records = {record_of_stab[si][0]};
            } else if (round < r) {
                det.records = {record_of_stab[si][static_cast<size_t>(round - 1)],
                               record_of_stab[si][static_cast<size_t>(round)]};
            } else {
                det.records = {record_of_stab[si][static_cast<size_t>(r - 1)]};
                for (int32_t dq : s.data)
                    if (dq >= 0) det.records.push_back(record_of_data[static_cast<size_t>(dq)]);
            }
            circ.detectors.push_back(std::move(det));
        }
    }
    for (int32_t q : lay.observable_support)
        circ.observable_records.push_back(record_of_data[static_cast<size_t>(q)]);

    return {std::move(lay), std::move(circ)};
}

// Detector indices grouped by hosting qubit; data qubits map to empty lists.
inline std::vector<std::vector<int32_t>> qubit_to_stabilisers(const ScheduledCircuit& circuit) {
    std::vector<std::vector<int32_t>> out(static_cast<size_t>(circuit.n_qubits));
    for (size_t i = 0; i < circuit.detectors.size(); ++i)
        out[static_cast<size_t>(circuit.detectors[i].host)].push_back(static_cast<int32_t>(i));
    return out;
}

// Place a layout on a chip by pure translation. Offset components must keep
// the even coordinate-sum parity or the target sites cannot exist.
inline Mapping embed_layout(const Chip& chip, const CodeLayout& layout, double ox, double oy) {
    std::map<std::pair<double, double>, int32_t> where;
    for (size_t i = 0; i < chip.qubits.size(); ++i)
        where[{chip.qubits[i].x, chip.qubits[i].y}] = static_cast<int32_t>(i);
    Mapping m;
    m.to_chip.resize(layout.coords.size(), -1);
    for (size_t q = 0; q < layout.coords.size(); ++q) {
        auto it = where.find({layout.coords[q].first + ox, layout.coords[q].second + oy});
        if (it == where.end())
            throw std::invalid_argument("embed_layout: qubit " + std::to_string(q) +
                                        " falls outside the chip at offset (" + std::to_string(ox) +
                                        ", " + std::to_string(oy) + ")");
        m.to_chip[q] = it->second;
    }
    // Every required coupling must sit on a coupler.
    for (const Stabiliser& s : layout.stabs) {
        for (int32_t dq : s.data) {
            if (dq < 0) continue;
            int32_t u = m.to_chip[static_cast<size_t>(s.ancilla)], v = m.to_chip[static_cast<size_t>(dq)];
            auto key = std::make_pair(std::min(u, v), std::max(u, v));
            if (!std::binary_search(chip.couplers.begin(), chip.couplers.end(), key))
                throw std::invalid_argument("embed_layout: missing coupler for stabiliser interaction");
        }
    }
    return m;
}

struct CodePlacement {
    CodeLayout layout;
    Mapping mapping;
};

// Translate several instances of the same code onto one chip. Throws on
// out-of-bounds placement or qubit overlap between instances.
inline std::vector<CodePlacement> multi_code_embed(const Chip& chip, int32_t distance, Basis basis,
                                                   const std::vector<std::pair<double, double>>& offsets) {
    std::vector<CodePlacement> out;
    std::vector<uint8_t> used(chip.qubits.size(), 0);
    CodeLayout proto = build_rotated_surface_code(distance, 1, basis).layout;
    for (auto [ox, oy] : offsets) {
        CodePlacement cp;
        cp.layout = proto;
        cp.mapping = embed_layout(chip, proto, ox, oy);
        for (int32_t q : cp.mapping.to_chip) {
            if (used[static_cast<size_t>(q)])
                throw std::invalid_argument("multi_code_embed: placements overlap on chip qubit " + std::to_string(q));
            used[static_cast<size_t>(q)] = 1;
        }
        out.push_back(std::move(cp));
    }
    return out;
}

// Rebase a circuit's radiation-distance frame to chip coordinates.
inline void apply_mapping(ScheduledCircuit& circuit, const Chip& chip, const Mapping& mapping) {
    if (mapping.to_chip.size() != static_cast<size_t>(circuit.n_qubits))
        throw std::invalid_argument("apply_mapping: qubit count mismatch");
    for (size_t q = 0; q < mapping.to_chip.size(); ++q) {
        const ChipQubit& cq = chip.qubits[static_cast<size_t>(mapping.to_chip[q])];
        circuit.qubit_coords[q] = {cq.x, cq.y};
    }
}

inline InteractionGraph interaction_graph(const CodeLayout& layout) {
    InteractionGraph g;
    g.n = layout.n_qubits();
    for (const Stabiliser& s : layout.stabs)
        for (int32_t dq : s.data)
            if (dq >= 0) g.edges.emplace_back(std::min(s.ancilla, dq), std::max(s.ancilla, dq));
    return g;
}

// One op per line: start time in nanoseconds, kind, operand qubits.
inline void save_circuit(std::ostream& os, const ScheduledCircuit& circuit) {
    os.precision(12);
    for (const Op& op : circuit.ops) {
        os << op.start * 1e9 << ' ' << op_name(op.kind) << ' ' << op.q0;
        if (op.q1 >= 0) os << ' ' << op.q1;
        os << '\n';
    }
}

}  // namespace radqec
