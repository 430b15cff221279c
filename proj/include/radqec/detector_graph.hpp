#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "radqec/noise.hpp"
#include "radqec/surface_code.hpp"

namespace radqec {

inline constexpr double kInfWeight = std::numeric_limits<double>::infinity();

struct DetEdge {
    int32_t u = -1;
    int32_t v = -1;  // -1 = boundary
    double p = 0.0;
    double w = 0.0;  // ln((1-p)/p)
    uint8_t observable = 0;
};

struct DetectorGraph {
    std::vector<Detector> nodes;  // copied from the circuit, index-aligned
    std::vector<DetEdge> edges;   // sorted by (u, v, observable)

    int32_t boundary() const { return static_cast<int32_t>(nodes.size()); }

    // Incident edge ids per node; boundary edges also appear under the
    // boundary index.
    std::vector<std::vector<int32_t>> adjacency() const {
        std::vector<std::vector<int32_t>> adj(nodes.size() + 1);
        for (size_t e = 0; e < edges.size(); ++e) {
            adj[static_cast<size_t>(edges[e].u)].push_back(static_cast<int32_t>(e));
            size_t v = edges[e].v < 0 ? static_cast<size_t>(boundary()) : static_cast<size_t>(edges[e].v);
            adj[v].push_back(static_cast<int32_t>(e));
        }
        return adj;
    }
};

namespace detail {

// Detector subset plus the observable bit, packed for XOR and map keys.
struct DetSet {
    std::vector<uint64_t> words;

    explicit DetSet(size_t nbits = 0) : words((nbits + 63) / 64, 0) {}
    void flip(size_t i) { words[i / 64] ^= uint64_t{1} << (i % 64); }
    bool test(size_t i) const { return (words[i / 64] >> (i % 64)) & 1u; }
    void reset(size_t i) { words[i / 64] &= ~(uint64_t{1} << (i % 64)); }
    void xor_with(const DetSet& o) {
        for (size_t i = 0; i < words.size(); ++i) words[i] ^= o.words[i];
    }
    void clear() { std::fill(words.begin(), words.end(), 0); }
    bool empty() const {
        for (uint64_t w : words)
            if (w) return false;
        return true;
    }
    std::vector<int32_t> bits() const {
        std::vector<int32_t> out;
        for (size_t w = 0; w < words.size(); ++w)
            for (uint64_t rest = words[w]; rest; rest &= rest - 1)
                out.push_back(static_cast<int32_t>(64 * w + static_cast<size_t>(std::countr_zero(rest))));
        return out;
    }
};

}  // namespace detail

// Derives the weighted decoding graph by backward sensitivity propagation:
// one reverse pass tracks, per qubit, the set of detectors an X (or Z)
// inserted at the current cut would flip. Every intrinsic channel term is
// decomposed into independent single-qubit X/Z pieces; each piece contributes
// its flip set at the term's probability, and identical (set, observable)
// mechanisms merge as p1(1-p2) + p2(1-p1).
inline DetectorGraph build_graph(const ScheduledCircuit& circuit, NoiseParams noise) {
    const size_t nd = circuit.detectors.size();
    const size_t nbits = nd + 1;  // trailing bit = observable parity
    const size_t obs_bit = nd;

    // Record index -> flip mask over detectors (and the observable).
    std::vector<detail::DetSet> record_mask(static_cast<size_t>(circuit.n_records),
                                            detail::DetSet(nbits));
    for (size_t i = 0; i < nd; ++i)
        for (int32_t rec : circuit.detectors[i].records)
            record_mask[static_cast<size_t>(rec)].flip(i);
    for (int32_t rec : circuit.observable_records)
        record_mask[static_cast<size_t>(rec)].flip(obs_bit);

    std::vector<int32_t> record_of_op(circuit.ops.size(), -1);
    {
        int32_t rec = 0;
        for (size_t i = 0; i < circuit.ops.size(); ++i)
            if (circuit.ops[i].kind == OpKind::Measure) record_of_op[i] = rec++;
    }

    std::vector<detail::DetSet> sx(static_cast<size_t>(circuit.n_qubits), detail::DetSet(nbits));
    std::vector<detail::DetSet> sz(static_cast<size_t>(circuit.n_qubits), detail::DetSet(nbits));

    PauliChannel q1 = intrinsic_channel(GateClass::Q1, noise.p);
    PauliChannel q2 = intrinsic_channel(GateClass::Q2, noise.p);
    PauliChannel mc = intrinsic_channel(GateClass::M, noise.p);
    PauliChannel rc = intrinsic_channel(GateClass::R, noise.p);

    std::map<std::pair<std::vector<uint64_t>, uint8_t>, double> merged;

    auto add_piece = [&](const detail::DetSet& set, double prob, size_t op_index) {
        if (prob <= 0.0) return;
        detail::DetSet dets = set;
        uint8_t obs = dets.test(obs_bit) ? 1 : 0;
        dets.reset(obs_bit);
        if (dets.empty()) {
            if (obs)
                throw std::runtime_error("build_graph: undetectable observable flip at op " +
                                         std::to_string(op_index));
            return;  // silent piece: no graph content
        }
        auto fired = dets.bits();
        if (fired.size() > 2) {
            const Op& op = circuit.ops[op_index];
            throw std::runtime_error("build_graph: mechanism at op " + std::to_string(op_index) +
                                     " (" + op_name(op.kind) + " on qubit " +
                                     std::to_string(op.q0) + ") flips " +
                                     std::to_string(fired.size()) + " detectors");
        }
        double& p = merged[{dets.words, obs}];
        p = p * (1.0 - prob) + prob * (1.0 - p);
    };

    // Both halves of a decomposed Pauli, recorded as separate pieces.
    auto add_pauli_pieces = [&](int32_t q, Pauli pl, double prob, size_t op_index) {
        if (pl == Pauli::X || pl == Pauli::Y) add_piece(sx[static_cast<size_t>(q)], prob, op_index);
        if (pl == Pauli::Z || pl == Pauli::Y) add_piece(sz[static_cast<size_t>(q)], prob, op_index);
    };

    for (size_t oi = circuit.ops.size(); oi-- > 0;) {
        const Op& op = circuit.ops[oi];
        size_t q0 = static_cast<size_t>(op.q0);

        // Post-op noise sees the sensitivity after the op (the current sets).
        switch (op.kind) {
            case OpKind::Hadamard:
                for (const PauliTerm& t : q1.terms)
                    if (t.a != Pauli::I) add_pauli_pieces(op.q0, t.a, t.prob, oi);
                break;
            case OpKind::Cnot:
                for (const PauliTerm& t : q2.terms) {
                    if (t.a != Pauli::I) add_pauli_pieces(op.q0, t.a, t.prob, oi);
                    if (t.b != Pauli::I) add_pauli_pieces(op.q1, t.b, t.prob, oi);
                }
                break;
            case OpKind::Reset:
                for (const PauliTerm& t : rc.terms)
                    if (t.a != Pauli::I) add_pauli_pieces(op.q0, t.a, t.prob, oi);
                break;
            case OpKind::Measure: break;
        }

        // Backward transform through the op itself.
        switch (op.kind) {
            case OpKind::Reset:
                sx[q0].clear();
                sz[q0].clear();
                break;
            case OpKind::Hadamard: std::swap(sx[q0], sz[q0]); break;
            case OpKind::Cnot: {
                size_t q1i = static_cast<size_t>(op.q1);
                sx[q0].xor_with(sx[q1i]);
                sz[q1i].xor_with(sz[q0]);
                break;
            }
            case OpKind::Measure:
                // An X just before the readout flips the record and survives.
                sx[q0].xor_with(record_mask[static_cast<size_t>(record_of_op[oi])]);
                break;
        }

        // Pre-op noise (measurement channel) sees the transformed sets.
        if (op.kind == OpKind::Measure)
            for (const PauliTerm& t : mc.terms)
                if (t.a != Pauli::I) add_pauli_pieces(op.q0, t.a, t.prob, oi);
    }

    DetectorGraph g;
    g.nodes = circuit.detectors;
    for (const auto& [key, p] : merged) {
        if (p <= 0.0) continue;
        if (p >= 0.5)
            throw std::runtime_error("build_graph: edge probability reached 0.5");
        detail::DetSet set(nbits);
        set.words = key.first;
        auto fired = set.bits();
        DetEdge e;
        e.u = fired[0];
        e.v = fired.size() == 2 ? fired[1] : -1;
        if (e.v >= 0 && e.v < e.u) std::swap(e.u, e.v);
        e.p = p;
        e.w = std::log((1.0 - p) / p);
        e.observable = key.second;
        g.edges.push_back(e);
    }
    std::sort(g.edges.begin(), g.edges.end(), [](const DetEdge& a, const DetEdge& b) {
        return std::tie(a.u, a.v, a.observable) < std::tie(b.u, b.v, b.observable);
    });
    return g;
}

// Single-source shortest path result over a detector graph. Entries for every
// detector plus the boundary (last index). Unreachable nodes keep infinity.
struct PathDistances {
    std::vector<double> dist;
    std::vector<uint8_t> obs;      // observable parity along the chosen path
    std::vector<int32_t> via;      // edge id used to reach the node (-1 at source)
};

inline PathDistances dijkstra_from(const DetectorGraph& graph,
                                   const std::vector<std::vector<int32_t>>& adj, int32_t source) {
    size_t n = graph.nodes.size() + 1;
    PathDistances out;
    out.dist.assign(n, kInfWeight);
    out.obs.assign(n, 0);
    out.via.assign(n, -1);
    // (distance, node) ordering makes tie-breaks deterministic.
    std::priority_queue<std::pair<double, int32_t>, std::vector<std::pair<double, int32_t>>,
                        std::greater<>> heap;
    out.dist[static_cast<size_t>(source)] = 0.0;
    heap.push({0.0, source});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > out.dist[static_cast<size_t>(u)]) continue;
        for (int32_t eid : adj[static_cast<size_t>(u)]) {
            const DetEdge& e = graph.edges[static_cast<size_t>(eid)];
            int32_t a = e.u;
            int32_t b = e.v < 0 ? graph.boundary() : e.v;
            int32_t to = (a == u) ? b : a;
            double nd = d + e.w;
            if (nd < out.dist[static_cast<size_t>(to)]) {
                out.dist[static_cast<size_t>(to)] = nd;
                out.obs[static_cast<size_t>(to)] =
                    out.obs[static_cast<size_t>(u)] ^ e.observable;
                out.via[static_cast<size_t>(to)] = eid;
                heap.push({nd, to});
            }
        }
    }
    return out;
}

// Distance table between the given sources (and each source to the boundary).
struct DistanceTable {
    std::vector<int32_t> sources;
    std::vector<PathDistances> rows;  // aligned with sources
};

inline DistanceTable shortest_path_weights(const DetectorGraph& graph,
                                           const std::vector<int32_t>& sources) {
    if (graph.nodes.empty()) throw std::invalid_argument("shortest_path_weights: empty graph");
    auto adj = graph.adjacency();
    DistanceTable t;
    t.sources = sources;
    t.rows.reserve(sources.size());
    for (int32_t s : sources) t.rows.push_back(dijkstra_from(graph, adj, s));
    return t;
}

// Line format: "n index x y round host" then "e u v p w mask" (v = -1 for
// boundary edges).
inline void save_graph(std::ostream& os, const DetectorGraph& g) {
    os.precision(17);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const Detector& d = g.nodes[i];
        os << "n " << i << ' ' << d.x << ' ' << d.y << ' ' << d.round << ' ' << d.host << '\n';
    }
    for (const DetEdge& e : g.edges)
        os << "e " << e.u << ' ' << e.v << ' ' << e.p << ' ' << e.w << ' '
           << static_cast<int>(e.observable) << '\n';
}

}  // namespace radqec
