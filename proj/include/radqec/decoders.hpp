#pragma once

// Matching-based decoders over the weighted detector graph: exact MWPM via
// the blossom solver, and an unweighted union-find cluster decoder. Both
// return an explicit correction edge set whose parity covers the defects.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "radqec/blossom.hpp"
#include "radqec/detector_graph.hpp"

namespace radqec {

struct DecodeResult {
    uint8_t predicted_observable_flip = 0;
    std::vector<int32_t> correction_edges;  // ids into DetectorGraph::edges
    double matched_weight = 0.0;            // total weight of the correction
    double decode_time = 0.0;               // seconds, monotonic clock
};

// The correction must flip every defect an odd number of times and every
// quiet detector an even number; the boundary absorbs leftover parity.
inline void validate_correction(const DetectorGraph& graph, const std::vector<uint8_t>& events,
                                const std::vector<int32_t>& correction_edges) {
    std::vector<uint8_t> parity(graph.nodes.size(), 0);
    for (int32_t eid : correction_edges) {
        const DetEdge& e = graph.edges.at(static_cast<size_t>(eid));
        parity[static_cast<size_t>(e.u)] ^= 1;
        if (e.v >= 0) parity[static_cast<size_t>(e.v)] ^= 1;
    }
    for (size_t i = 0; i < parity.size(); ++i)
        if (parity[i] != (events[i] ? 1 : 0))
            throw std::logic_error("correction parity mismatch at detector " + std::to_string(i));
}

namespace detail {

// Follows the via[] chain from target back to the row's source, appending
// edge ids; checks the accumulated observable parity against the row.
inline void walk_path(const DetectorGraph& graph, const PathDistances& row, int32_t target,
                      std::vector<int32_t>& out_edges) {
    if (!std::isfinite(row.dist[static_cast<size_t>(target)]))
        throw std::logic_error("walk_path: target unreachable");
    uint8_t obs = 0;
    int32_t cur = target;
    size_t guard = graph.nodes.size() + 2;
    while (row.via[static_cast<size_t>(cur)] != -1) {
        if (guard-- == 0) throw std::logic_error("walk_path: predecessor cycle");
        int32_t eid = row.via[static_cast<size_t>(cur)];
        const DetEdge& e = graph.edges[static_cast<size_t>(eid)];
        out_edges.push_back(eid);
        obs ^= e.observable;
        int32_t b = e.v < 0 ? graph.boundary() : e.v;
        cur = (cur == e.u) ? b : e.u;
    }
    if (obs != row.obs[static_cast<size_t>(target)])
        throw std::logic_error("walk_path: observable parity mismatch");
}

// Shared MWPM body; row_of(node) must yield the Dijkstra row of a defect
// node. The boundary is folded into the pair weights: matching two defects
// costs min(direct path, both boundary arcs), and an odd defect is absorbed
// by a dummy vertex priced at its boundary arc. This reproduces the
// boundary-replica construction exactly with half the matrix.
template <typename RowOf>
DecodeResult mwpm_run(const DetectorGraph& graph, const std::vector<uint8_t>& events,
                      RowOf&& row_of, std::chrono::steady_clock::time_point t0) {
    if (events.size() != graph.nodes.size())
        throw std::invalid_argument("mwpm_decode: event vector length mismatch");
    DecodeResult out;
    std::vector<int32_t> defects;
    for (size_t i = 0; i < events.size(); ++i)
        if (events[i]) defects.push_back(static_cast<int32_t>(i));

    if (!defects.empty()) {
        size_t m = defects.size();
        size_t b = static_cast<size_t>(graph.boundary());
        size_t n = m + (m % 2);  // dummy vertex absorbs odd parity
        constexpr double kInf = std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> wmat(n, std::vector<double>(n, kInf));
        for (size_t i = 0; i < m; ++i) {
            const PathDistances& ri = row_of(defects[i]);
            for (size_t j = i + 1; j < m; ++j) {
                const PathDistances& rj = row_of(defects[j]);
                double direct = ri.dist[static_cast<size_t>(defects[j])];
                double folded = std::min(direct, ri.dist[b] + rj.dist[b]);
                wmat[i][j] = wmat[j][i] = folded;
            }
            if (n > m) wmat[i][m] = wmat[m][i] = ri.dist[b];
        }
        std::vector<int32_t> mate = min_weight_perfect_matching(wmat);
        for (size_t i = 0; i < m; ++i) {
            size_t j = static_cast<size_t>(mate[i]);
            if (j < i) continue;
            const PathDistances& ri = row_of(defects[i]);
            if (j == m) {
                walk_path(graph, ri, graph.boundary(), out.correction_edges);
                continue;
            }
            const PathDistances& rj = row_of(defects[static_cast<size_t>(j)]);
            double direct = ri.dist[static_cast<size_t>(defects[j])];
            if (direct <= ri.dist[b] + rj.dist[b]) {
                walk_path(graph, ri, defects[j], out.correction_edges);
            } else {
                walk_path(graph, ri, graph.boundary(), out.correction_edges);
                walk_path(graph, rj, graph.boundary(), out.correction_edges);
            }
        }
        for (int32_t eid : out.correction_edges) {
            out.predicted_observable_flip ^= graph.edges[static_cast<size_t>(eid)].observable;
            out.matched_weight += graph.edges[static_cast<size_t>(eid)].w;
        }
    }
    out.decode_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    validate_correction(graph, events, out.correction_edges);
    return out;
}

}  // namespace detail

// Batch-decoding helper: all-sources shortest-path table computed once per
// graph. The referenced graph must outlive the context.
class MatchingContext {
public:
    explicit MatchingContext(const DetectorGraph& graph) : graph_(&graph) {
        if (graph.nodes.empty())
            throw std::invalid_argument("MatchingContext: empty detector graph");
        std::vector<int32_t> sources(graph.nodes.size());
        std::iota(sources.begin(), sources.end(), 0);
        table_ = shortest_path_weights(graph, sources);
    }

    const DetectorGraph& graph() const { return *graph_; }
    const PathDistances& row(int32_t node) const {
        return table_.rows.at(static_cast<size_t>(node));
    }

private:
    const DetectorGraph* graph_;
    DistanceTable table_;
};

// Per-call variant: runs Dijkstra from the defects only.
inline DecodeResult mwpm_decode(const DetectorGraph& graph, const std::vector<uint8_t>& events) {
    auto t0 = std::chrono::steady_clock::now();
    if (events.size() != graph.nodes.size())
        throw std::invalid_argument("mwpm_decode: event vector length mismatch");
    auto adj = graph.adjacency();
    std::vector<PathDistances> rows;
    std::vector<int32_t> ordinal(graph.nodes.size(), -1);
    for (size_t i = 0; i < events.size(); ++i)
        if (events[i]) {
            ordinal[i] = static_cast<int32_t>(rows.size());
            rows.push_back(dijkstra_from(graph, adj, static_cast<int32_t>(i)));
        }
    auto row_of = [&](int32_t node) -> const PathDistances& {
        return rows[static_cast<size_t>(ordinal[static_cast<size_t>(node)])];
    };
    return detail::mwpm_run(graph, events, row_of, t0);
}

inline DecodeResult mwpm_decode(const MatchingContext& ctx, const std::vector<uint8_t>& events) {
    auto t0 = std::chrono::steady_clock::now();
    auto row_of = [&](int32_t node) -> const PathDistances& { return ctx.row(node); };
    return detail::mwpm_run(ctx.graph(), events, row_of, t0);
}

namespace detail {

struct ClusterDsu {
    std::vector<int32_t> parent;
    std::vector<int32_t> rank;
    std::vector<uint8_t> parity;  // defect parity, tracked at the root

    explicit ClusterDsu(size_t n) : parent(n), rank(n, 0), parity(n, 0) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int32_t find(int32_t x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] =
                parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int32_t a, int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank[static_cast<size_t>(a)] < rank[static_cast<size_t>(b)]) std::swap(a, b);
        parent[static_cast<size_t>(b)] = a;
        parity[static_cast<size_t>(a)] ^= parity[static_cast<size_t>(b)];
        if (rank[static_cast<size_t>(a)] == rank[static_cast<size_t>(b)])
            ++rank[static_cast<size_t>(a)];
    }
};

}  // namespace detail

// Unweighted cluster-growth decoder: every active (odd, boundary-free)
// cluster grows all its incident edges by one half-step per round; full
// edges merge clusters, and a spanning forest of the grown region is peeled
// leaf-first to produce the correction.
inline DecodeResult union_find_decode(const DetectorGraph& graph,
                                      const std::vector<uint8_t>& events) {
    auto t0 = std::chrono::steady_clock::now();
    if (events.size() != graph.nodes.size())
        throw std::invalid_argument("union_find_decode: event vector length mismatch");
    DecodeResult out;
    size_t n_det = graph.nodes.size();
    int32_t bnd = graph.boundary();
    bool any_defect = false;
    for (uint8_t e : events) any_defect |= (e != 0);

    if (any_defect) {
        detail::ClusterDsu dsu(n_det + 1);
        for (size_t i = 0; i < n_det; ++i)
            if (events[i]) dsu.parity[i] = 1;
        std::vector<uint8_t> growth(graph.edges.size(), 0);

        auto endpoint = [&](const DetEdge& e, bool second) {
            return second ? (e.v < 0 ? bnd : e.v) : e.u;
        };
        while (true) {
            int32_t broot = dsu.find(bnd);
            auto active = [&](int32_t node) {
                int32_t r = dsu.find(node);
                return r != broot && dsu.parity[static_cast<size_t>(r)] != 0;
            };
            bool any_active = false;
            for (size_t i = 0; i < n_det && !any_active; ++i)
                any_active = active(static_cast<int32_t>(i));
            if (!any_active) break;

            // Increments use the pre-round cluster states; merges follow.
            std::vector<int32_t> filled;
            bool grew = false;
            for (size_t eid = 0; eid < graph.edges.size(); ++eid) {
                if (growth[eid] >= 2) continue;
                const DetEdge& e = graph.edges[eid];
                int inc = (active(endpoint(e, false)) ? 1 : 0) +
                          (active(endpoint(e, true)) ? 1 : 0);
                if (inc == 0) continue;
                grew = true;
                growth[eid] = static_cast<uint8_t>(std::min(2, growth[eid] + inc));
                if (growth[eid] >= 2) filled.push_back(static_cast<int32_t>(eid));
            }
            if (!grew)
                throw std::runtime_error(
                    "union_find_decode: active cluster has no edge left to grow");
            for (int32_t eid : filled) {
                const DetEdge& e = graph.edges[static_cast<size_t>(eid)];
                dsu.unite(endpoint(e, false), endpoint(e, true));
            }
        }

        // Spanning forest over full edges, boundary tree first.
        std::vector<std::vector<int32_t>> fadj(n_det + 1);
        for (size_t eid = 0; eid < graph.edges.size(); ++eid)
            if (growth[eid] >= 2) {
                const DetEdge& e = graph.edges[eid];
                fadj[static_cast<size_t>(e.u)].push_back(static_cast<int32_t>(eid));
                fadj[static_cast<size_t>(endpoint(e, true))].push_back(static_cast<int32_t>(eid));
            }
        std::vector<uint8_t> visited(n_det + 1, 0);
        std::vector<int32_t> parent_edge(n_det + 1, -1);
        std::vector<int32_t> parent_node(n_det + 1, -1);
        std::vector<int32_t> order;
        auto bfs = [&](int32_t root) {
            visited[static_cast<size_t>(root)] = 1;
            size_t head = order.size();
            order.push_back(root);
            while (head < order.size()) {
                int32_t x = order[head++];
                for (int32_t eid : fadj[static_cast<size_t>(x)]) {
                    const DetEdge& e = graph.edges[static_cast<size_t>(eid)];
                    int32_t other = (endpoint(e, false) == x) ? endpoint(e, true)
                                                              : endpoint(e, false);
                    if (visited[static_cast<size_t>(other)]) continue;
                    visited[static_cast<size_t>(other)] = 1;
                    parent_edge[static_cast<size_t>(other)] = eid;
                    parent_node[static_cast<size_t>(other)] = x;
                    order.push_back(other);
                }
            }
        };
        bfs(bnd);
        for (size_t i = 0; i < n_det; ++i)
            if (!visited[i] && (events[i] || !fadj[i].empty())) bfs(static_cast<int32_t>(i));

        std::vector<uint8_t> pending(n_det + 1, 0);
        for (size_t i = 0; i < n_det; ++i) pending[i] = events[i] ? 1 : 0;
        for (size_t idx = order.size(); idx-- > 0;) {
            int32_t x = order[idx];
            if (parent_edge[static_cast<size_t>(x)] == -1) {
                if (x != bnd && pending[static_cast<size_t>(x)])
                    throw std::logic_error("union_find_decode: unpaired defect after peeling");
                continue;
            }
            if (pending[static_cast<size_t>(x)]) {
                out.correction_edges.push_back(parent_edge[static_cast<size_t>(x)]);
                pending[static_cast<size_t>(parent_node[static_cast<size_t>(x)])] ^= 1;
            }
        }
        for (int32_t eid : out.correction_edges) {
            out.predicted_observable_flip ^= graph.edges[static_cast<size_t>(eid)].observable;
            out.matched_weight += graph.edges[static_cast<size_t>(eid)].w;
        }
    }
    out.decode_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    validate_correction(graph, events, out.correction_edges);
    return out;
}

}  // namespace radqec
