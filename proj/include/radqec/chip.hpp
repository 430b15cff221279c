#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace radqec {

// Gate durations in seconds.
struct GateTimings {
    double single_qubit = 25e-9;
    double two_qubit = 32e-9;
    double measure = 58e-9;
    double reset = 58e-9;
};

struct ChipQubit {
    double x = 0.0;
    double y = 0.0;
};

// A device: qubits at planar coordinates (coupler-pitch units) plus couplers.
// Grid chips place qubits on the x+y-even sublattice, so every coupler spans
// a diagonal of length sqrt(2).
struct Chip {
    std::vector<ChipQubit> qubits;
    std::vector<std::pair<int32_t, int32_t>> couplers;  // normalised i < j

    std::vector<std::vector<int32_t>> adjacency() const {
        std::vector<std::vector<int32_t>> adj(qubits.size());
        for (auto [a, b] : couplers) {
            adj[static_cast<size_t>(a)].push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
        for (auto& row : adj) std::sort(row.begin(), row.end());
        return adj;
    }

    // Exact-coordinate lookup; returns -1 when absent. Grid chips use integer
    // coordinates so exact compare is safe.
    int32_t find_qubit(double x, double y) const {
        for (size_t i = 0; i < qubits.size(); ++i)
            if (qubits[i].x == x && qubits[i].y == y) return static_cast<int32_t>(i);
        return -1;
    }
};

// Rectangular grid of cross-shaped components: all integer points with even
// coordinate sum in [0, 2*cols] x [0, 2*rows], couplers between diagonal
// neighbours. rows = cols = 1 gives the minimal 5-qubit cross.
inline Chip build_grid_chip(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("build_grid_chip: rows and cols must be >= 1");
    Chip chip;
    std::map<std::pair<int, int>, int32_t> index;
    for (int y = 0; y <= 2 * rows; ++y) {
        for (int x = 0; x <= 2 * cols; ++x) {
            if ((x + y) % 2 != 0) continue;
            index[{x, y}] = static_cast<int32_t>(chip.qubits.size());
            chip.qubits.push_back({static_cast<double>(x), static_cast<double>(y)});
        }
    }
    for (const auto& [xy, i] : index) {
        auto [x, y] = xy;
        for (int dx : {-1, 1}) {
            auto it = index.find({x + dx, y + 1});
            if (it == index.end()) continue;
            int32_t a = i, b = it->second;
            chip.couplers.emplace_back(std::min(a, b), std::max(a, b));
        }
    }
    std::sort(chip.couplers.begin(), chip.couplers.end());
    return chip;
}

// Mean over qubits of the Euclidean distance to the nearest other qubit.
// sqrt(2) for any grid chip (nearest neighbour is always diagonal).
inline double device_avg_min_dist(const Chip& chip) {
    size_t n = chip.qubits.size();
    if (n < 2) throw std::invalid_argument("device_avg_min_dist: need at least two qubits");
    long double acc = 0.0L;
    for (size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            double dx = chip.qubits[i].x - chip.qubits[j].x;
            double dy = chip.qubits[i].y - chip.qubits[j].y;
            best = std::min(best, std::sqrt(dx * dx + dy * dy));
        }
        acc += best;
    }
    return static_cast<double>(acc / static_cast<long double>(n));
}

// Coupling requirements of a circuit: one node per circuit qubit, one edge per
// pair that must share a coupler. Nodes carry no coordinates.
struct InteractionGraph {
    int32_t n = 0;
    std::vector<std::pair<int32_t, int32_t>> edges;
};

struct Mapping {
    std::vector<int32_t> to_chip;  // circuit qubit index -> chip qubit index
};

inline void validate_mapping(const Chip& chip, const InteractionGraph& graph, const Mapping& map) {
    if (map.to_chip.size() != static_cast<size_t>(graph.n))
        throw std::invalid_argument("validate_mapping: size mismatch");
    std::vector<uint8_t> used(chip.qubits.size(), 0);
    for (int32_t q : map.to_chip) {
        if (q < 0 || static_cast<size_t>(q) >= chip.qubits.size())
            throw std::invalid_argument("validate_mapping: chip index out of range");
        if (used[static_cast<size_t>(q)]) throw std::invalid_argument("validate_mapping: not injective");
        used[static_cast<size_t>(q)] = 1;
    }
    std::vector<std::pair<int32_t, int32_t>> have = chip.couplers;
    for (auto [a, b] : graph.edges) {
        int32_t u = map.to_chip[static_cast<size_t>(a)], v = map.to_chip[static_cast<size_t>(b)];
        auto key = std::make_pair(std::min(u, v), std::max(u, v));
        if (!std::binary_search(have.begin(), have.end(), key))
            throw std::invalid_argument("validate_mapping: edge not on a coupler");
    }
}

// Subgraph monomorphism by backtracking. Placement order grows connected
// (most placed neighbours first), candidates are scanned in ascending chip
// index, so the first solution is deterministic. Throws naming the first
// unmatchable node when no embedding exists.
inline Mapping map_circuit(const Chip& chip, const InteractionGraph& graph) {
    if (graph.n <= 0) throw std::invalid_argument("map_circuit: empty interaction graph");
    for (auto [a, b] : graph.edges)
        if (a < 0 || b < 0 || a >= graph.n || b >= graph.n || a == b)
            throw std::invalid_argument("map_circuit: malformed edge");

    size_t nn = static_cast<size_t>(graph.n);
    std::vector<std::vector<int32_t>> gadj(nn);
    for (auto [a, b] : graph.edges) {
        gadj[static_cast<size_t>(a)].push_back(b);
        gadj[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& row : gadj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    auto cadj = chip.adjacency();

    // Connected placement order.
    std::vector<int32_t> order;
    std::vector<uint8_t> placed_flag(nn, 0);
    std::vector<int32_t> placed_neighbours(nn, 0);
    for (size_t step = 0; step < nn; ++step) {
        int32_t best = -1;
        for (int32_t v = 0; v < graph.n; ++v) {
            if (placed_flag[static_cast<size_t>(v)]) continue;
            if (best < 0) { best = v; continue; }
            size_t sv = static_cast<size_t>(v), sb = static_cast<size_t>(best);
            auto key_v = std::make_tuple(-placed_neighbours[sv], -static_cast<int32_t>(gadj[sv].size()), v);
            auto key_b = std::make_tuple(-placed_neighbours[sb], -static_cast<int32_t>(gadj[sb].size()), best);
            if (key_v < key_b) best = v;
        }
        order.push_back(best);
        placed_flag[static_cast<size_t>(best)] = 1;
        for (int32_t w : gadj[static_cast<size_t>(best)]) ++placed_neighbours[static_cast<size_t>(w)];
    }

    std::vector<int32_t> assign(nn, -1);
    std::vector<uint8_t> used(chip.qubits.size(), 0);
    size_t deepest = 0;

    auto candidate_ok = [&](int32_t v, int32_t c) {
        if (used[static_cast<size_t>(c)]) return false;
        if (cadj[static_cast<size_t>(c)].size() < gadj[static_cast<size_t>(v)].size()) return false;
        for (int32_t w : gadj[static_cast<size_t>(v)]) {
            int32_t img = assign[static_cast<size_t>(w)];
            if (img < 0) continue;
            if (!std::binary_search(cadj[static_cast<size_t>(c)].begin(), cadj[static_cast<size_t>(c)].end(), img))
                return false;
        }
        return true;
    };

    auto rec = [&](auto&& self, size_t depth) -> bool {
        if (depth == nn) return true;
        deepest = std::max(deepest, depth);
        int32_t v = order[depth];
        // Restrict to neighbours of an already-placed neighbour when possible.
        const std::vector<int32_t>* pool = nullptr;
        for (int32_t w : gadj[static_cast<size_t>(v)]) {
            int32_t img = assign[static_cast<size_t>(w)];
            if (img >= 0) { pool = &cadj[static_cast<size_t>(img)]; break; }
        }
        if (pool) {
            for (int32_t c : *pool) {
                if (!candidate_ok(v, c)) continue;
                assign[static_cast<size_t>(v)] = c;
                used[static_cast<size_t>(c)] = 1;
                if (self(self, depth + 1)) return true;
                assign[static_cast<size_t>(v)] = -1;
                used[static_cast<size_t>(c)] = 0;
            }
        } else {
            for (int32_t c = 0; c < static_cast<int32_t>(chip.qubits.size()); ++c) {
                if (!candidate_ok(v, c)) continue;
                assign[static_cast<size_t>(v)] = c;
                used[static_cast<size_t>(c)] = 1;
                if (self(self, depth + 1)) return true;
                assign[static_cast<size_t>(v)] = -1;
                used[static_cast<size_t>(c)] = 0;
            }
        }
        return false;
    };

    if (!rec(rec, 0)) {
        throw std::runtime_error("map_circuit: unmappable, first unmatchable node " +
                                 std::to_string(order[std::min(deepest, nn - 1)]));
    }
    Mapping m;
    m.to_chip = std::move(assign);
    return m;
}

// Text form: one qubit per line "index x y", then one coupler per line "i j".
inline void save_chip(std::ostream& os, const Chip& chip) {
    os.precision(17);
    for (size_t i = 0; i < chip.qubits.size(); ++i)
        os << i << ' ' << chip.qubits[i].x << ' ' << chip.qubits[i].y << '\n';
    for (auto [a, b] : chip.couplers) os << a << ' ' << b << '\n';
}

inline Chip load_chip(std::istream& is) {
    Chip chip;
    std::string line;
    std::vector<std::pair<int64_t, ChipQubit>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> tok;
        double v;
        while (ls >> v) tok.push_back(v);
        if (tok.size() == 3) {
            rows.emplace_back(static_cast<int64_t>(tok[0]), ChipQubit{tok[1], tok[2]});
        } else if (tok.size() == 2) {
            int32_t a = static_cast<int32_t>(tok[0]), b = static_cast<int32_t>(tok[1]);
            chip.couplers.emplace_back(std::min(a, b), std::max(a, b));
        } else {
            throw std::invalid_argument("load_chip: malformed line: " + line);
        }
    }
    chip.qubits.resize(rows.size());
    for (auto& [idx, q] : rows) {
        if (idx < 0 || static_cast<size_t>(idx) >= rows.size())
            throw std::invalid_argument("load_chip: qubit index out of range");
        chip.qubits[static_cast<size_t>(idx)] = q;
    }
    for (auto [a, b] : chip.couplers)
        if (a < 0 || static_cast<size_t>(b) >= chip.qubits.size())
            throw std::invalid_argument("load_chip: coupler index out of range");
    std::sort(chip.couplers.begin(), chip.couplers.end());
    return chip;
}

}  // namespace radqec
