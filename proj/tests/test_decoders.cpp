#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "radqec/decoders.hpp"
#include "radqec/frame_sim.hpp"
#include "radqec/surface_code.hpp"

using namespace radqec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exhaustive minimum over all perfect matchings of a weight matrix.
struct BruteResult {
    double best = kInf;
    long configs = 0;
};

void brute_pairings(uint32_t remaining, double cost, const std::vector<std::vector<double>>& w,
                    BruteResult& out) {
    if (!remaining) {
        ++out.configs;
        out.best = std::min(out.best, cost);
        return;
    }
    int i = std::countr_zero(remaining);
    uint32_t rest = remaining & (remaining - 1);
    for (uint32_t bits = rest; bits; bits &= bits - 1) {
        int j = std::countr_zero(bits);
        brute_pairings(rest & ~(1u << j), cost + w[static_cast<size_t>(i)][static_cast<size_t>(j)],
                       w, out);
    }
}

// Exhaustive minimum over defect pairings where any defect may instead take
// its own boundary arc; counts every structural configuration.
void brute_with_boundary(uint32_t remaining, double cost,
                         const std::vector<std::vector<double>>& pair_w,
                         const std::vector<double>& boundary_w, BruteResult& out) {
    if (!remaining) {
        ++out.configs;
        out.best = std::min(out.best, cost);
        return;
    }
    int i = std::countr_zero(remaining);
    uint32_t rest = remaining & (remaining - 1);
    brute_with_boundary(rest, cost + boundary_w[static_cast<size_t>(i)], pair_w, boundary_w, out);
    for (uint32_t bits = rest; bits; bits &= bits - 1) {
        int j = std::countr_zero(bits);
        brute_with_boundary(rest & ~(1u << j),
                            cost + pair_w[static_cast<size_t>(i)][static_cast<size_t>(j)], pair_w,
                            boundary_w, out);
    }
}

double matching_weight(const std::vector<std::vector<double>>& w,
                       const std::vector<int32_t>& mate) {
    double total = 0.0;
    for (size_t i = 0; i < mate.size(); ++i)
        if (mate[i] > static_cast<int32_t>(i)) total += w[i][static_cast<size_t>(mate[i])];
    return total;
}

// Bitmask DP over perfect matchings: exact optimum, practical up to n = 20.
double pairing_dp(const std::vector<std::vector<double>>& w) {
    size_t n = w.size();
    std::vector<double> dp(size_t{1} << n, kInf);
    dp[0] = 0.0;
    for (uint32_t mask = 1; mask < (1u << n); ++mask) {
        int i = std::countr_zero(mask);
        uint32_t rest = mask & (mask - 1);
        for (uint32_t bits = rest; bits; bits &= bits - 1) {
            int j = std::countr_zero(bits);
            double cand = dp[rest & ~(1u << j)] + w[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (cand < dp[mask]) dp[mask] = cand;
        }
    }
    return dp[(size_t{1} << n) - 1];
}

void require_involution(const std::vector<int32_t>& mate) {
    for (size_t i = 0; i < mate.size(); ++i) {
        REQUIRE(mate[i] != static_cast<int32_t>(i));
        REQUIRE(mate[static_cast<size_t>(mate[i])] == static_cast<int32_t>(i));
    }
}

std::vector<uint8_t> event_vector(size_t n, const std::vector<int32_t>& defects) {
    std::vector<uint8_t> v(n, 0);
    for (int32_t d : defects) v[static_cast<size_t>(d)] = 1;
    return v;
}

int32_t find_edge(const DetectorGraph& g, int32_t u, int32_t v) {
    for (size_t e = 0; e < g.edges.size(); ++e)
        if (g.edges[e].u == u && g.edges[e].v == v) return static_cast<int32_t>(e);
    FAIL("no such edge");
    return -1;
}

int32_t first_cnot_after(const ScheduledCircuit& c, int32_t q, double t0) {
    for (size_t i = 0; i < c.ops.size(); ++i) {
        const Op& op = c.ops[i];
        if (op.kind == OpKind::Cnot && op.start >= t0 && (op.q0 == q || op.q1 == q))
            return static_cast<int32_t>(i);
    }
    FAIL("no such CNOT");
    return -1;
}

}  // namespace

TEST_CASE("blossom beats greedy on the classic four-defect trap") {
    // Greedy grabs the cheapest edge (0,1) and pays 1 + 10; optimal is 2 + 2.
    std::vector<std::vector<double>> w = {
        {kInf, 1.0, 2.0, 5.0},
        {1.0, kInf, 5.0, 2.0},
        {2.0, 5.0, kInf, 10.0},
        {5.0, 2.0, 10.0, kInf},
    };
    auto mate = min_weight_perfect_matching(w);
    REQUIRE(mate == std::vector<int32_t>{2, 3, 0, 1});
    REQUIRE_THAT(matching_weight(w, mate), Catch::Matchers::WithinRel(4.0, 1e-12));

    BruteResult brute;
    brute_pairings(0b1111, 0.0, w, brute);
    REQUIRE(brute.configs == 3);
    REQUIRE_THAT(matching_weight(w, mate), Catch::Matchers::WithinRel(brute.best, 1e-12));
}

TEST_CASE("blossom matches brute force on random complete graphs") {
    std::mt19937_64 rng(20240817);
    for (int n : {2, 4, 6, 8, 10}) {
        for (int rep = 0; rep < 60; ++rep) {
            std::vector<std::vector<double>> w(static_cast<size_t>(n),
                                               std::vector<double>(static_cast<size_t>(n), kInf));
            bool integral = rep % 2 == 0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double v = integral
                                   ? static_cast<double>(1 + rng() % 5)
                                   : 0.5 + (rng() >> 11) * 0x1.0p-53;
                    w[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
                    w[static_cast<size_t>(j)][static_cast<size_t>(i)] = v;
                }
            auto mate = min_weight_perfect_matching(w);
            for (int i = 0; i < n; ++i) {
                REQUIRE(mate[static_cast<size_t>(i)] != static_cast<int32_t>(i));
                REQUIRE(mate[static_cast<size_t>(mate[static_cast<size_t>(i)])] ==
                        static_cast<int32_t>(i));
            }
            BruteResult brute;
            brute_pairings((1u << n) - 1u, 0.0, w, brute);
            REQUIRE_THAT(matching_weight(w, mate),
                         Catch::Matchers::WithinRel(brute.best, 1e-8));
            // Bitwise-stable under repetition.
            REQUIRE(min_weight_perfect_matching(w) == mate);
        }
    }
}

TEST_CASE("blossom pairs symmetrically through nested blossoms") {
    // Folded code-graph distances (massive ties, one boundary-priced column).
    // This instance drives the solver through doubly nested blossoms; a past
    // regression committed different tight edges at different nesting levels
    // and left asymmetric mates.
    static const double kW[16][16] = {
        {0, 12.141533457735047, 9.5959931679085688, 20.638914337051357, 21.737526625643618,
         19.191986335817138, 30.234907504959928, 31.333519793552185, 42.376440962694971,
         39.830900672868495, 40.929512961460752, 62.039460680370553, 72.784661560947598,
         78.214873344502763, 76.767945343268551, 41.658378553238052},
        {12.141533457735047, 0, 21.737526625643618, 20.128088713437073, 9.5959931679085688,
         31.333519793552185, 29.72408188134564, 19.191986335817138, 30.234907504959928,
         39.320075049254207, 28.787979503725708, 62.327142752556853, 73.072343633133897,
         77.088851271377465, 80.920509831368193, 41.946060625424352},
        {9.5959931679085688, 21.737526625643618, 0, 11.042921169142788, 12.141533457735047,
         9.5959931679085688, 20.638914337051357, 21.737526625643618, 32.780447794786404,
         30.234907504959928, 31.333519793552185, 62.039460680370553, 69.717492465186453,
         68.618880176594203, 67.171952175359976, 41.658378553238052},
        {20.638914337051357, 20.128088713437073, 11.042921169142788, 0, 10.532095545528502,
         12.141533457735047, 9.5959931679085688, 12.141533457735047, 21.737526625643618,
         19.191986335817138, 21.737526625643618, 59.958989386305561, 72.263032755012929,
         57.575959007451409, 67.736477203490864, 41.946060625424352},
        {21.737526625643618, 9.5959931679085688, 12.141533457735047, 10.532095545528502, 0,
         21.737526625643618, 20.128088713437073, 9.5959931679085688, 20.638914337051357,
         29.72408188134564, 19.191986335817138, 62.327142752556853, 73.072343633133897,
         67.492858103468905, 77.653376299508352, 41.946060625424352},
        {19.191986335817138, 31.333519793552185, 9.5959931679085688, 12.141533457735047,
         21.737526625643618, 0, 11.042921169142788, 12.141533457735047, 23.184454626877837,
         20.638914337051357, 21.737526625643618, 61.40591738753978, 60.121499297277886,
         59.022887008685629, 57.575959007451409, 41.658378553238052},
        {30.234907504959928, 29.72408188134564, 20.638914337051357, 9.5959931679085688,
         20.128088713437073, 11.042921169142788, 0, 10.532095545528502, 12.141533457735047,
         9.5959931679085688, 12.141533457735047, 50.362996218396994, 62.667039587104362,
         47.979965839542842, 58.140484035582304, 41.946060625424352},
        {31.333519793552185, 19.191986335817138, 21.737526625643618, 12.141533457735047,
         9.5959931679085688, 12.141533457735047, 10.532095545528502, 0, 11.042921169142788,
         20.128088713437073, 9.5959931679085688, 60.895091763925493, 70.282017493317355,
         57.89686493556033, 68.057383131599792, 41.946060625424352},
        {42.376440962694971, 30.234907504959928, 32.780447794786404, 21.737526625643618,
         20.638914337051357, 23.184454626877837, 12.141533457735047, 11.042921169142788, 0,
         21.737526625643618, 12.141533457735047, 49.852170594782706, 70.846542521448242,
         58.461389963691225, 68.62190815973068, 41.658378553238052},
        {39.830900672868495, 39.320075049254207, 30.234907504959928, 19.191986335817138,
         29.72408188134564, 20.638914337051357, 9.5959931679085688, 20.128088713437073,
         21.737526625643618, 0, 10.532095545528502, 40.767003050488427, 53.071046419195795,
         38.383972671634275, 48.544490867673737, 41.946060625424352},
        {40.929512961460752, 28.787979503725708, 31.333519793552185, 21.737526625643618,
         19.191986335817138, 21.737526625643618, 12.141533457735047, 9.5959931679085688,
         12.141533457735047, 10.532095545528502, 0, 51.299098596016925, 60.686024325408781,
         48.300871767651763, 58.461389963691225, 41.946060625424352},
        {62.039460680370553, 62.327142752556853, 62.039460680370553, 59.958989386305561,
         62.327142752556853, 61.40591738753978, 50.362996218396994, 60.895091763925493,
         49.852170594782706, 40.767003050488427, 51.299098596016925, 0, 43.505491018956754,
         22.302051653774505, 32.462569849813967, 20.381082127132501},
        {72.784661560947598, 73.072343633133897, 69.717492465186453, 72.263032755012929,
         73.072343633133897, 60.121499297277886, 62.667039587104362, 70.282017493317355,
         70.846542521448242, 53.071046419195795, 60.686024325408781, 43.505491018956754, 0,
         21.203439365182248, 11.042921169142788, 31.126283007709549},
        {78.214873344502763, 77.088851271377465, 68.618880176594203, 57.575959007451409,
         67.492858103468905, 59.022887008685629, 47.979965839542842, 57.89686493556033,
         58.461389963691225, 38.383972671634275, 48.300871767651763, 22.302051653774505,
         21.203439365182248, 0, 10.16051819603946, 39.218068305027131},
        {76.767945343268551, 80.920509831368193, 67.171952175359976, 67.736477203490864,
         77.653376299508352, 57.575959007451409, 58.140484035582304, 68.057383131599792,
         68.62190815973068, 48.544490867673737, 58.461389963691225, 32.462569849813967,
         11.042921169142788, 10.16051819603946, 0, 38.974449205943841},
        {41.658378553238052, 41.946060625424352, 41.658378553238052, 41.946060625424352,
         41.946060625424352, 41.658378553238052, 41.946060625424352, 41.946060625424352,
         41.658378553238052, 41.946060625424352, 41.946060625424352, 20.381082127132501,
         31.126283007709549, 39.218068305027131, 38.974449205943841, 0},
    };
    std::vector<std::vector<double>> w(16, std::vector<double>(16));
    for (size_t i = 0; i < 16; ++i)
        for (size_t j = 0; j < 16; ++j) w[i][j] = kW[i][j];

    auto mate = min_weight_perfect_matching(w);
    require_involution(mate);
    REQUIRE_THAT(matching_weight(w, mate), Catch::Matchers::WithinRel(pairing_dp(w), 1e-9));
    REQUIRE(min_weight_perfect_matching(w) == mate);
}

TEST_CASE("blossom matches the dp oracle on clustered tie-heavy instances") {
    // Tight integer clusters far apart repeat the same few distances many
    // times — the regime where large odd tight sets form and nest.
    std::mt19937_64 rng(6021023);
    const int cx[3] = {0, 40, 0};
    const int cy[3] = {0, 0, 40};
    for (int rep = 0; rep < 40; ++rep) {
        int n = 12 + 2 * static_cast<int>(rng() % 3);
        std::vector<int> px(static_cast<size_t>(n)), py(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int c = static_cast<int>(rng() % 3);
            px[static_cast<size_t>(i)] = cx[c] + static_cast<int>(rng() % 4);
            py[static_cast<size_t>(i)] = cy[c] + static_cast<int>(rng() % 4);
        }
        std::vector<std::vector<double>> w(static_cast<size_t>(n),
                                           std::vector<double>(static_cast<size_t>(n), 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                    std::hypot(px[static_cast<size_t>(i)] - px[static_cast<size_t>(j)],
                               py[static_cast<size_t>(i)] - py[static_cast<size_t>(j)]);
        auto mate = min_weight_perfect_matching(w);
        require_involution(mate);
        REQUIRE_THAT(matching_weight(w, mate), Catch::Matchers::WithinRel(pairing_dp(w), 1e-8));
    }
}

TEST_CASE("blossom input validation") {
    REQUIRE_THROWS_AS(min_weight_perfect_matching({{0.0}}), std::invalid_argument);
    std::vector<std::vector<double>> ragged = {{kInf, 1.0}, {1.0}};
    REQUIRE_THROWS_AS(min_weight_perfect_matching(ragged), std::invalid_argument);
    std::vector<std::vector<double>> negative = {{kInf, -1.0}, {-1.0, kInf}};
    REQUIRE_THROWS_AS(min_weight_perfect_matching(negative), std::invalid_argument);
    std::vector<std::vector<double>> isolated = {{kInf, kInf}, {kInf, kInf}};
    REQUIRE_THROWS_AS(min_weight_perfect_matching(isolated), std::runtime_error);
    REQUIRE(min_weight_perfect_matching({}).empty());
}

TEST_CASE("blossom respects forbidden pairs") {
    // Only the expensive cross pairing is allowed.
    std::vector<std::vector<double>> w = {
        {kInf, kInf, 3.0, 4.0},
        {kInf, kInf, 4.0, 3.0},
        {3.0, 4.0, kInf, kInf},
        {4.0, 3.0, kInf, kInf},
    };
    auto mate = min_weight_perfect_matching(w);
    REQUIRE(mate == std::vector<int32_t>{2, 3, 0, 1});
}

TEST_CASE("mwpm matches the boundary-aware brute force on code graphs") {
    std::mt19937_64 rng(7151);
    long enumerated[9] = {0};
    for (int distance : {3, 5}) {
        SurfaceCode code = build_rotated_surface_code(distance, 2, Basis::Z);
        DetectorGraph graph = build_graph(code.circuit, NoiseParams{0.004});
        MatchingContext ctx(graph);
        size_t n = graph.nodes.size();

        for (int rep = 0; rep < 150; ++rep) {
            int m = 1 + static_cast<int>(rng() % 8);
            std::vector<int32_t> defects;
            while (static_cast<int>(defects.size()) < m) {
                int32_t cand = static_cast<int32_t>(rng() % n);
                if (std::find(defects.begin(), defects.end(), cand) == defects.end())
                    defects.push_back(cand);
            }
            std::sort(defects.begin(), defects.end());

            std::vector<std::vector<double>> pair_w(
                static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), kInf));
            std::vector<double> boundary_w(static_cast<size_t>(m), kInf);
            for (int i = 0; i < m; ++i) {
                const PathDistances& row = ctx.row(defects[static_cast<size_t>(i)]);
                boundary_w[static_cast<size_t>(i)] =
                    row.dist[static_cast<size_t>(graph.boundary())];
                for (int j = 0; j < m; ++j)
                    if (j != i)
                        pair_w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                            row.dist[static_cast<size_t>(defects[static_cast<size_t>(j)])];
            }
            BruteResult brute;
            brute_with_boundary((1u << m) - 1u, 0.0, pair_w, boundary_w, brute);
            enumerated[m] = brute.configs;
            REQUIRE(std::isfinite(brute.best));

            std::vector<uint8_t> events = event_vector(n, defects);
            DecodeResult by_ctx = mwpm_decode(ctx, events);
            REQUIRE_THAT(by_ctx.matched_weight, Catch::Matchers::WithinRel(brute.best, 1e-8));

            // The per-call path must agree with the precomputed table bit for bit.
            DecodeResult by_call = mwpm_decode(graph, events);
            REQUIRE(by_call.correction_edges == by_ctx.correction_edges);
            REQUIRE(by_call.predicted_observable_flip == by_ctx.predicted_observable_flip);
            REQUIRE(by_call.matched_weight == by_ctx.matched_weight);
        }
    }
    // Configuration counts follow a(m) = a(m-1) + (m-1)a(m-2).
    long expect[9] = {0, 1, 2, 4, 10, 26, 76, 232, 764};
    for (int m = 1; m <= 8; ++m) REQUIRE(enumerated[m] == expect[m]);
}

TEST_CASE("known single- and two-defect instances on the d=3 graph") {
    SurfaceCode code = build_rotated_surface_code(3, 2, Basis::Z);
    DetectorGraph graph = build_graph(code.circuit, NoiseParams{0.01});
    MatchingContext ctx(graph);
    size_t n = graph.nodes.size();

    SECTION("empty syndrome decodes to nothing") {
        for (auto decode : {+[](const DetectorGraph& g, const std::vector<uint8_t>& e) {
                                return mwpm_decode(g, e);
                            },
                            +[](const DetectorGraph& g, const std::vector<uint8_t>& e) {
                                return union_find_decode(g, e);
                            }}) {
            DecodeResult r = decode(graph, std::vector<uint8_t>(n, 0));
            REQUIRE(r.predicted_observable_flip == 0);
            REQUIRE(r.correction_edges.empty());
            REQUIRE(r.matched_weight == 0.0);
            REQUIRE(r.decode_time >= 0.0);
        }
    }

    SECTION("adjacent defect pair takes the direct space edge") {
        int32_t eid = find_edge(graph, 5, 6);
        std::vector<uint8_t> events = event_vector(n, {5, 6});

        DecodeResult mwpm = mwpm_decode(ctx, events);
        REQUIRE(mwpm.correction_edges == std::vector<int32_t>{eid});
        REQUIRE(mwpm.predicted_observable_flip == graph.edges[static_cast<size_t>(eid)].observable);

        DecodeResult uf = union_find_decode(graph, events);
        REQUIRE(uf.correction_edges == std::vector<int32_t>{eid});
        REQUIRE(uf.predicted_observable_flip == mwpm.predicted_observable_flip);
    }

    SECTION("lone defect pairs with the boundary") {
        std::vector<uint8_t> events = event_vector(n, {0});

        DecodeResult mwpm = mwpm_decode(ctx, events);
        REQUIRE(mwpm.correction_edges.size() >= 1);
        for (int32_t eid : mwpm.correction_edges) REQUIRE(graph.edges[static_cast<size_t>(eid)].v == -1);
        const PathDistances& row = ctx.row(0);
        REQUIRE_THAT(mwpm.matched_weight,
                     Catch::Matchers::WithinRel(
                         row.dist[static_cast<size_t>(graph.boundary())], 1e-12));
        REQUIRE(mwpm.predicted_observable_flip ==
                row.obs[static_cast<size_t>(graph.boundary())]);

        DecodeResult uf = union_find_decode(graph, events);
        REQUIRE(uf.correction_edges.size() == 1);
        const DetEdge& e = graph.edges[static_cast<size_t>(uf.correction_edges[0])];
        REQUIRE(e.u == 0);
        REQUIRE(e.v == -1);
    }
}

TEST_CASE("decoders recover known injected faults end to end") {
    SurfaceCode code = build_rotated_surface_code(3, 2, Basis::Z);
    const ScheduledCircuit& c = code.circuit;
    DetectorGraph graph = build_graph(c, NoiseParams{0.001});
    FrameSampler frame(c, NoiseParams{0.0}, {}, 99);

    SECTION("boundary data X flips the observable and both decoders see it") {
        ShotResult shot = frame.replay_tape(0.0, {{0, 1, 0, Pauli::X}});
        REQUIRE(shot.observable_flip == 1);
        REQUIRE(mwpm_decode(graph, shot.detection_events).predicted_observable_flip == 1);
        REQUIRE(union_find_decode(graph, shot.detection_events).predicted_observable_flip == 1);
    }

    SECTION("bulk data X is benign and decoded as such") {
        int32_t anchor = first_cnot_after(c, 4, 352e-9);
        ShotResult shot = frame.replay_tape(0.0, {{anchor, 0, 4, Pauli::X}});
        REQUIRE(shot.observable_flip == 0);
        REQUIRE(mwpm_decode(graph, shot.detection_events).predicted_observable_flip == 0);
        REQUIRE(union_find_decode(graph, shot.detection_events).predicted_observable_flip == 0);
    }
}

TEST_CASE("event vector length is validated") {
    SurfaceCode code = build_rotated_surface_code(3, 2, Basis::Z);
    DetectorGraph graph = build_graph(code.circuit, NoiseParams{0.001});
    std::vector<uint8_t> wrong(graph.nodes.size() + 1, 0);
    REQUIRE_THROWS_AS(mwpm_decode(graph, wrong), std::invalid_argument);
    REQUIRE_THROWS_AS(union_find_decode(graph, wrong), std::invalid_argument);
    MatchingContext ctx(graph);
    REQUIRE_THROWS_AS(mwpm_decode(ctx, wrong), std::invalid_argument);
}

TEST_CASE("mwpm weight dominates union-find on sampled syndromes") {
    SurfaceCode code = build_rotated_surface_code(3, 3, Basis::Z);
    DetectorGraph graph = build_graph(code.circuit, NoiseParams{0.006});
    MatchingContext ctx(graph);

    SECTION("intrinsic noise") {
        FrameSampler frame(code.circuit, NoiseParams{0.006}, {}, 4242);
        for (int s = 0; s < 200; ++s) {
            ShotResult shot = frame.sample_shot(s * code.circuit.total_duration);
            DecodeResult mwpm = mwpm_decode(ctx, shot.detection_events);
            DecodeResult uf = union_find_decode(graph, shot.detection_events);
            REQUIRE(mwpm.matched_weight <= uf.matched_weight + 1e-9);

            DecodeResult again = union_find_decode(graph, shot.detection_events);
            REQUIRE(again.correction_edges == uf.correction_edges);
            REQUIRE(again.predicted_observable_flip == uf.predicted_observable_flip);
        }
    }

    SECTION("radiation-dense syndromes") {
        RadiationEvent ev;
        ev.x = 3.0;
        ev.y = 3.0;
        ev.t_rad = 0.0;
        ev.dt_rad = 1e-3;
        FrameSampler frame(code.circuit, NoiseParams{0.001}, {ev}, 777);
        int nonempty = 0;
        for (int s = 0; s < 60; ++s) {
            ShotResult shot = frame.sample_shot(s * code.circuit.total_duration);
            DecodeResult mwpm = mwpm_decode(ctx, shot.detection_events);
            DecodeResult uf = union_find_decode(graph, shot.detection_events);
            REQUIRE(mwpm.matched_weight <= uf.matched_weight + 1e-9);
            if (!mwpm.correction_edges.empty()) {
                ++nonempty;
                REQUIRE(mwpm.decode_time > 0.0);
            }
        }
        REQUIRE(nonempty > 30);  // the event must actually stress the decoders
    }
}

TEST_CASE("decoders beat raw readout and union-find stays near mwpm") {
    SurfaceCode code = build_rotated_surface_code(3, 3, Basis::Z);
    DetectorGraph graph = build_graph(code.circuit, NoiseParams{0.02});
    MatchingContext ctx(graph);
    FrameSampler frame(code.circuit, NoiseParams{0.02}, {}, 31337);

    int shots = 3000;
    int undecoded = 0, mwpm_err = 0, uf_err = 0;
    for (int s = 0; s < shots; ++s) {
        ShotResult shot = frame.sample_shot(s * code.circuit.total_duration);
        undecoded += shot.observable_flip;
        mwpm_err += mwpm_decode(ctx, shot.detection_events).predicted_observable_flip !=
                    shot.observable_flip;
        uf_err += union_find_decode(graph, shot.detection_events).predicted_observable_flip !=
                  shot.observable_flip;
    }
    INFO("undecoded=" << undecoded << " mwpm=" << mwpm_err << " uf=" << uf_err);
    REQUIRE(mwpm_err < undecoded);
    REQUIRE(uf_err < undecoded);
    REQUIRE(uf_err <= 2 * mwpm_err + shots / 100);
}
