#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "radqec/chip.hpp"

using namespace radqec;

namespace {

// Independent counting oracle: scan every lattice point and every qubit pair.
int count_lattice_qubits(int rows, int cols) {
    int n = 0;
    for (int y = 0; y <= 2 * rows; ++y)
        for (int x = 0; x <= 2 * cols; ++x)
            if ((x + y) % 2 == 0) ++n;
    return n;
}

int count_diagonal_pairs(const Chip& chip) {
    int n = 0;
    for (size_t i = 0; i < chip.qubits.size(); ++i)
        for (size_t j = i + 1; j < chip.qubits.size(); ++j) {
            double dx = std::abs(chip.qubits[i].x - chip.qubits[j].x);
            double dy = std::abs(chip.qubits[i].y - chip.qubits[j].y);
            if (dx == 1.0 && dy == 1.0) ++n;
        }
    return n;
}

}  // namespace

TEST_CASE("minimal grid chip is the five-qubit cross") {
    Chip chip = build_grid_chip(1, 1);
    REQUIRE(chip.qubits.size() == 5);
    REQUIRE(chip.couplers.size() == 4);
    std::set<std::pair<double, double>> got;
    for (const ChipQubit& q : chip.qubits) got.insert({q.x, q.y});
    std::set<std::pair<double, double>> want{{0, 0}, {2, 0}, {1, 1}, {0, 2}, {2, 2}};
    REQUIRE(got == want);
    int32_t centre = chip.find_qubit(1, 1);
    REQUIRE(centre >= 0);
    for (auto [a, b] : chip.couplers) REQUIRE((a == centre || b == centre));
}

TEST_CASE("grid chip sizes match the lattice-scan oracle") {
    for (auto [rows, cols] : {std::pair{1, 1}, {2, 3}, {4, 7}, {20, 20}}) {
        Chip chip = build_grid_chip(rows, cols);
        REQUIRE(static_cast<int>(chip.qubits.size()) == count_lattice_qubits(rows, cols));
        REQUIRE(static_cast<int>(chip.couplers.size()) == count_diagonal_pairs(chip));
    }
    REQUIRE(build_grid_chip(20, 20).qubits.size() == 841);
}

TEST_CASE("grid chip rejects degenerate sizes") {
    REQUIRE_THROWS_AS(build_grid_chip(0, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(build_grid_chip(1, -2), std::invalid_argument);
}

TEST_CASE("couplers are normalised and match adjacency") {
    Chip chip = build_grid_chip(3, 2);
    auto adj = chip.adjacency();
    size_t half_edges = 0;
    for (size_t i = 0; i < adj.size(); ++i) {
        half_edges += adj[i].size();
        for (int32_t j : adj[i]) {
            auto key = std::make_pair(std::min<int32_t>(static_cast<int32_t>(i), j),
                                      std::max<int32_t>(static_cast<int32_t>(i), j));
            REQUIRE(std::binary_search(chip.couplers.begin(), chip.couplers.end(), key));
        }
    }
    REQUIRE(half_edges == 2 * chip.couplers.size());
    for (auto [a, b] : chip.couplers) REQUIRE(a < b);
    REQUIRE(std::is_sorted(chip.couplers.begin(), chip.couplers.end()));
}

TEST_CASE("average minimum qubit distance") {
    // Every grid-chip qubit has a diagonal neighbour at distance sqrt(2).
    REQUIRE(device_avg_min_dist(build_grid_chip(1, 1)) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));
    REQUIRE(device_avg_min_dist(build_grid_chip(5, 3)) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-14));

    // Hand-built irregular chip: min distances 3, 3, 4 -> mean 10/3.
    Chip chip;
    chip.qubits = {{0, 0}, {3, 0}, {3, 4}};
    REQUIRE(device_avg_min_dist(chip) == Catch::Approx(10.0 / 3.0).epsilon(1e-14));

    Chip lone;
    lone.qubits = {{0, 0}};
    REQUIRE_THROWS_AS(device_avg_min_dist(lone), std::invalid_argument);
}

TEST_CASE("chip text round-trip") {
    Chip chip = build_grid_chip(2, 3);
    chip.qubits.push_back({0.5, 1.25});  // off-lattice coordinate survives exactly
    std::stringstream ss;
    save_chip(ss, chip);
    Chip back = load_chip(ss);
    REQUIRE(back.qubits.size() == chip.qubits.size());
    for (size_t i = 0; i < chip.qubits.size(); ++i) {
        REQUIRE(back.qubits[i].x == chip.qubits[i].x);
        REQUIRE(back.qubits[i].y == chip.qubits[i].y);
    }
    REQUIRE(back.couplers == chip.couplers);
}

TEST_CASE("mapping validation") {
    Chip chip = build_grid_chip(1, 1);
    InteractionGraph g;
    g.n = 2;
    g.edges = {{0, 1}};
    int32_t centre = chip.find_qubit(1, 1);

    Mapping ok;
    ok.to_chip = {0, centre};
    REQUIRE_NOTHROW(validate_mapping(chip, g, ok));

    Mapping wrong_size;
    wrong_size.to_chip = {0};
    REQUIRE_THROWS_AS(validate_mapping(chip, g, wrong_size), std::invalid_argument);

    Mapping out_of_range;
    out_of_range.to_chip = {0, 99};
    REQUIRE_THROWS_AS(validate_mapping(chip, g, out_of_range), std::invalid_argument);

    Mapping duplicate;
    duplicate.to_chip = {centre, centre};
    REQUIRE_THROWS_AS(validate_mapping(chip, g, duplicate), std::invalid_argument);

    Mapping off_coupler;
    off_coupler.to_chip = {0, 1};  // (0,0)-(2,0) is not a coupler
    REQUIRE_THROWS_AS(validate_mapping(chip, g, off_coupler), std::invalid_argument);
}

TEST_CASE("map_circuit finds the first solution deterministically") {
    Chip chip = build_grid_chip(1, 1);

    InteractionGraph edge;
    edge.n = 2;
    edge.edges = {{0, 1}};
    Mapping m = map_circuit(chip, edge);
    REQUIRE(m.to_chip == std::vector<int32_t>{0, 2});
    validate_mapping(chip, edge, m);

    InteractionGraph path;
    path.n = 3;
    path.edges = {{0, 1}, {1, 2}};
    Mapping pm = map_circuit(chip, path);
    REQUIRE(pm.to_chip == std::vector<int32_t>{0, 2, 1});
    validate_mapping(chip, path, pm);
}

TEST_CASE("map_circuit rejects odd cycles on the bipartite chip") {
    // Grid-chip couplers always join the two lattice sublattices, so no
    // triangle can embed anywhere.
    Chip chip = build_grid_chip(3, 3);
    InteractionGraph tri;
    tri.n = 3;
    tri.edges = {{0, 1}, {1, 2}, {0, 2}};
    REQUIRE_THROWS_WITH(map_circuit(chip, tri), Catch::Matchers::ContainsSubstring("unmappable"));
}

TEST_CASE("map_circuit handles disconnected and oversized graphs") {
    Chip chip = build_grid_chip(1, 1);
    InteractionGraph big;
    big.n = 6;  // more nodes than qubits
    REQUIRE_THROWS_AS(map_circuit(chip, big), std::runtime_error);

    InteractionGraph pair_plus_isolated;
    pair_plus_isolated.n = 3;
    pair_plus_isolated.edges = {{0, 1}};
    Mapping m = map_circuit(chip, pair_plus_isolated);
    validate_mapping(chip, pair_plus_isolated, m);
}
