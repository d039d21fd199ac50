#include <catch2/catch_amalgamated.hpp>

#include "irg/graph.hpp"
#include "oracles.hpp"

using namespace irg;

namespace {

SampledGraph make_graph(int n, std::vector<std::pair<int, int>> edges,
                        std::vector<double> coords = {}) {
    SampledGraph g;
    g.n = n;
    g.space = SpaceSpec::interval();
    g.kernel = KernelSpec::constant(0.0);
    g.edges = std::move(edges);
    if (coords.empty())
        for (int v = 0; v < n; ++v) g.positions.push_back(Point::at((v + 0.5) / n));
    else
        for (double c : coords) g.positions.push_back(Point::at(c));
    return g;
}

}  // namespace

TEST_CASE("path plus isolated vertex") {
    auto s = connected_components(make_graph(4, {{0, 1}, {1, 2}}));
    REQUIRE(s.component_sizes == std::vector<int>{3, 1});
    REQUIRE_FALSE(s.is_connected);
    REQUIRE(s.isolated_total == 1);
    REQUIRE(s.size_spectrum.at(1) == 1);
    REQUIRE(s.size_spectrum.at(3) == 1);
}

TEST_CASE("edgeless graph") {
    auto s = connected_components(make_graph(3, {}));
    REQUIRE(s.component_sizes == std::vector<int>{1, 1, 1});
    REQUIRE(s.isolated_total == 3);
    REQUIRE_FALSE(s.is_connected);
}

TEST_CASE("complete graph is connected") {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
    auto s = connected_components(make_graph(5, edges));
    REQUIRE(s.component_sizes == std::vector<int>{5});
    REQUIRE(s.is_connected);
    REQUIRE(s.isolated_total == 0);
}

TEST_CASE("single vertex counts as connected") {
    auto s = connected_components(make_graph(1, {}));
    REQUIRE(s.is_connected);
    REQUIRE(s.isolated_total == 1);
}

TEST_CASE("empty graphs are rejected") {
    SampledGraph g;
    g.n = 0;
    REQUIRE_THROWS_AS(connected_components(g), input_error);
}

TEST_CASE("bad edge endpoints are rejected") {
    REQUIRE_THROWS_AS(connected_components(make_graph(3, {{0, 3}})), input_error);
    REQUIRE_THROWS_AS(connected_components(make_graph(3, {{2, 1}})), input_error);
    REQUIRE_THROWS_AS(connected_components(make_graph(3, {{1, 1}})), input_error);
}

TEST_CASE("region-restricted isolation counts") {
    auto g = make_graph(4, {{0, 1}}, {0.1, 0.2, 0.6, 0.9});
    auto all = [](const Point&) { return true; };
    auto none = [](const Point&) { return false; };
    auto left = [](const Point& p) { return p.coord < 0.5; };
    REQUIRE(isolated_in_region(g, all) == connected_components(g).isolated_total);
    REQUIRE(isolated_in_region(g, none) == 0);
    REQUIRE(isolated_in_region(g, left) == 0);  // vertices 3, 4 isolated but outside
}

TEST_CASE("min component size") {
    REQUIRE(min_component_size(connected_components(make_graph(4, {{0, 1}, {1, 2}}))) == 1);
    REQUIRE(min_component_size(connected_components(make_graph(1, {}))) == 1);
    auto s = connected_components(make_graph(10, {{0, 1}, {1, 2}, {2, 3}, {4, 5}, {5, 6}, {6, 7},
                                                  {8, 9}}));
    REQUIRE(s.component_sizes == std::vector<int>{4, 4, 2});
    REQUIRE(min_component_size(s) == 2);
}

TEST_CASE("union-find agrees with breadth-first search on random graphs") {
    Rng rng(606);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_double() * 49);
        const double p = rng.next_double() * 0.2;
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.next_double() < p) edges.emplace_back(i, j);
        auto summary = connected_components(make_graph(n, edges));
        REQUIRE(summary.component_sizes == oracles::bfs_component_sizes(n, edges));
    }
}

TEST_CASE("adding an edge never increases the component count") {
    Rng rng(607);
    const int n = 40;
    std::vector<std::pair<int, int>> edges;
    std::size_t prev = static_cast<std::size_t>(n);
    for (int step = 0; step < 200; ++step) {
        const int i = static_cast<int>(rng.next_double() * n);
        const int j = static_cast<int>(rng.next_double() * n);
        if (i == j) continue;
        edges.emplace_back(std::min(i, j), std::max(i, j));
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        auto s = connected_components(make_graph(n, edges));
        REQUIRE(s.component_sizes.size() <= prev);
        prev = s.component_sizes.size();
    }
}

TEST_CASE("size spectrum accounts for every vertex") {
    Rng rng(608);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_double() * 60);
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.next_double() < 0.05) edges.emplace_back(i, j);
        auto s = connected_components(make_graph(n, edges));
        long total = 0;
        for (const auto& [k, count] : s.size_spectrum) total += static_cast<long>(k) * count;
        REQUIRE(total == n);
        long sizes_total = 0;
        for (int sz : s.component_sizes) sizes_total += sz;
        REQUIRE(sizes_total == n);
    }
}
