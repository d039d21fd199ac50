#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "irg/errors.hpp"
#include "irg/kernel.hpp"
#include "irg/rng.hpp"
#include "irg/space.hpp"

namespace irg {

enum class SampleMode { automatic, naive, accelerated };

// One realization of G(n, K): positions, a deduplicated undirected edge list
// (0-based, i < j, lexicographically ascending), and everything needed to
// regenerate it bit-exactly.
struct SampledGraph {
    int n = 0;
    std::vector<Point> positions;
    std::vector<std::pair<int, int>> edges;
    std::uint64_t seed = 0;
    KernelSpec kernel;
    SpaceSpec space;
    SampleMode mode_used = SampleMode::naive;
    bool fell_back_to_naive = false;  // accelerated was requested without a finite sup
};

// p_ij = min(1, K(x, y) * log(n) / n), natural log.
inline double edge_probability(const KernelSpec& kernel, const Point& x, const Point& y, int n) {
    if (n < 2) throw input_error("edge_probability needs n >= 2");
    const double p_n = std::log(static_cast<double>(n)) / static_cast<double>(n);
    return std::min(1.0, evaluate(kernel, x, y) * p_n);
}

namespace detail {

inline std::pair<const KernelSpec*, double> flatten_scale(const KernelSpec& k) {
    const KernelSpec* leaf = &k;
    double f = 1.0;
    while (leaf->kind == KernelKind::scaled) {
        f *= leaf->factor;
        leaf = leaf->base.get();
    }
    return {leaf, f};
}

// Lexicographic rank of pairs (i, j), i < j: pairs with first index < i come
// first. row_start(i) = i*(2n-i-1)/2.
inline std::uint64_t pair_row_start(std::int64_t i, std::int64_t n) {
    return static_cast<std::uint64_t>(i) *
           static_cast<std::uint64_t>(2 * n - i - 1) / 2;
}

inline std::pair<int, int> unrank_pair(std::uint64_t t, int n) {
    const double nn = 2.0 * static_cast<double>(n) - 1.0;
    double disc = nn * nn - 8.0 * static_cast<double>(t);
    if (disc < 0.0) disc = 0.0;
    std::int64_t i = static_cast<std::int64_t>((nn - std::sqrt(disc)) / 2.0);
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    while (i > 0 && pair_row_start(i, n) > t) --i;
    while (i < n - 2 && pair_row_start(i + 1, n) <= t) ++i;
    const int j = static_cast<int>(i + 1 + static_cast<std::int64_t>(t - pair_row_start(i, n)));
    return {static_cast<int>(i), j};
}

// One uniform draw per pair, pairs visited in lexicographic order.
template <class Prob>
void sample_pairs_naive(int n, Rng& rng, Prob&& prob,
                        std::vector<std::pair<int, int>>& edges) {
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.next_double() < prob(i, j)) edges.emplace_back(i, j);
}

// Geometric skipping over the lexicographic pair sequence at rate p_sup,
// thinning each candidate with probability p_ij / p_sup.
template <class Prob>
void sample_pairs_skip(int n, double p_sup, Rng& rng, Prob&& prob,
                       std::vector<std::pair<int, int>>& edges) {
    const std::uint64_t total = pair_row_start(n - 1, n);
    if (p_sup <= 0.0) return;
    if (p_sup >= 1.0) {
        for (std::uint64_t t = 0; t < total; ++t) {
            auto [i, j] = unrank_pair(t, n);
            if (rng.next_double() < prob(i, j)) edges.emplace_back(i, j);
        }
        return;
    }
    std::uint64_t t = 0;
    while (true) {
        t += rng.geometric_skip(p_sup);
        if (t >= total) break;
        auto [i, j] = unrank_pair(t, n);
        if (rng.next_double() * p_sup < prob(i, j)) edges.emplace_back(i, j);
        ++t;
    }
}

// Dispatches to a pair-probability functor specialized for the kernel
// variant, with per-graph tables precomputed.
template <class Body>
void with_edge_prob(const KernelSpec& kernel, const std::vector<Point>& pos, int n,
                    Body&& body) {
    const auto flattened = flatten_scale(kernel);
    const KernelSpec* leaf = flattened.first;
    const double f = flattened.second;
    const double p_n = std::log(static_cast<double>(n)) / static_cast<double>(n);
    switch (leaf->kind) {
        case KernelKind::constant: {
            const double p = std::min(1.0, f * leaf->c * p_n);
            body([p](int, int) { return p; });
            return;
        }
        case KernelKind::block: {
            const std::size_t M = leaf->matrix.size();
            std::vector<double> table(M * M);
            for (std::size_t a = 0; a < M; ++a)
                for (std::size_t b = 0; b < M; ++b)
                    table[a * M + b] = std::min(1.0, f * leaf->matrix[a][b] * p_n);
            std::vector<int> type(pos.size());
            for (std::size_t v = 0; v < pos.size(); ++v) type[v] = pos[v].index;
            body([&](int i, int j) {
                return table[static_cast<std::size_t>(type[static_cast<std::size_t>(i)]) * M +
                             static_cast<std::size_t>(type[static_cast<std::size_t>(j)])];
            });
            return;
        }
        case KernelKind::torus_band: {
            const double p = std::min(1.0, f * leaf->c * p_n);
            const double r = leaf->r;
            std::vector<double> x(pos.size());
            for (std::size_t v = 0; v < pos.size(); ++v) x[v] = pos[v].coord;
            body([&, p, r](int i, int j) {
                return circular_distance(x[static_cast<std::size_t>(i)],
                                         x[static_cast<std::size_t>(j)]) <= r ? p : 0.0;
            });
            return;
        }
        case KernelKind::torus_profile: {
            const KernelSpec* prof = leaf;
            std::vector<double> x(pos.size());
            for (std::size_t v = 0; v < pos.size(); ++v) x[v] = pos[v].coord;
            body([&, prof, f, p_n](int i, int j) {
                double d = circular_distance(x[static_cast<std::size_t>(i)],
                                             x[static_cast<std::size_t>(j)]);
                return std::min(1.0, f * profile_value(*prof, d) * p_n);
            });
            return;
        }
        case KernelKind::counterexample: {
            const double cpn = f * leaf->c * p_n;
            std::vector<double> x(pos.size());
            for (std::size_t v = 0; v < pos.size(); ++v) x[v] = pos[v].coord;
            body([&, cpn](int i, int j) {
                const double xi = x[static_cast<std::size_t>(i)];
                const double xj = x[static_cast<std::size_t>(j)];
                const double mx = xi > xj ? xi : xj;
                const double mn = xi > xj ? xj : xi;
                if (!(mx > 0.0) || mx > 2.0 * mn) return 0.0;
                double k = cpn / mx;
                if (xi == xj) k += k;  // both terms stack on the diagonal
                return std::min(1.0, k);
            });
            return;
        }
        case KernelKind::scaled:
            break;  // flattened above
    }
    throw input_error("unsupported kernel variant in sampler");
}

}  // namespace detail

// Edge sampling with fixed positions; exposed so edges can be redrawn
// conditionally on positions. One result bit per pair, lexicographic order.
inline std::vector<std::pair<int, int>> sample_edges_naive(const KernelSpec& kernel,
                                                           const std::vector<Point>& pos,
                                                           Rng& rng) {
    const int n = static_cast<int>(pos.size());
    std::vector<std::pair<int, int>> edges;
    if (n < 2) return edges;
    detail::with_edge_prob(kernel, pos, n, [&](auto&& prob) {
        detail::sample_pairs_naive(n, rng, prob, edges);
    });
    return edges;
}

inline std::vector<std::pair<int, int>> sample_edges_accelerated(const KernelSpec& kernel,
                                                                 const std::vector<Point>& pos,
                                                                 double kernel_supremum,
                                                                 Rng& rng) {
    const int n = static_cast<int>(pos.size());
    std::vector<std::pair<int, int>> edges;
    if (n < 2) return edges;
    const double p_n = std::log(static_cast<double>(n)) / static_cast<double>(n);
    const double p_sup = std::min(1.0, kernel_supremum * p_n);
    detail::with_edge_prob(kernel, pos, n, [&](auto&& prob) {
        detail::sample_pairs_skip(n, p_sup, rng, prob, edges);
    });
    return edges;
}

// Samples G(n, K): positions from substream mix(seed, 1), then each of the
// C(n, 2) pairs independently with probability min(1, K p_n). Naive mode
// draws once per pair from substream mix(seed, 2); accelerated mode skips
// geometrically at the supremum rate using substream mix(seed, 3). The two
// modes sample the same distribution; each is bit-exact per (seed, mode).
inline SampledGraph sample_graph(const SpaceSpec& space, const KernelSpec& kernel, int n,
                                 std::uint64_t seed, SampleMode mode = SampleMode::automatic) {
    check_kernel_space(kernel, space);
    if (n < 1) throw input_error("sample_graph needs n >= 1");
    SampledGraph g;
    g.n = n;
    g.seed = seed;
    g.kernel = kernel;
    g.space = space;

    Rng pos_rng(mix(seed, 1));
    g.positions = sample_points(space, n, pos_rng);

    auto sup = kernel_sup(kernel);
    SampleMode chosen = mode;
    if (mode == SampleMode::automatic)
        chosen = sup ? SampleMode::accelerated : SampleMode::naive;
    else if (mode == SampleMode::accelerated && !sup) {
        chosen = SampleMode::naive;
        g.fell_back_to_naive = true;
    }
    g.mode_used = chosen;
    if (n == 1) return g;

    if (chosen == SampleMode::accelerated) {
        Rng edge_rng(mix(seed, 3));
        g.edges = sample_edges_accelerated(kernel, g.positions, *sup, edge_rng);
    } else {
        Rng edge_rng(mix(seed, 2));
        g.edges = sample_edges_naive(kernel, g.positions, edge_rng);
    }
    return g;
}

inline std::vector<int> degree_sequence(const SampledGraph& g) {
    std::vector<int> deg(static_cast<std::size_t>(g.n), 0);
    for (auto [i, j] : g.edges) {
        if (i < 0 || j <= i || j >= g.n)
            throw input_error("edge endpoint out of range");
        ++deg[static_cast<std::size_t>(i)];
        ++deg[static_cast<std::size_t>(j)];
    }
    return deg;
}

}  // namespace irg
