#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "irg/errors.hpp"
#include "irg/graph.hpp"
#include "irg/kernel.hpp"
#include "irg/quadrature.hpp"
#include "irg/sampler.hpp"
#include "irg/space.hpp"

namespace irg {

struct BoundInputs {
    int n = 0;
    int k = 0;
    double lambda_star = 0.0;
    double lambda2_sup = 0.0;
    double p_n = 0.0;  // log(n)/n
};

inline BoundInputs make_bound_inputs(int n, int k, double lambda_star, double lambda2_sup) {
    if (n < 2) throw input_error("bound inputs need n >= 2");
    if (k < 1 || k >= n) throw input_error("bound inputs need 1 <= k < n");
    if (!(lambda_star >= 0.0) || !(lambda2_sup >= 0.0))
        throw input_error("kernel functionals must be nonnegative");
    return {n, k, lambda_star, lambda2_sup,
            std::log(static_cast<double>(n)) / static_cast<double>(n)};
}

// Pr{A does not connect to A^c} <= (1 - lam* k p_n + |lam2|^2 k^2 p_n^2 / 2)^(n-k),
// clamped to [0, 1].
inline double cut_bound_small_k(const BoundInputs& in) {
    const double kp = static_cast<double>(in.k) * in.p_n;
    const double base = 1.0 - in.lambda_star * kp +
                        0.5 * in.lambda2_sup * in.lambda2_sup * kp * kp;
    if (base <= 0.0) return 0.0;
    const double v = std::pow(base, static_cast<double>(in.n - in.k));
    return std::clamp(v, 0.0, 1.0);
}

// Pr{A does not connect to A^c} <= e^(-p_n lam* k (n-k)/2) + k e^(-n lam*^2 / 16 |lam2|^2),
// clamped to [0, 1].
inline double cut_bound_large_k(const BoundInputs& in) {
    if (2 * in.k > in.n) throw input_error("large-k cut bound needs k <= n/2");
    if (!(in.lambda2_sup > 0.0)) {
        if (in.lambda_star > 0.0)
            throw input_error("inconsistent inputs: lambda* > 0 with lambda2 sup = 0");
        throw input_error("large-k cut bound needs lambda2 sup > 0");
    }
    const double t1 = std::exp(-in.p_n * in.lambda_star * static_cast<double>(in.k) *
                               static_cast<double>(in.n - in.k) / 2.0);
    const double t2 = static_cast<double>(in.k) *
                      std::exp(-static_cast<double>(in.n) * in.lambda_star * in.lambda_star /
                               (16.0 * in.lambda2_sup * in.lambda2_sup));
    return std::clamp(t1 + t2, 0.0, 1.0);
}

// delta = max{rho in [0, 1/2] : rho - rho log rho <= lam*^2 / 32 |lam2|^2},
// solved by bisection to 1e-12. rho - rho log rho is increasing on (0, 1/2].
inline double min_component_fraction(double lambda_star, double lambda2_sup) {
    if (!(lambda_star > 0.0))
        throw input_error("min component fraction needs lambda* > 0");
    if (!(lambda2_sup > 0.0))
        throw input_error("min component fraction needs lambda2 sup > 0");
    const double tau = lambda_star * lambda_star / (32.0 * lambda2_sup * lambda2_sup);
    auto f = [](double rho) { return rho - rho * std::log(rho); };
    if (tau >= f(0.5)) return 0.5;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= tau) lo = mid; else hi = mid;
    }
    return lo;
}

// Chernoff rate function f(t) = t log t - t + 1.
inline double chernoff_rate(double t) {
    if (!(t > 0.0)) throw input_error("chernoff rate needs t > 0");
    return t * std::log(t) - t + 1.0;
}

namespace detail {

// x in (1/2, 1) where the counterexample intensity crosses the given level;
// used to align quadrature panels with region boundaries.
inline void intensity_level_crossings(const KernelSpec& k, double level,
                                      std::vector<double>& out) {
    switch (k.kind) {
        case KernelKind::counterexample: {
            if (k.c <= 0.0) return;
            const double x = std::exp((0.5 * k.c - level) / k.c);
            if (x > 0.5 && x < 1.0) out.push_back(x);
            return;
        }
        case KernelKind::scaled:
            if (k.factor > 0.0)
                intensity_level_crossings(*k.base, level / k.factor, out);
            return;
        default:
            return;
    }
}

}  // namespace detail

struct IsolatedLowerBound {
    double value = 0.0;
    bool region_empty = false;
};

// n * integral over B of (1 - lambda(x) p_n)^(n-1) dmu(x), a lower bound on
// the expected number of isolated vertices with position in
// B = {x : lambda(x) < threshold}. The integrand is clamped at 0 where
// lambda(x) p_n >= 1.
inline IsolatedLowerBound isolated_expectation_lower_bound(const KernelSpec& kernel,
                                                           const SpaceSpec& space, int n,
                                                           double threshold) {
    check_kernel_space(kernel, space);
    if (n < 2) throw input_error("isolated-vertex bound needs n >= 2");
    const double p_n = std::log(static_cast<double>(n)) / static_cast<double>(n);
    const double power = static_cast<double>(n - 1);

    if (space.kind == SpaceKind::finite) {
        double integral = 0.0;
        bool hit = false;
        for (int i = 0; i < space.atom_count(); ++i) {
            const double w = space.weights[static_cast<std::size_t>(i)];
            if (w <= 0.0) continue;
            const double lam = intensity(kernel, space, Point::atom(i));
            if (lam >= threshold) continue;
            hit = true;
            integral += w * std::pow(std::max(0.0, 1.0 - lam * p_n), power);
        }
        return {static_cast<double>(n) * integral, !hit};
    }

    std::vector<double> breaks = parameter_breakpoints(kernel);
    detail::intensity_level_crossings(kernel, threshold, breaks);
    detail::intensity_level_crossings(kernel, 1.0 / p_n, breaks);
    bool hit = false;
    auto integrand = [&](double x) {
        const double lam = intensity(kernel, space, Point::at(x));
        if (lam >= threshold) return 0.0;
        hit = true;
        return std::pow(std::max(0.0, 1.0 - lam * p_n), power);
    };
    QuadratureResult q = integrate(integrand, 0.0, 1.0, breaks);
    return {static_cast<double>(n) * q.value, !hit};
}

// Exact Pr[G(n, p) connected] by the classical recursion
//   P(1) = 1,  P(n) = 1 - sum_k C(n-1, k-1) P(k) (1-p)^(k(n-k)),
// evaluated with log-space binomials.
inline double gilbert_connectivity_exact(int n, double p) {
    if (n < 1 || n > 400) throw input_error("gilbert oracle supports 1 <= n <= 400");
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("gilbert oracle needs p in [0, 1]");
    if (n == 1) return 1.0;
    static const std::vector<double> lnfact = [] {
        std::vector<double> t(401, 0.0);
        for (int i = 1; i <= 400; ++i)
            t[static_cast<std::size_t>(i)] =
                t[static_cast<std::size_t>(i - 1)] + std::log(static_cast<double>(i));
        return t;
    }();
    const double l1p = std::log1p(-p);  // -inf when p == 1
    std::vector<double> P(static_cast<std::size_t>(n) + 1, 0.0);
    P[1] = 1.0;
    for (int m = 2; m <= n; ++m) {
        double s = 0.0;
        for (int k = 1; k < m; ++k) {
            if (P[static_cast<std::size_t>(k)] <= 0.0) continue;
            const double lbin = lnfact[static_cast<std::size_t>(m - 1)] -
                                lnfact[static_cast<std::size_t>(k - 1)] -
                                lnfact[static_cast<std::size_t>(m - k)];
            const double lcut = static_cast<double>(k) * static_cast<double>(m - k) * l1p;
            s += P[static_cast<std::size_t>(k)] * std::exp(lbin + lcut);
        }
        P[static_cast<std::size_t>(m)] = std::clamp(1.0 - s, 0.0, 1.0);
    }
    return P[static_cast<std::size_t>(n)];
}

// Exact Pr[G(n, K) connected] on a finite space by brute force over all
// type assignments and all edge subsets. Guarded to n <= 6, M <= 3.
inline double exact_connectivity_finite(const SpaceSpec& space, const KernelSpec& kernel,
                                        int n) {
    if (space.kind != SpaceKind::finite)
        throw input_error("exact finite oracle needs a finite space");
    check_kernel_space(kernel, space);
    if (n < 1 || n > 6) throw input_error("exact finite oracle supports 1 <= n <= 6");
    const int M = space.atom_count();
    if (M > 3) throw input_error("exact finite oracle supports at most 3 atoms");
    if (n == 1) return 1.0;

    const int pairs = n * (n - 1) / 2;
    std::vector<std::pair<int, int>> pair_of_bit;
    pair_of_bit.reserve(static_cast<std::size_t>(pairs));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pair_of_bit.emplace_back(i, j);

    const std::uint32_t masks = 1u << pairs;
    std::vector<char> connected(masks, 0);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        UnionFind uf(n);
        for (int b = 0; b < pairs; ++b)
            if (mask & (1u << b)) uf.unite(pair_of_bit[static_cast<std::size_t>(b)].first,
                                           pair_of_bit[static_cast<std::size_t>(b)].second);
        connected[mask] = uf.component_count() == 1;
    }

    std::uint64_t assignments = 1;
    for (int i = 0; i < n; ++i) assignments *= static_cast<std::uint64_t>(M);

    std::vector<double> prob_in(masks), prob_out(masks);
    double total = 0.0;
    std::vector<int> type(static_cast<std::size_t>(n));
    for (std::uint64_t a = 0; a < assignments; ++a) {
        std::uint64_t rest = a;
        double weight = 1.0;
        for (int i = 0; i < n; ++i) {
            type[static_cast<std::size_t>(i)] = static_cast<int>(rest % static_cast<std::uint64_t>(M));
            rest /= static_cast<std::uint64_t>(M);
            weight *= space.weights[static_cast<std::size_t>(type[static_cast<std::size_t>(i)])];
        }
        if (weight <= 0.0) continue;

        std::vector<double> pe(static_cast<std::size_t>(pairs));
        for (int b = 0; b < pairs; ++b)
            pe[static_cast<std::size_t>(b)] = edge_probability(
                kernel, Point::atom(type[static_cast<std::size_t>(pair_of_bit[static_cast<std::size_t>(b)].first)]),
                Point::atom(type[static_cast<std::size_t>(pair_of_bit[static_cast<std::size_t>(b)].second)]), n);

        prob_in[0] = 1.0;
        prob_out[0] = 1.0;
        for (std::uint32_t mask = 1; mask < masks; ++mask) {
            const int b = std::countr_zero(mask);
            const std::uint32_t rest_mask = mask & (mask - 1);
            prob_in[mask] = prob_in[rest_mask] * pe[static_cast<std::size_t>(b)];
            prob_out[mask] = prob_out[rest_mask] * (1.0 - pe[static_cast<std::size_t>(b)]);
        }
        double s = 0.0;
        const std::uint32_t full = masks - 1;
        for (std::uint32_t mask = 0; mask < masks; ++mask)
            if (connected[mask]) s += prob_in[mask] * prob_out[full ^ mask];
        total += weight * s;
    }
    return total;
}

}  // namespace irg
