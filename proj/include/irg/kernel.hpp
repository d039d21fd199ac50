#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "irg/errors.hpp"
#include "irg/quadrature.hpp"
#include "irg/space.hpp"

namespace irg {

enum class KernelKind { constant, block, torus_band, torus_profile, counterexample, scaled };

// A symmetric nonnegative kernel K on S x S. Variants:
//   constant        K = c on any space
//   block           K(i,j) = matrix[i][j] on a finite space
//   torus_band      K(x,y) = c * 1[d(x,y) <= r] on the torus
//   torus_profile   K(x,y) = h(d(x,y)), h piecewise constant on [0, 1/2]
//   counterexample  K(x,y) = (c/x) 1[x/2 <= y <= x] + (c/y) 1[y/2 <= x <= y]
//                   on the unit interval
//   scaled          factor * base, pointwise
struct KernelSpec {
    KernelKind kind = KernelKind::constant;
    double c = 0.0;
    double r = 0.0;
    std::vector<std::vector<double>> matrix;
    std::vector<double> profile_breaks;   // 0 = b_0 < ... < b_K = 1/2
    std::vector<double> profile_values;   // value on [b_i, b_{i+1}), last piece closed
    std::shared_ptr<const KernelSpec> base;
    double factor = 1.0;

    static KernelSpec constant(double c) {
        if (!(c >= 0.0)) throw input_error("constant kernel needs c >= 0");
        KernelSpec k;
        k.kind = KernelKind::constant;
        k.c = c;
        return k;
    }

    static KernelSpec block(std::vector<std::vector<double>> m) {
        const std::size_t M = m.size();
        if (M == 0) throw input_error("block kernel needs a nonempty matrix");
        for (const auto& row : m)
            if (row.size() != M) throw input_error("block kernel matrix must be square");
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j) {
                if (!(m[i][j] >= 0.0))
                    throw input_error("block kernel entries must be nonnegative");
                if (std::fabs(m[i][j] - m[j][i]) > 1e-12)
                    throw input_error("block kernel matrix must be symmetric");
            }
        // store exactly symmetric
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = i + 1; j < M; ++j)
                m[i][j] = m[j][i] = 0.5 * (m[i][j] + m[j][i]);
        KernelSpec k;
        k.kind = KernelKind::block;
        k.matrix = std::move(m);
        return k;
    }

    static KernelSpec torus_band(double c, double r) {
        if (!(c >= 0.0)) throw input_error("torus band kernel needs c >= 0");
        if (!(r > 0.0 && r <= 0.5)) throw input_error("torus band radius must be in (0, 1/2]");
        KernelSpec k;
        k.kind = KernelKind::torus_band;
        k.c = c;
        k.r = r;
        return k;
    }

    static KernelSpec torus_profile(std::vector<double> breaks, std::vector<double> values) {
        if (breaks.size() < 2 || values.size() + 1 != breaks.size())
            throw input_error("torus profile needs K+1 breakpoints and K values");
        if (breaks.front() != 0.0 || breaks.back() != 0.5)
            throw input_error("torus profile breakpoints must span [0, 1/2]");
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
            if (!(breaks[i] < breaks[i + 1]))
                throw input_error("torus profile breakpoints must be strictly increasing");
        for (double v : values)
            if (!(v >= 0.0)) throw input_error("torus profile values must be nonnegative");
        KernelSpec k;
        k.kind = KernelKind::torus_profile;
        k.profile_breaks = std::move(breaks);
        k.profile_values = std::move(values);
        return k;
    }

    static KernelSpec counterexample(double c) {
        if (!(c >= 0.0)) throw input_error("counterexample kernel needs c >= 0");
        KernelSpec k;
        k.kind = KernelKind::counterexample;
        k.c = c;
        return k;
    }

    static KernelSpec scaled(KernelSpec base, double factor) {
        if (!(factor >= 0.0)) throw input_error("scale factor must be nonnegative");
        KernelSpec k;
        k.kind = KernelKind::scaled;
        k.base = std::make_shared<const KernelSpec>(std::move(base));
        k.factor = factor;
        return k;
    }
};

// Default space a kernel is defined on, used where no explicit space is given.
inline SpaceSpec natural_space(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::constant:
        case KernelKind::counterexample:
            return SpaceSpec::interval();
        case KernelKind::torus_band:
        case KernelKind::torus_profile:
            return SpaceSpec::torus();
        case KernelKind::block:
            return SpaceSpec::finite(
                std::vector<double>(k.matrix.size(), 1.0 / static_cast<double>(k.matrix.size())));
        case KernelKind::scaled:
            return natural_space(*k.base);
    }
    return SpaceSpec::interval();
}

inline void check_kernel_space(const KernelSpec& k, const SpaceSpec& space) {
    switch (k.kind) {
        case KernelKind::constant:
            return;
        case KernelKind::block:
            if (space.kind != SpaceKind::finite ||
                space.atom_count() != static_cast<int>(k.matrix.size()))
                throw input_error("block kernel needs a finite space of matching size");
            return;
        case KernelKind::torus_band:
        case KernelKind::torus_profile:
            if (space.kind != SpaceKind::torus)
                throw input_error("torus kernel needs the unit torus");
            return;
        case KernelKind::counterexample:
            if (space.kind != SpaceKind::interval)
                throw input_error("counterexample kernel needs the unit interval");
            return;
        case KernelKind::scaled:
            check_kernel_space(*k.base, space);
            return;
    }
}

namespace detail {

// value of a piecewise-constant profile at distance d in [0, 1/2];
// piece i covers [b_i, b_{i+1}), the last piece also includes 1/2
inline double profile_value(const KernelSpec& k, double d) {
    const auto& b = k.profile_breaks;
    auto it = std::upper_bound(b.begin(), b.end(), d);
    std::size_t piece = static_cast<std::size_t>(it - b.begin());
    piece = piece == 0 ? 0 : piece - 1;
    if (piece >= k.profile_values.size()) piece = k.profile_values.size() - 1;
    return k.profile_values[piece];
}

// Off the diagonal the counterexample kernel is c/max(x,y) when
// max <= 2*min and 0 otherwise; on the diagonal the two terms stack.
// K vanishes on the measure-zero set where a coordinate is 0.
inline double counterexample_value(double c, double x, double y) {
    double v = 0.0;
    if (x > 0.0 && y >= 0.5 * x && y <= x) v += c / x;
    if (y > 0.0 && x >= 0.5 * y && x <= y) v += c / y;
    return v;
}

inline double frac(double t) { return t - std::floor(t); }

}  // namespace detail

inline double evaluate(const KernelSpec& k, const Point& x, const Point& y) {
    switch (k.kind) {
        case KernelKind::constant:
            return k.c;
        case KernelKind::block: {
            const int M = static_cast<int>(k.matrix.size());
            if (!x.discrete() || !y.discrete() || x.index >= M || y.index >= M)
                throw input_error("block kernel takes atom indices of its space");
            return k.matrix[static_cast<std::size_t>(x.index)][static_cast<std::size_t>(y.index)];
        }
        case KernelKind::torus_band: {
            if (x.discrete() || y.discrete())
                throw input_error("torus kernel takes continuous points");
            return circular_distance(x.coord, y.coord) <= k.r ? k.c : 0.0;
        }
        case KernelKind::torus_profile: {
            if (x.discrete() || y.discrete())
                throw input_error("torus kernel takes continuous points");
            return detail::profile_value(k, circular_distance(x.coord, y.coord));
        }
        case KernelKind::counterexample: {
            if (x.discrete() || y.discrete())
                throw input_error("counterexample kernel takes continuous points");
            return detail::counterexample_value(k.c, x.coord, y.coord);
        }
        case KernelKind::scaled:
            return k.factor * evaluate(*k.base, x, y);
    }
    return 0.0;
}

// Global supremum of K, when finite. The counterexample kernel is unbounded
// near the origin, so it has none (unless c = 0).
inline std::optional<double> kernel_sup(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::constant:
            return k.c;
        case KernelKind::block: {
            double m = 0.0;
            for (const auto& row : k.matrix)
                for (double v : row) m = std::max(m, v);
            return m;
        }
        case KernelKind::torus_band:
            return k.c;
        case KernelKind::torus_profile:
            return *std::max_element(k.profile_values.begin(), k.profile_values.end());
        case KernelKind::counterexample:
            if (k.c == 0.0) return 0.0;
            return std::nullopt;
        case KernelKind::scaled: {
            if (k.factor == 0.0) return 0.0;
            auto s = kernel_sup(*k.base);
            if (!s) return std::nullopt;
            return k.factor * *s;
        }
    }
    return std::nullopt;
}

namespace detail {

inline double profile_integral(const KernelSpec& k, int power) {
    double s = 0.0;
    for (std::size_t i = 0; i < k.profile_values.size(); ++i)
        s += std::pow(k.profile_values[i], power) *
             (k.profile_breaks[i + 1] - k.profile_breaks[i]);
    return 2.0 * s;  // both sides of the distance profile
}

}  // namespace detail

// lambda(x) = integral of K(x, .) dmu, by closed form.
inline double intensity(const KernelSpec& k, const SpaceSpec& space, const Point& x) {
    check_kernel_space(k, space);
    check_point(space, x);
    switch (k.kind) {
        case KernelKind::constant:
            return k.c;
        case KernelKind::block: {
            const auto& row = k.matrix[static_cast<std::size_t>(x.index)];
            double s = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * space.weights[j];
            return s;
        }
        case KernelKind::torus_band:
            return k.c * 2.0 * k.r;
        case KernelKind::torus_profile:
            return detail::profile_integral(k, 1);
        case KernelKind::counterexample: {
            const double t = x.coord;
            if (t == 0.0) return 0.0;
            if (t <= 0.5) return 0.5 * k.c + k.c * std::log(2.0);
            return 0.5 * k.c + k.c * std::log(1.0 / t);
        }
        case KernelKind::scaled:
            return k.factor * intensity(*k.base, space, x);
    }
    return 0.0;
}

// lambda2(x) = sqrt( integral of K(x, .)^2 dmu ), by closed form.
inline double rms_intensity(const KernelSpec& k, const SpaceSpec& space, const Point& x) {
    check_kernel_space(k, space);
    check_point(space, x);
    switch (k.kind) {
        case KernelKind::constant:
            return k.c;
        case KernelKind::block: {
            const auto& row = k.matrix[static_cast<std::size_t>(x.index)];
            double s = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * row[j] * space.weights[j];
            return std::sqrt(s);
        }
        case KernelKind::torus_band:
            return k.c * std::sqrt(2.0 * k.r);
        case KernelKind::torus_profile:
            return std::sqrt(detail::profile_integral(k, 2));
        case KernelKind::counterexample: {
            const double t = x.coord;
            if (t == 0.0) return 0.0;
            const double sq = t <= 0.5 ? k.c * k.c / t
                                       : 1.5 * k.c * k.c / t - k.c * k.c;
            return std::sqrt(sq);
        }
        case KernelKind::scaled:
            return k.factor * rms_intensity(*k.base, space, x);
    }
    return 0.0;
}

// Discontinuity coordinates of y -> K(x, y) on [0, 1), used to split
// quadrature panels.
inline std::vector<double> section_breakpoints(const KernelSpec& k, double x) {
    switch (k.kind) {
        case KernelKind::torus_band:
            return {detail::frac(x - k.r), detail::frac(x + k.r)};
        case KernelKind::torus_profile: {
            std::vector<double> out;
            for (double b : k.profile_breaks) {
                out.push_back(detail::frac(x - b));
                out.push_back(detail::frac(x + b));
            }
            return out;
        }
        case KernelKind::counterexample: {
            std::vector<double> out{0.5 * x, x};
            if (2.0 * x < 1.0) out.push_back(2.0 * x);
            return out;
        }
        case KernelKind::scaled:
            return section_breakpoints(*k.base, x);
        default:
            return {};
    }
}

// Locations where x -> lambda(x) or lambda2(x) has a kink or jump.
inline std::vector<double> parameter_breakpoints(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::counterexample:
            return {0.5};
        case KernelKind::scaled:
            return parameter_breakpoints(*k.base);
        default:
            return {};
    }
}

// Quadrature route for lambda(x); the closed forms above are checked
// against this in the test suite.
inline QuadratureResult intensity_quadrature(const KernelSpec& k, const SpaceSpec& space,
                                             const Point& x, double abs_tol = 1e-9) {
    check_kernel_space(k, space);
    check_point(space, x);
    if (space.kind == SpaceKind::finite) {
        double s = 0.0;
        for (int j = 0; j < space.atom_count(); ++j)
            s += evaluate(k, x, Point::atom(j)) * space.weights[static_cast<std::size_t>(j)];
        return {s, true, space.atom_count()};
    }
    return integrate([&](double y) { return evaluate(k, x, Point::at(y)); },
                     0.0, 1.0, section_breakpoints(k, x.coord), abs_tol);
}

// Quadrature route for lambda2(x)^2.
inline QuadratureResult rms_sq_quadrature(const KernelSpec& k, const SpaceSpec& space,
                                          const Point& x, double abs_tol = 1e-9) {
    check_kernel_space(k, space);
    check_point(space, x);
    if (space.kind == SpaceKind::finite) {
        double s = 0.0;
        for (int j = 0; j < space.atom_count(); ++j) {
            double v = evaluate(k, x, Point::atom(j));
            s += v * v * space.weights[static_cast<std::size_t>(j)];
        }
        return {s, true, space.atom_count()};
    }
    return integrate([&](double y) {
        double v = evaluate(k, x, Point::at(y));
        return v * v;
    }, 0.0, 1.0, section_breakpoints(k, x.coord), abs_tol);
}

enum class FunctionalMethod { closed_form, grid_quadrature };

// lambda* = essinf lambda and the essential sup of lambda2.
struct KernelFunctionals {
    double lambda_star = 0.0;
    double lambda2_sup = 0.0;  // +infinity when lambda2 is unbounded
    FunctionalMethod method = FunctionalMethod::closed_form;
};

inline KernelFunctionals isolation_parameter(const KernelSpec& k, const SpaceSpec& space) {
    check_kernel_space(k, space);
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (k.kind) {
        case KernelKind::constant:
            return {k.c, k.c, FunctionalMethod::closed_form};
        case KernelKind::block: {
            double lo = inf, hi = 0.0;
            for (int i = 0; i < space.atom_count(); ++i) {
                if (space.weights[static_cast<std::size_t>(i)] <= 0.0) continue;
                lo = std::min(lo, intensity(k, space, Point::atom(i)));
                hi = std::max(hi, rms_intensity(k, space, Point::atom(i)));
            }
            if (lo == inf) throw input_error("finite space has no atom of positive weight");
            return {lo, hi, FunctionalMethod::closed_form};
        }
        case KernelKind::torus_band:
            return {k.c * 2.0 * k.r, k.c * std::sqrt(2.0 * k.r), FunctionalMethod::closed_form};
        case KernelKind::torus_profile:
            return {detail::profile_integral(k, 1), std::sqrt(detail::profile_integral(k, 2)),
                    FunctionalMethod::closed_form};
        case KernelKind::counterexample:
            // lambda decreases to c/2 as x -> 1; lambda2 blows up as x -> 0
            return {0.5 * k.c, k.c > 0.0 ? inf : 0.0, FunctionalMethod::closed_form};
        case KernelKind::scaled: {
            KernelFunctionals f = isolation_parameter(*k.base, space);
            f.lambda_star *= k.factor;
            f.lambda2_sup = k.factor == 0.0 ? 0.0 : k.factor * f.lambda2_sup;
            return f;
        }
    }
    return {};
}

// Grid estimate of the functionals for continuous spaces: quadrature values
// of lambda and lambda2 at grid_size midpoints plus parameter breakpoints.
// An approximation by construction; the closed forms are authoritative for
// the built-in variants.
inline KernelFunctionals isolation_parameter_grid(const KernelSpec& k, const SpaceSpec& space,
                                                  int grid_size) {
    check_kernel_space(k, space);
    if (space.kind == SpaceKind::finite) return isolation_parameter(k, space);
    if (grid_size < 2) throw input_error("grid estimate needs grid_size >= 2");
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid_size) + 4);
    for (int g = 0; g < grid_size; ++g)
        xs.push_back((static_cast<double>(g) + 0.5) / static_cast<double>(grid_size));
    for (double b : parameter_breakpoints(k))
        if (b > 0.0 && b < 1.0) xs.push_back(b);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double x : xs) {
        lo = std::min(lo, intensity_quadrature(k, space, Point::at(x)).value);
        hi = std::max(hi, std::sqrt(rms_sq_quadrature(k, space, Point::at(x)).value));
    }
    return {lo, hi, FunctionalMethod::grid_quadrature};
}

// Closed-form double integral of K^2 (the squared L2 norm of the kernel).
inline double l2_norm_sq(const KernelSpec& k, const SpaceSpec& space) {
    check_kernel_space(k, space);
    switch (k.kind) {
        case KernelKind::constant:
            return k.c * k.c;
        case KernelKind::block: {
            double s = 0.0;
            const std::size_t M = k.matrix.size();
            for (std::size_t i = 0; i < M; ++i)
                for (std::size_t j = 0; j < M; ++j)
                    s += k.matrix[i][j] * k.matrix[i][j] * space.weights[i] * space.weights[j];
            return s;
        }
        case KernelKind::torus_band:
            return k.c * k.c * 2.0 * k.r;
        case KernelKind::torus_profile:
            return detail::profile_integral(k, 2);
        case KernelKind::counterexample:
            // integral of lambda2^2 = c^2/x diverges at 0
            return k.c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        case KernelKind::scaled:
            return k.factor * k.factor * l2_norm_sq(*k.base, space);
    }
    return 0.0;
}

// Quadrature route for the L2 norm: integrates the closed-form lambda2^2
// over x and reports divergence through the converged flag.
inline QuadratureResult l2_norm_sq_quadrature(const KernelSpec& k, const SpaceSpec& space,
                                              double abs_tol = 1e-7) {
    check_kernel_space(k, space);
    if (space.kind == SpaceKind::finite) {
        double s = 0.0;
        for (int i = 0; i < space.atom_count(); ++i) {
            double v = rms_intensity(k, space, Point::atom(i));
            s += v * v * space.weights[static_cast<std::size_t>(i)];
        }
        return {s, true, space.atom_count()};
    }
    return integrate([&](double x) {
        double v = rms_intensity(k, space, Point::at(x));
        return v * v;
    }, 0.0, 1.0, parameter_breakpoints(k), abs_tol);
}

struct L2Verdict {
    bool is_l2 = true;
    std::string diagnostic;
};

// Whether K lies in L2(S x S, mu (x) mu).
inline L2Verdict is_L2(const KernelSpec& k, const SpaceSpec& space) {
    check_kernel_space(k, space);
    switch (k.kind) {
        case KernelKind::counterexample:
            if (k.c == 0.0) return {true, ""};
            return {false, "lambda2 not in L1"};
        case KernelKind::scaled:
            if (k.factor == 0.0) return {true, ""};
            return is_L2(*k.base, space);
        default:
            return {true, ""};
    }
}

}  // namespace irg
