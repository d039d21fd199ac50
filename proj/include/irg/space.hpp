#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "irg/errors.hpp"
#include "irg/rng.hpp"

namespace irg {

enum class SpaceKind { finite, interval, torus };

// A point of the ground space: an atom index for finite spaces, otherwise a
// coordinate in [0, 1).
struct Point {
    double coord = 0.0;
    int index = -1;

    static Point at(double x) { return Point{x, -1}; }
    static Point atom(int i) { return Point{0.0, i}; }
    bool discrete() const { return index >= 0; }
};

// Ground space (S, mu). Three variants: a finite weighted set, the unit
// interval [0,1) and the unit torus, both with Lebesgue measure.
struct SpaceSpec {
    SpaceKind kind = SpaceKind::interval;
    std::vector<double> weights;       // finite only, sums to 1
    std::vector<std::string> labels;   // finite only
    std::vector<double> cumulative;    // sampling table, finite only

    static SpaceSpec interval() { return SpaceSpec{SpaceKind::interval, {}, {}, {}}; }
    static SpaceSpec torus() { return SpaceSpec{SpaceKind::torus, {}, {}, {}}; }

    static SpaceSpec finite(std::vector<double> weights,
                            std::vector<std::string> labels = {}) {
        if (weights.empty())
            throw input_error("finite space needs at least one atom");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0))
                throw input_error("finite space weights must be nonnegative");
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-12)
            throw input_error("finite space weights must sum to 1 (got " +
                              std::to_string(total) + ")");
        if (labels.empty()) {
            labels.reserve(weights.size());
            for (std::size_t i = 0; i < weights.size(); ++i)
                labels.push_back(std::to_string(i));
        } else if (labels.size() != weights.size()) {
            throw input_error("finite space labels/weights size mismatch");
        }
        SpaceSpec s{SpaceKind::finite, std::move(weights), std::move(labels), {}};
        s.cumulative.reserve(s.weights.size());
        double run = 0.0;
        for (double w : s.weights) {
            run += w;
            s.cumulative.push_back(run);
        }
        s.cumulative.back() = 1.0;
        return s;
    }

    bool continuous() const { return kind != SpaceKind::finite; }
    int atom_count() const { return static_cast<int>(weights.size()); }
};

inline void check_point(const SpaceSpec& space, const Point& p) {
    if (space.kind == SpaceKind::finite) {
        if (!p.discrete() || p.index >= space.atom_count())
            throw input_error("point does not belong to this finite space");
    } else {
        if (p.discrete() || !(p.coord >= 0.0 && p.coord < 1.0))
            throw input_error("point does not belong to this continuous space");
    }
}

// n i.i.d. mu-distributed draws. Deterministic given the rng state.
inline std::vector<Point> sample_points(const SpaceSpec& space, std::int64_t n, Rng& rng) {
    if (n < 0) throw input_error("sample_points: n must be >= 0");
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    if (space.kind == SpaceKind::finite) {
        const auto& cum = space.cumulative;
        for (std::int64_t i = 0; i < n; ++i) {
            double u = rng.next_double();
            // first atom whose cumulative weight exceeds u; zero-weight
            // atoms have empty intervals and are never selected
            int lo = 0, hi = space.atom_count() - 1;
            while (lo < hi) {
                int mid = (lo + hi) / 2;
                if (u < cum[static_cast<std::size_t>(mid)]) hi = mid; else lo = mid + 1;
            }
            pts.push_back(Point::atom(lo));
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            pts.push_back(Point::at(rng.next_double()));
    }
    return pts;
}

inline double circular_distance(double x, double y) {
    double d = std::fabs(x - y);
    return d <= 0.5 ? d : 1.0 - d;
}

inline double distance(const SpaceSpec& space, const Point& x, const Point& y) {
    check_point(space, x);
    check_point(space, y);
    switch (space.kind) {
        case SpaceKind::finite: return x.index == y.index ? 0.0 : 1.0;
        case SpaceKind::interval: return std::fabs(x.coord - y.coord);
        case SpaceKind::torus: return circular_distance(x.coord, y.coord);
    }
    return 0.0;
}

// One cell of a partition: a half-open interval [lo, hi) for continuous
// spaces, a set of atom indices for finite ones.
struct Cell {
    double lo = 0.0, hi = 0.0;
    std::vector<int> atoms;

    bool discrete() const { return !atoms.empty(); }

    static Cell interval(double lo, double hi) { return Cell{lo, hi, {}}; }
    static Cell of_atoms(std::vector<int> atoms) { return Cell{0.0, 0.0, std::move(atoms)}; }
};

inline double cell_measure(const SpaceSpec& space, const Cell& cell) {
    if (space.kind == SpaceKind::finite) {
        if (!cell.discrete())
            throw input_error("interval cell on a finite space");
        double total = 0.0;
        for (int a : cell.atoms) {
            if (a < 0 || a >= space.atom_count())
                throw input_error("cell atom outside space");
            total += space.weights[static_cast<std::size_t>(a)];
        }
        return total;
    }
    if (cell.discrete())
        throw input_error("atom cell on a continuous space");
    if (!(cell.lo >= 0.0 && cell.hi <= 1.0 && cell.lo <= cell.hi))
        throw input_error("cell outside the unit space");
    return cell.hi - cell.lo;
}

inline bool cell_contains(const SpaceSpec& space, const Cell& cell, const Point& p) {
    check_point(space, p);
    if (space.kind == SpaceKind::finite) {
        for (int a : cell.atoms)
            if (a == p.index) return true;
        return false;
    }
    return p.coord >= cell.lo && p.coord < cell.hi;
}

}  // namespace irg
