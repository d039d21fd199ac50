#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "irg/errors.hpp"
#include "irg/graph.hpp"
#include "irg/kernel.hpp"
#include "irg/sampler.hpp"
#include "irg/space.hpp"

namespace irg {

// Dyadic partition at level m: the 2^m half-open intervals for continuous
// spaces, the atoms for finite spaces (every level identical there).
struct Partition {
    SpaceSpec space;
    int level = 1;
    std::vector<Cell> cells;
};

inline Partition build_partition(const SpaceSpec& space, int m) {
    if (m < 1 || m > 20) throw input_error("partition level must be in [1, 20]");
    Partition p;
    p.space = space;
    p.level = m;
    if (space.kind == SpaceKind::finite) {
        for (int a = 0; a < space.atom_count(); ++a)
            p.cells.push_back(Cell::of_atoms({a}));
    } else {
        const int count = 1 << m;
        const double w = std::ldexp(1.0, -m);  // exact dyadic width
        p.cells.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            p.cells.push_back(Cell::interval(static_cast<double>(i) * w,
                                             static_cast<double>(i + 1) * w));
    }
    return p;
}

namespace detail {

// Extreme distances between two same-width dyadic cells, over cell closures.
// On the torus the index gap wraps and distances cap at 1/2.
struct CellDistanceRange {
    double d_min;
    double d_max;
};

inline CellDistanceRange dyadic_distance_range(const SpaceSpec& space, int level, int i, int j) {
    const int count = 1 << level;
    const double w = std::ldexp(1.0, -level);
    int g = std::abs(i - j);
    if (space.kind == SpaceKind::torus) g = std::min(g, count - g);
    const double d_min = g == 0 ? 0.0 : static_cast<double>(g - 1) * w;
    double d_max = static_cast<double>(g + 1) * w;
    if (space.kind == SpaceKind::torus) d_max = std::min(d_max, 0.5);
    return {d_min, d_max};
}

// Infimum of a piecewise-constant profile over distances in [d_min, d_max]:
// the piece containing d_min plus every piece overlapping the range in
// positive length.
inline double profile_infimum(const KernelSpec& k, double d_min, double d_max) {
    double best = profile_value(k, d_min);
    for (std::size_t p = 0; p < k.profile_values.size(); ++p) {
        const double lo = std::max(k.profile_breaks[p], d_min);
        const double hi = std::min(k.profile_breaks[p + 1], d_max);
        if (hi > lo) best = std::min(best, k.profile_values[p]);
    }
    return best;
}

}  // namespace detail

// K_m(i, j) = inf of K over cell i x cell j, exact for every built-in
// variant via its piecewise structure.
inline double lower_kernel(const KernelSpec& kernel, const Partition& part, int i, int j) {
    const int count = static_cast<int>(part.cells.size());
    if (i < 0 || j < 0 || i >= count || j >= count)
        throw input_error("cell index outside partition");
    check_kernel_space(kernel, part.space);
    auto [leaf, f] = detail::flatten_scale(kernel);
    if (f == 0.0) return 0.0;

    if (part.space.kind == SpaceKind::finite) {
        // cells are single atoms, so the infimum is the value itself
        return f * evaluate(*leaf, Point::atom(part.cells[static_cast<std::size_t>(i)].atoms[0]),
                            Point::atom(part.cells[static_cast<std::size_t>(j)].atoms[0]));
    }

    switch (leaf->kind) {
        case KernelKind::constant:
            return f * leaf->c;
        case KernelKind::torus_band: {
            const auto d = detail::dyadic_distance_range(part.space, part.level, i, j);
            return d.d_max <= leaf->r ? f * leaf->c : 0.0;
        }
        case KernelKind::torus_profile: {
            const auto d = detail::dyadic_distance_range(part.space, part.level, i, j);
            return f * detail::profile_infimum(*leaf, d.d_min, d.d_max);
        }
        case KernelKind::counterexample: {
            const Cell& a = part.cells[static_cast<std::size_t>(i)];
            const Cell& b = part.cells[static_cast<std::size_t>(j)];
            // some pair leaves the support iff one upper end exceeds twice
            // the other cell's lower end
            if (a.hi > 2.0 * b.lo || b.hi > 2.0 * a.lo) return 0.0;
            return f * leaf->c / std::max(a.hi, b.hi);
        }
        default:
            throw input_error("unsupported kernel variant for exact infimum");
    }
}

// Dense-grid infimum oracle: the minimum of K over g x g midpoint samples
// per cell pair. Approximate by construction.
inline double lower_kernel_grid(const KernelSpec& kernel, const Partition& part, int i, int j,
                                int g = 64) {
    const int count = static_cast<int>(part.cells.size());
    if (i < 0 || j < 0 || i >= count || j >= count)
        throw input_error("cell index outside partition");
    check_kernel_space(kernel, part.space);
    if (part.space.kind == SpaceKind::finite)
        return evaluate(kernel, Point::atom(part.cells[static_cast<std::size_t>(i)].atoms[0]),
                        Point::atom(part.cells[static_cast<std::size_t>(j)].atoms[0]));
    const Cell& a = part.cells[static_cast<std::size_t>(i)];
    const Cell& b = part.cells[static_cast<std::size_t>(j)];
    const double wa = (a.hi - a.lo) / static_cast<double>(g);
    const double wb = (b.hi - b.lo) / static_cast<double>(g);
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < g; ++s) {
        const double x = a.lo + (static_cast<double>(s) + 0.5) * wa;
        for (int t = 0; t < g; ++t) {
            const double y = b.lo + (static_cast<double>(t) + 0.5) * wb;
            best = std::min(best, evaluate(kernel, Point::at(x), Point::at(y)));
        }
    }
    return best;
}

// H_m: vertices are positive-measure cells, (i, j) is an edge iff the lower
// approximation kernel is positive on the cell pair. Self-pair infima are
// recorded separately and play no role in connectivity.
struct PartitionGraph {
    Partition partition;
    std::vector<int> vertices;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::tuple<int, int, double>> edge_inf;  // positive pair infima
    std::vector<double> self_inf;                        // per cell, 0 for zero-measure cells
};

inline PartitionGraph build_partition_graph(const KernelSpec& kernel, const Partition& part) {
    check_kernel_space(kernel, part.space);
    PartitionGraph pg;
    pg.partition = part;
    const int count = static_cast<int>(part.cells.size());
    pg.self_inf.assign(static_cast<std::size_t>(count), 0.0);
    for (int i = 0; i < count; ++i)
        if (cell_measure(part.space, part.cells[static_cast<std::size_t>(i)]) > 0.0)
            pg.vertices.push_back(i);
    if (pg.vertices.size() > 4096)
        throw resource_error("partition graph materialization capped at 4096 cells; got " +
                             std::to_string(pg.vertices.size()));
    for (int i : pg.vertices) pg.self_inf[static_cast<std::size_t>(i)] = lower_kernel(kernel, part, i, i);
    for (std::size_t a = 0; a < pg.vertices.size(); ++a)
        for (std::size_t b = a + 1; b < pg.vertices.size(); ++b) {
            const int i = pg.vertices[a], j = pg.vertices[b];
            const double inf = lower_kernel(kernel, part, i, j);
            if (inf > 0.0) {
                pg.edges.emplace_back(i, j);
                pg.edge_inf.emplace_back(i, j, inf);
            }
        }
    return pg;
}

struct MainComponent {
    std::vector<int> cells;
    double covered_measure = 0.0;
};

// The connected component of H_m with the largest total cell measure.
inline MainComponent main_component(const PartitionGraph& pg) {
    if (pg.vertices.empty()) throw input_error("partition graph has no positive-measure cell");
    const int count = static_cast<int>(pg.partition.cells.size());
    UnionFind uf(count);
    for (auto [i, j] : pg.edges) uf.unite(i, j);
    std::vector<double> measure(static_cast<std::size_t>(count), 0.0);
    for (int v : pg.vertices)
        measure[static_cast<std::size_t>(uf.find(v))] +=
            cell_measure(pg.partition.space, pg.partition.cells[static_cast<std::size_t>(v)]);
    int best_root = -1;
    double best = -1.0;
    for (int v : pg.vertices) {
        const int r = uf.find(v);
        if (measure[static_cast<std::size_t>(r)] > best) {
            best = measure[static_cast<std::size_t>(r)];
            best_root = r;
        }
    }
    MainComponent mc;
    mc.covered_measure = best;
    for (int v : pg.vertices)
        if (uf.find(v) == best_root) mc.cells.push_back(v);
    return mc;
}

namespace detail {

// Covered measure of the main component of H_m without materializing the
// graph, using per-variant structure so deep levels stay tractable.
inline double main_component_measure(const KernelSpec& kernel, const SpaceSpec& space, int m) {
    auto [leaf, f] = flatten_scale(kernel);

    if (space.kind == SpaceKind::finite) {
        const int M = space.atom_count();
        UnionFind uf(M);
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                if (space.weights[static_cast<std::size_t>(i)] <= 0.0 ||
                    space.weights[static_cast<std::size_t>(j)] <= 0.0)
                    continue;
                if (f * evaluate(*leaf, Point::atom(i), Point::atom(j)) > 0.0) uf.unite(i, j);
            }
        std::vector<double> measure(static_cast<std::size_t>(M), 0.0);
        double best = 0.0;
        for (int i = 0; i < M; ++i) {
            if (space.weights[static_cast<std::size_t>(i)] <= 0.0) continue;
            double& acc = measure[static_cast<std::size_t>(uf.find(i))];
            acc += space.weights[static_cast<std::size_t>(i)];
            best = std::max(best, acc);
        }
        return best;
    }

    const int count = 1 << m;
    const double w = std::ldexp(1.0, -m);
    const Partition part = build_partition(space, m);

    if (leaf->kind == KernelKind::constant || f == 0.0) {
        const double v = f * (leaf->kind == KernelKind::constant ? leaf->c : 0.0);
        return v > 0.0 ? 1.0 : w;  // complete graph or all singletons
    }
    if (leaf->kind == KernelKind::counterexample) {
        if (leaf->c <= 0.0) return w;
        // (i, j) with i < j is an edge iff j <= 2i - 1, so adjacent pairs
        // from cell 2 upward chain all higher cells and cells 0, 1 stay
        // isolated; checked against the materialized graph in tests
        if (count == 2) return w;
        return 1.0 - 2.0 * w;
    }
    // torus-homogeneous kernels: adjacency depends only on the circular
    // index gap, so unite whole gap classes until the graph is connected
    UnionFind uf(count);
    for (int g = 1; g <= count / 2 && uf.component_count() > 1; ++g) {
        if (lower_kernel(kernel, part, 0, g) <= 0.0) continue;
        for (int i = 0; i < count; ++i) uf.unite(i, (i + g) % count);
    }
    std::vector<int> size(static_cast<std::size_t>(count), 0);
    int best = 0;
    for (int i = 0; i < count; ++i) {
        int& acc = size[static_cast<std::size_t>(uf.find(i))];
        ++acc;
        best = std::max(best, acc);
    }
    return static_cast<double>(best) * w;
}

}  // namespace detail

struct ProbeLevel {
    int m = 0;
    double covered_measure = 0.0;
    double gap = 0.0;
};

struct ProbeReport {
    std::vector<ProbeLevel> levels;
    bool irreducible_compatible = false;
    int compatible_from_level = -1;
    double split_major = 0.0;
    double split_minor = 0.0;
    std::string verdict;
};

// Semi-decision: reports the measure covered by the main component of H_m
// for m = 1..m_max. Compatible with irreducibility when the uncovered gap
// shrinks below 2^(1-m) through the deepest levels; persistent splits are
// reported as reducibility evidence. One-sided evidence either way.
inline ProbeReport irreducibility_probe(const KernelSpec& kernel, const SpaceSpec& space,
                                        int m_max) {
    check_kernel_space(kernel, space);
    if (m_max < 1 || m_max > 20) throw input_error("probe level must be in [1, 20]");
    ProbeReport rep;
    for (int m = 1; m <= m_max; ++m) {
        const double covered = detail::main_component_measure(kernel, space, m);
        rep.levels.push_back({m, covered, 1.0 - covered});
    }
    rep.compatible_from_level = -1;
    for (int idx = static_cast<int>(rep.levels.size()) - 1; idx >= 0; --idx) {
        const auto& lv = rep.levels[static_cast<std::size_t>(idx)];
        const double tol = std::ldexp(1.0, 1 - lv.m) * (1.0 + 1e-9);
        if (lv.gap <= tol)
            rep.compatible_from_level = lv.m;
        else
            break;
    }
    rep.irreducible_compatible = rep.compatible_from_level >= 0;
    const auto& last = rep.levels.back();
    rep.split_major = last.covered_measure;
    rep.split_minor = last.gap;
    rep.verdict = rep.irreducible_compatible ? "irreducible-compatible" : "reducible-evidence";
    return rep;
}

struct CellOccupancy {
    int cell = 0;
    long long count = 0;
    double expected = 0.0;  // n * mu(cell)
    double ratio = 0.0;
    bool pass = false;      // ratio strictly inside (1/2, 2)
};

// Counts sample positions per positive-measure cell and checks the
// (1/2, 2) occupancy ratio.
inline std::vector<CellOccupancy> occupancy_check(const SampledGraph& g, const Partition& part) {
    if (g.space.kind != part.space.kind)
        throw input_error("graph and partition live on different spaces");
    const int count = static_cast<int>(part.cells.size());
    std::vector<long long> hits(static_cast<std::size_t>(count), 0);
    for (const Point& p : g.positions) {
        int idx;
        if (part.space.kind == SpaceKind::finite) {
            idx = p.index;
        } else {
            idx = static_cast<int>(p.coord * static_cast<double>(count));
            if (idx >= count) idx = count - 1;
        }
        if (idx < 0 || idx >= count) throw input_error("position outside partition");
        ++hits[static_cast<std::size_t>(idx)];
    }
    std::vector<CellOccupancy> out;
    for (int i = 0; i < count; ++i) {
        const double mu = cell_measure(part.space, part.cells[static_cast<std::size_t>(i)]);
        if (mu <= 0.0) continue;
        CellOccupancy co;
        co.cell = i;
        co.count = hits[static_cast<std::size_t>(i)];
        co.expected = static_cast<double>(g.n) * mu;
        co.ratio = static_cast<double>(co.count) / co.expected;
        co.pass = co.ratio > 0.5 && co.ratio < 2.0;
        out.push_back(co);
    }
    return out;
}

}  // namespace irg
