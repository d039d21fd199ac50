#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "irg/bounds.hpp"
#include "irg/errors.hpp"
#include "irg/graph.hpp"
#include "irg/kernel.hpp"
#include "irg/rng.hpp"
#include "irg/sampler.hpp"
#include "irg/space.hpp"

namespace irg {

// 95% score (Wilson) confidence interval for a binomial proportion.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

inline WilsonInterval wilson_interval(long successes, long trials,
                                      double z = 1.959963984540054) {
    if (trials <= 0) throw input_error("interval needs at least one trial");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (successes == 0) w.lo = 0.0;
    if (successes == trials) w.hi = 1.0;
    return w;
}

namespace detail {

// Runs fn(i) for i in [0, count) across the given number of threads. Each
// item writes only its own output slot, so results do not depend on the
// schedule.
template <class Fn>
void parallel_items(long count, int workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            const long i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<long>(workers, count));
    pool.reserve(static_cast<std::size_t>(spawn));
    for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

// A sweep over kernel scale c and size n. The base kernel is multiplied
// pointwise by each c, so the isolation parameter scales linearly along the
// grid axis.
struct ExperimentPlan {
    SpaceSpec space;
    KernelSpec base_kernel;
    std::vector<double> scale_grid;
    std::vector<int> n_grid;
    int replicates = 1;
    std::uint64_t master_seed = 0;
    std::vector<std::string> statistics = {"connected", "isolated", "spectrum", "min_component"};
    double budget = 1e11;  // cap on sum over cells of n^2 * replicates
    SampleMode mode = SampleMode::automatic;
    int workers = 1;
};

inline void validate_plan(const ExperimentPlan& plan) {
    check_kernel_space(plan.base_kernel, plan.space);
    if (plan.replicates < 1) throw input_error("plan needs replicates >= 1");
    if (plan.scale_grid.empty() || plan.n_grid.empty())
        throw input_error("plan needs nonempty scale and size grids");
    for (double c : plan.scale_grid)
        if (!(c >= 0.0)) throw input_error("kernel scales must be nonnegative");
    for (int n : plan.n_grid)
        if (n < 1) throw input_error("sizes must be >= 1");
    if (plan.workers < 1) throw input_error("plan needs workers >= 1");
    static const std::vector<std::string> known = {"connected", "isolated", "spectrum",
                                                   "min_component"};
    for (const auto& s : plan.statistics)
        if (std::find(known.begin(), known.end(), s) == known.end())
            throw input_error("unknown statistic: " + s);
}

// One Monte Carlo draw. seed = mix(mix(master_seed, cell), replicate) where
// cell = scale_index * |n_grid| + n_index, so any record can be re-derived
// in isolation.
struct SweepRecord {
    double c = 0.0;
    int n = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    bool connected = false;
    int isolated = 0;
    int min_component = 0;
    int max_component = 0;
};

struct CellSummary {
    double c = 0.0;
    int n = 0;
    int replicates = 0;
    long connected_count = 0;
    double connected_fraction = 0.0;
    WilsonInterval connected_ci;
    double mean_isolated = 0.0;
    std::map<int, long> min_component_hist;
};

struct SweepResult {
    std::uint64_t master_seed = 0;
    std::vector<SweepRecord> records;  // sorted by (cell, replicate)
    std::vector<CellSummary> cells;
};

inline SweepResult run_plan(const ExperimentPlan& plan) {
    validate_plan(plan);
    double cost = 0.0;
    for (int n : plan.n_grid)
        cost += static_cast<double>(n) * static_cast<double>(n) *
                static_cast<double>(plan.replicates) *
                static_cast<double>(plan.scale_grid.size());
    if (cost > plan.budget)
        throw resource_error("plan cost estimate " + std::to_string(cost) +
                             " exceeds budget " + std::to_string(plan.budget));

    const long cells = static_cast<long>(plan.scale_grid.size() * plan.n_grid.size());
    const long total = cells * plan.replicates;
    SweepResult out;
    out.master_seed = plan.master_seed;
    out.records.resize(static_cast<std::size_t>(total));

    detail::parallel_items(total, plan.workers, [&](long item) {
        const long cell = item / plan.replicates;
        const int rep = static_cast<int>(item % plan.replicates);
        const std::size_t ci = static_cast<std::size_t>(cell) / plan.n_grid.size();
        const std::size_t ni = static_cast<std::size_t>(cell) % plan.n_grid.size();
        const double c = plan.scale_grid[ci];
        const int n = plan.n_grid[ni];
        const std::uint64_t seed = mix(mix(plan.master_seed, static_cast<std::uint64_t>(cell)),
                                       static_cast<std::uint64_t>(rep));
        const KernelSpec kernel = KernelSpec::scaled(plan.base_kernel, c);
        const SampledGraph g = sample_graph(plan.space, kernel, n, seed, plan.mode);
        const ComponentSummary s = connected_components(g);
        SweepRecord& r = out.records[static_cast<std::size_t>(item)];
        r.c = c;
        r.n = n;
        r.replicate = rep;
        r.seed = seed;
        r.connected = s.is_connected;
        r.isolated = s.isolated_total;
        r.min_component = s.component_sizes.back();
        r.max_component = s.component_sizes.front();
    });

    for (long cell = 0; cell < cells; ++cell) {
        CellSummary cs;
        const std::size_t ci = static_cast<std::size_t>(cell) / plan.n_grid.size();
        const std::size_t ni = static_cast<std::size_t>(cell) % plan.n_grid.size();
        cs.c = plan.scale_grid[ci];
        cs.n = plan.n_grid[ni];
        cs.replicates = plan.replicates;
        double isolated_sum = 0.0;
        for (int rep = 0; rep < plan.replicates; ++rep) {
            const auto& r = out.records[static_cast<std::size_t>(cell * plan.replicates + rep)];
            if (r.connected) ++cs.connected_count;
            isolated_sum += r.isolated;
            ++cs.min_component_hist[r.min_component];
        }
        cs.connected_fraction = static_cast<double>(cs.connected_count) /
                                static_cast<double>(plan.replicates);
        cs.connected_ci = wilson_interval(cs.connected_count, plan.replicates);
        cs.mean_isolated = isolated_sum / static_cast<double>(plan.replicates);
        out.cells.push_back(std::move(cs));
    }
    return out;
}

// Statistics for the unbounded-kernel counterexample: the isolating event
// happens when one position falls below 1/n while every other position
// exceeds 2/n; such a vertex has kernel 0 to all others and so is isolated
// no matter how the edge coins land.
struct CounterexampleReport {
    double c = 0.0;
    int n = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    double lambda_star = 0.0;
    long disconnected_count = 0;
    double disconnected_fraction = 0.0;
    long event_count = 0;
    double event_fraction = 0.0;
    long event_isolated_count = 0;
    double implication_rate = 1.0;  // isolated occurrences / event occurrences
    double predicted_event_probability = 0.0;  // (1 - 2/n)^(n-1)
    double limit_reference = 0.0;              // 1/e^2
};

inline CounterexampleReport counterexample_experiment(double c, int n, int replicates,
                                                      std::uint64_t seed, int workers = 1) {
    if (!(c > 2.0))
        throw input_error("counterexample experiment needs c > 2 so that lambda* > 1");
    if (n < 100) throw input_error("counterexample experiment needs n >= 100");
    if (replicates < 1) throw input_error("need replicates >= 1");
    const SpaceSpec space = SpaceSpec::interval();
    const KernelSpec kernel = KernelSpec::counterexample(c);
    const double lo_cut = 1.0 / static_cast<double>(n);
    const double hi_cut = 2.0 / static_cast<double>(n);

    std::vector<char> disconnected(static_cast<std::size_t>(replicates), 0);
    std::vector<char> event(static_cast<std::size_t>(replicates), 0);
    std::vector<char> event_isolated(static_cast<std::size_t>(replicates), 0);

    detail::parallel_items(replicates, workers, [&](long rep) {
        const std::uint64_t rep_seed = mix(seed, static_cast<std::uint64_t>(rep));
        const SampledGraph g = sample_graph(space, kernel, n, rep_seed);
        const ComponentSummary s = connected_components(g);
        disconnected[static_cast<std::size_t>(rep)] = !s.is_connected;
        int low = -1, low_count = 0, le_hi_count = 0;
        for (int v = 0; v < n; ++v) {
            const double x = g.positions[static_cast<std::size_t>(v)].coord;
            if (x < lo_cut) {
                low = v;
                ++low_count;
            }
            if (x <= hi_cut) ++le_hi_count;
        }
        if (low_count == 1 && le_hi_count == 1) {
            event[static_cast<std::size_t>(rep)] = 1;
            const std::vector<int> deg = degree_sequence(g);
            event_isolated[static_cast<std::size_t>(rep)] =
                deg[static_cast<std::size_t>(low)] == 0;
        }
    });

    CounterexampleReport rep;
    rep.c = c;
    rep.n = n;
    rep.replicates = replicates;
    rep.seed = seed;
    rep.lambda_star = 0.5 * c;
    for (int i = 0; i < replicates; ++i) {
        rep.disconnected_count += disconnected[static_cast<std::size_t>(i)];
        rep.event_count += event[static_cast<std::size_t>(i)];
        rep.event_isolated_count += event_isolated[static_cast<std::size_t>(i)];
    }
    rep.disconnected_fraction = static_cast<double>(rep.disconnected_count) /
                                static_cast<double>(replicates);
    rep.event_fraction = static_cast<double>(rep.event_count) /
                         static_cast<double>(replicates);
    rep.implication_rate = rep.event_count == 0
                               ? 1.0
                               : static_cast<double>(rep.event_isolated_count) /
                                     static_cast<double>(rep.event_count);
    rep.predicted_event_probability =
        std::pow(1.0 - 2.0 / static_cast<double>(n), static_cast<double>(n - 1));
    rep.limit_reference = std::exp(-2.0);
    return rep;
}

// The connectivity window at lambda* = 1: K = 1, where the exact recursion
// oracle is available and the limit is 1/e.
struct WindowReport {
    int n = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    double empirical_connected = 0.0;
    double exact_connected = 0.0;
    double limit_reference = 0.0;  // 1/e
    double gap_to_limit = 0.0;     // |exact - 1/e|
    double isolated_mean = 0.0;
    double isolated_variance = 0.0;
    double expected_isolated_mean = 0.0;  // n (1-p)^(n-1)
    std::map<int, long> isolated_hist;
};

inline WindowReport window_experiment(int n, int replicates, std::uint64_t seed,
                                      int workers = 1) {
    if (n < 2 || n > 400)
        throw input_error("window experiment needs 2 <= n <= 400 for the exact oracle");
    if (replicates < 1) throw input_error("need replicates >= 1");
    const SpaceSpec space = SpaceSpec::interval();
    const KernelSpec kernel = KernelSpec::constant(1.0);
    const double p = std::min(1.0, std::log(static_cast<double>(n)) / static_cast<double>(n));

    std::vector<char> connected(static_cast<std::size_t>(replicates), 0);
    std::vector<int> isolated(static_cast<std::size_t>(replicates), 0);
    detail::parallel_items(replicates, workers, [&](long rep) {
        const std::uint64_t rep_seed = mix(seed, static_cast<std::uint64_t>(rep));
        const SampledGraph g = sample_graph(space, kernel, n, rep_seed);
        const ComponentSummary s = connected_components(g);
        connected[static_cast<std::size_t>(rep)] = s.is_connected;
        isolated[static_cast<std::size_t>(rep)] = s.isolated_total;
    });

    WindowReport rep;
    rep.n = n;
    rep.replicates = replicates;
    rep.seed = seed;
    long conn = 0;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < replicates; ++i) {
        conn += connected[static_cast<std::size_t>(i)];
        const double v = isolated[static_cast<std::size_t>(i)];
        sum += v;
        sumsq += v * v;
        ++rep.isolated_hist[isolated[static_cast<std::size_t>(i)]];
    }
    rep.empirical_connected = static_cast<double>(conn) / static_cast<double>(replicates);
    rep.exact_connected = gilbert_connectivity_exact(n, p);
    rep.limit_reference = std::exp(-1.0);
    rep.gap_to_limit = std::fabs(rep.exact_connected - rep.limit_reference);
    rep.isolated_mean = sum / static_cast<double>(replicates);
    rep.isolated_variance = replicates < 2 ? 0.0
        : (sumsq - sum * sum / static_cast<double>(replicates)) /
          static_cast<double>(replicates - 1);
    rep.expected_isolated_mean = static_cast<double>(n) *
                                 std::pow(1.0 - p, static_cast<double>(n - 1));
    return rep;
}

// Frequency of components in the forbidden size band [2, delta n] for a
// kernel with lambda* > 1.
struct SizeGapReport {
    int n = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    double lambda_star = 0.0;
    double lambda2_sup = 0.0;
    double delta = 0.0;
    int band_upper = 0;  // floor(delta n)
    long gap_count = 0;
    double gap_fraction = 0.0;
};

inline SizeGapReport size_gap_experiment(const SpaceSpec& space, const KernelSpec& kernel,
                                         int n, int replicates, std::uint64_t seed,
                                         int workers = 1) {
    if (n < 2) throw input_error("size gap experiment needs n >= 2");
    if (replicates < 1) throw input_error("need replicates >= 1");
    const KernelFunctionals f = isolation_parameter(kernel, space);
    if (!(f.lambda_star > 1.0))
        throw input_error("size gap experiment needs lambda* > 1");
    if (!std::isfinite(f.lambda2_sup))
        throw input_error("size gap experiment needs a finite lambda2 sup");
    const double delta = min_component_fraction(f.lambda_star, f.lambda2_sup);
    const int band_upper = static_cast<int>(delta * static_cast<double>(n));

    std::vector<char> hit(static_cast<std::size_t>(replicates), 0);
    detail::parallel_items(replicates, workers, [&](long rep) {
        const std::uint64_t rep_seed = mix(seed, static_cast<std::uint64_t>(rep));
        const SampledGraph g = sample_graph(space, kernel, n, rep_seed);
        const ComponentSummary s = connected_components(g);
        for (int sz : s.component_sizes)
            if (sz >= 2 && sz <= band_upper) {
                hit[static_cast<std::size_t>(rep)] = 1;
                break;
            }
    });

    SizeGapReport rep;
    rep.n = n;
    rep.replicates = replicates;
    rep.seed = seed;
    rep.lambda_star = f.lambda_star;
    rep.lambda2_sup = f.lambda2_sup;
    rep.delta = delta;
    rep.band_upper = band_upper;
    for (int i = 0; i < replicates; ++i) rep.gap_count += hit[static_cast<std::size_t>(i)];
    rep.gap_fraction = static_cast<double>(rep.gap_count) / static_cast<double>(replicates);
    return rep;
}

}  // namespace irg
