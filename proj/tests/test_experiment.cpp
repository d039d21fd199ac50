#include <catch2/catch_amalgamated.hpp>

#include "irg/experiment.hpp"
#include "irg/io.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace irg;

namespace {

ExperimentPlan small_plan() {
    ExperimentPlan plan;
    plan.space = SpaceSpec::interval();
    plan.base_kernel = KernelSpec::constant(1.0);
    plan.scale_grid = {0.5, 2.0};
    plan.n_grid = {40, 80};
    plan.replicates = 25;
    plan.master_seed = 31415;
    return plan;
}

}  // namespace

TEST_CASE("wilson intervals match reference values") {
    auto w = wilson_interval(5, 10);
    REQUIRE(w.lo == Catch::Approx(0.23659309051256400).epsilon(1e-12));
    REQUIRE(w.hi == Catch::Approx(0.76340690948743600).epsilon(1e-12));
    auto zero = wilson_interval(0, 10);
    REQUIRE(zero.lo == 0.0);
    REQUIRE(zero.hi == Catch::Approx(0.27753279986288920).epsilon(1e-12));
    auto full = wilson_interval(10, 10);
    REQUIRE(full.lo == Catch::Approx(0.72246720013711080).epsilon(1e-12));
    REQUIRE(full.hi == 1.0);
    REQUIRE_THROWS_AS(wilson_interval(0, 0), input_error);
}

TEST_CASE("plan validation") {
    auto plan = small_plan();
    REQUIRE_NOTHROW(validate_plan(plan));
    plan.replicates = 0;
    REQUIRE_THROWS_AS(validate_plan(plan), input_error);
    plan = small_plan();
    plan.scale_grid.clear();
    REQUIRE_THROWS_AS(validate_plan(plan), input_error);
    plan = small_plan();
    plan.scale_grid = {-1.0};
    REQUIRE_THROWS_AS(validate_plan(plan), input_error);
    plan = small_plan();
    plan.statistics = {"connected", "nonsense"};
    REQUIRE_THROWS_AS(validate_plan(plan), input_error);
}

TEST_CASE("budget guard refuses oversized plans") {
    auto plan = small_plan();
    plan.budget = 1000.0;
    REQUIRE_THROWS_AS(run_plan(plan), resource_error);
}

TEST_CASE("zero scale never connects, huge scale always connects") {
    ExperimentPlan plan;
    plan.space = SpaceSpec::interval();
    plan.base_kernel = KernelSpec::constant(1.0);
    plan.scale_grid = {0.0, 1e6};
    plan.n_grid = {10};
    plan.replicates = 100;
    plan.master_seed = 999;
    auto result = run_plan(plan);
    REQUIRE(result.cells[0].connected_count == 0);
    REQUIRE(result.cells[1].connected_count == 100);
    for (const auto& r : result.records)
        if (r.c == 0.0) REQUIRE(r.isolated == r.n);
}

TEST_CASE("records are reproducible and independent of worker count") {
    auto plan = small_plan();
    plan.workers = 1;
    auto a = run_plan(plan);
    plan.workers = 2;
    auto b = run_plan(plan);
    REQUIRE(sweep_csv(a) == sweep_csv(b));
    auto c = run_plan(plan);
    REQUIRE(sweep_csv(b) == sweep_csv(c));
}

TEST_CASE("any record can be re-derived from its seed alone") {
    auto plan = small_plan();
    auto result = run_plan(plan);
    for (std::size_t pick : {std::size_t{0}, std::size_t{37}, result.records.size() - 1}) {
        const auto& r = result.records[pick];
        const auto g = sample_graph(plan.space, KernelSpec::scaled(plan.base_kernel, r.c), r.n,
                                    r.seed, plan.mode);
        const auto s = connected_components(g);
        REQUIRE(s.is_connected == r.connected);
        REQUIRE(s.isolated_total == r.isolated);
        REQUIRE(s.component_sizes.back() == r.min_component);
        REQUIRE(s.component_sizes.front() == r.max_component);
    }
}

TEST_CASE("empirical connectivity tracks the exact oracle") {
    ExperimentPlan plan;
    plan.space = SpaceSpec::interval();
    plan.base_kernel = KernelSpec::constant(1.0);
    plan.scale_grid = {1.0};
    plan.n_grid = {150};
    plan.replicates = 4000;
    plan.master_seed = 22222;
    plan.workers = 2;
    auto result = run_plan(plan);
    const double exact = gilbert_connectivity_exact(150, std::log(150.0) / 150.0);
    const double p_hat = result.cells[0].connected_fraction;
    const double se = std::sqrt(exact * (1.0 - exact) / plan.replicates);
    REQUIRE(std::fabs(p_hat - exact) <= 3.0 * se);
}

TEST_CASE("score interval covers the exact probability") {
    // 200 meta-trials of 200 replicates each at n = 100, c = 1
    const double exact = gilbert_connectivity_exact(100, std::log(100.0) / 100.0);
    int covered = 0;
    const int meta = 200, reps = 200;
    for (int t = 0; t < meta; ++t) {
        long conn = 0;
        for (int r = 0; r < reps; ++r) {
            const std::uint64_t seed = mix(mix(777777, static_cast<std::uint64_t>(t)),
                                           static_cast<std::uint64_t>(r));
            auto g = sample_graph(SpaceSpec::interval(), KernelSpec::constant(1.0), 100, seed,
                                  SampleMode::accelerated);
            conn += connected_components(g).is_connected;
        }
        auto ci = wilson_interval(conn, reps);
        if (ci.lo <= exact && exact <= ci.hi) ++covered;
    }
    REQUIRE(covered >= 180);  // 90% of meta-trials
}

TEST_CASE("connectivity is monotone along the scale axis") {
    ExperimentPlan plan;
    plan.space = SpaceSpec::interval();
    plan.base_kernel = KernelSpec::constant(1.0);
    plan.scale_grid = {0.4, 0.8, 1.2, 1.6, 2.0};
    plan.n_grid = {2000};
    plan.replicates = 500;
    plan.master_seed = 5555;
    plan.workers = 2;
    auto result = run_plan(plan);
    for (std::size_t i = 1; i < result.cells.size(); ++i) {
        const auto& lo = result.cells[i - 1];
        const auto& hi = result.cells[i];
        const double se_lo = std::sqrt(std::max(lo.connected_fraction * (1 - lo.connected_fraction),
                                                1.0 / plan.replicates) / plan.replicates);
        const double se_hi = std::sqrt(std::max(hi.connected_fraction * (1 - hi.connected_fraction),
                                                1.0 / plan.replicates) / plan.replicates);
        REQUIRE(hi.connected_fraction >=
                lo.connected_fraction - 2.0 * std::sqrt(se_lo * se_lo + se_hi * se_hi));
    }
}

TEST_CASE("counterexample experiment: events always isolate their vertex") {
    auto rep = counterexample_experiment(4.0, 200, 2000, 12321, 2);
    REQUIRE(rep.lambda_star == 2.0);
    REQUIRE(rep.implication_rate == 1.0);
    REQUIRE(rep.event_count > 0);
    const double predicted = std::pow(1.0 - 2.0 / 200.0, 199.0);
    REQUIRE(rep.predicted_event_probability == Catch::Approx(predicted));
    const double se = std::sqrt(predicted * (1.0 - predicted) / 2000.0);
    REQUIRE(std::fabs(rep.event_fraction - predicted) <= 4.0 * se);
    REQUIRE_THROWS_AS(counterexample_experiment(1.0, 200, 10, 1), input_error);
    REQUIRE_THROWS_AS(counterexample_experiment(4.0, 50, 10, 1), input_error);
}

TEST_CASE("window experiment matches the recursion oracle") {
    auto rep = window_experiment(300, 10000, 67890, 2);
    REQUIRE(rep.exact_connected ==
            Catch::Approx(0.38035889511728951).epsilon(1e-11));
    const double se = std::sqrt(rep.exact_connected * (1.0 - rep.exact_connected) / 10000.0);
    REQUIRE(std::fabs(rep.empirical_connected - rep.exact_connected) <= 3.0 * se);
    REQUIRE(rep.limit_reference == Catch::Approx(std::exp(-1.0)));
    // the n = 2 exact value is log(2)/2
    auto tiny = window_experiment(2, 10, 1);
    REQUIRE(tiny.exact_connected == Catch::Approx(0.34657359027997264).epsilon(1e-14));
    REQUIRE_THROWS_AS(window_experiment(401, 10, 1), input_error);
}

TEST_CASE("window isolated-count moments look Poisson") {
    auto rep = window_experiment(250, 20000, 4242, 2);
    // mean close to the binomial expectation
    const double se_mean = std::sqrt(rep.expected_isolated_mean / 20000.0);
    REQUIRE(std::fabs(rep.isolated_mean - rep.expected_isolated_mean) <= 4.0 * se_mean);
    // Poisson moment comparison: variance within 15% of the mean
    REQUIRE(rep.isolated_variance == Catch::Approx(rep.isolated_mean).epsilon(0.15));
}

TEST_CASE("size gap experiment") {
    SpaceSpec interval = SpaceSpec::interval();
    KernelSpec k2 = KernelSpec::constant(2.0);
    // delta agrees with the solver
    auto rep = size_gap_experiment(interval, k2, 500, 400, 999, 2);
    REQUIRE(rep.delta == Catch::Approx(min_component_fraction(2.0, 2.0)));
    REQUIRE(rep.band_upper == static_cast<int>(rep.delta * 500));
    REQUIRE_THROWS_AS(size_gap_experiment(interval, KernelSpec::constant(0.5), 100, 10, 1),
                      input_error);
    REQUIRE_THROWS_AS(
        size_gap_experiment(interval, KernelSpec::counterexample(4.0), 200, 10, 1),
        input_error);
}

TEST_CASE("size gap frequency decays with n") {
    SpaceSpec interval = SpaceSpec::interval();
    KernelSpec k2 = KernelSpec::constant(2.0);
    std::vector<double> freq;
    for (int n : {500, 1000, 2000})
        freq.push_back(size_gap_experiment(interval, k2, n, 2000, 2718, 2).gap_fraction);
    REQUIRE(freq[2] <= 0.02);
    // non-increasing up to Monte Carlo noise on 2000 replicates
    const double slack = 2.0 * std::sqrt(0.25 / 2000.0);
    REQUIRE(freq[1] <= freq[0] + slack);
    REQUIRE(freq[2] <= freq[1] + slack);
}
