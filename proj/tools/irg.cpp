// Command-line front end: sampling, analysis, kernel functionals, analytic
// bounds, partition machinery and seeded Monte Carlo experiments.

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "irg/io.hpp"

namespace {

using irg::json;

irg::SpaceSpec space_or_default(const std::optional<std::string>& space_arg,
                                const irg::KernelSpec& kernel) {
    if (space_arg) return irg::parse_space(*space_arg);
    return irg::natural_space(kernel);
}

std::function<bool(const irg::Point&)> parse_region(const std::string& text) {
    // grammar: x<THRESHOLD on continuous coordinates
    if (text.rfind("x<", 0) != 0)
        throw irg::input_error("region must have the form x<THRESHOLD");
    const double t = irg::detail::field_as_double(text.substr(2));
    return [t](const irg::Point& p) { return !p.discrete() && p.coord < t; };
}

json functionals_to_json(const irg::KernelFunctionals& f) {
    json j{{"lambda_star", f.lambda_star}};
    if (std::isfinite(f.lambda2_sup))
        j["lambda2_sup"] = f.lambda2_sup;
    else
        j["lambda2_sup"] = "infinity";
    j["method"] = f.method == irg::FunctionalMethod::closed_form ? "closed_form"
                                                                 : "grid_quadrature";
    return j;
}

void print_master_seed(std::uint64_t seed) {
    std::fprintf(stderr, "master seed: %" PRIu64 "\n", seed);
}

int run(int argc, char** argv) {
    CLI::App app{"intermediate-density inhomogeneous random graphs G(n, K)"};
    app.require_subcommand(1);

    // --- sample ---------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "sample a graph and write an edge list");
    std::string sample_kernel, sample_out, sample_mode = "auto";
    std::optional<std::string> sample_space;
    int sample_n = 0;
    std::uint64_t sample_seed = 0;
    sample->add_option("--kernel", sample_kernel, "kernel spec (JSON or shorthand)")->required();
    sample->add_option("--space", sample_space, "space spec (defaults to the kernel's)");
    sample->add_option("--n", sample_n, "vertex count")->required();
    sample->add_option("--seed", sample_seed, "64-bit seed")->required();
    sample->add_option("--out", sample_out, "output edge-list file")->required();
    sample->add_option("--mode", sample_mode, "naive | accelerated | auto");

    // --- analyze --------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "component summary of an edge-list file");
    std::string analyze_file;
    std::optional<std::string> analyze_region;
    analyze->add_option("file", analyze_file, "edge-list file")->required();
    analyze->add_option("--region", analyze_region, "isolation region, e.g. x<0.5");

    // --- kernel-info ----------------------------------------------------
    auto* info = app.add_subcommand("kernel-info", "kernel functionals and L2 verdict");
    std::string info_kernel;
    std::optional<std::string> info_space;
    std::optional<int> info_grid;
    info->add_option("--kernel", info_kernel, "kernel spec")->required();
    info->add_option("--space", info_space, "space spec (defaults to the kernel's)");
    info->add_option("--grid", info_grid, "also report a grid-quadrature estimate");

    // --- bounds ---------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "evaluate an analytic bound formula");
    std::string bounds_formula;
    std::optional<std::string> bounds_kernel, bounds_space;
    std::optional<int> bounds_n, bounds_k;
    std::optional<double> bounds_lambda_star, bounds_lambda2_sup, bounds_t, bounds_threshold;
    bounds->add_option("--formula", bounds_formula, "small-k | large-k | delta | isolated-lb | rate")
        ->required();
    bounds->add_option("--n", bounds_n, "graph size");
    bounds->add_option("--k", bounds_k, "cut size");
    bounds->add_option("--lambda-star", bounds_lambda_star, "isolation parameter");
    bounds->add_option("--lambda2-sup", bounds_lambda2_sup, "sup of lambda2");
    bounds->add_option("--t", bounds_t, "argument of the rate function");
    bounds->add_option("--kernel", bounds_kernel, "kernel (functionals derived if not given)");
    bounds->add_option("--space", bounds_space, "space spec");
    bounds->add_option("--threshold", bounds_threshold, "intensity threshold for isolated-lb");

    // --- partition ------------------------------------------------------
    auto* partition = app.add_subcommand("partition", "partition graph H_m or probe");
    std::string partition_kernel;
    std::optional<std::string> partition_space;
    int partition_m = 0;
    bool partition_probe = false;
    partition->add_option("--kernel", partition_kernel, "kernel spec")->required();
    partition->add_option("--space", partition_space, "space spec (defaults to the kernel's)");
    partition->add_option("--m", partition_m, "partition level (probe: maximum level)")->required();
    partition->add_flag("--probe", partition_probe, "run the irreducibility probe to level m");

    // --- sweep ----------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "run a Monte Carlo sweep plan");
    std::string sweep_plan, sweep_out;
    std::optional<std::string> sweep_svg, sweep_summary, sweep_mode;
    std::optional<int> sweep_workers, sweep_replicates;
    std::optional<std::uint64_t> sweep_seed;
    std::optional<double> sweep_budget;
    sweep->add_option("--plan", sweep_plan, "plan JSON file")->required();
    sweep->add_option("--out", sweep_out, "output CSV file")->required();
    sweep->add_option("--svg", sweep_svg, "optional SVG chart file");
    sweep->add_option("--summary", sweep_summary, "optional summary JSON file");
    sweep->add_option("--workers", sweep_workers, "worker threads (plan override)");
    sweep->add_option("--replicates", sweep_replicates, "replicates (plan override)");
    sweep->add_option("--seed", sweep_seed, "master seed (plan override)");
    sweep->add_option("--mode", sweep_mode, "sampling mode (plan override)");
    sweep->add_option("--budget", sweep_budget, "resource budget (plan override)");

    // --- counterexample -------------------------------------------------
    auto* cx = app.add_subcommand("counterexample", "unbounded-kernel isolation experiment");
    double cx_c = 4.0;
    int cx_n = 0, cx_reps = 0, cx_workers = 1;
    std::uint64_t cx_seed = 0;
    cx->add_option("--c", cx_c, "kernel scale (lambda* = c/2)")->required();
    cx->add_option("--n", cx_n, "vertex count")->required();
    cx->add_option("--reps", cx_reps, "replicates")->required();
    cx->add_option("--seed", cx_seed, "master seed")->required();
    cx->add_option("--workers", cx_workers, "worker threads");

    // --- window ---------------------------------------------------------
    auto* window = app.add_subcommand("window", "connectivity window at lambda* = 1");
    int window_n = 0, window_reps = 0, window_workers = 1;
    std::uint64_t window_seed = 0;
    window->add_option("--n", window_n, "vertex count (<= 400)")->required();
    window->add_option("--reps", window_reps, "replicates")->required();
    window->add_option("--seed", window_seed, "master seed")->required();
    window->add_option("--workers", window_workers, "worker threads");

    // --- oracle ---------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "exact connectivity oracles");
    auto* gilbert = oracle->add_subcommand("gilbert", "homogeneous recursion oracle");
    int gilbert_n = 0;
    double gilbert_p = 0.0;
    gilbert->add_option("--n", gilbert_n, "graph size (<= 400)")->required();
    gilbert->add_option("--p", gilbert_p, "edge probability")->required();
    auto* finite = oracle->add_subcommand("finite", "finite-space brute-force oracle");
    std::string finite_kernel;
    std::optional<std::string> finite_space;
    int finite_n = 0;
    finite->add_option("--kernel", finite_kernel, "kernel spec")->required();
    finite->add_option("--space", finite_space, "space spec (defaults to the kernel's)");
    finite->add_option("--n", finite_n, "graph size (<= 6)")->required();
    oracle->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "irg-error: " << e.what() << "\n";
        return 1;
    }

    if (*sample) {
        const irg::KernelSpec kernel = irg::parse_kernel(sample_kernel);
        const irg::SpaceSpec space = space_or_default(sample_space, kernel);
        print_master_seed(sample_seed);
        const auto g = irg::sample_graph(space, kernel, sample_n, sample_seed,
                                         irg::mode_from_string(sample_mode));
        if (g.fell_back_to_naive)
            std::fprintf(stderr,
                         "warning: kernel has no finite supremum; accelerated mode fell back "
                         "to naive\n");
        irg::write_edge_list(g, sample_out);
        std::cout << json{{"out", sample_out},
                          {"n", g.n},
                          {"edges", g.edges.size()},
                          {"seed", g.seed},
                          {"mode", irg::mode_to_string(g.mode_used)}}
                         .dump(2)
                  << "\n";
        return 0;
    }

    if (*analyze) {
        const auto g = irg::read_edge_list_file(analyze_file);
        auto summary = irg::connected_components(g);
        if (analyze_region)
            summary.isolated_in_region = irg::isolated_in_region(g, parse_region(*analyze_region));
        std::cout << irg::component_summary_to_json(summary).dump(2) << "\n";
        return 0;
    }

    if (*info) {
        const irg::KernelSpec kernel = irg::parse_kernel(info_kernel);
        const irg::SpaceSpec space = space_or_default(info_space, kernel);
        const auto f = irg::isolation_parameter(kernel, space);
        const auto l2 = irg::is_L2(kernel, space);
        json out{{"kernel", irg::kernel_to_json(kernel)},
                 {"space", irg::space_to_json(space)}};
        out.update(functionals_to_json(f));
        out["l2"] = l2.is_l2;
        if (!l2.diagnostic.empty()) out["l2_diagnostic"] = l2.diagnostic;
        if (info_grid)
            out["grid_estimate"] =
                functionals_to_json(irg::isolation_parameter_grid(kernel, space, *info_grid));
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (*bounds) {
        json inputs = json::object();
        double value = 0.0;
        auto functionals = [&]() -> std::pair<double, double> {
            if (bounds_lambda_star && bounds_lambda2_sup)
                return {*bounds_lambda_star, *bounds_lambda2_sup};
            if (bounds_kernel) {
                const auto kernel = irg::parse_kernel(*bounds_kernel);
                const auto space = space_or_default(bounds_space, kernel);
                const auto f = irg::isolation_parameter(kernel, space);
                return {bounds_lambda_star.value_or(f.lambda_star),
                        bounds_lambda2_sup.value_or(f.lambda2_sup)};
            }
            throw irg::input_error("give --lambda-star/--lambda2-sup or --kernel");
        };
        if (bounds_formula == "small-k" || bounds_formula == "large-k") {
            if (!bounds_n || !bounds_k) throw irg::input_error("cut bounds need --n and --k");
            const auto [ls, l2s] = functionals();
            const auto in = irg::make_bound_inputs(*bounds_n, *bounds_k, ls, l2s);
            value = bounds_formula == "small-k" ? irg::cut_bound_small_k(in)
                                                : irg::cut_bound_large_k(in);
            inputs = {{"n", in.n}, {"k", in.k}, {"lambda_star", in.lambda_star},
                      {"lambda2_sup", in.lambda2_sup}, {"p_n", in.p_n}};
        } else if (bounds_formula == "delta") {
            const auto [ls, l2s] = functionals();
            value = irg::min_component_fraction(ls, l2s);
            inputs = {{"lambda_star", ls}, {"lambda2_sup", l2s}};
        } else if (bounds_formula == "rate") {
            if (!bounds_t) throw irg::input_error("rate needs --t");
            value = irg::chernoff_rate(*bounds_t);
            inputs = {{"t", *bounds_t}};
        } else if (bounds_formula == "isolated-lb") {
            if (!bounds_kernel || !bounds_n || !bounds_threshold)
                throw irg::input_error("isolated-lb needs --kernel, --n and --threshold");
            const auto kernel = irg::parse_kernel(*bounds_kernel);
            const auto space = space_or_default(bounds_space, kernel);
            const auto lb =
                irg::isolated_expectation_lower_bound(kernel, space, *bounds_n, *bounds_threshold);
            value = lb.value;
            inputs = {{"kernel", irg::kernel_to_json(kernel)},
                      {"n", *bounds_n},
                      {"threshold", *bounds_threshold},
                      {"region_empty", lb.region_empty}};
        } else {
            throw irg::input_error("unknown bound formula: " + bounds_formula);
        }
        std::cout << json{{"formula", bounds_formula}, {"inputs", inputs}, {"value", value}}.dump(2)
                  << "\n";
        return 0;
    }

    if (*partition) {
        const irg::KernelSpec kernel = irg::parse_kernel(partition_kernel);
        const irg::SpaceSpec space = space_or_default(partition_space, kernel);
        if (partition_probe) {
            const auto rep = irg::irreducibility_probe(kernel, space, partition_m);
            std::cout << irg::probe_report_to_json(rep).dump(2) << "\n";
        } else {
            const auto part = irg::build_partition(space, partition_m);
            const auto pg = irg::build_partition_graph(kernel, part);
            std::cout << irg::partition_graph_to_json(pg).dump(2) << "\n";
        }
        return 0;
    }

    if (*sweep) {
        std::ifstream plan_file(sweep_plan);
        if (!plan_file) throw irg::input_error("cannot open plan file: " + sweep_plan);
        auto plan = irg::plan_from_json(json::parse(plan_file));
        if (sweep_workers) plan.workers = *sweep_workers;
        if (sweep_replicates) plan.replicates = *sweep_replicates;
        if (sweep_seed) plan.master_seed = *sweep_seed;
        if (sweep_mode) plan.mode = irg::mode_from_string(*sweep_mode);
        if (sweep_budget) plan.budget = *sweep_budget;
        print_master_seed(plan.master_seed);
        const auto result = irg::run_plan(plan);
        irg::write_text_file(sweep_out, irg::sweep_csv(result));
        if (sweep_svg) irg::write_text_file(*sweep_svg, irg::sweep_svg(result));
        const json summary = irg::sweep_summary_to_json(result);
        if (sweep_summary) irg::write_text_file(*sweep_summary, summary.dump(2) + "\n");
        std::cout << summary.dump(2) << "\n";
        return 0;
    }

    if (*cx) {
        print_master_seed(cx_seed);
        const auto rep = irg::counterexample_experiment(cx_c, cx_n, cx_reps, cx_seed, cx_workers);
        std::cout << json{{"c", rep.c},
                          {"n", rep.n},
                          {"replicates", rep.replicates},
                          {"master_seed", rep.seed},
                          {"lambda_star", rep.lambda_star},
                          {"disconnected_fraction", rep.disconnected_fraction},
                          {"event_fraction", rep.event_fraction},
                          {"event_count", rep.event_count},
                          {"implication_rate", rep.implication_rate},
                          {"predicted_event_probability", rep.predicted_event_probability},
                          {"limit_reference", rep.limit_reference}}
                         .dump(2)
                  << "\n";
        return 0;
    }

    if (*window) {
        print_master_seed(window_seed);
        const auto rep = irg::window_experiment(window_n, window_reps, window_seed, window_workers);
        json hist = json::object();
        for (const auto& [k, count] : rep.isolated_hist) hist[std::to_string(k)] = count;
        std::cout << json{{"n", rep.n},
                          {"replicates", rep.replicates},
                          {"master_seed", rep.seed},
                          {"empirical_connected", rep.empirical_connected},
                          {"exact_connected", rep.exact_connected},
                          {"limit_reference", rep.limit_reference},
                          {"gap_to_limit", rep.gap_to_limit},
                          {"isolated_mean", rep.isolated_mean},
                          {"isolated_variance", rep.isolated_variance},
                          {"expected_isolated_mean", rep.expected_isolated_mean},
                          {"isolated_hist", hist}}
                         .dump(2)
                  << "\n";
        return 0;
    }

    if (*gilbert) {
        std::printf("%.17g\n", irg::gilbert_connectivity_exact(gilbert_n, gilbert_p));
        return 0;
    }
    if (*finite) {
        const irg::KernelSpec kernel = irg::parse_kernel(finite_kernel);
        const irg::SpaceSpec space = space_or_default(finite_space, kernel);
        std::printf("%.17g\n", irg::exact_connectivity_finite(space, kernel, finite_n));
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const irg::resource_error& e) {
        std::cerr << "irg-error: " << e.what() << "\n";
        return 2;
    } catch (const irg::input_error& e) {
        std::cerr << "irg-error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "irg-error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "irg-error: " << e.what() << "\n";
        return 1;
    }
}
