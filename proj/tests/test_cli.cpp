#include <catch2/catch_amalgamated.hpp>

#include "irg/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace irg;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const std::string out_path = "cli_stdout.tmp";
    const std::string err_path = "cli_stderr.tmp";
    const std::string cmd =
        std::string(IRG_CLI_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(status);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

}  // namespace

TEST_CASE("oracle gilbert prints the exact probability") {
    auto r = run_cli("oracle gilbert --n 2 --p 0.5");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.out == "0.5\n");
}

TEST_CASE("oracle finite agrees with the library") {
    auto r = run_cli("oracle finite --kernel block:matrix=[[2]] --n 5");
    REQUIRE(r.exit_code == 0);
    REQUIRE(std::stod(r.out) ==
            Catch::Approx(exact_connectivity_finite(SpaceSpec::finite({1.0}),
                                                    KernelSpec::block({{2.0}}), 5))
                .epsilon(1e-14));
}

TEST_CASE("kernel-info reports functionals and the L2 verdict") {
    auto r = run_cli("kernel-info --kernel constant:c=2");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    REQUIRE(j.at("lambda_star").get<double>() == 2.0);
    REQUIRE(j.at("lambda2_sup").get<double>() == 2.0);
    REQUIRE(j.at("l2").get<bool>());

    auto cx = run_cli("kernel-info --kernel counterexample:c=2");
    REQUIRE(cx.exit_code == 0);
    auto jcx = json::parse(cx.out);
    REQUIRE(jcx.at("lambda_star").get<double>() == 1.0);
    REQUIRE(jcx.at("lambda2_sup").get<std::string>() == "infinity");
    REQUIRE_FALSE(jcx.at("l2").get<bool>());
    REQUIRE(jcx.at("l2_diagnostic").get<std::string>() == "lambda2 not in L1");
}

TEST_CASE("usage errors exit with code 1 and a machine-parsable prefix") {
    auto bad_flag = run_cli("kernel-info --kernel constant:c=2 --bogus 3");
    REQUIRE(bad_flag.exit_code == 1);
    REQUIRE(bad_flag.err.rfind("irg-error:", 0) == 0);

    auto bad_kernel = run_cli("kernel-info --kernel wave:c=2");
    REQUIRE(bad_kernel.exit_code == 1);
    REQUIRE(bad_kernel.err.rfind("irg-error:", 0) == 0);

    auto no_sub = run_cli("");
    REQUIRE(no_sub.exit_code == 1);
}

TEST_CASE("resource refusals exit with code 2") {
    const std::string plan_path = "plan_refuse.tmp.json";
    {
        ExperimentPlan plan;
        plan.space = SpaceSpec::interval();
        plan.base_kernel = KernelSpec::constant(1.0);
        plan.scale_grid = {1.0};
        plan.n_grid = {100};
        plan.replicates = 100;
        plan.master_seed = 1;
        std::ofstream(plan_path) << plan_to_json(plan).dump();
    }
    auto r = run_cli("sweep --plan " + plan_path + " --out out_refuse.tmp.csv --budget 10");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.err.find("irg-error:") != std::string::npos);
    std::remove(plan_path.c_str());
}

TEST_CASE("sample prints its master seed and analyze round-trips") {
    auto s = run_cli("sample --kernel constant:c=2 --n 40 --seed 4242 --out cli_graph.tmp");
    REQUIRE(s.exit_code == 0);
    REQUIRE(s.err.find("master seed: 4242") != std::string::npos);

    auto a = run_cli("analyze cli_graph.tmp");
    REQUIRE(a.exit_code == 0);
    auto j = json::parse(a.out);
    const auto g = sample_graph(SpaceSpec::interval(), KernelSpec::constant(2.0), 40, 4242);
    const auto expect = connected_components(g);
    REQUIRE(j.at("n").get<int>() == 40);
    REQUIRE(j.at("connected").get<bool>() == expect.is_connected);
    REQUIRE(j.at("isolated").get<int>() == expect.isolated_total);
    std::remove("cli_graph.tmp");
}

TEST_CASE("accelerated sampling of an unbounded kernel warns about the fallback") {
    auto r = run_cli(
        "sample --kernel counterexample:c=4 --n 50 --seed 3 --out cli_fb.tmp --mode accelerated");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.err.find("fell back") != std::string::npos);
    REQUIRE(json::parse(r.out).at("mode").get<std::string>() == "naive");
    std::remove("cli_fb.tmp");
}

TEST_CASE("analyze honors the region flag") {
    run_cli("sample --kernel constant:c=0 --n 10 --seed 7 --out cli_region.tmp");
    auto a = run_cli("analyze cli_region.tmp --region 'x<0.5'");
    REQUIRE(a.exit_code == 0);
    auto j = json::parse(a.out);
    const auto g = sample_graph(SpaceSpec::interval(), KernelSpec::constant(0.0), 10, 7);
    const int expect =
        isolated_in_region(g, [](const Point& p) { return p.coord < 0.5; });
    REQUIRE(j.at("isolated_in_region").get<int>() == expect);
    std::remove("cli_region.tmp");
}

TEST_CASE("sample/analyze round-trip matches the in-process pipeline") {
    Rng cfg(10101);
    const char* kernels[3] = {"constant:c=1.5", "torusband:c=3,r=0.2",
                              "block:matrix=[[3,1],[1,3]]"};
    for (int trial = 0; trial < 100; ++trial) {
        const int pick = trial % 3;
        SpaceSpec space = pick == 0   ? SpaceSpec::interval()
                          : pick == 1 ? SpaceSpec::torus()
                                      : SpaceSpec::finite({0.5, 0.5});
        const KernelSpec kernel = parse_kernel(kernels[pick]);
        const int n = 2 + static_cast<int>(cfg.next_double() * 40);
        const std::uint64_t seed = cfg.next_u64();
        std::ostringstream cmd;
        cmd << "sample --kernel " << kernels[pick] << " --n " << n << " --seed " << seed
            << " --out cli_rt.tmp";
        auto s = run_cli(cmd.str());
        REQUIRE(s.exit_code == 0);
        auto a = run_cli("analyze cli_rt.tmp");
        REQUIRE(a.exit_code == 0);
        auto j = json::parse(a.out);
        const auto expect = connected_components(sample_graph(space, kernel, n, seed));
        REQUIRE(j.at("connected").get<bool>() == expect.is_connected);
        REQUIRE(j.at("isolated").get<int>() == expect.isolated_total);
        REQUIRE(j.at("sizes").get<std::vector<int>>() == expect.component_sizes);
    }
    std::remove("cli_rt.tmp");
}

TEST_CASE("bounds subcommand emits formula, inputs and value") {
    auto r = run_cli("bounds --formula delta --lambda-star 1 --lambda2-sup 1");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    REQUIRE(j.at("formula").get<std::string>() == "delta");
    REQUIRE(j.at("value").get<double>() == Catch::Approx(0.004954442394962046).margin(1e-10));

    auto rate = run_cli("bounds --formula rate --t 2");
    REQUIRE(json::parse(rate.out).at("value").get<double>() ==
            Catch::Approx(0.3862943611198906));

    auto small = run_cli("bounds --formula small-k --n 1000 --k 1 --kernel constant:c=1");
    auto js = json::parse(small.out);
    REQUIRE(js.at("value").get<double>() == Catch::Approx(0.0010069872192816494).epsilon(1e-12));
    REQUIRE(js.at("inputs").at("lambda_star").get<double>() == 1.0);

    auto lb = run_cli("bounds --formula isolated-lb --kernel constant:c=0.5 --n 100 --threshold 1");
    REQUIRE(json::parse(lb.out).at("value").get<double>() ==
            Catch::Approx(9.963780760477606).epsilon(1e-9));
}

TEST_CASE("partition subcommand emits the spec JSON shape") {
    auto r = run_cli("partition --kernel torusband:c=4,r=0.25 --m 4");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    REQUIRE(j.at("m").get<int>() == 4);
    REQUIRE(j.at("cells").size() == 16);
    REQUIRE(j.at("main_component").at("measure").get<double>() == Catch::Approx(1.0));
    REQUIRE(j.at("cells")[0].contains("lo"));
    REQUIRE(j.at("cells")[0].contains("hi"));
    REQUIRE(j.at("cells")[0].contains("measure"));

    auto probe = run_cli("partition --kernel block:matrix=[[1,0],[0,1]] --m 5 --probe");
    REQUIRE(probe.exit_code == 0);
    REQUIRE(json::parse(probe.out).at("verdict").get<std::string>() == "reducible-evidence");
}

TEST_CASE("sweep writes CSV, summary and SVG") {
    const std::string plan_path = "plan_ok.tmp.json";
    {
        ExperimentPlan plan;
        plan.space = SpaceSpec::interval();
        plan.base_kernel = KernelSpec::constant(1.0);
        plan.scale_grid = {0.5, 2.0};
        plan.n_grid = {30};
        plan.replicates = 20;
        plan.master_seed = 99;
        std::ofstream(plan_path) << plan_to_json(plan).dump();
    }
    auto r = run_cli("sweep --plan " + plan_path +
                     " --out sweep.tmp.csv --svg sweep.tmp.svg --workers 2");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.err.find("master seed: 99") != std::string::npos);
    const std::string csv = slurp("sweep.tmp.csv");
    REQUIRE(csv.rfind("c,n,rep,seed,connected,isolated,min_comp,max_comp\n", 0) == 0);
    const std::string svg = slurp("sweep.tmp.svg");
    REQUIRE(svg.find("<svg") != std::string::npos);
    auto summary = json::parse(r.out);
    REQUIRE(summary.at("master_seed").get<std::uint64_t>() == 99);
    REQUIRE(summary.at("cells").size() == 2);

    // master seed override changes the records
    auto r2 = run_cli("sweep --plan " + plan_path + " --out sweep2.tmp.csv --seed 100");
    REQUIRE(r2.exit_code == 0);
    REQUIRE(r2.err.find("master seed: 100") != std::string::npos);
    REQUIRE(slurp("sweep2.tmp.csv") != csv);

    // worker count never changes the bytes
    auto r3 = run_cli("sweep --plan " + plan_path + " --out sweep3.tmp.csv --workers 1");
    REQUIRE(r3.exit_code == 0);
    REQUIRE(slurp("sweep3.tmp.csv") == csv);
    std::remove(plan_path.c_str());
    std::remove("sweep.tmp.csv");
    std::remove("sweep.tmp.svg");
    std::remove("sweep2.tmp.csv");
    std::remove("sweep3.tmp.csv");
}

TEST_CASE("window and counterexample subcommands run end to end") {
    auto w = run_cli("window --n 50 --reps 200 --seed 31337");
    REQUIRE(w.exit_code == 0);
    auto jw = json::parse(w.out);
    REQUIRE(jw.at("exact_connected").get<double>() ==
            Catch::Approx(gilbert_connectivity_exact(50, std::log(50.0) / 50.0)));
    REQUIRE(w.err.find("master seed: 31337") != std::string::npos);

    auto c = run_cli("counterexample --c 4 --n 150 --reps 300 --seed 5 --workers 2");
    REQUIRE(c.exit_code == 0);
    auto jc = json::parse(c.out);
    REQUIRE(jc.at("lambda_star").get<double>() == 2.0);
    REQUIRE(jc.at("implication_rate").get<double>() == 1.0);
}
