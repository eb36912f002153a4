// Command-line front end: run a scenario, the regression suite, or a sweep.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <omp.h>
#include <spdlog/spdlog.h>

#include "osqm/regression.hpp"
#include "osqm/scenario.hpp"

namespace {

void apply_thread_env() {
    if (const char* s = std::getenv("OSQM_THREADS")) {
        const int n = std::atoi(s);
        if (n < 1) throw osqm::ValidationError(fmt::format("OSQM_THREADS must be a positive integer, got '{}'", s));
        omp_set_num_threads(n);
    }
}

int report(const std::vector<osqm::CriterionResult>& rs) {
    int failed = 0;
    for (const auto& r : rs) {
        std::cout << osqm::format_result(r) << "\n";
        failed += !r.passed;
    }
    return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space simulator of open quantum systems with classical coarse-graining"};
    app.set_version_flag("--version", osqm::kVersion);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario config");
    std::string config;
    osqm::RunOverrides ov;
    std::uint64_t seed = 0;
    std::string out_dir, backend;
    int snapshots = 0;
    run->add_option("config", config, "Scenario JSON file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Base seed");
    auto* out_opt = run->add_option("--out-dir", out_dir, "Output directory");
    auto* snap_opt = run->add_option("--snapshots", snapshots, "Snapshot stride in steps");
    auto* be_opt = run->add_option("--backend", backend, "oracle or phase");

    auto* regress = app.add_subcommand("regress", "Run the acceptance criteria");
    std::string regress_dir = "regress";
    std::vector<int> only;
    bool twice = false;
    regress->add_option("--out-dir", regress_dir, "Output directory");
    regress->add_option("--only", only, "Criterion ids to run (1..11)");
    regress->add_flag("--twice", twice, "Run twice and compare outputs byte for byte (criterion 12)");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
    std::string what, sweep_dir = "sweep";
    sweep->add_option("what", what, "defect or zeno")->required()->check(CLI::IsMember({"defect", "zeno"}));
    sweep->add_option("--out-dir", sweep_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);
    spdlog::set_level(spdlog::level::warn);

    try {
        apply_thread_env();
        if (*run) {
            if (*seed_opt) ov.seed = seed;
            if (*out_opt) ov.out_dir = out_dir;
            if (*snap_opt) ov.snapshots = snapshots;
            if (*be_opt) ov.backend = backend;
            auto cfg = osqm::apply_overrides(osqm::parse_config(config), ov);
            auto meta = osqm::run_scenario(cfg);
            std::cout << meta["summary"].get<std::string>();
            std::cout << "outputs in " << cfg.output.dir << "\n";
            return 0;
        }
        if (*regress) {
            osqm::RegressionOptions opt;
            opt.out_dir = regress_dir;
            opt.only = only;
            return report(twice ? osqm::run_acceptance(opt) : osqm::run_regression_suite(opt));
        }
        osqm::RegressionOptions opt;
        opt.out_dir = sweep_dir;
        opt.only = {what == "defect" ? 6 : 9};
        int rc = report(osqm::run_regression_suite(opt));
        std::cout << "outputs in " << sweep_dir << "\n";
        return rc;
    } catch (const osqm::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const osqm::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    }
}
