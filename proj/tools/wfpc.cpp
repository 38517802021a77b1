// wfpc: scenario-driven front end for the phase-control witness toolkit.
//
//   wfpc simulate --config configs/nogo_commuting.json --out out/sim
//   wfpc witness  --config configs/witness_chi_only.json
//   wfpc qrf      --config configs/qrf_noncommuting.json --workers 4
//   wfpc nogo     --config configs/nogo_noncommuting.json
//   wfpc report   --out out/sim
//
// Exit codes: 0 success, 1 usage or schema error, 2 numerical failure.

#include <iostream>

#include <CLI11.hpp>

#include "wfpc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Weak-field phase-control witness toolkit"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::string method;
    bool verify_grid = false;

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "propagate every mask of the phase family and write p(t)"},
        {"witness", "run the two-copy protocol and classify the state"},
        {"qrf", "compare exact and regression two-time correlators"},
        {"nogo", "check the three no-go conditions and the phase-control contrast"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config, "scenario file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_option("--workers", workers, "worker threads, 0 = available parallelism");
        sub->add_option("--method", method, "propagator")->check(CLI::IsMember({"exact", "pert2"}));
        sub->add_flag("--verify-grid", verify_grid, "also run the step-halving convergence check");
    }
    auto* report = app.add_subcommand("report", "summarise the artifacts of a finished run");
    report->add_option("--out", out_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? wfpc::kExitOk : wfpc::kExitUsage;
    }

    if (report->parsed()) {
        try {
            wfpc::cmd_report(out_dir, std::cout);
            return wfpc::kExitOk;
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return wfpc::kExitUsage;
        }
    }

    wfpc::RunOptions opts;
    auto* sub = app.get_subcommands().front();
    if (sub->count("--out")) opts.out_dir = out_dir;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--workers")) opts.workers = workers;
    if (sub->count("--method")) opts.method = method;
    opts.verify_grid = verify_grid;
    return wfpc::run_command(sub->get_name(), config, opts, std::cout, std::cerr);
}
