#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace tmsched::cli;

    CLI::App app{"tmsched: transaction scheduling simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    app.add_option("--seed", seed, "Override the seed of every config");
    app.add_option("--out", out_dir, "Output directory");

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run experiments from config files");
    run_cmd->add_option("configs", run.configs, "Config files")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--jobs,-j", run.jobs, "Configs run in parallel")->check(CLI::PositiveNumber);

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "Check a generation stream for (rho, b) admissibility");
    verify_cmd->add_option("stream", verify.stream, "Generation stream file")->required();
    verify_cmd->add_option("--rho", verify.rho, "Rate as p/q")->required();
    verify_cmd->add_option("--b", verify.b, "Burstiness")->required();
    verify_cmd->add_option("--model", verify.model, "qf or qb");

    int family_n = 1;
    auto* family_cmd = app.add_subcommand("setfamily", "Print the pairwise-intersecting set family");
    family_cmd->add_option("n", family_n, "Family parameter")->required();

    ColorOptions color;
    auto* color_cmd = app.add_subcommand("color", "Greedy-color a graph file");
    color_cmd->add_option("graph", color.graph, "Graph file")->required();
    color_cmd->add_option("--variant", color.variant, "primary or alternative");
    color_cmd->add_option("--order", color.order, "Comma-separated vertex order");

    BoundsOptions bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate scheduler bounds");
    bounds_cmd->add_option("scheduler", bounds.scheduler, "centralized or distributed")->required();
    bounds_cmd->add_option("--m", bounds.m, "Objects")->required();
    bounds_cmd->add_option("--k", bounds.k, "Maximum type weight")->required();
    bounds_cmd->add_option("--b", bounds.b, "Burstiness")->required();
    bounds_cmd->add_option("--n", bounds.n, "Processors");
    bounds_cmd->add_option("--rho", bounds.rho, "Rate as p/q");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    if (*run_cmd) {
        run.seed = seed;
        run.out = out_dir;
        return cmd_run(run, std::cout, std::cerr);
    }
    if (*verify_cmd) {
        return cmd_verify(verify, std::cout, std::cerr);
    }
    if (*family_cmd) {
        return cmd_setfamily(family_n, std::cout, std::cerr);
    }
    if (*color_cmd) {
        return cmd_color(color, std::cout, std::cerr);
    }
    return cmd_bounds(bounds, std::cout, std::cerr);
}
