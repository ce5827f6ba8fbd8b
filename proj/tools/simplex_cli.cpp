#include <iostream>

#include <CLI11.hpp>

#include "simplex/runner.hpp"

int main(int argc, char** argv) {
    using namespace simplex;

    CLI::App app{"Realizable diffusions on the unit simplex: audit, simulate, compare, sweep"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CliOptions options;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path, "Run configuration (JSON)")->required();
        sub->add_option("--outdir", options.outdir, "Output directory");
        sub->add_option("--seed", seed, "Override the configured seed");
        sub->add_flag("--skip-audit", options.skip_audit, "Run even if the boundary audit fails");
        sub->add_option("--threads", options.threads, "Worker threads (results do not depend on it)")
            ->check(CLI::Range(1u, 1024u));
    };
    auto* check = app.add_subcommand("check", "Audit the boundary conditions of the configured process");
    auto* simulate = app.add_subcommand("simulate", "Simulate the ensemble and write moments.csv");
    auto* compare = app.add_subcommand("compare", "Cross-validate moment rates and stationary moments");
    auto* sweep = app.add_subcommand("sweep", "Run compare over a parameter grid");
    for (auto* sub : {check, simulate, compare, sweep}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    for (auto* sub : {check, simulate, compare, sweep})
        if (sub->count("--seed")) options.seed = seed;

    if (*check) return cmd_check(options, std::cout, std::cerr);
    if (*simulate) return cmd_simulate(options, std::cout, std::cerr);
    if (*compare) return cmd_compare(options, std::cout, std::cerr);
    return cmd_sweep(options, std::cout, std::cerr);
}
