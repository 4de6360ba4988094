// pbgq: atom/defect-mode flight-plan simulator.
//
//   pbgq simulate  --config plan.json
//   pbgq sweep     --config configs/optical_sweep.json --out u2.csv
//   pbgq calibrate --config configs/optical_calibrate.json --jobs 8
//   pbgq gate      --config configs/cnot_ideal.json
//   pbgq budget    [--config configs/budget.json] --format json

#include <iostream>

#include "CLI11.hpp"

#include "pbgq/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Two-level atom passing through photonic band-gap defect modes"};
    app.set_version_flag("--version", "pbgq 0.1.0");

    std::string subcommand, format, out_path;
    pbgq::cli::RunConfig cfg;
    std::uint64_t seed = 0;

    app.add_option("subcommand", subcommand, "simulate | sweep | calibrate | gate | budget")
        ->required()
        ->check(CLI::IsMember({"simulate", "sweep", "calibrate", "gate", "budget"}));
    app.add_option("--config", cfg.config_path, "JSON configuration document");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "csv | text | json")->check(CLI::IsMember({"csv", "text", "json"}));
    auto* seed_opt = app.add_option("--seed", seed, "global seed for measurements (default 0)");
    app.add_option("--jobs", cfg.jobs, "worker threads for sweep and calibrate")->check(CLI::PositiveNumber);
    app.add_flag("--lenient", cfg.lenient, "warn about unknown keys instead of failing");

    CLI11_PARSE(app, argc, argv);

    cfg.subcommand = *pbgq::cli::parse_subcommand(subcommand);
    if (!format.empty())
        cfg.format = pbgq::cli::parse_format(format);
    if (!out_path.empty())
        cfg.out_path = out_path;
    if (*seed_opt)
        cfg.seed = seed;
    return pbgq::cli::run(cfg, std::cout, std::cerr);
}
