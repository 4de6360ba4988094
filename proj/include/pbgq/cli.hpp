#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace pbgq::cli {

enum class Subcommand { simulate, sweep, calibrate, gate, budget };
enum class OutputFormat { csv, text, json };

std::optional<Subcommand> parse_subcommand(const std::string& name);
std::optional<OutputFormat> parse_format(const std::string& name);

struct RunConfig
{
    Subcommand subcommand = Subcommand::simulate;
    std::string config_path;                 ///< may be empty for budget only
    std::optional<std::string> out_path;     ///< overrides output.path; stdout if neither
    std::optional<OutputFormat> format;      ///< overrides output.format
    std::optional<std::uint64_t> seed;       ///< overrides the plan seed (default 0)
    int jobs = 1;
    bool lenient = false;
};

/// Exit codes of run().
enum ExitCode : int {
    ok = 0,
    failure = 1,       ///< I/O or unexpected error
    config_error = 2,  ///< schema or validation error, message names the field
    numeric_error = 3, ///< integration, regime or measurement failure
};

/// Executes one subcommand. Artifacts go to the output path or `out`,
/// diagnostics and warnings to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace pbgq::cli
