#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "wfpc/scenario.hpp"

namespace wfpc {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2 };

// Command-line overrides applied on top of a parsed scenario.
struct RunOptions {
    std::optional<std::filesystem::path> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> method;
    bool verify_grid = false;
};

void apply_overrides(Scenario& s, const RunOptions& opts);

// Each command writes its artifacts into s.output.dir and a short summary to
// `log`. Errors propagate as exceptions; run_command maps them to exit codes.
void cmd_simulate(const Scenario& s, std::ostream& log);
void cmd_witness(const Scenario& s, std::ostream& log);
void cmd_qrf(const Scenario& s, std::ostream& log);
void cmd_nogo(const Scenario& s, std::ostream& log);
// Summarises whatever artifacts exist in `dir`.
void cmd_report(const std::filesystem::path& dir, std::ostream& log);

nlohmann::json to_json(const PhaseControlReport& r);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const WitnessVerdict& v);

// Dispatches `command` (simulate | witness | qrf | nogo) and returns the exit code.
int run_command(std::string_view command, Scenario s, const RunOptions& opts, std::ostream& log,
                std::ostream& err);
int run_command(std::string_view command, const std::filesystem::path& config, const RunOptions& opts,
                std::ostream& log, std::ostream& err);

} // namespace wfpc
