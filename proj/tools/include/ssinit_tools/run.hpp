#pragma once

#include <exception>
#include <optional>
#include <string>

#include "ssinit_tools/config.hpp"

namespace ssinit::cli {

inline constexpr const char* report_schema = "ssinit-report/1";
inline constexpr const char* tool_version = "0.1.0";

enum ExitCode : int {
    Success = 0,
    ConfigFailure = 1,
    StructuralFailure = 2,
    ConvergenceFailureCode = 3,
    VerificationFailure = 4,
    WarmStartFailure = 5,
};

/// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e) noexcept;

struct RunOptions {
    /// Snapshot taken from a previous report's solution table.
    std::optional<Snapshot> warm_start;
    bool direct = false;
    bool timings = false;
};

struct RunResult {
    int exit_code = Success;
    std::string message;
    /// Empty unless the run got past continuation.
    nlohmann::json report;
};

/// Applies --load to the configured load-following outputs.
void apply_load(RunConfig& config, double load);

/// Assemble, analyze, continue from lambda = 0 to 1, verify and check conservation.
RunResult run(const RunConfig& config, const RunOptions& options);

/// Variable name to value map of a report's solution table.
Snapshot snapshot_from_report(const nlohmann::json& report);

/// name,value,unit lines of the report's solution table.
std::string solution_csv(const nlohmann::json& report);

/// One-paragraph human summary of a report.
std::string summary(const nlohmann::json& report);

}  // namespace ssinit::cli
