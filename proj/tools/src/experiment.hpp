#pragma once

#include "tmsched/adversary.hpp"
#include "tmsched/analysis.hpp"
#include "tmsched/engine.hpp"
#include "tmsched/errors.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tmsched::cli {

enum class SchedulerKind { centralized, distributed };
enum class AdversaryKind { token_bucket, lower_bound, replay };

std::string_view to_string(SchedulerKind kind);
std::string_view to_string(AdversaryKind kind);
using tmsched::to_string;

/// One simulation run as described by a config file.
///
/// Config dialect: one `key = value` per line, `#` starts a comment, blank
/// lines are ignored, keys may appear at most once. Keys:
///
///   scheduler         centralized | distributed
///   adversary         token-bucket | lower-bound | replay
///   m k n horizon seed
///   rho               p/q, integer or decimal
///   b                 burstiness, integer >= 1
///   model             qf | qb (default: qf centralized, qb distributed)
///   shape             uniform | cycle
///   shape.max_weight  uniform: heaviest type drawn (default k)
///   shape.attempts    uniform: candidates per round (default 1)
///   shape.types       cycle: comma-separated bitstrings
///   phase3_fallback   true | false
///   replay            generation stream path (adversary = replay)
///   out               output directory
struct ExperimentConfig {
    SystemConfig system;
    SchedulerKind scheduler = SchedulerKind::centralized;
    AdversaryKind adversary = AdversaryKind::token_bucket;
    AdversaryParams params;
    WorkloadShape shape;
    bool phase3_fallback = false;
    std::string replay;
    std::string out;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Config error anchored at a line of the source ("name:line: message").
class ConfigError : public InvalidInput {
public:
    ConfigError(const std::string& source, std::size_t line, const std::string& message);

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Throws ConfigError on syntax errors, unknown or repeated keys, bad
/// values and cross-field inconsistencies.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);

struct RunResult {
    Trace trace;
    StabilityReport report;
    /// Whether the parameters fall in a range where the scheduler's bounds
    /// are claimed; violations only count then.
    bool bounds_claimed = false;
    std::string claim;
};

/// Builds the generator and scheduler, runs the simulation and analyzes it.
RunResult run_experiment(const ExperimentConfig& config);

/// trace.csv, trace.json, generations.json, report.txt and report.json
/// under dir.
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

}  // namespace tmsched::cli
