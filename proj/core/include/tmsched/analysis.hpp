#pragma once

#include "tmsched/centralized.hpp"
#include "tmsched/distributed.hpp"
#include "tmsched/engine.hpp"
#include "tmsched/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmsched {

/// Limits to check a trace against; an absent limit is not checked.
struct BoundLimits {
    std::optional<std::int64_t> pending_bound;
    std::optional<std::int64_t> latency_bound;
};

struct BoundViolation {
    Round round = 0;
    std::string quantity;  // "pending" or "latency"
    std::int64_t observed = 0;
    std::int64_t bound = 0;

    bool operator==(const BoundViolation&) const = default;
};

/// Transactions generated in interval j still uncommitted at the end of j+1.
struct MilestoneFailure {
    std::int64_t interval = 0;  // 0-based
    std::vector<TxId> uncommitted;

    bool operator==(const MilestoneFailure&) const = default;
};

struct StabilityReport {
    static constexpr std::size_t kMaxListed = 1000;

    std::int64_t rounds = 0;
    std::int64_t generated = 0;
    std::int64_t committed = 0;
    std::int64_t aborts = 0;
    std::int64_t max_pending = 0;
    std::int64_t final_pending = 0;
    std::int64_t max_latency = 0;
    double mean_latency = 0.0;

    /// At most kMaxListed are kept; violation_count has the full total.
    std::vector<BoundViolation> violations;
    std::int64_t violation_count = 0;

    std::int64_t interval_len = 0;
    bool milestone_checked = false;
    std::string milestone_notice;
    std::vector<MilestoneFailure> milestone_failures;

    /// Least-squares slope of pending over the trailing half of the rounds.
    Rational growth_slope{0};
    /// Positive slope, final pending above the peak of the first half, and a
    /// trend over the trailing half worth at least half that peak.
    bool unstable = false;

    /// generated - committed equals the recorded pending at every round.
    bool conservation_ok = true;
    std::optional<Round> conservation_break;
    /// Every committed transaction has latency >= 1.
    bool latencies_positive = true;

    bool clean() const
    {
        return violation_count == 0 && milestone_failures.empty() && conservation_ok && latencies_positive;
    }
};

/// interval_len = 0 disables the milestone check. Traces shorter than two
/// intervals skip it with a notice.
StabilityReport analyze(const Trace& trace, const BoundLimits& limits, std::int64_t interval_len);
StabilityReport analyze(const Trace& trace, const CentralizedBounds& bounds);
StabilityReport analyze(const Trace& trace, const DistributedBounds& bounds);
/// Statistics only, no bounds or milestones.
StabilityReport analyze(const Trace& trace);

/// Least-squares slope of values[i] against i over the trailing half.
Rational trailing_growth_slope(const std::vector<std::int64_t>& values);

/// Empty when the serialized rounds agree byte for byte, otherwise the first
/// round that differs (or the first round present in only one of them).
/// Throws InvalidInput when the configurations differ.
std::optional<Round> compare_traces(const Trace& a, const Trace& b);

/// Aligned two-column table for terminals.
std::string format_report(const StabilityReport& report);
/// Deterministic JSON document.
std::string report_json(const StabilityReport& report);

}  // namespace tmsched
