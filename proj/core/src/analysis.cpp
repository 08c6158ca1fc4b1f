#include "tmsched/analysis.hpp"

#include "tmsched/errors.hpp"
#include "tmsched/trace_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace tmsched {

namespace {

void record(StabilityReport& report, BoundViolation v)
{
    ++report.violation_count;
    if (report.violations.size() < StabilityReport::kMaxListed) {
        report.violations.push_back(std::move(v));
    }
}

bool fits_int64(WideInt x)
{
    return x >= std::numeric_limits<std::int64_t>::min() && x <= std::numeric_limits<std::int64_t>::max();
}

WideInt wide_gcd(WideInt a, WideInt b)
{
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        const WideInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

void check_milestones(const Trace& trace, std::int64_t len, StabilityReport& report)
{
    const auto horizon = static_cast<std::int64_t>(trace.rounds.size());
    if (len <= 0) {
        report.milestone_notice = "milestone check disabled";
        return;
    }
    if (horizon < 2 * len) {
        report.milestone_notice = "trace shorter than two intervals of " + std::to_string(len) +
                                  " rounds; milestone check skipped";
        return;
    }
    report.milestone_checked = true;
    // Interval j covers rounds [j*len + 1, (j+1)*len]; only intervals whose
    // successor fits in the trace can be judged.
    const std::int64_t judged = horizon / len - 1;
    std::vector<MilestoneFailure> failures(static_cast<std::size_t>(judged));
    for (const auto& t : trace.transactions) {
        const std::int64_t j = (t.gen_round - 1) / len;
        if (j >= judged) {
            continue;
        }
        const Round deadline = (j + 2) * len;
        if (!t.commit_round || *t.commit_round > deadline) {
            failures[static_cast<std::size_t>(j)].uncommitted.push_back(t.id);
        }
    }
    for (std::int64_t j = 0; j < judged; ++j) {
        auto& f = failures[static_cast<std::size_t>(j)];
        if (!f.uncommitted.empty()) {
            f.interval = j;
            report.milestone_failures.push_back(std::move(f));
        }
    }
}

}  // namespace

Rational trailing_growth_slope(const std::vector<std::int64_t>& values)
{
    const std::size_t total = values.size();
    const std::size_t start = total / 2;
    const auto count = static_cast<WideInt>(total - start);
    if (count < 2) {
        return Rational(0);
    }
    WideInt sx = 0;
    WideInt sy = 0;
    WideInt sxx = 0;
    WideInt sxy = 0;
    for (std::size_t i = start; i < total; ++i) {
        const auto x = static_cast<WideInt>(i - start);
        const auto y = static_cast<WideInt>(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    WideInt num = count * sxy - sx * sy;
    WideInt den = count * sxx - sx * sx;
    const WideInt g = wide_gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    while (!fits_int64(num) || !fits_int64(den)) {
        num /= 2;
        den /= 2;
    }
    if (den == 0) {
        return Rational(0);
    }
    return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

StabilityReport analyze(const Trace& trace, const BoundLimits& limits, std::int64_t interval_len)
{
    if (interval_len < 0) {
        throw InvalidInput("interval length must be non-negative");
    }
    StabilityReport report;
    report.rounds = static_cast<std::int64_t>(trace.rounds.size());
    report.interval_len = interval_len;

    std::vector<std::int64_t> pending;
    pending.reserve(trace.rounds.size());
    std::int64_t generated = 0;
    std::int64_t committed = 0;
    for (const auto& r : trace.rounds) {
        generated += static_cast<std::int64_t>(r.generated.size());
        committed += static_cast<std::int64_t>(r.outcome.committed.size());
        report.aborts += static_cast<std::int64_t>(r.outcome.aborted.size());
        if (generated - committed != r.pending && report.conservation_ok) {
            report.conservation_ok = false;
            report.conservation_break = r.round;
        }
        report.max_pending = std::max(report.max_pending, r.pending);
        if (limits.pending_bound && r.pending > *limits.pending_bound) {
            record(report, BoundViolation{r.round, "pending", r.pending, *limits.pending_bound});
        }
        pending.push_back(r.pending);
    }
    report.generated = generated;
    report.committed = committed;
    report.final_pending = pending.empty() ? 0 : pending.back();

    std::int64_t latency_sum = 0;
    std::int64_t latency_count = 0;
    std::vector<BoundViolation> latency_violations;
    for (const auto& t : trace.transactions) {
        if (const auto lat = t.latency()) {
            if (*lat < 1) {
                report.latencies_positive = false;
            }
            report.max_latency = std::max(report.max_latency, *lat);
            latency_sum += *lat;
            ++latency_count;
            if (limits.latency_bound && *lat > *limits.latency_bound) {
                latency_violations.push_back(BoundViolation{*t.commit_round, "latency", *lat, *limits.latency_bound});
            }
        } else if (limits.latency_bound && report.rounds - t.gen_round > *limits.latency_bound) {
            // Still pending past its deadline: the bound already failed.
            latency_violations.push_back(BoundViolation{t.gen_round + *limits.latency_bound + 1, "latency",
                                                        report.rounds - t.gen_round, *limits.latency_bound});
        }
    }
    std::stable_sort(latency_violations.begin(), latency_violations.end(),
                     [](const BoundViolation& a, const BoundViolation& b) { return a.round < b.round; });
    for (auto& v : latency_violations) {
        record(report, std::move(v));
    }
    if (latency_count > 0) {
        report.mean_latency = static_cast<double>(latency_sum) / static_cast<double>(latency_count);
    }

    check_milestones(trace, interval_len, report);

    report.growth_slope = trailing_growth_slope(pending);
    if (!pending.empty()) {
        const auto half = pending.size() / 2;
        const auto early_peak = half == 0 ? 0 : *std::max_element(pending.begin(), pending.begin() + half);
        const auto span = static_cast<std::int64_t>(pending.size() - half);
        report.unstable = report.growth_slope > 0 && report.final_pending > early_peak &&
                          report.growth_slope * span * 2 >= Rational(early_peak);
    }
    return report;
}

StabilityReport analyze(const Trace& trace, const CentralizedBounds& bounds)
{
    return analyze(trace, BoundLimits{bounds.pending_bound, bounds.latency_bound}, bounds.milestone_len);
}

StabilityReport analyze(const Trace& trace, const DistributedBounds& bounds)
{
    return analyze(trace, BoundLimits{bounds.pending_bound, bounds.latency_bound}, bounds.interval_len);
}

StabilityReport analyze(const Trace& trace)
{
    return analyze(trace, BoundLimits{}, 0);
}

std::optional<Round> compare_traces(const Trace& a, const Trace& b)
{
    if (a.config != b.config || a.model != b.model) {
        throw InvalidInput("traces have different configurations");
    }
    const std::size_t common = std::min(a.rounds.size(), b.rounds.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (round_json(a, i) != round_json(b, i)) {
            return a.rounds[i].round;
        }
    }
    if (a.rounds.size() != b.rounds.size()) {
        return static_cast<Round>(common + 1);
    }
    return std::nullopt;
}

std::string format_report(const StabilityReport& r)
{
    std::ostringstream out;
    const auto row = [&](const std::string& key, const std::string& value) {
        out << key << std::string(key.size() < 22 ? 22 - key.size() : 1, ' ') << value << '\n';
    };
    char mean[32];
    std::snprintf(mean, sizeof mean, "%.3f", r.mean_latency);
    row("rounds", std::to_string(r.rounds));
    row("generated", std::to_string(r.generated));
    row("committed", std::to_string(r.committed));
    row("aborts", std::to_string(r.aborts));
    row("max pending", std::to_string(r.max_pending));
    row("final pending", std::to_string(r.final_pending));
    row("max latency", std::to_string(r.max_latency));
    row("mean latency", mean);
    char slope[48];
    std::snprintf(slope, sizeof slope, "%.6f", to_double(r.growth_slope));
    row("growth slope", slope);
    row("unstable", r.unstable ? "yes" : "no");
    row("conservation", r.conservation_ok ? "ok" : "broken at round " + std::to_string(*r.conservation_break));
    row("bound violations", std::to_string(r.violation_count));
    if (r.milestone_checked) {
        row("milestone failures", std::to_string(r.milestone_failures.size()) + " (interval " +
                                      std::to_string(r.interval_len) + ")");
    } else {
        row("milestones", r.milestone_notice);
    }
    for (const auto& v : r.violations) {
        out << "  round " << v.round << ": " << v.quantity << ' ' << v.observed << " > " << v.bound << '\n';
    }
    for (const auto& f : r.milestone_failures) {
        out << "  interval " << f.interval << ": " << f.uncommitted.size() << " transactions late\n";
    }
    return out.str();
}

std::string report_json(const StabilityReport& r)
{
    using nlohmann::ordered_json;
    ordered_json violations = ordered_json::array();
    for (const auto& v : r.violations) {
        violations.push_back(
            ordered_json{{"round", v.round}, {"quantity", v.quantity}, {"observed", v.observed}, {"bound", v.bound}});
    }
    ordered_json milestones = ordered_json::array();
    for (const auto& f : r.milestone_failures) {
        milestones.push_back(ordered_json{{"interval", f.interval}, {"uncommitted", f.uncommitted}});
    }
    ordered_json doc{{"rounds", r.rounds},
                     {"generated", r.generated},
                     {"committed", r.committed},
                     {"aborts", r.aborts},
                     {"max_pending", r.max_pending},
                     {"final_pending", r.final_pending},
                     {"max_latency", r.max_latency},
                     {"mean_latency", r.mean_latency},
                     {"growth_slope", to_string(r.growth_slope)},
                     {"unstable", r.unstable},
                     {"conservation_ok", r.conservation_ok},
                     {"latencies_positive", r.latencies_positive},
                     {"violation_count", r.violation_count},
                     {"violations", std::move(violations)},
                     {"interval_len", r.interval_len},
                     {"milestone_checked", r.milestone_checked},
                     {"milestone_notice", r.milestone_notice},
                     {"milestone_failures", std::move(milestones)}};
    return doc.dump(2) + "\n";
}

}  // namespace tmsched
