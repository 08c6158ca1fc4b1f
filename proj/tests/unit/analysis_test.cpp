#include "tmsched/adversary.hpp"
#include "tmsched/analysis.hpp"
#include "tmsched/centralized.hpp"
#include "tmsched/errors.hpp"
#include "tmsched/trace_io.hpp"

#include <gtest/gtest.h>

namespace tmsched {
namespace {

Trace centralized_run(Rational rho, std::int64_t b, Round horizon, std::uint64_t seed, int m = 4, int k = 2)
{
    const AdversaryParams params{rho, b, AutonomyModel::queue_free};
    TokenBucketGenerator gen(params, WorkloadShape::uniform(k, 4), m, 1, seed);
    CentralizedScheduler sched;
    return run_simulation(SystemConfig{m, k, 1, horizon, seed}, sched, gen);
}

TEST(Analyze, EmptyTrace)
{
    Trace t;
    t.config = SystemConfig{2, 1, 1, 0, 0};
    const auto r = analyze(t, BoundLimits{4, 4}, 3);
    EXPECT_EQ(r.rounds, 0);
    EXPECT_EQ(r.generated, 0);
    EXPECT_TRUE(r.clean());
    EXPECT_FALSE(r.milestone_checked);
    EXPECT_FALSE(r.milestone_notice.empty());
    EXPECT_EQ(r.growth_slope, Rational(0));
}

TEST(Analyze, CountsAndLatency)
{
    const auto trace = centralized_run(Rational(1, 8), 1, 400, 2);
    const auto r = analyze(trace);
    EXPECT_EQ(r.rounds, 400);
    EXPECT_EQ(r.generated, trace.total_generated());
    std::int64_t committed = 0;
    std::int64_t max_latency = 0;
    std::int64_t latency_sum = 0;
    for (const auto& t : trace.transactions) {
        if (t.commit_round) {
            ++committed;
            max_latency = std::max(max_latency, *t.latency());
            latency_sum += *t.latency();
        }
    }
    EXPECT_EQ(r.committed, committed);
    EXPECT_EQ(r.max_latency, max_latency);
    EXPECT_NEAR(r.mean_latency, static_cast<double>(latency_sum) / static_cast<double>(committed), 1e-9);
    EXPECT_EQ(r.final_pending, trace.rounds.back().pending);
    EXPECT_TRUE(r.conservation_ok);
}

TEST(Analyze, DetectsConservationBreak)
{
    auto trace = centralized_run(Rational(1, 8), 1, 50, 3);
    trace.rounds[20].pending += 1;
    const auto r = analyze(trace);
    EXPECT_FALSE(r.conservation_ok);
    EXPECT_EQ(r.conservation_break, 21);
    EXPECT_FALSE(r.clean());
}

TEST(Analyze, BoundViolations)
{
    const auto trace = centralized_run(Rational(1), 3, 200, 4, 2, 2);
    const auto r = analyze(trace, BoundLimits{2, 1}, 0);
    EXPECT_GT(r.violation_count, 0);
    EXPECT_FALSE(r.clean());
    for (const auto& v : r.violations) {
        EXPECT_GT(v.observed, v.bound);
        EXPECT_TRUE(v.quantity == "pending" || v.quantity == "latency");
    }
    const auto none = analyze(trace, BoundLimits{}, 0);
    EXPECT_EQ(none.violation_count, 0);
}

TEST(Analyze, MilestoneWindow)
{
    // One transaction at round 1, never served before round 9.
    GenerationStream s;
    s.m = 1;
    s.rounds = {{Generation{TxType::of({0}), std::nullopt}}};
    ReplayGenerator gen(s);
    class Late final : public Scheduler {
    public:
        std::vector<TxId> on_round(Round r, std::span<const Transaction>, std::span<const Feedback>) override
        {
            return r == 9 ? std::vector<TxId>{0} : std::vector<TxId>{};
        }
    } late;
    const auto trace = run_simulation(SystemConfig{1, 1, 1, 12, 0}, late, gen);

    // Interval 0 is [1, 4]; its deadline is round 8.
    const auto tight = analyze(trace, BoundLimits{}, 4);
    EXPECT_TRUE(tight.milestone_checked);
    ASSERT_EQ(tight.milestone_failures.size(), 1U);
    EXPECT_EQ(tight.milestone_failures[0].interval, 0);
    EXPECT_EQ(tight.milestone_failures[0].uncommitted, (std::vector<TxId>{0}));

    // Deadline 10 is met.
    EXPECT_TRUE(analyze(trace, BoundLimits{}, 5).milestone_failures.empty());

    // Horizon 12 < 2 * 7: skipped with a notice.
    const auto skipped = analyze(trace, BoundLimits{}, 7);
    EXPECT_FALSE(skipped.milestone_checked);
    EXPECT_FALSE(skipped.milestone_notice.empty());
    EXPECT_TRUE(skipped.clean());
}

TEST(Analyze, UncommittedPastLatencyBound)
{
    GenerationStream s;
    s.m = 1;
    s.rounds = {{Generation{TxType::of({0}), std::nullopt}}};
    ReplayGenerator gen(s);
    class Idle final : public Scheduler {
    public:
        std::vector<TxId> on_round(Round, std::span<const Transaction>, std::span<const Feedback>) override
        {
            return {};
        }
    } idle;
    const auto trace = run_simulation(SystemConfig{1, 1, 1, 10, 0}, idle, gen);
    const auto r = analyze(trace, BoundLimits{std::nullopt, 5}, 0);
    EXPECT_GT(r.violation_count, 0);
    EXPECT_EQ(r.violations.front().quantity, "latency");
}

TEST(GrowthSlope, Values)
{
    EXPECT_EQ(trailing_growth_slope({}), Rational(0));
    EXPECT_EQ(trailing_growth_slope({5}), Rational(0));
    EXPECT_EQ(trailing_growth_slope({0, 0, 0, 0}), Rational(0));
    EXPECT_EQ(trailing_growth_slope({0, 1, 2, 3, 4, 5, 6, 7}), Rational(1));
    // Seven values: the trailing four {9, 4, 2, 0}.
    EXPECT_EQ(trailing_growth_slope({9, 9, 9, 9, 4, 2, 0}), Rational(-29, 10));
    // Trailing half of {0,0,0,0,0,1,1,2}: {0,1,1,2} has slope 3/5.
    EXPECT_EQ(trailing_growth_slope({0, 0, 0, 0, 0, 1, 1, 2}), Rational(3, 5));
}

TEST(GrowthSlope, LowerBoundRunIsUnstable)
{
    const AdversaryParams params{Rational(3, 5), 2, AutonomyModel::queue_free};
    LowerBoundGenerator gen(params, 6, 3);
    CentralizedScheduler sched;
    const auto trace = run_simulation(SystemConfig{6, 3, 1, 2000, 0}, sched, gen);
    const auto r = analyze(trace);
    EXPECT_GT(r.growth_slope, Rational(0));
    EXPECT_TRUE(r.unstable);
    EXPECT_FALSE(analyze(centralized_run(Rational(1, 8), 1, 2000, 1)).unstable);
}

TEST(CompareTraces, EqualAndDivergent)
{
    const auto a = centralized_run(Rational(1, 4), 2, 300, 7);
    EXPECT_FALSE(compare_traces(a, centralized_run(Rational(1, 4), 2, 300, 7)).has_value());

    auto b = centralized_run(Rational(1, 4), 2, 300, 8);
    b.config.seed = 7;
    const auto first = compare_traces(a, b);
    ASSERT_TRUE(first.has_value());
    for (Round r = 1; r < *first; ++r) {
        EXPECT_EQ(round_json(a, static_cast<std::size_t>(r - 1)), round_json(b, static_cast<std::size_t>(r - 1)));
    }

    ReplayGenerator replay(generations_of(a));
    CentralizedScheduler sched;
    EXPECT_FALSE(compare_traces(a, run_simulation(a.config, sched, replay)).has_value());

    EXPECT_THROW(compare_traces(a, centralized_run(Rational(1, 4), 2, 300, 8)), InvalidInput);
}

TEST(CompareTraces, LengthDifference)
{
    auto a = centralized_run(Rational(1, 4), 2, 30, 7);
    auto b = a;
    b.rounds.pop_back();
    EXPECT_EQ(compare_traces(a, b), 30);
}

TEST(Report, Formats)
{
    const auto trace = centralized_run(Rational(1, 8), 1, 100, 5);
    const auto r = analyze(trace, centralized_bounds(4, 2, 1));
    EXPECT_EQ(r.interval_len, 8);
    const auto text = format_report(r);
    EXPECT_NE(text.find("max pending"), std::string::npos);
    const auto json = report_json(r);
    EXPECT_EQ(json, report_json(analyze(trace, centralized_bounds(4, 2, 1))));
    EXPECT_NE(json.find("\"conservation_ok\": true"), std::string::npos);
}

}  // namespace
}  // namespace tmsched
