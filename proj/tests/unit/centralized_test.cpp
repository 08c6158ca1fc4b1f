#include "oracles.hpp"

#include "tmsched/adversary.hpp"
#include "tmsched/analysis.hpp"
#include "tmsched/centralized.hpp"
#include "tmsched/combinatorics.hpp"
#include "tmsched/errors.hpp"

#include <gtest/gtest.h>

#include <tuple>

namespace tmsched {
namespace {

Transaction tx(TxId id, const char* bits, Round gen)
{
    return Transaction{id, TxType::parse(bits), gen, std::nullopt, std::nullopt};
}

TEST(ExecuteSet, GreedyScan)
{
    const std::vector<Transaction> pending{tx(0, "1100", 1), tx(1, "0110", 1), tx(2, "0011", 2), tx(3, "1000", 2)};
    const auto sel = select_execute_set(pending);
    ASSERT_EQ(sel.execute.size(), 2U);
    EXPECT_EQ(sel.execute[0].id, 0);
    EXPECT_EQ(sel.execute[1].id, 2);
    ASSERT_EQ(sel.remaining.size(), 2U);
    EXPECT_EQ(sel.remaining[0].id, 1);
    EXPECT_EQ(sel.remaining[1].id, 3);
}

TEST(ExecuteSet, MaximalOnRandomLists)
{
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const int m = static_cast<int>(rng.between(1, 8));
        std::vector<Transaction> pending;
        const auto count = rng.between(0, 25);
        for (TxId i = 0; i < count; ++i) {
            std::uint64_t mask = 0;
            while (mask == 0) {
                mask = rng.below(std::uint64_t{1} << m);
            }
            pending.push_back(Transaction{i, TxType::from_mask(mask), 1, std::nullopt, std::nullopt});
        }
        const auto sel = select_execute_set(pending);
        EXPECT_EQ(sel.execute.size() + sel.remaining.size(), pending.size());
        EXPECT_TRUE(oracle::conflict_free_and_maximal(sel.execute, sel.remaining));
        // The head of the list is always served.
        if (!pending.empty()) {
            EXPECT_EQ(sel.execute.front().id, pending.front().id);
        }
    }
}

TEST(ExecuteSet, PairwiseCollidingTypesServeOnlyTheHead)
{
    const auto family = build_set_family(3);
    std::vector<Transaction> pending;
    for (const auto& set : family.sets) {
        std::uint64_t mask = 0;
        for (int e : set) {
            mask |= std::uint64_t{1} << (e - 1);
        }
        pending.push_back(Transaction{static_cast<TxId>(pending.size()), TxType::from_mask(mask), 1, std::nullopt,
                                      std::nullopt});
    }
    const auto sel = select_execute_set(pending);
    ASSERT_EQ(sel.execute.size(), 1U);
    EXPECT_EQ(sel.execute[0].id, 0);
    EXPECT_TRUE(select_execute_set({}).execute.empty());
}

TEST(CentralizedBounds, Substitution)
{
    const auto b = centralized_bounds(4, 2, 1);
    EXPECT_EQ(b.rho_max, Rational(1, 8));
    EXPECT_EQ(b.pending_bound, 16);
    EXPECT_EQ(b.latency_bound, 16);
    EXPECT_EQ(b.milestone_len, 8);
    // min{k, ceil(sqrt m)} picks the square root when k is large.
    const auto c = centralized_bounds(10, 9, 2);
    EXPECT_EQ(c.rho_max, Rational(1, 16));
    EXPECT_EQ(c.latency_bound, 64);
    const auto d = centralized_bounds(1, 1, 1);
    EXPECT_EQ(std::make_tuple(d.rho_max, d.pending_bound, d.latency_bound, d.milestone_len),
              std::make_tuple(Rational(1, 4), 4, 8, 4));
    const auto e = centralized_bounds(9, 5, 2);
    EXPECT_EQ(std::make_tuple(e.rho_max, e.pending_bound, e.latency_bound, e.milestone_len),
              std::make_tuple(Rational(1, 12), 72, 48, 24));
    EXPECT_THROW(centralized_bounds(3, 4, 1), InvalidInput);
}

TEST(CeilSqrt, Values)
{
    EXPECT_EQ(ceil_sqrt(0), 0);
    EXPECT_EQ(ceil_sqrt(1), 1);
    EXPECT_EQ(ceil_sqrt(4), 2);
    EXPECT_EQ(ceil_sqrt(5), 3);
    EXPECT_EQ(ceil_sqrt(64), 8);
    EXPECT_EQ(ceil_sqrt(65), 9);
}

TEST(CentralizedScheduler, NeverAborts)
{
    const AdversaryParams params{Rational(1, 2), 3, AutonomyModel::queue_free};
    TokenBucketGenerator gen(params, WorkloadShape::uniform(3, 6), 5, 1, 8);
    CentralizedScheduler sched;
    const auto trace = run_simulation(SystemConfig{5, 3, 1, 2000, 8}, sched, gen);
    const auto report = analyze(trace);
    EXPECT_EQ(report.aborts, 0);
    EXPECT_TRUE(report.conservation_ok);
    EXPECT_TRUE(report.latencies_positive);
}

TEST(CentralizedScheduler, StaysWithinBoundsAtRhoMax)
{
    const int m = 9;
    const int k = 3;
    const std::int64_t b = 2;
    const auto bounds = centralized_bounds(m, k, b);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const AdversaryParams params{bounds.rho_max, b, AutonomyModel::queue_free};
        TokenBucketGenerator gen(params, WorkloadShape::uniform(k, 10), m, 1, seed);
        CentralizedScheduler sched;
        const auto trace = run_simulation(SystemConfig{m, k, 1, 20000, seed}, sched, gen);
        const auto report = analyze(trace, bounds);
        EXPECT_TRUE(report.clean()) << format_report(report);
    }
}

TEST(CentralizedScheduler, ServesOldestFirst)
{
    // Both transactions use o0; the older one must commit first.
    GenerationStream s;
    s.m = 1;
    s.rounds = {{Generation{TxType::of({0}), std::nullopt}}, {Generation{TxType::of({0}), std::nullopt}}};
    ReplayGenerator gen(s);
    CentralizedScheduler sched;
    const auto trace = run_simulation(SystemConfig{1, 1, 1, 5, 0}, sched, gen);
    EXPECT_EQ(trace.transactions[0].commit_round, 2);
    EXPECT_EQ(trace.transactions[1].commit_round, 3);
}

}  // namespace
}  // namespace tmsched
