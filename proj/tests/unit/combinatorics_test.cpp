#include "oracles.hpp"

#include "tmsched/combinatorics.hpp"
#include "tmsched/errors.hpp"

#include <gtest/gtest.h>

namespace tmsched {
namespace {

TEST(SetFamily, SmallCaseByHand)
{
    const auto f = build_set_family(3);
    const std::vector<std::vector<int>> expected{{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 5, 6}};
    EXPECT_EQ(f.sets, expected);
    EXPECT_TRUE(verify_set_family(f).ok);
    EXPECT_EQ(build_set_family(2).sets, (std::vector<std::vector<int>>{{1, 2}, {1, 3}, {2, 3}}));
}

TEST(SetFamily, Degenerate)
{
    const auto f = build_set_family(1);
    const std::vector<std::vector<int>> expected{{1}, {1}};
    EXPECT_EQ(f.sets, expected);
    EXPECT_TRUE(verify_set_family(f).ok);
    EXPECT_THROW(build_set_family(0), InvalidInput);
}

TEST(SetFamily, AgreesWithIndependentCheck)
{
    for (int n = 1; n <= 30; ++n) {
        const auto f = build_set_family(n);
        EXPECT_TRUE(verify_set_family(f).ok) << "n=" << n << ": " << verify_set_family(f).violation;
        EXPECT_TRUE(oracle::set_family_ok(n, f.sets)) << "n=" << n;
    }
}

TEST(SetFamily, VerifierCatchesBrokenFamilies)
{
    auto f = build_set_family(4);
    f.sets[1][0] = f.sets[1][1];
    EXPECT_FALSE(verify_set_family(f).ok);

    f = build_set_family(4);
    f.sets.pop_back();
    EXPECT_FALSE(verify_set_family(f).ok);

    f = build_set_family(4);
    f.sets[2].back() = 99;
    EXPECT_FALSE(verify_set_family(f).ok);
    EXPECT_FALSE(verify_set_family(f).violation.empty());

    // Two sets sharing two elements.
    SetFamily g{2, {{1, 2}, {1, 2}, {3, 3}}};
    EXPECT_FALSE(verify_set_family(g).ok);
}

TEST(ConflictGraph, Basics)
{
    ConflictGraph g(4);
    g.add_edge(0, 1);
    g.add_edge(1, 0);
    g.add_edge(1, 2);
    EXPECT_EQ(g.edge_count(), 2U);
    EXPECT_TRUE(g.adjacent(2, 1));
    EXPECT_FALSE(g.adjacent(0, 2));
    EXPECT_EQ(g.degree(1), 2);
    EXPECT_EQ(g.max_degree(), 2);
    EXPECT_THROW(g.add_edge(3, 3), InvalidInput);
    EXPECT_THROW(g.add_edge(0, 4), InvalidInput);
    const std::vector<int> tri{0, 1};
    EXPECT_TRUE(g.is_clique(tri));
    const std::vector<int> path{0, 1, 2};
    EXPECT_FALSE(g.is_clique(path));
    const std::vector<int> comps{0, 0, 0, 3};
    EXPECT_EQ(g.components(), comps);
}

TEST(Coloring, Triangle)
{
    ConflictGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(0, 2);
    const std::vector<int> order{0, 1, 2};
    const auto a = primary_greedy_coloring(g, order);
    const auto b = alternative_greedy_coloring(g, order);
    EXPECT_EQ(a.max_color(), 3);
    EXPECT_EQ(a.color, b.color);
    EXPECT_TRUE(a.is_proper(g));
    const std::vector<int> cls{1};
    EXPECT_EQ(a.color_class(2), cls);
}

TEST(Coloring, OrderMustBePermutation)
{
    ConflictGraph g(3);
    const std::vector<int> dup{0, 0, 1};
    const std::vector<int> short_order{0, 1};
    EXPECT_THROW(primary_greedy_coloring(g, dup), InvalidInput);
    EXPECT_THROW(alternative_greedy_coloring(g, short_order), InvalidInput);
}

TEST(Coloring, MatchesFirstFitOracle)
{
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(rng.between(0, 30));
        const auto og = oracle::random_graph(rng, n, 1, static_cast<std::uint64_t>(rng.between(2, 10)));
        const auto g = oracle::to_conflict_graph(og);
        const auto order = oracle::shuffled_order(rng, n);
        const auto expected = oracle::first_fit(og, order);
        const auto a = primary_greedy_coloring(g, order);
        const auto b = alternative_greedy_coloring(g, order);
        EXPECT_EQ(a.color, expected);
        EXPECT_EQ(b.color, expected);
        EXPECT_LE(a.max_color(), oracle::max_degree(og) + 1);
    }
}

TEST(ConflictGraph, FromTransactions)
{
    const std::vector<Transaction> txs{
        {0, TxType::of({0}), 2, std::nullopt, std::nullopt},
        {1, TxType::of({0, 1}), 1, std::nullopt, std::nullopt},
        {2, TxType::of({2}), 1, std::nullopt, std::nullopt},
    };
    const auto g = build_transaction_conflict_graph(txs);
    EXPECT_EQ(g.label(0), "T0");
    EXPECT_TRUE(g.adjacent(0, 1));
    EXPECT_FALSE(g.adjacent(1, 2));
    const std::vector<int> order{1, 2, 0};
    EXPECT_EQ(arrival_order(txs), order);
}

TEST(ConflictGraph, Blocks)
{
    const std::vector<Block> blocks{
        {ProcessorId{1}, TxType::of({0})},
        {ProcessorId{0}, TxType::of({1})},
        {ProcessorId{0}, TxType::of({2})},
        {ProcessorId{2}, TxType::of({3})},
    };
    const auto g = build_block_conflict_graph(blocks);
    EXPECT_TRUE(g.adjacent(1, 2));  // same owner
    EXPECT_FALSE(g.adjacent(0, 1));
    EXPECT_FALSE(g.adjacent(0, 3));
    const std::vector<int> order{2, 1, 0, 3};  // owner, then bitstring ("0010" < "0100")
    EXPECT_EQ(owner_order(blocks, 4), order);
}

}  // namespace
}  // namespace tmsched
