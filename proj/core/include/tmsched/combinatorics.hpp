#pragma once

#include "tmsched/model.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tmsched {

/// n+1 sets over [1, n(n+1)/2] in which every pair of sets meets in exactly
/// one element and every element lies in exactly two sets.
struct SetFamily {
    int n = 0;
    std::vector<std::vector<int>> sets;  // each sorted ascending
};

struct FamilyReport {
    bool ok = true;
    std::string violation;  // first violated property, empty when ok
};

/// Recursive construction: A_1 = [1, n]; A_{l+1} takes, for every earlier set,
/// its first element not shared with another earlier set, then the n-l
/// smallest integers not used so far. Throws InvalidInput if n < 1.
SetFamily build_set_family(int n);

/// Exhaustive check of size, pairwise intersection, element multiplicity and
/// coverage. Violations are reported, never thrown.
FamilyReport verify_set_family(const SetFamily& family);

/// Simple undirected graph over vertices 0..size-1 with optional labels.
///
/// Keeps a sorted neighbour list per vertex for the coloring scans and a
/// dense adjacency matrix for O(1) edge tests.
class ConflictGraph {
public:
    explicit ConflictGraph(std::vector<std::string> labels);
    explicit ConflictGraph(int vertex_count);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }

    /// Self-loops and out-of-range vertices throw InvalidInput; repeated edges
    /// are ignored.
    void add_edge(int u, int v);
    bool adjacent(int u, int v) const;
    std::span<const int> neighbors(int v) const;
    int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
    int max_degree() const;
    std::size_t edge_count() const { return edge_count_; }
    std::vector<std::pair<int, int>> edges() const;

    bool is_clique(std::span<const int> vertices) const;
    /// Component index per vertex, numbered by smallest member.
    std::vector<int> components() const;

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<std::uint8_t> matrix_;
    std::size_t edge_count_ = 0;
};

/// Colors are positive integers indexed by vertex.
struct Coloring {
    std::vector<int> color;

    int max_color() const;
    bool is_proper(const ConflictGraph& g) const;
    /// Vertices holding color c, ascending.
    std::vector<int> color_class(int c) const;
};

/// Each vertex in order gets the least color absent among its colored
/// neighbours. Throws InvalidInput if order is not a permutation.
Coloring primary_greedy_coloring(const ConflictGraph& g, std::span<const int> order);

/// Repeatedly peels a greedy maximal independent set off the surviving
/// vertices (scanned in order) and gives it the next color.
Coloring alternative_greedy_coloring(const ConflictGraph& g, std::span<const int> order);

/// Vertex per transaction in the given sequence; edge iff the types collide.
ConflictGraph build_transaction_conflict_graph(std::span<const Transaction> txs);

/// Positions of txs sorted by (gen_round, id).
std::vector<int> arrival_order(std::span<const Transaction> txs);

struct Block {
    ProcessorId owner;
    TxType ttype;
};

/// Vertex per block; edge iff same processor or colliding types.
ConflictGraph build_block_conflict_graph(std::span<const Block> blocks);

/// Positions of blocks sorted by owner, then by type bitstring.
std::vector<int> owner_order(std::span<const Block> blocks, int m);

}  // namespace tmsched
