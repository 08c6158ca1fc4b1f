#include "tmsched/combinatorics.hpp"

#include "tmsched/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace tmsched {

SetFamily build_set_family(int n)
{
    if (n < 1) {
        throw InvalidInput("set family needs n >= 1, got " + std::to_string(n));
    }
    const int universe = n * (n + 1) / 2;
    // owners[x] counts how many of the sets built so far contain x.
    std::vector<int> owners(static_cast<std::size_t>(universe) + 2, 0);
    SetFamily family{n, {}};
    family.sets.reserve(static_cast<std::size_t>(n) + 1);

    int next_unused = 1;
    for (int ell = 0; ell <= n; ++ell) {
        std::vector<int> fresh;
        fresh.reserve(static_cast<std::size_t>(n));
        for (const auto& earlier : family.sets) {
            const auto it = std::find_if(earlier.begin(), earlier.end(),
                                         [&](int x) { return owners[static_cast<std::size_t>(x)] == 1; });
            if (it == earlier.end()) {
                throw std::logic_error("set family construction ran out of private elements");
            }
            fresh.push_back(*it);
        }
        while (static_cast<int>(fresh.size()) < n) {
            fresh.push_back(next_unused++);
        }
        for (int x : fresh) {
            ++owners[static_cast<std::size_t>(x)];
        }
        std::sort(fresh.begin(), fresh.end());
        family.sets.push_back(std::move(fresh));
    }
    return family;
}

FamilyReport verify_set_family(const SetFamily& family)
{
    const int n = family.n;
    auto fail = [](std::string why) { return FamilyReport{false, std::move(why)}; };

    if (n < 1) {
        return fail("n must be positive");
    }
    if (family.sets.size() != static_cast<std::size_t>(n) + 1) {
        return fail("expected " + std::to_string(n + 1) + " sets, found " + std::to_string(family.sets.size()));
    }
    const int universe = n * (n + 1) / 2;

    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        const std::set<int> distinct(family.sets[i].begin(), family.sets[i].end());
        if (distinct.size() != family.sets[i].size() || static_cast<int>(distinct.size()) != n) {
            return fail("set A" + std::to_string(i + 1) + " does not have exactly " + std::to_string(n) +
                        " distinct elements");
        }
        for (int x : distinct) {
            if (x < 1 || x > universe) {
                return fail("set A" + std::to_string(i + 1) + " has element " + std::to_string(x) + " outside [1, " +
                            std::to_string(universe) + "]");
            }
        }
    }

    for (std::size_t i = 0; i < family.sets.size(); ++i) {
        for (std::size_t j = i + 1; j < family.sets.size(); ++j) {
            int shared = 0;
            for (int x : family.sets[i]) {
                shared += static_cast<int>(std::count(family.sets[j].begin(), family.sets[j].end(), x));
            }
            if (shared != 1) {
                return fail("sets A" + std::to_string(i + 1) + " and A" + std::to_string(j + 1) + " share " +
                            std::to_string(shared) + " elements");
            }
        }
    }

    for (int x = 1; x <= universe; ++x) {
        int holders = 0;
        for (const auto& s : family.sets) {
            holders += static_cast<int>(std::count(s.begin(), s.end(), x));
        }
        if (holders == 0) {
            return fail("element " + std::to_string(x) + " is not covered");
        }
        if (holders != 2) {
            return fail("element " + std::to_string(x) + " lies in " + std::to_string(holders) + " sets");
        }
    }
    return {};
}

ConflictGraph::ConflictGraph(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      adjacency_(labels_.size()),
      matrix_(labels_.size() * labels_.size(), 0)
{
}

ConflictGraph::ConflictGraph(int vertex_count)
    : ConflictGraph([vertex_count] {
          if (vertex_count < 0) {
              throw InvalidInput("negative vertex count");
          }
          std::vector<std::string> labels;
          labels.reserve(static_cast<std::size_t>(vertex_count));
          for (int v = 0; v < vertex_count; ++v) {
              labels.push_back(std::to_string(v));
          }
          return labels;
      }())
{
}

void ConflictGraph::add_edge(int u, int v)
{
    if (u < 0 || v < 0 || u >= size() || v >= size()) {
        throw InvalidInput("edge endpoint out of range");
    }
    if (u == v) {
        throw InvalidInput("self-loop on vertex " + label(u));
    }
    auto& cell = matrix_[static_cast<std::size_t>(u) * labels_.size() + static_cast<std::size_t>(v)];
    if (cell != 0) {
        return;
    }
    cell = 1;
    matrix_[static_cast<std::size_t>(v) * labels_.size() + static_cast<std::size_t>(u)] = 1;
    auto insert_sorted = [](std::vector<int>& list, int x) {
        list.insert(std::upper_bound(list.begin(), list.end(), x), x);
    };
    insert_sorted(adjacency_[static_cast<std::size_t>(u)], v);
    insert_sorted(adjacency_[static_cast<std::size_t>(v)], u);
    ++edge_count_;
}

bool ConflictGraph::adjacent(int u, int v) const
{
    return matrix_[static_cast<std::size_t>(u) * labels_.size() + static_cast<std::size_t>(v)] != 0;
}

std::span<const int> ConflictGraph::neighbors(int v) const
{
    return adjacency_.at(static_cast<std::size_t>(v));
}

int ConflictGraph::max_degree() const
{
    int best = 0;
    for (const auto& list : adjacency_) {
        best = std::max(best, static_cast<int>(list.size()));
    }
    return best;
}

std::vector<std::pair<int, int>> ConflictGraph::edges() const
{
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int u = 0; u < size(); ++u) {
        for (int v : neighbors(u)) {
            if (u < v) {
                out.emplace_back(u, v);
            }
        }
    }
    return out;
}

bool ConflictGraph::is_clique(std::span<const int> vertices) const
{
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            if (!adjacent(vertices[i], vertices[j])) {
                return false;
            }
        }
    }
    return true;
}

std::vector<int> ConflictGraph::components() const
{
    std::vector<int> comp(static_cast<std::size_t>(size()), -1);
    std::vector<int> stack;
    for (int root = 0; root < size(); ++root) {
        if (comp[static_cast<std::size_t>(root)] != -1) {
            continue;
        }
        comp[static_cast<std::size_t>(root)] = root;
        stack.push_back(root);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : neighbors(v)) {
                if (comp[static_cast<std::size_t>(w)] == -1) {
                    comp[static_cast<std::size_t>(w)] = root;
                    stack.push_back(w);
                }
            }
        }
    }
    return comp;
}

int Coloring::max_color() const
{
    return color.empty() ? 0 : *std::max_element(color.begin(), color.end());
}

bool Coloring::is_proper(const ConflictGraph& g) const
{
    if (color.size() != static_cast<std::size_t>(g.size())) {
        return false;
    }
    for (int c : color) {
        if (c < 1) {
            return false;
        }
    }
    for (auto [u, v] : g.edges()) {
        if (color[static_cast<std::size_t>(u)] == color[static_cast<std::size_t>(v)]) {
            return false;
        }
    }
    return true;
}

std::vector<int> Coloring::color_class(int c) const
{
    std::vector<int> out;
    for (std::size_t v = 0; v < color.size(); ++v) {
        if (color[v] == c) {
            out.push_back(static_cast<int>(v));
        }
    }
    return out;
}

namespace {

void require_permutation(const ConflictGraph& g, std::span<const int> order)
{
    if (order.size() != static_cast<std::size_t>(g.size())) {
        throw InvalidInput("order has " + std::to_string(order.size()) + " entries for a graph of " +
                           std::to_string(g.size()) + " vertices");
    }
    std::vector<std::uint8_t> seen(order.size(), 0);
    for (int v : order) {
        if (v < 0 || v >= g.size() || seen[static_cast<std::size_t>(v)] != 0) {
            throw InvalidInput("order is not a permutation of the vertices");
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

}  // namespace

Coloring primary_greedy_coloring(const ConflictGraph& g, std::span<const int> order)
{
    require_permutation(g, order);
    Coloring out{std::vector<int>(static_cast<std::size_t>(g.size()), 0)};
    std::vector<std::uint8_t> taken;
    for (int v : order) {
        taken.assign(static_cast<std::size_t>(g.degree(v)) + 2, 0);
        for (int w : g.neighbors(v)) {
            const int c = out.color[static_cast<std::size_t>(w)];
            if (c > 0 && c < static_cast<int>(taken.size())) {
                taken[static_cast<std::size_t>(c)] = 1;
            }
        }
        int c = 1;
        while (taken[static_cast<std::size_t>(c)] != 0) {
            ++c;
        }
        out.color[static_cast<std::size_t>(v)] = c;
    }
    return out;
}

Coloring alternative_greedy_coloring(const ConflictGraph& g, std::span<const int> order)
{
    require_permutation(g, order);
    Coloring out{std::vector<int>(static_cast<std::size_t>(g.size()), 0)};
    std::vector<int> survivors(order.begin(), order.end());
    std::vector<std::uint8_t> in_set(static_cast<std::size_t>(g.size()), 0);

    int next_color = 1;
    while (!survivors.empty()) {
        std::vector<int> rest;
        std::fill(in_set.begin(), in_set.end(), 0);
        for (int v : survivors) {
            const auto nbrs = g.neighbors(v);
            const bool blocked = std::any_of(nbrs.begin(), nbrs.end(),
                                             [&](int w) { return in_set[static_cast<std::size_t>(w)] != 0; });
            if (blocked) {
                rest.push_back(v);
            } else {
                in_set[static_cast<std::size_t>(v)] = 1;
                out.color[static_cast<std::size_t>(v)] = next_color;
            }
        }
        survivors = std::move(rest);
        ++next_color;
    }
    return out;
}

ConflictGraph build_transaction_conflict_graph(std::span<const Transaction> txs)
{
    std::vector<std::string> labels;
    labels.reserve(txs.size());
    for (const auto& t : txs) {
        labels.push_back("T" + std::to_string(t.id));
    }
    ConflictGraph g(std::move(labels));
    for (std::size_t i = 0; i < txs.size(); ++i) {
        for (std::size_t j = i + 1; j < txs.size(); ++j) {
            if (txs[i].ttype.collides(txs[j].ttype)) {
                g.add_edge(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return g;
}

std::vector<int> arrival_order(std::span<const Transaction> txs)
{
    std::vector<int> order(txs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& x = txs[static_cast<std::size_t>(a)];
        const auto& y = txs[static_cast<std::size_t>(b)];
        return std::tie(x.gen_round, x.id) < std::tie(y.gen_round, y.id);
    });
    return order;
}

ConflictGraph build_block_conflict_graph(std::span<const Block> blocks)
{
    std::vector<std::string> labels;
    labels.reserve(blocks.size());
    for (const auto& b : blocks) {
        labels.push_back("p" + std::to_string(b.owner.index) + ":" + b.ttype.to_string(b.ttype.span()));
    }
    ConflictGraph g(std::move(labels));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            if (blocks[i].owner == blocks[j].owner || blocks[i].ttype.collides(blocks[j].ttype)) {
                g.add_edge(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return g;
}

std::vector<int> owner_order(std::span<const Block> blocks, int m)
{
    std::vector<int> order(blocks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& x = blocks[static_cast<std::size_t>(a)];
        const auto& y = blocks[static_cast<std::size_t>(b)];
        if (x.owner != y.owner) {
            return x.owner < y.owner;
        }
        return x.ttype.to_string(m) < y.ttype.to_string(m);
    });
    return order;
}

}  // namespace tmsched
