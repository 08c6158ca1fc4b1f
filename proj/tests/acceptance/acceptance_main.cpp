// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "oracles.hpp"

#include "tmsched/adversary.hpp"
#include "tmsched/analysis.hpp"
#include "tmsched/centralized.hpp"
#include "tmsched/combinatorics.hpp"
#include "tmsched/distributed.hpp"
#include "tmsched/engine.hpp"
#include "tmsched/trace_io.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

namespace tmsched {
namespace {

// Largest pending count seen over the criterion 5 runs (seeds 1..10), pinned
// from the first verified run.
constexpr std::int64_t kDistributedPendingBaseline = 6;

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void require(bool cond, const std::string& what)
    {
        if (!cond && first_.empty()) {
            first_ = what;
        }
        ok_ = ok_ && cond;
    }
    Outcome done(std::string detail) const
    {
        return Outcome{ok_, ok_ ? std::move(detail) : first_};
    }

private:
    bool ok_ = true;
    std::string first_;
};

Outcome set_family()
{
    Check c;
    for (int n = 1; n <= 64; ++n) {
        const auto f = build_set_family(n);
        const auto report = verify_set_family(f);
        c.require(report.ok, "n=" + std::to_string(n) + ": " + report.violation);
        c.require(oracle::set_family_ok(n, f.sets), "n=" + std::to_string(n) + ": oracle rejects family");
    }
    return c.done("n = 1..64 verified");
}

Outcome coloring_equivalence()
{
    Check c;
    Rng rng(2024);
    const std::uint64_t probs[] = {1, 3, 5};
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = static_cast<int>(rng.between(1, 50));
        const auto g = oracle::random_graph(rng, n, probs[trial % 3], 10);
        const auto cg = oracle::to_conflict_graph(g);
        const auto order = oracle::shuffled_order(rng, n);
        const auto a = primary_greedy_coloring(cg, order);
        const auto b = alternative_greedy_coloring(cg, order);
        const auto id = "graph " + std::to_string(trial);
        c.require(a.color == b.color, id + ": assignments differ");
        c.require(a.color == oracle::first_fit(g, order), id + ": differs from first-fit oracle");
        c.require(a.is_proper(cg) && b.is_proper(cg), id + ": improper coloring");
        c.require(a.max_color() <= oracle::max_degree(g) + 1, id + ": more than max degree + 1 colors");
    }
    return c.done("1000 graphs identical and proper");
}

Outcome centralized_stability()
{
    Check c;
    const int m = 4;
    const int k = 2;
    const std::int64_t b = 1;
    const auto bounds = centralized_bounds(m, k, b);
    c.require(bounds.rho_max == Rational(1, 8) && bounds.pending_bound == 16 && bounds.latency_bound == 16 &&
                  bounds.milestone_len == 8,
              "bound formulas do not give 1/8, 16, 16, 8");
    std::int64_t worst_pending = 0;
    std::int64_t worst_latency = 0;
    std::int64_t generated = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const AdversaryParams params{bounds.rho_max, b, AutonomyModel::queue_free};
        TokenBucketGenerator gen(params, WorkloadShape::uniform(k, 8), m, 1, seed);
        CentralizedScheduler sched;
        const auto trace = run_simulation(SystemConfig{m, k, 1, 100000, seed}, sched, gen);
        const auto r = analyze(trace, bounds);
        const auto id = "seed " + std::to_string(seed);
        c.require(r.max_pending <= 16, id + ": pending " + std::to_string(r.max_pending) + " > 16");
        c.require(r.max_latency <= 16, id + ": latency " + std::to_string(r.max_latency) + " > 16");
        c.require(r.aborts == 0, id + ": aborts");
        c.require(r.milestone_checked && r.milestone_failures.empty(), id + ": milestone failure");
        c.require(r.clean(), id + ": report not clean");
        worst_pending = std::max(worst_pending, r.max_pending);
        worst_latency = std::max(worst_latency, r.max_latency);
        generated += r.generated;
    }
    return c.done("max pending " + std::to_string(worst_pending) + ", max latency " + std::to_string(worst_latency) +
                  ", " + std::to_string(generated) + " transactions");
}

Outcome lower_bound()
{
    Check c;
    const AdversaryParams params{Rational(3, 5), 2, AutonomyModel::queue_free};
    LowerBoundGenerator gen(params, 6, 3);
    CentralizedScheduler sched;
    const auto trace = run_simulation(SystemConfig{6, 3, 1, 10000, 0}, sched, gen);
    for (const auto& r : trace.rounds) {
        c.require(r.outcome.committed.size() <= 1, "round " + std::to_string(r.round) + ": several commits");
    }
    const auto mid = trace.rounds[4999].pending;
    const auto end = trace.rounds.back().pending;
    c.require(end >= mid + 100, "pending grew only from " + std::to_string(mid) + " to " + std::to_string(end));
    return c.done("pending " + std::to_string(mid) + " at 5000, " + std::to_string(end) + " at 10000");
}

std::int64_t aborts_in(const Trace& trace, const EpochLayout& layout, Phase phase)
{
    std::int64_t total = 0;
    for (const auto& r : trace.rounds) {
        if (layout.phase_of(r.round) == phase) {
            total += static_cast<std::int64_t>(r.outcome.aborted.size());
        }
    }
    return total;
}

Outcome distributed_stability()
{
    Check c;
    const int n = 2;
    const int m = 2;
    const int k = 1;
    const std::int64_t b = 1;
    const Rational rho(1, 12);
    const auto bounds = distributed_bounds(n, m, k, b, rho);
    c.require(bounds.bulk_ok.value_or(false) && rho < bounds.rho_max, "parameters outside the stable range");
    c.require(bounds.interval_len == 384 && bounds.pending_bound == 1024, "bound formulas do not give 384, 1024");
    std::int64_t worst = 0;
    std::int64_t active_epochs = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const AdversaryParams params{rho, b, AutonomyModel::queue_based};
        TokenBucketGenerator gen(params, WorkloadShape::uniform(k, 4), m, n, seed);
        DistributedScheduler sched(n, m);
        const auto trace = run_simulation(SystemConfig{m, k, n, 5 * bounds.interval_len, seed}, sched, gen);
        const auto r = analyze(trace, bounds);
        const auto id = "seed " + std::to_string(seed);
        c.require(aborts_in(trace, sched.layout(), Phase::two) == 0, id + ": Phase 2 aborts");
        c.require(aborts_in(trace, sched.layout(), Phase::three) == 0, id + ": Phase 3 aborts");
        for (const auto& e : sched.epochs()) {
            c.require(e.known == oracle::expected_known(e.actives),
                      id + ": epoch " + std::to_string(e.epoch) + " known table differs from components");
            active_epochs += std::any_of(e.actives.begin(), e.actives.end(), [](const auto& a) { return a.has_value(); });
        }
        c.require(r.milestone_checked && r.milestone_failures.empty(), id + ": milestone failure");
        c.require(r.max_pending <= 1024, id + ": pending above 1024");
        c.require(r.max_pending <= 4 * bounds.L * bounds.P, id + ": pending above 4LP");
        c.require(r.clean(), id + ": report not clean");
        worst = std::max(worst, r.max_pending);
    }
    c.require(worst <= kDistributedPendingBaseline,
              "max pending " + std::to_string(worst) + " exceeds pinned baseline " +
                  std::to_string(kDistributedPendingBaseline));
    return c.done("max pending " + std::to_string(worst) + " (baseline " + std::to_string(kDistributedPendingBaseline) +
                  "), epochs with an active block " + std::to_string(active_epochs));
}

/// Runs one Phase 1 between two processors that both hold one block of
/// `type`; returns whether each learned the other's type, and whether the
/// first segment's empty slot arrived as all zeros.
bool channel_round_trip(int m, const TxType& type)
{
    const auto layout = EpochLayout::for_system(2, m);
    const EpochSchedule schedule(2, m);
    ProcessorState p0(ProcessorId{0}, 2, m, layout.block_size);
    ProcessorState p1(ProcessorId{1}, 2, m, layout.block_size);
    TxId id = 0;
    for (std::int64_t i = 0; i < layout.block_size; ++i) {
        p0.enqueue(Transaction{id++, type, 1, ProcessorId{0}, std::nullopt});
        p1.enqueue(Transaction{id++, type, 1, ProcessorId{1}, std::nullopt});
    }
    std::optional<Feedback> f0;
    std::optional<Feedback> f1;
    bool zeros_seen = false;
    const DistributedOptions options;
    for (Round r = 1; r <= layout.phase1_len; ++r) {
        const auto a = distributed_processor_step(p0, layout, &schedule, options, r, f0);
        const auto b = distributed_processor_step(p1, layout, &schedule, options, r, f1);
        std::vector<Transaction> inv;
        if (a) {
            inv.push_back(Transaction{*a, type, 1, ProcessorId{0}, std::nullopt});
        }
        if (b) {
            inv.push_back(Transaction{*b, type, 1, ProcessorId{1}, std::nullopt});
        }
        const auto out = resolve_round(inv);
        const auto fb = [&](const std::optional<TxId>& t) -> std::optional<Feedback> {
            if (!t) {
                return std::nullopt;
            }
            return Feedback{*t, std::find(out.committed.begin(), out.committed.end(), *t) != out.committed.end()};
        };
        f0 = fb(a);
        f1 = fb(b);
        if (r == 2 * m + 1) {
            // The first segment ended a round ago: p1 has decoded slot 1 from
            // p0, who did not know p1 yet.
            zeros_seen = p1.last_decoded && p1.last_decoded->slot == ProcessorId{1} &&
                         p1.last_decoded->bits == std::string(static_cast<std::size_t>(m), '0');
        }
    }
    // Feedback of the last Phase 1 round is applied on the next step.
    distributed_processor_step(p0, layout, &schedule, options, layout.phase1_len + 1, f0);
    distributed_processor_step(p1, layout, &schedule, options, layout.phase1_len + 1, f1);
    const bool first_segment_full = type.contains(ObjectId{0});
    return p0.known[1] == type && p1.known[0] == type && (!first_segment_full || zeros_seen);
}

Outcome bit_channel()
{
    Check c;
    std::int64_t strings = 0;
    for (int m = 1; m <= 8; ++m) {
        c.require(!decode_type(encode_type(std::nullopt, m)).has_value(), "m=" + std::to_string(m) + ": zeros");
        ++strings;
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
            const auto t = TxType::from_mask(mask);
            c.require(decode_type(encode_type(t, m)) == t, "m=" + std::to_string(m) + ": codec " + t.to_string(m));
            c.require(channel_round_trip(m, t), "m=" + std::to_string(m) + ": channel " + t.to_string(m));
            ++strings;
        }
    }
    return c.done(std::to_string(strings) + " strings round-tripped");
}

Outcome admissibility_verifier()
{
    Check c;
    Rng rng(77);
    int violating = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const int m = static_cast<int>(rng.between(1, 4));
        const int n = static_cast<int>(rng.between(1, 3));
        const auto s = oracle::random_stream(rng, m, n, AutonomyModel::queue_based, rng.between(1, 200));
        const auto q = rng.between(1, 6);
        const AdversaryParams params{Rational(rng.between(1, q), q), rng.between(1, 4), AutonomyModel::queue_based};
        const auto got = verify_admissibility(s, params);
        c.require(got == oracle::brute_force_admissibility(s, params), "trace " + std::to_string(trial) + " differs");
        violating += !got.admissible();
    }
    return c.done("500 traces agree, " + std::to_string(violating) + " inadmissible");
}

Outcome symmetry()
{
    Check c;
    const auto policies = sample_thread_policies();
    c.require(policies.size() == 5, "expected 5 sample policies");
    for (const auto& p : policies) {
        const auto r = queue_free_symmetry_demo(p, 10000);
        c.require(r.states_equal_throughout, p.name + ": states diverged");
        c.require(r.commits == 0, p.name + ": committed");
    }
    return c.done("5 policies, 10000 rounds each");
}

Outcome determinism()
{
    Check c;
    const std::vector<std::pair<std::string, std::function<std::string()>>> runs{
        {"centralized token bucket",
         [] {
             TokenBucketGenerator gen({Rational(1, 4), 3, AutonomyModel::queue_free}, WorkloadShape::uniform(3, 5), 6,
                                      1, 42);
             CentralizedScheduler sched;
             return trace_json(run_simulation(SystemConfig{6, 3, 1, 3000, 42}, sched, gen));
         }},
        {"centralized lower bound",
         [] {
             LowerBoundGenerator gen({Rational(3, 5), 2, AutonomyModel::queue_free}, 6, 3);
             CentralizedScheduler sched;
             return trace_json(run_simulation(SystemConfig{6, 3, 1, 2000, 0}, sched, gen));
         }},
        {"distributed token bucket",
         [] {
             TokenBucketGenerator gen({Rational(1, 2), 40, AutonomyModel::queue_based},
                                      WorkloadShape::uniform(2, 6), 2, 3, 9);
             DistributedScheduler sched(3, 2);
             return trace_json(run_simulation(SystemConfig{2, 2, 3, 3000, 9}, sched, gen));
         }},
    };
    for (const auto& [name, run] : runs) {
        const auto first = run();
        c.require(first == run(), name + ": traces differ");
    }
    return c.done(std::to_string(runs.size()) + " configs byte-identical");
}

struct Criterion {
    int number;
    const char* name;
    double limit_seconds;  // 0 = no limit
    Outcome (*run)();
};

}  // namespace
}  // namespace tmsched

int main()
{
    using namespace tmsched;
    const Criterion criteria[] = {
        {1, "set family", 1.0, set_family},
        {2, "coloring equivalence", 5.0, coloring_equivalence},
        {3, "centralized stability", 30.0, centralized_stability},
        {4, "lower bound", 5.0, lower_bound},
        {5, "distributed stability", 10.0, distributed_stability},
        {6, "bit channel", 1.0, bit_channel},
        {7, "admissibility verifier", 10.0, admissibility_verifier},
        {8, "symmetry livelock", 1.0, symmetry},
        {9, "determinism", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = Outcome{false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (out.pass && c.limit_seconds > 0 && secs > c.limit_seconds) {
            out.pass = false;
            out.detail += "; over the time limit";
        }
        failed += !out.pass;
        std::printf("criterion %d %-24s %s  %.3fs  %s\n", c.number, c.name, out.pass ? "PASS" : "FAIL", secs,
                    out.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
