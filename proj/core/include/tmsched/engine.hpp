#pragma once

#include "tmsched/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tmsched {

/// Result of executing one round. All id lists are ascending.
struct RoundOutcome {
    Round round = 0;
    std::vector<TxId> invoked;
    std::vector<TxId> committed;
    std::vector<TxId> aborted;

    bool operator==(const RoundOutcome&) const = default;
};

/// Executes the invoked transactions together: a transaction commits iff no
/// other invoked transaction touches any of its objects, otherwise it aborts.
/// Throws InvalidInput on a duplicate id. The outcome's round field is left 0.
RoundOutcome resolve_round(std::span<const Transaction> invocations);

/// The single commit/abort bit an invoker learns about one transaction.
struct Feedback {
    TxId id = 0;
    bool committed = false;

    bool operator==(const Feedback&) const = default;
};

/// One generated transaction before the engine gives it an id.
struct Generation {
    TxType ttype;
    std::optional<ProcessorId> owner;

    bool operator==(const Generation&) const = default;
};

/// Per-round transaction source. emit() is called once per round, in
/// increasing round order starting at 1.
class Generator {
public:
    virtual ~Generator() = default;

    virtual std::vector<Generation> emit(Round round) = 0;
    virtual AutonomyModel model() const = 0;
};

/// Pull-based scheduler. At round r it receives the transactions generated
/// at round r-1 and the feedback for its round r-1 invocations, and returns
/// the ids to invoke at round r.
class Scheduler {
public:
    virtual ~Scheduler() = default;

    virtual std::vector<TxId> on_round(Round round, std::span<const Transaction> newly_visible,
                                       std::span<const Feedback> feedback) = 0;

    /// Free-form note recorded in the trace for the round just scheduled.
    virtual std::string annotation() const { return {}; }
};

struct RoundRecord {
    Round round = 0;
    std::vector<Transaction> generated;  // as generated, commit_round unset
    RoundOutcome outcome;
    std::int64_t pending = 0;  // after the round's commits
    std::string note;
};

struct Trace {
    SystemConfig config;
    AutonomyModel model = AutonomyModel::queue_free;
    std::vector<RoundRecord> rounds;
    /// Every generated transaction indexed by id, with commit rounds filled in.
    std::vector<Transaction> transactions;

    std::int64_t total_generated() const { return static_cast<std::int64_t>(transactions.size()); }
};

/// Runs rounds 1..horizon: the generator emits, the scheduler sees
/// transactions from strictly earlier rounds and names its invocations, the
/// round is resolved and feedback is queued for the next call.
///
/// Throws ProtocolViolation (naming round and transaction) when the scheduler
/// invokes an unknown, committed or not-yet-visible transaction, repeats an
/// id, or, in the queue-based model, invokes two transactions of one
/// processor in a round. Throws InvalidInput when a generation does not fit
/// the configuration.
Trace run_simulation(const SystemConfig& config, Scheduler& scheduler, Generator& generator);

// ---------------------------------------------------------------------------
// Symmetry livelock harness for deterministic queue-free threads.

enum class ThreadAction { pause, invoke };
enum class ThreadFeedback { none, committed, aborted };

struct PolicyStep {
    ThreadAction action = ThreadAction::pause;
    std::uint64_t next_state = 0;
};

/// A deterministic thread automaton: (state, round, last feedback) -> step.
struct ThreadPolicy {
    std::string name;
    std::uint64_t initial_state = 0;
    std::function<PolicyStep(std::uint64_t state, Round round, ThreadFeedback last)> step;
};

struct SymmetryRound {
    Round round = 0;
    std::uint64_t state[2] = {0, 0};  // state at the start of the round
    ThreadAction action[2] = {ThreadAction::pause, ThreadAction::pause};
    ThreadFeedback feedback[2] = {ThreadFeedback::none, ThreadFeedback::none};
};

struct SymmetryReport {
    std::string policy;
    std::vector<SymmetryRound> rounds;
    std::int64_t commits = 0;
    std::int64_t mutual_aborts = 0;
    bool states_equal_throughout = true;
};

/// Two copies of the same automaton, each owning one transaction on the only
/// object, run in lockstep through resolve_round for horizon rounds.
SymmetryReport queue_free_symmetry_demo(const ThreadPolicy& policy, Round horizon);

/// A handful of deterministic policies: always invoke, alternate, binary
/// exponential backoff, invoke every third round, and linear backoff.
std::vector<ThreadPolicy> sample_thread_policies();

}  // namespace tmsched
