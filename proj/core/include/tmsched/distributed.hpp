#pragma once

#include "tmsched/engine.hpp"
#include "tmsched/model.hpp"
#include "tmsched/rational.hpp"

#include <array>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace tmsched {

// ---------------------------------------------------------------------------
// Closed-form quantities

/// (n-1)^2 n^2 m^2: the phase length and the size of a large block.
std::int64_t large_block_threshold(int n, int m);

/// Number of nonempty types of weight at most k over m objects.
std::int64_t type_count(int m, int k);

/// -x lg x - (1-x) lg(1-x), with H(0) = H(1) = 0. Throws InvalidInput
/// outside [0, 1].
double binary_entropy(double x);

struct DistributedBounds {
    std::int64_t P = 0;
    std::int64_t L = 0;
    std::int64_t C = 0;             // b n P
    std::int64_t epoch_len = 0;     // 3L
    std::int64_t interval_len = 0;  // 6 b n L P min{k, ceil(sqrt m)}
    std::int64_t bulk = 0;          // n L P
    /// bulk >= 1 / (1 - 6 rho min{k, ceil(sqrt m)}); empty when no rho given.
    std::optional<bool> bulk_ok;
    Rational rho_max;  // max{1/(6k), 1/(6 ceil(sqrt m))}, exclusive
    std::int64_t pending_bound = 0;  // 2 b n^5 m^3 P
    std::int64_t latency_bound = 0;  // 12 b n^5 m^2 P min{k, ceil(sqrt m)}
    /// 2^{H(k/m) m}, the entropy estimate of P.
    double entropy_estimate = 0.0;
    /// P <= entropy_estimate; only meaningful for k <= m/2.
    std::optional<bool> entropy_estimate_holds;
};

/// Throws InvalidInput for k outside [1, m], b < 1, n < 1, or values that
/// overflow 64 bits.
DistributedBounds distributed_bounds(int n, int m, int k, std::int64_t b, std::optional<Rational> rho);

// ---------------------------------------------------------------------------
// Epoch layout

struct Phase1Role {
    int repetition = 0;
    ProcessorId sender;
    ProcessorId receiver;
    ObjectId object;
    ProcessorId slot;  // whose active type this slot carries
    int bit = 0;       // position within the m-bit encoding
};
struct Phase2Role {};
struct Phase3Role {
    ProcessorId owner;
};
using RoundRole = std::variant<Phase1Role, Phase2Role, Phase3Role>;

/// Deterministic epoch layout shared by all processors.
///
/// Phase 1 is n-1 repetitions over ordered pairs (sender, receiver) and
/// objects, row-major; each (repetition, sender, receiver, object) owns a
/// segment of n*m rounds split into n slots of m bits. Phase 3 gives
/// processor p the rounds [p L/n, (p+1) L/n).
class EpochSchedule {
public:
    /// Throws InvalidInput unless n >= 2 and 1 <= m <= 64.
    EpochSchedule(int n, int m);

    int n() const { return n_; }
    int m() const { return m_; }
    std::int64_t phase_len() const { return phase_len_; }
    std::int64_t epoch_len() const { return 3 * phase_len_; }
    std::int64_t segment_len() const { return static_cast<std::int64_t>(n_) * m_; }
    std::int64_t segment_count() const { return phase_len_ / segment_len(); }
    std::int64_t phase3_slot_len() const { return phase_len_ / n_; }

    /// offset in [0, L).
    Phase1Role phase1_role(std::int64_t offset) const;
    /// First offset of a (repetition, sender, receiver, object) segment.
    std::int64_t segment_start(int repetition, ProcessorId sender, ProcessorId receiver, ObjectId object) const;
    /// offset in [0, L).
    ProcessorId phase3_owner(std::int64_t offset) const;
    /// offset in [0, 3L).
    RoundRole role_at(std::int64_t epoch_offset) const;

private:
    int n_;
    int m_;
    std::int64_t phase_len_;
};

// ---------------------------------------------------------------------------
// Bit channel

/// m-character string, '1' at position i iff object i is in the type; an
/// absent type is all zeros.
std::string encode_type(const std::optional<TxType>& t, int m);
/// All zeros decodes as absent. Throws InvalidInput on characters other than
/// '0'/'1' or a length outside [1, 64].
std::optional<TxType> decode_type(std::string_view bits);

enum class ChannelRole { sender, receiver };
enum class ChannelBit { no_information, zero, one };

class ProcessorState;

/// Transaction to invoke in a channel round, or nothing. Both sides use only
/// their active type, and only when it contains the channel object; the
/// receiver always invokes, the sender only to send a 1.
std::optional<TxId> channel_round_action(ChannelRole role, bool bit, ObjectId object, const ProcessorState& state);

/// The receiver's reading of its own invocation: abort is 1, commit is 0, no
/// invocation carries no information.
ChannelBit read_channel_feedback(bool invoked, bool committed);

// ---------------------------------------------------------------------------
// Processor state machine

struct QueuedTx {
    TxId id = 0;
    Round gen_round = 0;
    TxType ttype;
};

/// One processor's queue and per-epoch state.
///
/// Transactions are kept in per-type FIFOs. A type with c pending
/// transactions forms floor(c/L) large blocks; the oldest L*floor(c/L) of
/// them are its block members and the rest are served by Phase 3.
class ProcessorState {
public:
    ProcessorState(ProcessorId id, int n, int m, std::int64_t block_size);

    ProcessorId id() const { return id_; }
    int n() const { return n_; }
    int m() const { return m_; }
    std::int64_t block_size() const { return block_size_; }

    void enqueue(const Transaction& t);
    /// Drops a committed transaction; unknown ids are ignored.
    void remove(TxId id);

    std::size_t pending() const { return pending_; }
    std::size_t count(const TxType& t) const;
    std::int64_t large_block_count(const TxType& t) const;
    bool is_block_member(TxId id) const;
    std::optional<TxId> oldest_of(const TxType& t) const;
    std::optional<TxId> oldest_non_member() const;
    std::optional<TxId> oldest_any() const;
    /// Types with at least L pending, ordered by the generation round of their
    /// newest pending transaction (oldest first), ties by bitstring.
    std::vector<TxType> large_types() const;
    const std::map<TxType, std::deque<QueuedTx>>& queues() const { return queues_; }

    // Per-epoch state, reset at every epoch start.
    std::optional<TxType> active;
    std::vector<std::optional<TxType>> known;  // indexed by processor
    bool selected = false;

    // Channel reception in progress.
    std::string rx_bits;

    /// What this processor did in the previous round; consumed when the
    /// feedback for that round arrives.
    struct LastAction {
        enum class Kind { none, channel_send, channel_receive, phase2, phase3 } kind = Kind::none;
        std::optional<TxId> tx;
        ProcessorId slot;
        int bit = 0;
    } last;

    /// Set when the feedback just applied completed a slot.
    struct Decoded {
        ProcessorId slot;
        std::string bits;
    };
    std::optional<Decoded> last_decoded;

private:
    const std::deque<QueuedTx>* find(const TxType& t) const;

    ProcessorId id_;
    int n_;
    int m_;
    std::int64_t block_size_;
    std::map<TxType, std::deque<QueuedTx>> queues_;
    std::size_t pending_ = 0;
};

/// Picks the first type in large-block order, or nothing.
std::optional<TxType> select_active_block(const ProcessorState& state);

/// Scans entries in processor order and keeps each whose type collides with
/// none kept so far. Returns the kept processors, ascending.
std::vector<ProcessorId> greedy_select_active_types(std::span<const std::pair<ProcessorId, TxType>> known);

struct DistributedOptions {
    /// When a processor's Phase 3 slot finds no non-member transaction, invoke
    /// the oldest block member instead of idling.
    bool phase3_serves_block_members = false;
};

enum class Phase { one = 1, two = 2, three = 3 };

/// Timing of one epoch for a given (n, m). n = 1 has no Phase 1 and uses
/// phases of a single round.
struct EpochLayout {
    int n = 1;
    int m = 1;
    std::int64_t block_size = 1;
    std::int64_t phase1_len = 0;
    std::int64_t phase_len = 1;

    static EpochLayout for_system(int n, int m);
    std::int64_t epoch_len() const { return phase1_len + 2 * phase_len; }
    std::int64_t epoch_of(Round round) const { return (round - 1) / epoch_len(); }
    std::int64_t offset_of(Round round) const { return (round - 1) % epoch_len(); }
    Phase phase_of(Round round) const;
};

/// Advances one processor by one round and returns what it invokes.
///
/// feedback is the commit/abort bit for this processor's invocation in the
/// previous round, if it made one. schedule may be null only when n = 1.
/// Throws std::logic_error when the schedule requires a channel invocation
/// and the active-type queue is empty.
std::optional<TxId> distributed_processor_step(ProcessorState& state, const EpochLayout& layout,
                                               const EpochSchedule* schedule, const DistributedOptions& options,
                                               Round round, std::optional<Feedback> feedback);

struct PhaseTally {
    std::int64_t invocations = 0;
    std::int64_t commits = 0;
    std::int64_t aborts = 0;
};

/// Snapshot taken at the first round of Phase 2 of every epoch.
struct EpochRecord {
    std::int64_t epoch = 0;
    Round phase2_start = 0;
    std::vector<std::optional<TxType>> actives;
    std::vector<std::vector<std::optional<TxType>>> known;
    std::vector<std::vector<ProcessorId>> selections;  // empty for inactive processors
    std::vector<std::uint8_t> selected;
};

/// The queue-based scheduler: n processor state machines multiplexed in one
/// round loop. Each processor only sees its own transactions and the
/// feedback of its own invocations.
class DistributedScheduler final : public Scheduler {
public:
    DistributedScheduler(int n, int m, DistributedOptions options = {});

    std::vector<TxId> on_round(Round round, std::span<const Transaction> newly_visible,
                               std::span<const Feedback> feedback) override;
    std::string annotation() const override { return note_; }

    const EpochLayout& layout() const { return layout_; }
    const std::vector<ProcessorState>& processors() const { return processors_; }
    const std::vector<EpochRecord>& epochs() const { return epochs_; }
    const PhaseTally& tally(Phase p) const { return tallies_[static_cast<std::size_t>(p) - 1]; }
    /// Largest number of transactions any processor spent from its active
    /// type during one Phase 1.
    std::int64_t max_phase1_consumption() const { return max_phase1_consumption_; }

private:
    EpochLayout layout_;
    std::optional<EpochSchedule> schedule_;
    DistributedOptions options_;
    std::vector<ProcessorState> processors_;
    std::vector<EpochRecord> epochs_;
    std::array<PhaseTally, 3> tallies_{};
    std::optional<Phase> last_phase_;
    std::vector<std::int64_t> phase1_spent_;
    std::int64_t max_phase1_consumption_ = 0;
    std::string note_;
};

}  // namespace tmsched
