#include "tmsched/distributed.hpp"

#include "tmsched/centralized.hpp"
#include "tmsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tmsched {

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw InvalidInput("bound overflows 64-bit integers");
    }
    return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw InvalidInput("bound overflows 64-bit integers");
    }
    return out;
}

std::int64_t product(std::initializer_list<std::int64_t> factors)
{
    std::int64_t out = 1;
    for (auto f : factors) {
        out = checked_mul(out, f);
    }
    return out;
}

}  // namespace

std::int64_t large_block_threshold(int n, int m)
{
    if (n < 1 || m < 1) {
        throw InvalidInput("large block threshold needs n >= 1 and m >= 1");
    }
    const std::int64_t a = n - 1;
    return product({a, a, n, n, m, m});
}

std::int64_t type_count(int m, int k)
{
    if (m < 1 || m > kMaxObjects || k < 1 || k > m) {
        throw InvalidInput("type count needs 1 <= k <= m <= 64");
    }
    // C(m, i) built incrementally; C(m, i) * (m - i) is divisible by i + 1.
    std::int64_t total = 0;
    WideInt binom = 1;
    for (int i = 1; i <= k; ++i) {
        binom = binom * (m - i + 1) / i;
        if (binom > std::numeric_limits<std::int64_t>::max()) {
            throw InvalidInput("type count overflows 64-bit integers");
        }
        total = checked_add(total, static_cast<std::int64_t>(binom));
    }
    return total;
}

double binary_entropy(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidInput("binary entropy is defined on [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

DistributedBounds distributed_bounds(int n, int m, int k, std::int64_t b, std::optional<Rational> rho)
{
    if (n < 1 || b < 1) {
        throw InvalidInput("distributed bounds need n >= 1 and b >= 1");
    }
    if (m < 1 || m > kMaxObjects || k < 1 || k > m) {
        throw InvalidInput("distributed bounds need 1 <= k <= m <= 64");
    }
    DistributedBounds out;
    const std::int64_t short_side = std::min<std::int64_t>(k, ceil_sqrt(m));
    out.P = type_count(m, k);
    out.L = large_block_threshold(n, m);
    out.C = product({b, n, out.P});
    out.epoch_len = checked_mul(3, out.L);
    out.interval_len = product({6, b, n, out.L, out.P, short_side});
    out.bulk = product({n, out.L, out.P});
    out.rho_max = Rational(1, 6 * short_side);
    const std::int64_t n5 = product({n, n, n, n, n});
    out.pending_bound = product({2, b, n5, m, m, m, out.P});
    out.latency_bound = product({12, b, n5, m, m, out.P, short_side});

    if (rho) {
        // bulk >= 1 / (1 - x) with x = 6 rho short_side = p/q, i.e.
        // bulk (q - p) >= q, and never when x >= 1.
        const WideInt p = static_cast<WideInt>(rho->numerator()) * 6 * short_side;
        const WideInt q = rho->denominator();
        out.bulk_ok = p < q && static_cast<WideInt>(out.bulk) * (q - p) >= q;
    }

    const double ratio = static_cast<double>(k) / m;
    out.entropy_estimate = std::exp2(binary_entropy(ratio) * m);
    if (2 * k <= m) {
        out.entropy_estimate_holds = static_cast<double>(out.P) <= out.entropy_estimate;
    }
    return out;
}

// ---------------------------------------------------------------------------

EpochSchedule::EpochSchedule(int n, int m) : n_(n), m_(m)
{
    if (n < 2) {
        throw InvalidInput("the epoch schedule needs at least two processors");
    }
    if (m < 1 || m > kMaxObjects) {
        throw InvalidInput("the epoch schedule needs 1 <= m <= 64");
    }
    phase_len_ = large_block_threshold(n, m);
}

Phase1Role EpochSchedule::phase1_role(std::int64_t offset) const
{
    if (offset < 0 || offset >= phase_len_) {
        throw InvalidInput("phase 1 offset outside [0, L)");
    }
    const std::int64_t seg = offset / segment_len();
    const std::int64_t within = offset % segment_len();
    const std::int64_t per_rep = static_cast<std::int64_t>(n_) * (n_ - 1) * m_;
    const std::int64_t rem = seg % per_rep;
    const std::int64_t pair = rem / m_;
    const int sender = static_cast<int>(pair / (n_ - 1));
    int receiver = static_cast<int>(pair % (n_ - 1));
    if (receiver >= sender) {
        ++receiver;
    }
    Phase1Role role;
    role.repetition = static_cast<int>(seg / per_rep);
    role.sender = ProcessorId{sender};
    role.receiver = ProcessorId{receiver};
    role.object = ObjectId{static_cast<int>(rem % m_)};
    role.slot = ProcessorId{static_cast<int>(within / m_)};
    role.bit = static_cast<int>(within % m_);
    return role;
}

std::int64_t EpochSchedule::segment_start(int repetition, ProcessorId sender, ProcessorId receiver,
                                          ObjectId object) const
{
    if (repetition < 0 || repetition >= n_ - 1 || sender.index < 0 || sender.index >= n_ || receiver.index < 0 ||
        receiver.index >= n_ || sender == receiver || object.index < 0 || object.index >= m_) {
        throw InvalidInput("no such phase 1 segment");
    }
    const int r = receiver.index > sender.index ? receiver.index - 1 : receiver.index;
    const std::int64_t pair = static_cast<std::int64_t>(sender.index) * (n_ - 1) + r;
    const std::int64_t seg =
        static_cast<std::int64_t>(repetition) * n_ * (n_ - 1) * m_ + pair * m_ + object.index;
    return seg * segment_len();
}

ProcessorId EpochSchedule::phase3_owner(std::int64_t offset) const
{
    if (offset < 0 || offset >= phase_len_) {
        throw InvalidInput("phase 3 offset outside [0, L)");
    }
    return ProcessorId{static_cast<int>(offset / phase3_slot_len())};
}

RoundRole EpochSchedule::role_at(std::int64_t epoch_offset) const
{
    if (epoch_offset < 0 || epoch_offset >= epoch_len()) {
        throw InvalidInput("epoch offset outside [0, 3L)");
    }
    if (epoch_offset < phase_len_) {
        return phase1_role(epoch_offset);
    }
    if (epoch_offset < 2 * phase_len_) {
        return Phase2Role{};
    }
    return Phase3Role{phase3_owner(epoch_offset - 2 * phase_len_)};
}

// ---------------------------------------------------------------------------

std::string encode_type(const std::optional<TxType>& t, int m)
{
    if (m < 1 || m > kMaxObjects) {
        throw InvalidInput("encoding needs 1 <= m <= 64");
    }
    if (!t) {
        return std::string(static_cast<std::size_t>(m), '0');
    }
    if (t->span() > m) {
        throw InvalidInput("type names an object outside [0, m)");
    }
    return t->to_string(m);
}

std::optional<TxType> decode_type(std::string_view bits)
{
    if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxObjects)) {
        throw InvalidInput("encoded type must have 1..64 bits");
    }
    if (bits.find_first_not_of("01") != std::string_view::npos) {
        throw InvalidInput("encoded type must be a string of '0' and '1'");
    }
    if (bits.find('1') == std::string_view::npos) {
        return std::nullopt;
    }
    return TxType::parse(bits);
}

std::optional<TxId> channel_round_action(ChannelRole role, bool bit, ObjectId object, const ProcessorState& state)
{
    if (!state.active || !state.active->contains(object)) {
        return std::nullopt;
    }
    if (role == ChannelRole::sender && !bit) {
        return std::nullopt;
    }
    return state.oldest_of(*state.active);
}

ChannelBit read_channel_feedback(bool invoked, bool committed)
{
    if (!invoked) {
        return ChannelBit::no_information;
    }
    return committed ? ChannelBit::zero : ChannelBit::one;
}

// ---------------------------------------------------------------------------

ProcessorState::ProcessorState(ProcessorId id, int n, int m, std::int64_t block_size)
    : id_(id), n_(n), m_(m), block_size_(block_size)
{
    if (n < 1 || id.index < 0 || id.index >= n || m < 1 || m > kMaxObjects || block_size < 1) {
        throw InvalidInput("invalid processor state parameters");
    }
    known.assign(static_cast<std::size_t>(n), std::nullopt);
}

void ProcessorState::enqueue(const Transaction& t)
{
    auto& q = queues_.try_emplace(t.ttype).first->second;
    const QueuedTx entry{t.id, t.gen_round, t.ttype};
    const auto key = [](const QueuedTx& x) { return std::tie(x.gen_round, x.id); };
    if (!q.empty() && key(entry) < key(q.back())) {
        q.insert(std::upper_bound(q.begin(), q.end(), entry,
                                  [&](const QueuedTx& a, const QueuedTx& b) { return key(a) < key(b); }),
                 entry);
    } else {
        q.push_back(entry);
    }
    ++pending_;
}

void ProcessorState::remove(TxId id)
{
    for (auto it = queues_.begin(); it != queues_.end(); ++it) {
        auto& q = it->second;
        const auto pos = std::find_if(q.begin(), q.end(), [&](const QueuedTx& x) { return x.id == id; });
        if (pos != q.end()) {
            q.erase(pos);
            --pending_;
            if (q.empty()) {
                queues_.erase(it);
            }
            return;
        }
    }
}

const std::deque<QueuedTx>* ProcessorState::find(const TxType& t) const
{
    const auto it = queues_.find(t);
    return it == queues_.end() ? nullptr : &it->second;
}

std::size_t ProcessorState::count(const TxType& t) const
{
    const auto* q = find(t);
    return q ? q->size() : 0;
}

std::int64_t ProcessorState::large_block_count(const TxType& t) const
{
    return static_cast<std::int64_t>(count(t)) / block_size_;
}

bool ProcessorState::is_block_member(TxId id) const
{
    for (const auto& [type, q] : queues_) {
        const auto members = static_cast<std::size_t>(large_block_count(type) * block_size_);
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i].id == id) {
                return i < members;
            }
        }
    }
    return false;
}

std::optional<TxId> ProcessorState::oldest_of(const TxType& t) const
{
    const auto* q = find(t);
    if (!q || q->empty()) {
        return std::nullopt;
    }
    return q->front().id;
}

std::optional<TxId> ProcessorState::oldest_non_member() const
{
    const QueuedTx* best = nullptr;
    for (const auto& [type, q] : queues_) {
        const auto members = static_cast<std::size_t>(large_block_count(type) * block_size_);
        if (members < q.size()) {
            const auto& cand = q[members];
            if (!best || std::tie(cand.gen_round, cand.id) < std::tie(best->gen_round, best->id)) {
                best = &cand;
            }
        }
    }
    return best ? std::optional<TxId>(best->id) : std::nullopt;
}

std::optional<TxId> ProcessorState::oldest_any() const
{
    const QueuedTx* best = nullptr;
    for (const auto& [type, q] : queues_) {
        const auto& cand = q.front();
        if (!best || std::tie(cand.gen_round, cand.id) < std::tie(best->gen_round, best->id)) {
            best = &cand;
        }
    }
    return best ? std::optional<TxId>(best->id) : std::nullopt;
}

std::vector<TxType> ProcessorState::large_types() const
{
    struct Entry {
        Round newest;
        std::string bits;
        TxType type;
    };
    std::vector<Entry> entries;
    for (const auto& [type, q] : queues_) {
        if (static_cast<std::int64_t>(q.size()) >= block_size_) {
            Round newest = 0;
            for (const auto& x : q) {
                newest = std::max(newest, x.gen_round);
            }
            entries.push_back(Entry{newest, type.to_string(m_), type});
        }
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::tie(a.newest, a.bits) < std::tie(b.newest, b.bits); });
    std::vector<TxType> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        out.push_back(e.type);
    }
    return out;
}

std::optional<TxType> select_active_block(const ProcessorState& state)
{
    auto large = state.large_types();
    if (large.empty()) {
        return std::nullopt;
    }
    return large.front();
}

std::vector<ProcessorId> greedy_select_active_types(std::span<const std::pair<ProcessorId, TxType>> known)
{
    std::vector<ProcessorId> out;
    std::uint64_t used = 0;
    for (const auto& [p, t] : known) {
        if ((used & t.mask()) == 0) {
            used |= t.mask();
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

EpochLayout EpochLayout::for_system(int n, int m)
{
    EpochLayout layout;
    layout.n = n;
    layout.m = m;
    if (n == 1) {
        return layout;
    }
    const auto L = large_block_threshold(n, m);
    layout.block_size = L;
    layout.phase1_len = L;
    layout.phase_len = L;
    return layout;
}

namespace {

std::vector<ProcessorId> own_selection(const ProcessorState& state)
{
    std::vector<std::pair<ProcessorId, TxType>> entries;
    for (std::size_t p = 0; p < state.known.size(); ++p) {
        if (state.known[p]) {
            entries.emplace_back(ProcessorId{static_cast<int>(p)}, *state.known[p]);
        }
    }
    return greedy_select_active_types(entries);
}

void apply_feedback(ProcessorState& state, std::optional<Feedback> feedback)
{
    using Kind = ProcessorState::LastAction::Kind;
    auto& last = state.last;
    state.last_decoded.reset();
    if (last.tx && feedback && feedback->id == *last.tx && feedback->committed) {
        state.remove(*last.tx);
    }
    if (last.kind == Kind::channel_receive) {
        const auto bit = read_channel_feedback(last.tx.has_value() && feedback.has_value(),
                                               feedback.has_value() && feedback->committed);
        state.rx_bits[static_cast<std::size_t>(last.bit)] = bit == ChannelBit::one ? '1' : '0';
        if (last.bit == state.m() - 1) {
            const auto decoded = decode_type(state.rx_bits);
            if (decoded) {
                state.known[static_cast<std::size_t>(last.slot.index)] = decoded;
            }
            state.last_decoded = ProcessorState::Decoded{last.slot, state.rx_bits};
        }
    }
    last = ProcessorState::LastAction{};
}

TxId require(std::optional<TxId> tx, const ProcessorState& state, Round round)
{
    if (!tx) {
        throw std::logic_error("round " + std::to_string(round) + ": processor " + std::to_string(state.id().index) +
                               " must invoke on its active type but its queue is empty");
    }
    return *tx;
}

}  // namespace

std::optional<TxId> distributed_processor_step(ProcessorState& state, const EpochLayout& layout,
                                               const EpochSchedule* schedule, const DistributedOptions& options,
                                               Round round, std::optional<Feedback> feedback)
{
    using Kind = ProcessorState::LastAction::Kind;
    if (layout.n > 1 && !schedule) {
        throw InvalidInput("an epoch schedule is required for n >= 2");
    }
    apply_feedback(state, feedback);

    const std::int64_t offset = (round - 1) % layout.epoch_len();
    if (offset == 0) {
        state.active = select_active_block(state);
        state.known.assign(static_cast<std::size_t>(layout.n), std::nullopt);
        if (state.active) {
            state.known[static_cast<std::size_t>(state.id().index)] = state.active;
        }
        state.selected = false;
        state.rx_bits.assign(static_cast<std::size_t>(layout.m), '0');
    }
    if (offset == layout.phase1_len) {
        const auto sel = own_selection(state);
        state.selected =
            state.active.has_value() && std::find(sel.begin(), sel.end(), state.id()) != sel.end();
    }

    auto& last = state.last;
    if (offset < layout.phase1_len) {
        const auto role = schedule->phase1_role(offset);
        if (!state.active || !state.active->contains(role.object)) {
            return std::nullopt;
        }
        if (state.id() == role.sender) {
            const auto bits = encode_type(state.known[static_cast<std::size_t>(role.slot.index)], layout.m);
            const bool bit = bits[static_cast<std::size_t>(role.bit)] == '1';
            if (!bit) {
                return std::nullopt;
            }
            last.kind = Kind::channel_send;
            last.tx = require(channel_round_action(ChannelRole::sender, true, role.object, state), state, round);
            return last.tx;
        }
        if (state.id() == role.receiver) {
            if (role.bit == 0) {
                state.rx_bits.assign(static_cast<std::size_t>(layout.m), '0');
            }
            last.kind = Kind::channel_receive;
            last.slot = role.slot;
            last.bit = role.bit;
            last.tx = require(channel_round_action(ChannelRole::receiver, false, role.object, state), state, round);
            return last.tx;
        }
        return std::nullopt;
    }

    if (offset < layout.phase1_len + layout.phase_len) {
        if (!state.selected) {
            return std::nullopt;
        }
        const auto tx = state.oldest_of(*state.active);
        if (tx) {
            last.kind = Kind::phase2;
            last.tx = tx;
        }
        return tx;
    }

    const std::int64_t p3 = offset - layout.phase1_len - layout.phase_len;
    const ProcessorId owner = schedule ? schedule->phase3_owner(p3) : ProcessorId{0};
    if (owner != state.id()) {
        return std::nullopt;
    }
    auto tx = state.oldest_non_member();
    if (!tx && options.phase3_serves_block_members) {
        tx = state.oldest_any();
    }
    if (tx) {
        last.kind = Kind::phase3;
        last.tx = tx;
    }
    return tx;
}

// ---------------------------------------------------------------------------

DistributedScheduler::DistributedScheduler(int n, int m, DistributedOptions options)
    : layout_(EpochLayout::for_system(n, m)), options_(options)
{
    if (n >= 2) {
        schedule_.emplace(n, m);
    }
    processors_.reserve(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) {
        processors_.emplace_back(ProcessorId{p}, n, m, layout_.block_size);
    }
    phase1_spent_.assign(static_cast<std::size_t>(n), 0);
}

Phase EpochLayout::phase_of(Round round) const
{
    const std::int64_t offset = offset_of(round);
    if (offset < phase1_len) {
        return Phase::one;
    }
    if (offset < phase1_len + phase_len) {
        return Phase::two;
    }
    return Phase::three;
}

std::vector<TxId> DistributedScheduler::on_round(Round round, std::span<const Transaction> newly_visible,
                                                 std::span<const Feedback> feedback)
{
    const auto n = processors_.size();
    for (const auto& t : newly_visible) {
        if (!t.owner || t.owner->index < 0 || static_cast<std::size_t>(t.owner->index) >= n) {
            throw InvalidInput("transaction " + std::to_string(t.id) + " has no valid owner processor");
        }
        processors_[static_cast<std::size_t>(t.owner->index)].enqueue(t);
    }

    // Route each feedback bit to the processor that invoked it last round.
    std::vector<std::optional<Feedback>> routed(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& last = processors_[p].last;
        if (!last.tx) {
            continue;
        }
        for (const auto& fb : feedback) {
            if (fb.id == *last.tx) {
                routed[p] = fb;
            }
        }
    }
    if (last_phase_) {
        auto& tally = tallies_[static_cast<std::size_t>(*last_phase_) - 1];
        for (std::size_t p = 0; p < n; ++p) {
            if (!routed[p]) {
                continue;
            }
            if (routed[p]->committed) {
                ++tally.commits;
                if (*last_phase_ == Phase::one) {
                    ++phase1_spent_[p];
                }
            } else {
                ++tally.aborts;
            }
        }
    }

    const std::int64_t offset = (round - 1) % layout_.epoch_len();
    const Phase phase = layout_.phase_of(round);
    if (offset == 0) {
        for (auto spent : phase1_spent_) {
            max_phase1_consumption_ = std::max(max_phase1_consumption_, spent);
        }
        std::fill(phase1_spent_.begin(), phase1_spent_.end(), 0);
    }

    std::vector<TxId> ids;
    std::ostringstream note;
    note << 'e' << (round - 1) / layout_.epoch_len() << " p" << static_cast<int>(phase);
    for (std::size_t p = 0; p < n; ++p) {
        const auto tx = distributed_processor_step(processors_[p], layout_, schedule_ ? &*schedule_ : nullptr,
                                                   options_, round, routed[p]);
        if (tx) {
            ids.push_back(*tx);
        }
        if (const auto& d = processors_[p].last_decoded) {
            note << " rx" << p << "[slot" << d->slot.index << "]=" << d->bits;
        }
    }
    if (phase == Phase::one) {
        const auto role = schedule_->phase1_role(offset);
        note << " seg " << role.repetition << ':' << role.sender.index << '>' << role.receiver.index << "@o"
             << role.object.index << " slot" << role.slot.index << " bit" << role.bit;
    } else if (phase == Phase::three) {
        const auto p3 = offset - layout_.phase1_len - layout_.phase_len;
        note << " owner " << (schedule_ ? schedule_->phase3_owner(p3).index : 0);
    }

    if (offset == layout_.phase1_len) {
        EpochRecord rec;
        rec.epoch = (round - 1) / layout_.epoch_len();
        rec.phase2_start = round;
        note << " selected";
        for (const auto& s : processors_) {
            rec.actives.push_back(s.active);
            rec.known.push_back(s.known);
            rec.selections.push_back(s.active ? own_selection(s) : std::vector<ProcessorId>{});
            rec.selected.push_back(s.selected ? 1 : 0);
            if (s.selected) {
                note << ' ' << s.id().index;
            }
        }
        epochs_.push_back(std::move(rec));
    }

    tallies_[static_cast<std::size_t>(phase) - 1].invocations += static_cast<std::int64_t>(ids.size());
    last_phase_ = phase;
    std::sort(ids.begin(), ids.end());
    note_ = note.str();
    return ids;
}

}  // namespace tmsched
