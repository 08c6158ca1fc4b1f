#include "tmsched/engine.hpp"

#include "tmsched/errors.hpp"

#include <algorithm>
#include <array>

namespace tmsched {

RoundOutcome resolve_round(std::span<const Transaction> invocations)
{
    RoundOutcome out;
    std::array<int, kMaxObjects> users{};
    for (const auto& t : invocations) {
        for (std::uint64_t rest = t.ttype.mask(); rest != 0; rest &= rest - 1) {
            ++users[static_cast<std::size_t>(std::countr_zero(rest))];
        }
        out.invoked.push_back(t.id);
    }
    std::sort(out.invoked.begin(), out.invoked.end());
    if (std::adjacent_find(out.invoked.begin(), out.invoked.end()) != out.invoked.end()) {
        throw InvalidInput("duplicate transaction id in one round's invocations");
    }
    for (const auto& t : invocations) {
        bool alone = true;
        for (std::uint64_t rest = t.ttype.mask(); rest != 0; rest &= rest - 1) {
            if (users[static_cast<std::size_t>(std::countr_zero(rest))] > 1) {
                alone = false;
                break;
            }
        }
        (alone ? out.committed : out.aborted).push_back(t.id);
    }
    std::sort(out.committed.begin(), out.committed.end());
    std::sort(out.aborted.begin(), out.aborted.end());
    return out;
}

Trace run_simulation(const SystemConfig& config, Scheduler& scheduler, Generator& generator)
{
    config.validate();
    const AutonomyModel model = generator.model();
    const bool queue_based = model == AutonomyModel::queue_based;

    Trace trace;
    trace.config = config;
    trace.model = model;
    trace.rounds.reserve(static_cast<std::size_t>(config.horizon));

    std::vector<Transaction>& txs = trace.transactions;
    std::vector<Feedback> feedback;
    std::vector<Transaction> visible;
    std::vector<Transaction> invoked;
    std::vector<std::uint8_t> owner_busy(static_cast<std::size_t>(config.n), 0);
    const std::uint64_t object_limit =
        config.m == kMaxObjects ? ~std::uint64_t{0} : (std::uint64_t{1} << config.m) - 1;
    std::int64_t pending = 0;

    for (Round r = 1; r <= config.horizon; ++r) {
        RoundRecord record;
        record.round = r;

        for (auto& g : generator.emit(r)) {
            if ((g.ttype.mask() & ~object_limit) != 0) {
                throw InvalidInput("round " + std::to_string(r) + ": generated type uses an object >= m");
            }
            if (g.ttype.weight() > config.k) {
                throw InvalidInput("round " + std::to_string(r) + ": generated type weight " +
                                   std::to_string(g.ttype.weight()) + " exceeds k=" + std::to_string(config.k));
            }
            if (g.owner.has_value() != queue_based) {
                throw InvalidInput("round " + std::to_string(r) + ": owner must be present iff queue-based");
            }
            if (g.owner && (g.owner->index < 0 || g.owner->index >= config.n)) {
                throw InvalidInput("round " + std::to_string(r) + ": owner p" + std::to_string(g.owner->index) +
                                   " outside [0, n)");
            }
            Transaction t{static_cast<TxId>(txs.size()), g.ttype, r, g.owner, std::nullopt};
            txs.push_back(t);
            record.generated.push_back(t);
        }

        const auto ids = scheduler.on_round(r, visible, feedback);
        record.note = scheduler.annotation();

        invoked.clear();
        std::fill(owner_busy.begin(), owner_busy.end(), 0);
        for (TxId id : ids) {
            const std::string where = "round " + std::to_string(r) + ": transaction " + std::to_string(id);
            if (id < 0 || id >= static_cast<TxId>(txs.size())) {
                throw ProtocolViolation(where + " does not exist");
            }
            const Transaction& t = txs[static_cast<std::size_t>(id)];
            if (t.gen_round >= r) {
                throw ProtocolViolation(where + " is not yet visible");
            }
            if (t.commit_round) {
                throw ProtocolViolation(where + " already committed");
            }
            if (queue_based) {
                auto& busy = owner_busy[static_cast<std::size_t>(t.owner->index)];
                if (busy != 0) {
                    throw ProtocolViolation(where + " is a second invocation by processor p" +
                                            std::to_string(t.owner->index));
                }
                busy = 1;
            }
            invoked.push_back(t);
        }

        try {
            record.outcome = resolve_round(invoked);
        } catch (const InvalidInput&) {
            throw ProtocolViolation("round " + std::to_string(r) + ": a transaction was invoked twice");
        }
        record.outcome.round = r;
        for (TxId id : record.outcome.committed) {
            txs[static_cast<std::size_t>(id)].commit_round = r;
        }

        feedback.clear();
        for (TxId id : ids) {
            feedback.push_back(Feedback{id, txs[static_cast<std::size_t>(id)].commit_round.has_value()});
        }
        visible = record.generated;

        pending += static_cast<std::int64_t>(record.generated.size());
        pending -= static_cast<std::int64_t>(record.outcome.committed.size());
        record.pending = pending;
        trace.rounds.push_back(std::move(record));
    }
    return trace;
}

}  // namespace tmsched
