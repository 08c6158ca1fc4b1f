#pragma once

#include "tmsched/engine.hpp"
#include "tmsched/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace tmsched {

/// Pending transactions, oldest first by (gen_round, id).
using PendingList = std::vector<Transaction>;

struct ExecuteSelection {
    std::vector<Transaction> execute;
    PendingList remaining;
};

/// Scans head to tail and takes every transaction that does not collide with
/// one already taken. The result is conflict-free and maximal in pending.
ExecuteSelection select_execute_set(std::span<const Transaction> pending);

/// Greedy en-masse scheduler over the global pending list. It never invokes
/// two colliding transactions, so no invocation aborts.
class CentralizedScheduler final : public Scheduler {
public:
    std::vector<TxId> on_round(Round round, std::span<const Transaction> newly_visible,
                               std::span<const Feedback> feedback) override;

    const PendingList& pending() const { return pending_; }

private:
    PendingList pending_;
    std::vector<Transaction> in_flight_;
};

struct CentralizedBounds {
    Rational rho_max;             // max{1/(4k), 1/(4 ceil(sqrt m))}, inclusive
    std::int64_t pending_bound;   // 4bm
    std::int64_t latency_bound;   // 8b min{k, ceil(sqrt m)}
    std::int64_t milestone_len;   // 4b min{k, ceil(sqrt m)}
};

CentralizedBounds centralized_bounds(int m, int k, std::int64_t b);

/// Smallest integer r with r*r >= x.
std::int64_t ceil_sqrt(std::int64_t x);

}  // namespace tmsched
