#include "tmsched/centralized.hpp"

#include "tmsched/errors.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace tmsched {

namespace {

bool older(const Transaction& a, const Transaction& b)
{
    return std::tie(a.gen_round, a.id) < std::tie(b.gen_round, b.id);
}

}  // namespace

ExecuteSelection select_execute_set(std::span<const Transaction> pending)
{
    ExecuteSelection out;
    std::uint64_t used = 0;
    for (const auto& t : pending) {
        if ((used & t.ttype.mask()) == 0) {
            used |= t.ttype.mask();
            out.execute.push_back(t);
        } else {
            out.remaining.push_back(t);
        }
    }
    return out;
}

std::vector<TxId> CentralizedScheduler::on_round(Round, std::span<const Transaction> newly_visible,
                                                 std::span<const Feedback> feedback)
{
    // An abort cannot happen under this selection rule, but a caller driving
    // the scheduler by hand may still report one; the transaction goes back
    // to its place in arrival order.
    for (const auto& fb : feedback) {
        if (fb.committed) {
            continue;
        }
        const auto it = std::find_if(in_flight_.begin(), in_flight_.end(),
                                     [&](const Transaction& t) { return t.id == fb.id; });
        if (it != in_flight_.end()) {
            pending_.insert(std::upper_bound(pending_.begin(), pending_.end(), *it, older), *it);
        }
    }
    in_flight_.clear();

    for (const auto& t : newly_visible) {
        if (!pending_.empty() && older(t, pending_.back())) {
            pending_.insert(std::upper_bound(pending_.begin(), pending_.end(), t, older), t);
        } else {
            pending_.push_back(t);
        }
    }

    auto selection = select_execute_set(pending_);
    pending_ = std::move(selection.remaining);
    in_flight_ = std::move(selection.execute);

    std::vector<TxId> ids;
    ids.reserve(in_flight_.size());
    for (const auto& t : in_flight_) {
        ids.push_back(t.id);
    }
    return ids;
}

std::int64_t ceil_sqrt(std::int64_t x)
{
    if (x < 0) {
        throw InvalidInput("ceil_sqrt of a negative number");
    }
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
    while (r * r < x) {
        ++r;
    }
    while (r > 0 && (r - 1) * (r - 1) >= x) {
        --r;
    }
    return r;
}

CentralizedBounds centralized_bounds(int m, int k, std::int64_t b)
{
    if (m < 1 || k < 1 || k > m || b < 1) {
        throw InvalidInput("centralized bounds need 1 <= k <= m and b >= 1");
    }
    const std::int64_t root = ceil_sqrt(m);
    const std::int64_t short_side = std::min<std::int64_t>(k, root);
    return CentralizedBounds{
        std::max(Rational(1, 4 * k), Rational(1, 4 * root)),
        4 * b * m,
        8 * b * short_side,
        4 * b * short_side,
    };
}

}  // namespace tmsched
