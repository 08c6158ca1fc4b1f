#include "tmsched/engine.hpp"

#include <algorithm>

namespace tmsched {

SymmetryReport queue_free_symmetry_demo(const ThreadPolicy& policy, Round horizon)
{
    SymmetryReport report;
    report.policy = policy.name;
    report.rounds.reserve(static_cast<std::size_t>(std::max<Round>(horizon, 0)));

    const TxType only_object = TxType::of({0});
    std::uint64_t state[2] = {policy.initial_state, policy.initial_state};
    ThreadFeedback last[2] = {ThreadFeedback::none, ThreadFeedback::none};
    bool pending[2] = {true, true};

    for (Round r = 1; r <= horizon; ++r) {
        SymmetryRound row;
        row.round = r;
        std::vector<Transaction> invoked;
        PolicyStep steps[2];
        for (int i = 0; i < 2; ++i) {
            row.state[i] = state[i];
            steps[i] = policy.step(state[i], r, last[i]);
            if (!pending[i]) {
                steps[i].action = ThreadAction::pause;
            }
            row.action[i] = steps[i].action;
            if (steps[i].action == ThreadAction::invoke) {
                invoked.push_back(Transaction{i, only_object, 0, std::nullopt, std::nullopt});
            }
        }
        if (row.state[0] != row.state[1]) {
            report.states_equal_throughout = false;
        }

        const RoundOutcome outcome = resolve_round(invoked);
        for (int i = 0; i < 2; ++i) {
            if (row.action[i] == ThreadAction::pause) {
                row.feedback[i] = ThreadFeedback::none;
            } else if (std::find(outcome.committed.begin(), outcome.committed.end(), i) != outcome.committed.end()) {
                row.feedback[i] = ThreadFeedback::committed;
                pending[i] = false;
                ++report.commits;
            } else {
                row.feedback[i] = ThreadFeedback::aborted;
            }
            last[i] = row.feedback[i];
            state[i] = steps[i].next_state;
        }
        if (outcome.aborted.size() == 2) {
            ++report.mutual_aborts;
        }
        report.rounds.push_back(row);
    }
    return report;
}

std::vector<ThreadPolicy> sample_thread_policies()
{
    std::vector<ThreadPolicy> out;

    out.push_back({"always-invoke", 0, [](std::uint64_t s, Round, ThreadFeedback) {
                       return PolicyStep{ThreadAction::invoke, s + 1};
                   }});

    out.push_back({"alternate", 0, [](std::uint64_t s, Round, ThreadFeedback) {
                       return PolicyStep{(s % 2 == 0) ? ThreadAction::pause : ThreadAction::invoke, s + 1};
                   }});

    // state = (window << 32) | countdown; wait out the countdown, then invoke
    // and double the window after every abort.
    out.push_back({"binary-backoff", (std::uint64_t{1} << 32), [](std::uint64_t s, Round, ThreadFeedback last) {
                       std::uint64_t window = s >> 32;
                       std::uint64_t countdown = s & 0xffffffffU;
                       if (last == ThreadFeedback::aborted) {
                           window = std::min<std::uint64_t>(window * 2, 1024);
                           countdown = window;
                       }
                       if (countdown > 0) {
                           return PolicyStep{ThreadAction::pause, (window << 32) | (countdown - 1)};
                       }
                       return PolicyStep{ThreadAction::invoke, (window << 32)};
                   }});

    out.push_back({"every-third-round", 0, [](std::uint64_t s, Round r, ThreadFeedback) {
                       return PolicyStep{(r % 3 == 0) ? ThreadAction::invoke : ThreadAction::pause, s ^ static_cast<std::uint64_t>(r)};
                   }});

    // state = aborts seen so far; after the j-th abort pause j rounds.
    out.push_back({"linear-backoff", 0, [](std::uint64_t s, Round, ThreadFeedback last) {
                       const std::uint64_t aborts = (s >> 32) + (last == ThreadFeedback::aborted ? 1 : 0);
                       std::uint64_t wait = s & 0xffffffffU;
                       if (last == ThreadFeedback::aborted) {
                           wait = aborts;
                       }
                       if (wait > 0) {
                           return PolicyStep{ThreadAction::pause, (aborts << 32) | (wait - 1)};
                       }
                       return PolicyStep{ThreadAction::invoke, aborts << 32};
                   }});
    return out;
}

}  // namespace tmsched
