#pragma once

#include "tmsched/engine.hpp"
#include "tmsched/model.hpp"
#include "tmsched/random.hpp"
#include "tmsched/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tmsched {

/// Adversary of type (rho, b): over every window of t rounds each object (and
/// each processor, queue-based) receives at most rho*t + b congestion.
struct AdversaryParams {
    Rational rho{1, 2};
    std::int64_t b = 1;
    AutonomyModel model = AutonomyModel::queue_free;

    /// Throws InvalidInput unless 0 < rho <= 1 and b >= 1.
    void validate() const;

    bool operator==(const AdversaryParams&) const = default;
};

/// Per-round generations as an adversary produced them. rounds[r-1] holds
/// round r.
struct GenerationStream {
    int m = 1;
    int n = 1;
    AutonomyModel model = AutonomyModel::queue_free;
    std::vector<std::vector<Generation>> rounds;

    bool operator==(const GenerationStream&) const = default;
};

/// Objects are entities 0..m-1; processors follow as m..m+n-1.
struct Entity {
    enum class Kind { object, processor };
    Kind kind = Kind::object;
    int index = 0;

    std::string to_string() const;
    bool operator==(const Entity&) const = default;
};

struct WindowViolation {
    Entity entity;
    Round first = 0;  // inclusive
    Round last = 0;   // inclusive
    std::int64_t congestion = 0;
    Rational bound;  // rho * (last - first + 1) + b

    bool operator==(const WindowViolation&) const = default;
};

/// Admissible, or the first violation: smallest window end, then entity
/// order, then earliest window start.
struct AdmissibilityVerdict {
    std::optional<WindowViolation> violation;

    bool admissible() const { return !violation.has_value(); }
    bool operator==(const AdmissibilityVerdict&) const = default;
};

/// Exact window check in O(T) per entity. For every entity it tracks the
/// running minimum of q*prefix(s) - p*s, so a window (s, e] violates iff
/// q*prefix(e) - p*e - min_s > q*b, with rho = p/q.
AdmissibilityVerdict verify_admissibility(const GenerationStream& stream, const AdversaryParams& params);

/// Incremental form of the same constraint, used by generators that must stay
/// admissible: can_admit() answers whether one more transaction in the
/// current round keeps every window ending now within rho*t + b.
class CongestionLedger {
public:
    CongestionLedger(const AdversaryParams& params, int m, int n);

    /// Must be called with rounds 1, 2, 3, ... before admitting.
    void begin_round(Round round);
    bool can_admit(const Generation& g) const;
    void admit(const Generation& g);

    std::int64_t congestion(const Entity& e) const;

private:
    struct Counter {
        std::int64_t cumulative = 0;
        WideInt min_prefix = 0;  // min over s < current round of q*cum(s) - p*s
    };

    bool fits(const Counter& c) const;
    Counter& counter(const Entity& e);
    const Counter& counter(const Entity& e) const;

    AdversaryParams params_;
    int m_;
    Round round_ = 0;
    std::vector<Counter> counters_;  // objects, then processors
};

/// How a token-bucket adversary proposes candidate transactions.
struct WorkloadShape {
    enum class Kind { uniform, cycle };

    Kind kind = Kind::uniform;
    /// uniform: random weight in [1, max_weight], random distinct objects.
    int max_weight = 1;
    /// uniform: candidates drawn per round; refused candidates are dropped.
    int attempts_per_round = 1;
    /// cycle: candidates taken in order, greedily, until one is refused.
    std::vector<TxType> types;

    static WorkloadShape uniform(int max_weight, int attempts_per_round);
    static WorkloadShape cycle(std::vector<TxType> types);
    static WorkloadShape greedy_singleton(ObjectId object);

    bool operator==(const WorkloadShape&) const = default;
};

/// Token buckets of rate rho and capacity rho + b on every object (and every
/// processor, queue-based). A candidate is emitted only if each bucket it
/// touches holds a whole token; each is then debited one. Queue-based
/// owners go to the least-loaded processor with a token, ties by index.
class TokenBucketGenerator final : public Generator {
public:
    /// Throws InvalidInput on invalid params or a shape that names objects >= m.
    TokenBucketGenerator(const AdversaryParams& params, WorkloadShape shape, int m, int n, std::uint64_t seed);

    std::vector<Generation> emit(Round round) override;
    AutonomyModel model() const override { return params_.model; }

private:
    std::optional<Generation> try_emit(const TxType& t);
    TxType random_type();

    AdversaryParams params_;
    WorkloadShape shape_;
    int m_;
    int n_;
    Rng rng_;
    Rational capacity_;
    std::vector<Rational> tokens_;         // objects, then processors
    std::vector<std::int64_t> assigned_;   // per processor
    std::size_t cycle_pos_ = 0;
};

/// Full-power adversary built from the set family: types T_1..T_{w+1} on
/// objects 0..w(w+1)/2-1, emitted as the cyclic sequence L_0, L_1, ... with
/// each round taking the longest prefix that keeps every object admissible.
/// Round 1 stops after L_{b-1}.
/// Every pair of these types collides, so at most one commits per round.
class LowerBoundGenerator final : public Generator {
public:
    /// Throws InvalidInput for queue-based params or k outside [1, m].
    LowerBoundGenerator(const AdversaryParams& params, int m, int k);

    std::vector<Generation> emit(Round round) override;
    AutonomyModel model() const override { return AutonomyModel::queue_free; }

    int family_size() const { return family_n_; }
    const std::vector<TxType>& types() const { return types_; }

private:
    AdversaryParams params_;
    int family_n_;
    std::vector<TxType> types_;
    CongestionLedger ledger_;
    std::int64_t next_ = 0;
};

/// Replays a recorded stream; rounds past its end emit nothing.
class ReplayGenerator final : public Generator {
public:
    explicit ReplayGenerator(GenerationStream stream) : stream_(std::move(stream)) {}

    std::vector<Generation> emit(Round round) override;
    AutonomyModel model() const override { return stream_.model; }

private:
    GenerationStream stream_;
};

/// Largest w with w(w+1)/2 <= m, capped at k.
int lower_bound_family_size(int m, int k);

/// Drains a generator for the given number of rounds.
GenerationStream record_stream(Generator& generator, int m, int n, Round rounds);

}  // namespace tmsched
