#include "tmsched/adversary.hpp"

#include "tmsched/combinatorics.hpp"
#include "tmsched/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace tmsched {

void AdversaryParams::validate() const
{
    if (rho <= Rational(0) || rho > Rational(1)) {
        throw InvalidInput("rho must satisfy 0 < rho <= 1, got " + tmsched::to_string(rho));
    }
    if (b < 1) {
        throw InvalidInput("b must be at least 1, got " + std::to_string(b));
    }
}

std::string Entity::to_string() const
{
    return (kind == Kind::object ? "object o" : "processor p") + std::to_string(index);
}

namespace {

std::vector<Entity> entities_of(int m, int n, AutonomyModel model)
{
    std::vector<Entity> out;
    for (int o = 0; o < m; ++o) {
        out.push_back({Entity::Kind::object, o});
    }
    if (model == AutonomyModel::queue_based) {
        for (int p = 0; p < n; ++p) {
            out.push_back({Entity::Kind::processor, p});
        }
    }
    return out;
}

std::int64_t charge(const Generation& g, const Entity& e)
{
    if (e.kind == Entity::Kind::object) {
        return g.ttype.contains(ObjectId{e.index}) ? 1 : 0;
    }
    return (g.owner && g.owner->index == e.index) ? 1 : 0;
}

}  // namespace

AdmissibilityVerdict verify_admissibility(const GenerationStream& stream, const AdversaryParams& params)
{
    params.validate();
    const WideInt p = params.rho.numerator();
    const WideInt q = params.rho.denominator();
    const WideInt slack = q * params.b;
    const auto entities = entities_of(stream.m, stream.n, params.model);
    const auto horizon = static_cast<Round>(stream.rounds.size());

    // per entity: prefix sums and the running minimum of D(s) = q*prefix(s) - p*s
    const std::size_t count = entities.size();
    std::vector<std::vector<std::int64_t>> prefix(count, std::vector<std::int64_t>(1, 0));
    std::vector<WideInt> min_d(count, 0);

    for (Round e = 1; e <= horizon; ++e) {
        const auto& gens = stream.rounds[static_cast<std::size_t>(e - 1)];
        for (std::size_t i = 0; i < count; ++i) {
            std::int64_t add = 0;
            for (const auto& g : gens) {
                add += charge(g, entities[i]);
            }
            prefix[i].push_back(prefix[i].back() + add);
            const WideInt d_end = q * prefix[i].back() - p * e;
            if (d_end - min_d[i] > slack) {
                // earliest start s with D(e) - D(s) > q*b
                for (Round s = 0; s < e; ++s) {
                    const WideInt d_start = q * prefix[i][static_cast<std::size_t>(s)] - p * s;
                    if (d_end - d_start > slack) {
                        const Round length = e - s;
                        WindowViolation v{entities[i], s + 1, e,
                                          prefix[i].back() - prefix[i][static_cast<std::size_t>(s)],
                                          params.rho * Rational(length) + Rational(params.b)};
                        return AdmissibilityVerdict{v};
                    }
                }
            }
            min_d[i] = std::min(min_d[i], d_end);
        }
    }
    return {};
}

CongestionLedger::CongestionLedger(const AdversaryParams& params, int m, int n)
    : params_(params),
      m_(m),
      counters_(static_cast<std::size_t>(m + (params.model == AutonomyModel::queue_based ? n : 0)))
{
    params_.validate();
}

void CongestionLedger::begin_round(Round round)
{
    if (round != round_ + 1) {
        throw InvalidInput("ledger rounds must advance one at a time");
    }
    const WideInt p = params_.rho.numerator();
    const WideInt q = params_.rho.denominator();
    for (auto& c : counters_) {
        // fold D(round - 1) into the minimum over window starts
        c.min_prefix = std::min(c.min_prefix, q * c.cumulative - p * round_);
    }
    round_ = round;
}

bool CongestionLedger::fits(const Counter& c) const
{
    const WideInt p = params_.rho.numerator();
    const WideInt q = params_.rho.denominator();
    return q * (c.cumulative + 1) - p * round_ - c.min_prefix <= q * params_.b;
}

bool CongestionLedger::can_admit(const Generation& g) const
{
    for (const ObjectId o : g.ttype.objects()) {
        if (o.index >= m_ || !fits(counters_[static_cast<std::size_t>(o.index)])) {
            return false;
        }
    }
    if (params_.model == AutonomyModel::queue_based) {
        if (!g.owner) {
            return false;
        }
        const auto slot = static_cast<std::size_t>(m_ + g.owner->index);
        if (slot >= counters_.size() || !fits(counters_[slot])) {
            return false;
        }
    }
    return true;
}

void CongestionLedger::admit(const Generation& g)
{
    for (const ObjectId o : g.ttype.objects()) {
        ++counters_.at(static_cast<std::size_t>(o.index)).cumulative;
    }
    if (params_.model == AutonomyModel::queue_based && g.owner) {
        ++counters_.at(static_cast<std::size_t>(m_ + g.owner->index)).cumulative;
    }
}

std::int64_t CongestionLedger::congestion(const Entity& e) const
{
    return counter(e).cumulative;
}

CongestionLedger::Counter& CongestionLedger::counter(const Entity& e)
{
    return counters_.at(static_cast<std::size_t>(e.kind == Entity::Kind::object ? e.index : m_ + e.index));
}

const CongestionLedger::Counter& CongestionLedger::counter(const Entity& e) const
{
    return counters_.at(static_cast<std::size_t>(e.kind == Entity::Kind::object ? e.index : m_ + e.index));
}

WorkloadShape WorkloadShape::uniform(int max_weight, int attempts_per_round)
{
    WorkloadShape s;
    s.kind = Kind::uniform;
    s.max_weight = max_weight;
    s.attempts_per_round = attempts_per_round;
    return s;
}

WorkloadShape WorkloadShape::cycle(std::vector<TxType> types)
{
    WorkloadShape s;
    s.kind = Kind::cycle;
    s.types = std::move(types);
    return s;
}

WorkloadShape WorkloadShape::greedy_singleton(ObjectId object)
{
    if (object.index < 0 || object.index >= kMaxObjects) {
        throw InvalidInput("object index " + std::to_string(object.index) + " out of range");
    }
    return cycle({TxType::from_mask(std::uint64_t{1} << object.index)});
}

TokenBucketGenerator::TokenBucketGenerator(const AdversaryParams& params, WorkloadShape shape, int m, int n,
                                           std::uint64_t seed)
    : params_(params), shape_(std::move(shape)), m_(m), n_(n), rng_(seed)
{
    params_.validate();
    if (m < 1 || m > kMaxObjects || n < 1) {
        throw InvalidInput("token bucket needs 1 <= m <= 64 and n >= 1");
    }
    if (shape_.kind == WorkloadShape::Kind::uniform) {
        if (shape_.max_weight < 1 || shape_.max_weight > m) {
            throw InvalidInput("shape max weight " + std::to_string(shape_.max_weight) + " outside [1, m]");
        }
        if (shape_.attempts_per_round < 0) {
            throw InvalidInput("shape attempts per round must be nonnegative");
        }
    } else {
        if (shape_.types.empty()) {
            throw InvalidInput("cycle shape needs at least one type");
        }
        for (const auto& t : shape_.types) {
            if (t.span() > m) {
                throw InvalidInput("shape type " + t.to_string(t.span()) + " references an object >= m=" +
                                   std::to_string(m));
            }
        }
    }
    capacity_ = params_.rho + Rational(params_.b);
    const std::size_t buckets =
        static_cast<std::size_t>(m + (params_.model == AutonomyModel::queue_based ? n : 0));
    tokens_.assign(buckets, Rational(params_.b));
    assigned_.assign(static_cast<std::size_t>(n), 0);
}

TxType TokenBucketGenerator::random_type()
{
    const int w = static_cast<int>(rng_.between(1, shape_.max_weight));
    std::vector<int> pool(static_cast<std::size_t>(m_));
    std::iota(pool.begin(), pool.end(), 0);
    std::uint64_t mask = 0;
    for (int i = 0; i < w; ++i) {
        const auto j = static_cast<std::size_t>(i) + rng_.below(static_cast<std::uint64_t>(m_ - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        mask |= std::uint64_t{1} << pool[static_cast<std::size_t>(i)];
    }
    return TxType::from_mask(mask);
}

std::optional<Generation> TokenBucketGenerator::try_emit(const TxType& t)
{
    const Rational one(1);
    for (const ObjectId o : t.objects()) {
        if (tokens_[static_cast<std::size_t>(o.index)] < one) {
            return std::nullopt;
        }
    }
    std::optional<ProcessorId> owner;
    if (params_.model == AutonomyModel::queue_based) {
        for (int p = 0; p < n_; ++p) {
            if (tokens_[static_cast<std::size_t>(m_ + p)] < one) {
                continue;
            }
            if (!owner || assigned_[static_cast<std::size_t>(p)] < assigned_[static_cast<std::size_t>(owner->index)]) {
                owner = ProcessorId{p};
            }
        }
        if (!owner) {
            return std::nullopt;
        }
        tokens_[static_cast<std::size_t>(m_ + owner->index)] -= one;
        ++assigned_[static_cast<std::size_t>(owner->index)];
    }
    for (const ObjectId o : t.objects()) {
        tokens_[static_cast<std::size_t>(o.index)] -= one;
    }
    return Generation{t, owner};
}

std::vector<Generation> TokenBucketGenerator::emit(Round)
{
    for (auto& tk : tokens_) {
        tk = std::min(capacity_, tk + params_.rho);
    }
    std::vector<Generation> out;
    if (shape_.kind == WorkloadShape::Kind::uniform) {
        for (int a = 0; a < shape_.attempts_per_round; ++a) {
            const TxType t = random_type();
            if (auto g = try_emit(t)) {
                out.push_back(*g);
            }
        }
    } else {
        while (auto g = try_emit(shape_.types[cycle_pos_ % shape_.types.size()])) {
            out.push_back(*g);
            ++cycle_pos_;
        }
    }
    return out;
}

int lower_bound_family_size(int m, int k)
{
    if (k * (k + 1) / 2 <= m) {
        return k;
    }
    int w = 1;
    while ((w + 1) * (w + 2) / 2 <= m) {
        ++w;
    }
    return w;
}

namespace {

std::vector<TxType> lower_bound_types(int w)
{
    const SetFamily family = build_set_family(w);
    std::vector<TxType> out;
    out.reserve(family.sets.size());
    for (const auto& set : family.sets) {
        std::uint64_t mask = 0;
        for (int x : set) {
            mask |= std::uint64_t{1} << (x - 1);
        }
        out.push_back(TxType::from_mask(mask));
    }
    return out;
}

}  // namespace

LowerBoundGenerator::LowerBoundGenerator(const AdversaryParams& params, int m, int k)
    : params_(params),
      family_n_([&] {
          if (m < 1 || m > kMaxObjects || k < 1 || k > m) {
              throw InvalidInput("lower bound adversary needs 1 <= k <= m <= 64");
          }
          return lower_bound_family_size(m, k);
      }()),
      types_(lower_bound_types(family_n_)),
      ledger_(params, m, 1)
{
    if (params.model != AutonomyModel::queue_free) {
        throw InvalidInput("the lower bound adversary is queue-free");
    }
}

std::vector<Generation> LowerBoundGenerator::emit(Round round)
{
    ledger_.begin_round(round);
    std::vector<Generation> out;
    for (;;) {
        if (round == 1 && next_ == params_.b) {
            break;
        }
        const Generation g{types_[static_cast<std::size_t>(next_ % static_cast<std::int64_t>(types_.size()))],
                           std::nullopt};
        if (!ledger_.can_admit(g)) {
            break;
        }
        ledger_.admit(g);
        out.push_back(g);
        ++next_;
    }
    return out;
}

std::vector<Generation> ReplayGenerator::emit(Round round)
{
    if (round < 1 || round > static_cast<Round>(stream_.rounds.size())) {
        return {};
    }
    return stream_.rounds[static_cast<std::size_t>(round - 1)];
}

GenerationStream record_stream(Generator& generator, int m, int n, Round rounds)
{
    GenerationStream out;
    out.m = m;
    out.n = n;
    out.model = generator.model();
    out.rounds.reserve(static_cast<std::size_t>(rounds));
    for (Round r = 1; r <= rounds; ++r) {
        out.rounds.push_back(generator.emit(r));
    }
    return out;
}

}  // namespace tmsched
