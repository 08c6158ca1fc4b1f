#include "tmsched/model.hpp"

#include "tmsched/errors.hpp"

namespace tmsched {

std::string_view to_string(AutonomyModel model)
{
    return model == AutonomyModel::queue_free ? "qf" : "qb";
}

AutonomyModel parse_autonomy_model(std::string_view text)
{
    if (text == "qf" || text == "queue-free") {
        return AutonomyModel::queue_free;
    }
    if (text == "qb" || text == "queue-based") {
        return AutonomyModel::queue_based;
    }
    throw InvalidInput("unknown autonomy model '" + std::string(text) + "' (expected qf or qb)");
}

TxType TxType::from_mask(std::uint64_t mask)
{
    if (mask == 0) {
        throw InvalidInput("transaction type must contain at least one object");
    }
    return TxType(mask);
}

TxType TxType::of(std::initializer_list<int> objects)
{
    std::uint64_t mask = 0;
    for (int o : objects) {
        if (o < 0 || o >= kMaxObjects) {
            throw InvalidInput("object index " + std::to_string(o) + " out of range");
        }
        mask |= std::uint64_t{1} << o;
    }
    return from_mask(mask);
}

TxType TxType::of(std::span<const ObjectId> objects)
{
    std::uint64_t mask = 0;
    for (ObjectId o : objects) {
        if (o.index < 0 || o.index >= kMaxObjects) {
            throw InvalidInput("object index " + std::to_string(o.index) + " out of range");
        }
        mask |= std::uint64_t{1} << o.index;
    }
    return from_mask(mask);
}

TxType TxType::parse(std::string_view bits)
{
    if (bits.empty() || bits.size() > kMaxObjects) {
        throw InvalidInput("type bitstring must have 1..64 characters, got '" + std::string(bits) + "'");
    }
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            mask |= std::uint64_t{1} << i;
        } else if (bits[i] != '0') {
            throw InvalidInput("type bitstring contains '" + std::string(1, bits[i]) + "'");
        }
    }
    return from_mask(mask);
}

std::vector<ObjectId> TxType::objects() const
{
    std::vector<ObjectId> out;
    out.reserve(static_cast<std::size_t>(weight()));
    for (std::uint64_t rest = mask_; rest != 0; rest &= rest - 1) {
        out.push_back(ObjectId{std::countr_zero(rest)});
    }
    return out;
}

std::string TxType::to_string(int m) const
{
    std::string out(static_cast<std::size_t>(m), '0');
    for (int i = 0; i < m; ++i) {
        if ((mask_ >> i) & 1U) {
            out[static_cast<std::size_t>(i)] = '1';
        }
    }
    return out;
}

bool conflict_free(std::span<const TxType> types)
{
    std::uint64_t used = 0;
    for (const TxType& t : types) {
        if ((used & t.mask()) != 0) {
            return false;
        }
        used |= t.mask();
    }
    return true;
}

void SystemConfig::validate() const
{
    if (m < 1 || m > kMaxObjects) {
        throw InvalidInput("m must be in [1, 64], got " + std::to_string(m));
    }
    if (k < 1 || k > m) {
        throw InvalidInput("k must be in [1, m], got k=" + std::to_string(k) + " m=" + std::to_string(m));
    }
    if (n < 1) {
        throw InvalidInput("n must be at least 1, got " + std::to_string(n));
    }
    if (horizon < 1) {
        throw InvalidInput("horizon must be at least 1, got " + std::to_string(horizon));
    }
}

}  // namespace tmsched
