#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tmsched {

using Round = std::int64_t;
using TxId = std::int64_t;

/// Hard cap on the number of shared objects; types are 64-bit masks.
inline constexpr int kMaxObjects = 64;

struct ObjectId {
    int index = 0;

    auto operator<=>(const ObjectId&) const = default;
};

struct ProcessorId {
    int index = 0;

    auto operator<=>(const ProcessorId&) const = default;
};

enum class AutonomyModel { queue_free, queue_based };

std::string_view to_string(AutonomyModel model);
AutonomyModel parse_autonomy_model(std::string_view text);

/// The access footprint of a transaction: a nonempty set of objects.
///
/// Object i is bit i of the mask. The textual form is an m-character
/// bitstring whose first character is object 0.
class TxType {
public:
    /// Throws InvalidInput if the mask is zero.
    static TxType from_mask(std::uint64_t mask);
    /// Throws InvalidInput on an empty list or an index outside [0, 64).
    static TxType of(std::initializer_list<int> objects);
    static TxType of(std::span<const ObjectId> objects);
    /// Parses an m-character string of '0'/'1'. Throws InvalidInput if the
    /// string is malformed, longer than 64, or all zeros.
    static TxType parse(std::string_view bits);

    std::uint64_t mask() const { return mask_; }
    int weight() const { return std::popcount(mask_); }
    bool contains(ObjectId o) const { return (mask_ >> o.index) & 1U; }
    /// Highest object index plus one.
    int span() const { return 64 - std::countl_zero(mask_); }
    std::vector<ObjectId> objects() const;

    bool collides(const TxType& other) const { return (mask_ & other.mask_) != 0; }

    std::string to_string(int m) const;

    auto operator<=>(const TxType&) const = default;

private:
    explicit TxType(std::uint64_t mask) : mask_(mask) {}

    std::uint64_t mask_;
};

inline int weight(const TxType& t) { return t.weight(); }
inline bool collides(const TxType& a, const TxType& b) { return a.collides(b); }

/// True iff no two members share an object.
bool conflict_free(std::span<const TxType> types);

struct Transaction {
    TxId id = 0;
    TxType ttype;
    Round gen_round = 1;
    std::optional<ProcessorId> owner;
    std::optional<Round> commit_round;

    std::optional<Round> latency() const
    {
        if (!commit_round) {
            return std::nullopt;
        }
        return *commit_round - gen_round;
    }
};

struct SystemConfig {
    int m = 1;
    int k = 1;
    int n = 1;
    Round horizon = 1;
    std::uint64_t seed = 0;

    /// Throws InvalidInput when m, k, n or horizon are out of range.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

}  // namespace tmsched
