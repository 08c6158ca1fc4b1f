#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace tmsched {

/// Exact rational used for generation rates and the rate thresholds of the
/// bound calculators. Window checks never go through floating point.
using Rational = boost::rational<std::int64_t>;

/// 128-bit intermediate for exact cross-multiplied comparisons.
__extension__ typedef __int128 WideInt;

/// Parses "p/q", an integer, or a finite decimal such as "0.6".
/// Throws InvalidInput on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace tmsched
