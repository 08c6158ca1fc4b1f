#include "tmsched/rational.hpp"

#include "tmsched/errors.hpp"

#include <charconv>
#include <limits>

namespace tmsched {

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole)
{
    std::int64_t value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw InvalidInput("malformed rational '" + std::string(whole) + "'");
    }
    return value;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::int64_t num = parse_int(text.substr(0, slash), text);
        const std::int64_t den = parse_int(text.substr(slash + 1), text);
        if (den == 0) {
            throw InvalidInput("zero denominator in '" + std::string(text) + "'");
        }
        return Rational(num, den);
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        const auto int_part = text.substr(0, dot);
        const auto frac_part = text.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 15 ||
            frac_part.find_first_not_of("0123456789") != std::string_view::npos) {
            throw InvalidInput("malformed rational '" + std::string(text) + "'");
        }
        const bool negative = !int_part.empty() && int_part.front() == '-';
        const std::int64_t whole =
            (int_part.empty() || int_part == "-") ? 0 : parse_int(int_part, text);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) {
            den *= 10;
        }
        const std::int64_t frac = parse_int(frac_part, text);
        const std::int64_t magnitude = (whole < 0 ? -whole : whole) * den + frac;
        return Rational(negative ? -magnitude : magnitude, den);
    }
    return Rational(parse_int(text, text));
}

std::string to_string(const Rational& r)
{
    if (r.denominator() == 1) {
        return std::to_string(r.numerator());
    }
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r)
{
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace tmsched
