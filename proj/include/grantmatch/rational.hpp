#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

#include "grantmatch/errors.hpp"

namespace grantmatch {

// Supports and confidences are ratios of transaction counts, so 64-bit
// numerator/denominator pairs are exact for any corpus that fits in memory.
using Rational = boost::rational<std::int64_t>;

// Always "p/q", including integers ("1/1"), so the field is self-describing.
inline std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Round half up to `places` decimals: 31/300 -> "0.1033".
inline std::string to_decimal(const Rational& r, int places = 4) {
    __int128 scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    const bool negative = r.numerator() < 0;
    const __int128 num = negative ? -static_cast<__int128>(r.numerator()) : r.numerator();
    const __int128 den = r.denominator();
    const __int128 scaled = (2 * num * scale + den) / (2 * den);
    const auto whole = static_cast<std::int64_t>(scaled / scale);
    auto frac = std::to_string(static_cast<std::int64_t>(scaled % scale));
    std::string out = negative && scaled != 0 ? "-" : "";
    out += std::to_string(whole);
    if (places > 0) {
        out += '.';
        out += std::string(static_cast<std::size_t>(places) - frac.size(), '0');
        out += frac;
    }
    return out;
}

namespace detail {

inline std::int64_t parse_int(std::string_view s, std::string_view whole) {
    std::int64_t value = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    if (!s.empty() && s.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc{} || ptr != last)
        throw ArgumentError("not a rational number: '" + std::string(whole) + "'");
    return value;
}

} // namespace detail

// Accepts "p/q", integers, and finite decimals ("0.8" -> 4/5).
inline Rational parse_rational(std::string_view text) {
    const auto bad = [&] { return ArgumentError("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) throw bad();
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const auto num = detail::parse_int(text.substr(0, slash), text);
        const auto den = detail::parse_int(text.substr(slash + 1), text);
        if (den == 0) throw bad();
        return Rational(num, den);
    }
    if (const auto dot = text.find('.'); dot != std::string_view::npos) {
        auto int_part = text.substr(0, dot);
        const auto frac_part = text.substr(dot + 1);
        if (frac_part.empty() || frac_part.size() > 15) throw bad();
        bool negative = false;
        if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
            negative = int_part.front() == '-';
            int_part.remove_prefix(1);
        }
        if (!frac_part.empty() && (frac_part.front() == '-' || frac_part.front() == '+')) throw bad();
        const std::int64_t whole = int_part.empty() ? 0 : detail::parse_int(int_part, text);
        if (whole < 0) throw bad();
        const std::int64_t frac = detail::parse_int(frac_part, text);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
        Rational r = Rational(whole) + Rational(frac, den);
        return negative ? -r : r;
    }
    return Rational(detail::parse_int(text, text));
}

} // namespace grantmatch
