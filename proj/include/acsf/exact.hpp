#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <string>

#include "acsf/errors.hpp"
#include "acsf/model.hpp"

namespace acsf {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Half-open [low, high) subinterval of the unit interval.
struct RationalInterval {
    BigRational low;
    BigRational high;

    BigRational width() const { return high - low; }
    bool contains(const BigRational& p) const { return p >= low && p < high; }
    BigRational midpoint() const { return (low + high) / 2; }
};

/// Infinite-precision interval narrowing. Slow and exact; the ground truth
/// the register coder is checked against.
inline RationalInterval exact_encode(const SymbolModel& m, std::span<const Symbol> msg) {
    RationalInterval iv{BigRational(0), BigRational(1)};
    const BigInt total = m.total();
    for (Symbol s : msg) {
        auto r = m.symbol_range(s);
        BigRational width = iv.width();
        iv.high = iv.low + width * BigRational(BigInt(r.high), total);
        iv.low = iv.low + width * BigRational(BigInt(r.low), total);
    }
    return iv;
}

inline RationalInterval exact_encode(const SymbolModel& m, std::initializer_list<Symbol> msg) {
    return exact_encode(m, std::span<const Symbol>(msg.begin(), msg.size()));
}

/// Decodes n symbols from an exact point in [0, 1). A point landing in the
/// forbidden band raises ForbiddenSymbolError carrying the count of symbols
/// recovered before the hit.
inline std::vector<Symbol> exact_decode(const SymbolModel& m, const BigRational& point,
                                        std::size_t n) {
    std::vector<Symbol> out;
    out.reserve(n);
    RationalInterval iv{BigRational(0), BigRational(1)};
    const BigInt total = m.total();
    for (std::size_t step = 0; step < n; ++step) {
        // Position of the point inside the current interval, scaled to the map.
        BigRational scaled = (point - iv.low) / iv.width() * BigRational(total);
        std::uint32_t pos = static_cast<std::uint32_t>(BigInt(boost::multiprecision::numerator(scaled) /
                                                              boost::multiprecision::denominator(scaled)));
        std::uint32_t slot = m.find_slot(pos);
        if (m.is_forbidden_slot(slot)) throw ForbiddenSymbolError(step);
        Symbol s = m.symbol_of_slot(slot);
        out.push_back(s);
        auto r = m.symbol_range(s);
        BigRational width = iv.width();
        iv.high = iv.low + width * BigRational(BigInt(r.high), total);
        iv.low = iv.low + width * BigRational(BigInt(r.low), total);
    }
    return out;
}

/// Smallest bit count B such that some multiple of 2^-B lies in an interval
/// of this width, i.e. ceil(-log2 w): the floor of the code length any
/// terminating arithmetic coder needs for that interval.
inline std::uint32_t width_bits(const BigRational& w) {
    if (w <= 0) throw Error(Errc::zero_width, "interval has no width");
    if (w >= 1) return 0;
    const BigInt num = boost::multiprecision::numerator(w);
    const BigInt den = boost::multiprecision::denominator(w);
    // msb() is floor(log2); refine the one-bit ambiguity with a shift test.
    std::uint32_t diff = static_cast<std::uint32_t>(boost::multiprecision::msb(den) -
                                                    boost::multiprecision::msb(num));
    if ((num << diff) >= den) return diff;
    return diff + 1;
}

inline std::uint32_t exact_width_bits(const RationalInterval& iv) { return width_bits(iv.width()); }

/// Renders a rational as a decimal string with the given number of fractional
/// digits (truncated), handy for comparing against published decimals.
inline std::string decimal_string(const BigRational& v, unsigned digits) {
    BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    std::string sign;
    if (num < 0) {
        sign = "-";
        num = -num;
    }
    BigInt whole = num / den;
    BigInt rem = num % den;
    std::string frac;
    for (unsigned i = 0; i < digits; ++i) {
        rem *= 10;
        frac += static_cast<char>('0' + static_cast<unsigned>(BigInt(rem / den)));
        rem %= den;
    }
    std::string out = sign + whole.str();
    if (digits > 0) out += "." + frac;
    return out;
}

/// Parses "0.31003" style decimals into an exact rational.
inline BigRational rational_from_decimal(const std::string& text) {
    // accumulate digit by digit; handing the string to BigInt would read a
    // leading zero as an octal prefix
    BigInt num = 0;
    std::size_t frac_len = 0;
    bool seen_dot = false;
    bool neg = false;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
    }
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("decimal string has two dots");
            seen_dot = true;
            continue;
        }
        if (c < '0' || c > '9') throw std::invalid_argument("decimal string has a non-digit");
        num = num * 10 + (c - '0');
        if (seen_dot) ++frac_len;
    }
    if (neg) num = -num;
    BigInt den = 1;
    for (std::size_t k = 0; k < frac_len; ++k) den *= 10;
    return BigRational(num, den);
}

}  // namespace acsf
