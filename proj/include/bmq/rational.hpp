#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bmq {

// Exact arithmetic everywhere: multiplicities are integers and the structure
// theorems are exact statements, so no decision procedure may touch floating
// point. Lattice data is 64-bit; scalar coefficients are unbounded rationals.
using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rat& q) { return boost::multiprecision::numerator(q); }
inline BigInt rat_den(const Rat& q) { return boost::multiprecision::denominator(q); }

// Floor division with b > 0.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

inline BigInt rat_floor(const Rat& q) { return floor_div(rat_num(q), rat_den(q)); }
inline BigInt rat_ceil(const Rat& q) { return -rat_floor(Rat(-q)); }

inline int rat_sign(const Rat& q) { return q.sign(); }
inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }

inline long long to_int64(const BigInt& v) {
    static const BigInt kMin = (std::numeric_limits<long long>::min)();
    static const BigInt kMax = (std::numeric_limits<long long>::max)();
    if (v < kMin || v > kMax)
        throw std::overflow_error("value does not fit in 64 bits: " + v.str());
    return v.convert_to<long long>();
}

// base^e with integer (possibly negative) exponent; base must be nonzero
// when e < 0.
inline Rat rat_pow(const Rat& base, long long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("0 cannot be raised to a negative power");
        return rat_pow(Rat(1) / base, -e);
    }
    Rat acc = 1, b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// Parses "p" or "p/q" with optional sign on either part. Anything else —
// including decimal or exponent notation — is rejected.
inline Rat parse_rat(std::string_view s) {
    auto fail = [&] { throw std::invalid_argument("not a rational 'p' or 'p/q': '" + std::string(s) + "'"); };
    auto parse_int = [&](std::string_view t) -> BigInt {
        if (t.empty()) fail();
        std::size_t i = 0;
        if (t[0] == '+' || t[0] == '-') i = 1;
        if (i == t.size()) fail();
        for (std::size_t j = i; j < t.size(); ++j)
            if (t[j] < '0' || t[j] > '9') fail();
        return BigInt(std::string(t));
    };
    std::size_t slash = s.find('/');
    if (slash == std::string_view::npos) return Rat(parse_int(s));
    BigInt num = parse_int(s.substr(0, slash));
    BigInt den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in rational: '" + std::string(s) + "'");
    return Rat(num, den);
}

// Canonical formatting: lowest terms, positive denominator, "p" when the
// denominator is 1 and "p/q" otherwise.
inline std::string rat_str(const Rat& q) {
    BigInt n = rat_num(q), d = rat_den(q);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

}  // namespace bmq
