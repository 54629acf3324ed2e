#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace scatter {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

/// Renders a rational as "p" or "p/q" with q > 0, gcd(p,q)=1.
inline std::string to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += "/";
        s += denominator(r).str();
    }
    return s;
}

/// Parses "p" or "p/q". Inverse of to_string on canonical forms.
inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Integer(s));
        Integer p(s.substr(0, slash));
        Integer q(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("zero denominator");
        return Rational(p, q);
    } catch (const std::runtime_error&) {
        throw std::invalid_argument("malformed rational: " + s);
    }
}

}  // namespace scatter
