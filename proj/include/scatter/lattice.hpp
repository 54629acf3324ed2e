#pragma once

#include "scatter/rational.hpp"

#include <compare>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace scatter {

/// Point of Z^2, used both for lattice directions and monomial exponents m
/// of z^m = x^{m.a} y^{m.b}.
struct LatticeVector {
    std::int64_t a = 0;
    std::int64_t b = 0;

    friend auto operator<=>(const LatticeVector&, const LatticeVector&) = default;

    LatticeVector operator+(LatticeVector o) const { return {a + o.a, b + o.b}; }
    LatticeVector operator-(LatticeVector o) const { return {a - o.a, b - o.b}; }
    LatticeVector operator-() const { return {-a, -b}; }
    LatticeVector operator*(std::int64_t c) const { return {a * c, b * c}; }
    bool is_zero() const { return a == 0 && b == 0; }
};

inline std::int64_t det(LatticeVector u, LatticeVector v) { return u.a * v.b - u.b * v.a; }
inline std::int64_t dot(LatticeVector u, LatticeVector v) { return u.a * v.a + u.b * v.b; }

/// Counterclockwise rotation by 90 degrees.
inline LatticeVector rot90(LatticeVector v) { return {-v.b, v.a}; }

/// v = c * primitive(v) with c >= 1. Errors on the zero vector.
inline std::pair<LatticeVector, std::int64_t> primitive(LatticeVector v) {
    if (v.is_zero()) throw std::invalid_argument("primitive(0,0) is undefined");
    std::int64_t g = std::gcd(v.a < 0 ? -v.a : v.a, v.b < 0 ? -v.b : v.b);
    return {{v.a / g, v.b / g}, g};
}

inline bool is_primitive(LatticeVector v) {
    return !v.is_zero() && primitive(v).second == 1;
}

inline bool parallel(LatticeVector u, LatticeVector v) { return det(u, v) == 0; }

inline std::string to_string(LatticeVector v) {
    return "(" + std::to_string(v.a) + "," + std::to_string(v.b) + ")";
}

/// Exact point of Q^2.
struct QPoint {
    Rational x;
    Rational y;

    bool operator==(const QPoint&) const = default;
    bool operator<(const QPoint& o) const {
        if (x != o.x) return x < o.x;
        return y < o.y;
    }

    QPoint operator+(const QPoint& o) const { return {x + o.x, y + o.y}; }
    QPoint operator-(const QPoint& o) const { return {x - o.x, y - o.y}; }
};

inline QPoint q_point(std::int64_t x, std::int64_t y) {
    return {Rational(x), Rational(y)};
}

inline QPoint operator+(const QPoint& p, const LatticeVector& v) {
    return {p.x + v.a, p.y + v.b};
}

inline Rational cross(const QPoint& u, const LatticeVector& v) {
    return u.x * v.b - u.y * v.a;
}

inline std::string to_string(const QPoint& p) {
    return "(" + to_string(p.x) + "," + to_string(p.y) + ")";
}

/// Angular order of nonzero vectors, counterclockwise starting at (1,0).
/// Returns <0, 0, >0 like a three-way comparison; equal means parallel with
/// the same orientation.
inline int angle_compare(LatticeVector u, LatticeVector v) {
    auto half = [](LatticeVector w) {  // 0: angle in [0,pi), 1: [pi,2pi)
        return (w.b < 0 || (w.b == 0 && w.a < 0)) ? 1 : 0;
    };
    int hu = half(u), hv = half(v);
    if (hu != hv) return hu < hv ? -1 : 1;
    std::int64_t d = det(u, v);
    if (d > 0) return -1;
    if (d < 0) return 1;
    return 0;
}

}  // namespace scatter
