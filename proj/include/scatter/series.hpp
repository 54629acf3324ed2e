#pragma once

#include "scatter/lattice.hpp"
#include "scatter/rational.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

/// One monomial t^a * z^m of Q[t_0..t_{r-1}][x^{±1}, y^{±1}].
/// t-exponents are nonnegative; m ranges over Z^2.
struct Monomial {
    std::vector<std::uint32_t> t;
    LatticeVector m;

    friend auto operator<=>(const Monomial&, const Monomial&) = default;
};

/// All ring operations discard monomials whose (weighted) total t-degree
/// exceeds t_bound. Weights default to 1 per variable; the engine uses
/// nontrivial weights for its marker variables.
struct TruncationPolicy {
    std::size_t t_count = 0;
    std::int64_t t_bound = 0;
    std::vector<std::int64_t> weights;  // empty means all-ones

    bool operator==(const TruncationPolicy&) const = default;

    std::int64_t degree(const std::vector<std::uint32_t>& t) const {
        std::int64_t d = 0;
        if (weights.empty()) {
            for (auto e : t) d += e;
        } else {
            for (std::size_t i = 0; i < t.size(); ++i) d += weights[i] * t[i];
        }
        return d;
    }

    bool keeps(const Monomial& mono) const { return degree(mono.t) <= t_bound; }
};

/// Sparse truncated series with exact rational coefficients. Immutable in
/// spirit: all operations return new values. No zero coefficients and no
/// over-truncation monomials are ever stored.
class Series {
  public:
    using TermMap = std::map<Monomial, Rational>;

    Series() = default;
    explicit Series(TruncationPolicy pol) : pol_(std::move(pol)) {}

    static Series zero(const TruncationPolicy& pol) { return Series(pol); }

    static Series constant(const TruncationPolicy& pol, const Rational& c) {
        Series s(pol);
        s.add_term(Monomial{std::vector<std::uint32_t>(pol.t_count, 0), {0, 0}}, c);
        return s;
    }

    static Series one(const TruncationPolicy& pol) { return constant(pol, 1); }

    /// c * t_i * z^m  (t_i omitted when i < 0)
    static Series term(const TruncationPolicy& pol, const Rational& c, int t_index,
                       LatticeVector m) {
        Series s(pol);
        Monomial mono{std::vector<std::uint32_t>(pol.t_count, 0), m};
        if (t_index >= 0) {
            if (static_cast<std::size_t>(t_index) >= pol.t_count)
                throw std::invalid_argument("t variable index out of range");
            mono.t[t_index] = 1;
        }
        s.add_term(mono, c);
        return s;
    }

    const TruncationPolicy& policy() const { return pol_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    Rational coefficient(const Monomial& mono) const {
        auto it = terms_.find(mono);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational constant_term() const {
        return coefficient(Monomial{std::vector<std::uint32_t>(pol_.t_count, 0), {0, 0}});
    }

    bool has_constant_term_one() const { return constant_term() == 1; }

    /// Inserts c at mono, summing with any existing coefficient.
    void add_term(const Monomial& mono, const Rational& c) {
        if (c == 0) return;
        if (mono.t.size() != pol_.t_count)
            throw std::invalid_argument("monomial arity does not match ring");
        if (!pol_.keeps(mono)) return;
        auto [it, fresh] = terms_.emplace(mono, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    bool operator==(const Series& o) const {
        return pol_ == o.pol_ && terms_ == o.terms_;
    }

    Series operator+(const Series& o) const {
        require_compatible(o);
        Series r(*this);
        for (const auto& [mono, c] : o.terms_) r.add_term(mono, c);
        return r;
    }

    Series operator-(const Series& o) const {
        require_compatible(o);
        Series r(*this);
        for (const auto& [mono, c] : o.terms_) r.add_term(mono, -c);
        return r;
    }

    Series operator*(const Series& o) const {
        require_compatible(o);
        Series r(pol_);
        for (const auto& [ma, ca] : terms_) {
            std::int64_t da = pol_.degree(ma.t);
            for (const auto& [mb, cb] : o.terms_) {
                if (da + pol_.degree(mb.t) > pol_.t_bound) continue;
                Monomial mono{ma.t, ma.m + mb.m};
                for (std::size_t i = 0; i < mono.t.size(); ++i) mono.t[i] += mb.t[i];
                r.add_term(mono, ca * cb);
            }
        }
        return r;
    }

    Series operator*(const Rational& c) const {
        Series r(pol_);
        if (c == 0) return r;
        for (const auto& [mono, coef] : terms_) r.terms_.emplace(mono, coef * c);
        return r;
    }

    /// Multiplies every monomial by z^shift.
    Series shifted_m(LatticeVector shift) const {
        Series r(pol_);
        for (const auto& [mono, c] : terms_)
            r.terms_.emplace(Monomial{mono.t, mono.m + shift}, c);
        return r;
    }

    /// Smallest weighted t-degree among stored terms; t_bound+1 when zero.
    std::int64_t min_t_order() const {
        std::int64_t best = pol_.t_bound + 1;
        for (const auto& [mono, c] : terms_) {
            std::int64_t d = pol_.degree(mono.t);
            if (d < best) best = d;
        }
        return best;
    }

    /// Terms of exact weighted t-degree d, as a new series.
    Series t_degree_part(std::int64_t d) const {
        Series r(pol_);
        for (const auto& [mono, c] : terms_)
            if (pol_.degree(mono.t) == d) r.terms_.emplace(mono, c);
        return r;
    }

  private:
    void require_compatible(const Series& o) const {
        if (pol_.t_count != o.pol_.t_count)
            throw std::invalid_argument("mismatched t-variable count");
        if (!(pol_ == o.pol_))
            throw std::invalid_argument("mismatched truncation policy");
    }

    TruncationPolicy pol_;
    TermMap terms_;
};

inline Series operator*(const Rational& c, const Series& s) { return s * c; }

namespace detail {
/// f = 1 + u with u of positive t-order, checked. Returns u.
inline Series split_unit(const Series& f, const char* who) {
    if (!f.has_constant_term_one())
        throw std::invalid_argument(std::string(who) + ": constant term is not 1");
    Series u = f - Series::one(f.policy());
    if (!u.is_zero() && u.min_t_order() < 1)
        throw std::invalid_argument(std::string(who) + ": series is not 1 mod t");
    return u;
}
}  // namespace detail

/// Geometric-series inverse of f = 1 + u, u == 0 mod t.
inline Series inverse(const Series& f) {
    Series u = detail::split_unit(f, "inverse");
    Series r = Series::one(f.policy());
    Series pw = Series::one(f.policy());
    for (std::int64_t k = 1; k <= f.policy().t_bound; ++k) {
        pw = pw * u;
        if (pw.is_zero()) break;
        r = r + pw * Rational(k % 2 == 0 ? 1 : -1);
    }
    return r;
}

/// f^n by repeated squaring; n < 0 requires constant term 1.
inline Series int_pow(Series f, std::int64_t n) {
    const TruncationPolicy pol = f.policy();
    if (n == 0) return Series::one(pol);
    if (n < 0) {
        f = inverse(f);  // throws unless invertible mod t
        n = -n;
    }
    Series r = Series::one(pol);
    while (n > 0) {
        if (n & 1) r = r * f;
        n >>= 1;
        if (n) f = f * f;
    }
    return r;
}

/// log f = sum_{n>=1} (-1)^{n+1} (f-1)^n / n, for f = 1 mod t.
inline Series log1(const Series& f) {
    Series u = detail::split_unit(f, "log1");
    Series r = Series::zero(f.policy());
    Series pw = Series::one(f.policy());
    for (std::int64_t n = 1; n <= f.policy().t_bound; ++n) {
        pw = pw * u;
        if (pw.is_zero()) break;
        r = r + pw * Rational(Integer(n % 2 == 1 ? 1 : -1), Integer(n));
    }
    return r;
}

/// Collapse t_i -> 1, summing coefficients of collided monomials. The result
/// lives in the r = 0 ring with the same t_bound.
inline Series substitute_t_one(const Series& f) {
    TruncationPolicy pol{0, f.policy().t_bound, {}};
    Series r(pol);
    for (const auto& [mono, c] : f.terms())
        r.add_term(Monomial{{}, mono.m}, c);
    return r;
}

inline std::string to_string(const Series& f) {
    if (f.is_zero()) return "0";
    std::string s;
    for (const auto& [mono, c] : f.terms()) {
        if (!s.empty()) s += " + ";
        std::string factors;
        for (std::size_t i = 0; i < mono.t.size(); ++i) {
            if (mono.t[i] == 0) continue;
            factors += "*t" + std::to_string(i);
            if (mono.t[i] > 1) factors += "^" + std::to_string(mono.t[i]);
        }
        if (mono.m.a != 0) {
            factors += "*x";
            if (mono.m.a != 1) factors += "^" + std::to_string(mono.m.a);
        }
        if (mono.m.b != 0) {
            factors += "*y";
            if (mono.m.b != 1) factors += "^" + std::to_string(mono.m.b);
        }
        s += to_string(c) + factors;
    }
    return s;
}

}  // namespace scatter
