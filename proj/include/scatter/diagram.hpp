#pragma once

#include "scatter/series.hpp"
#include "scatter/unfolding.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

/// Parent reference with aggregated marker weight, recorded while
/// scattering. The weight is the t-degree consumed from the parent wall; for
/// initial walls of case diagrams this is the leg weight of the completed
/// tropical curve.
struct AncestryLink {
    std::size_t parent = 0;  // index into Diagram::rays
    std::int64_t weight = 0;

    bool operator==(const AncestryLink&) const = default;
};

/// One way of producing a correction term from the walls through its base
/// point, with the portion of the coefficient it contributes. Corrections
/// sharing (t-monomial, z-exponent) merge into a single ray; their marker
/// decompositions are kept as variants.
struct AncestryVariant {
    std::vector<AncestryLink> links;
    Rational coefficient;

    bool operator==(const AncestryVariant&) const = default;
};

/// A ray b + R_{>=0} m with attached wall function. Initial full lines are
/// stored as two opposite rays. Functions of non-initial rays are binomials
/// 1 + a t^alpha z^M with M a positive multiple of `direction`.
struct Ray {
    QPoint base;
    LatticeVector direction;  // primitive
    Series function;          // t-constant term 1, function != 1
    std::int64_t order = 1;   // t-order of the first nontrivial term
    bool initial = true;
    std::vector<AncestryVariant> ancestry;  // empty for initial rays
    std::int64_t t_index = -1;              // wall's t-variable, initial rays only

    bool operator==(const Ray&) const = default;
};

/// Checks the documented Ray invariants; throws on violation.
inline void check_ray(const Ray& ray) {
    if (!is_primitive(ray.direction))
        throw std::invalid_argument("ray direction must be primitive");
    if (!ray.function.has_constant_term_one())
        throw std::invalid_argument("wall function must have constant term 1");
    if (ray.function.size() < 2)
        throw std::invalid_argument("wall function must differ from 1");
    for (const auto& [mono, c] : ray.function.terms()) {
        if (mono.m.is_zero() && ray.function.policy().degree(mono.t) == 0) continue;
        if (ray.function.policy().degree(mono.t) < 1)
            throw std::invalid_argument("wall function has a t-free term");
        // lattice parts lie on the wall's line (initial full lines carry the
        // same function on both halves)
        if (!parallel(mono.m, ray.direction))
            throw std::invalid_argument("wall function monomial off the wall line");
    }
}

enum class DiagramKind { Named, Case };

struct Diagram {
    std::vector<Ray> rays;
    DiagramKind kind = DiagramKind::Named;
    std::string name;  // "std(1,1)", "(9)", ...
    std::optional<CaseId> case_id;
    std::optional<UnfoldingData> unfolding;
    std::size_t t_count = 0;
    std::int64_t t_bound = 0;
    std::int64_t t_per_period = 0;  // t-variable shift of the period map
    std::int64_t certified_order = 0;

    TruncationPolicy policy() const { return TruncationPolicy{t_count, t_bound, {}}; }
};

namespace detail {
/// Deterministic total order on rays: (base, direction, order, function).
inline bool ray_less(const Ray& a, const Ray& b) {
    if (a.base != b.base) return a.base < b.base;
    if (a.direction != b.direction) return a.direction < b.direction;
    if (a.order != b.order) return a.order < b.order;
    auto ita = a.function.terms().begin(), enda = a.function.terms().end();
    auto itb = b.function.terms().begin(), endb = b.function.terms().end();
    for (; ita != enda && itb != endb; ++ita, ++itb) {
        if (ita->first != itb->first) return ita->first < itb->first;
        if (ita->second != itb->second) return ita->second < itb->second;
    }
    return a.function.size() < b.function.size();
}
}  // namespace detail

/// Sorts rays by the deterministic key, remapping ancestry indices.
inline void canonical_sort(Diagram& d) {
    std::vector<std::size_t> perm(d.rays.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) {
        return detail::ray_less(d.rays[i], d.rays[j]);
    });
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    std::vector<Ray> sorted;
    sorted.reserve(d.rays.size());
    for (std::size_t i : perm) sorted.push_back(std::move(d.rays[i]));
    for (Ray& r : sorted)
        for (AncestryVariant& v : r.ancestry)
            for (AncestryLink& link : v.links) link.parent = inv[link.parent];
    d.rays = std::move(sorted);
}

/// FNV-1a content hash of (base, direction, function); survives re-sorting.
inline std::uint64_t ray_id(const Ray& r) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    mix(to_string(r.base));
    mix(to_string(r.direction));
    mix(to_string(r.function));
    return h;
}

inline std::string ray_id_string(const Ray& r) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ray_id(r)));
    return buf;
}

/// std(m,n): (1+t0 x)^m on the x-axis, (1+t1 y)^n on the y-axis.
/// exp(m,n): 1+t0 x^m, 1+t1 y^n.
/// det(m):   1+t0 x and 1+t1 x^{-1} y^m.
/// All as full lines through the origin (two opposite rays per line).
inline Diagram new_named(const std::string& kind, std::int64_t m, std::int64_t n,
                         std::int64_t t_bound) {
    if (m <= 0 || (kind != "det" && n <= 0))
        throw std::invalid_argument("nonpositive diagram parameter");
    Diagram d;
    d.kind = DiagramKind::Named;
    d.t_count = 2;
    d.t_bound = t_bound;
    const TruncationPolicy pol = d.policy();

    auto line = [&](LatticeVector dir, const Series& f, std::int64_t t_index) {
        for (LatticeVector v : {dir, -dir}) {
            Ray r;
            r.base = q_point(0, 0);
            r.direction = v;
            r.function = f;
            r.order = 1;
            r.initial = true;
            r.t_index = t_index;
            d.rays.push_back(r);
        }
    };

    Series one = Series::one(pol);
    if (kind == "std") {
        d.name = "std(" + std::to_string(m) + "," + std::to_string(n) + ")";
        line({1, 0}, int_pow(one + Series::term(pol, 1, 0, {1, 0}), m), 0);
        line({0, 1}, int_pow(one + Series::term(pol, 1, 1, {0, 1}), n), 1);
    } else if (kind == "exp") {
        d.name = "exp(" + std::to_string(m) + "," + std::to_string(n) + ")";
        line({1, 0}, one + Series::term(pol, 1, 0, {m, 0}), 0);
        line({0, 1}, one + Series::term(pol, 1, 1, {0, n}), 1);
    } else if (kind == "det") {
        d.name = "det(" + std::to_string(m) + ")";
        line({1, 0}, one + Series::term(pol, 1, 0, {1, 0}), 0);
        line(primitive({-1, m}).first, one + Series::term(pol, 1, 1, {-1, m}), 1);
    } else {
        throw std::invalid_argument("unknown named diagram kind: " + kind);
    }
    canonical_sort(d);
    for (const Ray& r : d.rays) check_ray(r);
    return d;
}

namespace detail {
/// Shared body of the coarse and refined case constructors. Each wall line
/// gets its own t-variable; walls are the two rays from p_e toward the
/// adjacent vertices (subsegment endpoints for the refined diagram).
inline Diagram case_diagram(const CaseId& c, std::int64_t domains, std::int64_t t_bound,
                            bool refined) {
    if (domains < 1) throw std::invalid_argument("domains must be >= 1");
    Diagram d;
    d.kind = DiagramKind::Case;
    d.case_id = c;
    d.name = c.label + (refined ? " refined" : "");
    d.unfolding = build_unfolding(c, domains);
    d.t_bound = t_bound;

    const UnfoldingData& u = *d.unfolding;
    struct Wall {
        QPoint p;
        LatticeVector dir_plus;
        std::int64_t exponent;
    };
    std::vector<Wall> walls;
    for (const auto& e : u.edges) {
        if (!refined) {
            walls.push_back({e.singular, e.dir, e.length});
        } else {
            for (std::int64_t i = 0; i < e.length; ++i) {
                QPoint p{Rational(2 * e.v_from.a + e.dir.a * (2 * i + 1), 2),
                         Rational(2 * e.v_from.b + e.dir.b * (2 * i + 1), 2)};
                walls.push_back({p, e.dir, 1});
            }
        }
    }
    d.t_count = walls.size();
    d.t_per_period = refined ? u.period : static_cast<std::int64_t>(u.kinks.size());
    const TruncationPolicy pol = d.policy();

    for (std::size_t w = 0; w < walls.size(); ++w) {
        for (int sign : {+1, -1}) {
            Ray r;
            r.base = walls[w].p;
            r.direction = sign > 0 ? walls[w].dir_plus : -walls[w].dir_plus;
            r.function = int_pow(
                Series::one(pol) + Series::term(pol, 1, static_cast<int>(w), r.direction),
                walls[w].exponent);
            r.order = 1;
            r.initial = true;
            r.t_index = static_cast<std::int64_t>(w);
            d.rays.push_back(r);
        }
    }
    canonical_sort(d);
    for (const Ray& r : d.rays) check_ray(r);
    return d;
}
}  // namespace detail

/// Initial scattering diagram of a case: two rays per edge of the unfolding,
/// based at p_e, with functions (1 + t_e z^{m_e^{+-}})^{l_e}.
inline Diagram new_case(const CaseId& c, std::int64_t domains, std::int64_t t_bound) {
    return detail::case_diagram(c, domains, t_bound, false);
}

/// Smooth-model variant: edges subdivided into unit segments, one wall line
/// with exponent 1 per segment. Used for curve-class tracking.
inline Diagram new_case_refined(const CaseId& c, std::int64_t domains, std::int64_t t_bound) {
    return detail::case_diagram(c, domains, t_bound, true);
}

/// Merges rays sharing (base, direction) by multiplying functions and
/// concatenating ancestry. Normalization for printing and saving.
inline Diagram merge_parallel(const Diagram& d) {
    Diagram out = d;
    canonical_sort(out);
    std::vector<Ray> merged;
    std::vector<std::size_t> to_merged(out.rays.size());
    for (std::size_t i = 0; i < out.rays.size(); ++i) {
        const Ray& r = out.rays[i];
        if (!merged.empty() && merged.back().base == r.base &&
            merged.back().direction == r.direction) {
            Ray& prev = merged.back();
            prev.function = prev.function * r.function;
            prev.order = std::min(prev.order, r.order);
            prev.initial = prev.initial && r.initial;
            prev.ancestry.insert(prev.ancestry.end(), r.ancestry.begin(), r.ancestry.end());
        } else {
            merged.push_back(r);
        }
        to_merged[i] = merged.size() - 1;
    }
    for (Ray& r : merged)
        for (AncestryVariant& v : r.ancestry)
            for (AncestryLink& link : v.links) link.parent = to_merged[link.parent];
    out.rays = std::move(merged);
    canonical_sort(out);
    return out;
}

}  // namespace scatter
