#pragma once

#include "scatter/diagram.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

/// Ring automorphism determined by the images of x and y; the image of z^m
/// is multiplicative. Both images are required to be x resp. y times a unit.
struct PlaneAutomorphism {
    Series image_x;
    Series image_y;

    Series apply(const Series& v) const {
        Series out(v.policy());
        // image_x = x * unit, image_y = y * unit; powers act on the units
        Series ux = image_x.shifted_m({-1, 0});
        Series uy = image_y.shifted_m({0, -1});
        std::map<std::int64_t, Series> xp, yp;
        auto power = [](std::map<std::int64_t, Series>& memo, const Series& base,
                        std::int64_t e) -> const Series& {
            auto it = memo.find(e);
            if (it == memo.end()) it = memo.emplace(e, int_pow(base, e)).first;
            return it->second;
        };
        for (const auto& [mono, c] : v.terms()) {
            Series img = power(xp, ux, mono.m.a) * power(yp, uy, mono.m.b);
            for (const auto& [im, ic] : img.terms()) {
                Monomial nm{mono.t, im.m + mono.m};
                for (std::size_t i = 0; i < nm.t.size(); ++i) nm.t[i] += im.t[i];
                out.add_term(nm, c * ic);
            }
        }
        return out;
    }

    /// this . other (apply `other` first).
    PlaneAutomorphism after(const PlaneAutomorphism& other) const {
        return {apply(other.image_x), apply(other.image_y)};
    }

    bool is_identity_mod(std::int64_t order) const {
        const TruncationPolicy& pol = image_x.policy();
        Series dx = image_x - Series::term(pol, 1, -1, {1, 0});
        Series dy = image_y - Series::term(pol, 1, -1, {0, 1});
        for (const auto& [mono, c] : dx.terms())
            if (pol.degree(mono.t) <= order) return false;
        for (const auto& [mono, c] : dy.terms())
            if (pol.degree(mono.t) <= order) return false;
        return true;
    }
};

inline PlaneAutomorphism identity_automorphism(const TruncationPolicy& pol) {
    return {Series::term(pol, 1, -1, {1, 0}), Series::term(pol, 1, -1, {0, 1})};
}

namespace detail {
/// z^m -> f^{<n,m>} z^m applied termwise, memoizing powers of f.
inline Series apply_crossing(const Series& v, const Series& f, LatticeVector n) {
    Series out(v.policy());
    std::map<std::int64_t, Series> memo;
    for (const auto& [mono, c] : v.terms()) {
        std::int64_t e = n.a * mono.m.a + n.b * mono.m.b;
        auto it = memo.find(e);
        if (it == memo.end()) it = memo.emplace(e, int_pow(f, e)).first;
        for (const auto& [fm, fc] : it->second.terms()) {
            Monomial nm{mono.t, mono.m + fm.m};
            for (std::size_t i = 0; i < nm.t.size(); ++i) nm.t[i] += fm.t[i];
            out.add_term(nm, c * fc);
        }
    }
    return out;
}
}  // namespace detail

/// theta_d for crossing `ray` in direction `crossing_direction`: n_d is the
/// primitive normal of the wall evaluating positively on the crossing.
inline PlaneAutomorphism wall_crossing(const Ray& ray, LatticeVector crossing_direction) {
    if (parallel(ray.direction, crossing_direction))
        throw std::invalid_argument("crossing direction parallel to the wall");
    LatticeVector n = rot90(ray.direction);
    if (dot(n, crossing_direction) < 0) n = -n;
    const TruncationPolicy& pol = ray.function.policy();
    return {int_pow(ray.function, n.a).shifted_m({1, 0}),
            int_pow(ray.function, n.b).shifted_m({0, 1})};
}

/// One localized ray at a point: `direction` points out of the point; both
/// halves of a split ray share the underlying wall (and its function).
struct LocalRay {
    LatticeVector direction;
    std::size_t wall = 0;  // index into LocalDiagram::walls
};

struct LocalWall {
    std::size_t diagram_index = 0;
    Ray ray;
};

struct LocalDiagram {
    QPoint point;
    std::vector<LocalWall> walls;
    std::vector<LocalRay> rays;  // sorted counterclockwise from (1,0)
};

/// Rays through p; a ray whose relative interior contains p splits into an
/// outgoing and an incoming half carrying the same function. Opposite rays
/// based at p with the same function are two halves of one full line and
/// share a wall entry.
inline LocalDiagram localize(const Diagram& d, const QPoint& p) {
    LocalDiagram ld;
    ld.point = p;
    std::map<std::string, std::size_t> line_walls;
    for (std::size_t i = 0; i < d.rays.size(); ++i) {
        const Ray& r = d.rays[i];
        QPoint rel = p - r.base;
        if (cross(rel, r.direction) != 0) continue;
        bool at_base = rel.x == 0 && rel.y == 0;
        if (!at_base) {
            // p = base + s*dir with s > 0?
            Rational s = r.direction.a != 0 ? rel.x / Rational(r.direction.a)
                                            : rel.y / Rational(r.direction.b);
            if (s < 0) continue;
        }
        LatticeVector line_dir = std::max(r.direction, -r.direction);
        std::string key = to_string(line_dir) + "#" + to_string(r.function);
        auto found = line_walls.find(key);
        std::size_t w;
        if (at_base && found != line_walls.end()) {
            w = found->second;
        } else {
            w = ld.walls.size();
            ld.walls.push_back({i, r});
            if (at_base) line_walls.emplace(key, w);
        }
        ld.rays.push_back({r.direction, w});
        if (!at_base) ld.rays.push_back({-r.direction, w});
    }
    std::stable_sort(ld.rays.begin(), ld.rays.end(), [&](const LocalRay& a, const LocalRay& b) {
        int c = angle_compare(a.direction, b.direction);
        if (c != 0) return c < 0;
        return ld.walls[a.wall].diagram_index < ld.walls[b.wall].diagram_index;
    });
    return ld;
}

/// Composition of wall crossings along a counterclockwise loop, cut just
/// clockwise of direction (1,0).
inline PlaneAutomorphism path_ordered_product(const LocalDiagram& ld) {
    TruncationPolicy pol =
        ld.walls.empty() ? TruncationPolicy{0, 0, {}} : ld.walls[0].ray.function.policy();
    Series x = Series::term(pol, 1, -1, {1, 0});
    Series y = Series::term(pol, 1, -1, {0, 1});
    for (const LocalRay& lr : ld.rays) {
        LatticeVector n = rot90(lr.direction);  // tangent of the ccw loop
        const Series& f = ld.walls[lr.wall].ray.function;
        x = detail::apply_crossing(x, f, n);
        y = detail::apply_crossing(y, f, n);
    }
    return {x, y};
}

/// A correcting term a * t^alpha * z^M extracted from the normal form of the
/// path-ordered product. `variants` decomposes the coefficient by marker
/// monomial over the local walls (ancestry bookkeeping).
struct Defect {
    Rational coefficient;                   // sum over variants
    std::vector<std::uint32_t> t_monomial;  // in the diagram's global ring
    LatticeVector m;
    std::vector<AncestryVariant> variants;  // diagram ray indices + weights
};

namespace detail {

/// Consumed t-degree of wall w per marker unit, and the wall's t-vector per
/// use, for reconstructing the global monomial of a defect. Requires wall
/// functions to be powers of a one-variable binomial (initial walls) or a
/// single-term correction (scattered walls).
struct MarkerShape {
    bool initial = true;
    int t_index = -1;                       // initial walls
    std::vector<std::uint32_t> term_t;      // non-initial: t-vector of the term
    std::int64_t term_order = 0;            // non-initial: its total degree
};

inline MarkerShape marker_shape(const Ray& ray, const TruncationPolicy& pol) {
    MarkerShape s;
    s.initial = ray.initial;
    if (ray.initial) {
        if (ray.t_index < 0)
            throw std::logic_error("initial ray without a t-variable cannot be scattered");
        s.t_index = static_cast<int>(ray.t_index);
        for (const auto& [mono, c] : ray.function.terms()) {
            std::int64_t deg = pol.degree(mono.t);
            if (deg == 0) continue;
            if (mono.t[static_cast<std::size_t>(ray.t_index)] !=
                static_cast<std::uint32_t>(deg))
                throw std::logic_error("initial wall function mixes t-variables");
        }
        return s;
    }
    for (const auto& [mono, c] : ray.function.terms()) {
        std::int64_t deg = pol.degree(mono.t);
        if (deg == 0) continue;
        if (s.term_order != 0)
            throw std::logic_error("scattered wall function is not a binomial");
        s.term_t = mono.t;
        s.term_order = deg;
    }
    return s;
}

}  // namespace detail

/// Extracts the correcting terms a_i t^{k+1} z^{m_i} of a local diagram that
/// is consistent to order k. The coefficient of each correction is
/// decomposed into ancestry variants by marker monomial. `y_prune` excludes
/// directions that were dropped from the diagram by the same bound.
inline std::vector<Defect> consistency_defect(const LocalDiagram& ld, std::int64_t k,
                                              std::optional<std::int64_t> y_prune = {}) {
    std::vector<Defect> out;
    if (ld.walls.empty()) return out;
    const TruncationPolicy& global_pol = ld.walls[0].ray.function.policy();
    const std::int64_t target = k + 1;

    // Marker ring: one variable per local wall; the exponent records the
    // t-degree consumed from that wall, so plain total degree is the global
    // t-degree.
    TruncationPolicy marker_pol{ld.walls.size(), target, {}};
    std::vector<Series> marked;
    std::vector<detail::MarkerShape> shapes;
    for (std::size_t w = 0; w < ld.walls.size(); ++w) {
        const Ray& ray = ld.walls[w].ray;
        shapes.push_back(detail::marker_shape(ray, global_pol));
        Series f(marker_pol);
        for (const auto& [mono, c] : ray.function.terms()) {
            Monomial nm{std::vector<std::uint32_t>(ld.walls.size(), 0), mono.m};
            nm.t[w] = static_cast<std::uint32_t>(global_pol.degree(mono.t));
            f.add_term(nm, c);
        }
        marked.push_back(std::move(f));
    }

    Series x = Series::term(marker_pol, 1, -1, {1, 0});
    Series y = Series::term(marker_pol, 1, -1, {0, 1});
    for (const LocalRay& lr : ld.rays) {
        LatticeVector n = rot90(lr.direction);
        x = detail::apply_crossing(x, marked[lr.wall], n);
        y = detail::apply_crossing(y, marked[lr.wall], n);
    }
    Series ux = x.shifted_m({-1, 0}) - Series::one(marker_pol);
    Series uy = y.shifted_m({0, -1}) - Series::one(marker_pol);

    auto reconstruct = [&](const Monomial& mono) {
        std::vector<std::uint32_t> t(global_pol.t_count, 0);
        for (std::size_t w = 0; w < ld.walls.size(); ++w) {
            std::uint32_t e = mono.t[w];
            if (e == 0) continue;
            const detail::MarkerShape& s = shapes[w];
            if (s.initial) {
                t[static_cast<std::size_t>(s.t_index)] += e;
            } else {
                if (e % s.term_order != 0)
                    throw std::logic_error("marker exponent not a multiple of wall order");
                std::uint32_t uses = e / static_cast<std::uint32_t>(s.term_order);
                for (std::size_t i = 0; i < s.term_t.size(); ++i)
                    t[i] += uses * s.term_t[i];
            }
        }
        return t;
    };

    auto pruned = [&](LatticeVector m) { return y_prune && m.b > *y_prune; };

    // Marker variants of one correction only cancel after collapsing to the
    // global ring, so lower-order consistency is checked on the collapse.
    for (const Series* u : {&ux, &uy}) {
        std::map<Monomial, Rational> collapsed;
        for (const auto& [mono, c] : u->terms())
            if (marker_pol.degree(mono.t) < target && !pruned(mono.m))
                collapsed[Monomial{reconstruct(mono), mono.m}] += c;
        for (const auto& [mono, c] : collapsed)
            if (c != 0)
                throw std::logic_error("local diagram not consistent to order " +
                                       std::to_string(k) + " at t-degree " +
                                       std::to_string(global_pol.degree(mono.t)));
    }

    // a from theta(x): coefficient is  m^_y * a; from theta(y): -m^_x * a.
    // Marker variants are read off one fixed route; the overdetermination of
    // the normal form is asserted on the collapse, where it is valid.
    std::map<Monomial, Rational> coeffs;
    std::map<Monomial, Rational> residual;  // m^_x * c_x + m^_y * c_y, collapsed
    for (const auto& [mono, c] : ux.terms()) {
        if (pruned(mono.m)) continue;
        if (mono.m.is_zero()) throw std::logic_error("z^0 defect term");
        LatticeVector mhat = primitive(mono.m).first;
        if (mhat.b != 0) coeffs[mono] = c / Rational(mhat.b);
        residual[Monomial{reconstruct(mono), mono.m}] += Rational(mhat.a) * c;
    }
    for (const auto& [mono, c] : uy.terms()) {
        if (pruned(mono.m)) continue;
        if (mono.m.is_zero()) throw std::logic_error("z^0 defect term");
        LatticeVector mhat = primitive(mono.m).first;
        if (mhat.b == 0) coeffs[mono] = -c / Rational(mhat.a);
        residual[Monomial{reconstruct(mono), mono.m}] += Rational(mhat.b) * c;
    }
    for (const auto& [mono, c] : residual)
        if (c != 0) throw std::logic_error("defect normal form overdetermination failed");

    std::map<Monomial, Defect> grouped;
    for (const auto& [mono, a] : coeffs) {
        if (a == 0) continue;
        Monomial key{reconstruct(mono), mono.m};
        auto [it, fresh] = grouped.emplace(key, Defect{});
        Defect& def = it->second;
        if (fresh) {
            def.coefficient = 0;
            def.m = mono.m;
            def.t_monomial = key.t;
        }
        def.coefficient += a;
        AncestryVariant v{{}, a};
        for (std::size_t w = 0; w < ld.walls.size(); ++w)
            if (mono.t[w] != 0)
                v.links.push_back(
                    {ld.walls[w].diagram_index, static_cast<std::int64_t>(mono.t[w])});
        def.variants.push_back(std::move(v));
    }
    for (auto& [key, def] : grouped)
        if (def.coefficient != 0) out.push_back(std::move(def));
    return out;
}

struct ScatterOptions {
    bool accelerate = false;
    /// Case runs only: drop correcting walls whose z-exponent has
    /// y-component above this bound (they cannot influence the certified
    /// invariants).
    std::optional<std::int64_t> y_prune;
    std::function<void(std::int64_t order, std::size_t points, std::size_t walls)> progress;
};

struct WindowOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::optional<QPoint> ray_intersection(const Ray& a, const Ray& b) {
    Rational den = Rational(det(a.direction, b.direction));
    if (den == 0) return std::nullopt;
    QPoint v = b.base - a.base;
    Rational s = cross(v, b.direction) / den;
    Rational u = cross(v, a.direction) / den;
    if (s < 0 || u < 0) return std::nullopt;
    return QPoint{a.base.x + s * Rational(a.direction.a),
                  a.base.y + s * Rational(a.direction.b)};
}

inline std::string ray_key(const Ray& r) {
    return to_string(r.base) + "|" + to_string(r.direction) + "|" + to_string(r.function);
}

/// Translate a ray by n periods of the case symmetry. Returns nullopt when a
/// t-variable would leave the generated window.
inline std::optional<Ray> translate_ray(const Diagram& d, const Ray& r, std::int64_t n) {
    const UnfoldingData& u = *d.unfolding;
    Ray out = r;
    out.base = u.apply_period(r.base, n);
    out.direction = u.apply_linear(r.direction, n);
    Series f(r.function.policy());
    const std::int64_t shift = n * d.t_per_period;
    for (const auto& [mono, c] : r.function.terms()) {
        Monomial nm{std::vector<std::uint32_t>(mono.t.size(), 0), u.apply_linear(mono.m, n)};
        for (std::size_t i = 0; i < mono.t.size(); ++i) {
            if (mono.t[i] == 0) continue;
            std::int64_t j = static_cast<std::int64_t>(i) + shift;
            if (j < 0 || j >= static_cast<std::int64_t>(mono.t.size())) return std::nullopt;
            nm.t[static_cast<std::size_t>(j)] = mono.t[i];
        }
        f.add_term(nm, c);
    }
    out.function = std::move(f);
    if (r.t_index >= 0) {
        std::int64_t j = r.t_index + shift;
        if (j < 0 || j >= static_cast<std::int64_t>(d.t_count)) return std::nullopt;
        out.t_index = j;
    }
    out.ancestry.clear();  // caller remaps
    return out;
}

}  // namespace detail

/// Order-by-order completion: after scatter(d, k) the diagram is consistent
/// to order k at every intersection point. With `accelerate` set and case
/// metadata present, defects are computed at orbit representatives in the
/// central fundamental domain and copied under the (period, shear) action.
inline Diagram scatter(Diagram d, std::int64_t k, const ScatterOptions& opts = {}) {
    if (k < d.certified_order)
        throw std::invalid_argument("scatter: target below certified order");
    if (k > d.t_bound)
        throw std::invalid_argument("scatter: target order exceeds the ring truncation");
    const bool accel = opts.accelerate && d.kind == DiagramKind::Case && d.unfolding.has_value();
    // Corrections at order k can involve initial walls up to about k/2
    // fundamental domains away from the points they certify.
    if (d.kind == DiagramKind::Case && d.unfolding && 2 * d.unfolding->domains < k)
        throw WindowOverflow("order " + std::to_string(k) + " needs at least " +
                             std::to_string((k + 1) / 2) +
                             " fundamental domains; rebuild with a larger domain count");

    // Case diagrams: the bases of the initial rays are the affine
    // singularities p_e. The loop product there equals the monodromy, not
    // the identity; they are not scattering points.
    std::set<QPoint> singular;
    if (d.kind == DiagramKind::Case)
        for (const Ray& r : d.rays)
            if (r.initial) singular.insert(r.base);

    for (std::int64_t j = d.certified_order + 1; j <= k; ++j) {
        // intersection points of two or more pairwise non-parallel rays,
        // with the cheapest reachable defect order per point
        std::map<QPoint, std::int64_t> points;
        for (std::size_t i1 = 0; i1 < d.rays.size(); ++i1) {
            for (std::size_t i2 = i1 + 1; i2 < d.rays.size(); ++i2) {
                auto p = detail::ray_intersection(d.rays[i1], d.rays[i2]);
                if (!p) continue;
                if (singular.count(*p)) {
                    if (!d.rays[i1].initial || !d.rays[i2].initial)
                        throw std::logic_error(
                            "scattered wall passes through an affine singularity");
                    continue;
                }
                std::int64_t lower = d.rays[i1].order + d.rays[i2].order;
                auto [it, fresh] = points.emplace(*p, lower);
                if (!fresh) it->second = std::min(it->second, lower);
            }
        }

        Rational central_lo, central_hi;
        if (accel) {
            const UnfoldingData& u = *d.unfolding;
            central_lo = Rational(u.lengths[0]) / 2 - Rational(u.period) / 2;
            central_hi = central_lo + Rational(u.period);
        }

        std::vector<Ray> staged;
        std::size_t processed = 0;
        for (const auto& [p, lower] : points) {
            if (lower > j) continue;
            if (accel && (p.x < central_lo || p.x >= central_hi)) continue;
            LocalDiagram ld = localize(d, p);
            ++processed;
            std::vector<Defect> defects = consistency_defect(ld, j - 1, opts.y_prune);
            for (const Defect& def : defects) {
                Ray r;
                r.base = p;
                r.direction = primitive(def.m).first;
                r.order = j;
                r.initial = false;
                r.ancestry = def.variants;
                Series f = Series::one(d.policy());
                f.add_term(Monomial{def.t_monomial, def.m}, def.coefficient);
                r.function = std::move(f);
                staged.push_back(std::move(r));
            }
        }

        if (accel && !staged.empty()) {
            std::map<std::string, std::size_t> index;
            for (std::size_t i = 0; i < d.rays.size(); ++i)
                index.emplace(detail::ray_key(d.rays[i]), i);
            const Rational x_lo = Rational(d.unfolding->vertices.front().a);
            const Rational x_hi = Rational(d.unfolding->vertices.back().a);
            std::vector<Ray> copies;
            for (const Ray& r : staged) {
                for (std::int64_t n = -2 * d.unfolding->domains - 1;
                     n <= 2 * d.unfolding->domains + 1; ++n) {
                    if (n == 0) continue;
                    auto tr = detail::translate_ray(d, r, n);
                    if (!tr || tr->base.x < x_lo || tr->base.x > x_hi) continue;
                    bool ok = true;
                    std::vector<AncestryVariant> variants;
                    for (const AncestryVariant& v : r.ancestry) {
                        AncestryVariant tv{{}, v.coefficient};
                        for (const AncestryLink& link : v.links) {
                            auto parent = detail::translate_ray(d, d.rays[link.parent], n);
                            if (!parent) {
                                ok = false;
                                break;
                            }
                            auto it = index.find(detail::ray_key(*parent));
                            if (it == index.end()) {
                                ok = false;
                                break;
                            }
                            tv.links.push_back({it->second, link.weight});
                        }
                        if (!ok) break;
                        variants.push_back(std::move(tv));
                    }
                    if (!ok) continue;
                    tr->ancestry = std::move(variants);
                    copies.push_back(std::move(*tr));
                }
            }
            staged.insert(staged.end(), copies.begin(), copies.end());
        }

        if (opts.progress) opts.progress(j, processed, staged.size());
        for (Ray& r : staged) d.rays.push_back(std::move(r));
        canonical_sort(d);
        d.certified_order = j;
    }
    return d;
}

/// Test hook: path-ordered product at p is the identity mod t^{order+1}.
inline bool point_consistent(const Diagram& d, const QPoint& p, std::int64_t order) {
    return path_ordered_product(localize(d, p)).is_identity_mod(order);
}

}  // namespace scatter
