#pragma once

#include "scatter/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

/// One of the 16 reflexive-polytope cases of Gorenstein toric Fano surfaces.
struct CaseId {
    std::string label;  // canonical, e.g. "(9)", "(8'a)"

    bool operator==(const CaseId&) const = default;
    bool operator<(const CaseId& o) const { return label < o.label; }
};

struct CaseData {
    std::vector<std::int64_t> kinks;    // k_1..k_r
    std::vector<std::int64_t> lengths;  // l_1..l_r
};

struct CaseEntry {
    const char* label;
    std::vector<LatticeVector> polytope;  // vertices, counterclockwise
    CaseData data;
};

/// Vertex lists transcribed from the fans/polytopes figure; (k,l) as derived
/// from them (lexicographically minimal cyclic rotation). The derivation is
/// locked by a regression test.
inline const std::vector<CaseEntry>& case_table() {
    static const std::vector<CaseEntry> table = {
        {"(9)", {{1, 0}, {0, 1}, {-1, -1}}, {{3, 3, 3}, {1, 1, 1}}},
        {"(8')", {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {{2, 2, 2, 2}, {1, 1, 1, 1}}},
        {"(8)", {{-1, -1}, {0, -1}, {1, 0}, {0, 1}}, {{1, 2, 3, 2}, {1, 1, 1, 1}}},
        {"(7)", {{-1, -1}, {0, -1}, {1, 0}, {1, 1}, {0, 1}}, {{1, 1, 1, 2, 2}, {1, 1, 1, 1, 1}}},
        {"(6)", {{1, 1}, {0, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, 0}},
         {{1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 1, 1}}},
        {"(8'a)", {{-1, -1}, {1, -1}, {0, 1}}, {{2, 4, 2}, {1, 1, 2}}},
        {"(7a)", {{1, -1}, {0, 1}, {-1, 0}, {-1, -1}}, {{1, 1, 2, 3}, {1, 2, 1, 1}}},
        {"(6a)", {{1, -1}, {0, 1}, {-1, 1}, {-1, -1}}, {{1, 1, 2, 2}, {2, 2, 1, 1}}},
        {"(6b)", {{-1, -1}, {1, -1}, {-1, 2}}, {{1, 3, 2}, {2, 1, 3}}},
        {"(6c)", {{-1, -1}, {1, -1}, {1, 0}, {0, 1}, {-1, 0}},
         {{1, 1, 2, 1, 1}, {1, 1, 1, 1, 2}}},
        {"(5a)", {{1, -1}, {0, 1}, {-1, 2}, {-1, -1}}, {{1, 1, 1, 2}, {1, 3, 2, 1}}},
        {"(5b)", {{-1, -1}, {1, -1}, {1, 0}, {0, 1}, {-1, 1}},
         {{1, 1, 1, 1, 1}, {1, 1, 1, 2, 2}}},
        {"(4a)", {{1, -1}, {1, 1}, {-1, 1}, {-1, -1}}, {{1, 1, 1, 1}, {2, 2, 2, 2}}},
        {"(4b)", {{1, -1}, {1, 0}, {-1, 2}, {-1, -1}}, {{1, 1, 1, 1}, {1, 2, 3, 2}}},
        {"(4c)", {{-1, -1}, {1, -1}, {-1, 3}}, {{1, 2, 1}, {2, 2, 4}}},
        {"(3a)", {{-1, -1}, {2, -1}, {-1, 2}}, {{1, 1, 1}, {3, 3, 3}}},
    };
    return table;
}

inline std::optional<CaseId> parse_case(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    static const std::map<std::string, std::string> aliases = {
        {"p2", "(9)"}, {"p1xp1", "(8')"}, {"f1", "(8)"}, {"cubic", "(3a)"}};
    if (auto it = aliases.find(name); it != aliases.end()) return CaseId{it->second};
    for (const auto& entry : case_table()) {
        std::string lbl = entry.label;
        std::transform(lbl.begin(), lbl.end(), lbl.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (name == lbl) return CaseId{entry.label};
        if (name == lbl.substr(1, lbl.size() - 2)) return CaseId{entry.label};  // "9" for "(9)"
    }
    return std::nullopt;
}

inline const CaseEntry& case_entry(const CaseId& c) {
    for (const auto& entry : case_table())
        if (c.label == entry.label) return entry;
    throw std::invalid_argument("unknown case label: " + c.label);
}

/// k_v = |det(m1|m2)| for the primitive tangents at a vertex.
inline std::int64_t kink(LatticeVector m1, LatticeVector m2) {
    if (m1.is_zero() || m2.is_zero()) throw std::invalid_argument("kink of zero vector");
    if (!is_primitive(m1) || !is_primitive(m2))
        throw std::invalid_argument("kink arguments must be primitive");
    std::int64_t d = det(m1, m2);
    return d < 0 ? -d : d;
}

inline CaseData case_data(const CaseId& c) { return case_entry(c).data; }

/// Re-derives (k,l) from a ccw vertex list; used by case-table regression
/// tests and user-facing sanity checks.
inline CaseData derive_case_data(const std::vector<LatticeVector>& poly) {
    std::size_t r = poly.size();
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(r);
    for (std::size_t i = 0; i < r; ++i) {
        LatticeVector v = poly[i];
        LatticeVector prev = poly[(i + r - 1) % r];
        LatticeVector next = poly[(i + 1) % r];
        auto t1 = primitive(prev - v).first;
        auto t2 = primitive(next - v).first;
        pairs[i].first = kink(t1, t2);
        pairs[i].second = primitive(next - v).second;
    }
    auto rotation = [&](std::size_t s) {
        std::vector<std::int64_t> flat;
        for (std::size_t i = 0; i < r; ++i) {
            flat.push_back(pairs[(s + i) % r].first);
            flat.push_back(pairs[(s + i) % r].second);
        }
        return flat;
    };
    std::size_t best = 0;
    for (std::size_t s = 1; s < r; ++s)
        if (rotation(s) < rotation(best)) best = s;
    CaseData out;
    for (std::size_t i = 0; i < r; ++i) {
        out.kinks.push_back(pairs[(best + i) % r].first);
        out.lengths.push_back(pairs[(best + i) % r].second);
    }
    return out;
}

/// An edge of the unfolded boundary. `index` runs over Z; edges 0..r-1 form
/// the central period. `dir` points from vertex(index) to vertex(index+1)
/// and has x-component +1 in these coordinates.
struct UnfoldEdge {
    std::int64_t index = 0;
    LatticeVector v_from, v_to;   // adjacent vertices
    LatticeVector dir;            // primitive, v_to = v_from + length*dir
    std::int64_t length = 1;
    QPoint singular;              // p_e, the edge midpoint
};

/// Integral boundary point of the unit-refined boundary; flat points carry
/// kink 0.
struct RefinedPoint {
    LatticeVector pos;
    std::int64_t kink = 0;
};

/// The unfolding of the spanning polytope, generated over a finite window of
/// fundamental domains, together with its periodicity data.
struct UnfoldingData {
    CaseId case_id;
    std::vector<std::int64_t> kinks, lengths;
    std::int64_t domains = 1;
    std::int64_t period = 0;        // horizontal translation length sum(l_i)
    std::int64_t shear = 0;         // -sum(k_i); A = [[1,0],[shear,1]]
    LatticeVector translation;      // T(p) = A p + translation
    std::vector<LatticeVector> vertices;   // vertex(j) for j in [j_lo, j_hi]
    std::int64_t j_lo = 0, j_hi = 0;
    std::vector<UnfoldEdge> edges;         // edge(j) for j in [j_lo, j_hi)
    std::vector<RefinedPoint> refined;     // all integral boundary points, by x

    const UnfoldEdge& edge(std::int64_t j) const {
        if (j < j_lo || j >= j_hi) throw std::out_of_range("edge index outside window");
        return edges[static_cast<std::size_t>(j - j_lo)];
    }

    LatticeVector apply_linear(LatticeVector v, std::int64_t steps = 1) const {
        return {v.a, v.b + steps * shear * v.a};
    }

    QPoint apply_period(const QPoint& p, std::int64_t steps = 1) const {
        Rational x = p.x + Rational(steps * period);
        Rational y = p.y + Rational(steps) * (Rational(shear) * p.x + Rational(translation.b)) +
                     Rational(shear) * Rational(steps * (steps - 1) / 2) * Rational(period);
        return {x, y};
    }
};

/// Builds the unfolding with `domains` fundamental domains on each side of
/// the central one. The top edge is Conv{(0,0),(l_1,0)}.
inline UnfoldingData build_unfolding(const CaseId& c, std::int64_t domains) {
    if (domains < 1) throw std::invalid_argument("domains must be >= 1");
    const CaseData data = case_data(c);
    const std::int64_t r = static_cast<std::int64_t>(data.kinks.size());
    auto k_at = [&](std::int64_t j) {  // kink at vertex(j)
        return data.kinks[static_cast<std::size_t>(((j % r) + r) % r)];
    };
    auto l_at = [&](std::int64_t j) {  // length of edge(j)
        return data.lengths[static_cast<std::size_t>(((j % r) + r) % r)];
    };

    UnfoldingData u;
    u.case_id = c;
    u.kinks = data.kinks;
    u.lengths = data.lengths;
    u.domains = domains;
    u.j_lo = -r * domains;
    u.j_hi = r * (domains + 1);
    for (auto k : data.kinks) u.shear -= k;
    for (auto l : data.lengths) u.period += l;

    // vertex(j) and edge slope c_j; slopes drop by the kink at each vertex.
    std::map<std::int64_t, LatticeVector> vert;
    vert[0] = {0, 0};
    std::int64_t slope = 0;
    for (std::int64_t j = 0; j < u.j_hi; ++j) {
        if (j > 0) slope -= k_at(j);
        vert[j + 1] = vert[j] + LatticeVector{1, slope} * l_at(j);
    }
    slope = 0;
    for (std::int64_t j = -1; j >= u.j_lo; --j) {
        slope += k_at(j + 1);
        vert[j] = vert[j + 1] - LatticeVector{1, slope} * l_at(j);
    }

    for (std::int64_t j = u.j_lo; j <= u.j_hi; ++j) u.vertices.push_back(vert[j]);
    for (std::int64_t j = u.j_lo; j < u.j_hi; ++j) {
        UnfoldEdge e;
        e.index = j;
        e.v_from = vert[j];
        e.v_to = vert[j + 1];
        e.length = l_at(j);
        e.dir = primitive(e.v_to - e.v_from).first;
        e.singular = {Rational(e.v_from.a + e.v_to.a, 2), Rational(e.v_from.b + e.v_to.b, 2)};
        u.edges.push_back(e);
    }

    u.translation = vert[r];  // T(0,0) = vertex(r)

    for (std::int64_t j = u.j_lo; j < u.j_hi; ++j) {
        const UnfoldEdge& e = u.edge(j);
        for (std::int64_t i = 0; i < e.length; ++i) {
            RefinedPoint p;
            p.pos = e.v_from + e.dir * i;
            p.kink = (i == 0) ? k_at(j) : 0;
            u.refined.push_back(p);
        }
    }
    u.refined.push_back(RefinedPoint{vert[u.j_hi], k_at(u.j_hi)});
    return u;
}

/// Class vectors attached to integral boundary points, period-equivariantly.
/// Degrees D.beta_v equal the kink at the point.
struct SmoothModelClasses {
    CaseId case_id;
    std::vector<std::string> basis;
    // class vector by x mod period (refined points have consecutive integer
    // x-coordinates, one per residue)
    std::vector<std::vector<std::int64_t>> class_by_residue;
    std::int64_t period = 0;

    const std::vector<std::int64_t>& class_at_x(std::int64_t x) const {
        return class_by_residue[static_cast<std::size_t>(((x % period) + period) % period)];
    }
};

inline SmoothModelClasses smooth_model_classes(const CaseId& c) {
    SmoothModelClasses out;
    out.case_id = c;
    if (c.label == "(9)") {
        out.basis = {"H"};
        out.period = 3;
        out.class_by_residue = {{1}, {1}, {1}};
        return out;
    }
    if (c.label == "(8'a)") {
        // Refined boundary of the second Hirzebruch surface: vertices cycle
        // F (kink 2), S (kink 4), F, E (flat), with F -> L2, S -> L1+L2,
        // E -> L1-L2 under H2(F2) ~ H2(P1xP1).
        out.basis = {"L1", "L2"};
        out.period = 4;
        out.class_by_residue = {{0, 1}, {1, 1}, {0, 1}, {1, -1}};
        return out;
    }
    throw std::invalid_argument("no built-in class table for case " + c.label +
                                "; supply one as a JSON file");
}

}  // namespace scatter
