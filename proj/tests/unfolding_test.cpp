#include "scatter/unfolding.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace scatter;

namespace {

TEST_CASE("kink examples") {
    REQUIRE(kink({1, 0}, {0, 1}) == 1);
    // P^2 vertex (1,0) of Delta: tangents toward (0,1) and (-1,-1)
    REQUIRE(kink({-1, 1}, {-2, -1}) == 3);
    // (8') vertex (1,0), tangents (-1,1), (-1,-1)
    REQUIRE(kink({-1, 1}, {-1, -1}) == 2);
    REQUIRE_THROWS_AS(kink({0, 0}, {1, 0}), std::invalid_argument);
}

TEST_CASE("case parsing and aliases") {
    REQUIRE(parse_case("P2")->label == "(9)");
    REQUIRE(parse_case("p1xp1")->label == "(8')");
    REQUIRE(parse_case("F1")->label == "(8)");
    REQUIRE(parse_case("CUBIC")->label == "(3a)");
    REQUIRE(parse_case("(8'a)")->label == "(8'a)");
    REQUIRE(parse_case("8'a")->label == "(8'a)");
    REQUIRE_FALSE(parse_case("bogus").has_value());
}

TEST_CASE("case_data pinned values") {
    auto p2 = case_data(CaseId{"(9)"});
    REQUIRE(p2.kinks == std::vector<std::int64_t>{3, 3, 3});
    REQUIRE(p2.lengths == std::vector<std::int64_t>{1, 1, 1});
    auto f1 = case_data(CaseId{"(8)"});
    REQUIRE(f1.kinks == std::vector<std::int64_t>{1, 2, 3, 2});
    REQUIRE(f1.lengths == std::vector<std::int64_t>{1, 1, 1, 1});
    auto cubic = case_data(CaseId{"(3a)"});
    REQUIRE(cubic.kinks == std::vector<std::int64_t>{1, 1, 1});
    REQUIRE(cubic.lengths == std::vector<std::int64_t>{3, 3, 3});
}

TEST_CASE("case table regression: (k,l) re-derived from stored polytopes") {
    for (const auto& entry : case_table()) {
        auto derived = derive_case_data(entry.polytope);
        INFO("case " << entry.label);
        REQUIRE(derived.kinks == entry.data.kinks);
        REQUIRE(derived.lengths == entry.data.lengths);
        // reflexivity: sum of kinks + boundary points = 12
        std::int64_t sk = 0, sl = 0;
        for (auto k : entry.data.kinks) sk += k;
        for (auto l : entry.data.lengths) sl += l;
        REQUIRE(sk + sl == 12);
    }
}

TEST_CASE("build_unfolding: paper windows") {
    auto p2 = build_unfolding(CaseId{"(9)"}, 1);
    std::set<LatticeVector> vs(p2.vertices.begin(), p2.vertices.end());
    REQUIRE(vs.count({0, 0}));
    REQUIRE(vs.count({1, 0}));
    REQUIRE(vs.count({2, -3}));
    REQUIRE(vs.count({-1, -3}));
    REQUIRE(p2.period == 3);
    REQUIRE(p2.shear == -9);

    auto f1 = build_unfolding(CaseId{"(8)"}, 1);
    std::set<LatticeVector> vf(f1.vertices.begin(), f1.vertices.end());
    for (LatticeVector v : {LatticeVector{0, 0}, {1, 0}, {2, -2}, {-1, -1}, {-2, -4}})
        REQUIRE(vf.count(v));
    REQUIRE(f1.period == 4);
    REQUIRE(f1.shear == -8);
}

TEST_CASE("build_unfolding: convexity, kinks, lengths re-derived") {
    for (const auto& entry : case_table()) {
        auto u = build_unfolding(CaseId{entry.label}, 2);
        INFO("case " << entry.label);
        const std::int64_t r = static_cast<std::int64_t>(u.kinks.size());
        for (std::int64_t j = u.j_lo + 1; j < u.j_hi; ++j) {
            const auto& e_prev = u.edge(j - 1);
            const auto& e = u.edge(j);
            // reconstructed kink at vertex(j) matches the cyclic table entry
            std::int64_t expect = u.kinks[static_cast<std::size_t>(((j % r) + r) % r)];
            REQUIRE(kink(-e_prev.dir, e.dir) == expect);
            // convex: consecutive directions turn clockwise
            REQUIRE(det(e_prev.dir, e.dir) < 0);
        }
        for (std::int64_t j = u.j_lo; j < u.j_hi; ++j) {
            std::int64_t expect = u.lengths[static_cast<std::size_t>(((j % r) + r) % r)];
            REQUIRE(u.edge(j).length == expect);
        }
    }
}

TEST_CASE("build_unfolding: period consistency under (period, shear)") {
    for (const char* label : {"(9)", "(8)", "(3a)", "(8'a)", "(6)"}) {
        auto u = build_unfolding(CaseId{label}, 2);
        INFO("case " << label);
        const std::int64_t r = static_cast<std::int64_t>(u.kinks.size());
        for (std::int64_t j = u.j_lo; j + r < u.j_hi; ++j) {
            const auto& e = u.edge(j);
            const auto& te = u.edge(j + r);
            QPoint mapped = u.apply_period(QPoint{Rational(e.v_from.a), Rational(e.v_from.b)});
            REQUIRE(mapped.x == Rational(te.v_from.a));
            REQUIRE(mapped.y == Rational(te.v_from.b));
            REQUIRE(u.apply_linear(e.dir) == te.dir);
            QPoint ms = u.apply_period(e.singular);
            REQUIRE(ms.x == te.singular.x);
            REQUIRE(ms.y == te.singular.y);
        }
        // inverse period map round-trips
        QPoint p{Rational(1, 2), Rational(-3, 2)};
        REQUIRE(u.apply_period(u.apply_period(p, -1), 1) == p);
        REQUIRE(u.apply_period(u.apply_period(p, 2), -2) == p);
    }
}

TEST_CASE("singular points lie in open edge interiors") {
    for (const auto& entry : case_table()) {
        auto u = build_unfolding(CaseId{entry.label}, 1);
        for (const auto& e : u.edges) {
            QPoint from{Rational(e.v_from.a), Rational(e.v_from.b)};
            QPoint to{Rational(e.v_to.a), Rational(e.v_to.b)};
            REQUIRE(((from.x < e.singular.x && e.singular.x < to.x) ||
                     (to.x < e.singular.x && e.singular.x < from.x)));
        }
    }
}

TEST_CASE("smooth model classes") {
    auto p2 = smooth_model_classes(CaseId{"(9)"});
    REQUIRE(p2.basis == std::vector<std::string>{"H"});
    for (std::int64_t x = -5; x <= 5; ++x)
        REQUIRE(p2.class_at_x(x) == std::vector<std::int64_t>{1});

    auto q = smooth_model_classes(CaseId{"(8'a)"});
    REQUIRE(q.basis == std::vector<std::string>{"L1", "L2"});
    // F -> L2 at x=0, S -> L1+L2 at x=1, F at x=2, E -> L1-L2 at x=3
    REQUIRE(q.class_at_x(0) == std::vector<std::int64_t>{0, 1});
    REQUIRE(q.class_at_x(1) == std::vector<std::int64_t>{1, 1});
    REQUIRE(q.class_at_x(2) == std::vector<std::int64_t>{0, 1});
    REQUIRE(q.class_at_x(3) == std::vector<std::int64_t>{1, -1});
    REQUIRE(q.class_at_x(-1) == std::vector<std::int64_t>{1, -1});

    REQUIRE_THROWS_AS(smooth_model_classes(CaseId{"(7)"}), std::invalid_argument);
}

TEST_CASE("refined boundary points agree with kinks of the unfolding") {
    auto u = build_unfolding(CaseId{"(8'a)"}, 1);
    // one refined point per integer x, kink pattern 2,4,2,0 per period
    std::map<std::int64_t, std::int64_t> kink_by_x;
    for (const auto& p : u.refined) kink_by_x[p.pos.a] = p.kink;
    REQUIRE(kink_by_x[0] == 2);
    REQUIRE(kink_by_x[1] == 4);
    REQUIRE(kink_by_x[2] == 2);
    REQUIRE(kink_by_x[3] == 0);
    REQUIRE(kink_by_x[4] == 2);
}

}  // namespace
