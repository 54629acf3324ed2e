#include "scatter/diagram.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace scatter;

namespace {

TEST_CASE("std(1,1): two lines, four rays") {
    Diagram d = new_named("std", 1, 1, 4);
    REQUIRE(d.rays.size() == 4);
    const TruncationPolicy pol = d.policy();
    Series fx = Series::one(pol) + Series::term(pol, 1, 0, {1, 0});
    Series fy = Series::one(pol) + Series::term(pol, 1, 1, {0, 1});
    int on_x = 0, on_y = 0;
    for (const Ray& r : d.rays) {
        REQUIRE(r.base == q_point(0, 0));
        if (r.direction.b == 0) {
            REQUIRE(r.function == fx);
            ++on_x;
        } else {
            REQUIRE(r.function == fy);
            ++on_y;
        }
    }
    REQUIRE(on_x == 2);
    REQUIRE(on_y == 2);
}

TEST_CASE("exp and det constructors") {
    Diagram e = new_named("exp", 2, 3, 4);
    bool found_x2 = false, found_y3 = false;
    for (const Ray& r : e.rays) {
        for (const auto& [mono, c] : r.function.terms()) {
            if (mono.m == LatticeVector{2, 0}) found_x2 = true;
            if (mono.m == LatticeVector{0, 3}) found_y3 = true;
        }
    }
    REQUIRE(found_x2);
    REQUIRE(found_y3);

    Diagram det2 = new_named("det", 2, 0, 4);
    bool found = false;
    for (const Ray& r : det2.rays)
        for (const auto& [mono, c] : r.function.terms())
            if (mono.m == LatticeVector{-1, 2}) found = true;
    REQUIRE(found);

    REQUIRE_THROWS_AS(new_named("std", 0, 1, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(new_named("bogus", 1, 1, 4), std::invalid_argument);
}

TEST_CASE("new_case (9): six initial rays based in the central domain") {
    Diagram d = new_case(CaseId{"(9)"}, 1, 4);
    // central fundamental domain I = [-1, 2)
    int based_central = 0;
    for (const Ray& r : d.rays) {
        REQUIRE(r.initial);
        REQUIRE(r.function.size() == 2);  // all exponents l_e = 1
        if (r.base.x >= -1 && r.base.x < 2) ++based_central;
    }
    REQUIRE(based_central == 6);
    // every base is a singular point of the unfolding
    for (const Ray& r : d.rays) {
        bool found = false;
        for (const auto& e : d.unfolding->edges)
            if (e.singular == r.base) found = true;
        REQUIRE(found);
    }
}

TEST_CASE("new_case (3a): initial functions are cubes") {
    Diagram d = new_case(CaseId{"(3a)"}, 1, 4);
    for (const Ray& r : d.rays) {
        REQUIRE(r.function.size() == 4);  // (1 + t z^m)^3
        Monomial cube{std::vector<std::uint32_t>(d.t_count, 0), r.direction * 3};
        cube.t[static_cast<std::size_t>(r.t_index)] = 3;
        REQUIRE(r.function.coefficient(cube) == 1);
    }
}

TEST_CASE("refined case diagram subdivides long edges") {
    Diagram coarse = new_case(CaseId{"(8'a)"}, 1, 4);
    Diagram fine = new_case_refined(CaseId{"(8'a)"}, 1, 4);
    // per period: 3 edges coarse, 4 unit segments refined
    REQUIRE(coarse.t_count == 9);
    REQUIRE(fine.t_count == 12);
    REQUIRE(fine.t_per_period == 4);
    for (const Ray& r : fine.rays) REQUIRE(r.function.size() == 2);
}

TEST_CASE("merge_parallel multiplies functions of coincident rays") {
    Diagram d = new_named("std", 1, 1, 4);
    const TruncationPolicy pol = d.policy();
    Ray extra;
    extra.base = q_point(0, 0);
    extra.direction = {1, 0};
    extra.function = Series::one(pol) + Series::term(pol, 2, 1, {1, 0});
    d.rays.push_back(extra);
    canonical_sort(d);

    Diagram m = merge_parallel(d);
    REQUIRE(m.rays.size() == 4);
    bool found = false;
    for (const Ray& r : m.rays) {
        if (r.direction == LatticeVector{1, 0} && r.function.size() == 4) {
            // (1 + t0 x)(1 + 2 t1 x)
            REQUIRE(r.function.coefficient({{1, 1}, {2, 0}}) == 2);
            found = true;
        }
    }
    REQUIRE(found);

    // diagram with no duplicates is unchanged
    Diagram plain = new_named("std", 1, 1, 4);
    REQUIRE(merge_parallel(plain).rays == plain.rays);
}

TEST_CASE("canonical sort is deterministic and ancestry-stable") {
    Diagram d = new_named("std", 2, 3, 5);
    Diagram e = new_named("std", 2, 3, 5);
    REQUIRE(d.rays == e.rays);
}

TEST_CASE("ray invariant checker") {
    Diagram d = new_named("std", 1, 1, 4);
    Ray bad = d.rays[0];
    bad.direction = {2, 0};
    REQUIRE_THROWS_AS(check_ray(bad), std::invalid_argument);
    Ray bad2 = d.rays[0];
    bad2.function = Series::one(d.policy());
    REQUIRE_THROWS_AS(check_ray(bad2), std::invalid_argument);
}

}  // namespace
