#include <doctest.h>

#include <set>
#include <unordered_set>

#include "hdim/groups.hpp"

using namespace hdim;

TEST_CASE("lattice group law and inverses") {
    const GroupSpec z3 = GroupSpec::lattice(3);
    CHECK(coord_count(z3) == 3);
    const GroupElement a = make_element(z3, {1, -2, 5});
    const GroupElement b = make_element(z3, {4, 7, -5});
    const GroupElement ab = multiply(z3, a, b);
    CHECK(ab[0] == 5);
    CHECK(ab[1] == 5);
    CHECK(ab[2] == 0);
    CHECK(multiply(z3, a, inverse(z3, a)) == identity(z3));
    CHECK(multiply(z3, inverse(z3, a), a) == identity(z3));
}

TEST_CASE("heisenberg group law") {
    // (a,b,c)(a',b',c') = (a+a', b+b', c+c'+a b'); hand products:
    // x*y = (1,1,1), y*x = (1,1,0), commutator xyx^-1y^-1 = (0,0,1).
    const GroupSpec h = GroupSpec::heisenberg();
    const GroupElement x = make_element(h, {1, 0, 0});
    const GroupElement y = make_element(h, {0, 1, 0});
    CHECK(multiply(h, x, y) == make_element(h, {1, 1, 1}));
    CHECK(multiply(h, y, x) == make_element(h, {1, 1, 0}));
    const GroupElement comm = multiply(
        h, multiply(h, x, y), multiply(h, inverse(h, x), inverse(h, y)));
    CHECK(comm == make_element(h, {0, 0, 1}));
    CHECK(multiply(h, comm, inverse(h, comm)) == identity(h));
    // associativity spot check on non-commuting triples
    const GroupElement g1 = make_element(h, {2, -1, 3});
    const GroupElement g2 = make_element(h, {-1, 4, 0});
    const GroupElement g3 = make_element(h, {5, 2, -7});
    CHECK(multiply(h, multiply(h, g1, g2), g3) == multiply(h, g1, multiply(h, g2, g3)));
}

TEST_CASE("product group wraps the cyclic coordinate") {
    const GroupSpec p = GroupSpec::product(GroupSpec::lattice(2), 5);
    CHECK(coord_count(p) == 3);
    const GroupElement a = make_element(p, {1, 1, 3});
    const GroupElement b = make_element(p, {0, -1, 4});
    const GroupElement ab = multiply(p, a, b);
    CHECK(ab[0] == 1);
    CHECK(ab[1] == 0);
    CHECK(ab[2] == 2); // 3 + 4 mod 5
    const GroupElement ai = inverse(p, a);
    CHECK(ai[2] == 2); // -3 mod 5
    CHECK(multiply(p, a, ai) == identity(p));
}

TEST_CASE("standard generators are symmetric and identity-free") {
    for (const GroupSpec& spec :
         {GroupSpec::lattice(1), GroupSpec::lattice(4), GroupSpec::heisenberg(),
          GroupSpec::product(GroupSpec::lattice(2), 7)}) {
        const auto gens = standard_generators(spec);
        std::set<GroupElement> seen;
        for (const auto& g : gens) {
            CHECK(g != identity(spec));
            CHECK(seen.insert(g).second); // no duplicates
        }
        for (const auto& g : gens) {
            const GroupElement gi = inverse(spec, g);
            CHECK(seen.count(gi) == 1);
        }
    }
    CHECK(standard_generators(GroupSpec::lattice(2)).size() == 4);
    CHECK(standard_generators(GroupSpec::heisenberg()).size() == 4);
    CHECK(standard_generators(GroupSpec::product(GroupSpec::lattice(2), 5)).size() == 6);
    // q = 2: the cyclic generator is its own inverse, kept once
    CHECK(standard_generators(GroupSpec::product(GroupSpec::lattice(1), 2)).size() == 3);
    // q = 1: cyclic factor contributes nothing
    CHECK(standard_generators(GroupSpec::product(GroupSpec::lattice(1), 1)).size() == 2);
}

TEST_CASE("spec json round trip") {
    for (const GroupSpec& spec :
         {GroupSpec::lattice(3), GroupSpec::heisenberg(),
          GroupSpec::product(GroupSpec::lattice(2), 64),
          GroupSpec::product(GroupSpec::heisenberg(), 3)}) {
        const GroupSpec back = spec_from_json(spec_to_json(spec));
        CHECK(back == spec);
    }
    CHECK_THROWS_AS(spec_from_json("{\"kind\":\"nope\"}"), SpecError);
    CHECK_THROWS_AS(spec_from_json("{\"kind\":\"lattice\",\"D\":0}"), SpecError);
    CHECK_THROWS_AS(spec_from_json("not json"), SpecError);
}

TEST_CASE("element string round trip") {
    const GroupSpec z2 = GroupSpec::lattice(2);
    const GroupElement g = make_element(z2, {-7, 12});
    CHECK(element_to_string(g) == "-7,12");
    CHECK(element_from_string(z2, "-7,12") == g);
    CHECK_THROWS(element_from_string(z2, "1,2,3"));
    CHECK_THROWS(element_from_string(z2, "1,x"));
}

TEST_CASE("make_element validates arity and cyclic range") {
    const GroupSpec z2 = GroupSpec::lattice(2);
    CHECK_THROWS_AS(make_element(z2, {1, 2, 3}), SpecError);
    const GroupSpec p = GroupSpec::product(GroupSpec::lattice(1), 4);
    CHECK(make_element(p, {0, 3})[1] == 3); // residues stored as given in [0, q)
    CHECK_THROWS_AS(make_element(p, {0, 7}), SpecError);
    CHECK_THROWS_AS(make_element(p, {0, -1}), SpecError);
}

TEST_CASE("nominal growth degree") {
    CHECK(nominal_growth_degree(GroupSpec::lattice(1)) == 1);
    CHECK(nominal_growth_degree(GroupSpec::lattice(5)) == 5);
    CHECK(nominal_growth_degree(GroupSpec::heisenberg()) == 4);
    CHECK(nominal_growth_degree(GroupSpec::product(GroupSpec::lattice(2), 64)) == 2);
}

TEST_CASE("checked arithmetic raises on overflow") {
    CHECK(checked_add(3, 4) == 7);
    CHECK(checked_mul(-3, 4) == -12);
    const std::int64_t big = INT64_MAX / 2 + 2;
    CHECK_THROWS_AS(checked_add(big, big), OverflowError);
    CHECK_THROWS_AS(checked_mul(big, 3), OverflowError);
}

TEST_CASE("element hash distinguishes coordinates in practice") {
    const GroupSpec z2 = GroupSpec::lattice(2);
    std::unordered_set<std::size_t> hashes;
    GroupElementHash h;
    int n = 0;
    for (int x = -6; x <= 6; ++x)
        for (int y = -6; y <= 6; ++y) {
            hashes.insert(h(make_element(z2, {x, y})));
            ++n;
        }
    CHECK(static_cast<int>(hashes.size()) == n);
}
