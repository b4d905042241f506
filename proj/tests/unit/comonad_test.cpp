#include <doctest.h>

#include "trackcoh/comonad.hpp"

using namespace tc;

namespace {

FinCat free_on(std::vector<std::string> objs, std::vector<Edge> edges, int bound)
{
    FinGraph g;
    g.objects.labels = std::move(objs);
    g.edges = std::move(edges);
    return free_category(g, bound).cat;
}

}  // namespace

TEST_SUITE("comonad")
{
    TEST_CASE("fattening a point and a discrete set")
    {
        auto point = discrete_nfold({"p"}, 0);
        auto x = ell(point);
        CHECK(x.n == 1);
        CHECK(x.count(0) == 2);
        CHECK(x.count(1) == 4);
        CHECK(truncate_p(x).p.count(0) == 1);
        CHECK(arrow_part(x).count(0) == 4);

        auto d = ell(discrete_nfold({"p", "q", "r"}, 0));
        CHECK(d.count(0) == 6);
        CHECK(d.count(1) == 12);
        CHECK(iso_classes(d.dir_category(0, 0)).count == 3);
    }

    TEST_CASE("the fattening adjunction")
    {
        auto eq2 = nfold_from_groupoid(indiscrete_groupoid({"x", "y"}));
        CHECK(!audit_ell_adjunction(eq2, ell(eq2)));
        auto p = truncate_p(ell(eq2)).p;
        CHECK(p.count(0) == eq2.count(0));
        CHECK(p.count(1) == eq2.count(1));
        CHECK(!audit_map(eq2, arrow_part(ell(eq2)), ell_unit(eq2)));
    }

    TEST_CASE("kernel pair of a split pair")
    {
        SplitPair y;
        y.z0 = {"a", "b", "c"};
        y.pi0 = {"0", "1"};
        y.q = {0, 0, 1};
        y.t = {0, 2};
        REQUIRE(!y.audit());
        auto g = fattening(y);
        CHECK(!g.audit());
        CHECK(g.cat.nmor() == 5);   // 2 x 2 + 1 x 1
        CHECK(iso_classes(g.cat).count == 2);
    }

    TEST_CASE("L_n of plain categories is homotopically discrete over A")
    {
        std::vector<FinCat> cats = {free_on({"a", "b"}, {{"u", 0, 1}}, 1),
                                    free_on({"a", "b"}, {{"u", 0, 1}, {"v", 0, 1}}, 1),
                                    free_on({"a", "b", "c"}, {{"f", 0, 1}, {"g", 1, 2}}, 2),
                                    discrete_cat({"a", "b", "c"})};
        for (auto& a : cats)
            for (int n = 1; n <= 2; ++n) {
                auto l = ell_category(a, n);
                CHECK(!l.track.audit());
                CHECK(!audit_ell_category(l, a));
            }
    }

    TEST_CASE("an invertible arrow has an infinite free square")
    {
        CHECK_THROWS_AS(free_square(indiscrete_groupoid({"x", "y"}).cat), std::length_error);
    }

    TEST_CASE("the resolution tower of T1")
    {
        Tower t(track_T1(), 2);
        auto laws = comonad_laws(t, true);
        CHECK(laws.ok);
        CHECK(laws.checked > 0);
        auto simp = simplicial_identities(t, 2);
        CHECK(simp.ok);
        for (int m = 1; m <= 3; ++m) {
            auto f = freeness_audit(t, m);
            CHECK_MESSAGE(f.ok, f.witness);
        }
        std::string why;
        CHECK_MESSAGE(aspherical_spot_check(spot_data(t, 0, 1, 2), &why), why);
    }

    TEST_CASE("discrete tracks")
    {
        Tower t(track_discrete({"a", "b"}), 1);
        t.enumerate(3);
        for (int m = 1; m <= 3; ++m) {
            CHECK(t.count(m) == path_count_oracle(t, m));
            CHECK(freeness_audit(t, m).ok);
        }
        CHECK(simplicial_identities(t, 2).ok);
        CHECK(aspherical_spot_check(spot_data(t, 0, 0, 2)));
    }

    TEST_CASE("composites outside the bound overflow")
    {
        auto chain = free_on({"a", "b", "c"}, {{"f", 0, 1}, {"g", 1, 2}}, 2);
        auto x = track_from_category(chain);
        CHECK_THROWS_AS(check_composition_closure(x, 1), TruncationOverflow);
        CHECK_NOTHROW(check_composition_closure(x, 2));
        CHECK_NOTHROW(check_composition_closure(track_T1(), 1));
    }

    TEST_CASE("K of a fixture without composable cells is finite")
    {
        auto k = materialize_K(track_T1(), 2);
        CHECK(k.homs.size() == 4);
        for (auto& h : k.homs)
            CHECK(!h.audit());
    }
}
