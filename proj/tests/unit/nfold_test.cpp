#include <doctest.h>

#include "trackcoh/comonad.hpp"
#include "trackcoh/nfold.hpp"

using namespace tc;

namespace {

FinCat arrow_cat()
{
    FinGraph g;
    g.objects.labels = {"a", "b"};
    g.edges = {{"u", 0, 1}};
    return free_category(g, 1).cat;
}

FinGroupoid cyclic2()
{
    FinGroupoid g;
    g.cat.objects.labels = {"*"};
    g.cat.add_morphism("1", 0, 0);
    g.cat.add_morphism("g", 0, 0);
    g.cat.ident = {0};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            g.cat.set_comp(i, k, (i + k) % 2);
    g.inv = {0, 1};
    return g;
}

}  // namespace

TEST_SUITE("nfold")
{
    TEST_CASE("constructions pass the structure audit")
    {
        auto x = nfold_from_category(arrow_cat());
        auto e = nfold_from_groupoid(indiscrete_groupoid({"s", "t"}));
        CHECK(!x.audit());
        CHECK(!e.audit());
        CHECK(e.count(0) == 2);
        CHECK(e.count(1) == 4);
        CHECK(e.count(2) == 8);
        auto p = external_product(x, e);
        CHECK(!p.audit());
        CHECK(!discrete_nfold({"p", "q"}, 2).audit());
        CHECK(!empty_nfold(2).audit());
    }

    TEST_CASE("rotation")
    {
        auto x = nfold_from_category(arrow_cat());
        auto e = nfold_from_groupoid(indiscrete_groupoid({"s", "t"}));
        auto d = external_product(x, e);
        CHECK(rotate(d, 1) == d);
        auto r = rotate(d, 2);
        CHECK(!r.audit());
        for (int k1 = 0; k1 < 3; ++k1)
            for (int k2 = 0; k2 < 3; ++k2)
                CHECK(r.count(code_from_digits({k1, k2})) == d.count(code_from_digits({k2, k1})));
    }

    TEST_CASE("truncation and discreteness")
    {
        auto eq2 = nfold_from_groupoid(indiscrete_groupoid({"x", "y"}));
        auto t = truncate_p(eq2);
        CHECK(t.p.n == 0);
        CHECK(t.p.count(0) == 1);

        auto disc = discrete_nfold({"a", "b", "c"}, 2);
        CHECK(is_homotopically_discrete(disc).ok);
        CHECK(is_homotopically_discrete(eq2).ok);
        auto z2 = nfold_from_groupoid(cyclic2());
        auto refusal = is_homotopically_discrete(z2);
        CHECK(!refusal.ok);
        CHECK(!refusal.witness.empty());

        auto d = discretization(eq2);
        REQUIRE(d);
        CHECK(d->labels.size() == 1);
        auto dd = discretization(disc);
        REQUIRE(dd);
        CHECK(dd->labels.size() == 3);
        for (auto& m : dd->gamma.m)
            for (std::size_t i = 0; i < m.size(); ++i)
                CHECK(m[i] == int(i));
    }

    TEST_CASE("fattening of a three element set")
    {
        auto x = ell(discrete_nfold({"p", "q", "r"}, 1));
        auto d = discretization(x);
        REQUIRE(d);
        CHECK(d->labels.size() == 3);
        std::string why;
        CHECK(is_n_equivalence(x, discrete_nfold(d->labels, 2), d->gamma, &why));
    }

    TEST_CASE("hom fibers")
    {
        auto x = nfold_from_category(arrow_cat());
        auto e = nfold_from_groupoid(indiscrete_groupoid({"s", "t"}));
        auto l = external_product(x, e);
        auto f = hom_fiber(l, "(a,s)", "(b,s)");
        CHECK(f.fiber.n == 1);
        CHECK(f.fiber.count(0) >= 1);
        auto same = hom_fiber(l, "(a,s)", "(a,s)");
        CHECK(same.fiber.count(0) >= 1);
        auto back = hom_fiber(l, "(b,s)", "(a,s)");
        CHECK(back.fiber.count(0) == 0);
    }

    TEST_CASE("equivalences and weak globularity")
    {
        auto eq2 = nfold_from_groupoid(indiscrete_groupoid({"x", "y"}));
        CHECK(is_n_equivalence(eq2, eq2, identity_map(eq2)));
        auto d = discretization(eq2);
        REQUIRE(d);
        CHECK(is_n_equivalence(eq2, discrete_nfold(d->labels, 1), d->gamma));

        CHECK(is_weakly_globular(eq2).ok);
        auto z2 = nfold_from_groupoid(cyclic2());
        CHECK(is_weakly_globular(z2).ok);   // every groupoid is weakly globular at n = 1
        auto bad = is_weakly_globular(external_product(discrete_nfold({"p"}, 1), z2));
        CHECK(!bad.ok);
        CHECK(!bad.witness.empty());
        auto fat = ell(eq2);
        CHECK(is_weakly_globular(fat).ok);
        CHECK(segal_check(fat));
        CHECK(segal_check(discrete_nfold({"a"}, 2)));
        // iso classes of the fattening recover eq2 up to relabeling
        auto p = truncate_p(fat).p;
        CHECK(p.n == eq2.n);
        CHECK(p.count(0) == eq2.count(0));
        CHECK(p.count(1) == eq2.count(1));
        CHECK(is_weakly_globular(p).ok);
    }

    TEST_CASE("pullback transfer along the identity")
    {
        auto e = nfold_from_groupoid(indiscrete_groupoid({"s", "t"}));
        auto x = ell(e);
        auto z = truncate_p(x).p;
        auto tr = pullback_transfer(z, identity_map(z), x);
        CHECK(tr.weakly_globular);
        CHECK(tr.equivalence);
        CHECK(serialize_key(tr.p) == serialize_key(x));
    }
}
