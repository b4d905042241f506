#include <random>

#include <doctest.h>

#include "trackcoh/cohomology.hpp"

using namespace tc;

namespace {

FinCochainComplex times_two()
{
    // 0 -> Z -(x2)-> Z -> 0, padded with a zero level on top
    FinCochainComplex c;
    c.dims = {1, 1, 0};
    SparseMatrix d0;
    d0.rows = 1;
    d0.cols = 1;
    d0.row = {{{0, 2}}};
    SparseMatrix d1;
    d1.rows = 0;
    d1.cols = 1;
    c.d = {d0, d1};
    return c;
}

std::vector<long long> act(const SparseMatrix& m, const std::vector<long long>& x)
{
    std::vector<long long> y(std::size_t(m.rows), 0);
    for (int i = 0; i < m.rows; ++i)
        for (auto& [j, v] : m.row[i])
            y[i] += v * x[j];
    return y;
}

}  // namespace

TEST_SUITE("cohomology")
{
    TEST_CASE("hand complexes")
    {
        auto c = times_two();
        CHECK(!audit_dd(c));
        auto h = cohomology_all(c, {0}, 1);
        CHECK(h[0].is_zero());
        CHECK(h[1].str() == "Z/2");
        // with Z/2 coefficients both degrees are Z/2
        auto h2 = cohomology_all(c, {2}, 1);
        CHECK(h2[0].str() == "Z/2");
        CHECK(h2[1].str() == "Z/2");
        // Z/3 kills both
        auto h3 = cohomology_all(c, {3}, 1);
        CHECK(h3[0].is_zero());
        CHECK(h3[1].is_zero());
        CHECK_THROWS_AS(cohomology_of(c, {0}, 2), DegreeGuard);

        FinCochainComplex zero;
        zero.dims = {0, 0, 0};
        zero.d.resize(2);
        zero.d[0].rows = zero.d[1].rows = 0;
        for (auto& g : cohomology_all(zero, {0}, 1))
            CHECK(g.is_zero());
    }

    TEST_CASE("T1 complexes and the degree-zero oracle")
    {
        for (auto kind : {CochainKind::AQ, CochainKind::Alg, CochainKind::Left, CochainKind::Mid}) {
            Tower t(track_T1(), 1);
            CochainModel cm(t, kind, 3);
            auto c = normalize(cm);
            CHECK(!audit_dd(c));
            CHECK(degenerate_rows_vanish(cm).ok);
            CHECK(cosimplicial_identities(cm).ok);
            for (std::vector<long> f : {std::vector<long>{2}, std::vector<long>{0}, std::vector<long>{}})
                CHECK(cohomology_of(c, f, 0) == H0_oracle(cm, f));
            auto sym = symbolic_complex(cm, 2);
            CHECK(!audit_dd(sym));
            CHECK(cohomology_all(sym, {2}, 1) == cohomology_all(c, {2}, 1));
        }
    }

    TEST_CASE("discrete tracks")
    {
        Tower t(track_discrete({"a", "b"}), 1);
        CochainModel cm(t, CochainKind::AQ, 3);
        auto c = normalize(cm);
        CHECK(!audit_dd(c));
        // free on no generators: no derivations and nothing above degree 0
        auto h = cohomology_all(c, {0}, 2);
        for (auto& g : h)
            CHECK(g.is_zero());
        CHECK(h[0] == H0_oracle(cm, {0}));
    }

    TEST_CASE("reduction is a chain map both ways")
    {
        Tower t(track_T1(), 1);
        CochainModel cm(t, CochainKind::Mid, 3);
        auto c = normalize(cm);
        std::mt19937 rng(3);
        std::uniform_int_distribution<int> coef(-3, 3);
        for (long p : {0L, 2L}) {
            ReducedComplex r(c, p, true);
            for (int s = 0; s + 1 < c.top(); ++s) {
                std::vector<long long> x(std::size_t(c.dims[s]));
                for (auto& v : x)
                    v = coef(rng);
                auto lhs = r.reduce(s + 1, act(c.d[s], x));
                auto rhs = act(r.rem[s], r.reduce(s, x));
                for (std::size_t i = 0; i < lhs.size(); ++i)
                    CHECK((p ? ((lhs[i] - rhs[i]) % p) : lhs[i] - rhs[i]) == 0);
                std::vector<long long> y(r.alive[s].size());
                for (auto& v : y)
                    v = coef(rng);
                auto up = act(c.d[s], r.expand(s, y));
                auto down = r.expand(s + 1, act(r.rem[s], y));
                for (std::size_t i = 0; i < up.size(); ++i)
                    CHECK((p ? ((up[i] - down[i]) % p) : up[i] - down[i]) == 0);
            }
        }
    }

    TEST_CASE("prime and integer routes agree")
    {
        Tower t(track_FAT2(), 1);
        CochainModel cm(t, CochainKind::Alg, 3);
        auto c = normalize(cm);
        CHECK(cohomology_all(c, {2}, 2, Method::Prime) == cohomology_all(c, {2}, 2, Method::Integer));
    }

    TEST_CASE("levelwise short exact sequences")
    {
        for (int s = 0; s <= 1; ++s) {
            Tower t(track_T1(), 1);
            auto r = ses_levelwise(t, 2, s);
            CHECK_MESSAGE(r.audits.ok(), r.audits.first_failure());
            CHECK(r.dim_mid == 2 * r.dim_left);
        }
    }

    TEST_CASE("long exact sequence and its fault hooks")
    {
        Tower t(track_T1(), 1);
        auto r = les(t, 2, 3);
        CHECK(r.ok());
        CHECK(r.slots.size() == 9);
        CHECK(r.left[0].str() == "Z/2");
        CHECK(r.mid[0].str() == "Z/2 ⊕ Z/2");
        Tower t2(track_T1(), 1);
        auto bad = les(t2, 2, 3, LesFault::ZeroProjection);
        CHECK(!bad.ok());
        Tower t3(track_T1(), 1);
        CHECK_THROWS_AS(les(t3, 6, 3), std::invalid_argument);
    }

    TEST_CASE("free replacement and the corollary")
    {
        auto t1 = track_T1();
        auto sx = build_SX(t1);
        CHECK(sx.base_free);
        CHECK_MESSAGE(sx.v_equivalence, sx.why);
        auto c = corollary_iso(t1, {2}, 2, 1);
        CHECK(c.equal);
        CHECK(c.middle_vanishes);
        CHECK(c.audits.ok());
        auto relabeled = corollary_iso(relabel_objects(t1, {"q", "p"}), {2}, 2, 1);
        CHECK(relabeled.aq == c.aq);
        CHECK(relabeled.alg == c.alg);
        auto zero = corollary_iso(t1, {}, 2, 1);
        CHECK(zero.aq.is_zero());
        CHECK(zero.alg.is_zero());
    }

    TEST_CASE("constant coefficients from modules")
    {
        auto t1 = track_T1();
        CHECK(constant_factors(constant_module(t1, {2})) == std::vector<long>{2});
        CHECK(constant_factors(zero_module(t1)).empty());
    }
}
