#include <doctest.h>

#include "trackcoh/beckmod.hpp"

using namespace tc;

namespace {

// the full one-object subcategory on the first object
TrackCat first_object(const TrackCat& q, TrackMap& incl)
{
    auto compose = [&](int, int, int, int code, int g, int f) { return q.compose(0, 0, 0, code, g, f); };
    auto w = make_track(q.n, {q.objects[0]}, {q.hom(0, 0)}, {q.unit[0]}, compose);
    incl.obj = {0};
    incl.hom = {identity_map(q.hom(0, 0))};
    return w;
}

}  // namespace

TEST_SUITE("beckmod")
{
    TEST_CASE("module axioms")
    {
        auto t1 = track_T1();
        CHECK(check_module_axioms(constant_module(t1, {2})).ok());
        CHECK(check_module_axioms(constant_module(t1, {2, 2})).ok());
        CHECK(check_module_axioms(zero_module(t1)).ok());
    }

    TEST_CASE("a corrupted addition is caught")
    {
        auto m = constant_module(track_T1(), {2});
        // swap two sums over one base point
        auto& add = m.carrier.add;
        std::vector<std::uint64_t> keys;
        for (auto& [k, v] : add)
            keys.push_back(k);
        std::sort(keys.begin(), keys.end());
        bool swapped = false;
        for (std::size_t i = 0; i + 1 < keys.size() && !swapped; ++i)
            if (add[keys[i]] != add[keys[i + 1]]) {
                std::swap(add[keys[i]], add[keys[i + 1]]);
                swapped = true;
            }
        REQUIRE(swapped);
        auto r = check_module_axioms(m);
        CHECK(!r.ok());
        CHECK(!r.first_failure().empty());
    }

    TEST_CASE("Eilenberg-Mac Lane objects")
    {
        auto t1 = track_T1();
        for (int n : {2, 3}) {
            auto e = build_EMn(constant_module(t1, {2}), n);
            auto r = verify_em(e);
            CHECK_MESSAGE(r.ok(), r.first_failure());
            CHECK(!em_corner_table(e));
            auto z = build_EMn(zero_module(t1), n);
            CHECK(verify_em(z).ok());
        }
    }

    TEST_CASE("a corrupted EM object fails the corner table")
    {
        auto e = build_EM2(constant_module(track_T1(), {2}));
        bool done = false;
        for (auto& hom : e.rho)
            for (auto& code : hom)
                if (!done && code.size() >= 2 && code[0] != code[1]) {
                    code[0] = code[1];
                    done = true;
                }
        REQUIRE(done);
        CHECK(!verify_em(e).ok());
    }

    TEST_CASE("pullback modules")
    {
        auto t1 = track_T1();
        auto m = constant_module(t1, {2});
        auto same = pullback_module(t1, identity_track_map(t1), m);
        CHECK(same.factors == m.factors);
        CHECK(check_module_axioms(same).ok());

        TrackMap incl;
        auto w = first_object(t1, incl);
        REQUIRE(!w.audit());
        auto restricted = pullback_module(w, incl, m);
        CHECK(check_module_axioms(restricted).ok());
        CHECK(!em_pullback_check(w, incl, m, 2));
    }

    TEST_CASE("restriction to the identity tracks")
    {
        auto d = track_discrete({"a", "b"});
        auto r = j_restriction(d, constant_module(d, {3}));
        CHECK(r.dz0.nobj() == 2);
        CHECK(check_module_axioms(r.module).ok());
    }
}
