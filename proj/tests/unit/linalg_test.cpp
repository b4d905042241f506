#include <random>

#include <doctest.h>

#include "trackcoh/cohomology.hpp"

using namespace tc;

namespace {

IntMatrix mat(std::initializer_list<std::initializer_list<int>> rows)
{
    IntMatrix m;
    for (auto& r : rows) {
        m.emplace_back();
        for (int v : r)
            m.back().push_back(v);
    }
    return m;
}

}  // namespace

TEST_SUITE("linalg")
{
    TEST_CASE("hand examples")
    {
        auto s = smith_normal_form(mat({{2, 0}, {0, 3}}));
        REQUIRE(s.diagonal.size() == 2);
        CHECK(s.diagonal[0] == 1);
        CHECK(s.diagonal[1] == 6);
        CHECK(!audit_smith(mat({{2, 0}, {0, 3}}), s));

        auto z = smith_normal_form(zero_matrix(3, 2));
        CHECK(z.rank == 0);
        CHECK(z.d == zero_matrix(3, 2));

        auto t = smith_normal_form(mat({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}}));
        CHECK(t.diagonal == std::vector<BigInt>{2, 6, 12});
    }

    TEST_CASE("random matrices against the minor oracle")
    {
        std::mt19937 rng(7);
        std::uniform_int_distribution<int> entry(-9, 9);
        for (int trial = 0; trial < 40; ++trial) {
            IntMatrix a = zero_matrix(5, 5);
            for (auto& r : a)
                for (auto& v : r)
                    v = entry(rng);
            auto s = smith_normal_form(a);
            CHECK(!audit_smith(a, s));
            CHECK(s.diagonal == minor_gcd_factors(a));
            CHECK(abs(determinant(s.u)) == 1);
            CHECK(abs(determinant(s.v)) == 1);
        }
    }

    TEST_CASE("determinant")
    {
        CHECK(determinant(mat({{1, 2}, {3, 4}})) == -2);
        CHECK(determinant(mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 5}})) == -5);
        CHECK(determinant(identity_matrix(4)) == 1);
    }

    TEST_CASE("solving and kernels")
    {
        auto m = mat({{2, 0}, {0, 3}, {0, 0}});
        auto z = solve_integer(m, {4, 9, 0});
        REQUIRE(z);
        CHECK((*z)[0] == 2);
        CHECK((*z)[1] == 3);
        CHECK(!solve_integer(m, {1, 0, 0}));
        CHECK(!solve_integer(m, {0, 0, 1}));
        SpanSolver span(m, 3);
        CHECK(span.contains({2, -3, 0}));
        CHECK(!span.contains({3, 0, 0}));

        auto k = integer_kernel(mat({{1, 1, 1}}), 3);
        CHECK(k.size() == 2);
        for (auto& v : k)
            CHECK(v[0] + v[1] + v[2] == 0);
    }

    TEST_CASE("presentations")
    {
        CHECK(AbGroupPresentation::from_cyclic({2, 3}).str() == "Z/6");
        CHECK(AbGroupPresentation::from_cyclic({0, 0, 2, 1}).str() == "Z^2 ⊕ Z/2");
        CHECK(AbGroupPresentation::from_cyclic({0}).str() == "Z");
        CHECK(AbGroupPresentation::from_cyclic({2, 4}).str() == "Z/2 ⊕ Z/4");
        CHECK(AbGroupPresentation::from_cyclic({1}).is_zero());
        CHECK(AbGroupPresentation{}.str() == "0");
        auto sum = direct_sum(AbGroupPresentation::from_cyclic({2}), AbGroupPresentation::from_cyclic({3}));
        CHECK(sum == AbGroupPresentation::from_cyclic({6}));
    }
}
