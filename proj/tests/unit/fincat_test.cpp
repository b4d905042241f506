#include <doctest.h>

#include "trackcoh/fincat.hpp"

using namespace tc;

namespace {

FinGraph graph(std::vector<std::string> objs, std::vector<Edge> edges)
{
    FinGraph g;
    g.objects.labels = std::move(objs);
    g.edges = std::move(edges);
    return g;
}

// number of paths of length <= L in a graph, by dynamic programming over lengths
std::size_t path_oracle(const FinGraph& g, int L)
{
    std::size_t n = g.objects.size();
    std::vector<std::vector<std::size_t>> walks(n, std::vector<std::size_t>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
        walks[a][a] = 1;
    std::size_t total = n;
    for (int len = 1; len <= L; ++len) {
        std::vector<std::vector<std::size_t>> next(n, std::vector<std::size_t>(n, 0));
        for (std::size_t a = 0; a < n; ++a)
            for (auto& e : g.edges)
                next[a][e.tgt] += walks[a][e.src];
        walks = next;
        for (auto& row : walks)
            for (auto v : row)
                total += v;
    }
    return total;
}

}  // namespace

TEST_SUITE("fincat")
{
    TEST_CASE("iso classes")
    {
        CHECK(iso_classes(indiscrete_groupoid({"x", "y"}).cat).count == 1);
        CHECK(iso_classes(discrete_cat({"a", "b", "c"})).count == 3);
        EqRelGroupoid r;
        r.objects.labels = {"x", "y", "z"};
        r.relation = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}};
        REQUIRE(!r.audit());
        auto g = r.as_groupoid();
        auto cls = iso_classes(g.cat);
        CHECK(cls.count == 2);
        CHECK(cls.cls[0] == cls.cls[1]);
        CHECK(cls.cls[0] != cls.cls[2]);
        CHECK(cls.rep[cls.cls[1]] == 0);
    }

    TEST_CASE("free categories against path counting")
    {
        auto arrow = graph({"a", "b"}, {{"u", 0, 1}});
        auto loop = graph({"a"}, {{"e", 0, 0}});
        auto pair = graph({"a", "b"}, {{"u", 0, 1}, {"v", 0, 1}});
        auto fa = free_category(arrow, 3);
        CHECK(fa.cat.nmor() == 3);
        CHECK(!fa.truncated);
        auto fl = free_category(loop, 3);
        CHECK(fl.cat.nmor() == 4);
        CHECK(fl.truncated);
        auto fp = free_category(pair, 2);
        CHECK(fp.cat.nmor() == 4);
        CHECK(!fp.truncated);
        for (auto* g : {&arrow, &loop, &pair})
            for (int L = 1; L <= 4; ++L)
                CHECK(free_category(*g, L).cat.nmor() == path_oracle(*g, L));
        CHECK(!fa.cat.audit());
        CHECK(!fp.cat.audit());
    }

    TEST_CASE("underlying graph")
    {
        CHECK(underlying_graph(discrete_cat({"a", "b"})).edges.size() == 2);
        auto fa = free_category(graph({"a", "b"}, {{"u", 0, 1}}), 2);
        auto g = underlying_graph(fa.cat);
        CHECK(g.edges.size() == 3);
        CHECK(!g.audit());
    }

    TEST_CASE("pullbacks")
    {
        auto d = indiscrete_groupoid({"x", "y"}).cat;
        auto id = identity_functor(d);
        auto p = pullback_cat(d, d, d, id, id);
        CHECK(p.cat.nmor() == d.nmor());
        CHECK(p.cat.objects.size() == d.objects.size());

        auto a = discrete_cat({"a", "b"});
        auto b = indiscrete_groupoid({"x", "y"}).cat;
        auto one = terminal_cat();
        FunctorMap fa{std::vector<int>(a.objects.size(), 0), std::vector<int>(a.nmor(), one.ident[0])};
        FunctorMap fb{std::vector<int>(b.objects.size(), 0), std::vector<int>(b.nmor(), one.ident[0])};
        auto q = pullback_cat(a, b, one, fa, fb);
        auto prod = product_cat(a, b);
        CHECK(q.cat.nmor() == prod.nmor());
        CHECK(q.cat.objects.size() == prod.objects.size());
        CHECK(!q.cat.audit());
    }

    TEST_CASE("equivalences")
    {
        auto eq2 = indiscrete_groupoid({"x", "y"}).cat;
        CHECK(is_equivalence(eq2, eq2, identity_functor(eq2)));
        auto one = terminal_cat();
        FunctorMap to_point{{0, 0}, std::vector<int>(eq2.nmor(), one.ident[0])};
        CHECK(!audit_functor(eq2, one, to_point));
        CHECK(is_equivalence(eq2, one, to_point));
        auto ab = discrete_cat({"a", "b"});
        auto a = discrete_cat({"a"});
        FunctorMap collapse{{0, 0}, {a.ident[0], a.ident[0]}};
        CHECK(!is_equivalence(ab, a, collapse));
    }

    TEST_CASE("empty category")
    {
        auto e = discrete_cat({});
        CHECK(!e.audit());
        CHECK(iso_classes(e).count == 0);
    }

    TEST_CASE("freeness")
    {
        CHECK(is_free_category(free_category(graph({"a", "b"}, {{"u", 0, 1}, {"v", 0, 1}}), 2).cat));
        CHECK(!is_free_category(indiscrete_groupoid({"x", "y"}).cat));
    }
}
