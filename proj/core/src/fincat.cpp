#include "trackcoh/fincat.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tc {

int ObjSet::index(const std::string& s) const
{
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == s)
            return int(i);
    return -1;
}

std::optional<std::string> FinGraph::audit() const
{
    std::set<std::string> seen;
    for (auto& e : edges) {
        if (e.src < 0 || e.tgt < 0 || e.src >= int(objects.size()) || e.tgt >= int(objects.size()))
            return "edge " + e.id + " has an endpoint outside the object set";
        if (!seen.insert(e.id).second)
            return "duplicate edge id " + e.id;
    }
    std::set<std::string> ol(objects.labels.begin(), objects.labels.end());
    if (ol.size() != objects.size())
        return "duplicate object label";
    return std::nullopt;
}

int FinCat::add_morphism(std::string name, int s, int t)
{
    names.push_back(std::move(name));
    src.push_back(s);
    tgt.push_back(t);
    return int(names.size()) - 1;
}

int FinCat::compose(int g, int f) const
{
    if (tgt[f] != src[g])
        return -1;
    auto it = comp.find(pair_key(g, f));
    return it == comp.end() ? -1 : it->second;
}

int FinCat::find(const std::string& name) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return int(i);
    return -1;
}

std::optional<std::string> FinCat::audit() const
{
    int n = int(objects.size()), m = int(nmor());
    if (int(ident.size()) != n)
        return std::string("identity assignment has wrong length");
    for (int f = 0; f < m; ++f)
        if (src[f] < 0 || src[f] >= n || tgt[f] < 0 || tgt[f] >= n)
            return "morphism " + names[f] + " has an endpoint outside the object set";
    for (int a = 0; a < n; ++a) {
        int i = ident[a];
        if (i < 0 || i >= m || src[i] != a || tgt[i] != a)
            return "identity of " + objects.labels[a] + " is not an endomorphism of it";
    }
    for (auto& [k, v] : comp) {
        int g = int(k >> 32), f = int(k & 0xffffffffu);
        if (g >= m || f >= m || v < 0 || v >= m)
            return std::string("composition table mentions an unknown morphism");
        if (tgt[f] != src[g])
            return "composite listed for non-composable pair (" + names[g] + ", " + names[f] + ")";
        if (src[v] != src[f] || tgt[v] != tgt[g])
            return "composite of (" + names[g] + ", " + names[f] + ") has wrong endpoints";
    }
    std::vector<std::vector<int>> out(n);
    for (int f = 0; f < m; ++f)
        out[src[f]].push_back(f);
    for (int f = 0; f < m; ++f)
        for (int g : out[tgt[f]])
            if (compose(g, f) < 0)
                return "composite of (" + names[g] + ", " + names[f] + ") is missing";
    for (int f = 0; f < m; ++f) {
        if (compose(f, ident[src[f]]) != f || compose(ident[tgt[f]], f) != f)
            return "unit law fails at " + names[f];
    }
    for (int f = 0; f < m; ++f)
        for (int g : out[tgt[f]])
            for (int h : out[tgt[g]])
                if (compose(h, compose(g, f)) != compose(compose(h, g), f))
                    return "associativity fails at (" + names[h] + ", " + names[g] + ", " + names[f] + ")";
    return std::nullopt;
}

std::optional<std::string> FinGroupoid::audit() const
{
    if (auto e = cat.audit())
        return e;
    if (inv.size() != cat.nmor())
        return std::string("inverse assignment has wrong length");
    for (std::size_t f = 0; f < cat.nmor(); ++f) {
        int g = inv[f];
        if (g < 0 || g >= int(cat.nmor()))
            return "inverse of " + cat.names[f] + " is unknown";
        if (cat.compose(int(f), g) != cat.ident[cat.tgt[f]] || cat.compose(g, int(f)) != cat.ident[cat.src[f]])
            return "inverse law fails at " + cat.names[f];
    }
    return std::nullopt;
}

std::optional<std::string> EqRelGroupoid::audit() const
{
    int n = int(objects.size());
    std::set<std::pair<int, int>> r(relation.begin(), relation.end());
    if (r.size() != relation.size())
        return std::string("relation lists a pair twice");
    for (auto [a, b] : r)
        if (a < 0 || b < 0 || a >= n || b >= n)
            return std::string("relation mentions an unknown object");
    for (int a = 0; a < n; ++a)
        if (!r.count({a, a}))
            return "not reflexive at " + objects.labels[a];
    for (auto [a, b] : r)
        if (!r.count({b, a}))
            return "not symmetric at (" + objects.labels[a] + ", " + objects.labels[b] + ")";
    for (auto [a, b] : r)
        for (int c = 0; c < n; ++c)
            if (r.count({b, c}) && !r.count({a, c}))
                return "not transitive at (" + objects.labels[a] + ", " + objects.labels[b] + ", " +
                       objects.labels[c] + ")";
    return std::nullopt;
}

FinGroupoid EqRelGroupoid::as_groupoid() const
{
    FinGroupoid g;
    g.cat.objects = objects;
    int n = int(objects.size());
    std::map<std::pair<int, int>, int> id;
    auto rel = relation;
    std::sort(rel.begin(), rel.end());
    for (auto [a, b] : rel)
        id[{a, b}] = g.cat.add_morphism(objects.labels[a] + ">" + objects.labels[b], a, b);
    g.cat.ident.resize(n);
    for (int a = 0; a < n; ++a)
        g.cat.ident[a] = id.at({a, a});
    for (auto [ab, f] : id)
        for (auto [bc, h] : id)
            if (ab.second == bc.first)
                g.cat.set_comp(h, f, id.at({ab.first, bc.second}));
    g.inv.resize(g.cat.nmor());
    for (auto [ab, f] : id)
        g.inv[f] = id.at({ab.second, ab.first});
    return g;
}

std::optional<std::string> audit_functor(const FinCat& a, const FinCat& b, const FunctorMap& f)
{
    if (f.obj.size() != a.objects.size() || f.mor.size() != a.nmor())
        return std::string("functor tables have wrong length");
    for (int x : f.obj)
        if (x < 0 || x >= int(b.objects.size()))
            return std::string("object image out of range");
    for (std::size_t m = 0; m < a.nmor(); ++m) {
        int y = f.mor[m];
        if (y < 0 || y >= int(b.nmor()))
            return std::string("morphism image out of range");
        if (b.src[y] != f.obj[a.src[m]] || b.tgt[y] != f.obj[a.tgt[m]])
            return "functor does not preserve endpoints of " + a.names[m];
    }
    for (std::size_t x = 0; x < a.objects.size(); ++x)
        if (f.mor[a.ident[x]] != b.ident[f.obj[x]])
            return "functor does not preserve the identity of " + a.objects.labels[x];
    for (auto& [k, v] : a.comp) {
        int g = int(k >> 32), h = int(k & 0xffffffffu);
        if (b.compose(f.mor[g], f.mor[h]) != f.mor[v])
            return "functor does not preserve the composite " + a.names[v];
    }
    return std::nullopt;
}

int find_inverse(const FinCat& c, int f)
{
    for (std::size_t g = 0; g < c.nmor(); ++g)
        if (c.src[g] == c.tgt[f] && c.tgt[g] == c.src[f] && c.compose(int(g), f) == c.ident[c.src[f]] &&
            c.compose(f, int(g)) == c.ident[c.tgt[f]])
            return int(g);
    return -1;
}

namespace {
struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x)
    {
        while (p[x] != x) {
            p[x] = p[p[x]];
            x = p[x];
        }
        return x;
    }
    // the smaller index wins so representatives follow canonical order
    void unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        p[b] = a;
    }
};
}  // namespace

IsoClasses iso_classes(const FinCat& c)
{
    int n = int(c.objects.size());
    UnionFind uf(n);
    for (std::size_t f = 0; f < c.nmor(); ++f)
        if (c.src[f] != c.tgt[f] && find_inverse(c, int(f)) >= 0)
            uf.unite(c.src[f], c.tgt[f]);
    IsoClasses r;
    r.cls.assign(n, -1);
    std::vector<int> root2cls(n, -1);
    for (int a = 0; a < n; ++a) {
        int root = uf.find(a);
        if (root2cls[root] < 0) {
            root2cls[root] = r.count++;
            r.rep.push_back(a);
        }
        r.cls[a] = root2cls[root];
    }
    return r;
}

FreeCat free_category(const FinGraph& g, int bound)
{
    if (bound < 1)
        throw std::invalid_argument("free_category: bound must be positive");
    FreeCat fc;
    fc.base = g;
    fc.bound = bound;
    FinCat& c = fc.cat;
    c.objects = g.objects;
    int n = int(g.objects.size());
    std::map<std::vector<int>, int> index;
    c.ident.resize(n);
    for (int a = 0; a < n; ++a) {
        c.ident[a] = c.add_morphism("id_" + g.objects.labels[a], a, a);
        fc.paths.push_back({});
    }
    std::vector<std::vector<int>> out(n);
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        out[g.edges[e].src].push_back(int(e));
    // breadth first by length keeps the canonical order: shorter paths first
    std::vector<std::vector<int>> frontier;
    for (std::size_t e = 0; e < g.edges.size(); ++e)
        frontier.push_back({int(e)});
    for (int len = 1; len <= bound && !frontier.empty(); ++len) {
        std::vector<std::vector<int>> next;
        for (auto& p : frontier) {
            std::string name;
            for (std::size_t i = p.size(); i-- > 0;)
                name += (name.empty() ? "" : ".") + g.edges[p[i]].id;
            int id = c.add_morphism(name, g.edges[p.front()].src, g.edges[p.back()].tgt);
            index[p] = id;
            fc.paths.push_back(p);
            for (int e : out[g.edges[p.back()].tgt]) {
                auto q = p;
                q.push_back(e);
                if (len < bound)
                    next.push_back(std::move(q));
                else
                    fc.truncated = true;
            }
        }
        frontier = std::move(next);
    }
    for (std::size_t f = 0; f < c.nmor(); ++f) {
        c.set_comp(int(f), c.ident[c.src[f]], int(f));
        c.set_comp(c.ident[c.tgt[f]], int(f), int(f));
    }
    for (std::size_t f = 0; f < c.nmor(); ++f) {
        if (fc.paths[f].empty())
            continue;
        for (std::size_t h = 0; h < c.nmor(); ++h) {
            if (fc.paths[h].empty() || c.src[h] != c.tgt[f])
                continue;
            auto q = fc.paths[f];
            q.insert(q.end(), fc.paths[h].begin(), fc.paths[h].end());
            auto it = index.find(q);
            if (it != index.end())
                c.set_comp(int(h), int(f), it->second);
        }
    }
    return fc;
}

FinGraph underlying_graph(const FinCat& c)
{
    FinGraph g;
    g.objects = c.objects;
    for (std::size_t f = 0; f < c.nmor(); ++f)
        g.edges.push_back({c.names[f], c.src[f], c.tgt[f]});
    return g;
}

PullbackCat pullback_cat(const FinCat& a, const FinCat& b, const FinCat& d, const FunctorMap& f,
                         const FunctorMap& g)
{
    if (auto e = audit_functor(a, d, f))
        throw std::invalid_argument("pullback_cat: first leg: " + *e);
    if (auto e = audit_functor(b, d, g))
        throw std::invalid_argument("pullback_cat: second leg: " + *e);
    PullbackCat r;
    std::map<std::pair<int, int>, int> oid, mid;
    for (std::size_t x = 0; x < a.objects.size(); ++x)
        for (std::size_t y = 0; y < b.objects.size(); ++y)
            if (f.obj[x] == g.obj[y]) {
                oid[{int(x), int(y)}] = int(r.cat.objects.size());
                r.cat.objects.labels.push_back("(" + a.objects.labels[x] + "," + b.objects.labels[y] + ")");
                r.pa.obj.push_back(int(x));
                r.pb.obj.push_back(int(y));
            }
    for (std::size_t x = 0; x < a.nmor(); ++x)
        for (std::size_t y = 0; y < b.nmor(); ++y)
            if (f.mor[x] == g.mor[y]) {
                int s = oid.at({a.src[x], b.src[y]}), t = oid.at({a.tgt[x], b.tgt[y]});
                mid[{int(x), int(y)}] = r.cat.add_morphism("(" + a.names[x] + "," + b.names[y] + ")", s, t);
                r.pa.mor.push_back(int(x));
                r.pb.mor.push_back(int(y));
            }
    r.cat.ident.resize(r.cat.objects.size());
    for (auto [xy, o] : oid)
        r.cat.ident[o] = mid.at({a.ident[xy.first], b.ident[xy.second]});
    for (auto [p1, m1] : mid)
        for (auto [p2, m2] : mid) {
            int ca = a.compose(p2.first, p1.first), cb = b.compose(p2.second, p1.second);
            if (ca >= 0 && cb >= 0)
                r.cat.set_comp(m2, m1, mid.at({ca, cb}));
        }
    return r;
}

bool is_full(const FinCat& a, const FinCat& b, const FunctorMap& f)
{
    for (std::size_t x = 0; x < a.objects.size(); ++x)
        for (std::size_t y = 0; y < a.objects.size(); ++y) {
            std::set<int> img;
            for (std::size_t m = 0; m < a.nmor(); ++m)
                if (a.src[m] == int(x) && a.tgt[m] == int(y))
                    img.insert(f.mor[m]);
            for (std::size_t m = 0; m < b.nmor(); ++m)
                if (b.src[m] == f.obj[x] && b.tgt[m] == f.obj[y] && !img.count(int(m)))
                    return false;
        }
    return true;
}

bool is_faithful(const FinCat& a, const FinCat&, const FunctorMap& f)
{
    std::set<std::tuple<int, int, int>> seen;
    for (std::size_t m = 0; m < a.nmor(); ++m)
        if (!seen.insert({a.src[m], a.tgt[m], f.mor[m]}).second)
            return false;
    return true;
}

bool is_essentially_surjective(const FinCat& a, const FinCat& b, const FunctorMap& f)
{
    auto ic = iso_classes(b);
    std::set<int> hit;
    for (std::size_t x = 0; x < a.objects.size(); ++x)
        hit.insert(ic.cls[f.obj[x]]);
    return int(hit.size()) == ic.count;
}

bool is_equivalence(const FinCat& a, const FinCat& b, const FunctorMap& f)
{
    return is_full(a, b, f) && is_faithful(a, b, f) && is_essentially_surjective(a, b, f);
}

FinCat discrete_cat(const std::vector<std::string>& objs)
{
    FinCat c;
    c.objects.labels = objs;
    for (std::size_t a = 0; a < objs.size(); ++a) {
        c.ident.push_back(c.add_morphism("id_" + objs[a], int(a), int(a)));
        c.set_comp(int(a), int(a), int(a));
    }
    return c;
}

FinGroupoid indiscrete_groupoid(const std::vector<std::string>& objs)
{
    EqRelGroupoid e;
    e.objects.labels = objs;
    for (std::size_t a = 0; a < objs.size(); ++a)
        for (std::size_t b = 0; b < objs.size(); ++b)
            e.relation.push_back({int(a), int(b)});
    return e.as_groupoid();
}

FinCat terminal_cat() { return discrete_cat({"*"}); }

FunctorMap identity_functor(const FinCat& c)
{
    FunctorMap f;
    f.obj.resize(c.objects.size());
    f.mor.resize(c.nmor());
    std::iota(f.obj.begin(), f.obj.end(), 0);
    std::iota(f.mor.begin(), f.mor.end(), 0);
    return f;
}

FunctorMap compose_functors(const FunctorMap& g, const FunctorMap& f)
{
    FunctorMap r;
    for (int x : f.obj)
        r.obj.push_back(g.obj[x]);
    for (int m : f.mor)
        r.mor.push_back(g.mor[m]);
    return r;
}

FinCat product_cat(const FinCat& a, const FinCat& b)
{
    FinCat c;
    int nb = int(b.objects.size()), mb = int(b.nmor());
    for (auto& x : a.objects.labels)
        for (auto& y : b.objects.labels)
            c.objects.labels.push_back("(" + x + "," + y + ")");
    for (std::size_t f = 0; f < a.nmor(); ++f)
        for (std::size_t g = 0; g < b.nmor(); ++g)
            c.add_morphism("(" + a.names[f] + "," + b.names[g] + ")", a.src[f] * nb + b.src[g],
                           a.tgt[f] * nb + b.tgt[g]);
    for (std::size_t x = 0; x < a.objects.size(); ++x)
        for (int y = 0; y < nb; ++y)
            c.ident.push_back(a.ident[x] * mb + b.ident[y]);
    for (auto& [ka, va] : a.comp)
        for (auto& [kb, vb] : b.comp) {
            int g1 = int(ka >> 32), f1 = int(ka & 0xffffffffu);
            int g2 = int(kb >> 32), f2 = int(kb & 0xffffffffu);
            c.set_comp(g1 * mb + g2, f1 * mb + f2, va * mb + vb);
        }
    return c;
}

FinCat opposite_cat(const FinCat& c)
{
    FinCat o = c;
    std::swap(o.src, o.tgt);
    o.comp.clear();
    for (auto& [k, v] : c.comp) {
        int g = int(k >> 32), f = int(k & 0xffffffffu);
        o.set_comp(f, g, v);
    }
    return o;
}

bool is_free_category(const FinCat& c, std::string* why)
{
    int m = int(c.nmor()), n = int(c.objects.size());
    std::vector<char> decomposable(m, 0);
    for (auto& [k, v] : c.comp) {
        int g = int(k >> 32), f = int(k & 0xffffffffu);
        if (!c.is_identity(g) && !c.is_identity(f))
            decomposable[v] = 1;
    }
    std::vector<std::vector<int>> out(n);
    for (int f = 0; f < m; ++f)
        if (!c.is_identity(f) && !decomposable[f])
            out[c.src[f]].push_back(f);
    std::vector<int> hits(m, 0);
    for (int a = 0; a < n; ++a)
        hits[c.ident[a]]++;
    // every path of indecomposables must land on a distinct morphism; a path
    // longer than the morphism count means a cycle, hence infinitely many paths
    bool ok = true;
    std::function<void(int, int, int)> walk = [&](int comp, int obj, int len) {
        if (!ok)
            return;
        if (len > m) {
            ok = false;
            if (why)
                *why = "indecomposables form a cycle";
            return;
        }
        for (int e : out[obj]) {
            int nc = comp < 0 ? e : c.compose(e, comp);
            if (nc < 0) {
                ok = false;
                if (why)
                    *why = "composite missing";
                return;
            }
            if (++hits[nc] > 1) {
                ok = false;
                if (why)
                    *why = "morphism " + c.names[nc] + " has two decompositions";
                return;
            }
            walk(nc, c.tgt[e], len + 1);
        }
    };
    for (int a = 0; a < n && ok; ++a)
        walk(-1, a, 0);
    if (!ok)
        return false;
    for (int f = 0; f < m; ++f)
        if (hits[f] != 1) {
            if (why)
                *why = "morphism " + c.names[f] + " is not a composite of indecomposables";
            return false;
        }
    return true;
}

}  // namespace tc
