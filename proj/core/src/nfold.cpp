#include "trackcoh/nfold.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tc {

int pow3(int n)
{
    int r = 1;
    for (int i = 0; i < n; ++i)
        r *= 3;
    return r;
}

int code_digit(int code, int dir) { return (code / pow3(dir)) % 3; }

int code_with(int code, int dir, int v) { return code + (v - code_digit(code, dir)) * pow3(dir); }

std::vector<int> code_digits(int code, int n)
{
    std::vector<int> d(n);
    for (int i = 0; i < n; ++i) {
        d[i] = code % 3;
        code /= 3;
    }
    return d;
}

int code_from_digits(const std::vector<int>& d)
{
    int c = 0;
    for (std::size_t i = d.size(); i-- > 0;)
        c = c * 3 + d[i];
    return c;
}

static std::string digits_str(int code, int n)
{
    std::string s = "(";
    auto d = code_digits(code, n);
    for (int i = 0; i < n; ++i)
        s += (i ? "," : "") + std::to_string(d[i]);
    return s + ")";
}

Cubical::Cubical(int dims) : n(dims), cells(std::size_t(1) << dims)
{
    std::size_t nb = std::size_t(1) << dims;
    src.assign(dims, std::vector<std::vector<int>>(nb));
    tgt = unit = inv = src;
    comp.assign(dims, std::vector<std::unordered_map<std::uint64_t, int>>(nb));
}

bool Cubical::groupoid() const
{
    for (int d = 0; d < n; ++d)
        for (std::size_t b = 0; b < cells.size(); ++b)
            if ((b >> d & 1) && inv[d][b].size() != cells[b].size())
                return false;
    return true;
}

NFoldCat::NFoldCat(int dims) : n(dims)
{
    int nc = pow3(dims);
    cells.assign(nc, {});
    fmaps.assign(std::size_t(nc) * dims * 3, {});
    smaps.assign(std::size_t(nc) * dims * 2, {});
    imaps.assign(std::size_t(nc) * dims, {});
}

bool NFoldCat::has_inverses() const
{
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d)
            if (code_digit(k, d) == 1 && inverse(d, k).size() != count(k))
                return false;
    return n > 0;
}

bool NFoldCat::operator==(const NFoldCat& o) const
{
    return n == o.n && cells == o.cells && fmaps == o.fmaps && smaps == o.smaps && imaps == o.imaps;
}

std::optional<std::string> NFoldCat::audit_shape() const
{
    if (int(cells.size()) != ncodes())
        return std::string("corner has the wrong number of indices");
    auto bad = [&](const std::vector<int>& m, std::size_t from, std::size_t to) {
        if (m.size() != from)
            return true;
        for (int v : m)
            if (v < 0 || std::size_t(v) >= to)
                return true;
        return false;
    };
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            for (int j = 0; j < 3; ++j) {
                bool want = dg >= 1 && j <= dg;
                auto& m = face(d, k, j);
                if (want && bad(m, count(k), count(code_with(k, d, dg - 1))))
                    return "face map d" + std::to_string(j) + " in direction " + std::to_string(d + 1) +
                           " at index " + digits_str(k, n) + " is malformed";
                if (!want && !m.empty())
                    return std::string("face map stored outside the corner");
            }
            for (int j = 0; j < 2; ++j) {
                bool want = dg <= 1 && j <= dg;
                auto& m = degen(d, k, j);
                if (want && bad(m, count(k), count(code_with(k, d, dg + 1))))
                    return "degeneracy s" + std::to_string(j) + " in direction " + std::to_string(d + 1) +
                           " at index " + digits_str(k, n) + " is malformed";
                if (!want && !m.empty())
                    return std::string("degeneracy stored outside the corner");
            }
            auto& iv = inverse(d, k);
            if (!iv.empty() && (dg != 1 || bad(iv, count(k), count(k))))
                return "inverse in direction " + std::to_string(d + 1) + " at index " + digits_str(k, n) +
                       " is malformed";
        }
    return std::nullopt;
}

namespace {

std::vector<int> after(const std::vector<int>& g, const std::vector<int>& f)
{
    std::vector<int> r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        r[i] = g[f[i]];
    return r;
}

std::vector<int> iota_vec(std::size_t n)
{
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

// a structure map in one direction: face (deg = -1) or degeneracy (deg = +1)
struct Op {
    int dir, j, delta;
};

bool applicable(const NFoldCat& x, int code, Op op)
{
    int dg = code_digit(code, op.dir);
    if (op.delta < 0)
        return dg >= 1 && op.j <= dg;
    return dg <= 1 && op.j <= dg;
}

const std::vector<int>& opmap(const NFoldCat& x, int code, Op op)
{
    return op.delta < 0 ? x.face(op.dir, code, op.j) : x.degen(op.dir, code, op.j);
}

int optarget(int code, Op op) { return code_with(code, op.dir, code_digit(code, op.dir) + op.delta); }

}  // namespace

std::optional<std::string> NFoldCat::audit_simplicial() const
{
    if (auto e = audit_shape())
        return e;
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            std::string where = " in direction " + std::to_string(d + 1) + " at index " + digits_str(k, n);
            if (dg == 2) {
                int k1 = code_with(k, d, 1);
                int pr[3][2] = {{0, 1}, {0, 2}, {1, 2}};
                for (auto& p : pr) {
                    int i = p[0], j = p[1];
                    if (after(face(d, k1, i), face(d, k, j)) != after(face(d, k1, j - 1), face(d, k, i)))
                        return "face identity d" + std::to_string(i) + "d" + std::to_string(j) + " fails" + where;
                }
            }
            if (dg == 0) {
                int k1 = code_with(k, d, 1), k2 = code_with(k, d, 2);
                auto id = iota_vec(count(k));
                if (after(face(d, k1, 0), degen(d, k, 0)) != id || after(face(d, k1, 1), degen(d, k, 0)) != id)
                    return "d s0 = id fails" + where;
                if (after(degen(d, k1, 1), degen(d, k, 0)) != after(degen(d, k1, 0), degen(d, k, 0)))
                    return "s1 s0 = s0 s0 fails" + where;
                (void)k2;
            }
            if (dg == 1) {
                int k0 = code_with(k, d, 0), k2 = code_with(k, d, 2);
                auto id = iota_vec(count(k));
                if (after(face(d, k2, 0), degen(d, k, 0)) != id || after(face(d, k2, 1), degen(d, k, 0)) != id ||
                    after(face(d, k2, 1), degen(d, k, 1)) != id || after(face(d, k2, 2), degen(d, k, 1)) != id)
                    return "d_i s_j = id fails" + where;
                if (after(face(d, k2, 2), degen(d, k, 0)) != after(degen(d, k0, 0), face(d, k, 1)))
                    return "d2 s0 = s0 d1 fails" + where;
                if (after(face(d, k2, 0), degen(d, k, 1)) != after(degen(d, k0, 0), face(d, k, 0)))
                    return "d0 s1 = s0 d0 fails" + where;
            }
        }
    // maps in different directions commute
    std::vector<Op> ops;
    for (int d = 0; d < n; ++d) {
        for (int j = 0; j < 3; ++j)
            ops.push_back({d, j, -1});
        for (int j = 0; j < 2; ++j)
            ops.push_back({d, j, +1});
    }
    for (int k = 0; k < ncodes(); ++k)
        for (auto a : ops)
            for (auto b : ops) {
                if (a.dir >= b.dir || !applicable(*this, k, a) || !applicable(*this, k, b))
                    continue;
                int ka = optarget(k, a), kb = optarget(k, b);
                int kab = optarget(ka, b);
                auto p1 = after(opmap(*this, ka, b), opmap(*this, k, a));
                auto p2 = after(opmap(*this, kb, a), opmap(*this, k, b));
                (void)kab;
                if (p1 != p2)
                    return "maps in directions " + std::to_string(a.dir + 1) + " and " + std::to_string(b.dir + 1) +
                           " do not commute at index " + digits_str(k, n);
            }
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            auto& iv = inverse(d, k);
            if (iv.empty())
                continue;
            for (auto b : ops) {
                if (b.dir == d || !applicable(*this, k, b))
                    continue;
                int kb = optarget(k, b);
                auto& ivb = inverse(d, kb);
                if (ivb.empty() || after(opmap(*this, k, b), iv) != after(ivb, opmap(*this, k, b)))
                    return "inverse in direction " + std::to_string(d + 1) + " does not commute with direction " +
                           std::to_string(b.dir + 1) + " at index " + digits_str(k, n);
            }
        }
    return std::nullopt;
}

std::optional<std::string> NFoldCat::audit_segal() const
{
    if (auto e = audit_shape())
        return e;
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            if (code_digit(k, d) != 2)
                continue;
            int k1 = code_with(k, d, 1);
            std::set<std::pair<int, int>> seen;
            for (std::size_t z = 0; z < count(k); ++z) {
                int x = face(d, k, 2)[z], y = face(d, k, 0)[z];
                if (face(d, k1, 0)[x] != face(d, k1, 1)[y])
                    return "level-2 element " + cells[k][z] + " is not a composable pair";
                if (!seen.insert({x, y}).second)
                    return "two level-2 elements over the pair (" + cells[k1][x] + ", " + cells[k1][y] + ")";
            }
            std::size_t pairs = 0;
            std::map<int, int> by_src;
            for (std::size_t y = 0; y < count(k1); ++y)
                by_src[face(d, k1, 1)[y]]++;
            for (std::size_t x = 0; x < count(k1); ++x) {
                auto it = by_src.find(face(d, k1, 0)[x]);
                if (it != by_src.end())
                    pairs += it->second;
            }
            if (pairs != seen.size())
                return "Segal map in direction " + std::to_string(d + 1) + " at index " + digits_str(k, n) +
                       " misses a composable pair";
        }
    return std::nullopt;
}

std::optional<std::string> NFoldCat::audit_groupoid() const
{
    for (int d = 0; d < n; ++d)
        for (int k = 0; k < ncodes(); ++k) {
            if (code_digit(k, d) != 1)
                continue;
            auto& iv = inverse(d, k);
            if (iv.size() != count(k))
                return "no inverse in direction " + std::to_string(d + 1) + " at index " + digits_str(k, n);
            int k0 = code_with(k, d, 0), k2 = code_with(k, d, 2);
            std::map<std::pair<int, int>, int> pairs;
            for (std::size_t z = 0; z < count(k2); ++z)
                pairs[{face(d, k2, 2)[z], face(d, k2, 0)[z]}] = int(z);
            for (std::size_t x = 0; x < count(k); ++x) {
                int y = iv[x];
                auto a = pairs.find({int(x), y}), b = pairs.find({y, int(x)});
                if (a == pairs.end() || b == pairs.end() ||
                    face(d, k2, 1)[a->second] != degen(d, k0, 0)[face(d, k, 1)[x]] ||
                    face(d, k2, 1)[b->second] != degen(d, k0, 0)[face(d, k, 0)[x]])
                    return "inverse law fails for " + cells[k][x] + " in direction " + std::to_string(d + 1);
            }
        }
    return std::nullopt;
}

std::optional<std::string> NFoldCat::audit() const
{
    if (auto e = audit_simplicial())
        return e;
    if (auto e = audit_segal())
        return e;
    for (int k = 0; k < ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            if (code_digit(k, d) != 0)
                continue;
            if (auto e = dir_category(d, k).audit())
                return "direction " + std::to_string(d + 1) + " at index " + digits_str(k, n) + ": " + *e;
        }
    if (has_inverses())
        if (auto e = audit_groupoid())
            return e;
    return std::nullopt;
}

FinCat NFoldCat::dir_category(int d, int code) const
{
    int k0 = code_with(code, d, 0), k1 = code_with(code, d, 1), k2 = code_with(code, d, 2);
    FinCat c;
    c.objects.labels = cells[k0];
    for (std::size_t f = 0; f < count(k1); ++f)
        c.add_morphism(cells[k1][f], face(d, k1, 1)[f], face(d, k1, 0)[f]);
    c.ident = degen(d, k0, 0);
    for (std::size_t z = 0; z < count(k2); ++z)
        c.set_comp(face(d, k2, 0)[z], face(d, k2, 2)[z], face(d, k2, 1)[z]);
    return c;
}

NFoldCat NFoldCat::slice(int dir, int v, std::vector<int>* codemap) const
{
    NFoldCat r(n - 1);
    std::vector<int> old(r.ncodes());
    for (int c = 0; c < r.ncodes(); ++c) {
        auto dg = code_digits(c, n - 1);
        dg.insert(dg.begin() + dir, v);
        old[c] = code_from_digits(dg);
        r.cells[c] = cells[old[c]];
    }
    for (int c = 0; c < r.ncodes(); ++c)
        for (int d = 0; d < n - 1; ++d) {
            int od = d < dir ? d : d + 1;
            for (int j = 0; j < 3; ++j)
                r.face(d, c, j) = face(od, old[c], j);
            for (int j = 0; j < 2; ++j)
                r.degen(d, c, j) = degen(od, old[c], j);
            r.inverse(d, c) = inverse(od, old[c]);
        }
    if (codemap)
        *codemap = old;
    return r;
}

NFoldCat NFoldCat::permute(const std::vector<int>& order) const
{
    NFoldCat r(n);
    std::vector<int> old(ncodes());
    for (int c = 0; c < ncodes(); ++c) {
        auto dg = code_digits(c, n);
        std::vector<int> od(n);
        for (int i = 0; i < n; ++i)
            od[order[i]] = dg[i];
        old[c] = code_from_digits(od);
        r.cells[c] = cells[old[c]];
    }
    for (int c = 0; c < ncodes(); ++c)
        for (int d = 0; d < n; ++d) {
            for (int j = 0; j < 3; ++j)
                r.face(d, c, j) = face(order[d], old[c], j);
            for (int j = 0; j < 2; ++j)
                r.degen(d, c, j) = degen(order[d], old[c], j);
            r.inverse(d, c) = inverse(order[d], old[c]);
        }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

int bcode_of(int code, int n)
{
    int b = 0;
    for (int d = 0; d < n; ++d)
        if (code_digit(code, d) >= 1)
            b |= 1 << d;
    return b;
}

std::vector<int> twos_of(int code, int n)
{
    std::vector<int> t;
    for (int d = 0; d < n; ++d)
        if (code_digit(code, d) == 2)
            t.push_back(d);
    return t;
}

int remove_bit(int p, int q) { return (p & ((1 << q) - 1)) | ((p >> (q + 1)) << q); }
int insert_bit(int p, int q, int bit) { return (p & ((1 << q) - 1)) | (bit << q) | ((p >> q) << (q + 1)); }

struct GridHash {
    std::size_t operator()(const std::vector<int>& v) const
    {
        std::size_t h = v.size();
        for (int x : v)
            h = h * 1000003u ^ std::size_t(x);
        return h;
    }
};

}  // namespace

NFoldCat from_cubical(const Cubical& c)
{
    int n = c.n;
    NFoldCat x(n);
    int nc = pow3(n);
    std::vector<std::vector<std::vector<int>>> grids(nc);
    std::vector<std::unordered_map<std::vector<int>, int, GridHash>> gid(nc);
    std::vector<char> built(nc, 0);
    std::function<void(int)> build = [&](int k) {
        if (built[k])
            return;
        built[k] = 1;
        auto T = twos_of(k, n);
        int b = bcode_of(k, n);
        if (T.empty()) {
            for (std::size_t i = 0; i < c.cells[b].size(); ++i)
                grids[k].push_back({int(i)});
        } else {
            int t = T.back();
            int kp = code_with(k, t, 1);
            build(kp);
            int bt = b & ~(1 << t);
            (void)bt;
            std::unordered_map<std::vector<int>, std::vector<int>, GridHash> by_src;
            for (std::size_t g = 0; g < grids[kp].size(); ++g) {
                std::vector<int> s;
                for (int cell : grids[kp][g])
                    s.push_back(c.src[t][b][cell]);
                by_src[s].push_back(int(g));
            }
            for (auto& g1 : grids[kp]) {
                std::vector<int> tg;
                for (int cell : g1)
                    tg.push_back(c.tgt[t][b][cell]);
                auto it = by_src.find(tg);
                if (it == by_src.end())
                    continue;
                for (int g2 : it->second) {
                    auto g = g1;
                    g.insert(g.end(), grids[kp][g2].begin(), grids[kp][g2].end());
                    grids[k].push_back(std::move(g));
                }
            }
        }
        for (std::size_t i = 0; i < grids[k].size(); ++i) {
            gid[k][grids[k][i]] = int(i);
            auto& g = grids[k][i];
            if (g.size() == 1)
                x.cells[k].push_back(c.cells[b][g[0]]);
            else {
                std::string s = "[";
                for (std::size_t j = 0; j < g.size(); ++j)
                    s += (j ? "," : "") + c.cells[b][g[j]];
                x.cells[k].push_back(s + "]");
            }
        }
    };
    for (int k = 0; k < nc; ++k)
        build(k);

    auto look = [&](int k, const std::vector<int>& g) {
        auto it = gid[k].find(g);
        if (it == gid[k].end())
            throw std::runtime_error("from_cubical: structure map leaves the corner at index " + digits_str(k, n));
        return it->second;
    };
    auto cellwise = [&](int k, int kt, const std::vector<std::vector<int>>& table) {
        int b = bcode_of(k, n);
        std::vector<int> out;
        for (auto& g : grids[k]) {
            std::vector<int> h;
            for (int cell : g)
                h.push_back(table[b][cell]);
            out.push_back(look(kt, h));
        }
        return out;
    };
    for (int k = 0; k < nc; ++k) {
        auto T = twos_of(k, n);
        int b = bcode_of(k, n);
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            if (dg == 0) {
                x.degen(d, k, 0) = cellwise(k, code_with(k, d, 1), c.unit[d]);
            } else if (dg == 1) {
                int k0 = code_with(k, d, 0), k2 = code_with(k, d, 2);
                x.face(d, k, 0) = cellwise(k, k0, c.tgt[d]);
                x.face(d, k, 1) = cellwise(k, k0, c.src[d]);
                if (c.inv[d][b].size() == c.cells[b].size() && !c.cells[b].empty())
                    x.inverse(d, k) = cellwise(k, k, c.inv[d]);
                else if (c.cells[b].empty() && c.groupoid())
                    x.inverse(d, k) = {};
                int q = int(std::lower_bound(T.begin(), T.end(), d) - T.begin());
                int b0 = b & ~(1 << d);
                for (int j = 0; j < 2; ++j) {
                    std::vector<int> out;
                    for (auto& g : grids[k]) {
                        std::vector<int> h(g.size() * 2);
                        for (std::size_t P = 0; P < h.size(); ++P) {
                            int which = (int(P) >> q) & 1;
                            int p = remove_bit(int(P), q);
                            int cell = g[p];
                            if (j == 0)
                                h[P] = which == 0 ? c.unit[d][b0][c.src[d][b][cell]] : cell;
                            else
                                h[P] = which == 0 ? cell : c.unit[d][b0][c.tgt[d][b][cell]];
                        }
                        out.push_back(look(k2, h));
                    }
                    x.degen(d, k, j) = std::move(out);
                }
            } else {
                int k1 = code_with(k, d, 1);
                int q = int(std::find(T.begin(), T.end(), d) - T.begin());
                std::vector<int> f0, f1, f2;
                for (auto& g : grids[k]) {
                    std::size_t half = g.size() / 2;
                    std::vector<int> a(half), bb(half), cc(half);
                    for (std::size_t p = 0; p < half; ++p) {
                        int x0 = g[insert_bit(int(p), q, 0)], x1 = g[insert_bit(int(p), q, 1)];
                        a[p] = x0;
                        bb[p] = x1;
                        auto it = c.comp[d][b].find(pair_key(x0, x1));
                        if (it == c.comp[d][b].end())
                            throw std::runtime_error("from_cubical: missing composite in direction " +
                                                     std::to_string(d + 1));
                        cc[p] = it->second;
                    }
                    f2.push_back(look(k1, a));
                    f0.push_back(look(k1, bb));
                    f1.push_back(look(k1, cc));
                }
                x.face(d, k, 0) = std::move(f0);
                x.face(d, k, 1) = std::move(f1);
                x.face(d, k, 2) = std::move(f2);
            }
        }
    }
    if (c.groupoid())
        for (int k = 0; k < nc; ++k)
            for (int d = 0; d < n; ++d)
                if (code_digit(k, d) == 1 && x.inverse(d, k).size() != x.count(k))
                    x.inverse(d, k) = cellwise(k, k, c.inv[d]);
    return x;
}

NFoldCat nfold_from_category(const FinCat& cat)
{
    Cubical c(1);
    c.cells[0] = cat.objects.labels;
    c.cells[1] = cat.names;
    c.src[0][1] = cat.src;
    c.tgt[0][1] = cat.tgt;
    c.unit[0][0] = cat.ident;
    for (auto& [k, v] : cat.comp) {
        int g = int(k >> 32), f = int(k & 0xffffffffu);
        c.comp[0][1][pair_key(f, g)] = v;
    }
    return from_cubical(c);
}

NFoldCat nfold_from_groupoid(const FinGroupoid& g)
{
    Cubical c(1);
    c.cells[0] = g.cat.objects.labels;
    c.cells[1] = g.cat.names;
    c.src[0][1] = g.cat.src;
    c.tgt[0][1] = g.cat.tgt;
    c.unit[0][0] = g.cat.ident;
    c.inv[0][1] = g.inv;
    for (auto& [k, v] : g.cat.comp) {
        int a = int(k >> 32), f = int(k & 0xffffffffu);
        c.comp[0][1][pair_key(f, a)] = v;
    }
    auto x = from_cubical(c);
    x.inverse(0, 1) = g.inv;
    return x;
}

NFoldCat discrete_nfold(const std::vector<std::string>& labels, int n)
{
    NFoldCat x(n);
    auto id = iota_vec(labels.size());
    for (int k = 0; k < x.ncodes(); ++k) {
        x.cells[k] = labels;
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            for (int j = 0; j <= dg && dg >= 1; ++j)
                x.face(d, k, j) = id;
            for (int j = 0; j <= dg && dg <= 1; ++j)
                x.degen(d, k, j) = id;
            if (dg == 1)
                x.inverse(d, k) = id;
        }
    }
    return x;
}

NFoldCat empty_nfold(int n) { return discrete_nfold({}, n); }

NFoldCat external_product(const NFoldCat& a, const NFoldCat& b)
{
    int n = a.n + b.n;
    NFoldCat x(n);
    int pa = pow3(a.n);
    for (int k = 0; k < x.ncodes(); ++k) {
        int ka = k % pa, kb = k / pa;
        std::size_t nb = b.count(kb);
        for (auto& s : a.cells[ka])
            for (auto& t : b.cells[kb])
                x.cells[k].push_back("(" + s + "," + t + ")");
        auto lift_a = [&](const std::vector<int>& m, int kbt) {
            std::vector<int> r;
            for (std::size_t i = 0; i < a.count(ka); ++i)
                for (std::size_t j = 0; j < nb; ++j)
                    r.push_back(m[i] * int(b.count(kbt)) + int(j));
            return r;
        };
        auto lift_b = [&](const std::vector<int>& m, int kbt) {
            std::vector<int> r;
            for (std::size_t i = 0; i < a.count(ka); ++i)
                for (std::size_t j = 0; j < nb; ++j)
                    r.push_back(int(i) * int(b.count(kbt)) + m[j]);
            return r;
        };
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            if (d < a.n) {
                for (int j = 0; j < 3; ++j)
                    if (dg >= 1 && j <= dg)
                        x.face(d, k, j) = lift_a(a.face(d, ka, j), kb);
                for (int j = 0; j < 2; ++j)
                    if (dg <= 1 && j <= dg)
                        x.degen(d, k, j) = lift_a(a.degen(d, ka, j), kb);
                if (dg == 1 && a.inverse(d, ka).size() == a.count(ka))
                    x.inverse(d, k) = lift_a(a.inverse(d, ka), kb);
            } else {
                int db = d - a.n;
                int kbt;
                for (int j = 0; j < 3; ++j)
                    if (dg >= 1 && j <= dg) {
                        kbt = code_with(kb, db, dg - 1);
                        x.face(d, k, j) = lift_b(b.face(db, kb, j), kbt);
                    }
                for (int j = 0; j < 2; ++j)
                    if (dg <= 1 && j <= dg) {
                        kbt = code_with(kb, db, dg + 1);
                        x.degen(d, k, j) = lift_b(b.degen(db, kb, j), kbt);
                    }
                if (dg == 1 && b.inverse(db, kb).size() == b.count(kb))
                    x.inverse(d, k) = lift_b(b.inverse(db, kb), kb);
            }
        }
    }
    return x;
}

NFoldMap identity_map(const NFoldCat& x)
{
    NFoldMap f;
    for (int k = 0; k < x.ncodes(); ++k)
        f.m.push_back(iota_vec(x.count(k)));
    return f;
}

NFoldMap compose_maps(const NFoldMap& g, const NFoldMap& f)
{
    NFoldMap r;
    for (std::size_t k = 0; k < f.m.size(); ++k)
        r.m.push_back(after(g.m[k], f.m[k]));
    return r;
}

std::optional<std::string> audit_map(const NFoldCat& x, const NFoldCat& y, const NFoldMap& f)
{
    if (x.n != y.n || int(f.m.size()) != x.ncodes())
        return std::string("map has the wrong shape");
    for (int k = 0; k < x.ncodes(); ++k) {
        if (f.m[k].size() != x.count(k))
            return "map table at index " + digits_str(k, x.n) + " has the wrong length";
        for (int v : f.m[k])
            if (v < 0 || std::size_t(v) >= y.count(k))
                return "map value out of range at index " + digits_str(k, x.n);
    }
    for (int k = 0; k < x.ncodes(); ++k)
        for (int d = 0; d < x.n; ++d) {
            for (int j = 0; j < 3; ++j) {
                Op op{d, j, -1};
                if (!applicable(x, k, op))
                    continue;
                int kt = optarget(k, op);
                if (after(f.m[kt], x.face(d, k, j)) != after(y.face(d, k, j), f.m[k]))
                    return "map does not commute with d" + std::to_string(j) + " in direction " +
                           std::to_string(d + 1) + " at index " + digits_str(k, x.n);
            }
            for (int j = 0; j < 2; ++j) {
                Op op{d, j, +1};
                if (!applicable(x, k, op))
                    continue;
                int kt = optarget(k, op);
                if (after(f.m[kt], x.degen(d, k, j)) != after(y.degen(d, k, j), f.m[k]))
                    return "map does not commute with s" + std::to_string(j) + " in direction " +
                           std::to_string(d + 1) + " at index " + digits_str(k, x.n);
            }
        }
    return std::nullopt;
}

NFoldPullback pullback_nfold(const NFoldCat& a, const NFoldCat& b, const NFoldCat&, const NFoldMap& f,
                             const NFoldMap& g)
{
    int n = a.n;
    NFoldPullback r;
    r.p = NFoldCat(n);
    r.pa.m.resize(r.p.ncodes());
    r.pb.m.resize(r.p.ncodes());
    std::vector<std::map<std::pair<int, int>, int>> id(r.p.ncodes());
    for (int k = 0; k < r.p.ncodes(); ++k) {
        std::unordered_map<int, std::vector<int>> by;
        for (std::size_t j = 0; j < b.count(k); ++j)
            by[g.m[k][j]].push_back(int(j));
        for (std::size_t i = 0; i < a.count(k); ++i) {
            auto it = by.find(f.m[k][i]);
            if (it == by.end())
                continue;
            for (int j : it->second) {
                id[k][{int(i), j}] = int(r.p.cells[k].size());
                r.p.cells[k].push_back("(" + a.cells[k][i] + "," + b.cells[k][j] + ")");
                r.pa.m[k].push_back(int(i));
                r.pb.m[k].push_back(j);
            }
        }
    }
    bool inv = a.has_inverses() && b.has_inverses();
    auto induced = [&](int k, int kt, const std::vector<int>& ma, const std::vector<int>& mb) {
        std::vector<int> out;
        for (std::size_t e = 0; e < r.p.count(k); ++e)
            out.push_back(id[kt].at({ma[r.pa.m[k][e]], mb[r.pb.m[k][e]]}));
        return out;
    };
    for (int k = 0; k < r.p.ncodes(); ++k)
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            for (int j = 0; j < 3; ++j)
                if (dg >= 1 && j <= dg)
                    r.p.face(d, k, j) = induced(k, code_with(k, d, dg - 1), a.face(d, k, j), b.face(d, k, j));
            for (int j = 0; j < 2; ++j)
                if (dg <= 1 && j <= dg)
                    r.p.degen(d, k, j) = induced(k, code_with(k, d, dg + 1), a.degen(d, k, j), b.degen(d, k, j));
            if (dg == 1 && inv)
                r.p.inverse(d, k) = induced(k, k, a.inverse(d, k), b.inverse(d, k));
        }
    return r;
}

NFoldCat rotate(const NFoldCat& x, int r)
{
    if (r < 1 || r > x.n)
        throw std::out_of_range("rotate: direction out of range");
    std::vector<int> order;
    order.push_back(r - 1);
    for (int d = 0; d < x.n; ++d)
        if (d != r - 1)
            order.push_back(d);
    return x.permute(order);
}

Truncation truncate_p(const NFoldCat& x)
{
    if (x.n < 1)
        throw std::invalid_argument("truncate_p: dimension must be positive");
    int n = x.n, last = n - 1;
    Truncation t;
    t.p = NFoldCat(n - 1);
    t.gamma.m.resize(x.ncodes());
    std::vector<IsoClasses> ic(t.p.ncodes());
    auto base = [&](int c) { return c; };   // codes of the first n-1 digits coincide
    for (int c = 0; c < t.p.ncodes(); ++c) {
        int k0 = base(c);
        ic[c] = iso_classes(x.dir_category(last, k0));
        for (int rep : ic[c].rep)
            t.p.cells[c].push_back(x.cells[k0][rep]);
        int k1 = code_with(k0, last, 1), k2 = code_with(k0, last, 2);
        t.gamma.m[k0] = ic[c].cls;
        t.gamma.m[k1] = after(ic[c].cls, x.face(last, k1, 1));
        t.gamma.m[k2] = after(t.gamma.m[k1], x.face(last, k2, 2));
    }
    bool inv = true;
    for (int c = 0; c < t.p.ncodes(); ++c)
        for (int d = 0; d < n - 1; ++d) {
            int dg = code_digit(c, d);
            auto induced = [&](const std::vector<int>& m, int ct) {
                std::vector<int> out(ic[c].count);
                for (int cl = 0; cl < ic[c].count; ++cl)
                    out[cl] = ic[ct].cls[m[ic[c].rep[cl]]];
                return out;
            };
            for (int j = 0; j < 3; ++j)
                if (dg >= 1 && j <= dg)
                    t.p.face(d, c, j) = induced(x.face(d, c, j), code_with(c, d, dg - 1));
            for (int j = 0; j < 2; ++j)
                if (dg <= 1 && j <= dg)
                    t.p.degen(d, c, j) = induced(x.degen(d, c, j), code_with(c, d, dg + 1));
            if (dg == 1) {
                if (x.inverse(d, c).size() == x.count(c))
                    t.p.inverse(d, c) = induced(x.inverse(d, c), c);
                else
                    inv = false;
            }
        }
    if (!inv)
        for (auto& v : t.p.imaps)
            v.clear();
    return t;
}

namespace {

// empty string when the category is an equivalence relation
std::string er_failure(const FinCat& c)
{
    std::set<std::pair<int, int>> seen;
    for (std::size_t f = 0; f < c.nmor(); ++f)
        if (!seen.insert({c.src[f], c.tgt[f]}).second)
            return "two parallel arrows " + c.objects.labels[c.src[f]] + " -> " + c.objects.labels[c.tgt[f]];
    for (auto [a, b] : seen)
        if (!seen.count({b, a}))
            return "arrow " + c.objects.labels[a] + " -> " + c.objects.labels[b] + " has no reverse";
    return {};
}

bool all_invertible(const FinCat& c, std::string* which)
{
    for (std::size_t f = 0; f < c.nmor(); ++f)
        if (find_inverse(c, int(f)) < 0) {
            if (which)
                *which = c.names[f];
            return false;
        }
    return true;
}

}  // namespace

HdCert is_homotopically_discrete(const NFoldCat& x)
{
    HdCert cert;
    NFoldCat cur = x;
    while (cur.n >= 1) {
        int last = cur.n - 1;
        for (int c = 0; c < pow3(cur.n - 1); ++c) {
            auto e = er_failure(cur.dir_category(last, c));
            if (!e.empty()) {
                cert.witness = "dimension " + std::to_string(cur.n) + ", index " + digits_str(c, cur.n - 1) + ": " + e;
                return cert;
            }
        }
        auto t = truncate_p(cur);
        cert.chain.push_back(t.p);
        cur = std::move(t.p);
    }
    cert.discrete = cur.cells[0];
    cert.ok = true;
    return cert;
}

std::optional<Discretization> discretization(const NFoldCat& x)
{
    Discretization d;
    if (x.n == 0) {
        d.labels = x.cells[0];
        d.gamma.m = {iota_vec(x.count(0))};
        return d;
    }
    if (!is_homotopically_discrete(x).ok)
        return std::nullopt;
    auto t = truncate_p(x);
    auto rest = discretization(t.p);
    if (!rest)
        return std::nullopt;
    d.labels = rest->labels;
    d.gamma.m.resize(x.ncodes());
    for (int k = 0; k < x.ncodes(); ++k) {
        int c = k % pow3(x.n - 1);
        d.gamma.m[k] = after(rest->gamma.m[c], t.gamma.m[k]);
    }
    return d;
}

HomFiber hom_fiber(const NFoldCat& x, const Discretization& d0, int a, int b)
{
    HomFiber h;
    h.fiber = NFoldCat(x.n - 1);
    int m = h.fiber.ncodes();
    h.incl.resize(m);
    std::vector<std::unordered_map<int, int>> pos(m);
    for (int c = 0; c < m; ++c) {
        int k1 = c * 3 + 1;   // direction 1 at level 1, remaining digits shifted up
        int k0 = c * 3;
        for (std::size_t i = 0; i < x.count(k1); ++i) {
            int s = d0.gamma.m[c][x.face(0, k1, 1)[i]], t = d0.gamma.m[c][x.face(0, k1, 0)[i]];
            (void)k0;
            if (s == a && t == b) {
                pos[c][int(i)] = int(h.incl[c].size());
                h.incl[c].push_back(int(i));
                h.fiber.cells[c].push_back(x.cells[k1][i]);
            }
        }
    }
    bool inv = true;
    for (int c = 0; c < m; ++c)
        for (int d = 0; d < x.n - 1; ++d) {
            int k1 = c * 3 + 1, dg = code_digit(c, d);
            auto restrict = [&](const std::vector<int>& mp, int ct) {
                std::vector<int> out;
                for (int i : h.incl[c])
                    out.push_back(pos[ct].at(mp[i]));
                return out;
            };
            for (int j = 0; j < 3; ++j)
                if (dg >= 1 && j <= dg)
                    h.fiber.face(d, c, j) = restrict(x.face(d + 1, k1, j), code_with(c, d, dg - 1));
            for (int j = 0; j < 2; ++j)
                if (dg <= 1 && j <= dg)
                    h.fiber.degen(d, c, j) = restrict(x.degen(d + 1, k1, j), code_with(c, d, dg + 1));
            if (dg == 1) {
                if (x.inverse(d + 1, k1).size() == x.count(k1))
                    h.fiber.inverse(d, c) = restrict(x.inverse(d + 1, k1), c);
                else
                    inv = false;
            }
        }
    if (!inv)
        for (auto& v : h.fiber.imaps)
            v.clear();
    return h;
}

HomFiber hom_fiber(const NFoldCat& x, const std::string& a, const std::string& b)
{
    auto d0 = discretization(x.slice(0, 0));
    if (!d0)
        throw std::invalid_argument("hom_fiber: level 0 is not homotopically discrete");
    auto ia = std::find(d0->labels.begin(), d0->labels.end(), a);
    auto ib = std::find(d0->labels.begin(), d0->labels.end(), b);
    if (ia == d0->labels.end() || ib == d0->labels.end())
        throw std::invalid_argument("hom_fiber: unknown object class");
    return hom_fiber(x, *d0, int(ia - d0->labels.begin()), int(ib - d0->labels.begin()));
}

bool is_n_equivalence(const NFoldCat& x, const NFoldCat& y, const NFoldMap& f, std::string* why)
{
    auto fail = [&](const std::string& s) {
        if (why)
            *why = s;
        return false;
    };
    int n = x.n;
    if (n == 0) {
        std::set<int> img(f.m[0].begin(), f.m[0].end());
        if (img.size() != x.count(0) || img.size() != y.count(0))
            return fail("map of sets is not a bijection");
        return true;
    }
    if (n == 1) {
        FunctorMap F{f.m[0], f.m[1]};
        if (!is_equivalence(x.dir_category(0, 0), y.dir_category(0, 0), F))
            return fail("functor is not an equivalence of categories");
        return true;
    }
    auto dx = discretization(x.slice(0, 0));
    auto dy = discretization(y.slice(0, 0));
    if (!dx || !dy)
        return fail("level 0 is not homotopically discrete");
    int na = int(dx->labels.size());
    std::vector<int> fd(na, -1);
    for (std::size_t i = 0; i < x.count(0); ++i)
        fd[dx->gamma.m[0][i]] = dy->gamma.m[0][f.m[0][i]];
    for (int a = 0; a < na; ++a)
        for (int b = 0; b < na; ++b) {
            auto hx = hom_fiber(x, *dx, a, b);
            auto hy = hom_fiber(y, *dy, fd[a], fd[b]);
            NFoldMap g;
            g.m.resize(hx.fiber.ncodes());
            for (int c = 0; c < hx.fiber.ncodes(); ++c) {
                std::unordered_map<int, int> pos;
                for (std::size_t i = 0; i < hy.incl[c].size(); ++i)
                    pos[hy.incl[c][i]] = int(i);
                int k1 = c * 3 + 1;
                for (int i : hx.incl[c])
                    g.m[c].push_back(pos.at(f.m[k1][i]));
            }
            std::string sub;
            if (!is_n_equivalence(hx.fiber, hy.fiber, g, &sub))
                return fail("hom-fiber (" + dx->labels[a] + ", " + dx->labels[b] + "): " + sub);
        }
    auto tx = truncate_p(x), ty = truncate_p(y);
    NFoldMap pf;
    pf.m.resize(tx.p.ncodes());
    for (int c = 0; c < tx.p.ncodes(); ++c) {
        pf.m[c].assign(tx.p.count(c), -1);
        for (std::size_t i = 0; i < x.count(c); ++i)
            pf.m[c][tx.gamma.m[c][i]] = ty.gamma.m[c][f.m[c][i]];
    }
    std::string sub;
    if (!is_n_equivalence(tx.p, ty.p, pf, &sub))
        return fail("truncation: " + sub);
    return true;
}

WgReport is_weakly_globular(const NFoldCat& x)
{
    WgReport r;
    int n = x.n;
    if (n == 0) {
        r.ok = r.groupoid = true;
        return r;
    }
    int last = n - 1;
    std::string which;
    for (int c = 0; c < pow3(n - 1); ++c)
        if (!all_invertible(x.dir_category(last, c), &which)) {
            r.witness = "direction " + std::to_string(n) + " at index " + digits_str(c, n - 1) +
                        " is not a groupoid (" + which + ")";
            return r;
        }
    for (int d = 0; d < n - 1; ++d)
        for (int c = 0; c < pow3(n - 1); ++c) {
            if (code_digit(c, d) != 0)
                continue;
            auto e = er_failure(x.dir_category(last, c));
            if (!e.empty()) {
                r.witness = "level 0 of direction " + std::to_string(d + 1) + " is not a levelwise equivalence relation: " + e;
                return r;
            }
        }
    auto sub = is_weakly_globular(truncate_p(x).p);
    if (!sub.ok) {
        r.witness = "truncation: " + sub.witness;
        return r;
    }
    r.ok = true;
    bool g = sub.groupoid || n == 1;
    for (int d = 0; d < n - 1 && g; ++d)
        for (int k = 0; k < x.ncodes() && g; ++k)
            if (code_digit(k, d) == 0 && !all_invertible(x.dir_category(d, k), nullptr))
                g = false;
    r.groupoid = g;
    return r;
}

bool segal_check(const NFoldCat& x, std::string* why)
{
    auto fail = [&](const std::string& s) {
        if (why)
            *why = s;
        return false;
    };
    int n = x.n;
    if (n < 1)
        return true;
    std::vector<int> cm0, cm1, cm2;
    auto X0 = x.slice(0, 0, &cm0), X1 = x.slice(0, 1, &cm1), X2 = x.slice(0, 2, &cm2);
    auto d = discretization(X0);
    if (!d)
        return fail("level 0 is not homotopically discrete");
    auto D = discrete_nfold(d->labels, n - 1);
    NFoldMap gs, gt, s0, t0;   // gamma d1, gamma d0, d1, d0 on X1
    for (int c = 0; c < X1.ncodes(); ++c) {
        s0.m.push_back(x.face(0, cm1[c], 1));
        t0.m.push_back(x.face(0, cm1[c], 0));
        gs.m.push_back(after(d->gamma.m[c], s0.m.back()));
        gt.m.push_back(after(d->gamma.m[c], t0.m.back()));
    }
    auto P2 = pullback_nfold(X1, X1, D, gt, gs);
    NFoldMap mu2;
    for (int c = 0; c < X2.ncodes(); ++c) {
        std::map<std::pair<int, int>, int> pos;
        for (std::size_t e = 0; e < P2.p.count(c); ++e)
            pos[{P2.pa.m[c][e], P2.pb.m[c][e]}] = int(e);
        std::vector<int> v;
        for (std::size_t z = 0; z < X2.count(c); ++z)
            v.push_back(pos.at({x.face(0, cm2[c], 2)[z], x.face(0, cm2[c], 0)[z]}));
        mu2.m.push_back(v);
    }
    std::string sub;
    if (!is_n_equivalence(X2, P2.p, mu2, &sub))
        return fail("Segal map at level 2: " + sub);
    // level 3, reconstructed strictly from composable triples
    auto Q = pullback_nfold(X1, X1, X0, t0, s0);
    NFoldMap qt = compose_maps(t0, Q.pb), qgt = compose_maps(gt, P2.pb);
    auto Q3 = pullback_nfold(Q.p, X1, X0, qt, s0);
    auto P3 = pullback_nfold(P2.p, X1, D, qgt, gs);
    NFoldMap mu3;
    for (int c = 0; c < Q3.p.ncodes(); ++c) {
        std::map<std::pair<int, int>, int> p2pos;
        for (std::size_t e = 0; e < P2.p.count(c); ++e)
            p2pos[{P2.pa.m[c][e], P2.pb.m[c][e]}] = int(e);
        std::map<std::pair<int, int>, int> p3pos;
        for (std::size_t e = 0; e < P3.p.count(c); ++e)
            p3pos[{P3.pa.m[c][e], P3.pb.m[c][e]}] = int(e);
        std::vector<int> v;
        for (std::size_t e = 0; e < Q3.p.count(c); ++e) {
            int q = Q3.pa.m[c][e], z = Q3.pb.m[c][e];
            int pair = p2pos.at({Q.pa.m[c][q], Q.pb.m[c][q]});
            v.push_back(p3pos.at({pair, z}));
        }
        mu3.m.push_back(v);
    }
    if (!is_n_equivalence(Q3.p, P3.p, mu3, &sub))
        return fail("Segal map at level 3: " + sub);
    return true;
}

NFoldCat discrete_last(const NFoldCat& z)
{
    int n = z.n + 1;
    NFoldCat x(n);
    int pz = pow3(z.n);
    for (int k = 0; k < x.ncodes(); ++k) {
        int c = k % pz, dl = k / pz;
        x.cells[k] = z.cells[c];
        for (int d = 0; d < z.n; ++d) {
            int dg = code_digit(c, d);
            for (int j = 0; j < 3; ++j)
                if (dg >= 1 && j <= dg)
                    x.face(d, k, j) = z.face(d, c, j);
            for (int j = 0; j < 2; ++j)
                if (dg <= 1 && j <= dg)
                    x.degen(d, k, j) = z.degen(d, c, j);
            if (dg == 1)
                x.inverse(d, k) = z.inverse(d, c);
        }
        auto id = iota_vec(z.count(c));
        for (int j = 0; j <= dl && dl >= 1; ++j)
            x.face(n - 1, k, j) = id;
        for (int j = 0; j <= dl && dl <= 1; ++j)
            x.degen(n - 1, k, j) = id;
        if (dl == 1)
            x.inverse(n - 1, k) = id;
    }
    return x;
}

Transfer pullback_transfer(const NFoldCat& z, const NFoldMap& r, const NFoldCat& x)
{
    auto t = truncate_p(x);
    std::string why;
    if (!is_n_equivalence(z, t.p, r, &why))
        throw std::invalid_argument("pullback_transfer: r is not an equivalence: " + why);
    auto dz = discrete_last(z), dp = discrete_last(t.p);
    NFoldMap dr;
    int pz = pow3(z.n);
    for (int k = 0; k < dz.ncodes(); ++k)
        dr.m.push_back(r.m[k % pz]);
    auto pb = pullback_nfold(dz, x, dp, dr, t.gamma);
    Transfer tr;
    tr.p = pb.p;
    tr.w = pb.pb;
    tr.weakly_globular = is_weakly_globular(tr.p).ok;
    tr.equivalence = is_n_equivalence(tr.p, x, tr.w);
    return tr;
}

std::string serialize_key(const NFoldCat& x)
{
    std::ostringstream os;
    os << x.n << ':';
    for (auto& c : x.cells)
        os << c.size() << ',';
    auto dump = [&](const std::vector<std::vector<int>>& v) {
        for (auto& m : v) {
            os << '|';
            for (int i : m)
                os << i << ',';
        }
    };
    dump(x.fmaps);
    dump(x.smaps);
    dump(x.imaps);
    return os.str();
}

}  // namespace tc
