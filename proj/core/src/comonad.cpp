#include "trackcoh/comonad.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace tc {

namespace {

NFoldCat eq_nfold() { return nfold_from_groupoid(indiscrete_groupoid({"s", "t"})); }

// letter tuples of the cells of EQ{s,t} at levels 0..2, read through the faces
struct EqTable {
    NFoldCat eq = eq_nfold();
    std::vector<std::vector<std::vector<int>>> tup;   // [level][cell]
    std::map<std::vector<int>, int> at[3];

    EqTable()
    {
        tup.resize(3);
        for (std::size_t e = 0; e < eq.count(0); ++e)
            tup[0].push_back({eq.cells[0][e] == "s" ? 0 : 1});
        for (std::size_t e = 0; e < eq.count(1); ++e)
            tup[1].push_back({tup[0][eq.face(0, 1, 1)[e]][0], tup[0][eq.face(0, 1, 0)[e]][0]});
        for (std::size_t e = 0; e < eq.count(2); ++e) {
            auto& f = tup[1][eq.face(0, 2, 2)[e]];
            auto& g = tup[1][eq.face(0, 2, 0)[e]];
            tup[2].push_back({f[0], f[1], g[1]});
        }
        for (int j = 0; j < 3; ++j)
            for (std::size_t e = 0; e < tup[j].size(); ++e)
                at[j][tup[j][e]] = int(e);
    }
};

const EqTable& eq_table()
{
    static const EqTable t;
    return t;
}

}  // namespace

NFoldCat ell(const NFoldCat& x) { return external_product(x, eq_table().eq); }

NFoldCat arrow_part(const NFoldCat& y) { return y.slice(y.n - 1, 1); }

NFoldMap ell_unit(const NFoldCat& x)
{
    auto& et = eq_table();
    int st = et.at[1].at({0, 1});
    int n1 = int(et.eq.count(1));
    NFoldMap f;
    for (int k = 0; k < x.ncodes(); ++k) {
        std::vector<int> m;
        for (std::size_t c = 0; c < x.count(k); ++c)
            m.push_back(int(c) * n1 + st);
        f.m.push_back(std::move(m));
    }
    return f;
}

NFoldMap ell_counit(const NFoldCat& y)
{
    if (y.n < 1)
        throw std::invalid_argument("ell_counit: needs at least one direction");
    auto& et = eq_table();
    int last = y.n - 1, p = pow3(last);
    NFoldMap f;
    f.m.resize(pow3(y.n));
    for (int k = 0; k < p; ++k) {
        int k1 = k + p, k2 = k + 2 * p;
        auto one = [&](int c, int a, int b) {
            if (a == 0 && b == 1)
                return c;
            if (a == 1 && b == 0) {
                auto& inv = y.inverse(last, k1);
                if (inv.empty())
                    throw std::invalid_argument("ell_counit: last direction has no inverses");
                return inv[c];
            }
            return y.degen(last, k, 0)[y.face(last, k1, a == 0 ? 1 : 0)[c]];
        };
        std::map<std::pair<int, int>, int> seg;
        for (std::size_t z = 0; z < y.count(k2); ++z)
            seg[{y.face(last, k2, 2)[z], y.face(last, k2, 0)[z]}] = int(z);
        int nc = int(y.count(k1));
        for (int j = 0; j < 3; ++j) {
            auto& m = f.m[k + j * p];
            for (int c = 0; c < nc; ++c)
                for (auto& t : et.tup[j]) {
                    if (j == 0)
                        m.push_back(y.face(last, k1, t[0] == 0 ? 1 : 0)[c]);
                    else if (j == 1)
                        m.push_back(one(c, t[0], t[1]));
                    else {
                        auto it = seg.find({one(c, t[0], t[1]), one(c, t[1], t[2])});
                        if (it == seg.end())
                            throw std::invalid_argument("ell_counit: composite missing");
                        m.push_back(it->second);
                    }
                }
        }
    }
    return f;
}

std::optional<std::string> audit_ell_adjunction(const NFoldCat& x, const NFoldCat& y)
{
    auto& et = eq_table();
    auto lx = ell(x);
    auto eta = ell_unit(x);
    if (auto e = audit_map(x, arrow_part(lx), eta))
        return "unit: " + *e;
    auto uy = arrow_part(y);
    auto eps = ell_counit(y);
    if (auto e = audit_map(ell(uy), y, eps))
        return "counit: " + *e;

    // counit at ell(x) after ell(unit) is the identity of ell(x)
    int p = pow3(x.n);
    NFoldMap leta;
    leta.m.resize(lx.ncodes());
    for (int k = 0; k < p; ++k)
        for (int j = 0; j < 3; ++j) {
            int nj = int(et.eq.count(j));
            for (std::size_t c = 0; c < x.count(k); ++c)
                for (int e = 0; e < nj; ++e)
                    leta.m[k + j * p].push_back(eta.m[k][c] * nj + e);
        }
    auto t1 = compose_maps(ell_counit(lx), leta);
    if (t1.m != identity_map(lx).m)
        return std::string("first triangle identity fails");

    // arrow part of the counit after the unit at the arrow part is the identity
    auto eta_u = ell_unit(uy);
    NFoldMap ueps;
    int q = pow3(uy.n);
    for (int k = 0; k < q; ++k)
        ueps.m.push_back(eps.m[k + q]);
    auto t2 = compose_maps(ueps, eta_u);
    if (t2.m != identity_map(uy).m)
        return std::string("second triangle identity fails");
    return std::nullopt;
}

std::optional<std::string> SplitPair::audit() const
{
    if (q.size() != z0.size() || t.size() != pi0.size())
        return std::string("split pair: map sizes do not match");
    for (int v : q)
        if (v < 0 || v >= int(pi0.size()))
            return std::string("split pair: q out of range");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0 || t[i] >= int(z0.size()))
            return std::string("split pair: section out of range");
        if (q[t[i]] != int(i))
            return "split pair: section is not split at " + pi0[i];
    }
    return std::nullopt;
}

FinGroupoid fattening(const SplitPair& y)
{
    if (auto e = y.audit())
        throw std::invalid_argument(*e);
    EqRelGroupoid r;
    r.objects.labels = y.z0;
    for (std::size_t a = 0; a < y.z0.size(); ++a)
        for (std::size_t b = 0; b < y.z0.size(); ++b)
            if (y.q[a] == y.q[b])
                r.relation.push_back({int(a), int(b)});
    return r.as_groupoid();
}

// ---- free squares --------------------------------------------------------

namespace {

using Word = std::vector<std::pair<int, int>>;   // (copy, non-identity morphism), first letter first

// append one letter, merging with a last letter of the same copy; when a merge
// gives an identity the letter disappears and the next push merges across it
void push_letter(const FinCat& c, Word& w, int copy, int f)
{
    if (c.is_identity(f))
        return;
    if (!w.empty() && w.back().first == copy) {
        int g = c.compose(f, w.back().second);
        if (g < 0)
            throw std::invalid_argument("free_square: composition table incomplete");
        w.pop_back();
        if (!c.is_identity(g))
            w.push_back({copy, g});
        return;
    }
    w.push_back({copy, f});
}

Word concat(const FinCat& c, const Word& f, const Word& g)
{
    Word w = f;
    for (auto& [copy, m] : g)
        push_letter(c, w, copy, m);
    return w;
}

}  // namespace

FreeSquare free_square(const FinCat& c, int max_words)
{
    FreeSquare fs;
    fs.cat.objects = c.objects;
    int no = int(c.objects.size());
    std::map<std::pair<int, Word>, int> ids;
    std::vector<Word> words;
    std::vector<int> wsrc;
    // an invertible arrow gives alternating words of every length; stop before they eat memory
    std::size_t letters = 0;
    auto add = [&](int s, const Word& w) {
        auto key = std::make_pair(s, w);
        auto it = ids.find(key);
        if (it != ids.end())
            return it->second;
        int t = w.empty() ? s : c.tgt[w.back().second];
        std::string name;
        if (w.empty())
            name = "1_" + c.objects.labels[s];
        for (auto& [copy, m] : w)
            name += (name.empty() ? "" : ".") + c.names[m] + "#" + std::to_string(copy);
        int id = fs.cat.add_morphism(name, s, t);
        letters += w.size();
        if (int(fs.cat.nmor()) > max_words || letters > 16 * std::size_t(max_words))
            throw std::length_error("free_square: more than " + std::to_string(max_words) +
                                    " words or their letters; the free square is infinite or too large");
        ids.emplace(key, id);
        words.push_back(w);
        fs.words.push_back(w);
        wsrc.push_back(s);
        int f = c.ident[s];
        for (auto& [copy, m] : w)
            f = c.compose(m, f);
        fs.fold.push_back(f);
        return id;
    };
    fs.cat.ident.resize(no);
    for (int o = 0; o < no; ++o)
        fs.cat.ident[o] = add(o, {});
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t f = 0; f < c.nmor(); ++f) {
            if (c.is_identity(int(f)) || c.src[f] != fs.cat.tgt[i])
                continue;
            for (int copy = 0; copy < 2; ++copy) {
                Word w = words[i];
                push_letter(c, w, copy, int(f));
                add(wsrc[i], w);
            }
        }
    std::vector<std::vector<int>> by_tgt(no);
    for (std::size_t f = 0; f < fs.cat.nmor(); ++f)
        by_tgt[fs.cat.tgt[f]].push_back(int(f));
    for (std::size_t g = 0; g < fs.cat.nmor(); ++g)
        for (int f : by_tgt[fs.cat.src[g]]) {
            auto it = ids.find({wsrc[f], concat(c, words[f], words[g])});
            if (it == ids.end())
                throw std::logic_error("free_square: word set not closed");
            fs.cat.set_comp(int(g), f, it->second);
        }
    return fs;
}

namespace {

// levelwise categories over a fixed object set, with morphism maps in the NFoldCat slots
struct Levels {
    int n = 0;
    std::vector<FinCat> cat;
    std::vector<std::vector<int>> fm, sm, im;
    std::vector<int> base;   // cat[0] -> A
};

std::string tuple_name(const FinCat& c, const std::vector<int>& t)
{
    std::string s = "<";
    for (std::size_t i = 0; i < t.size(); ++i)
        s += (i ? "|" : "") + c.names[t[i]];
    return s + ">";
}

Levels add_direction(const Levels& old, int max_words)
{
    int P = pow3(old.n), nn = old.n + 1;
    Levels r;
    r.n = nn;
    r.cat.resize(3 * P);
    r.fm.resize(std::size_t(3 * P) * nn * 3);
    r.sm.resize(std::size_t(3 * P) * nn * 2);
    r.im.resize(std::size_t(3 * P) * nn);
    std::vector<FreeSquare> fs;
    for (int k = 0; k < P; ++k)
        fs.push_back(free_square(old.cat[k], max_words));
    // tuples of parallel words with a common fold
    std::vector<std::vector<std::vector<int>>> tup(3 * P);
    std::vector<std::map<std::vector<int>, int>> at(3 * P);
    for (int k = 0; k < P; ++k) {
        auto& F = fs[k].cat;
        std::map<std::tuple<int, int, int>, std::vector<int>> groups;
        for (std::size_t w = 0; w < F.nmor(); ++w)
            groups[{F.src[w], F.tgt[w], fs[k].fold[w]}].push_back(int(w));
        for (int j = 0; j < 3; ++j) {
            int K = k + j * P;
            auto& C = r.cat[K];
            C.objects = F.objects;
            for (auto& [key, g] : groups) {
                std::vector<int> idx(j + 1, 0);
                while (true) {
                    std::vector<int> t;
                    for (int i : idx)
                        t.push_back(g[i]);
                    int id = C.add_morphism(tuple_name(F, t), std::get<0>(key), std::get<1>(key));
                    at[K][t] = id;
                    tup[K].push_back(t);
                    int p = j;
                    while (p >= 0 && ++idx[p] == int(g.size()))
                        idx[p--] = 0;
                    if (p < 0)
                        break;
                }
            }
            for (auto o : F.ident)
                C.ident.push_back(at[K].at(std::vector<int>(j + 1, o)));
            std::vector<std::vector<int>> by_tgt(C.objects.size());
            for (std::size_t f = 0; f < C.nmor(); ++f)
                by_tgt[C.tgt[f]].push_back(int(f));
            for (std::size_t g = 0; g < C.nmor(); ++g)
                for (int f : by_tgt[C.src[g]]) {
                    std::vector<int> t;
                    for (int i = 0; i <= j; ++i)
                        t.push_back(F.compose(tup[K][g][i], tup[K][f][i]));
                    C.set_comp(int(g), f, at[K].at(t));
                }
        }
    }
    auto slot_f = [&](int K, int d, int i) -> std::vector<int>& { return r.fm[(std::size_t(K) * nn + d) * 3 + i]; };
    auto slot_s = [&](int K, int d, int i) -> std::vector<int>& { return r.sm[(std::size_t(K) * nn + d) * 2 + i]; };
    // the new direction
    for (int k = 0; k < P; ++k) {
        auto tmap = [&](int K, int K2, auto op) {
            std::vector<int> m;
            for (auto& t : tup[K])
                m.push_back(at[K2].at(op(t)));
            return m;
        };
        for (int j = 1; j < 3; ++j)
            for (int i = 0; i <= j; ++i)
                slot_f(k + j * P, old.n, i) = tmap(k + j * P, k + (j - 1) * P, [&](std::vector<int> t) {
                    t.erase(t.begin() + i);
                    return t;
                });
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i <= j; ++i)
                slot_s(k + j * P, old.n, i) = tmap(k + j * P, k + (j + 1) * P, [&](std::vector<int> t) {
                    t.insert(t.begin() + i, t[i]);
                    return t;
                });
        r.im[std::size_t(k + P) * nn + old.n] = tmap(k + P, k + P, [](std::vector<int> t) {
            std::swap(t[0], t[1]);
            return t;
        });
    }
    // old directions: extend each functor to the free squares, then act on tuples
    std::vector<std::map<std::pair<int, Word>, int>> wlook(P);
    for (int k = 0; k < P; ++k)
        for (std::size_t w = 0; w < fs[k].cat.nmor(); ++w)
            wlook[k][{fs[k].cat.src[w], fs[k].words[w]}] = int(w);
    auto extend = [&](int k, int k2, const std::vector<int>& F) {
        std::vector<int> m;
        for (std::size_t w = 0; w < fs[k].cat.nmor(); ++w) {
            Word img;
            for (auto& [copy, f] : fs[k].words[w])
                push_letter(old.cat[k2], img, copy, F[f]);
            m.push_back(wlook[k2].at({fs[k].cat.src[w], img}));
        }
        return m;
    };
    auto on_tuples = [&](int K, int K2, const std::vector<int>& wm) {
        std::vector<int> m;
        for (auto t : tup[K]) {
            for (auto& v : t)
                v = wm[v];
            m.push_back(at[K2].at(t));
        }
        return m;
    };
    int on = old.n;
    for (int k = 0; k < P; ++k)
        for (int d = 0; d < on; ++d) {
            int dg = code_digit(k, d);
            for (int i = 0; i <= dg && dg >= 1; ++i) {
                int k2 = code_with(k, d, dg - 1);
                auto wm = extend(k, k2, old.fm[(std::size_t(k) * on + d) * 3 + i]);
                for (int j = 0; j < 3; ++j)
                    slot_f(k + j * P, d, i) = on_tuples(k + j * P, k2 + j * P, wm);
            }
            for (int i = 0; i <= dg && dg <= 1; ++i) {
                int k2 = code_with(k, d, dg + 1);
                auto wm = extend(k, k2, old.sm[(std::size_t(k) * on + d) * 2 + i]);
                for (int j = 0; j < 3; ++j)
                    slot_s(k + j * P, d, i) = on_tuples(k + j * P, k2 + j * P, wm);
            }
            if (dg == 1) {
                auto wm = extend(k, k, old.im[std::size_t(k) * on + d]);
                for (int j = 0; j < 3; ++j)
                    r.im[std::size_t(k + j * P) * nn + d] = on_tuples(k + j * P, k + j * P, wm);
            }
        }
    for (auto& t : tup[0])
        r.base.push_back(old.base[fs[0].fold[t[0]]]);
    return r;
}

}  // namespace

EllCategory ell_category(const FinCat& a, int n, int max_words)
{
    if (n < 1)
        throw std::invalid_argument("ell_category: n must be positive");
    Levels lv;
    lv.cat = {a};
    for (std::size_t f = 0; f < a.nmor(); ++f)
        lv.base.push_back(int(f));
    for (int i = 0; i < n; ++i)
        lv = add_direction(lv, max_words);

    int no = int(a.objects.size()), nc = pow3(n);
    // local numbering of each level inside each hom
    std::vector<std::vector<int>> pos(nc);
    std::vector<std::vector<std::vector<int>>> glob(nc, std::vector<std::vector<int>>(no * no));
    for (int K = 0; K < nc; ++K) {
        auto& C = lv.cat[K];
        pos[K].resize(C.nmor());
        for (std::size_t f = 0; f < C.nmor(); ++f) {
            auto& g = glob[K][C.src[f] * no + C.tgt[f]];
            pos[K][f] = int(g.size());
            g.push_back(int(f));
        }
    }
    std::vector<NFoldCat> homs;
    EllCategory out;
    for (int h = 0; h < no * no; ++h) {
        NFoldCat x(n);
        for (int K = 0; K < nc; ++K)
            for (int f : glob[K][h])
                x.cells[K].push_back(lv.cat[K].names[f]);
        auto restrict = [&](const std::vector<int>& m, int K, int K2) {
            std::vector<int> r;
            for (int f : glob[K][h]) {
                int g = m[f];
                if (glob[K2][h].empty() || pos[K2][g] >= int(glob[K2][h].size()) || glob[K2][h][pos[K2][g]] != g)
                    throw std::logic_error("ell_category: structure map leaves the hom");
                r.push_back(pos[K2][g]);
            }
            return r;
        };
        for (int K = 0; K < nc; ++K)
            for (int d = 0; d < n; ++d) {
                int dg = code_digit(K, d);
                for (int i = 0; i <= dg && dg >= 1; ++i)
                    x.face(d, K, i) = restrict(lv.fm[(std::size_t(K) * n + d) * 3 + i], K, code_with(K, d, dg - 1));
                for (int i = 0; i <= dg && dg <= 1; ++i)
                    x.degen(d, K, i) = restrict(lv.sm[(std::size_t(K) * n + d) * 2 + i], K, code_with(K, d, dg + 1));
                if (dg == 1)
                    x.inverse(d, K) = restrict(lv.im[std::size_t(K) * n + d], K, K);
            }
        homs.push_back(std::move(x));
        std::vector<int> b;
        for (int f : glob[0][h])
            b.push_back(lv.base[f]);
        out.base.push_back(std::move(b));
    }
    std::vector<std::vector<int>> unit(no, std::vector<int>(nc));
    for (int o = 0; o < no; ++o)
        for (int K = 0; K < nc; ++K)
            unit[o][K] = pos[K][lv.cat[K].ident[o]];
    out.track = make_track(n, a.objects.labels, std::move(homs), std::move(unit),
                           [&](int x, int y, int z, int K, int g, int f) {
                               int gg = glob[K][y * no + z][g], ff = glob[K][x * no + y][f];
                               int r = lv.cat[K].compose(gg, ff);
                               return r < 0 ? -1 : pos[K][r];
                           });
    return out;
}

std::optional<std::string> audit_ell_category(const EllCategory& l, const FinCat& a)
{
    auto& x = l.track;
    int no = int(x.nobj());
    if (no != int(a.objects.size()))
        return std::string("object sets differ");
    if (auto e = x.audit(false))
        return *e;
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j) {
            auto hd = is_homotopically_discrete(x.hom(i, j));
            if (!hd.ok)
                return "hom (" + x.objects[i] + "," + x.objects[j] + ") is not homotopically discrete: " + hd.witness;
        }
    auto tr = truncate_homs(x, 0);
    // class -> morphism of A, constant on classes and bijective onto A(i, j)
    std::vector<std::vector<int>> cls_base(no * no);
    for (int h = 0; h < no * no; ++h) {
        auto& cb = cls_base[h];
        cb.assign(tr.p.homs[h].count(0), -1);
        for (std::size_t c = 0; c < x.homs[h].count(0); ++c) {
            int k = tr.gamma.hom[h].m[0][c], b = l.base[h][c];
            if (cb[k] >= 0 && cb[k] != b)
                return "p0 class " + tr.p.homs[h].cells[0][k] + " folds to two morphisms";
            cb[k] = b;
        }
        std::set<int> seen(cb.begin(), cb.end());
        std::size_t want = 0;
        for (std::size_t f = 0; f < a.nmor(); ++f)
            want += a.src[f] * no + a.tgt[f] == h;
        if (seen.size() != cb.size() || cb.size() != want)
            return "p0 hom (" + x.objects[h / no] + "," + x.objects[h % no] + ") is not in bijection with A";
    }
    for (int i = 0; i < no; ++i)
        for (int j = 0; j < no; ++j)
            for (int k = 0; k < no; ++k)
                for (std::size_t g = 0; g < tr.p.hom(j, k).count(0); ++g)
                    for (std::size_t f = 0; f < tr.p.hom(i, j).count(0); ++f) {
                        int gf = tr.p.compose(i, j, k, 0, int(g), int(f));
                        int want = a.compose(cls_base[j * no + k][g], cls_base[i * no + j][f]);
                        if (gf < 0 || cls_base[i * no + k][gf] != want)
                            return std::string("p0 composition disagrees with A");
                    }
    return std::nullopt;
}

// ---- the symbolic tower --------------------------------------------------

Tower::Tower(const TrackCat& x, int bound_) : x_(x)
{
    if (x.n < 1)
        throw std::invalid_argument("Tower: needs hom-objects of dimension at least 1");
    if (bound_ < 1)
        throw std::invalid_argument("Tower: bound must be positive");
    n = x.n;
    bound = bound_;
    nwords = 1 << (2 * n);
    objects = x.objects;
    for (int d = 0; d < n; ++d) {
        code11_ += pow3(d);
        id_word |= 1 << (2 * d);
    }
    int no = int(x.nobj());
    lv_.resize(1);
    auto& l0 = lv_[0];
    base_off_.assign(no, std::vector<int>(no));
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) {
            base_off_[a][b] = int(l0.src.size());
            for (std::size_t c = 0; c < x.hom(a, b).count(code11_); ++c) {
                l0.src.push_back(a);
                l0.tgt.push_back(b);
                l0.size.push_back(1);
                base_hom.push_back(a * no + b);
                base_local.push_back(int(c));
            }
        }
    l0.off.assign(l0.src.size() + 1, 0);
    l0.closed = true;
    for (int a = 0; a < no; ++a)
        base_ident_.push_back(base_off_[a][a] + x.unit[a][code11_]);

    wcomp_.resize(std::size_t(nwords) * nwords);
    for (int v = 0; v < nwords; ++v)
        for (int w = 0; w < nwords; ++w) {
            int r = 0;
            for (int d = 0; d < n; ++d)
                for (int pos = 0; pos < 2; ++pos)
                    if (word_letter(v, d, word_letter(w, d, pos)))
                        r |= 1 << (2 * d + (pos ? 0 : 1));
            wcomp_[v * nwords + w] = r;
        }

    base_wop_.assign(nwords, std::vector<int>(l0.count()));
    for (int w = 0; w < nwords; ++w)
        for (std::size_t y = 0; y < l0.count(); ++y) {
            auto& h = x.homs[base_hom[y]];
            int c = base_local[y];
            for (int d = 0; d < n; ++d) {
                int val = (w >> (2 * d)) & 3;
                int c0 = code_with(code11_, d, 0);
                if (val == 2) {
                    if (h.inverse(d, code11_).empty())
                        throw std::invalid_argument("Tower: hom-object without inverses");
                    c = h.inverse(d, code11_)[c];
                } else if (val == 0)
                    c = h.degen(d, c0, 0)[h.face(d, code11_, 1)[c]];
                else if (val == 3)
                    c = h.degen(d, c0, 0)[h.face(d, code11_, 0)[c]];
            }
            base_wop_[w][y] = base_off_[l0.src[y]][l0.tgt[y]] + c;
        }
}

std::vector<std::pair<int, int>> Tower::children(int m, int e) const
{
    auto& l = lv_[m];
    return {l.kids.begin() + l.off[e], l.kids.begin() + l.off[e + 1]};
}

int Tower::word_sign(int w, int from_dir, int to_dir) const
{
    int s = 1;
    for (int d = from_dir; d < to_dir; ++d) {
        int val = (w >> (2 * d)) & 3;
        if (val == 0 || val == 3)
            return 0;
        if (val == 2)
            s = -s;
    }
    return s;
}

bool Tower::base_is_identity(int y) const
{
    auto& l0 = lv_[0];
    return l0.src[y] == l0.tgt[y] && base_ident_[l0.src[y]] == y;
}

int Tower::base_compose(int g, int f) const
{
    auto& l0 = lv_[0];
    int a = l0.src[f], b = l0.tgt[f], c = l0.tgt[g];
    if (l0.src[g] != b)
        throw std::invalid_argument("base_compose: not composable");
    int z = x_.compose(a, b, c, code11_, base_local[g], base_local[f]);
    if (z < 0)
        throw std::logic_error("base_compose: composite missing");
    return base_off_[a][c] + z;
}

std::uint64_t Tower::hash_(int s, int t, const std::pair<int, int>* k, std::size_t len) const
{
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ (std::uint64_t(std::uint32_t(s)) << 32 | std::uint32_t(t));
    auto mix = [&](std::uint64_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
    };
    for (std::size_t i = 0; i < len; ++i)
        mix(std::uint64_t(std::uint32_t(k[i].first)) << 32 | std::uint32_t(k[i].second));
    mix(len);
    return h;
}

int Tower::find(int m, int s, int t, const std::vector<std::pair<int, int>>& kids) const
{
    if (m >= int(lv_.size()))
        return -1;
    auto& l = lv_[m];
    auto h = hash_(s, t, kids.data(), kids.size());
    auto [lo, hi] = l.index.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        int e = it->second;
        if (l.src[e] != s || l.tgt[e] != t || l.off[e + 1] - l.off[e] != kids.size())
            continue;
        if (std::equal(kids.begin(), kids.end(), l.kids.begin() + l.off[e]))
            return e;
    }
    return -1;
}

int Tower::add_(int m, int s, int t, const std::vector<std::pair<int, int>>& kids, int sz, std::uint64_t h)
{
    auto& l = lv_[m];
    if (l.off.empty())
        l.off.push_back(0);
    int e = int(l.src.size());
    l.src.push_back(s);
    l.tgt.push_back(t);
    l.size.push_back(sz);
    l.kids.insert(l.kids.end(), kids.begin(), kids.end());
    l.off.push_back(std::uint32_t(l.kids.size()));
    l.index.emplace(h, e);
    return e;
}

int Tower::intern(int m, int s, int t, const std::vector<std::pair<int, int>>& kids)
{
    if (m < 1)
        throw std::invalid_argument("intern: level 0 is fixed");
    if (m >= int(lv_.size()))
        lv_.resize(m + 1);
    int e = find(m, s, t, kids);
    if (e >= 0)
        return e;
    int sz = 0;
    for (auto& [y, w] : kids)
        sz += lv_[m - 1].size[y];
    if (kids.empty())
        sz = 1;
    if (lv_[m].closed) {
        std::string d = "level " + std::to_string(m) + " [";
        for (std::size_t i = 0; i < kids.size(); ++i)
            d += (i ? " " : "") + describe(m - 1, kids[i].first);
        throw TruncationOverflow(d + "]");
    }
    return add_(m, s, t, kids, sz, hash_(s, t, kids.data(), kids.size()));
}

void Tower::enumerate(int m)
{
    if (m < 1)
        return;
    if (m >= int(lv_.size()))
        lv_.resize(m + 1);
    if (m - 1 >= 1 && !lv_[m - 1].closed)
        enumerate(m - 1);
    if (lv_[m].closed)
        return;
    int no = int(objects.size());
    std::vector<std::vector<int>> bysrc(no);
    for (std::size_t y = 0; y < lv_[m - 1].count(); ++y)
        bysrc[lv_[m - 1].src[y]].push_back(int(y));
    // smallest first, so the scan stops at the first generator that does not fit
    for (auto& v : bysrc)
        std::stable_sort(v.begin(), v.end(), [&](int a, int b) { return lv_[m - 1].size[a] < lv_[m - 1].size[b]; });
    std::vector<std::pair<int, int>> kids;
    std::function<void(int, int, int)> rec = [&](int o, int cur, int used) {
        for (int y : bysrc[cur]) {
            int sz = lv_[m - 1].size[y], t = lv_[m - 1].tgt[y];
            if (used + sz > bound)
                break;
            for (int w = 0; w < nwords; ++w) {
                kids.push_back({y, w});
                intern(m, o, t, kids);
                rec(o, t, used + sz);
                kids.pop_back();
            }
        }
    };
    for (int o = 0; o < no; ++o) {
        intern(m, o, o, {});
        rec(o, o, 0);
    }
    lv_[m].closed = true;
}

void Tower::ensure_memo_(int m)
{
    auto& l = lv_[m];
    std::size_t c = l.count();
    if (l.face_memo.size() < std::size_t(m))
        l.face_memo.resize(m);
    if (l.degen_memo.size() < std::size_t(m))
        l.degen_memo.resize(m);
    for (auto& v : l.face_memo)
        if (v.size() < c)
            v.resize(c, -1);
    for (auto& v : l.degen_memo)
        if (v.size() < c)
            v.resize(c, -1);
    if (l.wrap_memo.size() < c)
        l.wrap_memo.resize(c, -1);
}

int Tower::wordop(int m, int e, int w)
{
    if (m == 0)
        return base_wop_[w][e];
    auto k = children(m, e);
    for (auto& [y, v] : k)
        v = word_compose(v, w);
    return intern(m, src(m, e), tgt(m, e), k);
}

int Tower::face(int m, int e, int i)
{
    if (m < 1 || i < 0 || i > m - 1)
        throw std::invalid_argument("face: index out of range");
    ensure_memo_(m);
    int r = lv_[m].face_memo[i][e];
    if (r >= 0)
        return r;
    auto k = children(m, e);
    int s = src(m, e), t = tgt(m, e);
    if (i == 0 && m == 1) {
        r = base_ident_[s];
        bool first = true;
        for (auto& [y, w] : k) {
            int c = base_wop_[w][y];
            r = first ? c : base_compose(c, r);
            first = false;
        }
    } else if (i == 0) {
        std::vector<std::pair<int, int>> nk;
        for (auto& [y, w] : k) {
            auto& l = lv_[m - 1];
            for (auto j = l.off[y]; j < l.off[y + 1]; ++j)
                nk.push_back({l.kids[j].first, word_compose(l.kids[j].second, w)});
        }
        r = intern(m - 1, s, t, nk);
    } else {
        for (auto& [y, w] : k)
            y = face(m - 1, y, i - 1);
        r = intern(m - 1, s, t, k);
    }
    lv_[m].face_memo[i][e] = r;
    return r;
}

int Tower::wrap(int m, int e)
{
    ensure_memo_(m);
    int r = lv_[m].wrap_memo[e];
    if (r >= 0)
        return r;
    r = intern(m + 1, src(m, e), tgt(m, e), {{e, id_word}});
    lv_[m].wrap_memo[e] = r;
    return r;
}

int Tower::degen(int m, int e, int i)
{
    if (m < 1 || i < 0 || i > m - 1)
        throw std::invalid_argument("degen: index out of range");
    ensure_memo_(m);
    int r = lv_[m].degen_memo[i][e];
    if (r >= 0)
        return r;
    auto k = children(m, e);
    for (auto& [y, w] : k)
        y = i == 0 ? wrap(m - 1, y) : degen(m - 1, y, i - 1);
    r = intern(m + 1, src(m, e), tgt(m, e), k);
    lv_[m].degen_memo[i][e] = r;
    return r;
}

bool Tower::degenerate(int m, int e)
{
    if (m < 1)
        return false;
    if (wrap(m - 1, face(m, e, 0)) == e)
        return true;
    for (int j = 0; j + 2 <= m; ++j)
        if (degen(m - 1, face(m, e, j), j) == e)
            return true;
    return false;
}

std::string Tower::describe(int m, int e) const
{
    if (m == 0) {
        auto& h = x_.homs[base_hom[e]];
        return objects[lv_[0].src[e]] + "->" + objects[lv_[0].tgt[e]] + ":" + h.cells[code11_][base_local[e]];
    }
    auto& l = lv_[m];
    std::string s = "[";
    if (l.off[e] == l.off[e + 1])
        s += "1_" + objects[l.src[e]];
    for (auto j = l.off[e]; j < l.off[e + 1]; ++j) {
        auto [y, w] = l.kids[j];
        s += (j > l.off[e] ? " " : "") + describe(m - 1, y) + "^";
        for (int d = 0; d < n; ++d)
            s += std::string(d ? "," : "") + "st"[word_letter(w, d, 0)] + "st"[word_letter(w, d, 1)];
    }
    return s + "]";
}

// ---- audits -------------------------------------------------------------

namespace {

void fail(LawReport& r, const std::string& w)
{
    if (r.ok) {
        r.ok = false;
        r.witness = w;
    }
}

}  // namespace

LawReport comonad_laws(Tower& t, bool all_paths)
{
    LawReport r;
    std::vector<int> elems;
    if (all_paths) {
        t.enumerate(1);
        for (std::size_t e = 0; e < t.count(1); ++e)
            elems.push_back(int(e));
    } else {
        for (std::size_t y = 0; y < t.count(0); ++y)
            for (int w = 0; w < t.nwords; ++w)
                elems.push_back(t.intern(1, t.src(0, int(y)), t.tgt(0, int(y)), {{int(y), w}}));
    }
    for (int e : elems) {
        int dl = t.degen(1, e, 0);
        ++r.checked;
        if (t.face(2, dl, 0) != e)
            fail(r, "counit law (left) at " + t.describe(1, e));
        if (t.face(2, dl, 1) != e)
            fail(r, "counit law (right) at " + t.describe(1, e));
        if (t.degen(2, dl, 0) != t.degen(2, dl, 1))
            fail(r, "coassociativity at " + t.describe(1, e));
        if (!r.ok)
            break;
    }
    return r;
}

LawReport simplicial_identities(Tower& t, int depth)
{
    LawReport r;
    t.enumerate(depth + 1);
    // resolution level s lives at tower level s + 1
    for (int s = 0; s <= depth && r.ok; ++s) {
        int m = s + 1;
        for (std::size_t ee = 0; ee < t.count(m) && r.ok; ++ee) {
            int e = int(ee);
            auto where = [&](const std::string& id) { return id + " at level " + std::to_string(s) + " on " + t.describe(m, e); };
            // faces
            for (int j = 1; j <= s && s >= 2; ++j)
                for (int i = 0; i < j; ++i) {
                    ++r.checked;
                    if (t.face(m - 1, t.face(m, e, j), i) != t.face(m - 1, t.face(m, e, i), j - 1))
                        fail(r, where("d" + std::to_string(i) + "d" + std::to_string(j)));
                }
            // augmentation equalises the two faces
            if (s == 1) {
                ++r.checked;
                if (t.face(1, t.face(2, e, 0), 0) != t.face(1, t.face(2, e, 1), 0))
                    fail(r, where("augmentation"));
            }
            // faces against degeneracies, staying inside the enumerated levels
            if (s + 1 <= depth)
                for (int j = 0; j <= s; ++j) {
                    int z = t.degen(m, e, j);
                    for (int i = 0; i <= s + 1; ++i) {
                        ++r.checked;
                        int lhs = t.face(m + 1, z, i), rhs;
                        if (i < j)
                            rhs = t.degen(m - 1, t.face(m, e, i), j - 1);
                        else if (i == j || i == j + 1)
                            rhs = e;
                        else
                            rhs = t.degen(m - 1, t.face(m, e, i - 1), j);
                        if (lhs != rhs)
                            fail(r, where("d" + std::to_string(i) + "s" + std::to_string(j)));
                    }
                }
            if (s + 2 <= depth)
                for (int j = 0; j <= s; ++j)
                    for (int i = 0; i <= j; ++i) {
                        ++r.checked;
                        if (t.degen(m + 1, t.degen(m, e, j), i) != t.degen(m + 1, t.degen(m, e, i), j + 1))
                            fail(r, where("s" + std::to_string(i) + "s" + std::to_string(j)));
                    }
        }
    }
    return r;
}

std::size_t path_count_oracle(const Tower& t, int m)
{
    int no = int(t.objects.size());
    // f[o][r]: paths out of o with total size at most r, the empty one included
    std::vector<std::vector<std::size_t>> f(no, std::vector<std::size_t>(t.bound + 1, 0));
    for (int r = 0; r <= t.bound; ++r)
        for (int o = 0; o < no; ++o) {
            std::size_t c = 1;
            for (std::size_t y = 0; y < t.count(m - 1); ++y) {
                int sz = t.size(m - 1, int(y));
                if (t.src(m - 1, int(y)) == o && sz <= r)
                    c += std::size_t(t.nwords) * f[t.tgt(m - 1, int(y))][r - sz];
            }
            f[o][r] = c;
        }
    std::size_t total = 0;
    for (int o = 0; o < no; ++o)
        total += f[o][t.bound];
    return total;
}

LawReport freeness_audit(Tower& t, int m)
{
    LawReport r;
    t.enumerate(m);
    std::set<std::tuple<int, int, std::vector<std::pair<int, int>>>> seen;
    for (std::size_t ee = 0; ee < t.count(m); ++ee) {
        int e = int(ee);
        auto k = t.children(m, e);
        ++r.checked;
        if (!seen.insert({t.src(m, e), t.tgt(m, e), k}).second)
            fail(r, "two elements with the same decomposition: " + t.describe(m, e));
        if (k.empty()) {
            if (t.src(m, e) != t.tgt(m, e))
                fail(r, "empty path with distinct endpoints");
            continue;
        }
        int cur = t.src(m, e);
        for (auto& [y, w] : k) {
            if (t.src(m - 1, y) != cur)
                fail(r, "generators do not chain in " + t.describe(m, e));
            cur = t.tgt(m - 1, y);
            // every generator is itself an element
            if (t.find(m, t.src(m - 1, y), t.tgt(m - 1, y), {{y, w}}) < 0)
                fail(r, "generator missing for " + t.describe(m, e));
        }
        if (cur != t.tgt(m, e))
            fail(r, "path ends at the wrong object: " + t.describe(m, e));
    }
    std::size_t want = path_count_oracle(t, m);
    if (want != t.count(m))
        fail(r, "path count " + std::to_string(t.count(m)) + ", oracle " + std::to_string(want));
    return r;
}

// ---- bounded K(X) --------------------------------------------------------

BoundedK materialize_K(const TrackCat& x, int bound)
{
    if (bound < 1)
        throw std::invalid_argument("materialize_K: bound must be positive");
    int n = x.n, no = int(x.nobj()), nc = pow3(n);
    int code11 = 0;
    for (int d = 0; d < n; ++d)
        code11 += pow3(d);
    BoundedK out;
    out.objects = x.objects;
    out.bound = bound;
    // generators: (hom, local cell)
    std::vector<std::pair<int, int>> gens;
    std::vector<std::vector<int>> out_of(no);
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b)
            for (std::size_t c = 0; c < x.hom(a, b).count(code11); ++c) {
                out_of[a].push_back(int(gens.size()));
                gens.push_back({a * no + b, int(c)});
            }
    // a path at code K: generator ids and per-generator word bits, direction d
    // occupying k_d + 1 bits from offset off_d
    using Path = std::vector<std::pair<int, int>>;
    std::vector<std::vector<int>> offs(nc);
    std::vector<int> nbits(nc);
    for (int K = 0; K < nc; ++K) {
        int o = 0;
        for (int d = 0; d < n; ++d) {
            offs[K].push_back(o);
            o += code_digit(K, d) + 1;
        }
        nbits[K] = o;
    }
    auto letters = [&](int K, int bits, int d) {
        std::vector<int> l;
        for (int p = 0; p <= code_digit(K, d); ++p)
            l.push_back((bits >> (offs[K][d] + p)) & 1);
        return l;
    };
    auto word_name = [&](int K, int bits) {
        std::string s;
        for (int d = 0; d < n; ++d) {
            s += d ? "," : "";
            for (int v : letters(K, bits, d))
                s += "st"[v];
        }
        return s;
    };
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b) {
            NFoldCat h(n);
            std::vector<std::vector<Path>> paths(nc);
            std::vector<std::map<Path, int>> look(nc);
            for (int K = 0; K < nc; ++K) {
                Path cur;
                std::function<void(int)> rec = [&](int o) {
                    if (o == b) {
                        look[K][cur] = int(paths[K].size());
                        paths[K].push_back(cur);
                        std::string nm = cur.empty() ? "1_" + x.objects[a] : "";
                        for (std::size_t i = 0; i < cur.size(); ++i) {
                            auto [hm, c] = gens[cur[i].first];
                            nm += (i ? "." : "") + x.homs[hm].cells[code11][c] + "^" + word_name(K, cur[i].second);
                        }
                        h.cells[K].push_back(nm);
                    }
                    if (int(cur.size()) == bound)
                        return;
                    for (int g : out_of[o])
                        for (int w = 0; w < (1 << nbits[K]); ++w) {
                            cur.push_back({g, w});
                            rec(gens[g].first % no);
                            cur.pop_back();
                        }
                };
                rec(a);
            }
            // letterwise structure maps
            auto remap = [&](int K, int K2, int d, auto op) {
                std::vector<int> m;
                for (auto& p : paths[K]) {
                    Path q = p;
                    for (auto& [g, w] : q) {
                        int nw = 0;
                        for (int e = 0; e < n; ++e) {
                            auto l = letters(K, w, e);
                            if (e == d)
                                l = op(l);
                            for (std::size_t i = 0; i < l.size(); ++i)
                                nw |= l[i] << (offs[K2][e] + int(i));
                        }
                        w = nw;
                    }
                    m.push_back(look[K2].at(q));
                }
                return m;
            };
            for (int K = 0; K < nc; ++K)
                for (int d = 0; d < n; ++d) {
                    int dg = code_digit(K, d);
                    for (int i = 0; i <= dg && dg >= 1; ++i)
                        h.face(d, K, i) = remap(K, code_with(K, d, dg - 1), d, [i](std::vector<int> l) {
                            l.erase(l.begin() + i);
                            return l;
                        });
                    for (int i = 0; i <= dg && dg <= 1; ++i)
                        h.degen(d, K, i) = remap(K, code_with(K, d, dg + 1), d, [i](std::vector<int> l) {
                            l.insert(l.begin() + i, l[i]);
                            return l;
                        });
                    if (dg == 1)
                        h.inverse(d, K) = remap(K, K, d, [](std::vector<int> l) {
                            std::swap(l[0], l[1]);
                            return l;
                        });
                }
            out.homs.push_back(std::move(h));
        }
    return out;
}

void check_composition_closure(const TrackCat& x, int bound)
{
    if (bound >= 2)
        return;
    int n = x.n, no = int(x.nobj());
    int code11 = 0;
    for (int d = 0; d < n; ++d)
        code11 += pow3(d);
    for (int a = 0; a < no; ++a)
        for (int b = 0; b < no; ++b)
            for (int c = 0; c < no; ++c)
                for (std::size_t f = 0; f < x.hom(a, b).count(code11); ++f) {
                    if (a == b && int(f) == x.unit[a][code11])
                        continue;
                    for (std::size_t g = 0; g < x.hom(b, c).count(code11); ++g) {
                        if (b == c && int(g) == x.unit[b][code11])
                            continue;
                        throw TruncationOverflow("[" + x.hom(a, b).cells[code11][f] + " " +
                                                 x.hom(b, c).cells[code11][g] + "] has length 2 > bound " +
                                                 std::to_string(bound));
                    }
                }
}

// ---- aspherical spot check -----------------------------------------------

SpotData spot_data(Tower& t, int a, int b, int top)
{
    SpotData d;
    t.enumerate(top);
    d.cells.resize(top + 1);
    d.faces.resize(top + 1);
    std::vector<std::unordered_map<int, int>> pos(top + 1);
    for (int l = 0; l <= top; ++l)
        for (std::size_t e = 0; e < t.count(l); ++e)
            if (t.src(l, int(e)) == a && t.tgt(l, int(e)) == b) {
                pos[l][int(e)] = int(d.cells[l].size());
                d.cells[l].push_back(int(e));
            }
    for (int l = 1; l <= top; ++l) {
        d.faces[l].resize(l);
        for (int i = 0; i < l; ++i)
            for (int e : d.cells[l])
                d.faces[l][i].push_back(pos[l - 1].at(t.face(l, e, i)));
    }
    return d;
}

bool aspherical_spot_check(const SpotData& d, std::string* why)
{
    auto bad = [&](const std::string& s) {
        if (why)
            *why = s;
        return false;
    };
    int top = int(d.cells.size()) - 1;
    if (top < 2)
        return bad("needs levels up to 2");
    // simplicial identities among the faces
    for (int l = 2; l <= top; ++l)
        for (std::size_t p = 0; p < d.cells[l].size(); ++p)
            for (int j = 1; j < l; ++j)
                for (int i = 0; i < j; ++i)
                    if (d.faces[l - 1][i][d.faces[l][j][p]] != d.faces[l - 1][j - 1][d.faces[l][i][p]])
                        return bad("face identity d" + std::to_string(i) + "d" + std::to_string(j) + " fails at level " +
                                   std::to_string(l) + ", position " + std::to_string(p));
    // augmentation onto the base cells
    std::vector<char> hit(d.cells[0].size(), 0);
    for (int v : d.faces[1][0])
        hit[v] = 1;
    for (std::size_t c = 0; c < hit.size(); ++c)
        if (!hit[c])
            return bad("augmentation misses base cell " + std::to_string(c));
    // each fibre of the augmentation is connected through level-2 edges
    std::vector<int> parent(d.cells[1].size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = int(i);
    std::function<int(int)> root = [&](int v) { return parent[v] == v ? v : parent[v] = root(parent[v]); };
    for (std::size_t p = 0; p < d.cells[2].size(); ++p)
        parent[root(d.faces[2][0][p])] = root(d.faces[2][1][p]);
    std::map<int, int> comp_of_fibre;
    for (std::size_t v = 0; v < d.cells[1].size(); ++v) {
        int fib = d.faces[1][0][v];
        auto [it, fresh] = comp_of_fibre.emplace(fib, root(int(v)));
        if (!fresh && it->second != root(int(v)))
            return bad("fibre over base cell " + std::to_string(fib) + " is not connected");
    }
    return true;
}

}  // namespace tc
