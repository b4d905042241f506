#include "trackcoh/trackcat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace tc {

int TrackCat::compose(int a, int b, int c, int code, int g, int f) const
{
    auto& t = comp_table(a, b, c)[code];
    auto it = t.find(pair_key(g, f));
    return it == t.end() ? -1 : it->second;
}

int TrackCat::object(const std::string& s) const
{
    auto it = std::find(objects.begin(), objects.end(), s);
    return it == objects.end() ? -1 : int(it - objects.begin());
}

namespace {

std::vector<int> iota_vec(std::size_t n)
{
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

struct MapSlot {
    bool face;
    int dir, j, from, to;
};

// every structure map of an n-fold corner, with source and target codes
std::vector<MapSlot> map_slots(int n)
{
    std::vector<MapSlot> out;
    for (int k = 0; k < pow3(n); ++k)
        for (int d = 0; d < n; ++d) {
            int dg = code_digit(k, d);
            for (int j = 0; dg >= 1 && j <= dg; ++j)
                out.push_back({true, d, j, k, code_with(k, d, dg - 1)});
            for (int j = 0; dg <= 1 && j <= dg; ++j)
                out.push_back({false, d, j, k, code_with(k, d, dg + 1)});
        }
    return out;
}

const std::vector<int>& slot_map(const NFoldCat& x, const MapSlot& s)
{
    return s.face ? x.face(s.dir, s.from, s.j) : x.degen(s.dir, s.from, s.j);
}

std::vector<int>& slot_map(NFoldCat& x, const MapSlot& s)
{
    return s.face ? x.face(s.dir, s.from, s.j) : x.degen(s.dir, s.from, s.j);
}

}  // namespace

std::optional<std::string> TrackCat::audit(bool require_wg) const
{
    std::size_t no = nobj();
    if (homs.size() != no * no || unit.size() != no || comp.size() != no * no * no)
        return std::string("track category has the wrong number of hom-objects");
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b) {
            auto& h = hom(int(a), int(b));
            std::string where = "hom(" + objects[a] + "," + objects[b] + ")";
            if (h.n != n)
                return where + " has the wrong dimension";
            if (n == 0)
                continue;
            if (auto e = h.audit())
                return where + ": " + *e;
            if (require_wg) {
                auto wg = is_weakly_globular(h);
                if (!wg.ok)
                    return where + " is not weakly globular: " + wg.witness;
                if (!wg.groupoid)
                    return where + " is not a groupoid";
            }
        }
    auto slots = map_slots(n);
    for (std::size_t a = 0; a < no; ++a) {
        auto& h = hom(int(a), int(a));
        if (int(unit[a].size()) != ncodes())
            return "unit of " + objects[a] + " is incomplete";
        for (auto& s : slots)
            if (slot_map(h, s)[unit[a][s.from]] != unit[a][s.to])
                return "unit of " + objects[a] + " is not a map of n-fold objects";
    }
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t c = 0; c < no; ++c) {
                auto& f = hom(int(a), int(b));
                auto& g = hom(int(b), int(c));
                auto& h = hom(int(a), int(c));
                std::string where = "composition " + objects[a] + "->" + objects[b] + "->" + objects[c];
                for (int k = 0; k < ncodes(); ++k)
                    for (std::size_t x = 0; x < g.count(k); ++x)
                        for (std::size_t y = 0; y < f.count(k); ++y) {
                            int z = compose(int(a), int(b), int(c), k, int(x), int(y));
                            if (z < 0 || std::size_t(z) >= h.count(k))
                                return where + " is not total";
                        }
                for (auto& s : slots)
                    for (std::size_t x = 0; x < g.count(s.from); ++x)
                        for (std::size_t y = 0; y < f.count(s.from); ++y) {
                            int z = compose(int(a), int(b), int(c), s.from, int(x), int(y));
                            int w = compose(int(a), int(b), int(c), s.to, slot_map(g, s)[x], slot_map(f, s)[y]);
                            if (slot_map(h, s)[z] != w)
                                return where + " does not commute with the structure maps";
                        }
                for (int k = 0; k < ncodes(); ++k) {
                    if (a == b)
                        for (std::size_t x = 0; x < g.count(k); ++x)
                            if (compose(int(a), int(a), int(c), k, int(x), unit[a][k]) != int(x))
                                return "right unit law fails in " + where;
                    if (b == c)
                        for (std::size_t y = 0; y < f.count(k); ++y)
                            if (compose(int(a), int(b), int(b), k, unit[b][k], int(y)) != int(y))
                                return "left unit law fails in " + where;
                }
            }
    // the homs are Segal and composition commutes with the faces, so a cell at a
    // corner with a digit 2 is fixed by its faces: associativity at {0,1}^n suffices
    std::vector<int> binary;
    for (int k = 0; k < ncodes(); ++k) {
        bool ok = true;
        for (int d = 0; d < n; ++d)
            ok = ok && code_digit(k, d) <= 1;
        if (ok)
            binary.push_back(k);
    }
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t c = 0; c < no; ++c)
                for (std::size_t d = 0; d < no; ++d)
                    for (int k : binary) {
                        auto& f = hom(int(a), int(b));
                        auto& g = hom(int(b), int(c));
                        auto& h = hom(int(c), int(d));
                        for (std::size_t x = 0; x < h.count(k); ++x)
                            for (std::size_t y = 0; y < g.count(k); ++y)
                                for (std::size_t z = 0; z < f.count(k); ++z) {
                                    int l = compose(int(a), int(c), int(d), k, int(x),
                                                    compose(int(a), int(b), int(c), k, int(y), int(z)));
                                    int r = compose(int(a), int(b), int(d), k,
                                                    compose(int(b), int(c), int(d), k, int(x), int(y)), int(z));
                                    if (l != r)
                                        return "composition is not associative at " + objects[a] + "->" +
                                               objects[b] + "->" + objects[c] + "->" + objects[d];
                                }
                    }
    return std::nullopt;
}

TrackCat make_track(int n, std::vector<std::string> objects, std::vector<NFoldCat> homs,
                    std::vector<std::vector<int>> unit, const ComposeFn& compose)
{
    TrackCat x;
    x.n = n;
    x.objects = std::move(objects);
    x.homs = std::move(homs);
    x.unit = std::move(unit);
    std::size_t no = x.nobj();
    x.comp.assign(no * no * no, std::vector<std::unordered_map<std::uint64_t, int>>(x.ncodes()));
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t c = 0; c < no; ++c)
                for (int k = 0; k < x.ncodes(); ++k) {
                    auto& t = x.comp_table(int(a), int(b), int(c))[k];
                    for (std::size_t g = 0; g < x.hom(int(b), int(c)).count(k); ++g)
                        for (std::size_t f = 0; f < x.hom(int(a), int(b)).count(k); ++f) {
                            int z = compose(int(a), int(b), int(c), k, int(g), int(f));
                            if (z >= 0)
                                t[pair_key(int(g), int(f))] = z;
                        }
                }
    return x;
}

TrackMap identity_track_map(const TrackCat& x)
{
    TrackMap f;
    f.obj = iota_vec(x.nobj());
    for (auto& h : x.homs)
        f.hom.push_back(identity_map(h));
    return f;
}

std::optional<std::string> audit_track_map(const TrackCat& x, const TrackCat& y, const TrackMap& f)
{
    std::size_t no = x.nobj();
    if (f.obj.size() != no || f.hom.size() != no * no)
        return std::string("track map has the wrong shape");
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            if (auto e = audit_map(x.hom(int(a), int(b)), y.hom(f.obj[a], f.obj[b]), f.hom[a * no + b]))
                return "hom(" + x.objects[a] + "," + x.objects[b] + "): " + *e;
    for (std::size_t a = 0; a < no; ++a)
        for (int k = 0; k < x.ncodes(); ++k)
            if (f.hom[a * no + a].m[k][x.unit[a][k]] != y.unit[f.obj[a]][k])
                return "track map does not preserve the unit of " + x.objects[a];
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t c = 0; c < no; ++c)
                for (int k = 0; k < x.ncodes(); ++k)
                    for (std::size_t g = 0; g < x.hom(int(b), int(c)).count(k); ++g)
                        for (std::size_t h = 0; h < x.hom(int(a), int(b)).count(k); ++h) {
                            int z = x.compose(int(a), int(b), int(c), k, int(g), int(h));
                            int l = f.hom[a * no + c].m[k][z];
                            int r = y.compose(f.obj[a], f.obj[b], f.obj[c], k, f.hom[b * no + c].m[k][g],
                                              f.hom[a * no + b].m[k][h]);
                            if (l != r)
                                return std::string("track map does not preserve composition");
                        }
    return std::nullopt;
}

bool is_track_equivalence(const TrackCat& x, const TrackCat& y, const TrackMap& f, std::string* why)
{
    auto fail = [&](const std::string& s) {
        if (why)
            *why = s;
        return false;
    };
    std::size_t no = x.nobj();
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b) {
            std::string sub;
            if (!is_n_equivalence(x.hom(int(a), int(b)), y.hom(f.obj[a], f.obj[b]), f.hom[a * no + b], &sub))
                return fail("hom(" + x.objects[a] + "," + x.objects[b] + "): " + sub);
        }
    auto px = as_category(p0_truncate(x)), py = as_category(p0_truncate(y));
    auto pf = truncate_map(x, y, f, 0);
    FunctorMap F;
    F.obj = pf.obj;
    F.mor.assign(px.nmor(), -1);
    // morphisms of the p0 categories are laid out hom by hom
    std::vector<int> offx(no * no + 1, 0), offy(y.nobj() * y.nobj() + 1, 0);
    auto p0x = p0_truncate(x), p0y = p0_truncate(y);
    for (std::size_t i = 0; i < no * no; ++i)
        offx[i + 1] = offx[i] + int(p0x.homs[i].count(0));
    for (std::size_t i = 0; i < y.nobj() * y.nobj(); ++i)
        offy[i + 1] = offy[i] + int(p0y.homs[i].count(0));
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t i = 0; i < p0x.hom(int(a), int(b)).count(0); ++i)
                F.mor[offx[a * no + b] + i] =
                    offy[f.obj[a] * y.nobj() + f.obj[b]] + pf.hom[a * no + b].m[0][i];
    if (!is_essentially_surjective(px, py, F))
        return fail("not essentially surjective after p0");
    return true;
}

// ---------------------------------------------------------------------------

namespace {

NFoldCat point_nfold(int n) { return discrete_nfold({"1"}, n); }

}  // namespace

TrackCat track_discrete(const std::vector<std::string>& objects, int n)
{
    std::size_t no = objects.size();
    std::vector<NFoldCat> homs;
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            homs.push_back(a == b ? discrete_nfold({"1_" + objects[a]}, n) : empty_nfold(n));
    std::vector<std::vector<int>> unit(no, std::vector<int>(pow3(n), 0));
    return make_track(n, objects, std::move(homs), std::move(unit),
                      [](int a, int b, int c, int, int g, int f) { return (a == b) ? g : (b == c ? f : -1); });
}

TrackCat track_from_category(const FinCat& c, int n)
{
    std::size_t no = c.objects.size();
    std::vector<std::vector<int>> local(no * no);
    std::vector<int> pos(c.nmor());
    for (std::size_t f = 0; f < c.nmor(); ++f) {
        auto& v = local[c.src[f] * no + c.tgt[f]];
        pos[f] = int(v.size());
        v.push_back(int(f));
    }
    std::vector<NFoldCat> homs;
    for (std::size_t i = 0; i < no * no; ++i) {
        std::vector<std::string> labels;
        for (int f : local[i])
            labels.push_back(c.names[f]);
        homs.push_back(discrete_nfold(labels, n));
    }
    std::vector<std::vector<int>> unit(no);
    for (std::size_t a = 0; a < no; ++a)
        unit[a].assign(pow3(n), pos[c.ident[a]]);
    return make_track(n, c.objects.labels, std::move(homs), std::move(unit),
                      [&](int a, int b, int cc, int, int g, int f) {
                          int z = c.compose(local[b * no + cc][g], local[a * no + b][f]);
                          return z < 0 ? -1 : pos[z];
                      });
}

TrackCat track_T1()
{
    std::vector<std::string> objs = {"a", "b"};
    std::vector<NFoldCat> homs = {point_nfold(1), nfold_from_groupoid(indiscrete_groupoid({"u", "v"})),
                                  empty_nfold(1), point_nfold(1)};
    homs[0].cells.assign(3, {"1_a"});
    homs[3].cells.assign(3, {"1_b"});
    std::vector<std::vector<int>> unit = {{0, 0, 0}, {0, 0, 0}};
    return make_track(1, objs, std::move(homs), std::move(unit),
                      [](int a, int b, int c, int, int g, int f) { return (a == b) ? g : (b == c ? f : -1); });
}

TrackCat fatten_last(const TrackCat& x)
{
    std::size_t no = x.nobj();
    // precondition: every endo-hom consists of units and no two non-units compose
    for (std::size_t a = 0; a < no; ++a)
        for (int k = 0; k < x.ncodes(); ++k)
            if (x.hom(int(a), int(a)).count(k) != 1)
                throw std::invalid_argument("fatten_last: endo-hom of " + x.objects[a] + " is not trivial");
    auto eq = nfold_from_groupoid(indiscrete_groupoid({"s", "t"}));
    std::vector<NFoldCat> homs;
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b) {
            auto& h = x.hom(int(a), int(b));
            homs.push_back(a == b ? discrete_last(h) : external_product(h, eq));
        }
    std::vector<std::vector<int>> unit(no, std::vector<int>(pow3(x.n + 1), 0));
    int base = pow3(x.n);
    return make_track(x.n + 1, x.objects, std::move(homs), std::move(unit),
                      [&](int a, int b, int c, int k, int g, int f) {
                          if (a == b)
                              return g;
                          if (b == c)
                              return f;
                          // only units compose, so a != b != c cannot occur with non-empty homs
                          (void)k;
                          (void)base;
                          return -1;
                      });
}

TrackCat track_FAT2() { return fatten_last(track_T1()); }

TrackCat relabel_objects(const TrackCat& x, const std::vector<std::string>& names)
{
    TrackCat y = x;
    y.objects = names;
    return y;
}

// ---------------------------------------------------------------------------

InternalForm to_internal(const TrackCat& x)
{
    InternalForm r;
    r.n = x.n;
    r.objects = x.objects;
    std::size_t no = x.nobj();
    int nc = x.ncodes();
    r.arrows = NFoldCat(x.n);
    r.src.assign(nc, {});
    r.tgt.assign(nc, {});
    r.unit.assign(nc, std::vector<int>(no));
    r.comp.assign(nc, {});
    std::vector<std::vector<int>> off(nc, std::vector<int>(no * no + 1, 0));
    for (int k = 0; k < nc; ++k)
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b) {
                std::size_t i = a * no + b;
                auto& h = x.homs[i];
                off[k][i + 1] = off[k][i] + int(h.count(k));
                for (std::size_t c = 0; c < h.count(k); ++c) {
                    r.arrows.cells[k].push_back(h.cells[k][c]);
                    r.src[k].push_back(int(a));
                    r.tgt[k].push_back(int(b));
                }
            }
    for (auto& s : map_slots(x.n)) {
        auto& m = slot_map(r.arrows, s);
        for (std::size_t i = 0; i < no * no; ++i) {
            auto& hm = slot_map(x.homs[i], s);
            for (int v : hm)
                m.push_back(off[s.to][i] + v);
        }
    }
    for (int k = 0; k < nc; ++k)
        for (int d = 0; d < x.n; ++d) {
            if (code_digit(k, d) != 1)
                continue;
            bool all = true;
            for (auto& h : x.homs)
                if (h.inverse(d, k).size() != h.count(k))
                    all = false;
            if (!all)
                continue;
            auto& m = r.arrows.inverse(d, k);
            for (std::size_t i = 0; i < no * no; ++i)
                for (int v : x.homs[i].inverse(d, k))
                    m.push_back(off[k][i] + v);
        }
    r.face_obj.assign(r.arrows.fmaps.size(), {});
    r.degen_obj.assign(r.arrows.smaps.size(), {});
    for (auto& s : map_slots(x.n)) {
        std::size_t idx = s.face ? (std::size_t(s.from) * x.n + s.dir) * 3 + s.j : (std::size_t(s.from) * x.n + s.dir) * 2 + s.j;
        (s.face ? r.face_obj : r.degen_obj)[idx] = iota_vec(no);
    }
    for (int k = 0; k < nc; ++k) {
        for (std::size_t a = 0; a < no; ++a)
            r.unit[k][a] = off[k][a * no + a] + x.unit[a][k];
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b)
                for (std::size_t c = 0; c < no; ++c)
                    for (auto& [key, z] : x.comp_table(int(a), int(b), int(c))[k]) {
                        int g = int(key >> 32), f = int(key & 0xffffffffu);
                        r.comp[k][pair_key(off[k][b * no + c] + g, off[k][a * no + b] + f)] = off[k][a * no + c] + z;
                    }
    }
    return r;
}

TrackCat from_internal(const InternalForm& f)
{
    std::size_t no = f.objects.size();
    auto slots = map_slots(f.n);
    for (auto& s : slots) {
        std::size_t idx = s.face ? (std::size_t(s.from) * f.n + s.dir) * 3 + s.j : (std::size_t(s.from) * f.n + s.dir) * 2 + s.j;
        auto& act = (s.face ? f.face_obj : f.degen_obj)[idx];
        if (act != iota_vec(no))
            throw std::invalid_argument("from_internal: a structure map moves objects");
        auto& m = slot_map(f.arrows, s);
        for (std::size_t e = 0; e < m.size(); ++e)
            if (f.src[s.to][m[e]] != f.src[s.from][e] || f.tgt[s.to][m[e]] != f.tgt[s.from][e])
                throw std::invalid_argument("from_internal: a structure map changes endpoints");
    }
    int nc = pow3(f.n);
    std::vector<std::vector<int>> local(nc, std::vector<int>());
    std::vector<std::vector<std::vector<int>>> members(nc, std::vector<std::vector<int>>(no * no));
    for (int k = 0; k < nc; ++k) {
        local[k].resize(f.arrows.count(k));
        for (std::size_t e = 0; e < f.arrows.count(k); ++e) {
            auto& v = members[k][f.src[k][e] * no + f.tgt[k][e]];
            local[k][e] = int(v.size());
            v.push_back(int(e));
        }
    }
    std::vector<NFoldCat> homs(no * no, NFoldCat(f.n));
    for (std::size_t i = 0; i < no * no; ++i) {
        for (int k = 0; k < nc; ++k)
            for (int e : members[k][i])
                homs[i].cells[k].push_back(f.arrows.cells[k][e]);
        for (auto& s : slots) {
            auto& m = slot_map(homs[i], s);
            for (int e : members[s.from][i])
                m.push_back(local[s.to][slot_map(f.arrows, s)[e]]);
        }
        for (int k = 0; k < nc; ++k)
            for (int d = 0; d < f.n; ++d) {
                auto& iv = f.arrows.inverse(d, k);
                if (iv.empty())
                    continue;
                auto& m = homs[i].inverse(d, k);
                for (int e : members[k][i])
                    m.push_back(local[k][iv[e]]);
            }
    }
    std::vector<std::vector<int>> unit(no, std::vector<int>(nc));
    for (int k = 0; k < nc; ++k)
        for (std::size_t a = 0; a < no; ++a)
            unit[a][k] = local[k][f.unit[k][a]];
    return make_track(f.n, f.objects, std::move(homs), std::move(unit),
                      [&](int a, int b, int c, int k, int g, int h) {
                          auto it = f.comp[k].find(pair_key(members[k][b * no + c][g], members[k][a * no + b][h]));
                          if (it == f.comp[k].end())
                              return -1;
                          if (f.src[k][it->second] != a || f.tgt[k][it->second] != c)
                              throw std::invalid_argument("from_internal: composite has the wrong endpoints");
                          return local[k][it->second];
                      });
}

LevelNerve nerve_levels(const TrackCat& x)
{
    LevelNerve r;
    r.n = x.n;
    std::size_t no = x.nobj();
    int nc = x.ncodes();
    std::vector<std::vector<int>> off(nc, std::vector<int>(no * no + 1, 0));
    for (int k = 0; k < nc; ++k) {
        FinCat c;
        c.objects.labels = x.objects;
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b) {
                off[k][a * no + b + 1] = off[k][a * no + b] + int(x.hom(int(a), int(b)).count(k));
                for (auto& l : x.hom(int(a), int(b)).cells[k])
                    c.add_morphism(l, int(a), int(b));
            }
        for (std::size_t a = 0; a < no; ++a)
            c.ident.push_back(off[k][a * no + a] + x.unit[a][k]);
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b)
                for (std::size_t cc = 0; cc < no; ++cc)
                    for (auto& [key, z] : x.comp_table(int(a), int(b), int(cc))[k])
                        c.set_comp(off[k][b * no + cc] + int(key >> 32), off[k][a * no + b] + int(key & 0xffffffffu),
                                   off[k][a * no + cc] + z);
        r.level.push_back(std::move(c));
    }
    r.fmaps.assign(std::size_t(nc) * x.n * 3, {});
    r.smaps.assign(std::size_t(nc) * x.n * 2, {});
    for (auto& s : map_slots(x.n)) {
        std::size_t idx = s.face ? (std::size_t(s.from) * x.n + s.dir) * 3 + s.j : (std::size_t(s.from) * x.n + s.dir) * 2 + s.j;
        auto& m = (s.face ? r.fmaps : r.smaps)[idx];
        for (std::size_t i = 0; i < no * no; ++i)
            for (int v : slot_map(x.homs[i], s))
                m.push_back(off[s.to][i] + v);
    }
    return r;
}

LevelNerve nerve_levels(const InternalForm& f)
{
    LevelNerve r;
    r.n = f.n;
    for (int k = 0; k < pow3(f.n); ++k) {
        FinCat c;
        c.objects.labels = f.objects;
        for (std::size_t e = 0; e < f.arrows.count(k); ++e)
            c.add_morphism(f.arrows.cells[k][e], f.src[k][e], f.tgt[k][e]);
        c.ident = f.unit[k];
        c.comp = f.comp[k];
        r.level.push_back(std::move(c));
    }
    r.fmaps = f.arrows.fmaps;
    r.smaps = f.arrows.smaps;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string grid_key(const std::vector<int>& g)
{
    std::string s;
    for (int v : g)
        s += std::to_string(v) + ',';
    return s;
}

std::vector<int> extents(const std::vector<int>& index)
{
    std::vector<int> e;
    for (int k : index)
        e.push_back(std::max(k, 1));
    return e;
}

std::vector<int> strides(const std::vector<int>& ext)
{
    std::vector<int> s(ext.size());
    int m = 1;
    for (std::size_t d = 0; d < ext.size(); ++d) {
        s[d] = m;
        m *= ext[d];
    }
    return s;
}

int volume(const std::vector<int>& ext)
{
    int m = 1;
    for (int e : ext)
        m *= e;
    return m;
}

std::vector<int> position(int p, const std::vector<int>& ext)
{
    std::vector<int> q(ext.size());
    for (std::size_t d = 0; d < ext.size(); ++d) {
        q[d] = p % ext[d];
        p /= ext[d];
    }
    return q;
}

int flat(const std::vector<int>& q, const std::vector<int>& ext)
{
    int p = 0, m = 1;
    for (std::size_t d = 0; d < ext.size(); ++d) {
        p += q[d] * m;
        m *= ext[d];
    }
    return p;
}

int compose_in_dir(const NFoldCat& x, int dir, int code, int a, int b)
{
    // composite of a then b in direction dir, code has digit 1 in dir
    int k2 = code_with(code, dir, 2);
    for (std::size_t z = 0; z < x.count(k2); ++z)
        if (x.face(dir, k2, 2)[z] == a && x.face(dir, k2, 0)[z] == b)
            return x.face(dir, k2, 1)[z];
    throw std::runtime_error("compose_in_dir: pair is not composable");
}

}  // namespace

MultiLevel::MultiLevel(const NFoldCat& x, std::vector<int> idx) : index(std::move(idx))
{
    int n = x.n;
    std::vector<int> dg(n);
    for (int d = 0; d < n; ++d)
        dg[d] = std::min(index[d], 1);
    code = code_from_digits(dg);
    auto ext = extents(index);
    int vol = volume(ext);
    std::vector<int> grid(vol);
    // backtracking over positions in row-major order
    std::function<void(int)> fill = [&](int p) {
        if (p == vol) {
            lookup_[grid_key(grid)] = int(elems.size());
            elems.push_back(grid);
            return;
        }
        auto q = position(p, ext);
        for (std::size_t c = 0; c < x.count(code); ++c) {
            bool ok = true;
            for (int d = 0; d < n && ok; ++d) {
                if (index[d] < 2 || q[d] == 0)
                    continue;
                auto q2 = q;
                q2[d]--;
                int prev = grid[flat(q2, ext)];
                if (x.face(d, code, 0)[prev] != x.face(d, code, 1)[c])
                    ok = false;
            }
            if (ok) {
                grid[p] = int(c);
                fill(p + 1);
            }
        }
    };
    fill(0);
}

int MultiLevel::find(const std::vector<int>& g) const
{
    auto it = lookup_.find(grid_key(g));
    return it == lookup_.end() ? -1 : it->second;
}

std::vector<int> MultiLevel::face(const NFoldCat& x, int dir, int i, int e) const
{
    auto& g = elems[e];
    int K = index[dir];
    auto ext = extents(index);
    if (K == 1) {
        std::vector<int> out;
        for (int c : g)
            out.push_back(x.face(dir, code, i == 0 ? 0 : 1)[c]);
        return out;
    }
    auto next = index;
    next[dir] = K - 1;
    auto ext2 = extents(next);
    std::vector<int> out(volume(ext2));
    for (int p = 0; p < int(out.size()); ++p) {
        auto q = position(p, ext2);
        if (i == 0) {
            q[dir] += 1;
            out[p] = g[flat(q, ext)];
        } else if (i == K) {
            out[p] = g[flat(q, ext)];
        } else if (q[dir] < i - 1) {
            out[p] = g[flat(q, ext)];
        } else if (q[dir] > i - 1) {
            q[dir] += 1;
            out[p] = g[flat(q, ext)];
        } else {
            auto q2 = q;
            q2[dir] += 1;
            out[p] = compose_in_dir(x, dir, code, g[flat(q, ext)], g[flat(q2, ext)]);
        }
    }
    return out;
}

std::vector<int> MultiLevel::degen(const NFoldCat& x, int dir, int i, int e) const
{
    auto& g = elems[e];
    int K = index[dir];
    if (K == 0) {
        std::vector<int> out;
        for (int c : g)
            out.push_back(x.degen(dir, code, 0)[c]);
        return out;
    }
    auto ext = extents(index);
    auto next = index;
    next[dir] = K + 1;
    auto ext2 = extents(next);
    int k0 = code_with(code, dir, 0);
    std::vector<int> out(volume(ext2));
    for (int p = 0; p < int(out.size()); ++p) {
        auto q = position(p, ext2);
        if (q[dir] < i) {
            out[p] = g[flat(q, ext)];
        } else if (q[dir] > i) {
            q[dir] -= 1;
            out[p] = g[flat(q, ext)];
        } else {
            int vertex;
            if (i < K)
                vertex = x.face(dir, code, 1)[g[flat(q, ext)]];
            else {
                q[dir] = K - 1;
                vertex = x.face(dir, code, 0)[g[flat(q, ext)]];
            }
            out[p] = x.degen(dir, k0, 0)[vertex];
        }
    }
    return out;
}

std::optional<std::string> SOCat::audit() const
{
    for (std::size_t m = 0; m < level.size(); ++m) {
        if (auto e = level[m].audit())
            return "level " + std::to_string(m) + ": " + *e;
        if (level[m].objects.labels != objects)
            return "level " + std::to_string(m) + " changes the object set";
    }
    auto ident = iota_vec(objects.size());
    for (std::size_t m = 1; m < level.size(); ++m)
        for (std::size_t i = 0; i <= m; ++i)
            if (auto e = audit_functor(level[m], level[m - 1], {ident, face[m][i]}))
                return "face " + std::to_string(i) + " at level " + std::to_string(m) + ": " + *e;
    for (std::size_t m = 0; m + 1 < level.size(); ++m)
        for (std::size_t i = 0; i <= m; ++i)
            if (auto e = audit_functor(level[m], level[m + 1], {ident, degen[m][i]}))
                return "degeneracy " + std::to_string(i) + " at level " + std::to_string(m) + ": " + *e;
    return std::nullopt;
}

SOCat diag_D(const TrackCat& x, int top)
{
    SOCat r;
    r.objects = x.objects;
    std::size_t no = x.nobj();
    int n = x.n;
    std::map<std::pair<std::size_t, std::vector<int>>, MultiLevel> cache;
    auto ml = [&](std::size_t h, const std::vector<int>& idx) -> const MultiLevel& {
        auto key = std::make_pair(h, idx);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, MultiLevel(x.homs[h], idx)).first;
        return it->second;
    };
    std::vector<std::vector<int>> off(top + 1, std::vector<int>(no * no + 1, 0));
    for (int m = 0; m <= top; ++m) {
        FinCat c;
        c.objects.labels = x.objects;
        std::vector<int> idx(n, m);
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b) {
                std::size_t h = a * no + b;
                auto& L = ml(h, idx);
                off[m][h + 1] = off[m][h] + int(L.size());
                for (auto& g : L.elems) {
                    std::string s;
                    for (std::size_t j = 0; j < g.size(); ++j)
                        s += (j ? "|" : "") + x.homs[h].cells[L.code][g[j]];
                    c.add_morphism(s, int(a), int(b));
                }
            }
        for (std::size_t a = 0; a < no; ++a) {
            auto& L = ml(a * no + a, idx);
            std::vector<int> g(L.elems.empty() ? 0 : L.elems[0].size(), x.unit[a][L.code]);
            c.ident.push_back(off[m][a * no + a] + L.find(g));
        }
        for (std::size_t a = 0; a < no; ++a)
            for (std::size_t b = 0; b < no; ++b)
                for (std::size_t cc = 0; cc < no; ++cc) {
                    auto& Lf = ml(a * no + b, idx);
                    auto& Lg = ml(b * no + cc, idx);
                    auto& Lh = ml(a * no + cc, idx);
                    for (std::size_t g = 0; g < Lg.size(); ++g)
                        for (std::size_t f = 0; f < Lf.size(); ++f) {
                            std::vector<int> out(Lg.elems[g].size());
                            for (std::size_t p = 0; p < out.size(); ++p)
                                out[p] = x.compose(int(a), int(b), int(cc), Lg.code, Lg.elems[g][p], Lf.elems[f][p]);
                            int z = Lh.find(out);
                            if (z < 0)
                                throw std::runtime_error("diag_D: composite grid missing");
                            c.set_comp(off[m][b * no + cc] + int(g), off[m][a * no + b] + int(f), off[m][a * no + cc] + z);
                        }
                }
        r.level.push_back(std::move(c));
    }
    // diagonal faces and degeneracies apply the same operator in every direction
    r.face.assign(top + 1, {});
    r.degen.assign(top + 1, {});
    for (int m = 0; m <= top; ++m) {
        if (m >= 1)
            for (int i = 0; i <= m; ++i) {
                std::vector<int> out;
                for (std::size_t h = 0; h < no * no; ++h) {
                    std::vector<int> idx(n, m);
                    auto& L0 = ml(h, idx);
                    for (std::size_t e = 0; e < L0.size(); ++e) {
                        int cur = int(e);
                        auto cidx = idx;
                        for (int d = 0; d < n; ++d) {
                            auto& L = ml(h, cidx);
                            auto g = L.face(x.homs[h], d, i, cur);
                            cidx[d] = m - 1;
                            cur = ml(h, cidx).find(g);
                        }
                        out.push_back(off[m - 1][h] + cur);
                    }
                }
                r.face[m].push_back(out);
            }
        if (m < top)
            for (int i = 0; i <= m; ++i) {
                std::vector<int> out;
                for (std::size_t h = 0; h < no * no; ++h) {
                    std::vector<int> idx(n, m);
                    auto& L0 = ml(h, idx);
                    for (std::size_t e = 0; e < L0.size(); ++e) {
                        int cur = int(e);
                        auto cidx = idx;
                        for (int d = 0; d < n; ++d) {
                            auto& L = ml(h, cidx);
                            auto g = L.degen(x.homs[h], d, i, cur);
                            cidx[d] = m + 1;
                            cur = ml(h, cidx).find(g);
                        }
                        out.push_back(off[m + 1][h] + cur);
                    }
                }
                r.degen[m].push_back(out);
            }
    }
    return r;
}

// ---------------------------------------------------------------------------

TrackTruncation truncate_homs(const TrackCat& x, int k)
{
    if (k < 0 || k > x.n)
        throw std::invalid_argument("truncate_homs: bad target dimension");
    std::size_t no = x.nobj();
    std::vector<NFoldCat> homs;
    TrackTruncation r;
    r.gamma.obj = iota_vec(no);
    for (auto& h : x.homs) {
        NFoldCat cur = h;
        NFoldMap g = identity_map(h);
        while (cur.n > k) {
            auto t = truncate_p(cur);
            NFoldMap ng;
            for (int K = 0; K < h.ncodes(); ++K)
                ng.m.push_back([&] {
                    std::vector<int> v;
                    int c = K % pow3(cur.n);
                    for (int val : g.m[K])
                        v.push_back(t.gamma.m[c][val]);
                    return v;
                }());
            g = ng;
            cur = t.p;
        }
        homs.push_back(cur);
        r.gamma.hom.push_back(g);
    }
    int nc = pow3(k);
    // representatives: first cell of each class at each code
    std::vector<std::vector<std::vector<int>>> rep(no * no, std::vector<std::vector<int>>(nc));
    for (std::size_t i = 0; i < no * no; ++i)
        for (int c = 0; c < nc; ++c) {
            rep[i][c].assign(homs[i].count(c), -1);
            for (std::size_t e = 0; e < x.homs[i].count(c); ++e) {
                int cl = r.gamma.hom[i].m[c][e];
                if (rep[i][c][cl] < 0)
                    rep[i][c][cl] = int(e);
            }
        }
    std::vector<std::vector<int>> unit(no, std::vector<int>(nc));
    for (std::size_t a = 0; a < no; ++a)
        for (int c = 0; c < nc; ++c)
            unit[a][c] = r.gamma.hom[a * no + a].m[c][x.unit[a][c]];
    r.p = make_track(k, x.objects, std::move(homs), std::move(unit),
                     [&](int a, int b, int cc, int c, int g, int f) {
                         int z = x.compose(a, b, cc, c, rep[b * no + cc][c][g], rep[a * no + b][c][f]);
                         return z < 0 ? -1 : r.gamma.hom[a * no + cc].m[c][z];
                     });
    return r;
}

TrackCat p1_truncate(const TrackCat& x) { return x.n <= 1 ? x : truncate_homs(x, 1).p; }
TrackCat p0_truncate(const TrackCat& x) { return truncate_homs(x, 0).p; }

FinCat as_category(const TrackCat& x)
{
    if (x.n != 0)
        throw std::invalid_argument("as_category: hom-objects are not sets");
    return nerve_levels(x).level[0];
}

TrackMap truncate_map(const TrackCat& x, const TrackCat& y, const TrackMap& f, int k)
{
    auto tx = truncate_homs(x, k), ty = truncate_homs(y, k);
    std::size_t no = x.nobj(), ny = y.nobj();
    TrackMap r;
    r.obj = f.obj;
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b) {
            std::size_t i = a * no + b, j = f.obj[a] * ny + f.obj[b];
            NFoldMap m;
            for (int c = 0; c < pow3(k); ++c) {
                std::vector<int> v(tx.p.homs[i].count(c), -1);
                for (std::size_t e = 0; e < x.homs[i].count(c); ++e)
                    v[tx.gamma.hom[i].m[c][e]] = ty.gamma.hom[j].m[c][f.hom[i].m[c][e]];
                m.m.push_back(v);
            }
            r.hom.push_back(m);
        }
    return r;
}

}  // namespace tc
