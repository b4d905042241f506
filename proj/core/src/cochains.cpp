#include <algorithm>
#include <map>

#include "trackcoh/cohomology.hpp"

namespace tc {

const char* kind_name(CochainKind k)
{
    switch (k) {
    case CochainKind::AQ: return "aq";
    case CochainKind::Alg: return "alg";
    case CochainKind::Left: return "left";
    case CochainKind::Mid: return "mid";
    }
    return "?";
}

std::size_t SparseMatrix::nnz() const
{
    std::size_t k = 0;
    for (auto& r : row)
        k += r.size();
    return k;
}

IntMatrix SparseMatrix::dense() const
{
    IntMatrix m = zero_matrix(std::size_t(rows), std::size_t(cols));
    for (int i = 0; i < rows; ++i)
        for (auto& [j, v] : row[i])
            m[i][j] = v;
    return m;
}

namespace {

void push_sorted(std::vector<std::pair<int, long long>>& r, std::map<int, long long>& acc)
{
    for (auto& [c, v] : acc)
        if (v != 0)
            r.emplace_back(c, v);
}

}  // namespace

SparseMatrix sparse_product(const SparseMatrix& b, const SparseMatrix& a)
{
    SparseMatrix c;
    c.rows = b.rows;
    c.cols = a.cols;
    c.row.resize(std::size_t(b.rows));
    for (int i = 0; i < b.rows; ++i) {
        std::map<int, long long> acc;
        for (auto& [k, v] : b.row[i])
            for (auto& [j, w] : a.row[k])
                acc[j] += v * w;
        push_sorted(c.row[i], acc);
    }
    return c;
}

std::optional<std::string> audit_dd(const FinCochainComplex& c)
{
    for (std::size_t s = 0; s + 1 < c.d.size(); ++s) {
        SparseMatrix p = sparse_product(c.d[s + 1], c.d[s]);
        for (int i = 0; i < p.rows; ++i)
            if (!p.row[i].empty())
                return "d" + std::to_string(s + 1) + " d" + std::to_string(s) + " != 0 at row " + std::to_string(i);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

CochainModel::CochainModel(Tower& t, CochainKind k, int top_level) : tower(t), kind(k), top(top_level)
{
    copies = kind == CochainKind::Mid ? 2 : 1;
    for (int m = 1; m <= top; ++m)
        tower.enumerate(m);
    basis.resize(std::size_t(top + 1));
    pos.resize(std::size_t(top + 1));
    for (int m = 0; m <= top; ++m) {
        pos[m].assign(tower.count(m), -1);
        for (std::size_t e = 0; e < tower.count(m); ++e)
            if (m == 0 || !tower.degenerate(m, int(e))) {
                pos[m][e] = int(basis[m].size());
                basis[m].push_back(int(e));
            }
    }
}

int CochainModel::child_coef(int w) const
{
    int n = tower.n;
    switch (kind) {
    case CochainKind::AQ: return 1;
    case CochainKind::Alg: return tower.word_sign(w, 0, n);
    case CochainKind::Left:
    case CochainKind::Mid: return tower.word_sign(w, 0, n - 1);
    }
    return 0;
}

int CochainModel::child_copy(int w, int copy) const
{
    return kind == CochainKind::Mid ? tower.word_letter(w, tower.n - 1, copy) : 0;
}

void CochainModel::face_terms(int m, int g, int copy, int i, std::vector<CochainTerm>& out)
{
    out.clear();
    if (i == 0) {
        for (auto& [y, w] : tower.children(m, g)) {
            int c = child_coef(w);
            if (c != 0)
                out.push_back({y, child_copy(w, copy), c});
        }
        return;
    }
    out.push_back({tower.face(m, g, i - 1), copy, 1});
}

int CochainModel::degeneracy(int m, int y, int j)
{
    return j == 0 ? tower.wrap(m, y) : tower.degen(m, y, j - 1);
}

namespace {

// alternating sum of the dual faces of (g, copy), keyed by (element, copy)
void coboundary_row(CochainModel& cm, int m, int g, int copy, std::map<std::pair<int, int>, long long>& acc)
{
    acc.clear();
    std::vector<CochainTerm> t;
    for (int i = 0; i <= m; ++i) {
        cm.face_terms(m, g, copy, i, t);
        long long sg = (i % 2) ? -1 : 1;
        for (auto& x : t)
            acc[{x.elem, x.copy}] += sg * x.coef;
    }
}

}  // namespace

FinCochainComplex normalize(CochainModel& cm)
{
    FinCochainComplex c;
    for (int m = 0; m <= cm.top; ++m)
        c.dims.push_back(cm.dim(m));
    std::map<std::pair<int, int>, long long> acc;
    for (int m = 0; m < cm.top; ++m) {
        SparseMatrix d;
        d.rows = cm.dim(m + 1);
        d.cols = cm.dim(m);
        d.row.resize(std::size_t(d.rows));
        for (std::size_t b = 0; b < cm.basis[m + 1].size(); ++b)
            for (int l = 0; l < cm.copies; ++l) {
                coboundary_row(cm, m + 1, cm.basis[m + 1][b], l, acc);
                auto& r = d.row[b * cm.copies + l];
                for (auto& [key, v] : acc) {
                    int col = cm.column(m, key.first, key.second);
                    if (v != 0 && col >= 0)
                        r.emplace_back(col, v);
                }
                std::sort(r.begin(), r.end());
            }
        c.d.push_back(std::move(d));
    }
    return c;
}

FinCochainComplex symbolic_complex(CochainModel& cm, int top)
{
    FinCochainComplex c;
    for (int m = 0; m <= top; ++m)
        c.dims.push_back(int(cm.tower.count(m)) * cm.copies);
    std::map<std::pair<int, int>, long long> acc;
    for (int m = 0; m < top; ++m) {
        SparseMatrix d;
        d.rows = c.dims[m + 1];
        d.cols = c.dims[m];
        d.row.resize(std::size_t(d.rows));
        for (std::size_t g = 0; g < cm.tower.count(m + 1); ++g)
            for (int l = 0; l < cm.copies; ++l) {
                coboundary_row(cm, m + 1, int(g), l, acc);
                auto& r = d.row[g * cm.copies + l];
                for (auto& [key, v] : acc)
                    if (v != 0)
                        r.emplace_back(key.first * cm.copies + key.second, v);
            }
        c.d.push_back(std::move(d));
    }
    return c;
}

LawReport degenerate_rows_vanish(CochainModel& cm)
{
    LawReport rep;
    std::map<std::pair<int, int>, long long> acc;
    for (int m = 1; m <= cm.top; ++m)
        for (std::size_t g = 0; g < cm.tower.count(m); ++g) {
            if (cm.pos[m][g] >= 0)
                continue;
            for (int l = 0; l < cm.copies; ++l) {
                coboundary_row(cm, m, int(g), l, acc);
                ++rep.checked;
                for (auto& [key, v] : acc)
                    if (v != 0 && cm.pos[m - 1][key.first] >= 0) {
                        rep.ok = false;
                        rep.witness = "coboundary does not vanish on degenerate " + cm.tower.describe(m, int(g));
                        return rep;
                    }
            }
        }
    return rep;
}

namespace {

using Combo = std::map<std::pair<int, int>, long long>;

void clean(Combo& c)
{
    for (auto it = c.begin(); it != c.end();)
        it = it->second == 0 ? c.erase(it) : std::next(it);
}

Combo apply_face(CochainModel& cm, int m, const Combo& x, int i)
{
    Combo out;
    std::vector<CochainTerm> t;
    for (auto& [key, v] : x) {
        cm.face_terms(m, key.first, key.second, i, t);
        for (auto& term : t)
            out[{term.elem, term.copy}] += v * term.coef;
    }
    clean(out);
    return out;
}

Combo apply_degen(CochainModel& cm, int m, const Combo& x, int j)
{
    Combo out;
    for (auto& [key, v] : x)
        out[{cm.degeneracy(m, key.first, j), key.second}] += v;
    clean(out);
    return out;
}

}  // namespace

LawReport cosimplicial_identities(CochainModel& cm)
{
    LawReport rep;
    auto fail = [&](const std::string& what, int m, int g) {
        rep.ok = false;
        rep.witness = what + " at " + cm.tower.describe(m, g);
    };
    for (int m = 0; m <= cm.top && rep.ok; ++m)
        for (std::size_t g = 0; g < cm.tower.count(m) && rep.ok; ++g)
            for (int l = 0; l < cm.copies && rep.ok; ++l) {
                Combo x = {{{int(g), l}, 1}};
                // d_i d_j = d_{j-1} d_i for i < j
                if (m >= 2)
                    for (int j = 1; j <= m && rep.ok; ++j)
                        for (int i = 0; i < j; ++i) {
                            ++rep.checked;
                            if (apply_face(cm, m - 1, apply_face(cm, m, x, j), i)
                                != apply_face(cm, m - 1, apply_face(cm, m, x, i), j - 1)) {
                                fail("d" + std::to_string(i) + " d" + std::to_string(j), m, int(g));
                                break;
                            }
                        }
                if (m + 1 > cm.top)
                    continue;
                for (int j = 0; j <= m && rep.ok; ++j) {
                    Combo sx = apply_degen(cm, m, x, j);
                    for (int i = 0; i <= m + 1; ++i) {
                        if (m == 0 && i > 1)
                            break;
                        ++rep.checked;
                        Combo lhs = apply_face(cm, m + 1, sx, i);
                        Combo rhs;
                        if (i == j || i == j + 1)
                            rhs = x;
                        else if (i < j)
                            rhs = apply_degen(cm, m - 1, apply_face(cm, m, x, i), j - 1);
                        else
                            rhs = apply_degen(cm, m - 1, apply_face(cm, m, x, i - 1), j);
                        if (lhs != rhs) {
                            fail("d" + std::to_string(i) + " s" + std::to_string(j), m, int(g));
                            break;
                        }
                    }
                    // s_i s_j = s_{j+1} s_i for i <= j
                    if (m + 2 <= cm.top)
                        for (int i = 0; i <= j && rep.ok; ++i) {
                            ++rep.checked;
                            if (apply_degen(cm, m + 1, sx, i) != apply_degen(cm, m + 1, apply_degen(cm, m, x, i), j + 1))
                                fail("s" + std::to_string(i) + " s" + std::to_string(j), m, int(g));
                        }
                }
            }
    return rep;
}

std::vector<long> constant_factors(const BeckModule& m)
{
    if (!m.transport_trivial)
        throw std::invalid_argument("cohomology needs a transport-trivial module: " + m.name);
    if (m.factors.empty())
        return {};
    for (auto& f : m.factors)
        if (f != m.factors[0])
            throw std::invalid_argument("cohomology needs constant fibres: " + m.name);
    std::vector<long> out;
    for (long k : m.factors[0])
        if (k != 1)
            out.push_back(k);
    return out;
}

}  // namespace tc
