#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "trackcoh/cohomology.hpp"

namespace tc {

namespace {

bool is_prime(long k)
{
    if (k < 2)
        return false;
    for (long d = 2; d * d <= k; ++d)
        if (k % d == 0)
            return false;
    return true;
}

FinCochainComplex truncated(const FinCochainComplex& c, int top)
{
    FinCochainComplex t;
    t.dims.assign(c.dims.begin(), c.dims.begin() + top + 1);
    t.d.assign(c.d.begin(), c.d.begin() + top);
    return t;
}

// dense form of a remainder differential restricted to its non-zero rows
IntMatrix nonzero_rows(const SparseMatrix& m)
{
    IntMatrix out;
    for (int i = 0; i < m.rows; ++i) {
        if (m.row[i].empty())
            continue;
        std::vector<BigInt> r(std::size_t(m.cols));
        for (auto& [j, v] : m.row[i])
            r[j] = v;
        out.push_back(std::move(r));
    }
    return out;
}

struct Invariants {
    int rank = 0;
    std::vector<BigInt> torsion;   // factors > 1
};

Invariants invariants(const SparseMatrix& m)
{
    Invariants inv;
    IntMatrix d = nonzero_rows(m);
    if (d.empty())
        return inv;
    auto s = smith_normal_form(d, false);
    inv.rank = s.rank;
    for (auto& f : s.diagonal)
        if (f != 1)
            inv.torsion.push_back(f);
    return inv;
}

BigInt gcd_order(const BigInt& d, long k)
{
    return k == 0 ? BigInt(0) : gcd(d, BigInt(k));
}

}  // namespace

std::vector<AbGroupPresentation> cohomology_all(const FinCochainComplex& c, const std::vector<long>& factors,
                                                int upto, Method method)
{
    if (upto > c.top() - 1)
        throw DegreeGuard("degree " + std::to_string(upto) + " needs tower depth " + std::to_string(upto + 1) +
                          ", complex reaches " + std::to_string(c.top()));
    std::vector<AbGroupPresentation> out(std::size_t(upto + 1));
    if (factors.empty())
        return out;
    FinCochainComplex t = truncated(c, upto + 1);
    std::size_t nnz = 0;
    for (auto& d : t.d)
        nnz += d.nnz();
    bool integer_needed = false;
    for (long k : factors)
        if (!is_prime(k))
            integer_needed = true;
    if (method == Method::Prime && integer_needed)
        throw std::invalid_argument("the prime method needs prime coefficients");
    bool use_prime = method == Method::Prime || (method == Method::Auto && !integer_needed && nnz > 200000);

    if (use_prime) {
        std::map<long, std::vector<int>> dims;
        for (long k : factors) {
            if (dims.count(k))
                continue;
            ReducedComplex r(t, k, false);
            for (auto& m : r.rem)
                if (m.nnz() != 0)
                    throw std::logic_error("field elimination left a non-zero remainder");
            std::vector<int> dk;
            for (int s = 0; s <= upto; ++s)
                dk.push_back(int(r.alive[s].size()));
            dims[k] = dk;
        }
        for (int s = 0; s <= upto; ++s) {
            std::vector<BigInt> orders;
            for (long k : factors)
                orders.insert(orders.end(), std::size_t(dims[k][s]), BigInt(k));
            out[s] = AbGroupPresentation::from_cyclic(orders);
        }
        return out;
    }

    // integer homology of the dual chain complex, then universal coefficients
    ReducedComplex r(t, 0, false);
    std::vector<Invariants> inv;
    for (int s = 0; s <= upto; ++s)
        inv.push_back(invariants(r.rem[s]));
    std::vector<int> hrank;
    for (int s = 0; s <= upto; ++s)
        hrank.push_back(int(r.alive[s].size()) - (s ? inv[s - 1].rank : 0) - inv[s].rank);
    for (int s = 0; s <= upto; ++s) {
        std::vector<BigInt> orders;
        for (long k : factors) {
            orders.insert(orders.end(), std::size_t(hrank[s]), BigInt(k));   // Hom(Z, A)
            for (auto& d : inv[s].torsion)                                    // Hom(Z/d, A)
                orders.push_back(gcd_order(d, k) == 0 ? BigInt(1) : gcd_order(d, k));
            if (s > 0)
                for (auto& d : inv[s - 1].torsion)   // Ext(Z/d, A)
                    orders.push_back(k == 0 ? d : gcd(d, BigInt(k)));
        }
        out[s] = AbGroupPresentation::from_cyclic(orders);
    }
    return out;
}

AbGroupPresentation cohomology_of(const FinCochainComplex& c, const std::vector<long>& factors, int s, Method method)
{
    return cohomology_all(c, factors, s, method)[std::size_t(s)];
}

AbGroupPresentation H0_oracle(CochainModel& cm, const std::vector<long>& factors)
{
    if (factors.empty())
        return {};
    Tower& t = cm.tower;
    t.enumerate(1);
    std::size_t cols = t.count(0) * std::size_t(cm.copies);
    IntMatrix m;
    std::vector<CochainTerm> terms;
    for (std::size_t g = 0; g < t.count(1); ++g)
        for (int l = 0; l < cm.copies; ++l) {
            std::vector<BigInt> row(cols);
            cm.face_terms(1, int(g), l, 0, terms);
            for (auto& x : terms)
                row[std::size_t(x.elem * cm.copies + x.copy)] += x.coef;
            cm.face_terms(1, int(g), l, 1, terms);
            for (auto& x : terms)
                row[std::size_t(x.elem * cm.copies + x.copy)] -= x.coef;
            if (std::any_of(row.begin(), row.end(), [](const BigInt& v) { return v != 0; }))
                m.push_back(std::move(row));
        }
    std::vector<BigInt> diag;
    int rank = 0;
    if (!m.empty()) {
        auto s = smith_normal_form(m, false);
        diag = s.diagonal;
        rank = s.rank;
    }
    std::vector<BigInt> orders;
    for (long k : factors) {
        for (auto& d : diag)
            orders.push_back(k == 0 ? BigInt(1) : gcd(d, BigInt(k)));
        orders.insert(orders.end(), cols - std::size_t(rank), BigInt(k));
    }
    return AbGroupPresentation::from_cyclic(orders);
}

// ---------------------------------------------------------------------------

AbGroupPresentation CohomologyGroup::presentation() const
{
    return AbGroupPresentation::from_cyclic(orders);
}

std::vector<BigInt> CohomologyGroup::coords(const std::vector<long long>& y) const
{
    std::vector<BigInt> u(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j)
            if (y[j] != 0 && to_coords[i][j] != 0)
                u[i] += to_coords[i][j] * y[j];
        if (orders[i] != 0) {
            u[i] %= orders[i];
            if (u[i] < 0)
                u[i] += orders[i];
        }
    }
    return u;
}

CohomologyGroup cohomology_group(const ReducedComplex& r, int s)
{
    if (s >= int(r.rem.size()))
        throw DegreeGuard("group in degree " + std::to_string(s) + " needs the next differential");
    CohomologyGroup g;
    g.degree = s;
    std::size_t n = r.alive[s].size();
    if (r.p > 0) {
        g.orders.assign(n, BigInt(r.p));
        g.to_coords = identity_matrix(n);
        g.gens = identity_matrix(n);
        return g;
    }
    IntMatrix b = nonzero_rows(r.rem[s]);
    IntMatrix vinv = identity_matrix(n), v = identity_matrix(n);
    int rk = 0;
    if (!b.empty()) {
        auto sb = smith_normal_form(b, true);
        v = std::move(sb.v);
        vinv = std::move(sb.vinv);
        rk = sb.rank;
    }
    std::size_t k = n - std::size_t(rk);
    IntMatrix vk(vinv.begin() + rk, vinv.end());   // k x n: kernel coordinates
    IntMatrix a = s > 0 ? r.rem[s - 1].dense() : IntMatrix(n, std::vector<BigInt>());
    IntMatrix ac = multiply(vk, a);   // k x alive_{s-1}
    IntMatrix pm = identity_matrix(k), pinv = identity_matrix(k);
    std::vector<BigInt> e;
    int t = 0;
    if (!ac.empty() && !ac[0].empty()) {
        auto sa = smith_normal_form(ac, true);
        pm = std::move(sa.u);
        pinv = std::move(sa.uinv);
        e = sa.diagonal;
        t = sa.rank;
    }
    IntMatrix coords = multiply(pm, vk);   // k x n
    for (std::size_t i = 0; i < k; ++i) {
        BigInt ord = int(i) < t ? e[i] : BigInt(0);
        if (ord == 1)
            continue;
        g.orders.push_back(ord);
        g.to_coords.push_back(coords[i]);
        std::vector<BigInt> gen(n);
        for (std::size_t row = 0; row < n; ++row)
            for (std::size_t j = 0; j < k; ++j)
                if (pinv[j][i] != 0)
                    gen[row] += v[row][std::size_t(rk) + j] * pinv[j][i];
        g.gens.push_back(std::move(gen));
    }
    return g;
}

Presented presented(const CohomologyGroup& g)
{
    Presented p;
    p.gens = int(g.orders.size());
    std::size_t nrel = 0;
    for (auto& o : g.orders)
        nrel += o != 0;
    p.rel = zero_matrix(g.orders.size(), nrel);
    std::size_t c = 0;
    for (std::size_t i = 0; i < g.orders.size(); ++i)
        if (g.orders[i] != 0)
            p.rel[i][c++] = g.orders[i];
    return p;
}

namespace {

std::vector<BigInt> column(const IntMatrix& m, std::size_t j)
{
    std::vector<BigInt> c(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        c[i] = m[i][j];
    return c;
}

IntMatrix hcat(const IntMatrix& a, const IntMatrix& b, std::size_t rows)
{
    IntMatrix out(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        if (i < a.size())
            out[i] = a[i];
        if (i < b.size())
            out[i].insert(out[i].end(), b[i].begin(), b[i].end());
    }
    return out;
}

std::string vec_str(const std::vector<BigInt>& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + v[i].str();
    return s + ")";
}

}  // namespace

std::optional<std::string> exact_at(const IntMatrix& alpha, int a_gens, const Presented& b, const IntMatrix& beta,
                                    const Presented& c)
{
    std::size_t nb = std::size_t(b.gens), nc = std::size_t(c.gens);
    if (nb == 0)
        return std::nullopt;
    auto apply = [](const IntMatrix& m, const std::vector<BigInt>& x, std::size_t rows) {
        std::vector<BigInt> y(rows);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                if (x[j] != 0 && m[i][j] != 0)
                    y[i] += m[i][j] * x[j];
        return y;
    };
    SpanSolver rel_c(c.rel, nc);
    // beta is well defined and beta alpha = 0
    for (std::size_t j = 0; j < (b.rel.empty() ? 0 : b.rel[0].size()); ++j)
        if (!rel_c.contains(apply(beta, column(b.rel, j), nc)))
            return "map out of the slot is not well defined on relation " + std::to_string(j);
    for (int j = 0; j < a_gens; ++j)
        if (!rel_c.contains(apply(beta, column(alpha, std::size_t(j)), nc)))
            return "composite is non-zero on generator " + std::to_string(j);
    // kernel of beta inside the image of alpha
    std::size_t nrel_c = c.rel.empty() ? 0 : c.rel[0].size();
    IntMatrix m(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        m[i] = beta[i];
        for (std::size_t j = 0; j < nrel_c; ++j)
            m[i].push_back(-c.rel[i][j]);
    }
    auto ker = integer_kernel(m, nb + nrel_c);
    SpanSolver span(hcat(a_gens > 0 ? alpha : IntMatrix(nb), b.rel, nb), nb);
    for (auto& z : ker) {
        std::vector<BigInt> x(z.begin(), z.begin() + long(nb));
        if (!span.contains(x))
            return "kernel element " + vec_str(x) + " is not in the image";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

// c |-> (c, c) and (c_s, c_t) |-> c_t - c_s on the shared non-degenerate basis
SparseMatrix diagonal_map(int n)
{
    SparseMatrix m;
    m.rows = 2 * n;
    m.cols = n;
    m.row.resize(std::size_t(2 * n));
    for (int b = 0; b < n; ++b) {
        m.row[2 * b] = {{b, 1}};
        m.row[2 * b + 1] = {{b, 1}};
    }
    return m;
}

SparseMatrix difference_map(int n)
{
    SparseMatrix m;
    m.rows = n;
    m.cols = 2 * n;
    m.row.resize(std::size_t(n));
    for (int b = 0; b < n; ++b)
        m.row[b] = {{2 * b, -1}, {2 * b + 1, 1}};
    return m;
}

bool same(const SparseMatrix& a, const SparseMatrix& b)
{
    return a.rows == b.rows && a.cols == b.cols && a.row == b.row;
}

std::vector<long long> apply_sparse(const SparseMatrix& m, const std::vector<long long>& x, long p)
{
    std::vector<long long> y(std::size_t(m.rows), 0);
    for (int i = 0; i < m.rows; ++i) {
        long long acc = 0;
        for (auto& [j, v] : m.row[i])
            acc += v * x[j];
        y[i] = p > 0 ? ((acc % p) + p) % p : acc;
    }
    return y;
}

std::vector<long long> to_ll(const std::vector<BigInt>& v)
{
    std::vector<long long> out;
    for (auto& x : v)
        out.push_back(static_cast<long long>(x));
    return out;
}

IntMatrix group_order_rel(std::size_t n, long k)
{
    return k == 0 ? IntMatrix(n) : [&] {
        IntMatrix r = zero_matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            r[i][i] = k;
        return r;
    }();
}

}  // namespace

SesReport ses_levelwise(Tower& t, long k, int s)
{
    SesReport rep;
    rep.level = s;
    CochainModel L(t, CochainKind::Left, s + 1), M(t, CochainKind::Mid, s + 1), R(t, CochainKind::Alg, s + 1);
    int n = int(L.basis[s].size());
    rep.dim_left = n;
    rep.dim_mid = M.dim(s);
    rep.dim_right = R.dim(s);
    rep.audits.add("shared non-degenerate basis", (L.basis == M.basis && L.basis == R.basis)
                                                       ? std::nullopt
                                                       : std::optional<std::string>("bases differ"));
    auto cl = normalize(L), cm = normalize(M), cr = normalize(R);
    int n1 = int(L.basis[s + 1].size());
    rep.audits.add("restriction commutes with the coboundary",
                   same(sparse_product(cm.d[s], diagonal_map(n)), sparse_product(diagonal_map(n1), cl.d[s]))
                       ? std::nullopt
                       : std::optional<std::string>("delta i != i delta"));
    rep.audits.add("difference commutes with the coboundary",
                   same(sparse_product(cr.d[s], difference_map(n)), sparse_product(difference_map(n1), cm.d[s]))
                       ? std::nullopt
                       : std::optional<std::string>("delta q != q delta"));

    if (k > 0) {
        // |Mid| = |Left| |Right| for the finite cochain groups
        BigInt ol = boost::multiprecision::pow(BigInt(k), unsigned(n));
        BigInt om = boost::multiprecision::pow(BigInt(k), unsigned(2 * n));
        BigInt orr = boost::multiprecision::pow(BigInt(k), unsigned(n));
        rep.audits.add("order multiplicativity", om == ol * orr ? std::nullopt
                                                                : std::optional<std::string>("orders do not multiply"));
    }
    Presented pl{n, group_order_rel(std::size_t(n), k)};
    Presented pm{2 * n, group_order_rel(std::size_t(2 * n), k)};
    Presented pr{n, group_order_rel(std::size_t(n), k)};
    Presented zero{0, {}};
    IntMatrix i_map = diagonal_map(n).dense(), q_map = difference_map(n).dense();
    rep.audits.add("injective on the left", exact_at(IntMatrix(std::size_t(n)), 0, pl, i_map, pm));
    rep.audits.add("image = kernel in the middle", exact_at(i_map, n, pm, q_map, pr));
    rep.audits.add("surjective on the right", exact_at(q_map, 2 * n, pr, IntMatrix(), zero));
    return rep;
}

bool LesReport::ok() const
{
    return audits.ok() && std::all_of(slots.begin(), slots.end(), [](const Slot& s) { return s.exact; });
}

LesReport les(Tower& t, long k, int top, LesFault fault)
{
    if (k != 0 && !is_prime(k))
        throw std::invalid_argument("the long exact sequence is computed over Z or Z/p");
    LesReport rep;
    rep.k = k;
    rep.top = top;
    CochainModel L(t, CochainKind::Left, top), M(t, CochainKind::Mid, top), R(t, CochainKind::Alg, top);
    auto cl = normalize(L), cm = normalize(M), cr = normalize(R);
    rep.audits.add("left d d = 0", audit_dd(cl));
    rep.audits.add("middle d d = 0", audit_dd(cm));
    rep.audits.add("right d d = 0", audit_dd(cr));
    for (int s = 0; s < top; ++s) {
        int n = int(L.basis[s].size()), n1 = int(L.basis[s + 1].size());
        rep.audits.add("chain maps commute at level " + std::to_string(s),
                       (same(sparse_product(cm.d[s], diagonal_map(n)), sparse_product(diagonal_map(n1), cl.d[s])) &&
                        same(sparse_product(cr.d[s], difference_map(n)), sparse_product(difference_map(n1), cm.d[s])))
                           ? std::nullopt
                           : std::optional<std::string>("square fails"));
    }
    ReducedComplex rl(cl, k, true), rm(cm, k, true), rr(cr, k, true);
    std::vector<CohomologyGroup> hl, hm, hr;
    for (int s = 0; s < top; ++s) {
        hl.push_back(cohomology_group(rl, s));
        hm.push_back(cohomology_group(rm, s));
        hr.push_back(cohomology_group(rr, s));
        rep.left.push_back(hl.back().presentation());
        rep.mid.push_back(hm.back().presentation());
        rep.right.push_back(hr.back().presentation());
    }
    auto induced = [&](const ReducedComplex& from, const CohomologyGroup& gf, const ReducedComplex& to,
                       const CohomologyGroup& gt, const SparseMatrix& map) {
        IntMatrix out = zero_matrix(gt.orders.size(), gf.orders.size());
        for (std::size_t j = 0; j < gf.orders.size(); ++j) {
            auto x = from.expand(gf.degree, to_ll(gf.gens[j]));
            auto y = to.reduce(gt.degree, apply_sparse(map, x, k));
            auto c = gt.coords(y);
            for (std::size_t i = 0; i < c.size(); ++i)
                out[i][j] = c[i];
        }
        return out;
    };
    std::vector<IntMatrix> imap, qmap;
    for (int s = 0; s < top; ++s) {
        int n = int(L.basis[s].size());
        imap.push_back(induced(rl, hl[s], rm, hm[s], diagonal_map(n)));
        qmap.push_back(induced(rm, hm[s], rr, hr[s], difference_map(n)));
    }
    // connecting maps: lift along the section c |-> (0, c), apply the middle coboundary, read off the left part
    std::vector<Presented> targets;
    for (int s = 0; s < top; ++s) {
        std::vector<std::vector<long long>> lifted;
        int n1 = int(L.basis[s + 1].size());
        for (auto& gen : hr[s].gens) {
            auto x = rr.expand(s, to_ll(gen));
            std::vector<long long> m(2 * x.size(), 0);
            for (std::size_t b = 0; b < x.size(); ++b)
                m[2 * b + 1] = x[b];
            auto z = apply_sparse(cm.d[s], m, k);
            std::vector<long long> c(static_cast<std::size_t>(n1), 0);
            bool in_left = true;
            for (int b = 0; b < n1; ++b) {
                if (z[2 * b] != z[2 * b + 1])
                    in_left = false;
                c[b] = z[2 * b];
            }
            if (!in_left)
                rep.audits.add("snake lift lands in the left term at degree " + std::to_string(s),
                               std::string("lift of a generator leaves the left term"));
            lifted.push_back(rl.reduce(s + 1, c));
        }
        if (s + 1 < top) {
            IntMatrix d = zero_matrix(hl[s + 1].orders.size(), lifted.size());
            for (std::size_t j = 0; j < lifted.size(); ++j) {
                auto c = hl[s + 1].coords(lifted[j]);
                for (std::size_t i = 0; i < c.size(); ++i)
                    d[i][j] = c[i];
            }
            rep.connecting.push_back(std::move(d));
            targets.push_back(presented(hl[s + 1]));
        } else {
            // top level: cochains modulo coboundaries, on the rows that matter
            const SparseMatrix& last = rl.rem[top - 1];
            std::set<int> rows;
            for (auto& v : lifted)
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (v[i] != 0)
                        rows.insert(int(i));
            for (int i = 0; i < last.rows; ++i)
                if (!last.row[i].empty())
                    rows.insert(i);
            std::vector<int> idx(rows.begin(), rows.end());
            std::map<int, int> at;
            for (std::size_t i = 0; i < idx.size(); ++i)
                at[idx[i]] = int(i);
            IntMatrix d = zero_matrix(idx.size(), lifted.size());
            for (std::size_t j = 0; j < lifted.size(); ++j)
                for (auto& [i, pos] : at)
                    d[std::size_t(pos)][j] = lifted[j][i];
            Presented tp;
            tp.gens = int(idx.size());
            tp.rel = zero_matrix(idx.size(), std::size_t(last.cols));
            for (auto& [i, pos] : at)
                for (auto& [j, v] : last.row[i])
                    tp.rel[std::size_t(pos)][j] = v;
            if (k > 0)
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    for (auto& r : tp.rel)
                        r.push_back(0);
                    tp.rel[i].back() = k;
                }
            rep.connecting.push_back(std::move(d));
            targets.push_back(std::move(tp));
        }
    }
    if (fault == LesFault::ZeroProjection)
        for (auto& r : qmap[0])
            for (auto& v : r)
                v = 0;
    if (fault == LesFault::ZeroConnecting || fault == LesFault::PerturbConnecting)
        for (auto& d : rep.connecting) {
            if (d.empty() || d[0].empty())
                continue;
            for (auto& r : d)
                for (auto& v : r)
                    v = fault == LesFault::ZeroConnecting ? BigInt(0) : v;
            if (fault == LesFault::PerturbConnecting)
                d[0][0] += 1;
        }

    auto name = [](const char* col, int s) { return std::string("H^") + std::to_string(s) + "(" + col + ")"; };
    for (int s = 0; s < top; ++s) {
        Presented pl = presented(hl[s]), pm = presented(hm[s]), pr = presented(hr[s]);
        std::optional<std::string> r;
        if (s == 0)
            r = exact_at(IntMatrix(hl[0].orders.size()), 0, pl, imap[0], pm);
        else
            r = exact_at(rep.connecting[s - 1], int(hr[s - 1].orders.size()), pl, imap[s], pm);
        rep.slots.push_back({name("left", s), !r, r.value_or("")});
        r = exact_at(imap[s], int(hl[s].orders.size()), pm, qmap[s], pr);
        rep.slots.push_back({name("mid", s), !r, r.value_or("")});
        r = exact_at(qmap[s], int(hm[s].orders.size()), pr, rep.connecting[s], targets[s]);
        rep.slots.push_back({name("right", s), !r, r.value_or("")});
    }
    return rep;
}

// ---------------------------------------------------------------------------

FinCat p0_object_level(const TrackCat& x)
{
    std::size_t no = x.nobj();
    FinCat c;
    c.objects.labels = x.objects;
    c.ident.assign(no, -1);
    // class of every code-0 cell, hom by hom
    std::vector<std::vector<int>> cls(no * no);
    std::vector<int> first(no * no + 1, 0);
    std::vector<std::vector<int>> rep(no * no);
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b) {
            std::size_t h = a * no + b;
            const NFoldCat& hom = x.homs[h];
            std::vector<std::string> labels;
            if (x.n <= 1) {
                labels = hom.cells[0];
                cls[h].resize(hom.count(0));
                for (std::size_t i = 0; i < hom.count(0); ++i)
                    cls[h][i] = int(i);
            } else {
                auto d = discretization(hom.slice(0, 0));
                if (!d)
                    throw std::invalid_argument("object level of a hom is not homotopically discrete");
                labels = d->labels;
                cls[h] = d->gamma.m[0];
            }
            first[h] = int(c.nmor());
            rep[h].assign(labels.size(), -1);
            for (std::size_t i = 0; i < cls[h].size(); ++i)
                if (rep[h][cls[h][i]] < 0)
                    rep[h][cls[h][i]] = int(i);
            for (auto& l : labels)
                c.add_morphism(l, int(a), int(b));
        }
    for (std::size_t a = 0; a < no; ++a)
        c.ident[a] = first[a * no + a] + cls[a * no + a][x.unit[a][0]];
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t cc = 0; cc < no; ++cc)
                for (std::size_t f = 0; f < x.homs[a * no + b].count(0); ++f)
                    for (std::size_t g = 0; g < x.homs[b * no + cc].count(0); ++g) {
                        int gf = x.compose(int(a), int(b), int(cc), 0, int(g), int(f));
                        if (gf < 0)
                            throw std::invalid_argument("missing composite in the object level");
                        int mg = first[b * no + cc] + cls[b * no + cc][g];
                        int mf = first[a * no + b] + cls[a * no + b][f];
                        int v = first[a * no + cc] + cls[a * no + cc][gf];
                        int old = c.compose(mg, mf);
                        if (old >= 0 && old != v)
                            throw std::invalid_argument("composition is not well defined on classes");
                        c.set_comp(mg, mf, v);
                    }
    return c;
}

namespace {

struct PathFattening {
    TrackCat z;
    TrackMap v;
};

// n = 1: 1-cells are paths of non-identity 1-cells, 2-cells between paths are
// the 2-cells between their composites
PathFattening path_fattening(const TrackCat& x)
{
    std::size_t no = x.nobj();
    struct Gen {
        int a, b, cell;
    };
    std::vector<Gen> gens;
    for (std::size_t a = 0; a < no; ++a)
        for (std::size_t b = 0; b < no; ++b)
            for (std::size_t f = 0; f < x.homs[a * no + b].count(0); ++f)
                if (!(a == b && int(f) == x.unit[a][0]))
                    gens.push_back({int(a), int(b), int(f)});
    // paths by depth-first search; a cycle makes the free category infinite
    struct Path {
        int a, b;
        std::vector<int> g;
        int comp;
    };
    std::vector<Path> paths;
    for (std::size_t a = 0; a < no; ++a)
        paths.push_back({int(a), int(a), {}, x.unit[a][0]});
    std::size_t limit = 100000;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        Path p = paths[i];
        if (p.g.size() > no * gens.size() + 1)
            throw std::invalid_argument("path-fattening needs an acyclic graph of non-identity 1-cells");
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (gens[k].a == p.b) {
                Path q = p;
                q.b = gens[k].b;
                q.g.push_back(int(k));
                q.comp = x.compose(p.a, p.b, q.b, 0, gens[k].cell, p.comp);
                paths.push_back(std::move(q));
                if (paths.size() > limit)
                    throw std::invalid_argument("path-fattening needs an acyclic graph of non-identity 1-cells");
            }
    }
    std::vector<std::vector<int>> by_hom(no * no);
    std::vector<int> local(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        auto& h = by_hom[std::size_t(paths[i].a) * no + std::size_t(paths[i].b)];
        local[i] = int(h.size());
        h.push_back(int(i));
    }
    std::map<std::pair<std::size_t, std::vector<int>>, int> path_id;
    for (std::size_t i = 0; i < paths.size(); ++i)
        path_id[{std::size_t(paths[i].a) * no + std::size_t(paths[i].b), paths[i].g}] = local[i];

    auto path_name = [&](const Path& p) {
        if (p.g.empty())
            return std::string("1_") + x.objects[std::size_t(p.a)];
        std::string s;
        for (std::size_t i = p.g.size(); i-- > 0;) {
            auto& gg = gens[std::size_t(p.g[i])];
            s += x.homs[std::size_t(gg.a) * no + std::size_t(gg.b)].cells[0][std::size_t(gg.cell)];
            if (i)
                s += ".";
        }
        return s;
    };

    std::vector<NFoldCat> homs;
    std::vector<std::vector<std::pair<std::pair<int, int>, int>>> cells1(no * no);   // ((p, q), tau)
    std::vector<std::map<std::tuple<int, int, int>, int>> cell1_id(no * no);
    std::vector<std::map<std::pair<int, int>, int>> xpair(no * no);   // X code-2 cells by (first, second)
    std::vector<std::map<std::pair<int, int>, int>> zpair(no * no);
    TrackMap v;
    v.obj.resize(no);
    for (std::size_t a = 0; a < no; ++a)
        v.obj[a] = int(a);
    for (std::size_t h = 0; h < no * no; ++h) {
        const NFoldCat& xh = x.homs[h];
        for (std::size_t c2 = 0; c2 < xh.count(2); ++c2)
            xpair[h][{xh.face(0, 2, 2)[c2], xh.face(0, 2, 0)[c2]}] = int(c2);
        FinGroupoid g;
        g.cat.ident.assign(by_hom[h].size(), -1);
        for (int pi : by_hom[h])
            g.cat.objects.labels.push_back(path_name(paths[std::size_t(pi)]));
        for (std::size_t i = 0; i < by_hom[h].size(); ++i)
            for (std::size_t j = 0; j < by_hom[h].size(); ++j) {
                int cp = paths[std::size_t(by_hom[h][i])].comp, cq = paths[std::size_t(by_hom[h][j])].comp;
                for (std::size_t tau = 0; tau < xh.count(1); ++tau)
                    if (xh.face(0, 1, 1)[tau] == cp && xh.face(0, 1, 0)[tau] == cq) {
                        int id = g.cat.add_morphism(g.cat.objects.labels[i] + "=>" + g.cat.objects.labels[j] + ":" +
                                                        xh.cells[1][tau],
                                                    int(i), int(j));
                        cells1[h].push_back({{int(i), int(j)}, int(tau)});
                        cell1_id[h][{int(i), int(j), int(tau)}] = id;
                        if (i == j && xh.degen(0, 0, 0)[std::size_t(cp)] == int(tau))
                            g.cat.ident[i] = id;
                    }
            }
        g.inv.resize(g.cat.nmor());
        for (std::size_t m = 0; m < g.cat.nmor(); ++m) {
            auto [pq, tau] = cells1[h][m];
            g.inv[m] = cell1_id[h].at({pq.second, pq.first, xh.inverse(0, 1)[std::size_t(tau)]});
            for (std::size_t m2 = 0; m2 < g.cat.nmor(); ++m2) {
                auto [pq2, tau2] = cells1[h][m2];
                if (pq2.first != pq.second)
                    continue;
                int c2 = xpair[h].at({tau, tau2});
                int comp = xh.face(0, 2, 1)[std::size_t(c2)];
                g.cat.set_comp(int(m2), int(m), cell1_id[h].at({pq.first, pq2.second, comp}));
            }
        }
        NFoldCat zh = nfold_from_groupoid(g);
        for (std::size_t c2 = 0; c2 < zh.count(2); ++c2)
            zpair[h][{zh.face(0, 2, 2)[c2], zh.face(0, 2, 0)[c2]}] = int(c2);
        NFoldMap vm;
        vm.m.resize(3);
        for (int pi : by_hom[h])
            vm.m[0].push_back(paths[std::size_t(pi)].comp);
        for (auto& [pq, tau] : cells1[h])
            vm.m[1].push_back(tau);
        for (std::size_t c2 = 0; c2 < zh.count(2); ++c2) {
            int f1 = zh.face(0, 2, 2)[c2], f2 = zh.face(0, 2, 0)[c2];
            vm.m[2].push_back(xpair[h].at({cells1[h][std::size_t(f1)].second, cells1[h][std::size_t(f2)].second}));
        }
        v.hom.push_back(std::move(vm));
        homs.push_back(std::move(zh));
    }
    std::vector<std::vector<int>> unit(no, std::vector<int>(3));
    for (std::size_t a = 0; a < no; ++a) {
        std::size_t h = a * no + a;
        int p0 = path_id.at({h, {}});
        unit[a][0] = p0;
        unit[a][1] = homs[h].degen(0, 0, 0)[std::size_t(p0)];
        unit[a][2] = homs[h].degen(0, 1, 0)[std::size_t(unit[a][1])];
    }
    auto concat = [&](int a, int b, int c, int g, int f) {
        auto& pf = paths[std::size_t(by_hom[std::size_t(a) * no + std::size_t(b)][std::size_t(f)])];
        auto& pg = paths[std::size_t(by_hom[std::size_t(b) * no + std::size_t(c)][std::size_t(g)])];
        std::vector<int> w = pf.g;
        w.insert(w.end(), pg.g.begin(), pg.g.end());
        return path_id.at({std::size_t(a) * no + std::size_t(c), w});
    };
    auto hor1 = [&](int a, int b, int c, int g, int f) {
        std::size_t hf = std::size_t(a) * no + std::size_t(b), hg = std::size_t(b) * no + std::size_t(c);
        std::size_t hc = std::size_t(a) * no + std::size_t(c);
        auto [pf, tf] = cells1[hf][std::size_t(f)];
        auto [pg, tg] = cells1[hg][std::size_t(g)];
        int tau = x.compose(a, b, c, 1, tg, tf);
        return cell1_id[hc].at({concat(a, b, c, pg.first, pf.first), concat(a, b, c, pg.second, pf.second), tau});
    };
    std::vector<NFoldCat> zh = homs;
    TrackCat z = make_track(1, x.objects, std::move(homs), unit, [&](int a, int b, int c, int code, int g, int f) {
        if (code == 0)
            return concat(a, b, c, g, f);
        if (code == 1)
            return hor1(a, b, c, g, f);
        // pairs of composable 2-cells compose componentwise
        const NFoldCat& zf = zh[std::size_t(a) * no + std::size_t(b)];
        const NFoldCat& zg = zh[std::size_t(b) * no + std::size_t(c)];
        int first = hor1(a, b, c, zg.face(0, 2, 2)[std::size_t(g)], zf.face(0, 2, 2)[std::size_t(f)]);
        int second = hor1(a, b, c, zg.face(0, 2, 0)[std::size_t(g)], zf.face(0, 2, 0)[std::size_t(f)]);
        return zpair[std::size_t(a) * no + std::size_t(c)].at({first, second});
    });
    return {std::move(z), std::move(v)};
}

}  // namespace

SXData build_SX(const TrackCat& x)
{
    SXData d;
    if (x.n == 1) {
        auto pf = path_fattening(x);
        d.sx = std::move(pf.z);
        d.v = std::move(pf.v);
    } else {
        FinCat base = p0_object_level(x);
        if (!is_free_category(base, &d.why))
            throw std::invalid_argument("S(X) for n >= 2 is built only over a free object level: " + d.why);
        std::vector<std::string> names;
        for (auto& o : x.objects)
            names.push_back("S" + o);
        d.sx = relabel_objects(x, names);
        d.v = identity_track_map(x);
    }
    d.base = p0_object_level(d.sx);
    std::string why;
    d.base_free = is_free_category(d.base, &why);
    if (!d.base_free)
        d.why = "object level not free: " + why;
    if (auto e = d.sx.audit(true)) {
        d.why = "S(X) fails the enrichment audit: " + *e;
        return d;
    }
    if (auto e = audit_track_map(d.sx, x, d.v)) {
        d.why = "v is not a track map: " + *e;
        return d;
    }
    d.v_equivalence = is_track_equivalence(d.sx, x, d.v, &why);
    if (!d.v_equivalence)
        d.why = "v is not an n-equivalence: " + why;
    return d;
}

CorollaryReport corollary_iso(const TrackCat& x, const std::vector<long>& factors, int s, int bound)
{
    CorollaryReport rep;
    rep.s = s;
    // left side: the AQ complex of X itself
    Tower tx(x, bound);
    CochainModel cx(tx, CochainKind::AQ, s + 2);
    auto c = normalize(cx);
    rep.audits.add("AQ complex d d = 0", audit_dd(c));
    rep.aq = cohomology_of(c, factors, s + 1);
    // right side: the algebraic complex of S(X), from its own tower
    SXData sx = build_SX(x);
    rep.audits.add("S(X) object level is free", sx.base_free ? std::nullopt : std::optional<std::string>(sx.why));
    rep.audits.add("v_X is an n-equivalence", sx.v_equivalence ? std::nullopt : std::optional<std::string>(sx.why));
    Tower ts(sx.sx, bound);
    CochainModel ds(ts, CochainKind::Alg, s + 1);
    auto d = normalize(ds);
    rep.audits.add("algebraic complex of S(X) d d = 0", audit_dd(d));
    rep.alg = cohomology_of(d, factors, s);
    rep.equal = rep.aq == rep.alg;
    // the middle column of S(X) in positive degrees
    CochainModel ms(ts, CochainKind::Mid, s + 2);
    auto m = normalize(ms);
    auto hm = cohomology_all(m, factors, s + 1);
    rep.middle_vanishes = true;
    for (int k = 1; k <= s + 1; ++k) {
        rep.middle.push_back(hm[std::size_t(k)]);
        if (!hm[std::size_t(k)].is_zero())
            rep.middle_vanishes = false;
    }
    return rep;
}

}  // namespace tc
