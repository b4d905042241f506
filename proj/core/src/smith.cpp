#include <algorithm>
#include <numeric>
#include <sstream>

#include "trackcoh/cohomology.hpp"

namespace tc {

IntMatrix zero_matrix(std::size_t rows, std::size_t cols)
{
    return IntMatrix(rows, std::vector<BigInt>(cols));
}

IntMatrix identity_matrix(std::size_t n)
{
    IntMatrix m = zero_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

IntMatrix multiply(const IntMatrix& a, const IntMatrix& b)
{
    std::size_t k = b.size();
    std::size_t cols = k ? b[0].size() : 0;
    IntMatrix c = zero_matrix(a.size(), cols);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0)
                continue;
            for (std::size_t j = 0; j < cols; ++j)
                if (b[l][j] != 0)
                    c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

// Bareiss fraction-free elimination
BigInt determinant(const IntMatrix& a0)
{
    std::size_t n = a0.size();
    if (n == 0)
        return 1;
    IntMatrix a = a0;
    BigInt prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0)
                ++r;
            if (r == n)
                return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

namespace {

struct SmithWork {
    IntMatrix a, u, v, uinv, vinv;
    bool tr;
    std::size_t m, n;

    void swap_rows(std::size_t i, std::size_t j)
    {
        if (i == j)
            return;
        std::swap(a[i], a[j]);
        if (tr) {
            std::swap(u[i], u[j]);
            for (auto& r : uinv)
                std::swap(r[i], r[j]);
        }
    }
    void swap_cols(std::size_t i, std::size_t j)
    {
        if (i == j)
            return;
        for (auto& r : a)
            std::swap(r[i], r[j]);
        if (tr) {
            for (auto& r : v)
                std::swap(r[i], r[j]);
            std::swap(vinv[i], vinv[j]);
        }
    }
    // row i += q row j
    void add_row(std::size_t i, std::size_t j, const BigInt& q)
    {
        for (std::size_t c = 0; c < n; ++c)
            if (a[j][c] != 0)
                a[i][c] += q * a[j][c];
        if (tr) {
            for (std::size_t c = 0; c < m; ++c)
                if (u[j][c] != 0)
                    u[i][c] += q * u[j][c];
            for (std::size_t r = 0; r < m; ++r)
                if (uinv[r][i] != 0)
                    uinv[r][j] -= q * uinv[r][i];
        }
    }
    // col i += q col j
    void add_col(std::size_t i, std::size_t j, const BigInt& q)
    {
        for (std::size_t r = 0; r < m; ++r)
            if (a[r][j] != 0)
                a[r][i] += q * a[r][j];
        if (tr) {
            for (std::size_t r = 0; r < n; ++r)
                if (v[r][j] != 0)
                    v[r][i] += q * v[r][j];
            for (std::size_t c = 0; c < n; ++c)
                if (vinv[i][c] != 0)
                    vinv[j][c] -= q * vinv[i][c];
        }
    }
    void negate_row(std::size_t i)
    {
        for (auto& x : a[i])
            x = -x;
        if (tr) {
            for (auto& x : u[i])
                x = -x;
            for (auto& r : uinv)
                r[i] = -r[i];
        }
    }
};

BigInt floor_div(const BigInt& x, const BigInt& y)
{
    BigInt q = x / y;   // truncates toward zero
    if ((x % y != 0) && ((x < 0) != (y < 0)))
        --q;
    return q;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& a0, bool transforms)
{
    SmithWork w;
    w.a = a0;
    w.m = a0.size();
    w.n = w.m ? a0[0].size() : 0;
    w.tr = transforms;
    if (transforms) {
        w.u = identity_matrix(w.m);
        w.uinv = identity_matrix(w.m);
        w.v = identity_matrix(w.n);
        w.vinv = identity_matrix(w.n);
    }
    std::size_t t = 0;
    for (; t < std::min(w.m, w.n); ++t) {
        for (;;) {
            // smallest non-zero entry of the trailing block
            std::size_t pi = w.m, pj = w.n;
            BigInt best = -1;
            for (std::size_t i = t; i < w.m; ++i)
                for (std::size_t j = t; j < w.n; ++j)
                    if (w.a[i][j] != 0) {
                        BigInt av = abs(w.a[i][j]);
                        if (best < 0 || av < best) {
                            best = av;
                            pi = i;
                            pj = j;
                        }
                    }
            if (pi == w.m)
                goto done;
            w.swap_rows(t, pi);
            w.swap_cols(t, pj);
            bool clean = true;
            for (std::size_t i = t + 1; i < w.m; ++i)
                if (w.a[i][t] != 0) {
                    BigInt q = floor_div(w.a[i][t], w.a[t][t]);
                    w.add_row(i, t, -q);
                    if (w.a[i][t] != 0)
                        clean = false;
                }
            for (std::size_t j = t + 1; j < w.n; ++j)
                if (w.a[t][j] != 0) {
                    BigInt q = floor_div(w.a[t][j], w.a[t][t]);
                    w.add_col(j, t, -q);
                    if (w.a[t][j] != 0)
                        clean = false;
                }
            if (!clean)
                continue;
            // divisibility of the rest
            std::size_t bad = w.m;
            for (std::size_t i = t + 1; i < w.m && bad == w.m; ++i)
                for (std::size_t j = t + 1; j < w.n; ++j)
                    if (w.a[i][j] % w.a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == w.m)
                break;
            w.add_row(t, bad, 1);
        }
        if (w.a[t][t] < 0)
            w.negate_row(t);
    }
done:
    SmithForm s;
    s.rank = int(t);
    for (std::size_t i = 0; i < t; ++i)
        s.diagonal.push_back(w.a[i][i]);
    s.d = std::move(w.a);
    if (transforms) {
        s.u = std::move(w.u);
        s.v = std::move(w.v);
        s.uinv = std::move(w.uinv);
        s.vinv = std::move(w.vinv);
    }
    return s;
}

std::vector<BigInt> minor_gcd_factors(const IntMatrix& a)
{
    std::size_t m = a.size(), n = m ? a[0].size() : 0;
    std::vector<BigInt> divisors = {1};
    for (std::size_t k = 1; k <= std::min(m, n); ++k) {
        BigInt g = 0;
        std::vector<int> rs(k), cs(k);
        std::vector<bool> rsel(m, false), csel(n, false);
        std::fill(rsel.begin(), rsel.begin() + k, true);
        do {
            std::fill(csel.begin(), csel.end(), false);
            std::fill(csel.begin(), csel.begin() + k, true);
            do {
                IntMatrix sub(k, std::vector<BigInt>(k));
                std::size_t r = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (!rsel[i])
                        continue;
                    std::size_t c = 0;
                    for (std::size_t j = 0; j < n; ++j)
                        if (csel[j])
                            sub[r][c++] = a[i][j];
                    ++r;
                }
                g = gcd(g, abs(determinant(sub)));
            } while (std::prev_permutation(csel.begin(), csel.end()));
        } while (std::prev_permutation(rsel.begin(), rsel.end()));
        if (g == 0)
            break;
        divisors.push_back(g);
    }
    std::vector<BigInt> f;
    for (std::size_t k = 1; k < divisors.size(); ++k)
        f.push_back(divisors[k] / divisors[k - 1]);
    return f;
}

std::optional<std::string> audit_smith(const IntMatrix& a, const SmithForm& s)
{
    if (multiply(multiply(s.u, a), s.v) != s.d)
        return "D != U A V";
    if (abs(determinant(s.u)) != 1)
        return "U is not unimodular";
    if (abs(determinant(s.v)) != 1)
        return "V is not unimodular";
    if (multiply(s.u, s.uinv) != identity_matrix(s.u.size()) || multiply(s.v, s.vinv) != identity_matrix(s.v.size()))
        return "stored inverses are wrong";
    for (std::size_t i = 0; i < s.d.size(); ++i)
        for (std::size_t j = 0; j < s.d[i].size(); ++j) {
            bool diag = i == j && int(i) < s.rank;
            if (!diag && s.d[i][j] != 0)
                return "off-diagonal entry at " + std::to_string(i) + "," + std::to_string(j);
            if (diag && s.d[i][j] <= 0)
                return "non-positive invariant factor";
        }
    for (int i = 1; i < s.rank; ++i)
        if (s.diagonal[i] % s.diagonal[i - 1] != 0)
            return "divisibility chain broken at " + std::to_string(i);
    return std::nullopt;
}

SpanSolver::SpanSolver(const IntMatrix& m, std::size_t rows) : rows_(rows), cols_(m.empty() ? 0 : m[0].size())
{
    if (cols_ > 0)
        s_ = smith_normal_form(m, true);
}

std::optional<std::vector<BigInt>> SpanSolver::solve(const std::vector<BigInt>& x) const
{
    if (std::all_of(x.begin(), x.end(), [](const BigInt& v) { return v == 0; }))
        return std::vector<BigInt>(cols_);
    if (cols_ == 0)
        return std::nullopt;
    // D (V^-1 z) = U x
    std::vector<BigInt> ux(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < rows_; ++j)
            if (s_.u[i][j] != 0 && x[j] != 0)
                ux[i] += s_.u[i][j] * x[j];
    std::vector<BigInt> w(cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        if (int(i) < s_.rank) {
            if (ux[i] % s_.diagonal[i] != 0)
                return std::nullopt;
            w[i] = ux[i] / s_.diagonal[i];
        } else if (ux[i] != 0) {
            return std::nullopt;
        }
    }
    std::vector<BigInt> z(cols_);
    for (std::size_t i = 0; i < cols_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            if (s_.v[i][j] != 0 && w[j] != 0)
                z[i] += s_.v[i][j] * w[j];
    return z;
}

std::optional<std::vector<BigInt>> solve_integer(const IntMatrix& m, const std::vector<BigInt>& x)
{
    return SpanSolver(m, x.size()).solve(x);
}

std::vector<std::vector<BigInt>> integer_kernel(const IntMatrix& m, std::size_t cols)
{
    std::vector<std::vector<BigInt>> out;
    if (m.empty()) {
        for (std::size_t j = 0; j < cols; ++j) {
            out.emplace_back(cols);
            out.back()[j] = 1;
        }
        return out;
    }
    SmithForm s = smith_normal_form(m, true);
    for (std::size_t j = std::size_t(s.rank); j < cols; ++j) {
        std::vector<BigInt> z(cols);
        for (std::size_t i = 0; i < cols; ++i)
            z[i] = s.v[i][j];
        out.push_back(std::move(z));
    }
    return out;
}

AbGroupPresentation AbGroupPresentation::from_cyclic(const std::vector<BigInt>& orders)
{
    AbGroupPresentation g;
    std::vector<BigInt> finite;
    for (auto& o : orders) {
        if (o == 0)
            ++g.rank;
        else if (abs(o) != 1)
            finite.push_back(abs(o));
    }
    if (finite.empty())
        return g;
    IntMatrix d = zero_matrix(finite.size(), finite.size());
    for (std::size_t i = 0; i < finite.size(); ++i)
        d[i][i] = finite[i];
    for (auto& f : smith_normal_form(d, false).diagonal)
        if (f != 1)
            g.torsion.push_back(f);
    return g;
}

std::string AbGroupPresentation::str() const
{
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    if (rank > 0) {
        os << "Z";
        if (rank > 1)
            os << "^" << rank;
        first = false;
    }
    for (auto& t : torsion) {
        if (!first)
            os << " ⊕ ";
        os << "Z/" << t;
        first = false;
    }
    return os.str();
}

AbGroupPresentation direct_sum(const AbGroupPresentation& a, const AbGroupPresentation& b)
{
    std::vector<BigInt> orders(std::size_t(a.rank + b.rank), BigInt(0));
    orders.insert(orders.end(), a.torsion.begin(), a.torsion.end());
    orders.insert(orders.end(), b.torsion.begin(), b.torsion.end());
    return AbGroupPresentation::from_cyclic(orders);
}

}  // namespace tc
