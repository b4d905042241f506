#include <algorithm>
#include <climits>
#include <queue>
#include <tuple>

#include "trackcoh/cohomology.hpp"

namespace tc {

namespace {

using Row = std::vector<std::pair<int, long long>>;

long long mulc(long long a, long long b, long p)
{
    long long r;
    if (p > 0)
        return (long long)((__int128)a * b % p);
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("coefficient growth in elimination");
    return r;
}

long long addc(long long a, long long b, long p)
{
    long long r;
    if (p > 0) {
        r = (a + b) % p;
        return r < 0 ? r + p : r;
    }
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("coefficient growth in elimination");
    return r;
}

long long inverse_mod(long long a, long p)
{
    long long t = 0, nt = 1, r = p, nr = ((a % p) + p) % p;
    while (nr != 0) {
        long long q = r / nr;
        std::tie(t, nt) = std::make_pair(nt, t - q * nt);
        std::tie(r, nr) = std::make_pair(nr, r - q * nr);
    }
    return t < 0 ? t + p : t;
}

bool is_unit(long long v, long p)
{
    return p > 0 ? v != 0 : (v == 1 || v == -1);
}

long long entry(const Row& r, int c)
{
    auto it = std::lower_bound(r.begin(), r.end(), std::make_pair(c, LLONG_MIN));
    return (it != r.end() && it->first == c) ? it->second : 0;
}

// r -= f * b, skipping column skip
void axpy(Row& r, const Row& b, long long f, long p, std::vector<int>* fresh)
{
    Row out;
    out.reserve(r.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < r.size() || j < b.size()) {
        if (j == b.size() || (i < r.size() && r[i].first < b[j].first)) {
            out.push_back(r[i++]);
        } else if (i == r.size() || b[j].first < r[i].first) {
            long long v = addc(0, -mulc(f, b[j].second, p), p);
            if (v != 0) {
                out.emplace_back(b[j].first, v);
                if (fresh)
                    fresh->push_back(b[j].first);
            }
            ++j;
        } else {
            long long v = addc(r[i].second, -mulc(f, b[j].second, p), p);
            if (v != 0)
                out.emplace_back(r[i].first, v);
            ++i;
            ++j;
        }
    }
    r.swap(out);
}

}  // namespace

ReducedComplex::ReducedComplex(const FinCochainComplex& c, long prime, bool track) : p(prime), track_(track)
{
    int top = c.top();
    dims = c.dims;
    std::vector<std::vector<char>> dead(std::size_t(top + 1));
    for (int s = 0; s <= top; ++s)
        dead[s].assign(std::size_t(dims[s]), 0);
    std::vector<std::vector<Row>> work(static_cast<std::size_t>(top));
    ops_at_.assign(std::size_t(top + 1), {});

    for (int s = 0; s < top; ++s) {
        auto& rows = work[s];
        rows.resize(std::size_t(c.d[s].rows));
        std::vector<std::vector<int>> colrows(std::size_t(c.d[s].cols));
        for (int i = 0; i < c.d[s].rows; ++i) {
            for (auto& [j, v] : c.d[s].row[i]) {
                long long w = p > 0 ? ((v % p) + p) % p : v;
                if (w != 0 && !dead[s][j])
                    rows[i].emplace_back(j, w);
            }
            for (auto& e : rows[i])
                colrows[e.first].push_back(i);
        }
        auto& rdead = dead[s + 1];
        auto& cdead = dead[s];
        using Key = std::pair<std::size_t, int>;
        std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
        for (int j = 0; j < c.d[s].cols; ++j)
            if (!cdead[j] && !colrows[j].empty())
                heap.push({colrows[j].size(), j});
        std::vector<int> blocked;
        std::vector<int> fresh;
        auto live_rows = [&](int a) {
            auto& lst = colrows[a];
            std::sort(lst.begin(), lst.end());
            lst.erase(std::unique(lst.begin(), lst.end()), lst.end());
            std::erase_if(lst, [&](int r) { return rdead[r] || entry(rows[r], a) == 0; });
            return lst.size();
        };
        auto pivot_on = [&](int a) -> bool {
            int b = -1;
            for (int r : colrows[a])
                if (is_unit(entry(rows[r], a), p) && (b < 0 || rows[r].size() < rows[b].size()))
                    b = r;
            if (b < 0)
                return false;
            long long cv = entry(rows[b], a);
            long long cinv = p > 0 ? inverse_mod(cv, p) : cv;
            Row brow;
            for (auto& e : rows[b])
                if (e.first != a)
                    brow.push_back(e);
            Op op{s, a, b, cv, {}, {}};
            for (int r : colrows[a]) {
                if (r == b)
                    continue;
                long long g = entry(rows[r], a);
                if (track_)
                    op.col.emplace_back(r, g);
                long long f = mulc(g, cinv, p);
                fresh.clear();
                axpy(rows[r], rows[b], f, p, &fresh);
                for (int j : fresh) {
                    colrows[j].push_back(r);
                    heap.push({colrows[j].size(), j});
                }
            }
            rdead[b] = 1;
            cdead[a] = 1;
            rows[b].clear();
            rows[b].shrink_to_fit();
            colrows[a].clear();
            if (track_) {
                op.row = std::move(brow);
                ops_at_[s].push_back(int(ops_.size()));
                if (s + 1 <= top)
                    ops_at_[s + 1].push_back(int(ops_.size()));
                ops_.push_back(std::move(op));
            }
            return true;
        };
        for (bool progress = true; progress;) {
            progress = false;
            while (!heap.empty()) {
                auto [cnt, a] = heap.top();
                heap.pop();
                if (cdead[a])
                    continue;
                std::size_t now = live_rows(a);
                if (now == 0)
                    continue;
                if (now != cnt) {
                    heap.push({now, a});
                    continue;
                }
                if (pivot_on(a))
                    progress = true;
                else
                    blocked.push_back(a);
            }
            // columns without a unit may have gained one through later updates
            std::vector<int> retry;
            retry.swap(blocked);
            std::sort(retry.begin(), retry.end());
            retry.erase(std::unique(retry.begin(), retry.end()), retry.end());
            for (int a : retry)
                if (!cdead[a] && live_rows(a) > 0)
                    heap.push({colrows[a].size(), a});
            if (!progress)
                break;
        }
        // drop rows killed later as columns: handled when extracting the remainder
    }

    alive.resize(std::size_t(top + 1));
    where.resize(std::size_t(top + 1));
    for (int s = 0; s <= top; ++s) {
        where[s].assign(std::size_t(dims[s]), -1);
        for (int i = 0; i < dims[s]; ++i)
            if (!dead[s][i]) {
                where[s][i] = int(alive[s].size());
                alive[s].push_back(i);
            }
    }
    rem.resize(std::size_t(top));
    for (int s = 0; s < top; ++s) {
        auto& r = rem[s];
        r.rows = int(alive[s + 1].size());
        r.cols = int(alive[s].size());
        r.row.resize(std::size_t(r.rows));
        for (int i = 0; i < r.rows; ++i) {
            for (auto& [j, v] : work[s][alive[s + 1][i]])
                if (where[s][j] >= 0)
                    r.row[i].emplace_back(where[s][j], v);
            std::sort(r.row[i].begin(), r.row[i].end());
        }
    }
}

std::vector<long long> ReducedComplex::reduce(int s, std::vector<long long> x) const
{
    if (!track_)
        throw std::logic_error("reduce needs a tracked reduction");
    if (p > 0)
        for (auto& v : x)
            v = ((v % p) + p) % p;
    for (int k : ops_at_[s]) {
        const Op& op = ops_[k];
        if (op.level + 1 != s || x[op.b] == 0)
            continue;
        long long cinv = p > 0 ? inverse_mod(op.c, p) : op.c;
        long long yb = mulc(x[op.b], cinv, p);
        for (auto& [r, g] : op.col)
            x[r] = addc(x[r], -mulc(g, yb, p), p);
    }
    std::vector<long long> y(alive[s].size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = x[alive[s][i]];
    return y;
}

std::vector<long long> ReducedComplex::expand(int s, const std::vector<long long>& y) const
{
    if (!track_)
        throw std::logic_error("expand needs a tracked reduction");
    std::vector<long long> x(std::size_t(dims[s]), 0);
    for (std::size_t i = 0; i < y.size(); ++i)
        x[alive[s][i]] = p > 0 ? ((y[i] % p) + p) % p : y[i];
    for (auto it = ops_at_[s].rbegin(); it != ops_at_[s].rend(); ++it) {
        const Op& op = ops_[*it];
        if (op.level != s)
            continue;   // inserted rows of the level below stay zero
        long long acc = 0;
        for (auto& [j, v] : op.row)
            acc = addc(acc, mulc(v, x[j], p), p);
        long long cinv = p > 0 ? inverse_mod(op.c, p) : op.c;
        x[op.a] = addc(0, -mulc(cinv, acc, p), p);
    }
    return x;
}

}  // namespace tc
