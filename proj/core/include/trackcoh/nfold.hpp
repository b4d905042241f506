#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackcoh/fincat.hpp"

namespace tc {

// Corner codes: a multi-index in {0,1,2}^n packed base 3, direction d is digit d.
int pow3(int n);
int code_digit(int code, int dir);
int code_with(int code, int dir, int v);
std::vector<int> code_digits(int code, int n);
int code_from_digits(const std::vector<int>& d);

// Cubical description of an n-fold category: cells at every {0,1}^n index and,
// per direction, source, target, unit, composition and (optionally) inverse.
// Binary code bit d is the coordinate in direction d.
struct Cubical {
    int n = 0;
    std::vector<std::vector<std::string>> cells;
    std::vector<std::vector<std::vector<int>>> src, tgt, unit, inv;   // [dir][bcode]
    std::vector<std::vector<std::unordered_map<std::uint64_t, int>>> comp;  // (x then y) -> z

    explicit Cubical(int dims = 0);
    bool groupoid() const;
};

// n-fold category in multinerve corner form over {0,1,2}^n.
class NFoldCat {
public:
    int n = 0;
    std::vector<std::vector<std::string>> cells;
    std::vector<std::vector<int>> fmaps;   // ((code*n + dir)*3 + j)
    std::vector<std::vector<int>> smaps;   // ((code*n + dir)*2 + j)
    std::vector<std::vector<int>> imaps;   // code*n + dir, empty when absent

    NFoldCat() : cells(1) {}
    explicit NFoldCat(int dims);

    int ncodes() const { return pow3(n); }
    std::size_t count(int code) const { return cells[code].size(); }

    std::vector<int>& face(int dir, int code, int j) { return fmaps[(std::size_t(code) * n + dir) * 3 + j]; }
    const std::vector<int>& face(int dir, int code, int j) const { return fmaps[(std::size_t(code) * n + dir) * 3 + j]; }
    std::vector<int>& degen(int dir, int code, int j) { return smaps[(std::size_t(code) * n + dir) * 2 + j]; }
    const std::vector<int>& degen(int dir, int code, int j) const { return smaps[(std::size_t(code) * n + dir) * 2 + j]; }
    std::vector<int>& inverse(int dir, int code) { return imaps[std::size_t(code) * n + dir]; }
    const std::vector<int>& inverse(int dir, int code) const { return imaps[std::size_t(code) * n + dir]; }

    bool has_inverses() const;
    bool operator==(const NFoldCat& o) const;

    // audits return the first failure found
    std::optional<std::string> audit_shape() const;
    std::optional<std::string> audit_simplicial() const;
    std::optional<std::string> audit_segal() const;
    std::optional<std::string> audit_groupoid() const;
    std::optional<std::string> audit() const;

    // the category in direction dir at the other coordinates of code
    FinCat dir_category(int dir, int code) const;
    // fix direction dir at level v
    NFoldCat slice(int dir, int v, std::vector<int>* codemap = nullptr) const;
    NFoldCat permute(const std::vector<int>& order) const;   // new dir i = old dir order[i]
};

NFoldCat from_cubical(const Cubical& c);
NFoldCat nfold_from_category(const FinCat& c);
NFoldCat nfold_from_groupoid(const FinGroupoid& g);
NFoldCat discrete_nfold(const std::vector<std::string>& labels, int n);
NFoldCat external_product(const NFoldCat& a, const NFoldCat& b);
NFoldCat empty_nfold(int n);

struct NFoldMap {
    std::vector<std::vector<int>> m;   // per code
};

NFoldMap identity_map(const NFoldCat& x);
NFoldMap compose_maps(const NFoldMap& g, const NFoldMap& f);
std::optional<std::string> audit_map(const NFoldCat& x, const NFoldCat& y, const NFoldMap& f);

struct NFoldPullback {
    NFoldCat p;
    NFoldMap pa, pb;
};
NFoldPullback pullback_nfold(const NFoldCat& a, const NFoldCat& b, const NFoldCat& c, const NFoldMap& f,
                             const NFoldMap& g);

// X^{(r)}: bring the r-th index (1-based) to the front
NFoldCat rotate(const NFoldCat& x, int r);

struct Truncation {
    NFoldCat p;
    NFoldMap gamma;   // X -> p, read with p seen as discrete in the last direction
};
// iso classes in the last direction
Truncation truncate_p(const NFoldCat& x);

struct HdCert {
    bool ok = false;
    std::string witness;
    std::vector<NFoldCat> chain;   // p^{(n-1)}X, p^{(n-2)}p^{(n-1)}X, ...
    std::vector<std::string> discrete;   // X^d
};
HdCert is_homotopically_discrete(const NFoldCat& x);

struct Discretization {
    std::vector<std::string> labels;
    NFoldMap gamma;   // X -> d(X^d)
};
std::optional<Discretization> discretization(const NFoldCat& x);

struct HomFiber {
    NFoldCat fiber;
    std::vector<std::vector<int>> incl;   // per code of the fiber, cell index in X_1
};
// hom-fiber over classes a, b of X_0^d
HomFiber hom_fiber(const NFoldCat& x, const Discretization& d0, int a, int b);
HomFiber hom_fiber(const NFoldCat& x, const std::string& a, const std::string& b);

bool is_n_equivalence(const NFoldCat& x, const NFoldCat& y, const NFoldMap& f, std::string* why = nullptr);

struct WgReport {
    bool ok = false;
    bool groupoid = false;   // membership in the groupoid subcategory certified
    std::string witness;
};
WgReport is_weakly_globular(const NFoldCat& x);

bool segal_check(const NFoldCat& x, std::string* why = nullptr);

struct Transfer {
    NFoldCat p;
    NFoldMap w;
    bool weakly_globular = false;
    bool equivalence = false;
};
// pullback of X along d(r): d Z -> d p X, where r: Z -> p^{(n-1)}X is an (n-1)-fold map
Transfer pullback_transfer(const NFoldCat& z, const NFoldMap& r, const NFoldCat& x);
// (n-1)-fold Z seen as n-fold, discrete in the last direction
NFoldCat discrete_last(const NFoldCat& z);

std::string serialize_key(const NFoldCat& x);

}  // namespace tc
