#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackcoh/fincat.hpp"
#include "trackcoh/nfold.hpp"
#include "trackcoh/trackcat.hpp"

namespace tc {

struct TruncationOverflow : std::runtime_error {
    explicit TruncationOverflow(const std::string& path)
        : std::runtime_error("truncation overflow: " + path), offending(path) {}
    std::string offending;
};

// ---- the fattening adjunction on n-fold objects --------------------------

// new last direction: level j is X x {s,t}^{j+1}
NFoldCat ell(const NFoldCat& x);
// arrow part in the last direction
NFoldCat arrow_part(const NFoldCat& y);
NFoldMap ell_unit(const NFoldCat& x);     // x -> arrow_part(ell x)
NFoldMap ell_counit(const NFoldCat& y);   // ell(arrow_part y) -> y, y a groupoid in its last direction
std::optional<std::string> audit_ell_adjunction(const NFoldCat& x, const NFoldCat& y);

// Z0 -> pi0 with a section; its fattening is the kernel-pair equivalence relation
struct SplitPair {
    std::vector<std::string> z0, pi0;
    std::vector<int> q, t;
    std::optional<std::string> audit() const;
};
FinGroupoid fattening(const SplitPair& y);

// ---- L_n of a plain category ---------------------------------------------

// free product of a category with itself over the shared objects, as words
// alternating between copy 0 and copy 1; fold sends a word to its composite
struct FreeSquare {
    FinCat cat;
    std::vector<int> fold;   // morphism -> morphism of the input
    std::vector<std::vector<std::pair<int, int>>> words;   // (copy, morphism), first letter first
};
FreeSquare free_square(const FinCat& c, int max_words = 100000);

// the homotopically discrete n-track category L_n(A); A must have finite free squares
struct EllCategory {
    TrackCat track;
    std::vector<std::vector<int>> base;   // [hom][cell at index 0] -> morphism of A
};
EllCategory ell_category(const FinCat& a, int n, int max_words = 100000);
// hom-wise discreteness and p0 of L_n(A) against A: returns a failure description or nothing
std::optional<std::string> audit_ell_category(const EllCategory& l, const FinCat& a);

// ---- the symbolic resolution tower ---------------------------------------

// Level 0 holds the cells of X at the all-ones index. Level m >= 1 holds
// paths (src, tgt, [(y, w)]) of generators y in level m-1 with words
// w in {ss, st, ts, tt}^n; the empty path is an identity. Every element
// has a size (1 for cells and empty paths, otherwise the sum over the
// children) and all structure maps are size non-increasing.
class Tower {
public:
    Tower(const TrackCat& x, int bound);

    int n = 1;
    int nwords = 4;
    int bound = 1;
    int id_word = 0;
    std::vector<std::string> objects;

    struct Level {
        std::vector<int> src, tgt, size;
        std::vector<std::uint32_t> off;          // children offsets, size() + 1 entries
        std::vector<std::pair<int, int>> kids;   // (child id, word)
        std::unordered_multimap<std::uint64_t, int> index;
        bool closed = false;                     // enumerated up to the bound
        std::vector<std::vector<int>> face_memo, degen_memo;
        std::vector<int> wrap_memo;
        std::size_t count() const { return src.size(); }
    };

    std::size_t count(int m) const { return lv_[m].count(); }
    int src(int m, int e) const { return lv_[m].src[e]; }
    int tgt(int m, int e) const { return lv_[m].tgt[e]; }
    int size(int m, int e) const { return lv_[m].size[e]; }
    std::vector<std::pair<int, int>> children(int m, int e) const;
    int levels() const { return int(lv_.size()); }

    // enumerate every element of level m up to the bound (levels below first)
    void enumerate(int m);
    // find or add; throws TruncationOverflow when a closed level lacks it
    int intern(int m, int s, int t, const std::vector<std::pair<int, int>>& kids);
    int find(int m, int s, int t, const std::vector<std::pair<int, int>>& kids) const;

    int word_compose(int v, int w) const { return wcomp_[v * nwords + w]; }
    int word_sign(int w, int from_dir, int to_dir) const;   // product of direction signs
    int word_letter(int w, int dir, int pos) const { return (w >> (2 * dir + (pos ? 0 : 1))) & 1; }

    int wordop(int m, int e, int w);
    int face(int m, int e, int i);    // level m -> m-1, 0 <= i <= m-1
    int degen(int m, int e, int i);   // level m -> m+1, 0 <= i <= m-1
    int wrap(int m, int e);           // level m -> m+1, single generator with the identity word
    bool degenerate(int m, int e);

    std::string describe(int m, int e) const;

    // base data
    std::vector<int> base_hom, base_local;
    int base_identity(int a) const { return base_ident_[a]; }
    bool base_is_identity(int y) const;
    int base_compose(int g, int f) const;   // g after f

private:
    TrackCat x_;   // owned, so a tower may outlive its argument
    int code11_ = 0;
    std::vector<Level> lv_;
    std::vector<int> wcomp_;
    std::vector<std::vector<int>> base_wop_;   // [w][cell]
    std::vector<int> base_ident_;
    std::vector<std::vector<int>> base_off_;   // hom offsets into level 0
    std::uint64_t hash_(int s, int t, const std::pair<int, int>* k, std::size_t len) const;
    int add_(int m, int s, int t, const std::vector<std::pair<int, int>>& kids, int sz, std::uint64_t h);
    void ensure_memo_(int m);
};

struct LawReport {
    bool ok = true;
    std::size_t checked = 0;
    std::string witness;
};
// counit and coassociativity laws; generators only, or every level-1 path within the bound
LawReport comonad_laws(Tower& t, bool all_paths);
// simplicial identities on every element of levels 1..depth+1 (resolution levels 0..depth)
LawReport simplicial_identities(Tower& t, int depth);
// unique decomposition of every element into single-generator paths, and the path-count oracle
LawReport freeness_audit(Tower& t, int m);
std::size_t path_count_oracle(const Tower& t, int m);

// hom-objects of K(X), paths of length at most the bound
struct BoundedK {
    std::vector<std::string> objects;
    std::vector<NFoldCat> homs;
    int bound = 1;
};
BoundedK materialize_K(const TrackCat& x, int bound);
// requested composites of two non-identity generators must fit the bound
void check_composition_closure(const TrackCat& x, int bound);

// augmented simplicial set of hom cells at (a, b) in low degrees
struct SpotData {
    std::vector<std::vector<int>> cells;       // [level] ids with the right endpoints; level 0 is the augmentation
    std::vector<std::vector<std::vector<int>>> faces;   // [level][i][position] -> position one level down
};
SpotData spot_data(Tower& t, int a, int b, int top);
bool aspherical_spot_check(const SpotData& d, std::string* why = nullptr);

}  // namespace tc
