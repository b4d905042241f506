#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackcoh/fincat.hpp"
#include "trackcoh/nfold.hpp"

namespace tc {

// Category with object set O enriched in n-fold groupoids. n = 0 means the
// hom-objects are plain sets, i.e. an ordinary category stored hom-wise.
class TrackCat {
public:
    int n = 1;
    std::vector<std::string> objects;
    std::vector<NFoldCat> homs;                 // a*|O| + b
    std::vector<std::vector<int>> unit;         // [a][code] -> cell of hom(a,a)
    // [(a*|O| + b)*|O| + c][code]: pair_key(g in hom(b,c), f in hom(a,b)) -> cell of hom(a,c)
    std::vector<std::vector<std::unordered_map<std::uint64_t, int>>> comp;

    std::size_t nobj() const { return objects.size(); }
    int ncodes() const { return pow3(n); }
    NFoldCat& hom(int a, int b) { return homs[a * nobj() + b]; }
    const NFoldCat& hom(int a, int b) const { return homs[a * nobj() + b]; }
    std::vector<std::unordered_map<std::uint64_t, int>>& comp_table(int a, int b, int c)
    {
        return comp[(a * nobj() + b) * nobj() + c];
    }
    const std::vector<std::unordered_map<std::uint64_t, int>>& comp_table(int a, int b, int c) const
    {
        return comp[(a * nobj() + b) * nobj() + c];
    }
    // g o f at one corner index, -1 when missing
    int compose(int a, int b, int c, int code, int g, int f) const;
    int object(const std::string& s) const;

    // enrichment laws; with require_wg every hom must be a weakly globular groupoid
    std::optional<std::string> audit(bool require_wg = true) const;
};

// hom-wise builder: compose(a, b, c, code, g, f) returns g o f
using ComposeFn = std::function<int(int, int, int, int, int, int)>;
TrackCat make_track(int n, std::vector<std::string> objects, std::vector<NFoldCat> homs,
                    std::vector<std::vector<int>> unit, const ComposeFn& compose);

struct TrackMap {
    std::vector<int> obj;
    std::vector<NFoldMap> hom;   // a*|O_src| + b
};
TrackMap identity_track_map(const TrackCat& x);
std::optional<std::string> audit_track_map(const TrackCat& x, const TrackCat& y, const TrackMap& f);
// hom-wise n-equivalence plus essential surjectivity after p0
bool is_track_equivalence(const TrackCat& x, const TrackCat& y, const TrackMap& f, std::string* why = nullptr);

// fixtures and small constructors
TrackCat track_T1();
TrackCat track_discrete(const std::vector<std::string>& objects, int n = 1);
TrackCat track_from_category(const FinCat& c, int n = 1);   // discrete hom-objects
// hom-wise fattening in a new last direction; needs no composable pair of non-identity cells
TrackCat fatten_last(const TrackCat& x);
TrackCat track_FAT2();
TrackCat relabel_objects(const TrackCat& x, const std::vector<std::string>& names);

// internal form: one n-fold object of arrows over O with identity-on-objects structure maps
struct InternalForm {
    int n = 1;
    std::vector<std::string> objects;
    NFoldCat arrows;
    std::vector<std::vector<int>> src, tgt;                 // [code][arrow]
    std::vector<std::vector<int>> face_obj, degen_obj;      // object action, parallel to fmaps/smaps
    std::vector<std::vector<int>> unit;                     // [code][object]
    std::vector<std::unordered_map<std::uint64_t, int>> comp;  // [code]
};
InternalForm to_internal(const TrackCat& x);
TrackCat from_internal(const InternalForm& f);   // throws when a structure map moves objects

// the multinerve as levelwise categories over O, corner-truncated
struct LevelNerve {
    int n = 1;
    std::vector<FinCat> level;            // [code]
    std::vector<std::vector<int>> fmaps;  // morphism maps, same slots as NFoldCat::fmaps
    std::vector<std::vector<int>> smaps;
};
LevelNerve nerve_levels(const TrackCat& x);
LevelNerve nerve_levels(const InternalForm& f);

// cells of an n-fold category at an arbitrary multi-index, rebuilt by strict Segal pullbacks
class MultiLevel {
public:
    MultiLevel(const NFoldCat& x, std::vector<int> index);
    std::vector<int> index;
    std::vector<std::vector<int>> elems;   // grid of corner cells, row-major over positions
    int code = 0;                          // corner code holding the grid cells
    int find(const std::vector<int>& grid) const;
    std::size_t size() const { return elems.size(); }
    // grid of the face / degeneracy in one direction
    std::vector<int> face(const NFoldCat& x, int dir, int i, int e) const;
    std::vector<int> degen(const NFoldCat& x, int dir, int i, int e) const;

private:
    std::unordered_map<std::string, int> lookup_;
};

struct SOCat {
    std::vector<std::string> objects;
    std::vector<FinCat> level;                      // simplicial degree 0..3
    std::vector<std::vector<std::vector<int>>> face, degen;   // [m][i] -> morphism map
    std::optional<std::string> audit() const;
};
SOCat diag_D(const TrackCat& x, int top = 3);

// truncation of every hom-object down to dimension k (k = 1 gives p1, k = 0 gives p0)
struct TrackTruncation {
    TrackCat p;
    TrackMap gamma;   // read hom-wise through the discrete embedding
};
TrackTruncation truncate_homs(const TrackCat& x, int k);
TrackCat p1_truncate(const TrackCat& x);
TrackCat p0_truncate(const TrackCat& x);
FinCat as_category(const TrackCat& x);   // n = 0 input
TrackMap truncate_map(const TrackCat& x, const TrackCat& y, const TrackMap& f, int k);

}  // namespace tc
