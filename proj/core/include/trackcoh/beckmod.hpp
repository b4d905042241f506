#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackcoh/trackcat.hpp"

namespace tc {

// Abelian group object in a slice Set/B: a bundle of groups over the base
// points, with unit section, fibrewise addition and inverse.
struct AbGroupObject {
    std::vector<std::string> base;    // base points
    std::vector<std::string> labels;  // carrier elements
    std::vector<int> over;            // element -> base point
    std::vector<int> zero;            // base point -> unit element
    std::vector<int> neg;
    std::unordered_map<std::uint64_t, int> add;   // pair_key(x, y) for x, y over one point

    std::size_t size() const { return over.size(); }
    int plus(int x, int y) const;   // -1 when undefined
    // associativity, commutativity via the switch, inverses, zero
    std::optional<std::string> audit() const;
};

// finite abelian group Z/d1 + ... + Z/dk (d = 0 would be Z and is not enumerable)
std::vector<std::vector<long>> group_elements(const std::vector<long>& factors);

struct AxiomReport {
    struct Item {
        std::string name;
        bool ok = true;
        std::string witness;
    };
    std::vector<Item> items;
    bool ok() const;
    void add(const std::string& name, const std::optional<std::string>& failure);
    std::string first_failure() const;
};

// Track data of a 1-track category, numbered globally over all homs.
struct TrackTable {
    std::vector<int> hom_off;            // hom -> first global track
    std::vector<int> cell_off;           // hom -> first global 1-cell
    std::vector<int> hom_of, local;      // global track -> hom, local cell
    std::vector<int> src, tgt;           // global track -> global 1-cell
    std::vector<int> ident;              // global 1-cell -> identity track
    std::vector<int> inv;                // global track -> inverse (-1 when absent)
    std::unordered_map<std::uint64_t, int> vcomp;   // pair_key(second, first) -> composite
    std::unordered_map<std::uint64_t, int> hcomp;   // pair_key(g, f) -> g o f
    std::vector<std::string> label;
    std::size_t size() const { return hom_of.size(); }
};
TrackTable track_table(const TrackCat& q);

// Beck module over a 1-track category Q, stored as fibre data over the tracks.
// Finite fibres are enumerated; free factors are kept symbolic and the
// module is then transport-trivial by construction.
struct BeckModule {
    std::string name;
    TrackCat base;
    TrackTable tracks;
    std::vector<std::vector<long>> factors;   // per global track, 0 stands for Z
    bool symbolic = false;
    bool transport_trivial = false;
    AbGroupObject carrier;                    // over the global tracks when finite
    std::vector<int> fiber_off;               // track -> first element
    std::vector<std::vector<long>> coords;    // element -> coordinates
    // composition of module elements over composable tracks
    std::unordered_map<std::uint64_t, int> vcomp;   // pair_key(second, first)
    std::unordered_map<std::uint64_t, int> hcomp;   // pair_key(g, f)

    int element(int track, const std::vector<long>& c) const;
};

// Q1 x A with fibrewise addition and componentwise compositions
BeckModule constant_module(const TrackCat& q, const std::vector<long>& factors);
BeckModule zero_module(const TrackCat& q);
AxiomReport check_module_axioms(const BeckModule& m);

struct IntVecHash {
    std::size_t operator()(const std::vector<int>& v) const
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (int x : v)
            h = (h ^ std::uint32_t(x)) * 0x100000001b3ull;
        return std::size_t(h);
    }
};

// n-fold Eilenberg-Mac Lane object. Direction 0 is Q's groupoid direction,
// directions 1..n-1 carry the group multiplication. A corner cell is a
// simplex of Q's nerve plus, when every group digit is positive, a grid of
// module elements over each of its tracks.
struct EMObject {
    int n = 2;
    BeckModule module;
    TrackCat track;
    // [hom][code][cell]
    std::vector<std::vector<std::vector<int>>> rho;    // -> cell of Q's hom at the direction-0 level
    std::vector<std::vector<std::vector<std::vector<int>>>> elems;   // module elements, track-major
    std::vector<std::vector<std::unordered_map<std::vector<int>, int, IntVecHash>>> lookup;   // (rho, elems...) -> cell

    int phi(int hom, int code, int qcell) const;   // zero section
    int mu(int hom, int code, int x, int y) const;  // -1 when over different cells
    int inv(int hom, int code, int x) const;
};
EMObject build_EMn(const BeckModule& m, int n);
inline EMObject build_EM2(const BeckModule& m) { return build_EMn(m, 2); }
// membership, abelian group object, corner table and p E = d Q
AxiomReport verify_em(const EMObject& e);
// corner table alone: returns a witness index on mismatch
std::optional<std::string> em_corner_table(const EMObject& e);

// pullback along a track map f: W -> Q (both 1-track categories)
BeckModule pullback_module(const TrackCat& w, const TrackMap& f, const BeckModule& m);
// E(W, f*M) against the pullback of E(Q, M) along d f, cell by cell
std::optional<std::string> em_pullback_check(const TrackCat& w, const TrackMap& f, const BeckModule& m, int n);

// restriction along dZ0 -> Z, the inclusion of the identity tracks
struct Restriction {
    TrackCat dz0;
    TrackMap j;
    BeckModule module;
};
Restriction j_restriction(const TrackCat& z, const BeckModule& m);

}  // namespace tc
