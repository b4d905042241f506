#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tc {

struct ObjSet {
    std::vector<std::string> labels;

    int index(const std::string& s) const;
    std::size_t size() const { return labels.size(); }
};

struct Edge {
    std::string id;
    int src = 0;
    int tgt = 0;
};

struct FinGraph {
    ObjSet objects;
    std::vector<Edge> edges;

    std::optional<std::string> audit() const;
};

inline std::uint64_t pair_key(int a, int b)
{
    return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

// Finite category with an explicit composition table. comp is keyed by
// (g, f) and holds g o f, defined when tgt(f) == src(g).
class FinCat {
public:
    ObjSet objects;
    std::vector<std::string> names;
    std::vector<int> src, tgt;
    std::vector<int> ident;
    std::unordered_map<std::uint64_t, int> comp;

    std::size_t nmor() const { return names.size(); }
    int add_morphism(std::string name, int s, int t);
    void set_comp(int g, int f, int gf) { comp[pair_key(g, f)] = gf; }
    // -1 when not composable or not in the table
    int compose(int g, int f) const;
    int find(const std::string& name) const;
    bool is_identity(int f) const { return ident[src[f]] == f; }

    // endpoints, units, closure and associativity; returns the first failure
    std::optional<std::string> audit() const;
};

class FinGroupoid {
public:
    FinCat cat;
    std::vector<int> inv;

    std::optional<std::string> audit() const;
};

// At most one arrow between any two objects, stored as the relation itself.
struct EqRelGroupoid {
    ObjSet objects;
    std::vector<std::pair<int, int>> relation;

    std::optional<std::string> audit() const;
    FinGroupoid as_groupoid() const;
};

struct FunctorMap {
    std::vector<int> obj;
    std::vector<int> mor;
};

std::optional<std::string> audit_functor(const FinCat& a, const FinCat& b, const FunctorMap& f);

struct IsoClasses {
    int count = 0;
    std::vector<int> cls;        // object -> class
    std::vector<int> rep;        // class -> canonical (smallest) object
};

// Inverse of f when it has one, else -1.
int find_inverse(const FinCat& c, int f);
IsoClasses iso_classes(const FinCat& c);

struct FreeCat {
    FinGraph base;
    int bound = 1;
    bool truncated = false;
    FinCat cat;
    std::vector<std::vector<int>> paths;   // morphism -> edge sequence (empty for identities)
};

FreeCat free_category(const FinGraph& g, int bound);
FinGraph underlying_graph(const FinCat& c);

struct PullbackCat {
    FinCat cat;
    FunctorMap pa, pb;
};
PullbackCat pullback_cat(const FinCat& a, const FinCat& b, const FinCat& d,
                         const FunctorMap& f, const FunctorMap& g);

bool is_full(const FinCat& a, const FinCat& b, const FunctorMap& f);
bool is_faithful(const FinCat& a, const FinCat& b, const FunctorMap& f);
bool is_essentially_surjective(const FinCat& a, const FinCat& b, const FunctorMap& f);
bool is_equivalence(const FinCat& a, const FinCat& b, const FunctorMap& f);

// small constructors
FinCat discrete_cat(const std::vector<std::string>& objs);
FinGroupoid indiscrete_groupoid(const std::vector<std::string>& objs);
FinCat terminal_cat();
FunctorMap identity_functor(const FinCat& c);
FunctorMap compose_functors(const FunctorMap& g, const FunctorMap& f);
FinCat product_cat(const FinCat& a, const FinCat& b);
FinCat opposite_cat(const FinCat& c);

// freeness: every morphism has a unique decomposition into indecomposable
// non-identity morphisms and the indecomposables generate freely
bool is_free_category(const FinCat& c, std::string* why = nullptr);

}  // namespace tc
