#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "trackcoh/beckmod.hpp"
#include "trackcoh/comonad.hpp"

namespace tc {

using BigInt = boost::multiprecision::cpp_int;
using IntMatrix = std::vector<std::vector<BigInt>>;   // row-major

// ---- exact integer linear algebra ---------------------------------------

IntMatrix zero_matrix(std::size_t rows, std::size_t cols);
IntMatrix identity_matrix(std::size_t n);
IntMatrix multiply(const IntMatrix& a, const IntMatrix& b);
BigInt determinant(const IntMatrix& a);

// d = u * a * v, u and v unimodular, d diagonal with d_1 | d_2 | ... (non-negative)
struct SmithForm {
    IntMatrix d, u, v, uinv, vinv;   // transforms only when requested
    std::vector<BigInt> diagonal;    // the non-zero invariant factors
    int rank = 0;
};
SmithForm smith_normal_form(const IntMatrix& a, bool transforms = true);
// brute force: gcds of k x k minors give the determinantal divisors,
// returned as the invariant factors (quotients of consecutive divisors)
std::vector<BigInt> minor_gcd_factors(const IntMatrix& a);
// D = U A V, |det U| = |det V| = 1, divisibility chain
std::optional<std::string> audit_smith(const IntMatrix& a, const SmithForm& s);

// column span of m, factored once for repeated membership tests
class SpanSolver {
public:
    explicit SpanSolver(const IntMatrix& m, std::size_t rows);
    // one integer solution of m z = x, if any
    std::optional<std::vector<BigInt>> solve(const std::vector<BigInt>& x) const;
    bool contains(const std::vector<BigInt>& x) const { return solve(x).has_value(); }

private:
    std::size_t rows_ = 0, cols_ = 0;
    SmithForm s_;
};
std::optional<std::vector<BigInt>> solve_integer(const IntMatrix& m, const std::vector<BigInt>& x);
// generators of {z : m z = 0}
std::vector<std::vector<BigInt>> integer_kernel(const IntMatrix& m, std::size_t cols);

// ---- presentations -------------------------------------------------------

struct AbGroupPresentation {
    int rank = 0;
    std::vector<BigInt> torsion;   // d_1 | d_2 | ..., every d_i > 1

    // direct sum of cyclic groups; 0 stands for Z and 1 is dropped
    static AbGroupPresentation from_cyclic(const std::vector<BigInt>& orders);
    bool is_zero() const { return rank == 0 && torsion.empty(); }
    std::string str() const;
    bool operator==(const AbGroupPresentation& o) const { return rank == o.rank && torsion == o.torsion; }
};
AbGroupPresentation direct_sum(const AbGroupPresentation& a, const AbGroupPresentation& b);

// ---- cochain complexes ---------------------------------------------------

struct SparseMatrix {
    int rows = 0, cols = 0;
    std::vector<std::vector<std::pair<int, long long>>> row;   // sorted by column
    std::size_t nnz() const;
    IntMatrix dense() const;
};
SparseMatrix sparse_product(const SparseMatrix& b, const SparseMatrix& a);   // b * a

// d[s]: C^s -> C^{s+1}, stored with rows indexed by C^{s+1}
struct FinCochainComplex {
    std::vector<int> dims;
    std::vector<SparseMatrix> d;
    int top() const { return int(dims.size()) - 1; }
};
std::optional<std::string> audit_dd(const FinCochainComplex& c);

struct DegreeGuard : std::runtime_error {
    explicit DegreeGuard(const std::string& what) : std::runtime_error(what) {}
};

// The cosimplicial groups computed from a resolution tower, in generator form.
// Level s holds assignments on tower elements of level s (two copies for the
// middle term); coface 0 evaluates along the children with the kind's word
// coefficients, coface i >= 1 along face i-1. Constant coefficients enter only
// at the cohomology stage.
enum class CochainKind { AQ, Alg, Left, Mid };
const char* kind_name(CochainKind k);

struct CochainTerm {
    int elem, copy, coef;
};

class CochainModel {
public:
    CochainModel(Tower& t, CochainKind kind, int top);

    Tower& tower;
    CochainKind kind;
    int top;
    int copies = 1;
    std::vector<std::vector<int>> basis;   // [level] non-degenerate elements
    std::vector<std::vector<int>> pos;     // [level][element] -> basis position or -1

    int dim(int m) const { return int(basis[m].size()) * copies; }
    int column(int m, int e, int copy) const { return pos[m][e] < 0 ? -1 : pos[m][e] * copies + copy; }
    // dual face i (0..m) of (g, copy) at level m >= 1, as a combination at level m-1
    void face_terms(int m, int g, int copy, int i, std::vector<CochainTerm>& out);
    // dual degeneracy j (0..m) from level m to m+1
    int degeneracy(int m, int y, int j);
    // coefficient and copy of a child under the kind's convention
    int child_coef(int w) const;
    int child_copy(int w, int copy) const;
};

inline CochainModel build_C_complex(Tower& t, int top) { return CochainModel(t, CochainKind::AQ, top); }
inline CochainModel build_D_complex(Tower& t, int top) { return CochainModel(t, CochainKind::Alg, top); }

// Moore complex: cochains vanishing on degenerate elements
FinCochainComplex normalize(CochainModel& m);
// every element, no normalization, up to the given level
FinCochainComplex symbolic_complex(CochainModel& m, int top);
// the coboundary of a normalized cochain vanishes on degenerate elements
LawReport degenerate_rows_vanish(CochainModel& m);
// simplicial identities of the dual faces and degeneracies on every element
LawReport cosimplicial_identities(CochainModel& m);

// constant coefficients A = Z/k_1 + ... (0 stands for Z); empty means the zero module
std::vector<long> constant_factors(const BeckModule& m);

// ---- reduction and cohomology --------------------------------------------

// Gaussian elimination of unit pivots in every differential, over Z (p = 0)
// or F_p. The remainder complex is homotopy equivalent to the input; with
// tracking the comparison maps are kept as elimination records.
class ReducedComplex {
public:
    ReducedComplex(const FinCochainComplex& c, long p, bool track);

    long p = 0;
    std::vector<int> dims;
    std::vector<std::vector<int>> alive;   // [level] surviving original indices
    std::vector<std::vector<int>> where;   // [level][original] -> remainder index or -1
    std::vector<SparseMatrix> rem;         // remainder differentials

    // original cochain -> remainder cochain (chain map f)
    std::vector<long long> reduce(int s, std::vector<long long> x) const;
    // remainder cochain -> original cochain (chain map g)
    std::vector<long long> expand(int s, const std::vector<long long>& y) const;

private:
    struct Op {
        int level, a, b;
        long long c;
        std::vector<std::pair<int, long long>> row, col;
    };
    std::vector<Op> ops_;
    std::vector<std::vector<int>> ops_at_;   // [level] op indices with that level
    bool track_ = false;
};

enum class Method { Auto, Integer, Prime };

// H^s(Hom(C, A)) for s = 0..upto, all below the top level of c
std::vector<AbGroupPresentation> cohomology_all(const FinCochainComplex& c, const std::vector<long>& factors,
                                                int upto, Method method = Method::Auto);
AbGroupPresentation cohomology_of(const FinCochainComplex& c, const std::vector<long>& factors, int s,
                                  Method method = Method::Auto);
// kernel of coface 0 minus coface 1 on all level-0 and level-1 elements
AbGroupPresentation H0_oracle(CochainModel& m, const std::vector<long>& factors);

// H^s of a tracked reduction as generators with orders and a coordinate map
struct CohomologyGroup {
    int degree = 0;
    std::vector<BigInt> orders;    // per generator, 0 = infinite
    IntMatrix to_coords;           // generator coordinates of a remainder cocycle
    IntMatrix gens;                // [generator] remainder cochain
    AbGroupPresentation presentation() const;
    std::vector<BigInt> coords(const std::vector<long long>& remainder_cocycle) const;
};
CohomologyGroup cohomology_group(const ReducedComplex& r, int s);

// group given by generators and relation columns
struct Presented {
    int gens = 0;
    IntMatrix rel;   // gens x relations
};
Presented presented(const CohomologyGroup& g);
// exactness of A -alpha-> B -beta-> C at B; maps act on generator coordinates
std::optional<std::string> exact_at(const IntMatrix& alpha, int a_gens, const Presented& b, const IntMatrix& beta,
                                    const Presented& c);

// ---- short and long exact sequences --------------------------------------

struct SesReport {
    int level = 0;
    int dim_left = 0, dim_mid = 0, dim_right = 0;   // free ranks over A
    AxiomReport audits;
};
// levelwise 0 -> Left^s -> Mid^s -> Right^s -> 0 with constant coefficients Z/k or Z
SesReport ses_levelwise(Tower& t, long k, int s);

// test hooks that corrupt a map of the sequence before the exactness audit;
// the connecting faults are invisible when the groups next to them vanish
enum class LesFault { None, ZeroConnecting, PerturbConnecting, ZeroProjection };

struct LesReport {
    long k = 0;
    int top = 0;
    std::vector<AbGroupPresentation> left, mid, right;   // degrees 0..top-1
    std::vector<IntMatrix> connecting;                   // [s]: H^s(Right) -> H^{s+1}(Left)
    struct Slot {
        std::string name;
        bool exact = true;
        std::string witness;
    };
    std::vector<Slot> slots;
    AxiomReport audits;   // chain maps, lifts
    bool ok() const;
};
// long exact sequence in degrees 0..top-1 with constant coefficients Z (k = 0) or Z/p
LesReport les(Tower& t, long k, int top, LesFault fault = LesFault::None);

// ---- the free-base replacement -------------------------------------------

struct SXData {
    TrackCat sx;
    TrackMap v;                    // S(X) -> X
    FinCat base;                   // p0 of the object level of S(X)
    bool base_free = false;
    bool v_equivalence = false;
    std::string why;
};
// p0 of the level-0 (n-1)-track category, as a plain category
FinCat p0_object_level(const TrackCat& x);
SXData build_SX(const TrackCat& x);

struct CorollaryReport {
    int s = 2;
    AbGroupPresentation aq;    // H^{s+1}_AQ(X)
    AbGroupPresentation alg;   // H^s_Alg(S(X))
    bool equal = false;
    bool middle_vanishes = false;
    std::vector<AbGroupPresentation> middle;   // H^1.. of the middle column of S(X)
    AxiomReport audits;
};
CorollaryReport corollary_iso(const TrackCat& x, const std::vector<long>& factors, int s, int bound);

}  // namespace tc
