#pragma once

#include "cooperad/matrix.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace cooperad {

class ChainMap;

// Bounded chain complex of finite-dimensional Q-vector spaces, homological
// grading: d_n : X_n -> X_{n-1}, d o d = 0. Degrees with zero dimension are
// not stored. Values are immutable after construction by convention; all
// operations below are pure.
class ChainComplex {
public:
    ChainComplex() = default;

    static ChainComplex zero() { return ChainComplex(); }
    // Q concentrated in a single degree.
    static ChainComplex line(int degree);
    static ChainComplex fromDims(const std::map<int, int>& dims,
                                 const std::map<int, Matrix>& diffs);

    int dim(int n) const;
    int totalDim() const;
    bool isZero() const { return dims_.empty(); }
    const std::map<int, int>& dims() const { return dims_; }
    // d_n : X_n -> X_{n-1}; zero matrix of the right shape when absent.
    Matrix differential(int n) const;
    void setDifferential(int n, Matrix d);

    int minDegree() const;
    int maxDegree() const;

    bool operator==(const ChainComplex& o) const;
    bool operator!=(const ChainComplex& o) const { return !(*this == o); }

    // d_{n-1} o d_n == 0 everywhere and shapes consistent.
    bool valid(std::string* why = nullptr) const;

private:
    std::map<int, int> dims_;
    std::map<int, Matrix> diff_;
};

// Degree-zero chain map f : X -> Y, blocks f_n : X_n -> Y_n.
class ChainMap {
public:
    ChainMap() = default;
    ChainMap(ChainComplex source, ChainComplex target);

    static ChainMap identity(const ChainComplex& x);
    static ChainMap zeroMap(const ChainComplex& x, const ChainComplex& y);

    const ChainComplex& source() const { return src_; }
    const ChainComplex& target() const { return tgt_; }

    Matrix block(int n) const;
    void setBlock(int n, Matrix m);

    bool isZero() const;
    bool isIdentity() const;
    bool operator==(const ChainMap& o) const;

    // commutes with differentials degreewise.
    bool valid(std::string* why = nullptr) const;

    ChainMap compose(const ChainMap& g) const; // this o g
    ChainMap operator+(const ChainMap& o) const;
    ChainMap operator-(const ChainMap& o) const;
    ChainMap scale(const Rational& s) const;

private:
    ChainComplex src_, tgt_;
    std::map<int, Matrix> blocks_;
};

// ---- constructions -------------------------------------------------------

struct SumWitness {
    ChainComplex total;
    std::vector<ChainMap> include; // X_i -> total
    std::vector<ChainMap> project; // total -> X_i
};
SumWitness directSum(const std::vector<ChainComplex>& parts);

// Graded tensor product of a list of factors. Basis at degree n: for each
// degree tuple (p_1..p_k) with sum n, in lexicographic order, the product
// basis with the first factor slowest (row-major). Differential uses the
// Koszul rule d = sum_i (+-1)^{p_1+..+p_{i-1}} 1 x..x d_i x..x 1.
// The empty product is Q in degree 0.
class TensorProduct {
public:
    explicit TensorProduct(std::vector<ChainComplex> factors);

    const ChainComplex& complex() const { return total_; }
    const std::vector<ChainComplex>& factors() const { return factors_; }

    // Decode a basis index of the product at degree n.
    struct BasisElement {
        std::vector<int> degrees; // degree of each factor
        std::vector<int> indices; // basis index within each factor degree
    };
    BasisElement decode(int n, int index) const;
    int encode(int n, const BasisElement& e) const;

private:
    std::vector<ChainComplex> factors_;
    ChainComplex total_;
    // per degree: list of degree tuples (lex order) with base offset
    std::map<int, std::vector<std::pair<std::vector<int>, int>>> blocks_;
};

TensorProduct tensorMany(const std::vector<ChainComplex>& factors);
inline ChainComplex tensor(const ChainComplex& x, const ChainComplex& y) {
    return TensorProduct({x, y}).complex();
}

// Kronecker product of degree-zero chain maps, in tensorMany bases.
ChainMap tensorHom(const std::vector<ChainMap>& maps);

// The map tensorMany(src) -> tensorMany(dst) where dst[perm[i]] = src[i],
// with Koszul sign (-1)^{p_i p_j} for each inversion. perm[i] is the target
// position of source factor i.
ChainMap permuteFactors(const std::vector<ChainComplex>& src, const std::vector<int>& perm);

// Symmetry x (x) y -> y (x) x with Koszul signs (special case of the above).
ChainMap braiding(const ChainComplex& x, const ChainComplex& y);

// Reassociation tensorMany({tensorMany(G_1), ..., tensorMany(G_r)}) ->
// tensorMany(G_1 ++ ... ++ G_r). Pure basis reordering, no signs.
ChainMap flattenTensor(const std::vector<std::vector<ChainComplex>>& groups);

// (X[k])_n = X_{n-k}, differential scaled by (-1)^k.
ChainComplex shift(const ChainComplex& x, int k);
ChainMap shiftMap(const ChainMap& f, int k);

// Canonical iso tensorMany(F_0..F_{j-1}, F_j[k], F_{j+1}..) ->
// shift(tensorMany(F_0..F_j..), k) with sign (-1)^{k * (p_0+..+p_{j-1})}.
// `factors` are the unshifted factors.
ChainMap shiftFactorIso(const std::vector<ChainComplex>& factors, int j, int k);

struct ConeWitness {
    ChainComplex cone;   // cone(f)_n = Y_n + X_{n-1}, d(y,x) = (dy + fx, -dx)
    ChainMap fromTarget; // Y -> cone
    ChainMap toShiftedSource; // cone -> X[1]
};
ConeWitness cone(const ChainMap& f);

struct FibWitness {
    ChainComplex fib;    // cone(f)[-1]; fib_n = Y_{n+1} + X_n, d(y,x) = (-dy - fx, dx)
    ChainMap toSource;   // fib -> X, (y, x) -> x
    ChainMap fromShiftedTarget; // Y[-1] -> fib, y -> (y, 0)
};
FibWitness fib(const ChainMap& f);

// cone(f) with the canonical maps per the cofiber convention.
inline ConeWitness cofib(const ChainMap& f) { return cone(f); }

// Canonical iso tensorMany(F_0..,cone(g),..F_k) -> cone(tensorHom(id,..,g,..,id))
// where the cone sits in slot j. Sign (-1)^{p_0+..+p_{j-1}} on the X-part.
ChainMap coneFactorIso(const std::vector<ChainComplex>& factors, int j, const ChainMap& g);

struct SubcomplexWitness {
    ChainComplex sub;
    ChainMap inclusion;
};
// Degreewise kernel and image of f, as subcomplexes with inclusions.
// dim ker + dim im = dim source, degreewise.
std::pair<SubcomplexWitness, SubcomplexWitness> kernelImage(const ChainMap& f);

std::map<int, int> homology(const ChainComplex& x);

// Image of an idempotent chain endomorphism e, with inclusion i and
// projection p, p o i = id. Basis: pivot columns of e per degree, scanned
// left to right (canonical).
struct IdempotentImage {
    ChainComplex image;
    ChainMap inclusion;  // image -> carrier
    ChainMap projection; // carrier -> image
    std::map<int, std::vector<int>> pivots; // per degree, carrier column indices
};
IdempotentImage idempotentImage(const ChainMap& e);

// Degreewise linear dual for complexes concentrated in degree 0 (the only
// case dualization is used for). Throws otherwise.
ChainComplex dualDegreeZero(const ChainComplex& x);

} // namespace cooperad
