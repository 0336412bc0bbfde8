#pragma once

#include "cooperad/group.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace cooperad {

struct ColorMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ArityMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadArity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Finite totally ordered set of color names; the order fixes canonical
// multiset forms and basis layouts everywhere downstream.
class ColorSet {
public:
    ColorSet() = default;
    explicit ColorSet(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_->size()); }
    const std::string& name(int i) const { return (*names_)[i]; }
    int index(const std::string& n) const; // -1 if absent
    const std::vector<std::string>& names() const { return *names_; }

    bool operator==(const ColorSet& o) const { return *names_ == *o.names_; }
    bool operator!=(const ColorSet& o) const { return !(*this == o); }

private:
    std::shared_ptr<const std::vector<std::string>> names_ =
        std::make_shared<const std::vector<std::string>>();
};

// A ⊔ dA; the d-copy keeps A's order and sorts after all of A.
ColorSet doubledColors(const ColorSet& a);
inline int dColor(const ColorSet& a, int c) { return a.size() + c; }

// Sorted list of color indices; repetitions allowed.
using Multiset = std::vector<int>;
using ComponentKey = std::pair<Multiset, int>; // (inputs, output color)

// Stable sort permutation: s[j] = original position of the j-th element of
// the sorted tuple, ties kept in original order.
std::vector<int> stableSortPerm(const std::vector<int>& tuple);
std::vector<int> sortedTuple(const std::vector<int>& tuple);
std::vector<int> inversePerm(const std::vector<int>& p);

std::vector<std::vector<int>> allMultisets(int nColors, int size);

// Per-degree inverse of an isomorphism of complexes.
ChainMap isoInverse(const ChainMap& f);

struct ColoredObject {
    ColorSet colors;
    std::map<int, ChainComplex> values;

    ChainComplex at(int c) const;
    void set(int c, ChainComplex x);
    bool isZero() const;
    bool operator==(const ColoredObject& o) const;
};

struct ColoredMap {
    ColoredObject source, target;
    std::map<int, ChainMap> maps;

    ChainMap at(int c) const;
    void set(int c, ChainMap f);
    bool valid(std::string* why = nullptr) const;
    static ColoredMap identity(const ColoredObject& x);
    static ColoredMap zero(const ColoredObject& x, const ColoredObject& y);
    ColoredMap compose(const ColoredMap& g) const;
    ColoredMap operator+(const ColoredMap& o) const;
    ColoredMap operator-(const ColoredMap& o) const;
};

struct SymSeqComponent {
    ChainComplex space;
    GroupAction action; // Young subgroup of the sorted multiset
};

// Colored symmetric sequence, truncated at maxArity. For oneReduced
// sequences, singleton components are implicitly the unit at ({a}, a) and
// zero at ({b}, a) for b != a; arity-0 components are zero. Stored
// components live at sorted multisets of size >= 2 (size >= 1 when not
// oneReduced).
class SymSeq {
public:
    SymSeq() = default;
    SymSeq(ColorSet colors, int maxArity, bool oneReduced = true);

    const ColorSet& colors() const { return colors_; }
    int maxArity() const { return maxArity_; }
    bool oneReduced() const { return oneReduced_; }

    // Resolves implicit units; returns zero components with trivial action
    // when nothing is stored.
    SymSeqComponent component(const Multiset& m, int outColor) const;
    bool hasStored(const Multiset& m, int outColor) const;
    const std::map<ComponentKey, SymSeqComponent>& stored() const { return comps_; }

    void setComponent(const Multiset& m, int outColor, SymSeqComponent c);

    bool operator==(const SymSeq& o) const;

    // Coxeter checks on every stored action.
    bool checkActions(std::string* why = nullptr) const;

private:
    ColorSet colors_;
    int maxArity_ = 0;
    bool oneReduced_ = true;
    std::map<ComponentKey, SymSeqComponent> comps_;
};

// Per-component map of symmetric sequences (implicitly the identity on
// singleton units). Components not present are zero.
struct SymSeqHom {
    const SymSeq* src = nullptr;
    const SymSeq* tgt = nullptr;
    std::map<ComponentKey, ChainMap> comps;

    ChainMap at(const Multiset& m, int outColor) const;
    bool equivariant(std::string* why = nullptr) const;
    static SymSeqHom identity(const SymSeq& s);
};

// ---- circle product --------------------------------------------------------

// Two-level tree: k root children with output colors rootColors and input
// blocks `blocks` (an ordered set partition, each block ascending).
struct TreeTerm {
    int k = 0;
    std::vector<int> rootColors;
    std::vector<std::vector<int>> blocks;

    bool operator==(const TreeTerm& o) const {
        return k == o.k && rootColors == o.rootColors && blocks == o.blocks;
    }
};

// Canonical enumeration order of terms for one component: by k, then root
// colors lexicographically, then the ordered partition (blocks compared
// lexicographically as a tuple, each block by colex set order).
struct CircleComponentWitness {
    std::vector<TreeTerm> terms;                  // nonzero terms only
    std::vector<TensorProduct> termSpaces;        // [root, block_1, ..., block_k]
    SumWitness bigSum;
    IdempotentImage sym;

    int termIndex(const TreeTerm& t) const; // -1 if absent
    // canonical maps through the symmetrizer splitting
    ChainMap termInclusion(int i) const;  // termSpace -> component
    ChainMap termExtraction(int i) const; // component -> termSpace
};

struct CircleResult {
    SymSeq seq;
    std::map<ComponentKey, CircleComponentWitness> wit;
};

CircleResult circle(const SymSeq& s, const SymSeq& t);

SymSeq unitTriv(const ColorSet& colors, int maxArity);

// Functoriality of the circle product: (f o g) : S o T -> S' o T'.
SymSeqHom circleHom(const SymSeqHom& f, const SymSeqHom& g, const CircleResult& src,
                    const CircleResult& dst);

// Canonical associativity iso ((R o S) o T) -> (R o (S o T)), built by
// unfolding both sides into three-level trees; `forward` composed with
// `backward` is the identity componentwise (and conversely).
struct SymSeqIso {
    std::map<ComponentKey, ChainMap> forward;
    std::map<ComponentKey, ChainMap> backward;
};
SymSeqIso circleAssociator(const SymSeq& r, const SymSeq& s, const SymSeq& t,
                           const CircleResult& rs, const CircleResult& rs_t,
                           const CircleResult& st, const CircleResult& r_st);

// ---- action on colored objects ---------------------------------------------

struct ActPiece {
    Multiset m;
    TensorProduct space; // [S(m,a), X(m_0), ..., X(m_{w-1})]
    IdempotentImage sym; // diagonal Aut(m)
};
struct ActPart {
    std::vector<ActPiece> pieces;
    SumWitness sum; // of piece images; the part complex is sum.total
};

struct ActResult {
    ColorSet colors;
    int maxWeight = 0;
    // (color, weight) -> part; absent means zero. Weight-1 part is X itself.
    std::map<std::pair<int, int>, ActPart> parts;
    std::map<int, SumWitness> totals; // per color, weights ascending

    ChainComplex part(int color, int weight) const;
    ColoredObject total() const;
    // inclusion of a weight part into the per-color total
    ChainMap weightInclude(int color, int weight) const;
    ChainMap weightProject(int color, int weight) const;
};

ActResult actOn(const SymSeq& s, const ColoredObject& x);

// Functoriality in the object: actOn(S, X) -> actOn(S, Y) induced by f.
// Per (color, weight) maps.
std::map<std::pair<int, int>, ChainMap> actOnHom(const SymSeq& s, const ColoredMap& f,
                                                 const ActResult& src, const ActResult& dst);

// ---- Md construction -------------------------------------------------------

SymSeq mdFunctor(const SymSeq& s);

// position of the marked slot when inserting color c into sorted nu
inline int markedInsertPosition(const Multiset& nu, int c) {
    int p = 0;
    for (int v : nu)
        if (v <= c) ++p;
    return p;
}

// Canonical iso mdFunctor(circle(S,T)) -> circle(mdFunctor(S), mdFunctor(T)).
SymSeqIso mdMonoidalIso(const SymSeq& s, const SymSeq& t, const CircleResult& st,
                        const CircleResult& mdmd);

// ---- external direct sum ---------------------------------------------------

struct ExternalSumResult {
    SymSeq seq;
    ColorSet combined;
    bool renamed = false; // color collisions resolved by suffixing
    std::vector<std::string> renameReport;
};
ExternalSumResult externalSum(const SymSeq& s, const SymSeq& t);
std::pair<SymSeq, SymSeq> restrictSum(const SymSeq& u, const ColorSet& a, const ColorSet& b);

SymSeq truncate(const SymSeq& s, int n);

// mixedAct(S, C, M) = the dA-part of actOn(mdFunctor(S), (C, M)).
// Returned ActResult lives over doubledColors; dA-part at colors dc.
struct MixedActResult {
    SymSeq md;            // mdFunctor(S), over doubled colors
    ColoredObject paired; // C on A, M on dA
    ActResult act;
    // weight-w part of the dA-slot for base color c
    ChainComplex part(const ColorSet& baseColors, int c, int w) const;
};
MixedActResult mixedAct(const SymSeq& s, const ColoredObject& c, const ColoredObject& m);

// Combine (C, M) into one object over doubled colors.
ColoredObject pairObject(const ColoredObject& c, const ColoredObject& m);
ColoredMap pairMap(const ColoredMap& onA, const ColoredMap& onDA);

// ---- lifting along color relabelings ---------------------------------------

// SymSeq over `lifted` colors whose component at a lifted multiset is the
// base component at the projected multiset, provided gradeOk accepts the
// (inputs, output) grading. Used for weight-graded cobar levels.
struct ColorLift {
    ColorSet lifted;
    std::vector<int> baseOf;           // lifted color -> base color
    std::vector<int> gradeOf;          // lifted color -> additive grade
    std::vector<int> markOf;           // lifted color -> 0/1 marker count
    int maxGrade = 0;                  // cap on output grade (0 = no cap)
};
SymSeq liftSymSeq(const SymSeq& base, const ColorLift& lift);

} // namespace cooperad
