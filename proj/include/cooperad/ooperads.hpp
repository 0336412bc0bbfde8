#pragma once

#include "cooperad/symseq.hpp"

#include <memory>

namespace cooperad {

struct UnknownName : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AxiomFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AxiomIssue {
    std::string axiom;
    ComponentKey where;
    std::string detail;
};

struct AxiomReport {
    std::string header;
    std::vector<AxiomIssue> issues;
    bool ok() const { return issues.empty(); }
    std::string str() const;
};

// Operad: oneReduced carrier with composition gamma_{(m,a)} :
// (carrier o carrier)(m,a) -> carrier(m,a). The circle square is cached with
// its witnesses; gamma is stored against its canonical bases.
class Operad {
public:
    Operad() = default;
    Operad(SymSeq carrier, std::map<ComponentKey, ChainMap> gamma);

    const SymSeq& carrier() const { return *carrier_; }
    const CircleResult& square() const { return *square_; }
    ChainMap gamma(const Multiset& m, int outColor) const;
    const std::map<ComponentKey, ChainMap>& gammaMap() const { return gamma_; }

private:
    std::shared_ptr<SymSeq> carrier_;
    std::shared_ptr<CircleResult> square_;
    std::map<ComponentKey, ChainMap> gamma_;
};

class Cooperad {
public:
    Cooperad() = default;
    Cooperad(SymSeq carrier, std::map<ComponentKey, ChainMap> delta);

    const SymSeq& carrier() const { return *carrier_; }
    const CircleResult& square() const { return *square_; }
    ChainMap delta(const Multiset& m, int outColor) const;
    const std::map<ComponentKey, ChainMap>& deltaMap() const { return delta_; }

    bool operator==(const Cooperad& o) const;

private:
    std::shared_ptr<SymSeq> carrier_;
    std::shared_ptr<CircleResult> square_;
    std::map<ComponentKey, ChainMap> delta_;
};

// Axiom verification: equivariance of the structure map, unit/counit laws
// against the literal unit isomorphisms, and (co)associativity through the
// canonical associator. Failures are report entries, never exceptions.
AxiomReport checkOperad(const Operad& p);
AxiomReport checkCooperad(const Cooperad& q);

// Builtins (single color): "comm" (each arity Q, trivial action), "assoc"
// (regular representations), "triv". Cooperads "cocomm"/"coassoc" are the
// arity-wise duals with delta = gamma*.
Operad builtinOperad(const std::string& name, const ColorSet& colors, int maxArity);
Cooperad builtinCooperad(const std::string& name, const ColorSet& colors, int maxArity);

// Arity-wise linear dual of an operad concentrated in degree 0; the
// canonical iso (P o P)* ~ P* o P* is realized through the symmetrizer
// splittings, so delta is an explicit matrix. Throws AxiomFailure if the
// input fails checkOperad.
Cooperad dualize(const Operad& p);

// transpose of a degree-0 chain map, as a map of the (self-dual) complexes
ChainMap transposeDegreeZero(const ChainMap& f);

// The cooperad of comodules: Md_Q over doubled colors, with comultiplication
// transported through the Md monoidality iso.
Cooperad mdCooperad(const Cooperad& q);

// Lift along extra color labels (used for weight gradings); components copy
// the base ones, delta is transported through the term bijection.
Cooperad liftCooperad(const Cooperad& q, const ColorLift& lift);

// External direct sum of cooperads (extension by zero on carriers and
// structure maps).
Cooperad externalSumCooperad(const Cooperad& q1, const Cooperad& q2);

} // namespace cooperad
