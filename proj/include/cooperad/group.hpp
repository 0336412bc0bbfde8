#pragma once

#include "cooperad/chain.hpp"

#include <stdexcept>
#include <vector>

namespace cooperad {

struct GroupRelationViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Young subgroup acting on a chain complex by chain automorphisms.
// runs[i] gives, for each maximal run of equal colors, the list of positions;
// generators correspond to the adjacent transpositions (p, p+1) inside runs,
// in ascending order of p.
class GroupAction {
public:
    GroupAction() = default;
    GroupAction(ChainComplex carrier, std::vector<int> generatorPositions,
                std::vector<ChainMap> generators, int degree);

    static GroupAction trivial(const ChainComplex& carrier, int degree);

    const ChainComplex& carrier() const { return carrier_; }
    int degree() const { return degree_; } // number of permuted positions
    const std::vector<int>& generatorPositions() const { return genPos_; }
    const std::vector<ChainMap>& generators() const { return gens_; }

    // Coxeter relations: involutions, braid within runs, commutation at
    // distance >= 2, plus chain-map validity of each generator.
    bool checkRelations(std::string* why = nullptr) const;

    // Matrix of an arbitrary color-preserving permutation, given as a word in
    // the stored generators derived by bubble sort. perm[i] = image of
    // position i; every adjacent swap used must be a stored generator.
    ChainMap permutationMatrix(const std::vector<int>& perm) const;

    // All group elements (BFS closure of the generators), as permutations
    // paired with their matrices. Identity first. Capped at 10! elements.
    struct Element {
        std::vector<int> perm;
        ChainMap map;
    };
    std::vector<Element> elements() const;

private:
    ChainComplex carrier_;
    std::vector<int> genPos_;
    std::vector<ChainMap> gens_;
    int degree_ = 0;
};

// Image of the averaging idempotent e = (1/|G|) sum_g g, with inclusion and
// projection. In characteristic zero this computes both invariants and
// coinvariants. Throws GroupRelationViolation if the Coxeter checks fail.
IdempotentImage symmetrizerImage(const GroupAction& a);

} // namespace cooperad
