#include "cooperad/symseq.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace cooperad {

// ---- colors / multisets -----------------------------------------------------

ColorSet::ColorSet(std::vector<std::string> names)
    : names_(std::make_shared<const std::vector<std::string>>(std::move(names))) {
    std::set<std::string> seen;
    for (auto& n : *names_) {
        if (!seen.insert(n).second) throw std::invalid_argument("duplicate color name: " + n);
    }
    if (names_->empty()) throw std::invalid_argument("empty color set");
}

int ColorSet::index(const std::string& n) const {
    for (int i = 0; i < size(); ++i)
        if (name(i) == n) return i;
    return -1;
}

ColorSet doubledColors(const ColorSet& a) {
    std::vector<std::string> names = a.names();
    for (auto& n : a.names()) names.push_back("d:" + n);
    return ColorSet(std::move(names));
}

std::vector<int> stableSortPerm(const std::vector<int>& tuple) {
    std::vector<int> s(tuple.size());
    std::iota(s.begin(), s.end(), 0);
    std::stable_sort(s.begin(), s.end(), [&](int i, int j) { return tuple[i] < tuple[j]; });
    return s;
}

std::vector<int> sortedTuple(const std::vector<int>& tuple) {
    std::vector<int> t = tuple;
    std::sort(t.begin(), t.end());
    return t;
}

std::vector<int> inversePerm(const std::vector<int>& p) {
    std::vector<int> q(p.size());
    for (size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
    return q;
}

// ---- colored objects --------------------------------------------------------

ChainComplex ColoredObject::at(int c) const {
    auto it = values.find(c);
    return it == values.end() ? ChainComplex::zero() : it->second;
}

void ColoredObject::set(int c, ChainComplex x) {
    if (x.isZero())
        values.erase(c);
    else
        values[c] = std::move(x);
}

bool ColoredObject::isZero() const {
    for (auto& [c, x] : values)
        if (!x.isZero()) return false;
    return true;
}

bool ColoredObject::operator==(const ColoredObject& o) const {
    if (colors != o.colors) return false;
    for (int c = 0; c < colors.size(); ++c)
        if (!(at(c) == o.at(c))) return false;
    return true;
}

ChainMap ColoredMap::at(int c) const {
    auto it = maps.find(c);
    if (it != maps.end()) return it->second;
    return ChainMap::zeroMap(source.at(c), target.at(c));
}

void ColoredMap::set(int c, ChainMap f) { maps[c] = std::move(f); }

bool ColoredMap::valid(std::string* why) const {
    for (int c = 0; c < source.colors.size(); ++c) {
        ChainMap f = at(c);
        if (!(f.source() == source.at(c)) || !(f.target() == target.at(c))) {
            if (why) *why = "shape mismatch at color " + source.colors.name(c);
            return false;
        }
        if (!f.valid(why)) return false;
    }
    return true;
}

ColoredMap ColoredMap::identity(const ColoredObject& x) {
    ColoredMap f{x, x, {}};
    for (auto& [c, v] : x.values) f.maps[c] = ChainMap::identity(v);
    return f;
}

ColoredMap ColoredMap::zero(const ColoredObject& x, const ColoredObject& y) {
    return ColoredMap{x, y, {}};
}

ColoredMap ColoredMap::compose(const ColoredMap& g) const {
    ColoredMap r{g.source, target, {}};
    for (int c = 0; c < source.colors.size(); ++c) r.maps[c] = at(c).compose(g.at(c));
    return r;
}

ColoredMap ColoredMap::operator+(const ColoredMap& o) const {
    ColoredMap r{source, target, {}};
    for (int c = 0; c < source.colors.size(); ++c) r.maps[c] = at(c) + o.at(c);
    return r;
}

ColoredMap ColoredMap::operator-(const ColoredMap& o) const {
    ColoredMap r{source, target, {}};
    for (int c = 0; c < source.colors.size(); ++c) r.maps[c] = at(c) - o.at(c);
    return r;
}

// ---- SymSeq -----------------------------------------------------------------

SymSeq::SymSeq(ColorSet colors, int maxArity, bool oneReduced)
    : colors_(std::move(colors)), maxArity_(maxArity), oneReduced_(oneReduced) {
    if (maxArity < 1) throw BadArity("maxArity must be >= 1");
}

static GroupAction youngActionOfZero(const Multiset& m) {
    // zero carrier; generators are zero maps on the zero complex
    ChainComplex z;
    std::vector<int> pos;
    std::vector<ChainMap> gens;
    for (size_t p = 0; p + 1 < m.size(); ++p)
        if (m[p] == m[p + 1]) {
            pos.push_back(static_cast<int>(p));
            gens.push_back(ChainMap::identity(z));
        }
    return GroupAction(z, pos, gens, static_cast<int>(m.size()));
}

SymSeqComponent SymSeq::component(const Multiset& m, int outColor) const {
    if (!std::is_sorted(m.begin(), m.end()))
        throw std::invalid_argument("component lookup with unsorted multiset");
    auto it = comps_.find({m, outColor});
    if (it != comps_.end()) return it->second;
    if (oneReduced_ && m.size() == 1 && m[0] == outColor) {
        ChainComplex unit = ChainComplex::line(0);
        return {unit, GroupAction::trivial(unit, 1)};
    }
    return {ChainComplex::zero(), youngActionOfZero(m)};
}

bool SymSeq::hasStored(const Multiset& m, int outColor) const {
    return comps_.count({m, outColor}) > 0;
}

void SymSeq::setComponent(const Multiset& m, int outColor, SymSeqComponent c) {
    if (!std::is_sorted(m.begin(), m.end()))
        throw std::invalid_argument("setComponent with unsorted multiset");
    if (static_cast<int>(m.size()) > maxArity_) throw BadArity("component arity exceeds maxArity");
    if (oneReduced_ && m.size() < 2)
        throw BadArity("oneReduced sequences store only arities >= 2");
    if (c.space.isZero()) {
        comps_.erase({m, outColor});
        return;
    }
    comps_[{m, outColor}] = std::move(c);
}

bool SymSeq::operator==(const SymSeq& o) const {
    if (colors_ != o.colors_ || maxArity_ != o.maxArity_ || oneReduced_ != o.oneReduced_)
        return false;
    auto keys = [](const SymSeq& s) {
        std::set<ComponentKey> out;
        for (auto& [k, v] : s.comps_) out.insert(k);
        return out;
    };
    if (keys(*this) != keys(o)) return false;
    for (auto& [k, v] : comps_) {
        const auto& w = o.comps_.at(k);
        if (!(v.space == w.space)) return false;
        if (v.action.generatorPositions() != w.action.generatorPositions()) return false;
        for (size_t i = 0; i < v.action.generators().size(); ++i)
            if (!(v.action.generators()[i] == w.action.generators()[i])) return false;
    }
    return true;
}

bool SymSeq::checkActions(std::string* why) const {
    for (auto& [k, v] : comps_) {
        std::string w;
        if (!v.action.checkRelations(&w)) {
            if (why) *why = "component action fails: " + w;
            return false;
        }
    }
    return true;
}

ChainMap SymSeqHom::at(const Multiset& m, int outColor) const {
    auto it = comps.find({m, outColor});
    if (it != comps.end()) return it->second;
    SymSeqComponent s = src->component(m, outColor);
    SymSeqComponent t = tgt->component(m, outColor);
    if (src->oneReduced() && m.size() == 1 && m[0] == outColor)
        return ChainMap::identity(s.space); // implicit unit
    return ChainMap::zeroMap(s.space, t.space);
}

bool SymSeqHom::equivariant(std::string* why) const {
    for (auto& [k, f] : comps) {
        SymSeqComponent s = src->component(k.first, k.second);
        SymSeqComponent t = tgt->component(k.first, k.second);
        for (size_t i = 0; i < s.action.generators().size(); ++i) {
            // positions agree because both are the Young subgroup of k.first
            ChainMap lhs = f.compose(s.action.generators()[i]);
            ChainMap rhs = t.action.generators()[i].compose(f);
            if (!(lhs == rhs)) {
                if (why) *why = "hom not equivariant";
                return false;
            }
        }
    }
    return true;
}

SymSeqHom SymSeqHom::identity(const SymSeq& s) {
    SymSeqHom h{&s, &s, {}};
    for (auto& [k, v] : s.stored()) h.comps[k] = ChainMap::identity(v.space);
    return h;
}

// ---- multiset / partition enumeration ---------------------------------------

// all sorted multisets of given size over colors [0, nColors)
static void enumerateMultisets(int nColors, int size, std::vector<Multiset>& out) {
    Multiset cur;
    std::function<void(int)> rec = [&](int minC) {
        if (static_cast<int>(cur.size()) == size) {
            out.push_back(cur);
            return;
        }
        for (int c = minC; c < nColors; ++c) {
            cur.push_back(c);
            rec(c);
            cur.pop_back();
        }
    };
    rec(0);
}

std::vector<Multiset> allMultisets(int nColors, int size) {
    std::vector<Multiset> out;
    enumerateMultisets(nColors, size, out);
    return out;
}

// colex order on sets: A < B iff max(A xor B) in B
static bool colexLess(const std::vector<int>& a, const std::vector<int>& b) {
    // both ascending
    int i = static_cast<int>(a.size()) - 1, j = static_cast<int>(b.size()) - 1;
    while (i >= 0 && j >= 0) {
        if (a[i] != b[j]) return a[i] < b[j];
        --i;
        --j;
    }
    return i < j;
}

// ordered set partitions of [n] into k nonempty blocks, canonical order
static std::vector<std::vector<std::vector<int>>> orderedPartitions(int n, int k) {
    std::vector<std::vector<std::vector<int>>> out;
    std::vector<int> assign(n, 0);
    std::function<void(int)> rec = [&](int i) {
        if (i == n) {
            std::vector<std::vector<int>> blocks(k);
            for (int p = 0; p < n; ++p) blocks[assign[p]].push_back(p);
            for (auto& b : blocks)
                if (b.empty()) return;
            out.push_back(std::move(blocks));
            return;
        }
        for (int b = 0; b < k; ++b) {
            assign[i] = b;
            rec(i + 1);
        }
    };
    rec(0);
    std::sort(out.begin(), out.end(),
              [](const std::vector<std::vector<int>>& x, const std::vector<std::vector<int>>& y) {
                  for (size_t i = 0; i < x.size(); ++i) {
                      if (x[i] == y[i]) continue;
                      return colexLess(x[i], y[i]);
                  }
                  return false;
              });
    return out;
}

// ---- circle product ---------------------------------------------------------

int CircleComponentWitness::termIndex(const TreeTerm& t) const {
    for (size_t i = 0; i < terms.size(); ++i)
        if (terms[i] == t) return static_cast<int>(i);
    return -1;
}

ChainMap CircleComponentWitness::termInclusion(int i) const {
    return sym.projection.compose(bigSum.include[i]);
}

ChainMap CircleComponentWitness::termExtraction(int i) const {
    return bigSum.project[i].compose(sym.inclusion);
}

namespace {

// The map V_tau -> V_{sigma tau} for a block permutation sigma in Sym(k):
// Young twist on the root by y = s_{sigma b}^{-1} o sigma o s_b, then factor
// permutation of the blocks with Koszul signs.
ChainMap blockPermMap(const SymSeqComponent& rootComp, const std::vector<ChainComplex>& factors,
                      const std::vector<int>& rootColors, const std::vector<int>& sigma) {
    int k = static_cast<int>(sigma.size());
    std::vector<int> sb = stableSortPerm(rootColors);
    std::vector<int> sigmaB(k);
    for (int i = 0; i < k; ++i) sigmaB[sigma[i]] = rootColors[i];
    std::vector<int> sSigmaBInv = inversePerm(stableSortPerm(sigmaB));
    std::vector<int> y(k);
    for (int j = 0; j < k; ++j) y[j] = sSigmaBInv[sigma[sb[j]]];
    ChainMap rootTwist = rootComp.action.permutationMatrix(y);
    std::vector<ChainMap> tens;
    tens.push_back(rootTwist);
    for (int i = 1; i <= k; ++i) tens.push_back(ChainMap::identity(factors[i]));
    ChainMap twist = tensorHom(tens);
    std::vector<int> perm(k + 1);
    perm[0] = 0;
    for (int i = 0; i < k; ++i) perm[1 + i] = 1 + sigma[i];
    ChainMap pf = permuteFactors(factors, perm);
    return pf.compose(twist);
}

std::vector<std::vector<int>> allPermutations(int k) {
    std::vector<int> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace


// Orbit-wise symmetrizer for a circle component: the block-permutation group
// permutes terms, so e is block-structured by orbits and its pivot columns
// all sit at each orbit's first term. This keeps the Gaussian elimination at
// orbit-local size.
static void buildCircleSymmetrizer(CircleComponentWitness& w,
                                   const std::vector<SymSeqComponent>& termRoots,
                                   const std::vector<std::vector<ChainComplex>>& termFactors) {
    const ChainComplex& big = w.bigSum.total;
    size_t nTerms = w.terms.size();
    // per-degree row offset of each term inside the big sum
    std::map<int, std::vector<int>> off;
    for (auto& [deg, dim] : big.dims()) {
        std::vector<int> o(nTerms + 1, 0);
        for (size_t i = 0; i < nTerms; ++i)
            o[i + 1] = o[i] + w.termSpaces[i].complex().dim(deg);
        off[deg] = std::move(o);
    }

    std::map<int, std::vector<Matrix>> basisCols;   // per degree, per orbit
    std::map<int, int> rankByDeg;
    struct MemberProj {
        size_t term;
        std::map<int, Matrix> block; // per degree: rank_O x dim(term)
    };
    std::vector<std::vector<MemberProj>> orbitProj; // per orbit
    std::map<int, std::vector<int>> pivotCols;      // per degree, global columns

    std::map<int, std::vector<size_t>> byK;
    for (size_t i = 0; i < nTerms; ++i) byK[w.terms[i].k].push_back(i);
    std::vector<bool> visited(nTerms, false);

    for (auto& [k, idxs] : byK) {
        std::vector<std::vector<int>> perms;
        {
            std::vector<int> p(k);
            std::iota(p.begin(), p.end(), 0);
            do {
                perms.push_back(p);
            } while (std::next_permutation(p.begin(), p.end()));
        }
        for (size_t rep : idxs) {
            if (visited[rep]) continue;
            const TreeTerm& tau = w.terms[rep];
            // orbit discovery: target term and map for every sigma
            std::vector<size_t> members;            // ascending unique
            std::map<size_t, std::vector<int>> toMember; // member -> first sigma
            std::vector<int> targetOf(perms.size());
            for (size_t s = 0; s < perms.size(); ++s) {
                auto& sigma = perms[s];
                TreeTerm tgt;
                tgt.k = k;
                tgt.rootColors.resize(k);
                tgt.blocks.resize(k);
                for (int i = 0; i < k; ++i) {
                    tgt.rootColors[sigma[i]] = tau.rootColors[i];
                    tgt.blocks[sigma[i]] = tau.blocks[i];
                }
                int dst = w.termIndex(tgt);
                if (dst < 0) throw std::logic_error("circle: orbit left the term list");
                targetOf[s] = dst;
                if (!toMember.count(dst)) toMember[dst] = sigma;
            }
            for (auto& [mIdx, sig] : toMember) members.push_back(mIdx);
            std::sort(members.begin(), members.end());
            for (size_t mIdx : members) visited[mIdx] = true;
            std::map<size_t, int> memberPos;
            for (size_t q = 0; q < members.size(); ++q) memberPos[members[q]] = static_cast<int>(q);

            // orbit-local row offsets per degree
            std::map<int, std::vector<int>> loff;
            for (auto& [deg, o] : off) {
                std::vector<int> lo(members.size() + 1, 0);
                for (size_t q = 0; q < members.size(); ++q)
                    lo[q + 1] = lo[q] + w.termSpaces[members[q]].complex().dim(deg);
                loff[deg] = std::move(lo);
            }

            // e columns at the representative, accumulated per degree
            std::map<int, Matrix> eCols;
            const ChainComplex& repC = w.termSpaces[rep].complex();
            for (auto& [deg, lo] : loff) {
                if (repC.dim(deg) > 0) eCols[deg] = Matrix::zero(lo.back(), repC.dim(deg));
            }
            Rational inv(1, static_cast<long>(perms.size()));
            for (size_t s = 0; s < perms.size(); ++s) {
                ChainMap m0 = blockPermMap(termRoots[rep], termFactors[rep], tau.rootColors,
                                           perms[s]);
                int pos = memberPos[static_cast<size_t>(targetOf[s])];
                for (auto& [deg, ec] : eCols) {
                    Matrix blk = m0.block(deg) * inv;
                    int r0 = loff[deg][pos];
                    for (int i = 0; i < blk.rows(); ++i)
                        for (int j = 0; j < blk.cols(); ++j)
                            ec.at(r0 + i, j) += blk.at(i, j);
                }
            }

            // pivots and local basis / projection
            std::vector<MemberProj> projs;
            bool orbitNonzero = false;
            std::map<int, Matrix> localBasis;
            std::map<int, Matrix> pRep;
            for (auto& [deg, ec] : eCols) {
                auto piv = ec.pivotColumns();
                if (piv.empty()) continue;
                orbitNonzero = true;
                Matrix b = ec.submatrixCols(piv);
                auto sol = b.solve(ec);
                if (!sol) throw std::logic_error("circle: projection solve failed");
                localBasis[deg] = std::move(b);
                pRep[deg] = std::move(*sol);
                for (int c : piv) pivotCols[deg].push_back(off[deg][rep] + c);
            }
            if (!orbitNonzero) continue;
            // per-member projection blocks p_rep o M^{-1}
            for (size_t mIdx : members) {
                MemberProj mp;
                mp.term = mIdx;
                std::vector<int> sigma = toMember[mIdx];
                std::vector<int> sigmaInv = inversePerm(sigma);
                // map member -> rep with sigma^{-1}
                ChainMap back = blockPermMap(termRoots[mIdx], termFactors[mIdx],
                                             w.terms[mIdx].rootColors, sigmaInv);
                for (auto& [deg, pr] : pRep) mp.block[deg] = pr * back.block(deg);
                projs.push_back(std::move(mp));
            }
            orbitProj.push_back(std::move(projs));
            // scatter local basis into global rows
            for (auto& [deg, lb] : localBasis) {
                Matrix g = Matrix::zero(big.dim(deg), lb.cols());
                for (size_t q = 0; q < members.size(); ++q) {
                    int lr = loff[deg][q];
                    int gr = off[deg][members[q]];
                    int rows = loff[deg][q + 1] - lr;
                    for (int i = 0; i < rows; ++i)
                        for (int j = 0; j < lb.cols(); ++j) g.at(gr + i, j) = lb.at(lr + i, j);
                }
                basisCols[deg].push_back(std::move(g));
                rankByDeg[deg] += basisCols[deg].back().cols();
            }
        }
    }

    // assemble global basis, image complex, inclusion, projection
    std::map<int, Matrix> basis;
    std::map<int, int> dims;
    for (auto& [deg, cols] : basisCols) {
        basis[deg] = Matrix::hcat(cols);
        if (basis[deg].cols() > 0) dims[deg] = basis[deg].cols();
    }
    std::map<int, Matrix> diffs;
    for (auto& [deg, d] : dims) {
        if (!dims.count(deg - 1)) continue;
        Matrix db = big.differential(deg) * basis[deg];
        if (db.isZero()) continue;
        auto sol = basis[deg - 1].solve(db);
        if (!sol) throw std::logic_error("circle: image not closed under differential");
        if (!sol->isZero()) diffs[deg] = std::move(*sol);
    }
    w.sym.image = ChainComplex::fromDims(dims, diffs);
    w.sym.pivots = pivotCols;
    w.sym.inclusion = ChainMap(w.sym.image, big);
    for (auto& [deg, b] : basis)
        if (b.cols() > 0) w.sym.inclusion.setBlock(deg, b);
    w.sym.projection = ChainMap(big, w.sym.image);
    // rows of the projection: per orbit (in discovery order), per degree
    std::map<int, int> rowOff;
    for (auto& orbit : orbitProj) {
        std::map<int, int> orbitRank;
        for (auto& mp : orbit)
            for (auto& [deg, blk] : mp.block) orbitRank[deg] = blk.rows();
        for (auto& mp : orbit) {
            for (auto& [deg, blk] : mp.block) {
                if (blk.rows() == 0) continue;
                Matrix cur = w.sym.projection.block(deg);
                if (cur.rows() == 0) continue;
                int r0 = rowOff[deg];
                int c0 = off[deg][mp.term];
                for (int i = 0; i < blk.rows(); ++i)
                    for (int j = 0; j < blk.cols(); ++j) cur.at(r0 + i, c0 + j) = blk.at(i, j);
                w.sym.projection.setBlock(deg, std::move(cur));
            }
        }
        for (auto& [deg, r] : orbitRank) rowOff[deg] += r;
    }
}

CircleResult circle(const SymSeq& s, const SymSeq& t) {
    if (s.colors() != t.colors()) throw ColorMismatch("circle: color sets differ");
    if (s.maxArity() != t.maxArity()) throw ArityMismatch("circle: maxArity differs");
    if (!s.oneReduced() || !t.oneReduced())
        throw BadArity("circle requires oneReduced sequences");
    const ColorSet& A = s.colors();
    int N = s.maxArity();

    CircleResult res;
    res.seq = SymSeq(A, N, true);

    for (int a = 0; a < A.size(); ++a) {
        for (int n = 2; n <= N; ++n) {
            for (auto& m : allMultisets(A.size(), n)) {
                CircleComponentWitness w;
                std::vector<ChainComplex> termComplexes;
                std::vector<std::vector<ChainComplex>> termFactors;
                std::vector<SymSeqComponent> termRoots;
                for (int k = 1; k <= std::min(n, N); ++k) {
                    auto partitions = orderedPartitions(n, k);
                    std::vector<int> b(k, 0);
                    while (true) {
                        Multiset beta = sortedTuple(b);
                        SymSeqComponent root = s.component(beta, a);
                        if (!root.space.isZero()) {
                            for (auto& blocks : partitions) {
                                std::vector<ChainComplex> factors{root.space};
                                bool zero = false;
                                for (int i = 0; i < k && !zero; ++i) {
                                    Multiset bm;
                                    for (int p : blocks[i]) bm.push_back(m[p]);
                                    SymSeqComponent bc = t.component(bm, b[i]);
                                    if (bc.space.isZero()) zero = true;
                                    factors.push_back(bc.space);
                                }
                                if (zero) continue;
                                w.terms.push_back({k, b, blocks});
                                termFactors.push_back(factors);
                                termRoots.push_back(root);
                                w.termSpaces.emplace_back(factors);
                                termComplexes.push_back(w.termSpaces.back().complex());
                            }
                        }
                        // lex increment of b
                        int i = k - 1;
                        while (i >= 0 && ++b[i] == A.size()) b[i--] = 0;
                        if (i < 0) break;
                    }
                }
                if (w.terms.empty()) continue;
                w.bigSum = directSum(termComplexes);
                buildCircleSymmetrizer(w, termRoots, termFactors);
                if (w.sym.image.isZero()) {
                    // keep the witness (used by naturality plumbing) but store no component
                    res.wit[{m, a}] = std::move(w);
                    continue;
                }

                // induced Aut(m) action
                std::vector<int> genPos;
                std::vector<ChainMap> gens;
                for (int p = 0; p + 1 < n; ++p) {
                    if (m[p] != m[p + 1]) continue;
                    ChainMap A(w.sym.image, w.sym.image);
                    bool hasBlock = false;
                    for (size_t src = 0; src < w.terms.size(); ++src) {
                        const TreeTerm& tau = w.terms[src];
                        TreeTerm tgt = tau;
                        std::vector<ChainMap> fmaps;
                        fmaps.push_back(ChainMap::identity(termFactors[src][0]));
                        for (int i = 0; i < tau.k; ++i) {
                            auto& blk = tau.blocks[i];
                            auto inBlk = [&](int q) {
                                return std::find(blk.begin(), blk.end(), q) != blk.end();
                            };
                            bool hasP = inBlk(p), hasP1 = inBlk(p + 1);
                            if (hasP && hasP1) {
                                // adjacent inside the block
                                int r = 0;
                                while (blk[r] != p) ++r;
                                Multiset bm;
                                for (int q : blk) bm.push_back(m[q]);
                                SymSeqComponent bc = t.component(bm, tau.rootColors[i]);
                                std::vector<int> perm(blk.size());
                                std::iota(perm.begin(), perm.end(), 0);
                                std::swap(perm[r], perm[r + 1]);
                                fmaps.push_back(bc.action.permutationMatrix(perm));
                            } else if (hasP || hasP1) {
                                std::vector<int> nb;
                                for (int q : blk) {
                                    if (q == p)
                                        nb.push_back(p + 1);
                                    else if (q == p + 1)
                                        nb.push_back(p);
                                    else
                                        nb.push_back(q);
                                }
                                std::sort(nb.begin(), nb.end());
                                tgt.blocks[i] = nb;
                                fmaps.push_back(ChainMap::identity(termFactors[src][1 + i]));
                            } else {
                                fmaps.push_back(ChainMap::identity(termFactors[src][1 + i]));
                            }
                        }
                        int dst = w.termIndex(tgt);
                        if (dst < 0) throw std::logic_error("circle: Aut(m) left the term list");
                        ChainMap piece = w.termInclusion(dst)
                                             .compose(tensorHom(fmaps))
                                             .compose(w.termExtraction(static_cast<int>(src)));
                        A = hasBlock ? A + piece : piece;
                        hasBlock = true;
                    }
                    genPos.push_back(p);
                    gens.push_back(std::move(A));
                }
                SymSeqComponent comp{w.sym.image,
                                     GroupAction(w.sym.image, genPos, gens, n)};
                res.seq.setComponent(m, a, std::move(comp));
                res.wit[{m, a}] = std::move(w);
            }
        }
    }
    return res;
}

SymSeq unitTriv(const ColorSet& colors, int maxArity) { return SymSeq(colors, maxArity, true); }

SymSeqHom circleHom(const SymSeqHom& f, const SymSeqHom& g, const CircleResult& src,
                    const CircleResult& dst) {
    SymSeqHom h{&src.seq, &dst.seq, {}};
    for (auto& [key, ws] : src.wit) {
        auto itd = dst.wit.find(key);
        SymSeqComponent sc = src.seq.component(key.first, key.second);
        SymSeqComponent dc = dst.seq.component(key.first, key.second);
        if (sc.space.isZero() || dc.space.isZero()) continue;
        const CircleComponentWitness& wd = itd->second;
        ChainMap acc = ChainMap::zeroMap(sc.space, dc.space);
        for (size_t i = 0; i < ws.terms.size(); ++i) {
            const TreeTerm& tau = ws.terms[i];
            int j = wd.termIndex(tau);
            if (j < 0) continue; // target factor vanished
            Multiset beta = sortedTuple(tau.rootColors);
            std::vector<ChainMap> fmaps{f.at(beta, key.second)};
            bool dead = false;
            for (int bi = 0; bi < tau.k && !dead; ++bi) {
                Multiset bm;
                for (int p : tau.blocks[bi]) bm.push_back(key.first[p]);
                ChainMap gm = g.at(bm, tau.rootColors[bi]);
                fmaps.push_back(gm);
            }
            if (dead) continue;
            acc = acc + wd.termInclusion(j).compose(tensorHom(fmaps)).compose(ws.termExtraction(i));
        }
        h.comps[key] = std::move(acc);
    }
    return h;
}

// ---- actOn ------------------------------------------------------------------

ChainComplex ActResult::part(int color, int weight) const {
    auto it = parts.find({color, weight});
    return it == parts.end() ? ChainComplex::zero() : it->second.sum.total;
}

ColoredObject ActResult::total() const {
    ColoredObject o;
    o.colors = colors;
    for (auto& [c, sw] : totals) o.set(c, sw.total);
    return o;
}

ChainMap ActResult::weightInclude(int color, int weight) const {
    auto it = totals.find(color);
    if (it == totals.end()) return ChainMap();
    // weights ascending; find position of `weight` among stored parts of this color
    int pos = 0;
    for (int w = 1; w <= maxWeight; ++w) {
        if (!parts.count({color, w})) continue;
        if (w == weight) return it->second.include[pos];
        ++pos;
    }
    throw std::out_of_range("weightInclude: no such weight part");
}

ChainMap ActResult::weightProject(int color, int weight) const {
    auto it = totals.find(color);
    if (it == totals.end()) return ChainMap();
    int pos = 0;
    for (int w = 1; w <= maxWeight; ++w) {
        if (!parts.count({color, w})) continue;
        if (w == weight) return it->second.project[pos];
        ++pos;
    }
    throw std::out_of_range("weightProject: no such weight part");
}

ActResult actOn(const SymSeq& s, const ColoredObject& x) {
    if (s.colors() != x.colors) throw ColorMismatch("actOn: color sets differ");
    const ColorSet& A = s.colors();
    int N = s.maxArity();
    ActResult res;
    res.colors = A;
    res.maxWeight = N;
    for (int a = 0; a < A.size(); ++a) {
        for (int wgt = 1; wgt <= N; ++wgt) {
            ActPart part;
            std::vector<ChainComplex> images;
            for (auto& m : allMultisets(A.size(), wgt)) {
                SymSeqComponent root = s.component(m, a);
                if (root.space.isZero()) continue;
                std::vector<ChainComplex> factors{root.space};
                bool zero = false;
                for (int p : m) {
                    ChainComplex xc = x.at(p);
                    if (xc.isZero()) zero = true;
                    factors.push_back(xc);
                }
                if (zero) continue;
                TensorProduct ts(factors);
                // diagonal Aut(m) action on the term
                std::vector<int> genPos;
                std::vector<ChainMap> gens;
                for (int p = 0; p + 1 < wgt; ++p) {
                    if (m[p] != m[p + 1]) continue;
                    std::vector<int> yperm(wgt);
                    std::iota(yperm.begin(), yperm.end(), 0);
                    std::swap(yperm[p], yperm[p + 1]);
                    ChainMap rootTwist = root.action.permutationMatrix(yperm);
                    std::vector<ChainMap> fmaps{rootTwist};
                    for (int q = 0; q < wgt; ++q) fmaps.push_back(ChainMap::identity(factors[1 + q]));
                    ChainMap twist = tensorHom(fmaps);
                    std::vector<int> fperm(wgt + 1);
                    std::iota(fperm.begin(), fperm.end(), 0);
                    std::swap(fperm[1 + p], fperm[1 + p + 1]);
                    ChainMap pf = permuteFactors(factors, fperm);
                    genPos.push_back(p);
                    gens.push_back(pf.compose(twist));
                }
                GroupAction act(ts.complex(), genPos, gens, wgt);
                ActPiece piece{m, ts, symmetrizerImage(act)};
                if (piece.sym.image.isZero()) continue;
                images.push_back(piece.sym.image);
                part.pieces.push_back(std::move(piece));
            }
            if (part.pieces.empty()) continue;
            part.sum = directSum(images);
            res.parts[{a, wgt}] = std::move(part);
        }
        // per-color total over weights
        std::vector<ChainComplex> ws;
        for (int wgt = 1; wgt <= N; ++wgt)
            if (res.parts.count({a, wgt})) ws.push_back(res.parts[{a, wgt}].sum.total);
        if (!ws.empty()) res.totals[a] = directSum(ws);
    }
    return res;
}

std::map<std::pair<int, int>, ChainMap> actOnHom(const SymSeq& s, const ColoredMap& f,
                                                 const ActResult& src, const ActResult& dst) {
    std::map<std::pair<int, int>, ChainMap> out;
    for (int a = 0; a < s.colors().size(); ++a) {
        for (int wgt = 1; wgt <= s.maxArity(); ++wgt) {
            auto is = src.parts.find({a, wgt});
            ChainComplex srcC = src.part(a, wgt), dstC = dst.part(a, wgt);
            if (srcC.isZero() && dstC.isZero()) continue;
            ChainMap acc = ChainMap::zeroMap(srcC, dstC);
            if (is != src.parts.end() && !dstC.isZero()) {
                auto id = dst.parts.find({a, wgt});
                for (size_t i = 0; i < is->second.pieces.size(); ++i) {
                    const ActPiece& sp = is->second.pieces[i];
                    int j = -1;
                    if (id != dst.parts.end())
                        for (size_t q = 0; q < id->second.pieces.size(); ++q)
                            if (id->second.pieces[q].m == sp.m) j = static_cast<int>(q);
                    if (j < 0) continue;
                    const ActPiece& dp = id->second.pieces[j];
                    SymSeqComponent root = s.component(sp.m, a);
                    std::vector<ChainMap> fmaps{ChainMap::identity(root.space)};
                    for (int p : sp.m) fmaps.push_back(f.at(p));
                    ChainMap term = tensorHom(fmaps);
                    ChainMap m0 = id->second.sum.include[j]
                                      .compose(dp.sym.projection)
                                      .compose(term)
                                      .compose(sp.sym.inclusion)
                                      .compose(is->second.sum.project[i]);
                    acc = acc + m0;
                }
            }
            out[{a, wgt}] = std::move(acc);
        }
    }
    return out;
}

// ---- Md ---------------------------------------------------------------------

SymSeq mdFunctor(const SymSeq& s) {
    const ColorSet& A = s.colors();
    ColorSet D = doubledColors(A);
    SymSeq out(D, s.maxArity(), s.oneReduced());
    // pure-A components
    for (auto& [key, comp] : s.stored()) out.setComponent(key.first, key.second, comp);
    // marked components: (nu + [dc], d a) = S(sort(nu + c), a)
    for (auto& [key, comp] : s.stored()) {
        const Multiset& m = key.first;
        int a = key.second;
        std::set<int> distinct(m.begin(), m.end());
        for (int c : distinct) {
            Multiset nu;
            bool removed = false;
            for (int v : m) {
                if (v == c && !removed) {
                    removed = true;
                    continue;
                }
                nu.push_back(v);
            }
            // marked slot sits at the end of c's run inside m
            int ins = markedInsertPosition(nu, c);
            Multiset mdKey = nu;
            mdKey.push_back(dColor(A, c));
            // action: Aut(nu) embedded into Aut(m) via position shift
            std::vector<int> genPos;
            std::vector<ChainMap> gens;
            std::map<int, const ChainMap*> srcGens;
            for (size_t g = 0; g < comp.action.generatorPositions().size(); ++g)
                srcGens[comp.action.generatorPositions()[g]] = &comp.action.generators()[g];
            for (int p = 0; p + 1 < static_cast<int>(nu.size()); ++p) {
                if (nu[p] != nu[p + 1]) continue;
                int ip = (p < ins) ? p : p + 1;
                auto it = srcGens.find(ip);
                if (it == srcGens.end())
                    throw std::logic_error("mdFunctor: missing source generator");
                genPos.push_back(p);
                gens.push_back(*it->second);
            }
            SymSeqComponent mc{comp.space,
                               GroupAction(comp.space, genPos, gens,
                                           static_cast<int>(mdKey.size()))};
            out.setComponent(mdKey, dColor(A, a), std::move(mc));
        }
    }
    return out;
}

ColoredObject pairObject(const ColoredObject& c, const ColoredObject& m) {
    if (c.colors != m.colors) throw ColorMismatch("pairObject: color sets differ");
    ColoredObject o;
    o.colors = doubledColors(c.colors);
    for (auto& [cc, v] : c.values) o.set(cc, v);
    for (auto& [cc, v] : m.values) o.set(dColor(c.colors, cc), v);
    return o;
}

ColoredMap pairMap(const ColoredMap& onA, const ColoredMap& onDA) {
    ColoredMap f{pairObject(onA.source, onDA.source), pairObject(onA.target, onDA.target), {}};
    int n = onA.source.colors.size();
    for (auto& [c, g] : onA.maps) f.maps[c] = g;
    for (auto& [c, g] : onDA.maps) f.maps[n + c] = g;
    return f;
}

ChainComplex MixedActResult::part(const ColorSet& baseColors, int c, int w) const {
    return act.part(dColor(baseColors, c), w);
}

MixedActResult mixedAct(const SymSeq& s, const ColoredObject& c, const ColoredObject& m) {
    if (s.colors() != c.colors || s.colors() != m.colors)
        throw ColorMismatch("mixedAct: color sets differ");
    MixedActResult r;
    r.md = mdFunctor(s);
    r.paired = pairObject(c, m);
    r.act = actOn(r.md, r.paired);
    return r;
}

// ---- external sum / restrict / truncate --------------------------------------

ExternalSumResult externalSum(const SymSeq& s, const SymSeq& t) {
    std::vector<std::string> names = s.colors().names();
    ExternalSumResult res;
    for (auto& n : t.colors().names()) {
        std::string use = n;
        while (std::find(names.begin(), names.end(), use) != names.end()) {
            use += "'";
            res.renamed = true;
        }
        if (use != n) res.renameReport.push_back(n + " -> " + use);
        names.push_back(use);
    }
    if (s.maxArity() != t.maxArity()) throw ArityMismatch("externalSum: maxArity differs");
    res.combined = ColorSet(names);
    SymSeq out(res.combined, s.maxArity(), s.oneReduced() && t.oneReduced());
    for (auto& [key, comp] : s.stored()) out.setComponent(key.first, key.second, comp);
    int off = s.colors().size();
    for (auto& [key, comp] : t.stored()) {
        Multiset shifted;
        for (int v : key.first) shifted.push_back(v + off);
        out.setComponent(shifted, key.second + off, comp);
    }
    res.seq = std::move(out);
    return res;
}

std::pair<SymSeq, SymSeq> restrictSum(const SymSeq& u, const ColorSet& a, const ColorSet& b) {
    SymSeq sa(a, u.maxArity(), u.oneReduced());
    SymSeq sb(b, u.maxArity(), u.oneReduced());
    int na = a.size();
    for (auto& [key, comp] : u.stored()) {
        bool pureA = key.second < na, pureB = key.second >= na;
        for (int v : key.first) {
            if (v >= na) pureA = false;
            if (v < na) pureB = false;
        }
        if (pureA) sa.setComponent(key.first, key.second, comp);
        if (pureB) {
            Multiset shifted;
            for (int v : key.first) shifted.push_back(v - na);
            sb.setComponent(shifted, key.second - na, comp);
        }
    }
    return {sa, sb};
}

SymSeq truncate(const SymSeq& s, int n) {
    if (n > s.maxArity()) throw BadArity("truncate: n exceeds maxArity");
    if (s.oneReduced() && n < 2) throw BadArity("truncate: oneReduced needs n >= 2");
    SymSeq out(s.colors(), n, s.oneReduced());
    for (auto& [key, comp] : s.stored())
        if (static_cast<int>(key.first.size()) <= n) out.setComponent(key.first, key.second, comp);
    return out;
}

// ---- lifting ----------------------------------------------------------------

SymSeq liftSymSeq(const SymSeq& base, const ColorLift& lift) {
    SymSeq out(lift.lifted, base.maxArity(), base.oneReduced());
    int nl = lift.lifted.size();
    // enumerate lifted multisets of every arity, map down, copy components
    for (int n = 2; n <= base.maxArity(); ++n) {
        for (auto& lm : allMultisets(nl, n)) {
            // projected tuple and grade
            std::vector<int> projTuple;
            int grade = 0, mark = 0;
            for (int v : lm) {
                projTuple.push_back(lift.baseOf[v]);
                grade += lift.gradeOf[v];
                mark += lift.markOf[v];
            }
            if (lift.maxGrade > 0 && grade > lift.maxGrade) continue;
            std::vector<int> spInv = inversePerm(stableSortPerm(projTuple));
            Multiset pm = sortedTuple(projTuple);
            for (int la = 0; la < nl; ++la) {
                if (lift.gradeOf[la] != grade) continue;
                if (lift.markOf[la] != mark) continue;
                SymSeqComponent bc = base.component(pm, lift.baseOf[la]);
                if (bc.space.isZero()) continue;
                // lifted positions j with equal lifted colors correspond to
                // projected positions sp[j]; adjacent lifted equals must be
                // adjacent in the projection (stable sort keeps runs).
                std::vector<int> genPos;
                std::vector<ChainMap> gens;
                std::map<int, const ChainMap*> srcGens;
                for (size_t g = 0; g < bc.action.generatorPositions().size(); ++g)
                    srcGens[bc.action.generatorPositions()[g]] = &bc.action.generators()[g];
                bool ok = true;
                for (int p = 0; p + 1 < n && ok; ++p) {
                    if (lm[p] != lm[p + 1]) continue;
                    // equal lifted colors are consecutive originals with equal
                    // projection; stable sort keeps them adjacent
                    if (spInv[p + 1] != spInv[p] + 1) {
                        ok = false;
                        break;
                    }
                    auto it = srcGens.find(spInv[p]);
                    if (it == srcGens.end()) {
                        ok = false;
                        break;
                    }
                    genPos.push_back(p);
                    gens.push_back(*it->second);
                }
                if (!ok) throw std::logic_error("liftSymSeq: generator alignment failed");
                out.setComponent(lm, la,
                                 {bc.space, GroupAction(bc.space, genPos, gens, n)});
            }
        }
    }
    return out;
}

// ---- iso inverse --------------------------------------------------------------

ChainMap isoInverse(const ChainMap& f) {
    ChainMap r(f.target(), f.source());
    for (auto& [n, d] : f.target().dims()) {
        auto inv = f.block(n).inverse();
        if (!inv) throw std::logic_error("isoInverse: block not invertible");
        r.setBlock(n, std::move(*inv));
    }
    return r;
}

// ---- associator ---------------------------------------------------------------

namespace {

// One inner unfolding of a circle-product component at (beta, outColor):
// either a genuine witness term or the virtual unit term for singleton beta.
struct InnerTerm {
    TreeTerm t;
    std::vector<ChainComplex> factors; // [first(sort b'), second-blocks...]
    ChainMap extract;                  // component -> term space
    ChainMap include;                  // term space -> component
};

std::vector<InnerTerm> unfoldComponent(const SymSeq& first, const SymSeq& second,
                                       const CircleResult& prod, const Multiset& beta,
                                       int outColor) {
    std::vector<InnerTerm> out;
    if (beta.size() == 1) {
        if (beta[0] != outColor) return out;
        // unit = unit_first o unit_second
        ChainComplex unit = ChainComplex::line(0);
        TensorProduct ts({unit, unit});
        InnerTerm it;
        it.t = TreeTerm{1, {outColor}, {{0}}};
        it.factors = {unit, unit};
        it.extract = ChainMap::identity(unit); // tensorMany({unit,unit}) == unit
        it.include = ChainMap::identity(unit);
        out.push_back(std::move(it));
        return out;
    }
    auto itw = prod.wit.find({beta, outColor});
    if (itw == prod.wit.end()) return out;
    const CircleComponentWitness& w = itw->second;
    for (size_t i = 0; i < w.terms.size(); ++i) {
        InnerTerm it;
        it.t = w.terms[i];
        it.factors = w.termSpaces[i].factors();
        it.extract = w.termExtraction(static_cast<int>(i));
        it.include = w.termInclusion(static_cast<int>(i));
        out.push_back(std::move(it));
    }
    return out;
}

// block factors of an outer term as stored components of `leaf`
std::vector<ChainComplex> outerFactors(const SymSeq& root, const SymSeq& leaf,
                                       const Multiset& m, int outColor, const TreeTerm& tau) {
    std::vector<ChainComplex> f{root.component(sortedTuple(tau.rootColors), outColor).space};
    for (auto& blk : tau.blocks) {
        Multiset bm;
        for (int p : blk) bm.push_back(m[p]);
        f.push_back(leaf.component(bm, tau.rootColors[static_cast<int>(&blk - &tau.blocks[0])])
                        .space);
    }
    return f;
}

} // namespace

SymSeqIso circleAssociator(const SymSeq& r, const SymSeq& s, const SymSeq& t,
                           const CircleResult& rs, const CircleResult& rs_t,
                           const CircleResult& st, const CircleResult& r_st) {
    SymSeqIso iso;
    const ColorSet& A = r.colors();
    int N = r.maxArity();
    std::map<ComponentKey, std::vector<InnerTerm>> rsUnfold, stUnfold;
    auto unfoldRS = [&](const Multiset& beta, int out) -> const std::vector<InnerTerm>& {
        auto it = rsUnfold.find({beta, out});
        if (it == rsUnfold.end())
            it = rsUnfold.emplace(ComponentKey{beta, out}, unfoldComponent(r, s, rs, beta, out))
                     .first;
        return it->second;
    };
    auto unfoldST = [&](const Multiset& beta, int out) -> const std::vector<InnerTerm>& {
        auto it = stUnfold.find({beta, out});
        if (it == stUnfold.end())
            it = stUnfold.emplace(ComponentKey{beta, out}, unfoldComponent(s, t, st, beta, out))
                     .first;
        return it->second;
    };
    std::map<const CircleComponentWitness*, std::vector<ChainMap>> inclCache, extrCache;
    auto cachedIncl = [&](const CircleComponentWitness& w, int i) -> const ChainMap& {
        auto& v = inclCache[&w];
        if (v.empty())
            for (size_t q = 0; q < w.terms.size(); ++q)
                v.push_back(w.termInclusion(static_cast<int>(q)));
        return v[i];
    };
    auto cachedExtr = [&](const CircleComponentWitness& w, int i) -> const ChainMap& {
        auto& v = extrCache[&w];
        if (v.empty())
            for (size_t q = 0; q < w.terms.size(); ++q)
                v.push_back(w.termExtraction(static_cast<int>(q)));
        return v[i];
    };
    for (int a = 0; a < A.size(); ++a) {
        for (int n = 2; n <= N; ++n) {
            for (auto& m : allMultisets(A.size(), n)) {
                ComponentKey key{m, a};
                ChainComplex L = rs_t.seq.component(m, a).space;
                ChainComplex R = r_st.seq.component(m, a).space;
                if (L.isZero() && R.isZero()) continue;
                ChainMap fwd = ChainMap::zeroMap(L, R);
                ChainMap bwd = ChainMap::zeroMap(R, L);

                // ---- forward: unfold left flats, match, fold right ----
                auto itwL = rs_t.wit.find(key);
                if (itwL != rs_t.wit.end() && !L.isZero()) {
                    const CircleComponentWitness& wL = itwL->second;
                    for (size_t ti = 0; ti < wL.terms.size(); ++ti) {
                        const TreeTerm& tau = wL.terms[ti];
                        Multiset beta = sortedTuple(tau.rootColors);
                        std::vector<int> sb = stableSortPerm(tau.rootColors);
                        std::vector<int> sbInv = inversePerm(sb);
                        const auto& inner = unfoldRS(beta, a);
                        std::vector<ChainComplex> tFactors = wL.termSpaces[ti].factors();
                        for (auto& in : inner) {
                            int kp = in.t.k;
                            // right outer term sigma
                            TreeTerm sigma;
                            sigma.k = kp;
                            sigma.rootColors = in.t.rootColors;
                            sigma.blocks.resize(kp);
                            // inner terms per group
                            std::vector<TreeTerm> innerTerms(kp);
                            for (int j = 0; j < kp; ++j) {
                                std::vector<int> members; // outer block indices, beta order
                                for (int x : in.t.blocks[j]) members.push_back(sb[x]);
                                std::vector<int> uni;
                                for (int o : members)
                                    for (int p : tau.blocks[o]) uni.push_back(p);
                                std::sort(uni.begin(), uni.end());
                                sigma.blocks[j] = uni;
                                TreeTerm& ij = innerTerms[j];
                                ij.k = static_cast<int>(members.size());
                                for (int o : members) {
                                    ij.rootColors.push_back(tau.rootColors[o]);
                                    std::vector<int> local;
                                    for (int p : tau.blocks[o]) {
                                        int rank = static_cast<int>(
                                            std::lower_bound(uni.begin(), uni.end(), p) -
                                            uni.begin());
                                        local.push_back(rank);
                                    }
                                    ij.blocks.push_back(local);
                                }
                            }
                            auto itwR = r_st.wit.find(key);
                            if (itwR == r_st.wit.end()) continue;
                            const CircleComponentWitness& wR = itwR->second;
                            int si = wR.termIndex(sigma);
                            if (si < 0) continue; // ST factor vanished after symmetrizing
                            // locate inner witness terms & build include maps
                            std::vector<ChainMap> rightIncludes;
                            rightIncludes.push_back(
                                ChainMap::identity(r.component(sortedTuple(sigma.rootColors), a)
                                                       .space));
                            std::vector<std::vector<ChainComplex>> rightGroups;
                            rightGroups.push_back({rightIncludes[0].source()});
                            bool dead = false;
                            for (int j = 0; j < kp && !dead; ++j) {
                                Multiset bm;
                                for (int p : sigma.blocks[j]) bm.push_back(m[p]);
                                const auto& innerJ = unfoldST(bm, sigma.rootColors[j]);
                                int found = -1;
                                for (size_t q = 0; q < innerJ.size(); ++q)
                                    if (innerJ[q].t == innerTerms[j]) found = static_cast<int>(q);
                                if (found < 0) {
                                    dead = true;
                                    break;
                                }
                                rightIncludes.push_back(innerJ[found].include);
                                rightGroups.push_back(innerJ[found].factors);
                            }
                            if (dead) continue;

                            // left flat factor list and permutation into right order
                            std::vector<ChainComplex> leftFlat;
                            leftFlat.push_back(in.factors[0]); // R
                            for (int j = 0; j < kp; ++j)
                                leftFlat.push_back(in.factors[1 + j]); // S_j
                            for (int i2 = 0; i2 < tau.k; ++i2)
                                leftFlat.push_back(tFactors[1 + i2]); // T blocks, tau order
                            // target positions
                            std::vector<int> posS(kp), groupSize(kp);
                            {
                                int pos = 1;
                                for (int j = 0; j < kp; ++j) {
                                    posS[j] = pos;
                                    groupSize[j] = static_cast<int>(in.t.blocks[j].size());
                                    pos += 1 + groupSize[j];
                                }
                            }
                            std::vector<int> perm(leftFlat.size());
                            perm[0] = 0;
                            for (int j = 0; j < kp; ++j) perm[1 + j] = posS[j];
                            for (int i2 = 0; i2 < tau.k; ++i2) {
                                int x = sbInv[i2];
                                int j = -1, rank = -1;
                                for (int jj = 0; jj < kp && j < 0; ++jj) {
                                    auto& g = in.t.blocks[jj];
                                    auto f2 = std::find(g.begin(), g.end(), x);
                                    if (f2 != g.end()) {
                                        j = jj;
                                        rank = static_cast<int>(f2 - g.begin());
                                    }
                                }
                                perm[1 + kp + i2] = posS[j] + 1 + rank;
                            }

                            // E_L block: extract tau, extract inner, flatten
                            std::vector<ChainMap> e2maps{in.extract};
                            for (int i2 = 0; i2 < tau.k; ++i2)
                                e2maps.push_back(ChainMap::identity(tFactors[1 + i2]));
                            std::vector<std::vector<ChainComplex>> lgroups;
                            lgroups.push_back(in.factors);
                            for (int i2 = 0; i2 < tau.k; ++i2)
                                lgroups.push_back({tFactors[1 + i2]});
                            ChainMap eL = flattenTensor(lgroups)
                                              .compose(tensorHom(e2maps))
                                              .compose(cachedExtr(wL, static_cast<int>(ti)));

                            // fold into right component
                            ChainMap matched = permuteFactors(leftFlat, perm);
                            ChainMap unflat = isoInverse(flattenTensor(rightGroups));
                            std::vector<ChainMap> incMaps = rightIncludes;
                            ChainMap foldR = cachedIncl(wR, si)
                                                 .compose(tensorHom(incMaps))
                                                 .compose(unflat);
                            fwd = fwd + foldR.compose(matched).compose(eL);
                        }
                    }
                }

                // ---- backward: unfold right flats, match, fold left ----
                auto itwR2 = r_st.wit.find(key);
                if (itwR2 != r_st.wit.end() && !R.isZero()) {
                    const CircleComponentWitness& wR = itwR2->second;
                    for (size_t si = 0; si < wR.terms.size(); ++si) {
                        const TreeTerm& sigma = wR.terms[si];
                        int kp = sigma.k;
                        std::vector<ChainComplex> stFactors = wR.termSpaces[si].factors();
                        // unfold each ST factor; cartesian product over choices
                        std::vector<std::vector<InnerTerm>> options(kp);
                        bool any = true;
                        for (int j = 0; j < kp; ++j) {
                            Multiset bm;
                            for (int p : sigma.blocks[j]) bm.push_back(m[p]);
                            options[j] = unfoldST(bm, sigma.rootColors[j]);
                            if (options[j].empty()) any = false;
                        }
                        if (!any) continue;
                        std::vector<int> choice(kp, 0);
                        while (true) {
                            // reconstruct the left flat: blocks concatenated group by group
                            TreeTerm tau;
                            std::vector<int> bTuple;
                            std::vector<std::vector<int>> blocks;
                            for (int j = 0; j < kp; ++j) {
                                const InnerTerm& ij = options[j][choice[j]];
                                for (int q = 0; q < ij.t.k; ++q) {
                                    bTuple.push_back(ij.t.rootColors[q]);
                                    std::vector<int> glob;
                                    for (int lp : ij.t.blocks[q]) glob.push_back(sigma.blocks[j][lp]);
                                    blocks.push_back(glob);
                                }
                            }
                            tau.k = static_cast<int>(bTuple.size());
                            tau.rootColors = bTuple;
                            tau.blocks = blocks;
                            // inner term tau' over beta positions
                            std::vector<int> sb = stableSortPerm(bTuple);
                            std::vector<int> sbInv = inversePerm(sb);
                            TreeTerm tauP;
                            tauP.k = kp;
                            tauP.rootColors = sigma.rootColors;
                            tauP.blocks.resize(kp);
                            {
                                int idx = 0;
                                for (int j = 0; j < kp; ++j) {
                                    const InnerTerm& ij = options[j][choice[j]];
                                    std::vector<int> grp;
                                    for (int q = 0; q < ij.t.k; ++q) grp.push_back(sbInv[idx + q]);
                                    std::sort(grp.begin(), grp.end());
                                    tauP.blocks[j] = grp;
                                    idx += ij.t.k;
                                }
                            }
                            auto itwL2 = rs_t.wit.find(key);
                            int li = itwL2 == rs_t.wit.end() ? -1 : itwL2->second.termIndex(tau);
                            Multiset beta = sortedTuple(bTuple);
                            const auto& innerL = unfoldRS(beta, a);
                            int lin = -1;
                            for (size_t q = 0; q < innerL.size(); ++q)
                                if (innerL[q].t == tauP) lin = static_cast<int>(q);
                            if (li < 0 || lin < 0) {
                                // advance choice
                                int j = kp - 1;
                                while (j >= 0 && ++choice[j] == static_cast<int>(options[j].size()))
                                    choice[j--] = 0;
                                if (j < 0) break;
                                continue;
                            }
                            const CircleComponentWitness& wL = itwL2->second;
                            const InnerTerm& inL = innerL[lin];

                            // right flat factor list
                            std::vector<ChainComplex> rightFlat;
                            std::vector<std::vector<ChainComplex>> rgroups;
                            rightFlat.push_back(stFactors[0]);
                            rgroups.push_back({stFactors[0]});
                            std::vector<ChainMap> extracts{ChainMap::identity(stFactors[0])};
                            for (int j = 0; j < kp; ++j) {
                                const InnerTerm& ij = options[j][choice[j]];
                                extracts.push_back(ij.extract);
                                rgroups.push_back(ij.factors);
                                for (auto& f2 : ij.factors) rightFlat.push_back(f2);
                            }
                            // permutation right -> left flat order
                            // left flat: [R, S_1..S_kp, T-blocks in tau order]
                            std::vector<int> permR(rightFlat.size());
                            permR[0] = 0;
                            {
                                int pos = 1;   // running right-flat position
                                int tIdx = 0;  // running tau block index
                                for (int j = 0; j < kp; ++j) {
                                    const InnerTerm& ij = options[j][choice[j]];
                                    permR[pos] = 1 + j; // S_j
                                    ++pos;
                                    for (int q = 0; q < ij.t.k; ++q) {
                                        permR[pos] = 1 + kp + tIdx;
                                        ++pos;
                                        ++tIdx;
                                    }
                                }
                            }
                            ChainMap eR = flattenTensor(rgroups)
                                              .compose(tensorHom(extracts))
                                              .compose(cachedExtr(wR, static_cast<int>(si)));
                            ChainMap matched = permuteFactors(rightFlat, permR);
                            // fold into left
                            std::vector<ChainMap> incl{inL.include};
                            std::vector<std::vector<ChainComplex>> lgroups{inL.factors};
                            std::vector<ChainComplex> tFactors = wL.termSpaces[li].factors();
                            for (int i2 = 0; i2 < tau.k; ++i2) {
                                incl.push_back(ChainMap::identity(tFactors[1 + i2]));
                                lgroups.push_back({tFactors[1 + i2]});
                            }
                            ChainMap unflatL = isoInverse(flattenTensor(lgroups));
                            ChainMap foldL = cachedIncl(wL, li)
                                                 .compose(tensorHom(incl))
                                                 .compose(unflatL);
                            bwd = bwd + foldL.compose(matched).compose(eR);

                            int j = kp - 1;
                            while (j >= 0 && ++choice[j] == static_cast<int>(options[j].size()))
                                choice[j--] = 0;
                            if (j < 0) break;
                        }
                    }
                }
                iso.forward[key] = std::move(fwd);
                iso.backward[key] = std::move(bwd);
            }
        }
    }
    return iso;
}

// ---- Md monoidality -----------------------------------------------------------

SymSeqIso mdMonoidalIso(const SymSeq& s, const SymSeq& t, const CircleResult& st,
                        const CircleResult& mdmd) {
    SymSeqIso iso;
    const ColorSet& A = s.colors();
    SymSeq mdST = mdFunctor(st.seq);
    for (auto& [key, comp] : mdST.stored()) {
        const Multiset& mKey = key.first;
        int outColor = key.second;
        ChainComplex L = comp.space;
        ChainComplex R = mdmd.seq.component(mKey, outColor).space;
        bool marked = outColor >= A.size();
        if (!marked) {
            // pure-A components are literally shared; identity both ways
            iso.forward[key] = ChainMap::identity(L);
            iso.backward[key] = ChainMap::identity(L);
            continue;
        }
        // marked: left component = (S o T)(sort(nu + c), a) with embedded action
        int a = outColor - A.size();
        int c = mKey.back() - A.size();
        Multiset nu(mKey.begin(), mKey.end() - 1);
        Multiset mA = nu;
        mA.insert(mA.begin() + markedInsertPosition(nu, c), c);
        int ins = markedInsertPosition(nu, c);
        auto itL = st.wit.find({mA, a});
        auto itR = mdmd.wit.find({mKey, outColor});
        if (itL == st.wit.end() || itR == mdmd.wit.end()) {
            iso.forward[key] = ChainMap::zeroMap(L, R);
            iso.backward[key] = ChainMap::zeroMap(R, L);
            continue;
        }
        const CircleComponentWitness& wL = itL->second;
        const CircleComponentWitness& wR = itR->second;
        int n = static_cast<int>(mKey.size());
        // position relabeling: marked key position n-1 -> ins; nu position p -> p or p+1
        std::vector<int> iota(n);
        for (int p = 0; p + 1 < n; ++p) iota[p] = (nu[p] <= c) ? p : p + 1;
        iota[n - 1] = ins;
        // big-sum permutation map, identity factors
        ChainMap perm = ChainMap::zeroMap(wR.bigSum.total, wL.bigSum.total);
        for (size_t ri = 0; ri < wR.terms.size(); ++ri) {
            const TreeTerm& rt = wR.terms[ri];
            TreeTerm lt;
            lt.k = rt.k;
            for (int v : rt.rootColors) lt.rootColors.push_back(v >= A.size() ? v - A.size() : v);
            for (auto& blk : rt.blocks) {
                std::vector<int> nb;
                for (int p : blk) nb.push_back(iota[p]);
                std::sort(nb.begin(), nb.end());
                lt.blocks.push_back(nb);
            }
            int li = wL.termIndex(lt);
            if (li < 0) throw std::logic_error("mdMonoidalIso: term bijection failed");
            // spaces are literally equal factor by factor
            perm = perm + wL.bigSum.include[li].compose(
                              ChainMap::identity(wR.termSpaces[ri].complex()))
                              .compose(wR.bigSum.project[static_cast<int>(ri)]);
        }
        ChainMap bwd = wL.sym.projection.compose(perm).compose(wR.sym.inclusion);
        ChainMap fwd = wR.sym.projection.compose(isoInverse(perm)).compose(wL.sym.inclusion);
        iso.forward[key] = std::move(fwd);
        iso.backward[key] = std::move(bwd);
    }
    return iso;
}

} // namespace cooperad
