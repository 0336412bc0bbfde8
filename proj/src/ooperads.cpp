#include "cooperad/ooperads.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cooperad {

std::string AxiomReport::str() const {
    std::ostringstream os;
    os << header << "\n";
    if (issues.empty()) {
        os << "all axioms hold\n";
        return os.str();
    }
    for (auto& i : issues) {
        os << i.axiom << " fails at ([";
        for (size_t q = 0; q < i.where.first.size(); ++q) {
            if (q) os << ",";
            os << i.where.first[q];
        }
        os << "], " << i.where.second << ")";
        if (!i.detail.empty()) os << ": " << i.detail;
        os << "\n";
    }
    return os.str();
}

Operad::Operad(SymSeq carrier, std::map<ComponentKey, ChainMap> gamma)
    : carrier_(std::make_shared<SymSeq>(std::move(carrier))),
      square_(std::make_shared<CircleResult>(circle(*carrier_, *carrier_))),
      gamma_(std::move(gamma)) {}

ChainMap Operad::gamma(const Multiset& m, int outColor) const {
    auto it = gamma_.find({m, outColor});
    if (it != gamma_.end()) return it->second;
    return ChainMap::zeroMap(square_->seq.component(m, outColor).space,
                             carrier_->component(m, outColor).space);
}

Cooperad::Cooperad(SymSeq carrier, std::map<ComponentKey, ChainMap> delta)
    : carrier_(std::make_shared<SymSeq>(std::move(carrier))),
      square_(std::make_shared<CircleResult>(circle(*carrier_, *carrier_))),
      delta_(std::move(delta)) {}

ChainMap Cooperad::delta(const Multiset& m, int outColor) const {
    auto it = delta_.find({m, outColor});
    if (it != delta_.end()) return it->second;
    return ChainMap::zeroMap(carrier_->component(m, outColor).space,
                             square_->seq.component(m, outColor).space);
}

bool Cooperad::operator==(const Cooperad& o) const {
    if (!(*carrier_ == *o.carrier_)) return false;
    for (auto& [key, v] : delta_) {
        ChainMap other = o.delta(key.first, key.second);
        if (!(v == other)) return false;
    }
    for (auto& [key, v] : o.delta_) {
        ChainMap mine = delta(key.first, key.second);
        if (!(v == mine)) return false;
    }
    return true;
}

// ---- axiom checks -------------------------------------------------------------

namespace {

std::string matDiff(const ChainMap& a, const ChainMap& b) {
    for (auto& [n, d] : a.source().dims()) {
        if (a.block(n) != b.block(n)) {
            std::ostringstream os;
            os << "difference at degree " << n << ": " << (a.block(n) - b.block(n)).str();
            return os.str();
        }
    }
    return "";
}

std::vector<ComponentKey> lawKeys(const SymSeq& s) {
    std::vector<ComponentKey> keys;
    for (int a = 0; a < s.colors().size(); ++a)
        for (int n = 2; n <= s.maxArity(); ++n)
            for (auto& m : allMultisets(s.colors().size(), n)) keys.push_back({m, a});
    return keys;
}

} // namespace

AxiomReport checkOperad(const Operad& p) {
    AxiomReport rep;
    rep.header = "operad axioms, asserted modulo arity > " + std::to_string(p.carrier().maxArity());
    const SymSeq& c = p.carrier();
    std::string why;
    if (!c.checkActions(&why)) rep.issues.push_back({"group-relations", {{}, 0}, why});

    for (auto& key : lawKeys(c)) {
        ChainMap g = p.gamma(key.first, key.second);
        if (!g.valid(&why)) {
            rep.issues.push_back({"gamma-chain-map", key, why});
            continue;
        }
        SymSeqComponent sq = p.square().seq.component(key.first, key.second);
        SymSeqComponent cc = c.component(key.first, key.second);
        for (size_t i = 0; i < sq.action.generators().size(); ++i) {
            ChainMap lhs = g.compose(sq.action.generators()[i]);
            ChainMap rhs = cc.action.generators()[i].compose(g);
            if (!(lhs == rhs)) {
                rep.issues.push_back({"gamma-equivariance", key, matDiff(lhs, rhs)});
                break;
            }
        }
    }

    SymSeq triv = unitTriv(c.colors(), c.maxArity());
    CircleResult trivC = circle(triv, c);
    CircleResult cTriv = circle(c, triv);
    SymSeqHom eta{&triv, &c, {}};
    SymSeqHom idc = SymSeqHom::identity(c);
    SymSeqHom leftIns = circleHom(eta, idc, trivC, p.square());
    SymSeqHom rightIns = circleHom(idc, eta, cTriv, p.square());
    for (auto& [key, comp] : c.stored()) {
        ChainMap g = p.gamma(key.first, key.second);
        if (!g.compose(leftIns.at(key.first, key.second)).isIdentity())
            rep.issues.push_back({"left-unit", key, ""});
        if (!g.compose(rightIns.at(key.first, key.second)).isIdentity())
            rep.issues.push_back({"right-unit", key, ""});
    }

    CircleResult sq_c = circle(p.square().seq, c);
    CircleResult c_sq = circle(c, p.square().seq);
    SymSeqIso assoc = circleAssociator(c, c, c, p.square(), sq_c, p.square(), c_sq);
    SymSeqHom gammaHom{&p.square().seq, &c, p.gammaMap()};
    SymSeqHom gl = circleHom(gammaHom, idc, sq_c, p.square());
    SymSeqHom gr = circleHom(idc, gammaHom, c_sq, p.square());
    for (auto& key : lawKeys(c)) {
        if (sq_c.seq.component(key.first, key.second).space.isZero() &&
            c_sq.seq.component(key.first, key.second).space.isZero())
            continue;
        ChainMap g = p.gamma(key.first, key.second);
        ChainMap lhs = g.compose(gl.at(key.first, key.second));
        ChainMap rhs = g.compose(gr.at(key.first, key.second)).compose(assoc.forward.at(key));
        if (!(lhs == rhs)) rep.issues.push_back({"associativity", key, matDiff(lhs, rhs)});
    }
    return rep;
}

AxiomReport checkCooperad(const Cooperad& q) {
    AxiomReport rep;
    rep.header =
        "cooperad axioms, asserted modulo arity > " + std::to_string(q.carrier().maxArity());
    const SymSeq& c = q.carrier();
    std::string why;
    if (!c.checkActions(&why)) rep.issues.push_back({"group-relations", {{}, 0}, why});

    for (auto& key : lawKeys(c)) {
        ChainMap d = q.delta(key.first, key.second);
        if (!d.valid(&why)) {
            rep.issues.push_back({"delta-chain-map", key, why});
            continue;
        }
        SymSeqComponent sq = q.square().seq.component(key.first, key.second);
        SymSeqComponent cc = c.component(key.first, key.second);
        for (size_t i = 0; i < cc.action.generators().size(); ++i) {
            ChainMap lhs = d.compose(cc.action.generators()[i]);
            ChainMap rhs = sq.action.generators()[i].compose(d);
            if (!(lhs == rhs)) {
                rep.issues.push_back({"delta-equivariance", key, matDiff(lhs, rhs)});
                break;
            }
        }
    }

    SymSeq triv = unitTriv(c.colors(), c.maxArity());
    CircleResult trivC = circle(triv, c);
    CircleResult cTriv = circle(c, triv);
    SymSeqHom eps{&c, &triv, {}};
    SymSeqHom idc = SymSeqHom::identity(c);
    SymSeqHom leftExt = circleHom(eps, idc, q.square(), trivC);
    SymSeqHom rightExt = circleHom(idc, eps, q.square(), cTriv);
    for (auto& [key, comp] : c.stored()) {
        ChainMap d = q.delta(key.first, key.second);
        if (!leftExt.at(key.first, key.second).compose(d).isIdentity())
            rep.issues.push_back({"left-counit", key, ""});
        if (!rightExt.at(key.first, key.second).compose(d).isIdentity())
            rep.issues.push_back({"right-counit", key, ""});
    }

    CircleResult sq_c = circle(q.square().seq, c);
    CircleResult c_sq = circle(c, q.square().seq);
    SymSeqIso assoc = circleAssociator(c, c, c, q.square(), sq_c, q.square(), c_sq);
    SymSeqHom deltaHom{&c, &q.square().seq, q.deltaMap()};
    SymSeqHom dl = circleHom(deltaHom, idc, q.square(), sq_c);
    SymSeqHom dr = circleHom(idc, deltaHom, q.square(), c_sq);
    for (auto& key : lawKeys(c)) {
        ChainMap d = q.delta(key.first, key.second);
        if (d.source().isZero()) continue;
        ChainMap lhs = assoc.forward.at(key).compose(dl.at(key.first, key.second)).compose(d);
        ChainMap rhs = dr.at(key.first, key.second).compose(d);
        if (!(lhs == rhs)) rep.issues.push_back({"coassociativity", key, matDiff(lhs, rhs)});
    }
    return rep;
}

// ---- builtins -----------------------------------------------------------------

namespace {

long factorial(int n) {
    long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

std::vector<int> permUnrank(int n, long rank) {
    std::vector<int> avail(n);
    std::iota(avail.begin(), avail.end(), 0);
    std::vector<int> p;
    for (int i = n; i >= 1; --i) {
        long f = factorial(i - 1);
        long idx = rank / f;
        rank %= f;
        p.push_back(avail[idx]);
        avail.erase(avail.begin() + idx);
    }
    return p;
}

long permRank(const std::vector<int>& p) {
    int n = static_cast<int>(p.size());
    std::vector<int> avail(n);
    std::iota(avail.begin(), avail.end(), 0);
    long rank = 0;
    for (int i = 0; i < n; ++i) {
        auto it = std::find(avail.begin(), avail.end(), p[i]);
        rank += (it - avail.begin()) * factorial(n - 1 - i);
        avail.erase(it);
    }
    return rank;
}

SymSeq commCarrier(const ColorSet& colors, int maxArity) {
    SymSeq s(colors, maxArity, true);
    ChainComplex q = ChainComplex::line(0);
    for (int n = 2; n <= maxArity; ++n) {
        Multiset m(n, 0);
        std::vector<int> pos;
        std::vector<ChainMap> gens;
        for (int p = 0; p + 1 < n; ++p) {
            pos.push_back(p);
            gens.push_back(ChainMap::identity(q));
        }
        s.setComponent(m, 0, {q, GroupAction(q, pos, gens, n)});
    }
    return s;
}

SymSeq assocCarrier(const ColorSet& colors, int maxArity) {
    SymSeq s(colors, maxArity, true);
    for (int n = 2; n <= maxArity; ++n) {
        long sz = factorial(n);
        std::map<int, int> dims{{0, static_cast<int>(sz)}};
        ChainComplex reg = ChainComplex::fromDims(dims, {});
        Multiset m(n, 0);
        std::vector<int> pos;
        std::vector<ChainMap> gens;
        for (int p = 0; p + 1 < n; ++p) {
            Matrix g(static_cast<int>(sz), static_cast<int>(sz));
            for (long r = 0; r < sz; ++r) {
                std::vector<int> w = permUnrank(n, r);
                for (auto& v : w) {
                    if (v == p)
                        v = p + 1;
                    else if (v == p + 1)
                        v = p;
                }
                g.at(static_cast<int>(permRank(w)), static_cast<int>(r)) = 1;
            }
            ChainMap gm(reg, reg);
            gm.setBlock(0, std::move(g));
            pos.push_back(p);
            gens.push_back(std::move(gm));
        }
        s.setComponent(m, 0, {reg, GroupAction(reg, pos, gens, n)});
    }
    return s;
}

std::vector<int> assocComposite(const TreeTerm& tau, const std::vector<int>& rootWord,
                                const std::vector<std::vector<int>>& blockWords) {
    std::vector<int> out;
    for (int j = 0; j < tau.k; ++j) {
        int r = rootWord[j];
        for (int q : blockWords[r]) out.push_back(tau.blocks[r][q]);
    }
    return out;
}

} // namespace

Operad builtinOperad(const std::string& name, const ColorSet& colors, int maxArity) {
    if (name == "triv") return Operad(unitTriv(colors, maxArity), {});
    if (colors.size() != 1) throw UnknownName("builtin operads are single-colored");
    if (name == "comm") {
        SymSeq carrier = commCarrier(colors, maxArity);
        CircleResult sq = circle(carrier, carrier);
        std::map<ComponentKey, ChainMap> gamma;
        for (auto& [key, comp] : carrier.stored()) {
            auto itw = sq.wit.find(key);
            if (itw == sq.wit.end()) continue;
            const auto& w = itw->second;
            Matrix ones(1, w.bigSum.total.dim(0));
            for (int j = 0; j < ones.cols(); ++j) ones.at(0, j) = 1;
            ChainMap g(w.sym.image, comp.space);
            g.setBlock(0, ones * w.sym.inclusion.block(0));
            gamma[key] = std::move(g);
        }
        return Operad(std::move(carrier), std::move(gamma));
    }
    if (name == "assoc") {
        SymSeq carrier = assocCarrier(colors, maxArity);
        CircleResult sq = circle(carrier, carrier);
        std::map<ComponentKey, ChainMap> gamma;
        for (auto& [key, comp] : carrier.stored()) {
            auto itw = sq.wit.find(key);
            if (itw == sq.wit.end()) continue;
            const auto& w = itw->second;
            int n = static_cast<int>(key.first.size());
            Matrix g(static_cast<int>(factorial(n)), w.bigSum.total.dim(0));
            int colOff = 0;
            for (size_t ti = 0; ti < w.terms.size(); ++ti) {
                const TreeTerm& tau = w.terms[ti];
                const TensorProduct& ts = w.termSpaces[ti];
                int d = ts.complex().dim(0);
                for (int col = 0; col < d; ++col) {
                    auto e = ts.decode(0, col);
                    std::vector<int> rootWord = tau.k == 1 ? std::vector<int>{0}
                                                           : permUnrank(tau.k, e.indices[0]);
                    std::vector<std::vector<int>> blockWords(tau.k);
                    for (int b = 0; b < tau.k; ++b) {
                        int bs = static_cast<int>(tau.blocks[b].size());
                        blockWords[b] =
                            bs == 1 ? std::vector<int>{0} : permUnrank(bs, e.indices[1 + b]);
                    }
                    std::vector<int> word = assocComposite(tau, rootWord, blockWords);
                    g.at(static_cast<int>(permRank(word)), colOff + col) = 1;
                }
                colOff += d;
            }
            ChainMap gm(w.sym.image, comp.space);
            gm.setBlock(0, g * w.sym.inclusion.block(0));
            gamma[key] = std::move(gm);
        }
        return Operad(std::move(carrier), std::move(gamma));
    }
    throw UnknownName("unknown operad builtin: " + name);
}

ChainMap transposeDegreeZero(const ChainMap& f) {
    ChainMap r(f.target(), f.source());
    if (f.source().dim(0) > 0 || f.target().dim(0) > 0)
        r.setBlock(0, f.block(0).transpose());
    return r;
}

Cooperad dualize(const Operad& p) {
    AxiomReport rep = checkOperad(p);
    if (!rep.ok()) throw AxiomFailure("dualize: input fails checkOperad:\n" + rep.str());
    for (auto& [key, comp] : p.carrier().stored())
        for (auto& [deg, d] : comp.space.dims())
            if (deg != 0)
                throw std::invalid_argument("dualize supports carriers concentrated in degree 0");
    SymSeq dual(p.carrier().colors(), p.carrier().maxArity(), true);
    for (auto& [key, comp] : p.carrier().stored()) {
        std::vector<ChainMap> gens;
        for (auto& g : comp.action.generators()) {
            auto inv = g.block(0).inverse();
            if (!inv) throw AxiomFailure("dualize: action generator not invertible");
            ChainMap dg(comp.space, comp.space);
            dg.setBlock(0, inv->transpose());
            gens.push_back(std::move(dg));
        }
        dual.setComponent(key.first, key.second,
                          {comp.space, GroupAction(comp.space, comp.action.generatorPositions(),
                                                   gens, comp.action.degree())});
    }
    CircleResult dsq = circle(dual, dual);
    std::map<ComponentKey, ChainMap> delta;
    for (auto& [key, comp] : dual.stored()) {
        auto itD = dsq.wit.find(key);
        auto itP = p.square().wit.find(key);
        if (itD == dsq.wit.end() || itP == p.square().wit.end()) continue;
        ChainMap g = p.gamma(key.first, key.second);
        // gamma transposed in the image bases, then carried from Im(e) to
        // Im(e^T) by including and re-projecting; this normalization is the
        // one under which the canonical term maps satisfy the counit laws
        Matrix d0 = itD->second.sym.projection.block(0) * itP->second.sym.inclusion.block(0) *
                    g.block(0).transpose();
        ChainMap dm(comp.space, dsq.seq.component(key.first, key.second).space);
        dm.setBlock(0, std::move(d0));
        delta[key] = std::move(dm);
    }
    return Cooperad(std::move(dual), std::move(delta));
}

Cooperad builtinCooperad(const std::string& name, const ColorSet& colors, int maxArity) {
    if (name == "triv") return Cooperad(unitTriv(colors, maxArity), {});
    if (name == "cocomm") return dualize(builtinOperad("comm", colors, maxArity));
    if (name == "coassoc") return dualize(builtinOperad("assoc", colors, maxArity));
    throw UnknownName("unknown cooperad builtin: " + name);
}

// ---- Md and lifted cooperads ---------------------------------------------------

Cooperad mdCooperad(const Cooperad& q) {
    const ColorSet& A = q.carrier().colors();
    SymSeq mdc = mdFunctor(q.carrier());
    CircleResult mdsq = circle(mdc, mdc);
    SymSeqIso iso = mdMonoidalIso(q.carrier(), q.carrier(), q.square(), mdsq);
    std::map<ComponentKey, ChainMap> delta;
    for (auto& [key, comp] : mdc.stored()) {
        ComponentKey baseKey = key;
        if (key.second >= A.size()) {
            int c = key.first.back() - A.size();
            Multiset nu(key.first.begin(), key.first.end() - 1);
            Multiset mA = nu;
            mA.insert(mA.begin() + markedInsertPosition(nu, c), c);
            baseKey = {mA, key.second - A.size()};
        }
        ChainMap d = q.delta(baseKey.first, baseKey.second);
        if (d.isZero()) continue;
        auto itIso = iso.forward.find(key);
        if (itIso == iso.forward.end()) continue;
        delta[key] = itIso->second.compose(d);
    }
    return Cooperad(std::move(mdc), std::move(delta));
}

Cooperad liftCooperad(const Cooperad& q, const ColorLift& lift) {
    SymSeq lc = liftSymSeq(q.carrier(), lift);
    CircleResult lsq = circle(lc, lc);
    std::map<ComponentKey, ChainMap> delta;
    for (auto& [key, comp] : lc.stored()) {
        const Multiset& lm = key.first;
        Multiset pm;
        for (int v : lm) pm.push_back(lift.baseOf[v]);
        if (!std::is_sorted(pm.begin(), pm.end()))
            throw std::logic_error("liftCooperad: colorset not base-major");
        int a = lift.baseOf[key.second];
        ChainMap d = q.delta(pm, a);
        if (d.isZero()) continue;
        auto itL = lsq.wit.find(key);
        auto itB = q.square().wit.find({pm, a});
        if (itL == lsq.wit.end() || itB == q.square().wit.end()) continue;
        const CircleComponentWitness& wl = itL->second;
        const CircleComponentWitness& wb = itB->second;
        ChainComplex target = lsq.seq.component(key.first, key.second).space;
        if (target.isZero()) continue;
        ChainMap acc = ChainMap::zeroMap(d.target(), target);
        for (size_t li = 0; li < wl.terms.size(); ++li) {
            const TreeTerm& lt = wl.terms[li];
            TreeTerm bt;
            bt.k = lt.k;
            for (int v : lt.rootColors) bt.rootColors.push_back(lift.baseOf[v]);
            bt.blocks = lt.blocks;
            int bi = wb.termIndex(bt);
            if (bi < 0) continue;
            // root transition: the lifted sort refines the base stable sort
            std::vector<int> sb = stableSortPerm(bt.rootColors);
            std::vector<int> sHatInv = inversePerm(stableSortPerm(lt.rootColors));
            std::vector<int> trans(lt.k);
            for (int j = 0; j < lt.k; ++j) trans[j] = sHatInv[sb[j]];
            SymSeqComponent rootBase = q.carrier().component(sortedTuple(bt.rootColors), a);
            std::vector<ChainMap> fmaps{rootBase.action.permutationMatrix(trans)};
            for (int b = 0; b < lt.k; ++b)
                fmaps.push_back(ChainMap::identity(wl.termSpaces[li].factors()[1 + b]));
            acc = acc + wl.termInclusion(static_cast<int>(li))
                            .compose(tensorHom(fmaps))
                            .compose(wb.termExtraction(bi));
        }
        delta[key] = acc.compose(d);
    }
    return Cooperad(std::move(lc), std::move(delta));
}

Cooperad externalSumCooperad(const Cooperad& q1, const Cooperad& q2) {
    ExternalSumResult es = externalSum(q1.carrier(), q2.carrier());
    CircleResult sq = circle(es.seq, es.seq);
    std::map<ComponentKey, ChainMap> delta;
    int off = q1.carrier().colors().size();
    for (auto& [key, comp] : es.seq.stored()) {
        bool fromA = key.second < off;
        ComponentKey baseKey = key;
        const Cooperad& src = fromA ? q1 : q2;
        if (!fromA) {
            Multiset shifted;
            for (int v : key.first) shifted.push_back(v - off);
            baseKey = {shifted, key.second - off};
        }
        ChainMap d = src.delta(baseKey.first, baseKey.second);
        if (d.isZero()) continue;
        auto itS = sq.wit.find(key);
        auto itB = src.square().wit.find(baseKey);
        if (itS == sq.wit.end() || itB == src.square().wit.end()) continue;
        const CircleComponentWitness& ws = itS->second;
        const CircleComponentWitness& wbse = itB->second;
        ChainComplex target = sq.seq.component(key.first, key.second).space;
        ChainMap acc = ChainMap::zeroMap(d.target(), target);
        for (size_t si = 0; si < ws.terms.size(); ++si) {
            TreeTerm bt = ws.terms[si];
            if (!fromA)
                for (auto& v : bt.rootColors) v -= off;
            int bi = wbse.termIndex(bt);
            if (bi < 0) continue;
            acc = acc + ws.termInclusion(static_cast<int>(si))
                            .compose(wbse.termExtraction(bi));
        }
        delta[key] = acc.compose(d);
    }
    return Cooperad(std::move(es.seq), std::move(delta));
}

} // namespace cooperad
