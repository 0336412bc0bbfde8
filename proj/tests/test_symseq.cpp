#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cooperad/symseq.hpp"

using namespace cooperad;

namespace {

ColorSet oneColor() { return ColorSet({"a"}); }

// single color, S(2) = Q with trivial action, S(n >= 3) = 0
SymSeq binarySeq(int maxArity) {
    SymSeq s(oneColor(), maxArity, true);
    ChainComplex q = ChainComplex::line(0);
    GroupAction act(q, {0}, {ChainMap::identity(q)}, 2);
    s.setComponent({0, 0}, 0, {q, act});
    return s;
}

// coComm-shaped: S(n) = Q with trivial action for 2 <= n <= maxArity
SymSeq cocommShape(int maxArity) {
    SymSeq s(oneColor(), maxArity, true);
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

} // namespace

TEST_CASE("circle unit laws are literal componentwise equality") {
    SymSeq s = cocommShape(3);
    SymSeq triv = unitTriv(oneColor(), 3);
    CHECK(circle(triv, s).seq == s);
    CHECK(circle(s, triv).seq == s);
    CHECK(circle(triv, triv).seq == triv);
}

TEST_CASE("binary self-composite dims") {
    SymSeq s = binarySeq(3);
    auto ss = circle(s, s);
    // (S o S)(2): two trees (unit o binary, binary o (unit,unit)); both survive
    CHECK(ss.seq.component({0, 0}, 0).space.dim(0) == 2);
    // (S o S)(3): 6 ordered (1,2)-partitions of 3 inputs, block swap has 3 orbits
    CHECK(ss.seq.component({0, 0, 0}, 0).space.dim(0) == 3);
    CHECK(ss.seq.checkActions());
}

TEST_CASE("unitTriv stored components vanish") {
    SymSeq triv = unitTriv(oneColor(), 3);
    CHECK(triv.component({0, 0}, 0).space.isZero());
    CHECK(triv.component({0}, 0).space == ChainComplex::line(0));
}

TEST_CASE("actOn unit and cocomm examples") {
    SymSeq triv = unitTriv(oneColor(), 3);
    ColoredObject x;
    x.colors = oneColor();
    x.set(0, ChainComplex::line(0));
    auto r = actOn(triv, x);
    CHECK(r.total() == x);

    SymSeq s = cocommShape(3);
    auto r2 = actOn(s, x);
    CHECK(r2.part(0, 1).dim(0) == 1);
    CHECK(r2.part(0, 2).dim(0) == 1);
    CHECK(r2.part(0, 3).dim(0) == 1);
    CHECK(r2.total().at(0).totalDim() == 3);

    // X = Q^2: weight-2 component has dim 3 = dim Sym^2
    ColoredObject x2;
    x2.colors = oneColor();
    x2.set(0, directSum({ChainComplex::line(0), ChainComplex::line(0)}).total);
    auto r3 = actOn(s, x2);
    CHECK(r3.part(0, 2).dim(0) == 3);
}

TEST_CASE("mdFunctor cases") {
    SymSeq s = binarySeq(3);
    SymSeq md = mdFunctor(s);
    ColorSet D = md.colors();
    CHECK(D.size() == 2);
    // Md_S({a,a}, a) = S({a,a}, a)
    CHECK(md.component({0, 0}, 0).space.dim(0) == 1);
    // Md_S({da,da}, da) = 0
    CHECK(md.component({1, 1}, 1).space.isZero());
    // Md_S({a,da}, da) = S({a,a},a), dim 1
    CHECK(md.component({0, 1}, 1).space.dim(0) == 1);
    CHECK(md.checkActions());
}

TEST_CASE("mixedAct examples") {
    SymSeq triv = unitTriv(oneColor(), 3);
    ColoredObject c, m;
    c.colors = oneColor();
    m.colors = oneColor();
    c.set(0, ChainComplex::line(0));
    m.set(0, ChainComplex::line(0));
    auto r = mixedAct(triv, c, m);
    CHECK(r.part(oneColor(), 0, 1) == ChainComplex::line(0));
    CHECK(r.act.part(1, 2).isZero());

    SymSeq s = cocommShape(3);
    auto r2 = mixedAct(s, c, m);
    CHECK(r2.part(oneColor(), 0, 1).dim(0) == 1);
    CHECK(r2.part(oneColor(), 0, 2).dim(0) == 1);
    CHECK(r2.part(oneColor(), 0, 3).dim(0) == 1);

    // mixedAct(S, C, 0) = 0
    ColoredObject zero;
    zero.colors = oneColor();
    auto r3 = mixedAct(s, c, zero);
    for (int w = 1; w <= 3; ++w) CHECK(r3.act.part(1, w).isZero());
}

TEST_CASE("externalSum and restrict") {
    SymSeq s = binarySeq(2);
    SymSeq t = cocommShape(2);
    auto es = externalSum(s, t);
    CHECK(es.renamed); // both use color "a"
    auto [rs, rt] = restrictSum(es.seq, s.colors(), ColorSet({es.combined.name(1)}));
    CHECK(rs == s);
    // mixed components vanish
    CHECK(es.seq.component({0, 1}, 0).space.isZero());
    CHECK(es.seq.component({0, 1}, 1).space.isZero());
}

TEST_CASE("truncate") {
    SymSeq s = cocommShape(4);
    SymSeq t = truncate(s, 3);
    CHECK(t.maxArity() == 3);
    CHECK(t.component({0, 0, 0, 0}, 0).space.isZero());
    CHECK(truncate(s, 4) == s);
    CHECK_THROWS_AS(truncate(s, 1), BadArity);
}

TEST_CASE("circle truncation coherence") {
    SymSeq s = cocommShape(4);
    SymSeq t = binarySeq(4);
    auto full = circle(s, t);
    SymSeq lhs = truncate(full.seq, 3);
    auto rhs = circle(truncate(s, 3), truncate(t, 3));
    CHECK(lhs == rhs.seq);
}

TEST_CASE("associator on cocomm shape") {
    SymSeq s = cocommShape(3);
    auto ss = circle(s, s);
    auto ss_s = circle(ss.seq, s);
    auto s_ss = circle(s, ss.seq);
    auto iso = circleAssociator(s, s, s, ss, ss_s, ss, s_ss);
    for (auto& [key, fwd] : iso.forward) {
        const ChainMap& bwd = iso.backward.at(key);
        ChainComplex L = ss_s.seq.component(key.first, key.second).space;
        ChainComplex R = s_ss.seq.component(key.first, key.second).space;
        CHECK(L.dims() == R.dims());
        CHECK(fwd.valid());
        CHECK(bwd.valid());
        CHECK(bwd.compose(fwd).isIdentity());
        CHECK(fwd.compose(bwd).isIdentity());
    }
    // equivariance of the forward maps
    for (auto& [key, fwd] : iso.forward) {
        auto compL = ss_s.seq.component(key.first, key.second);
        auto compR = s_ss.seq.component(key.first, key.second);
        for (size_t g = 0; g < compL.action.generators().size(); ++g) {
            ChainMap lhs = fwd.compose(compL.action.generators()[g]);
            ChainMap rhs = compR.action.generators()[g].compose(fwd);
            CHECK(lhs == rhs);
        }
    }
}

TEST_CASE("Md monoidality on binary shape") {
    SymSeq s = binarySeq(3);
    SymSeq t = cocommShape(3);
    auto st = circle(s, t);
    SymSeq mdS = mdFunctor(s), mdT = mdFunctor(t);
    auto mdmd = circle(mdS, mdT);
    SymSeq lhs = mdFunctor(st.seq);
    auto iso = mdMonoidalIso(s, t, st, mdmd);
    for (auto& [key, comp] : lhs.stored()) {
        ChainComplex R = mdmd.seq.component(key.first, key.second).space;
        CHECK(comp.space.dims() == R.dims());
        const ChainMap& fwd = iso.forward.at(key);
        const ChainMap& bwd = iso.backward.at(key);
        CHECK(fwd.valid());
        CHECK(bwd.compose(fwd).isIdentity());
        CHECK(fwd.compose(bwd).isIdentity());
    }
    // pure-A components literally equal
    for (auto& [key, comp] : lhs.stored()) {
        if (key.second < s.colors().size()) {
            bool pureA = true;
            for (int v : key.first) pureA &= v < s.colors().size();
            if (pureA) CHECK(comp.space == mdmd.seq.component(key.first, key.second).space);
        }
    }
}
