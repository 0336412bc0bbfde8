#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cooperad/chain.hpp"
#include "cooperad/group.hpp"
#include "cooperad/symseq.hpp"

#include <random>

using namespace cooperad;

namespace {

Matrix mat(int r, int c, std::vector<long> vals) {
    Matrix m(r, c);
    int k = 0;
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m.at(i, j) = rat(vals[k++]);
    return m;
}

// small random complexes: direct sums of shifted lines and two-term cones,
// always valid by construction
ChainComplex randomComplex(std::mt19937_64& rng, int maxPieces = 2, int minDeg = -1,
                           int maxDeg = 2) {
    std::uniform_int_distribution<int> npieces(0, maxPieces);
    std::uniform_int_distribution<int> deg(minDeg, maxDeg - 1);
    std::uniform_int_distribution<int> kind(0, 1);
    std::uniform_int_distribution<int> scal(1, 3);
    std::vector<ChainComplex> parts;
    int n = npieces(rng);
    for (int i = 0; i < n; ++i) {
        int d = deg(rng);
        if (kind(rng) == 0) {
            parts.push_back(ChainComplex::line(d));
        } else {
            std::map<int, int> dims{{d, 1}, {d + 1, 1}};
            std::map<int, Matrix> diffs;
            Matrix m(1, 1);
            m.at(0, 0) = rat(scal(rng));
            diffs[d + 1] = m;
            parts.push_back(ChainComplex::fromDims(dims, diffs));
        }
    }
    if (parts.empty()) return ChainComplex::zero();
    return directSum(parts).total;
}

} // namespace

TEST_CASE("matrix rank, kernel, solve") {
    Matrix a = mat(2, 2, {1, 1, 2, 2});
    CHECK(a.rank() == 1);
    Matrix k = a.kernelBasis();
    CHECK(k.cols() == 1);
    CHECK((a * k).isZero());

    Matrix b = mat(2, 2, {1, 2, 3, 4});
    auto inv = b.inverse();
    REQUIRE(inv);
    CHECK((*inv * b) == Matrix::identity(2));

    auto x = a.solve(mat(2, 1, {3, 6}));
    REQUIRE(x);
    CHECK((a * *x) == mat(2, 1, {3, 6}));
    CHECK(!a.solve(mat(2, 1, {1, 0})).has_value());
}

TEST_CASE("tensor of two-step complexes matches hand expansion") {
    // X = Q in degree 0 + Q in degree 1, zero differential; dims of X (x) X
    // are (1,2,1) in degrees (0,1,2)
    ChainComplex x = directSum({ChainComplex::line(0), ChainComplex::line(1)}).total;
    ChainComplex xx = tensor(x, x);
    CHECK(xx.dim(0) == 1);
    CHECK(xx.dim(1) == 2);
    CHECK(xx.dim(2) == 1);
    CHECK(xx.valid());
}

TEST_CASE("tensor with zero and unit") {
    ChainComplex z;
    ChainComplex u = ChainComplex::line(0);
    std::mt19937_64 rng(7);
    ChainComplex y = randomComplex(rng);
    CHECK(tensor(z, y).isZero());
    CHECK(tensor(u, u) == u);
    CHECK(tensor(u, y) == y);
}

TEST_CASE("Koszul: tensor differential squares to zero, braiding involutive") {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 25; ++it) {
        ChainComplex x = randomComplex(rng), y = randomComplex(rng);
        ChainComplex xy = tensor(x, y);
        CHECK(xy.valid());
        ChainMap s = braiding(x, y);
        CHECK(s.valid());
        ChainMap s2 = braiding(y, x);
        CHECK(s2.compose(s).isIdentity());
    }
}

TEST_CASE("shift") {
    std::mt19937_64 rng(3);
    ChainComplex x = randomComplex(rng);
    CHECK(shift(x, 0) == x);
    CHECK(shift(ChainComplex::line(0), 1) == ChainComplex::line(1));
    CHECK(shift(shift(x, 1), -1) == x);
    CHECK(shift(x, 1).valid());
}

TEST_CASE("cone and fib") {
    // f = 0: V -> 0 gives fib(f) = V
    std::mt19937_64 rng(5);
    ChainComplex v = randomComplex(rng);
    ChainMap zeroToZero(v, ChainComplex::zero());
    auto fw = fib(zeroToZero);
    CHECK(fw.fib == v);
    CHECK(fw.toSource.isIdentity());

    // cone(id) acyclic
    ChainComplex w = randomComplex(rng);
    auto cw = cone(ChainMap::identity(w));
    CHECK(cw.cone.valid());
    CHECK(homology(cw.cone).empty());
    CHECK(cw.fromTarget.valid());
    CHECK(cw.toShiftedSource.valid());

    // f: Q -> Q^2 inclusion into first coordinate, degree 0; cofib has
    // homology Q in degree 0
    ChainComplex q = ChainComplex::line(0);
    ChainComplex q2 = directSum({q, q}).total;
    ChainMap inc(q, q2);
    inc.setBlock(0, mat(2, 1, {1, 0}));
    auto cf = cofib(inc);
    auto h = homology(cf.cone);
    CHECK(h.size() == 1);
    CHECK(h[0] == 1);
}

TEST_CASE("kernelImage") {
    ChainComplex q2 = directSum({ChainComplex::line(0), ChainComplex::line(0)}).total;
    ChainMap f(q2, q2);
    f.setBlock(0, mat(2, 2, {1, 1, 2, 2}));
    auto [ker, im] = kernelImage(f);
    CHECK(ker.sub.dim(0) == 1);
    CHECK(im.sub.dim(0) == 1);
    CHECK(ker.inclusion.valid());
    CHECK(im.inclusion.valid());

    std::mt19937_64 rng(11);
    ChainComplex v = randomComplex(rng);
    ChainMap z = ChainMap::zeroMap(v, v);
    auto [k2, i2] = kernelImage(z);
    CHECK(k2.sub == v);
    CHECK(i2.sub.isZero());
    auto [k3, i3] = kernelImage(ChainMap::identity(v));
    CHECK(k3.sub.isZero());
    CHECK(i3.sub == v);
}

TEST_CASE("homology") {
    ChainComplex x = directSum({ChainComplex::line(0), ChainComplex::line(1)}).total;
    auto h = homology(x);
    CHECK(h[0] == 1);
    CHECK(h[1] == 1);

    // Q ->(2) Q in degrees 1 -> 0 is acyclic
    std::map<int, int> dims{{0, 1}, {1, 1}};
    std::map<int, Matrix> diffs{{1, mat(1, 1, {2})}};
    ChainComplex y = ChainComplex::fromDims(dims, diffs);
    CHECK(homology(y).empty());
}

TEST_CASE("symmetrizer: swap action on Q^2") {
    ChainComplex q2 = directSum({ChainComplex::line(0), ChainComplex::line(0)}).total;
    ChainMap swap(q2, q2);
    swap.setBlock(0, mat(2, 2, {0, 1, 1, 0}));
    GroupAction act(q2, {0}, {swap}, 2);
    CHECK(act.checkRelations());
    auto img = symmetrizerImage(act);
    CHECK(img.image.dim(0) == 1);
    CHECK(img.projection.compose(img.inclusion).isIdentity());

    // swap composed with sign: image is the antidiagonal, still dim 1
    ChainMap signSwap(q2, q2);
    signSwap.setBlock(0, mat(2, 2, {0, -1, -1, 0}));
    GroupAction act2(q2, {0}, {signSwap}, 2);
    auto img2 = symmetrizerImage(act2);
    CHECK(img2.image.dim(0) == 1);

    // trivial group: identity projector
    GroupAction triv = GroupAction::trivial(q2, 1);
    auto img3 = symmetrizerImage(triv);
    CHECK(img3.image == q2);
    CHECK(img3.inclusion.isIdentity());
}

TEST_CASE("symmetrizer idempotence and relation failure") {
    ChainComplex q2 = directSum({ChainComplex::line(0), ChainComplex::line(0)}).total;
    ChainMap notInv(q2, q2);
    notInv.setBlock(0, mat(2, 2, {1, 1, 0, 1}));
    GroupAction bad(q2, {0}, {notInv}, 2);
    CHECK_THROWS_AS(symmetrizerImage(bad), GroupRelationViolation);
}

TEST_CASE("permuteFactors composition and flatten") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 10; ++it) {
        ChainComplex a = randomComplex(rng, 1), b = randomComplex(rng, 1),
                     c = randomComplex(rng, 1);
        if (a.isZero() || b.isZero() || c.isZero()) continue;
        std::vector<ChainComplex> f{a, b, c};
        ChainMap p1 = permuteFactors(f, {1, 2, 0});
        CHECK(p1.valid());
        ChainMap flat = flattenTensor({{a, b}, {c}});
        CHECK(flat.valid());
        ChainMap unflat = isoInverse(flat);
        CHECK(unflat.compose(flat).isIdentity());
    }
}

TEST_CASE("coneFactorIso and shiftFactorIso are chain isos") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 10; ++it) {
        ChainComplex a = randomComplex(rng, 1);
        ChainComplex x = randomComplex(rng, 1), y = randomComplex(rng, 1);
        if (a.isZero()) continue;
        ChainMap sf = shiftFactorIso({a, x}, 1, 1);
        CHECK(sf.valid());
        if (!x.isZero()) {
            ChainMap g = ChainMap::zeroMap(x, y);
            ChainMap ci = coneFactorIso({a, x}, 1, g);
            CHECK(ci.valid());
        }
    }
}

TEST_CASE("isoInverse round trip") {
    ChainComplex q2 = directSum({ChainComplex::line(0), ChainComplex::line(0)}).total;
    ChainMap f(q2, q2);
    f.setBlock(0, mat(2, 2, {1, 1, 0, 1}));
    ChainMap g = isoInverse(f);
    CHECK(g.compose(f).isIdentity());
}
