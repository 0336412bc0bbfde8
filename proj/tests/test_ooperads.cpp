#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cooperad/ooperads.hpp"

using namespace cooperad;

namespace {
ColorSet oneColor() { return ColorSet({"a"}); }
}

TEST_CASE("builtin dims") {
    Operad comm = builtinOperad("comm", oneColor(), 3);
    CHECK(comm.carrier().component({0, 0}, 0).space.dim(0) == 1);
    Operad assoc = builtinOperad("assoc", oneColor(), 3);
    CHECK(assoc.carrier().component({0, 0}, 0).space.dim(0) == 2);
    CHECK(assoc.carrier().component({0, 0, 0}, 0).space.dim(0) == 6);
    Cooperad cocomm = builtinCooperad("cocomm", oneColor(), 3);
    CHECK(cocomm.carrier().component({0, 0}, 0).space.dim(0) == 1);
    CHECK(cocomm.carrier().component({0, 0, 0}, 0).space.dim(0) == 1);
}

TEST_CASE("checkOperad on builtins") {
    CHECK(checkOperad(builtinOperad("triv", oneColor(), 3)).ok());
    CHECK(checkOperad(builtinOperad("comm", oneColor(), 3)).ok());
    CHECK(checkOperad(builtinOperad("assoc", oneColor(), 3)).ok());
}

TEST_CASE("checkCooperad on builtins and duals") {
    CHECK(checkCooperad(builtinCooperad("triv", oneColor(), 3)).ok());
    CHECK(checkCooperad(builtinCooperad("cocomm", oneColor(), 4)).ok());
    CHECK(checkCooperad(builtinCooperad("coassoc", oneColor(), 3)).ok());
}

TEST_CASE("dualize(comm) equals cocomm and triv self-dual") {
    Cooperad viaDual = dualize(builtinOperad("comm", oneColor(), 3));
    Cooperad direct = builtinCooperad("cocomm", oneColor(), 3);
    CHECK(viaDual == direct);
    Cooperad trivDual = dualize(builtinOperad("triv", oneColor(), 3));
    CHECK(trivDual == builtinCooperad("triv", oneColor(), 3));
}

TEST_CASE("corrupting cocomm delta is reported at that component") {
    Cooperad cocomm = builtinCooperad("cocomm", oneColor(), 3);
    auto deltas = cocomm.deltaMap();
    ComponentKey bad{{0, 0}, 0};
    ChainMap d = deltas.at(bad);
    Matrix b = d.block(0);
    b.at(0, 0) += 1;
    d.setBlock(0, b);
    deltas[bad] = d;
    Cooperad corrupted(cocomm.carrier(), deltas);
    AxiomReport rep = checkCooperad(corrupted);
    CHECK(!rep.ok());
    bool mentions = false;
    for (auto& is : rep.issues) mentions |= (is.where == bad);
    CHECK(mentions);
}

TEST_CASE("mdCooperad passes checkCooperad") {
    Cooperad cocomm = builtinCooperad("cocomm", oneColor(), 3);
    Cooperad md = mdCooperad(cocomm);
    CHECK(md.carrier().colors().size() == 2);
    CHECK(checkCooperad(md).ok());
}

TEST_CASE("liftCooperad with weight grades passes checkCooperad") {
    Cooperad cocomm = builtinCooperad("cocomm", oneColor(), 3);
    ColorLift lift;
    std::vector<std::string> names;
    for (int g = 1; g <= 3; ++g) {
        names.push_back("a:w" + std::to_string(g));
        lift.baseOf.push_back(0);
        lift.gradeOf.push_back(g);
        lift.markOf.push_back(0);
    }
    lift.lifted = ColorSet(names);
    lift.maxGrade = 3;
    Cooperad lifted = liftCooperad(cocomm, lift);
    CHECK(checkCooperad(lifted).ok());
    // component at two grade-1 inputs -> grade-2 output is the base Q(2)
    CHECK(lifted.carrier().component({0, 0}, 1).space.dim(0) == 1);
    // mismatched output grade is zero
    CHECK(lifted.carrier().component({0, 0}, 2).space.isZero());
}

TEST_CASE("externalSumCooperad product structure") {
    Cooperad q1 = builtinCooperad("cocomm", oneColor(), 3);
    Cooperad q2 = builtinCooperad("coassoc", oneColor(), 3);
    Cooperad sum = externalSumCooperad(q1, q2);
    CHECK(sum.carrier().colors().size() == 2);
    CHECK(checkCooperad(sum).ok());
    // mixed components vanish
    CHECK(sum.carrier().component({0, 1}, 0).space.isZero());
}
