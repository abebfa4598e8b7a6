#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <tspec/asymptotics.hpp>
#include <tspec/roots.hpp>

#include "oracles.hpp"

using namespace tspec;

TEST(Winding, SimpleAndDoubleZero)
{
    const Evaluator f = [](cplx k) { return k * k - 1.0; };
    const Evaluator g = [](cplx k) { return (k * k - 1.0) * (k * k - 1.0); };
    const Rect box{0.5, 1.5, -0.5, 0.5};
    EXPECT_EQ(winding_count(f, box).winding, 1);
    EXPECT_EQ(winding_count(g, box).winding, 2);
}

TEST(Winding, ChildrenSumToParent)
{
    const Evaluator f = make_evaluator(Potential::constant(1.0, 0.0), Variant::robin);
    const Rect parent{0.5, 12.0, 0.2, 3.0};
    const int total = winding_count(f, parent).winding;
    int sum = 0;
    const double sm = 6.1, tm = 1.7;
    for (const Rect& r : {Rect{parent.s0, sm, parent.t0, tm}, Rect{sm, parent.s1, parent.t0, tm},
                          Rect{parent.s0, sm, tm, parent.t1}, Rect{sm, parent.s1, tm, parent.t1}})
        sum += winding_count(f, r).winding;
    EXPECT_EQ(total, 4);
    EXPECT_EQ(sum, total);
}

TEST(Winding, GammaContourUnitPotential)
{
    // zeros of k D(k) inside Gamma_3 for q = 1, h = 0
    const Evaluator d = make_evaluator(Potential::constant(1.0, 0.0), Variant::robin);
    const Evaluator f = [&](cplx k) { return k * d(k); };
    EXPECT_EQ(winding_count(f, gamma_contour(3)).winding, 17);
}

TEST(Winding, DegenerateBoxRejected)
{
    const Evaluator f = [](cplx k) { return k; };
    EXPECT_THROW(winding_count(f, Rect{1.0, 1.0, 0.0, 1.0}), PreconditionError);
}

TEST(Newton, ConvergesFromNearbySeeds)
{
    const Evaluator f = make_evaluator(Potential::constant(1.0, 0.0), Variant::robin);
    const cplx root{5.3990185273575079, 1.5384932129962314};  // mpmath
    for (cplx off : {cplx{0.1, 0.0}, cplx{0.0, -0.1}, cplx{-0.07, 0.07}}) {
        const NewtonResult r = newton_refine(f, root + off);
        EXPECT_TRUE(r.converged);
        EXPECT_LE(r.iterations, 25);
        EXPECT_LT(std::abs(r.k - root), 1e-10);
    }
}

TEST(FindZeros, SquareRootsOfOnePlusI)
{
    const Evaluator f = [](cplx k) { return k * k - cplx{1.0, 1.0}; };
    const ZeroSearch zs = find_zeros(f, Rect{-2.0, 2.0, -1.0, 1.0});
    ASSERT_EQ(zs.zeros.size(), 2u);
    const cplx r = std::sqrt(cplx{1.0, 1.0});
    for (const Eigenvalue& z : zs.zeros) {
        EXPECT_EQ(z.multiplicity, 1);
        EXPECT_LT(std::min(std::abs(z.k - r), std::abs(z.k + r)), 1e-12);
    }
    EXPECT_NEAR(r.real(), 1.0987, 1e-4);
    EXPECT_NEAR(r.imag(), 0.4551, 1e-4);
}

TEST(FindZeros, DoubleZeroReportedAsCluster)
{
    const Evaluator f = [](cplx k) { return (k - 1.0) * (k - 1.0) * (k + 2.0); };
    const ZeroSearch zs = find_zeros(f, Rect{0.3, 1.7, -0.4, 0.6});
    EXPECT_EQ(zs.total_winding, 2);
    int mult = 0;
    for (const Eigenvalue& z : zs.zeros) {
        mult += z.multiplicity;
        EXPECT_LT(std::abs(z.k - 1.0), 1e-4);
    }
    EXPECT_EQ(mult, 2);
}

TEST(FindZeros, DirichletRealZerosMatchBisection)
{
    const Evaluator f = make_evaluator(Potential::constant(1.0), Variant::dirichlet);
    const ZeroSearch zs = find_zeros(f, Rect{0.1, 20.0, -0.1, 0.1});
    const auto want = oracle::dirichlet_unit_real_zeros(0.1, 20.0);
    ASSERT_EQ(zs.zeros.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        EXPECT_LT(std::abs(zs.zeros[i].k - want[i]), 1e-10) << want[i];
        EXPECT_EQ(zs.zeros[i].cls, ZeroClass::real);
    }
}

TEST(FindZeros, ResidualsAndSymmetry)
{
    const Potential p = Potential::polynomial({1.0, -1.6}, 0.0);
    const Evaluator f = make_evaluator(p, Variant::robin);
    const Rect region{-12.0, 12.0, -3.0, 3.0};
    const ZeroSearch zs = find_zeros(f, region);
    ASSERT_FALSE(zs.zeros.empty());
    EXPECT_EQ(zs.zeros.size() % 2, 0u);
    for (const Eigenvalue& z : zs.zeros) EXPECT_LT(z.residual, 1e-9 * z.scale);
    EXPECT_LT(symmetry_closure_gap(zs.zeros, zs.region), 1e-9);
    const auto canon = canonical_zeros(zs.zeros);
    for (const Eigenvalue& z : canon) {
        EXPECT_GE(z.k.real(), 0.0);
        EXPECT_GE(z.k.imag(), 0.0);
    }
}

TEST(FindZeros, UnitPotentialMatchesReference)
{
    const Evaluator f = make_evaluator(Potential::constant(1.0, 0.0), Variant::robin);
    const ZeroSearch zs = find_zeros(f, Rect{-1e-3, 6.5, -1e-3, 3.0});
    ASSERT_EQ(zs.zeros.size(), 2u);
    EXPECT_LT(std::abs(zs.zeros[0].k - cplx{2.1958066856499465, 1.0731572166416458}), 1e-11);
    EXPECT_LT(std::abs(zs.zeros[1].k - cplx{5.3990185273575079, 1.5384932129962314}), 1e-11);
}
