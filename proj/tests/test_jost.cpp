#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <tspec/jost.hpp>
#include <tspec/ode.hpp>

#include "oracles.hpp"

using namespace tspec;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

} // namespace

TEST(Dopri5, ExponentialGrowthAndDecay)
{
    const cplx lam{-0.5, 3.0};
    const auto y = ode::dopri5<1>([&](double, const std::array<cplx, 1>& v) { return std::array<cplx, 1>{lam * v[0]}; },
                                  0.0, 2.0, {cplx{1.0}});
    EXPECT_LT(std::abs(y[0] - std::exp(2.0 * lam)), 1e-11);
}

TEST(Jost, FreeSolution)
{
    const JostValue v = jost_at_zero(Potential::constant(0.0), 2.0);
    EXPECT_LT(std::abs(v.f - 1.0), 1e-11);
    EXPECT_LT(std::abs(v.fprime - cplx{0.0, 2.0}), 1e-11);
}

TEST(Jost, UnitPotentialRealK)
{
    const JostValue v = jost_at_zero(Potential::constant(1.0), 3.0);
    const auto o = oracle::jost_constant(1.0, 3.0);
    EXPECT_LT(rel(v.f, o.f), 1e-10);
    EXPECT_LT(rel(v.fprime, o.fp), 1e-10);
    // mpmath reference values
    EXPECT_LT(std::abs(v.f - cplx{0.98795465138353257, 0.18923300878802284}), 1e-10);
    EXPECT_LT(std::abs(v.fprime - cplx{-0.45986923266506753, 2.9484931898183926}), 1e-10);
}

TEST(Jost, UnitPotentialComplexK)
{
    const cplx k{0.5, 2.0};
    const JostValue v = jost_at_zero(Potential::constant(1.0), k);
    const auto o = oracle::jost_constant(1.0, k);
    EXPECT_LT(rel(v.f, o.f), 1e-9);
    EXPECT_LT(rel(v.fprime, o.fp), 1e-9);
}

TEST(Jost, WronskianOfReflectedPair)
{
    const Potential p = Potential::polynomial({0.4, -1.0, 2.0});
    for (double k : {0.7, 2.5, 9.0}) {
        const JostValue a = jost_at_zero(p, k), b = jost_at_zero(p, -k);
        const cplx w = a.f * b.fprime - a.fprime * b.f;
        EXPECT_LT(std::abs(w - cplx{0.0, -2.0 * k}), 1e-9 * k) << "k=" << k;
    }
}

TEST(Kernel, ZeroPotential)
{
    const KernelGrid kg = kernel_iterate(Potential::constant(0.0), 32);
    for (std::size_t i = 0; i <= 32; ++i)
        for (std::size_t j = i; j <= 64 - i; ++j) EXPECT_EQ(kg.at(i, j), 0.0);
    EXPECT_EQ(jost_via_kernel(kg, cplx{3.0, 1.0}), cplx{1.0});
}

TEST(Kernel, UnitDiagonalAndSupport)
{
    const KernelGrid kg = kernel_iterate(Potential::constant(1.0), 128);
    for (std::size_t i = 0; i <= 128; ++i) {
        const double x = i / 128.0;
        EXPECT_NEAR(kg.at(i, i), 0.5 * (1.0 - x), 1e-12);
    }
    EXPECT_EQ(kg(0.5, 1.6), 0.0);
    EXPECT_EQ(kg(0.6, 0.5), 0.0);
}

TEST(Kernel, AgreesWithOdeRoute)
{
    const Potential p = Potential::constant(1.0);
    const KernelGrid kg = kernel_iterate(p, 128);
    EXPECT_LT(std::abs(jost_via_kernel(kg, 5.0) - jost_at_zero(p, 5.0).f), 1e-6);
    // k = 0 carries the full O(h^2) kernel error: 3e-6 at 128 cells, 7.5e-7 at 256
    const double e128 = std::abs(jost_via_kernel(kg, 0.0) - jost_at_zero(p, 0.0).f);
    const double e256 = std::abs(jost_via_kernel(kernel_iterate(p, 256), 0.0) - jost_at_zero(p, 0.0).f);
    EXPECT_LT(e128, 5e-6);
    EXPECT_LT(e256, 1e-6);
    EXPECT_NEAR(e128 / e256, 4.0, 0.2);
}

TEST(Kernel, RejectsCoarseMesh) { EXPECT_THROW(kernel_iterate(Potential::constant(1.0), 8), PreconditionError); }

TEST(SuccessiveApprox, ZeroPotential)
{
    const auto st = successive_approx(Potential::constant(0.0), -5.0, 10);
    for (double v : st.sum) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(SuccessiveApprox, MatchesOdeOnImaginaryAxis)
{
    const Potential p = Potential::constant(1.0);
    const auto st = successive_approx(p, -10.0, 60);
    const cplx f = jost_at_zero(p, cplx{0.0, -10.0}).f;
    EXPECT_LT(std::abs(st.f_at_0() - f) / std::abs(f), 1e-8);
    EXPECT_LT(std::abs(f - 1265459.6600339894) / 1265459.6600339894, 1e-9);  // mpmath
}

TEST(SuccessiveApprox, TermsRespectMajorant)
{
    const Potential p = Potential::polynomial({0.3, -2.0, 1.0});
    const auto st = successive_approx(p, -6.0, 30);
    for (std::size_t n = 1; n < st.terms.size(); ++n)
        for (std::size_t i = 0; i < st.x.size(); ++i) {
            const double bound = successive_majorant(st.tau, st.x[i], st.abs_q_tail[i], n);
            EXPECT_LE(std::abs(st.terms[n][i]), bound * (1.0 + 1e-9) + 1e-300) << "n=" << n << " i=" << i;
        }
}

TEST(SuccessiveApprox, EndpointLeadingTerm)
{
    // q = x - 1: m = 1, q'(1) = 1
    const double tau = -20.0;
    const auto st = successive_approx(Potential::polynomial({-1.0, 1.0}), tau, 80);
    const double lead = st.f_at_0() * std::pow(2.0 * tau, 3) / std::exp(-2.0 * tau);
    EXPECT_NEAR(lead, 1.0, 0.2);
}
