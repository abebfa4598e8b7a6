#include <cmath>
#include <complex>
#include <numbers>

#include <gtest/gtest.h>

#include <tspec/asymptotics.hpp>
#include <tspec/gamma.hpp>

using namespace tspec;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<Eigenvalue> as_zeros(const std::vector<cplx>& ks)
{
    std::vector<Eigenvalue> out;
    for (cplx k : ks) {
        Eigenvalue e;
        e.k = k;
        e.cls = classify(k);
        out.push_back(e);
    }
    return out;
}

// G(k) = omega/2 + q1 sin(2k)/(4k) = g1(k)/(8ik): its zeros are those of g1 and G(0) = (omega + q1)/2.
struct Synthetic {
    double omega = 2.0, q1 = 2.0;
    double gamma() const { return 0.5 * (omega + q1); }
    cplx operator()(cplx k) const
    {
        if (std::abs(k) < 1e-8) return gamma();
        return 0.5 * omega + q1 * std::sin(2.0 * k) / (4.0 * k);
    }
    HadamardProduct product(int n) const
    {
        const LeadingZeros lz = leading_zeros(omega, q1, n - 1);
        return HadamardProduct::from_zeros(as_zeros(lz.mu));
    }
    PotentialScalars scalars() const
    {
        PotentialScalars s;
        s.omega = omega;
        s.q_at_1 = q1;
        s.m_order = EndpointOrder{0, q1};
        return s;
    }
};

std::vector<Eigenvalue> unit_spectrum(Variant v, int orbits)
{
    const Potential p = Potential::constant(1.0, 0.0);
    const double s1 = (orbits + 0.3) * pi;
    return find_zeros(make_evaluator(p, v, {{1e-12}}), make_evaluator(p, v, {{1e-6}}), Rect{-1e-3, s1, -1e-3, 4.0})
        .zeros;
}

} // namespace

TEST(Product, HandValues)
{
    EXPECT_EQ(eval_E(HadamardProduct(0, {}), cplx{3.0, 1.0}), cplx{1.0});
    EXPECT_NEAR(eval_E(HadamardProduct(0, {1.0, 4.0}), 3.0).real(), 10.0, 1e-13);
    const cplx e = eval_E(HadamardProduct(0, {cplx{2.0, 1.0}, cplx{2.0, -1.0}}), 1.0);
    EXPECT_NEAR(e.real(), 0.4, 1e-15);
    EXPECT_EQ(e.imag(), 0.0);
}

TEST(Product, RealOnRealAxisAndEven)
{
    const HadamardProduct hp = Synthetic{}.product(30);
    for (int i = 1; i <= 10; ++i) {
        const double k = 0.73 * i;
        const cplx e = hp(k);
        EXPECT_LT(std::abs(e.imag()), 1e-10 * std::abs(e));
        EXPECT_LT(std::abs(hp(cplx{k, 0.4}) - hp(cplx{-k, -0.4})), 1e-12 * std::abs(hp(cplx{k, 0.4})));
    }
}

TEST(Product, RejectsUnpairedList)
{
    EXPECT_THROW(HadamardProduct(0, {cplx{2.0, 1.0}}), ValidationError);
    EXPECT_THROW(HadamardProduct(0, {cplx{0.0}}), PreconditionError);
}

TEST(Product, LogSpaceFarDownImaginaryAxis)
{
    const HadamardProduct hp = Synthetic{}.product(60);
    const cplx l = hp.log_eval(cplx{0.0, -300.0});
    EXPECT_TRUE(std::isfinite(l.real()) && std::isfinite(l.imag()));
    EXPECT_GT(l.real(), 300.0);
}

TEST(Direct, ExactMultiple)
{
    const HadamardProduct hp(0, {1.0, 4.0, cplx{9.0, 2.0}, cplx{9.0, -2.0}});
    const Evaluator d = [&](cplx k) { return 3.0 * hp(k); };
    for (double p : {0.37, 0.71, 5.0}) EXPECT_NEAR(gamma_direct(d, hp, p).gamma, 3.0, 1e-13);
    EXPECT_THROW(gamma_direct(d, hp, 1.05), PreconditionError);
}

TEST(Direct, TruncationMonotone)
{
    // lambda_n = n^2 pi^2 + 1: the infinite product is sin(r)/r / sinh(1), r = sqrt(k^2 - 1)
    const Evaluator d = [](cplx k) {
        const cplx r = std::sqrt(k * k - 1.0);
        return 2.0 * std::sin(r) / r / std::sinh(1.0);
    };
    double prev = INFINITY;
    for (int n : {10, 20, 30}) {
        std::vector<cplx> ls;
        for (int j = 1; j <= n; ++j) ls.push_back(j * j * pi * pi + 1.0);
        const double err = std::abs(gamma_direct(d, HadamardProduct(0, ls), 0.37).gamma - 2.0);
        EXPECT_LT(err, prev) << "N=" << n;
        prev = err;
    }
}

TEST(OmegaRoute, SyntheticGroundTruth)
{
    const Synthetic g;
    const GammaEstimate e = gamma_from_omega(g.product(30), g.scalars(), Variant::robin);
    EXPECT_NEAR(e.gamma, 2.0, 0.02);
    EXPECT_TRUE(e.stable);
    EXPECT_EQ(e.truncation, 30);
}

TEST(OmegaRoute, ZeroOmegaRejected)
{
    Synthetic g;
    PotentialScalars s = g.scalars();
    s.omega = 0.0;
    EXPECT_THROW(gamma_from_omega(g.product(10), s, Variant::robin), PreconditionError);
}

TEST(EndpointRoute, SyntheticGroundTruth)
{
    const Synthetic g;
    const GammaEstimate e = gamma_from_endpoint(g.product(30), g.scalars(), Variant::robin);
    EXPECT_NEAR(e.gamma, 2.0, 0.02);
}

TEST(EndpointRoute, DeepLadderStaysFinite)
{
    const Synthetic g;
    LimitOptions opt;
    opt.throw_on_unstable = false;
    const GammaEstimate e = gamma_from_endpoint(g.product(280), g.scalars(), Variant::robin, opt);
    ASSERT_FALSE(e.probes.empty());
    EXPECT_LT(*std::min_element(e.probes.begin(), e.probes.end()), -250.0);
    for (double v : e.samples) EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(e.gamma, 2.0, 0.02);
}

TEST(EndpointRoute, WrongOrderFlaggedUnstable)
{
    const HadamardProduct hp = HadamardProduct::from_zeros(
        find_zeros(make_evaluator(Potential::polynomial({-1.0, 1.0}), Variant::robin), Rect{-1e-3, 31.2 * pi, -1e-3, 6.5})
            .zeros,
        30);
    PotentialScalars s = derive_scalars(Potential::polynomial({-1.0, 1.0}));
    s.m_order = EndpointOrder{0, 1.0};
    LimitOptions opt;
    opt.throw_on_unstable = false;
    EXPECT_FALSE(gamma_from_endpoint(hp, s, Variant::robin, opt).stable);
    opt.throw_on_unstable = true;
    EXPECT_THROW(gamma_from_endpoint(hp, s, Variant::robin, opt), UnstableLimit);
}

TEST(Routes, UnitPotentialRobin)
{
    const Potential p = Potential::constant(1.0, 0.0);
    const HadamardProduct hp = HadamardProduct::from_zeros(unit_spectrum(Variant::robin, 31), 30);
    ASSERT_EQ(hp.truncation(), 30);
    const GammaEstimate om = gamma_from_omega(hp, derive_scalars(p), Variant::robin);
    // E(0) = 1, so gamma = D(0) = sinh(1)
    EXPECT_NEAR(om.gamma, std::sinh(1.0), 1e-3);
    const Evaluator d = make_evaluator(p, Variant::robin);
    for (double probe : {0.37, 0.71}) {
        const GammaEstimate g = gamma_direct(d, hp, probe);
        EXPECT_NEAR(g.gamma, om.gamma, 0.05 * om.gamma);
        EXPECT_LT(std::abs(*g.imag_part), 1e-8);
    }
}

TEST(Routes, UnitPotentialDirichlet)
{
    const Potential p = Potential::constant(1.0, 0.0);
    const HadamardProduct hp = HadamardProduct::from_zeros(unit_spectrum(Variant::dirichlet, 31), 30);
    const GammaEstimate om = gamma_from_omega(hp, derive_scalars(p), Variant::dirichlet);
    EXPECT_NEAR(om.gamma, std::exp(-1.0), 1e-3);
    const GammaEstimate g = gamma_direct(make_evaluator(p, Variant::dirichlet), hp, 0.37);
    EXPECT_NEAR(g.gamma, om.gamma, 0.05 * om.gamma);
}
