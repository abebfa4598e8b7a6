// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include <tspec/asymptotics.hpp>
#include <tspec/gamma.hpp>
#include <tspec/jost.hpp>

#include "oracles.hpp"

using namespace tspec;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void report(int id, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ZeroSearch search(const Potential& p, Variant v, const Rect& r)
{
    return find_zeros(make_evaluator(p, v, {{1e-12}}), make_evaluator(p, v, {{1e-6}}), r);
}

void constant_oracle()
{
    const auto t0 = Clock::now();
    const Potential p = Potential::constant(1.0);
    std::mt19937_64 rng(20261016);
    std::uniform_real_distribution<double> rad(0.0, 1.0), ang(-pi, pi);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const cplx k = std::polar(30.0 * std::sqrt(rad(rng)), ang(rng));
        const JostValue v = jost_at_zero(p, k);
        const auto o = oracle::jost_constant(1.0, k);
        worst = std::max({worst, std::abs(v.f - o.f) / std::abs(o.f), std::abs(v.fprime - o.fp) / std::abs(o.fp)});
    }
    const double t = seconds_since(t0);
    report(1, worst < 1e-9 && t < 10.0, fmt("max rel err %.2e over 50 k, %.2f s", worst, t));
}

void dirichlet_closed_form()
{
    const Potential p = Potential::constant(1.0);
    // the closed form stays positive on the real axis, so the strip must come back empty
    const ZeroSearch zs = search(p, Variant::dirichlet, Rect{0.1, 30.0, -0.2, 0.2});
    const auto want = oracle::dirichlet_unit_real_zeros(0.1, 30.0);
    bool ok = zs.complete() && zs.zeros.size() == want.size();
    double worst = 0.0;
    for (std::size_t i = 0; ok && i < want.size(); ++i) worst = std::max(worst, std::abs(zs.zeros[i].k - want[i]));

    // off the axis: every zero is a fixed point of Newton on the closed form, and the mpmath zero is among them
    const ZeroSearch cz = search(p, Variant::dirichlet, Rect{0.1, 33.0, 0.2, 4.0});
    double cworst = 0.0;
    bool has_ref = false;
    for (const Eigenvalue& e : cz.zeros) {
        cworst = std::max(cworst, std::abs(oracle::polish_dirichlet_unit(e.k) - e.k));
        has_ref = has_ref || std::abs(e.k - cplx{32.171342796908494, 2.4293545657150305}) < 1e-9;
    }
    ok = ok && worst < 1e-9 && cz.complete() && !cz.zeros.empty() && cworst < 1e-9 && has_ref;
    report(2, ok,
           fmt("real strip: %zu zeros found, %zu by bisection, max distance %.2e; upper half: %zu zeros, "
               "max Newton shift on closed form %.2e",
               zs.zeros.size(), want.size(), worst, cz.zeros.size(), cworst));
}

void gamma_counts()
{
    bool ok = true;
    std::string detail;
    for (auto [name, pot, sign] : {std::tuple{"q=1", Potential::constant(1.0, 0.0), 5},
                                   std::tuple{"q=1-1.6x", Potential::polynomial({1.0, -1.6}, 0.0), 3}}) {
        const Evaluator d = make_evaluator(pot, Variant::robin, {{1e-8}});
        const Evaluator f = [&](cplx k) { return k * d(k); };
        detail += std::string(name) + ":";
        for (int n = 2; n <= 4; ++n) {
            const int got = winding_count(f, gamma_contour(n)).winding;
            ok = ok && got == 4 * n + sign;
            detail += fmt(" %d/%d", got, 4 * n + sign);
        }
        detail += "  ";
    }
    report(3, ok, detail + "(zeros of k D)");
}

void residual_decay()
{
    const auto t0 = Clock::now();
    const Potential pot = Potential::constant(1.0, 0.0);
    const ZeroSearch zs = search(pot, Variant::robin, Rect{-1e-3, 26.5 * pi, -1e-3, 4.0});
    const auto pred = predict_eigenvalues(derive_scalars(pot), 0.0, TheoremTag::T41i_W22, 0, 28);
    const ResidualReport rep = residual_report(index_eigenvalues(zs.zeros, pred).indexed, pred, 5, 25);
    double early = 0.0, late = 0.0;
    for (const ResidualRow& r : rep.rows)
        (r.n <= 15 ? early : late) = std::max(r.n <= 15 ? early : late, std::abs(r.next_order));
    const double t = seconds_since(t0);
    const bool ok = rep.rows.size() == 21 && rep.loglog_slope <= -0.5 && rep.tail_decreasing && late <= early &&
                    late < 0.05 && t < 300.0;
    report(4, ok,
           fmt("%zu rows, slope %.3f, window sums %s, max n|eps - refined| %.3g (n<=15) %.3g (n>15), %.1f s",
               rep.rows.size(), rep.loglog_slope, rep.tail_decreasing ? "decreasing" : "NOT decreasing", early, late,
               t));
}

void transcendental()
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), mag(20.0, 1000.0), ang(-pi, pi);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const cplx kappa{2.0 * u(rng), 2.0 * u(rng)};
        const double r = std::max(mag(rng), 20.0 * std::abs(kappa) + 10.0);
        worst = std::max(worst, solve_transcendental(kappa, std::polar(r, ang(rng))).residual);
    }
    double c = 0.0;
    for (double w = 20.0; w <= 1e4 * (1 + 1e-12); w *= std::pow(500.0, 1.0 / 40.0)) {
        const auto t = solve_transcendental(1.0, w);
        c = std::max(c, std::abs(t.z - t.seed) * w * w / std::pow(std::log(w), 2));
    }
    report(5, worst < 1e-12 && c <= 10.0, fmt("max residual %.2e on 100 instances, fitted C = %.3f", worst, c));
}

void symmetry()
{
    double worst = 0.0;
    std::size_t count = 0;
    const Rect r{-30.0, 30.0, -4.0, 4.0};
    for (auto [pot, v] : {std::pair{Potential::constant(1.0, 0.0), Variant::robin},
                          std::pair{Potential::polynomial({1.0, -1.6}, 0.0), Variant::robin},
                          std::pair{Potential::polynomial({-0.5, 1.0}, 0.3), Variant::robin},
                          std::pair{Potential::polynomial({0.2, 1.0, -3.0}, 0.0), Variant::dirichlet}}) {
        const ZeroSearch zs = search(pot, v, r);
        count += zs.zeros.size();
        worst = std::max(worst, symmetry_closure_gap(zs.zeros, zs.region));
    }
    report(6, worst <= 1e-9, fmt("4 spectra, %zu zeros, max mirror gap %.2e", count, worst));
}

void gamma_triangle()
{
    bool ok = true;
    std::string detail;
    auto spread = [](std::initializer_list<double> v) {
        double w = 0.0;
        for (double a : v)
            for (double b : v) w = std::max(w, std::abs(a - b) / std::abs(b));
        return w;
    };
    {
        const Potential p = Potential::constant(1.0, 0.0);
        const auto hp = HadamardProduct::from_zeros(search(p, Variant::robin, Rect{-1e-3, 31.3 * pi, -1e-3, 4.0}).zeros, 30);
        const Evaluator d = make_evaluator(p, Variant::robin);
        const double a = gamma_from_omega(hp, derive_scalars(p), Variant::robin).gamma;
        const double b = gamma_direct(d, hp, 0.37).gamma, c = gamma_direct(d, hp, 0.71).gamma;
        const double s = spread({a, b, c});
        ok = ok && hp.truncation() == 30 && s <= 0.10;
        detail += fmt("q=1: omega %.5f direct %.5f %.5f (spread %.1e); ", a, b, c, s);
    }
    {
        const Potential p = Potential::polynomial({-1.0, 1.0}, 0.0);
        const auto hp = HadamardProduct::from_zeros(search(p, Variant::robin, Rect{-1e-3, 31.2 * pi, -1e-3, 6.5}).zeros, 30);
        const Evaluator d = make_evaluator(p, Variant::robin);
        const double a = gamma_from_endpoint(hp, derive_scalars(p), Variant::robin).gamma;
        const double b = gamma_direct(d, hp, 0.37).gamma, c = gamma_direct(d, hp, 0.71).gamma;
        const double s = spread({a, b, c});
        ok = ok && hp.truncation() == 30 && s <= 0.10;
        detail += fmt("q=x-1: endpoint %.5f direct %.5f %.5f (spread %.1e); ", a, b, c, s);
    }
    {
        // G(k) = 1 + sin(2k)/(2k): zeros are those of g1 with omega = q(1) = 2, G(0) = 2
        const LeadingZeros lz = leading_zeros(2.0, 2.0, 29);
        std::vector<Eigenvalue> zs;
        for (cplx k : lz.mu) {
            Eigenvalue e;
            e.k = k;
            e.cls = classify(k);
            zs.push_back(e);
        }
        const auto hp = HadamardProduct::from_zeros(zs);
        PotentialScalars s;
        s.omega = 2.0;
        s.q_at_1 = 2.0;
        s.m_order = EndpointOrder{0, 2.0};
        const double a = gamma_from_omega(hp, s, Variant::robin).gamma;
        const double b = gamma_from_endpoint(hp, s, Variant::robin).gamma;
        const double err = std::max(std::abs(a - 2.0), std::abs(b - 2.0)) / 2.0;
        ok = ok && err <= 0.01;
        detail += fmt("synthetic: omega %.6f endpoint %.6f (rel err %.1e)", a, b, err);
    }
    report(7, ok, detail);
}

void omega_zero()
{
    const Potential pot = Potential::polynomial({-0.5, 1.0}, 0.0);
    const ZeroSearch zs = search(pot, Variant::robin, Rect{-1e-3, 13.6 * pi, -1e-3, 4.0});
    const auto pred = predict_eigenvalues(derive_scalars(pot), 0.0, TheoremTag::T41ii_W21, 0, 30);
    const ResidualReport rep = residual_report(index_eigenvalues(zs.zeros, pred).indexed, pred, 5, 25);
    double first = 0.0, last = 0.0;
    for (const ResidualRow& r : rep.rows) {
        if (r.n == 5) first = std::abs(r.eps);
        if (r.n == 25) last = std::abs(r.eps);
    }
    const bool ok = rep.rows.size() == 21 && rep.loglog_slope <= -0.5 && rep.tail_decreasing && last < first;
    report(8, ok,
           fmt("%zu rows, |eps_5| %.2e -> |eps_25| %.2e, slope %.3f, window sums %s", rep.rows.size(), first, last,
               rep.loglog_slope, rep.tail_decreasing ? "decreasing" : "NOT decreasing"));
}

void kernel()
{
    const Potential p = Potential::constant(1.0);
    const KernelGrid kg = kernel_iterate(p, 128);
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) worst = std::max(worst, std::abs(jost_via_kernel(kg, k) - jost_at_zero(p, k).f));
    double diag = 0.0;
    for (std::size_t i = 0; i <= kg.mesh(); ++i)
        diag = std::max(diag, std::abs(kg.at(i, i) - 0.5 * (1.0 - i * kg.step())));
    report(9, worst < 1e-5 && diag < 1e-10, fmt("max |f_kernel - f_ode| %.2e, max diagonal error %.2e", worst, diag));
}

} // namespace

int main()
{
    const auto t0 = Clock::now();
    constant_oracle();
    dirichlet_closed_form();
    gamma_counts();
    residual_decay();
    transcendental();
    symmetry();
    gamma_triangle();
    omega_zero();
    kernel();
    std::printf("%d of 9 criteria failed, %.1f s total\n", failures, seconds_since(t0));
    return failures ? 1 : 0;
}
