#pragma once

#include "tspec/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

namespace tspec::ode {

using cplx = std::complex<double>;

struct Options {
    double rtol = 1e-12;
    double atol = 1e-14;
    double initial_step = 1e-3;
    double min_step = 1e-14;
    std::size_t max_steps = 2'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) for y' = f(x, y) with complex state, integrating
/// from x0 to x1 (either direction). Returns y(x1).
template <std::size_t N, class Rhs>
std::array<cplx, N> dopri5(Rhs&& f, double x0, double x1, std::array<cplx, N> y, const Options& opt = {},
                           Stats* stats = nullptr)
{
    using State = std::array<cplx, N>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b*, the embedded fourth-order error weights
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = x1 >= x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    if (span == 0.0) return y;

    auto axpy = [](const State& base, double h, std::initializer_list<std::pair<double, const State*>> terms) {
        State out = base;
        for (const auto& [w, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += (h * w) * (*k)[i];
        return out;
    };

    double x = x0;
    double h = std::min(opt.initial_step, span);
    State k1 = f(x, y), k2, k3, k4, k5, k6, k7;
    std::size_t steps = 0;
    double err_prev = 1e-4;

    while (dir * (x1 - x) > 0.0) {
        if (++steps > opt.max_steps) throw IntegrationError("integrator exceeded the step budget", x);
        if (h < opt.min_step) throw IntegrationError("integrator step size underflow at x=" + std::to_string(x), x);
        const double remaining = std::abs(x1 - x);
        bool last = false;
        if (h >= remaining) {
            h = remaining;
            last = true;
        }
        const double hs = dir * h;

        k2 = f(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
        k3 = f(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
        k4 = f(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        k5 = f(x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        k6 = f(x + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State ynew = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double xnew = last ? x1 : x + hs;
        k7 = f(xnew, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const cplx ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / sc);
        }

        if (err <= 1.0) {
            // PI step-size control
            double fac = err == 0.0 ? 5.0 : 0.9 * std::pow(err, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 5.0);
            err_prev = std::max(err, 1e-4);
            x = xnew;
            y = ynew;
            k1 = k7;
            h *= fac;
            if (stats) ++stats->accepted;
            if (last) break;
        } else {
            const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
            h *= fac;
            if (stats) ++stats->rejected;
        }
    }
    return y;
}

} // namespace tspec::ode
