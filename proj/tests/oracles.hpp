#pragma once

// Closed forms for q = c on [0,1], used as independent references.

#include <complex>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

struct Jost {
    cplx f, fp;
};

inline Jost jost_constant(double c, cplx k)
{
    const cplx kap = std::sqrt(k * k - c);
    const cplx s = std::abs(kap) < 1e-12 ? cplx{1.0} : std::sin(kap) / kap;
    const cplx e = std::exp(I * k);
    return {e * (std::cos(kap) - I * k * s), e * (kap * kap * s + I * k * std::cos(kap))};
}

inline cplx d_robin_constant(double c, double h, cplx k)
{
    const Jost a = jost_constant(c, k), b = jost_constant(c, -k);
    const cplx fa = -I * (a.fp - h * a.f), fb = -I * (b.fp - h * b.f);
    return (fa + fb) / (2.0 * I) - h * (fa - fb) / (2.0 * k);
}

// Dirichlet D for q = 1 on the real axis: (sin k / k) cos k' - cos k sin k' / k', k' = sqrt(k^2 - 1).
inline cplx d_dirichlet_unit(cplx k)
{
    const cplx kp = std::sqrt(k * k - 1.0);
    const cplx s = std::abs(kp) < 1e-12 ? cplx{1.0} : std::sin(kp) / kp;
    return std::sin(k) / k * std::cos(kp) - std::cos(k) * s;
}

inline double d_dirichlet_unit(double k)
{
    const cplx kp = std::sqrt(cplx{k * k - 1.0});
    const cplx s = std::abs(kp) < 1e-12 ? cplx{1.0} : std::sin(kp) / kp;
    return (std::sin(k) / k * std::cos(kp) - std::cos(k) * s).real();
}

// Newton on the complex closed form, derivative by central difference.
inline cplx polish_dirichlet_unit(cplx k)
{
    for (int it = 0; it < 50; ++it) {
        const double h = 1e-6 * std::abs(k);
        const cplx d = (d_dirichlet_unit(k + h) - d_dirichlet_unit(k - h)) / (2.0 * h);
        const cplx step = d_dirichlet_unit(k) / d;
        k -= step;
        if (std::abs(step) < 1e-15 * std::abs(k)) break;
    }
    return k;
}

// Sign changes of d_dirichlet_unit on [a, b] on a fine scan, refined by bisection.
inline std::vector<double> dirichlet_unit_real_zeros(double a, double b, double step = 1e-3)
{
    std::vector<double> out;
    double x0 = a, f0 = d_dirichlet_unit(a);
    for (double x1 = a + step; x1 <= b; x1 += step) {
        const double f1 = d_dirichlet_unit(x1);
        if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
            double lo = x0, hi = x1, flo = f0;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi), fm = d_dirichlet_unit(mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push_back(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    return out;
}

} // namespace oracle
