#pragma once

#include "tspec/errors.hpp"
#include "tspec/ode.hpp"
#include "tspec/potential.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <vector>

namespace tspec {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

/// Jost solution data at x = 0: f(k,0) and f'(k,0).
struct JostValue {
    cplx k;
    cplx f;
    cplx fprime;
};

struct JostOptions {
    double rtol = 1e-12;
    double im_k_cap = 60.0;
};

/// f(k,0), f'(k,0) by backward integration from x = 1, where f(k,1) = e^{ik}, f'(k,1) = ik e^{ik}.
///
/// The integrated quantity is p(x) = f(k,x) e^{-ikx}, which satisfies
/// p'' = -2ik p' + q p with p(1) = 1, p'(1) = 0, so |p| stays O(e^{2|Im k|(1-x)}).
inline JostValue jost_at_zero(const Potential& pot, cplx k, const JostOptions& opt = {})
{
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) throw PreconditionError("k must be finite");
    if (std::abs(k.imag()) > opt.im_k_cap)
        throw PreconditionError("|Im k| exceeds the configured cap of " + std::to_string(opt.im_k_cap));
    const cplx m2ik = -2.0 * I * k;
    auto rhs = [&](double x, const std::array<cplx, 2>& y) {
        return std::array<cplx, 2>{y[1], m2ik * y[1] + pot.value(x) * y[0]};
    };
    ode::Options o;
    o.rtol = opt.rtol;
    o.atol = opt.rtol * 1e-2;
    o.initial_step = 1e-2 / (1.0 + std::abs(k));
    const auto y = ode::dopri5<2>(rhs, 1.0, 0.0, {cplx{1.0, 0.0}, cplx{0.0, 0.0}}, o);
    return JostValue{k, y[0], y[1] + I * k * y[0]};
}

/// Transformation kernel K(x,t) of the Jost solution on the uniform mesh
/// x_i = i/n, t_j = j/n over the triangle 0 <= x <= t <= 2 - x.
class KernelGrid {
public:
    KernelGrid() = default;
    explicit KernelGrid(std::size_t n) : n_(n), offsets_(n + 2, 0)
    {
        for (std::size_t i = 0; i <= n; ++i) offsets_[i + 1] = offsets_[i] + (2 * n - 2 * i + 1);
        values_.assign(offsets_[n + 1], 0.0);
    }

    std::size_t mesh() const noexcept { return n_; }
    double step() const noexcept { return 1.0 / static_cast<double>(n_); }

    /// K(x_i, t_j); zero outside the support triangle.
    double at(std::size_t i, std::size_t j) const noexcept
    {
        if (i > n_ || j < i || j > 2 * n_ - i) return 0.0;
        return values_[offsets_[i] + (j - i)];
    }
    double& ref(std::size_t i, std::size_t j) noexcept { return values_[offsets_[i] + (j - i)]; }

    /// Bilinear interpolation; exactly zero when x + t >= 2 or x > t.
    double operator()(double x, double t) const noexcept
    {
        if (x + t >= 2.0 || x > t || x < 0.0 || x > 1.0) return 0.0;
        const double h = step();
        const double fi = x / h, fj = t / h;
        const std::size_t i = std::min(static_cast<std::size_t>(fi), n_ - 1);
        const std::size_t j = static_cast<std::size_t>(fj);
        const double a = fi - static_cast<double>(i), b = fj - static_cast<double>(j);
        return (1 - a) * (1 - b) * at(i, j) + (1 - a) * b * at(i, j + 1) + a * (1 - b) * at(i + 1, j) +
               a * b * at(i + 1, j + 1);
    }

    std::size_t iterations = 0;
    double residual = 0.0;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<double> values_;
};

/// Picard iteration of the kernel integral equation on the triangular mesh.
/// The inner u-integrals use running trapezoid sums clipped to the support,
/// so the discrete diagonal K(x,x) equals half the tail integral of q exactly.
inline KernelGrid kernel_iterate(const Potential& pot, std::size_t mesh_n, double tol = 1e-10,
                                 std::size_t max_iter = 50)
{
    if (mesh_n < 16) throw PreconditionError("kernel mesh must have at least 16 cells");
    const std::size_t n = mesh_n;
    const double h = 1.0 / static_cast<double>(n);

    // Tail integrals of q from y_m = m h / 2 to 1 for m = 0..2n, and q on the x-mesh.
    std::vector<double> tail(2 * n + 1, 0.0), qx(n + 1);
    for (std::size_t m = 0; m < 2 * n; ++m) {
        const double y = 0.5 * h * static_cast<double>(m);
        tail[m] = quad::gauss([&](double s) { return pot.value(s); }, y, 1.0, 4);
    }
    for (std::size_t i = 0; i <= n; ++i) qx[i] = pot.value(h * static_cast<double>(i));

    KernelGrid cur(n), next(n);
    std::vector<std::vector<double>> cum(n + 1);
    std::vector<double> g(n + 1);
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        for (std::size_t l = 0; l <= n; ++l) {
            auto& c = cum[l];
            c.assign(2 * n - 2 * l + 1, 0.0);
            for (std::size_t j = l + 1; j <= 2 * n - l; ++j)
                c[j - l] = c[j - l - 1] + 0.5 * h * (cur.at(l, j - 1) + cur.at(l, j));
        }
        double diff = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = i; j <= 2 * n - i; ++j) {
                for (std::size_t l = i; l <= n; ++l) {
                    const std::size_t w = l - i;
                    const std::size_t lo = std::max(j >= w ? j - w : 0, l);
                    const std::size_t hi = std::min(j + w, 2 * n - l);
                    const double inner = hi > lo ? cum[l][hi - l] - cum[l][lo - l] : 0.0;
                    g[l] = qx[l] * inner;
                }
                double outer = 0.0;
                if (n > i) {
                    outer = 0.5 * (g[i] + g[n]);
                    for (std::size_t l = i + 1; l < n; ++l) outer += g[l];
                    outer *= h;
                }
                const double v = 0.5 * tail[i + j] + 0.5 * outer;
                diff = std::max(diff, std::abs(v - cur.at(i, j)));
                next.ref(i, j) = v;
            }
        }
        std::swap(cur, next);
        cur.iterations = iter;
        cur.residual = diff;
        if (diff < tol) return cur;
    }
    throw ConvergenceError("kernel iteration did not converge in " + std::to_string(max_iter) + " iterations",
                           cur.residual);
}

namespace detail {

// phi0(z) = integral_0^1 (1-s) e^{zs} ds, phi1(z) = integral_0^1 s e^{zs} ds
inline std::pair<cplx, cplx> filon_weights(cplx z)
{
    if (std::abs(z) < 0.1) {
        cplx p0{0.0}, p1{0.0}, zm{1.0};
        double fact = 1.0;  // m!
        for (int m = 0; m < 12; ++m) {
            if (m > 0) fact *= m;
            p0 += zm / (fact * (m + 1) * (m + 2));
            p1 += zm / (fact * (m + 2));
            zm *= z;
        }
        return {p0, p1};
    }
    const cplx ez = std::exp(z);
    return {(ez - 1.0 - z) / (z * z), (ez * (z - 1.0) + 1.0) / (z * z)};
}

} // namespace detail

/// f(k,0) = 1 + integral_0^2 K(0,t) e^{ikt} dt, with K(0,.) read as piecewise linear
/// and the oscillatory factor integrated exactly. Cross-check route only.
inline cplx jost_via_kernel(const KernelGrid& kg, cplx k)
{
    const std::size_t n = kg.mesh();
    const double h = kg.step();
    const auto [w0, w1] = detail::filon_weights(I * k * h);
    cplx sum{0.0};
    for (std::size_t j = 0; j < 2 * n; ++j) {
        const cplx phase = std::exp(I * k * (h * static_cast<double>(j)));
        sum += phase * (kg.at(0, j) * w0 + kg.at(0, j + 1) * w1);
    }
    return 1.0 + h * sum;
}

/// Writes t, K(0,t) as CSV.
inline void write_kernel_csv(std::ostream& os, const KernelGrid& kg)
{
    os << "t,K0t\n";
    os.precision(17);
    for (std::size_t j = 0; j <= 2 * kg.mesh(); ++j) os << kg.step() * static_cast<double>(j) << ',' << kg.at(0, j) << '\n';
}

/// Terms of the successive-approximation series for p(i tau, x) = e^{tau x} f(i tau, x), tau < 0.
struct SuccessiveApproxState {
    double tau = 0.0;
    std::vector<double> x;                   // mesh nodes (panel Chebyshev points on [0,1])
    std::vector<std::vector<double>> terms;  // p_n on the mesh, n = 0..N
    std::vector<double> sum;                 // partial sum p(i tau, x)
    std::vector<double> abs_q_tail;          // integral of |q| over [x, 1]
    double truncation_bound = 0.0;           // majorant of the first omitted term at x = 0
    bool truncated = false;                  // bound still above tolerance when n_max was reached
    double p0 = 0.0;                         // p(i tau, 0)
    double dp0 = 0.0;                        // p'(i tau, 0) from the identity p' = 2 tau (p - 1) - int q p

    double f_at_0() const noexcept { return p0; }
    double fprime_at_0() const noexcept { return dp0 - tau * p0; }
};

/// Majorant e^{-2 tau (1-x)} (int_x^1 |q|)^n / (|tau|^n n!) of |p_n(i tau, x)|.
inline double successive_majorant(double tau, double x, double abs_q_tail, std::size_t n)
{
    double v = std::exp(-2.0 * tau * (1.0 - x));
    for (std::size_t j = 1; j <= n; ++j) v *= abs_q_tail / (std::abs(tau) * static_cast<double>(j));
    return v;
}

inline SuccessiveApproxState successive_approx(const Potential& pot, double tau, std::size_t n_max,
                                               double tol = 1e-12)
{
    if (!(tau < 0.0)) throw PreconditionError("successive approximation needs tau < 0");
    if (std::abs(tau) > 150.0) throw PreconditionError("|tau| above 150 overflows the unscaled series");
    std::size_t panels = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(2.0 * std::abs(tau))));
    if (pot.kind() == PotentialKind::grid) {
        const std::size_t iv = pot.data().size() - 1;
        panels = iv * ((panels + iv - 1) / iv);
    }
    const quad::ChebyshevPanels mesh(0.0, 1.0, panels, 16);
    const std::size_t m = mesh.size();

    SuccessiveApproxState st;
    st.tau = tau;
    st.x.assign(mesh.nodes().begin(), mesh.nodes().end());
    std::vector<double> q(m), absq(m), w(m), inv_w(m);
    for (std::size_t i = 0; i < m; ++i) {
        q[i] = pot.value(st.x[i]);
        absq[i] = std::abs(q[i]);
        w[i] = std::exp(-2.0 * tau * st.x[i]);
        inv_w[i] = 1.0 / w[i];
    }
    st.abs_q_tail = mesh.integral_to_end<double>(absq);

    st.terms.push_back(std::vector<double>(m, 1.0));
    st.sum = st.terms.back();
    std::vector<double> a(m), b(m);
    for (std::size_t n = 0; n < n_max; ++n) {
        const auto& pn = st.terms.back();
        for (std::size_t i = 0; i < m; ++i) {
            a[i] = q[i] * pn[i];
            b[i] = w[i] * a[i];
        }
        const auto ia = mesh.integral_to_end<double>(a);
        const auto ib = mesh.integral_to_end<double>(b);
        std::vector<double> next(m);
        for (std::size_t i = 0; i < m; ++i) next[i] = (ia[i] - inv_w[i] * ib[i]) / (2.0 * tau);
        for (std::size_t i = 0; i < m; ++i) st.sum[i] += next[i];
        st.terms.push_back(std::move(next));
        st.truncation_bound = successive_majorant(tau, 0.0, st.abs_q_tail[0], n + 2);
        if (st.truncation_bound < tol * std::max(1.0, std::abs(st.sum[0]))) break;
    }
    st.truncated = !(st.truncation_bound < tol * std::max(1.0, std::abs(st.sum[0])));

    std::vector<double> qp(m);
    for (std::size_t i = 0; i < m; ++i) qp[i] = q[i] * st.sum[i];
    const auto iqp = mesh.integral_to_end<double>(qp);
    st.p0 = st.sum[0];
    st.dp0 = 2.0 * tau * (st.p0 - 1.0) - iqp[0];
    return st;
}

} // namespace tspec
