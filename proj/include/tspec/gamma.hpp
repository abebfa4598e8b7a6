#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "charfun.hpp"
#include "errors.hpp"
#include "potential.hpp"
#include "roots.hpp"

namespace tspec {

/// Truncated zero product k^{2s} prod (1 - k^2/lambda_n).
///
/// `lambdas` holds every nonzero eigenvalue (conjugates listed separately,
/// multiplicities repeated). `orbits` counts the sqrt-eigenvalue orbits the
/// list was built from, which is the truncation N reported with estimates.
class HadamardProduct {
public:
    HadamardProduct() = default;

    /// Throws ValidationError unless the list is closed under conjugation.
    HadamardProduct(int s, std::vector<cplx> lambdas, int orbits = -1) : s_(s), orbits_(orbits)
    {
        if (s < 0) throw PreconditionError("HadamardProduct: s < 0");
        for (cplx l : lambdas)
            if (l == cplx{0.0}) throw PreconditionError("HadamardProduct: zero eigenvalue belongs in s");
        std::sort(lambdas.begin(), lambdas.end(), [](cplx a, cplx b) {
            if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
            return a.imag() < b.imag();
        });
        pair_up(std::move(lambdas));
        if (orbits_ < 0) orbits_ = static_cast<int>(pairs_.size());
    }

    /// Builds the product from located zeros of D. Zeros at the origin give s
    /// (half their multiplicity); each remaining orbit representative k gives
    /// lambda = k^2, plus its conjugate when k is off both axes. Only the
    /// `max_orbits` smallest orbits are kept when max_orbits >= 0.
    static HadamardProduct from_zeros(const std::vector<Eigenvalue>& zeros, int max_orbits = -1,
                                      double origin_tol = 1e-8)
    {
        std::vector<Eigenvalue> canon = canonical_zeros(zeros);
        int s = 0;
        std::vector<cplx> lambdas;
        int orbits = 0;
        for (const Eigenvalue& e : canon) {
            if (std::abs(e.k) <= origin_tol) {
                s += std::max(1, e.multiplicity / 2);
                continue;
            }
            if (max_orbits >= 0 && orbits >= max_orbits) break;
            ++orbits;
            const cplx l = e.k * e.k;
            for (int m = 0; m < e.multiplicity; ++m) {
                if (e.cls == ZeroClass::quadrant) {
                    lambdas.push_back(l);
                    lambdas.push_back(std::conj(l));
                } else {
                    lambdas.push_back(cplx{l.real(), 0.0});
                }
            }
        }
        return HadamardProduct(s, std::move(lambdas), orbits);
    }

    int s() const noexcept { return s_; }
    int truncation() const noexcept { return orbits_; }
    std::size_t size() const noexcept
    {
        std::size_t n = 0;
        for (const auto& p : pairs_) n += p.conjugate ? 2 : 1;
        return n;
    }
    std::vector<cplx> lambdas() const
    {
        std::vector<cplx> out;
        for (const auto& p : pairs_) {
            out.push_back(p.lambda);
            if (p.conjugate) out.push_back(std::conj(p.lambda));
        }
        return out;
    }

    /// log E(k) (principal branches summed; the imaginary part is only
    /// meaningful modulo 2 pi). Returns -inf real part at a listed root.
    cplx log_eval(cplx k) const
    {
        const cplx k2 = k * k;
        cplx acc = 0.0;
        if (s_ > 0) acc += 2.0 * s_ * std::log(k);
        for (const auto& p : pairs_) {
            const cplx f = 1.0 - k2 / p.lambda;
            if (p.conjugate) {
                const cplx g = 1.0 - k2 / std::conj(p.lambda);
                acc += std::log(f * g);
            } else {
                acc += std::log(f);
            }
        }
        return acc;
    }

    /// E(k), factors multiplied in ascending |lambda| with conjugates paired.
    cplx operator()(cplx k) const
    {
        const cplx k2 = k * k;
        cplx acc = 1.0;
        for (int j = 0; j < s_; ++j) acc *= k2;
        for (const auto& p : pairs_) {
            acc *= 1.0 - k2 / p.lambda;
            if (p.conjugate) acc *= 1.0 - k2 / std::conj(p.lambda);
        }
        return acc;
    }

    /// Smallest distance from k to a square root of a listed eigenvalue.
    double distance_to_roots(cplx k) const
    {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& p : pairs_) {
            const cplx r = std::sqrt(p.lambda);
            for (cplx c : {r, -r, std::conj(r), -std::conj(r)}) d = std::min(d, std::abs(k - c));
        }
        if (s_ > 0) d = std::min(d, std::abs(k));
        return d;
    }

private:
    struct Pair {
        cplx lambda;
        bool conjugate;  // true: the factor for conj(lambda) is included too
    };

    void pair_up(std::vector<cplx> ls)
    {
        std::vector<bool> used(ls.size(), false);
        for (std::size_t i = 0; i < ls.size(); ++i) {
            if (used[i]) continue;
            used[i] = true;
            const double tol = 1e-9 * std::max(1.0, std::abs(ls[i]));
            if (std::abs(ls[i].imag()) <= tol) {
                pairs_.push_back({cplx{ls[i].real(), 0.0}, false});
                continue;
            }
            std::size_t match = ls.size();
            for (std::size_t j = i + 1; j < ls.size(); ++j)
                if (!used[j] && std::abs(ls[j] - std::conj(ls[i])) <= tol) {
                    match = j;
                    break;
                }
            if (match == ls.size())
                throw ValidationError("eigenvalue list not closed under conjugation: missing conj of (" +
                                      std::to_string(ls[i].real()) + ", " + std::to_string(ls[i].imag()) + ")");
            used[match] = true;
            pairs_.push_back({ls[i].imag() > 0.0 ? ls[i] : ls[match], true});
        }
    }

    int s_ = 0;
    int orbits_ = 0;
    std::vector<Pair> pairs_;
};

inline cplx eval_E(const HadamardProduct& hp, cplx k) { return hp(k); }

// ---------------------------------------------------------------------------
// gamma estimates

enum class GammaRoute { omega_limit, endpoint_limit, dirichlet_omega, dirichlet_endpoint, direct };

inline const char* to_string(GammaRoute r)
{
    switch (r) {
    case GammaRoute::omega_limit: return "omega_limit";
    case GammaRoute::endpoint_limit: return "endpoint_limit";
    case GammaRoute::dirichlet_omega: return "dirichlet_omega";
    case GammaRoute::dirichlet_endpoint: return "dirichlet_endpoint";
    case GammaRoute::direct: return "direct";
    }
    return "?";
}

struct GammaEstimate {
    double gamma = 0.0;
    GammaRoute route = GammaRoute::direct;
    int truncation = 0;
    std::vector<double> probes;        // k ladder, tau ladder or the single probe
    std::vector<double> samples;       // the limit quantity at each probe
    std::vector<double> extrapolants;  // gamma from successive fitting windows
    double gap = 0.0;                  // relative gap of the last two extrapolants
    bool stable = true;
    double residual_rms = 0.0;         // fit residual in log space
    std::optional<double> imag_part;   // direct route: Im of D/E
};

class UnstableLimit : public Error {
public:
    UnstableLimit(const std::string& what, GammaEstimate est) : Error(what), est_(std::move(est)) {}
    const GammaEstimate& estimate() const noexcept { return est_; }

private:
    GammaEstimate est_;
};

struct LimitOptions {
    double max_gap = 1e-3;        // relative gap between the last two extrapolants
    double reach = 0.35;          // ladder stays below reach * (largest |k| in the product)
    int min_rungs = 7;
    int omega_terms = 2;          // correction terms 1/k^2, 1/k^4, ... on the omega ladder
    int endpoint_terms = 1;       // correction terms 1/|tau|, ... on the endpoint ladder
    int tail_terms = 3;           // truncation terms x^2, x^4, ...
    double endpoint_floor = 1e-6; // endpoint rungs start once e^{-2|tau|} |2 tau|^{p+1} drops below this
    bool throw_on_unstable = true;
};

namespace detail {

/// Least-squares fit y ~ sum c_j phi_j(x); returns the coefficients and rms.
inline std::pair<std::vector<double>, double> lsq_fit(const std::vector<double>& x, const std::vector<double>& y,
                                                      const std::vector<std::function<double(double)>>& basis)
{
    const std::size_t m = x.size(), p = basis.size();
    if (m < p) throw PreconditionError("lsq_fit: fewer samples than basis functions");
    std::vector<std::vector<double>> a(m, std::vector<double>(p));
    std::vector<double> scale(p, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            a[i][j] = basis[j](x[i]);
            scale[j] = std::max(scale[j], std::abs(a[i][j]));
        }
    for (auto& row : a)
        for (std::size_t j = 0; j < p; ++j) row[j] /= scale[j] > 0.0 ? scale[j] : 1.0;
    // Householder QR on the scaled design matrix
    std::vector<double> b = y;
    for (std::size_t j = 0; j < p; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < m; ++i) norm += a[i][j] * a[i][j];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a[j][j] > 0.0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        for (std::size_t i = j; i < m; ++i) v[i] = a[i][j];
        v[j] -= alpha;
        double vv = 0.0;
        for (std::size_t i = j; i < m; ++i) vv += v[i] * v[i];
        if (vv == 0.0) continue;
        for (std::size_t c = j; c < p; ++c) {
            double d = 0.0;
            for (std::size_t i = j; i < m; ++i) d += v[i] * a[i][c];
            d = 2.0 * d / vv;
            for (std::size_t i = j; i < m; ++i) a[i][c] -= d * v[i];
        }
        double d = 0.0;
        for (std::size_t i = j; i < m; ++i) d += v[i] * b[i];
        d = 2.0 * d / vv;
        for (std::size_t i = j; i < m; ++i) b[i] -= d * v[i];
    }
    std::vector<double> c(p, 0.0);
    for (std::size_t jj = p; jj-- > 0;) {
        double s = b[jj];
        for (std::size_t k = jj + 1; k < p; ++k) s -= a[jj][k] * c[k];
        c[jj] = a[jj][jj] != 0.0 ? s / a[jj][jj] : 0.0;
    }
    for (std::size_t j = 0; j < p; ++j) c[j] /= scale[j] > 0.0 ? scale[j] : 1.0;
    double rms = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < p; ++j) f += c[j] * basis[j](x[i]);
        rms += (f - y[i]) * (f - y[i]);
    }
    return {c, std::sqrt(rms / static_cast<double>(m))};
}

/// Fits log|ratio| on the ladder with the given basis (basis[0] must be the
/// constant) over the full ladder and over two one-rung-shorter windows.
inline void extrapolate(GammaEstimate& est, const std::vector<double>& x, const std::vector<double>& logs,
                        double sign, const std::vector<std::function<double(double)>>& basis,
                        const LimitOptions& opt)
{
    const std::size_t m = x.size();
    auto window = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> xs(x.begin() + static_cast<std::ptrdiff_t>(lo), x.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<double> ys(logs.begin() + static_cast<std::ptrdiff_t>(lo),
                               logs.begin() + static_cast<std::ptrdiff_t>(hi));
        return lsq_fit(xs, ys, basis);
    };
    const auto [c_lo, r_lo] = window(1, m);
    const auto [c_hi, r_hi] = window(0, m - 1);
    const auto [c_all, r_all] = window(0, m);
    est.extrapolants = {sign * std::exp(c_lo[0]), sign * std::exp(c_hi[0])};
    est.gamma = sign * std::exp(c_all[0]);
    est.residual_rms = r_all;
    est.gap = std::abs(est.extrapolants[0] - est.extrapolants[1]) / std::abs(est.gamma);
    est.stable = std::isfinite(est.gamma) && est.gap <= opt.max_gap;
    if (!est.stable && opt.throw_on_unstable)
        throw UnstableLimit("gamma limit unstable: extrapolant gap " + std::to_string(est.gap), est);
}

/// 1, x^{-step}, ..., x^{-step*terms}, x^2, ..., x^{2*tail_terms}.
inline std::vector<std::function<double(double)>> ladder_basis(int step, int terms, const LimitOptions& opt)
{
    std::vector<std::function<double(double)>> b{[](double) { return 1.0; }};
    for (int j = 1; j <= terms; ++j) b.push_back([e = -step * j](double x) { return std::pow(x, e); });
    for (int j = 1; j <= opt.tail_terms; ++j) b.push_back([e = 2 * j](double x) { return std::pow(x, e); });
    return b;
}

inline double largest_root_modulus(const HadamardProduct& hp)
{
    double m = 0.0;
    for (cplx l : hp.lambdas()) m = std::max(m, std::sqrt(std::abs(l)));
    return m;
}

} // namespace detail

/// gamma = (omega/2) / lim E(k) (Robin) or (omega/2) / lim k^2 E0(k) (Dirichlet).
///
/// The truncated product behaves like E(k) exp(c1 k^2 + c2 k^4 + ...) on the
/// ladder k_j = j pi, where the sin 2k term of D vanishes; log E_N is fitted by
/// a + b1/k^2 + b2/k^4 + c1 k^2 + c2 k^4 + c3 k^6 and gamma is read from a.
inline GammaEstimate gamma_from_omega(const HadamardProduct& hp, const PotentialScalars& s, Variant v,
                                      const LimitOptions& opt = {})
{
    if (std::abs(s.omega) <= 1e-10) throw PreconditionError("gamma_from_omega: omega = 0");
    if (hp.size() == 0) throw PreconditionError("gamma_from_omega: empty eigenvalue list");
    GammaEstimate est;
    est.route = v == Variant::robin ? GammaRoute::omega_limit : GammaRoute::dirichlet_omega;
    est.truncation = hp.truncation();
    const double kmax = std::max(opt.reach * detail::largest_root_modulus(hp), (opt.min_rungs + 1) * std::numbers::pi);
    std::vector<double> xs, logs;
    double sign = 0.0;
    for (int j = 1; j * std::numbers::pi <= kmax; ++j) {
        const double k = j * std::numbers::pi;
        if (hp.distance_to_roots(k) < 0.1) continue;
        cplx le = hp.log_eval(k);
        if (v == Variant::dirichlet) le += 2.0 * std::log(k);
        const double sg = std::cos(le.imag()) >= 0.0 ? 1.0 : -1.0;
        if (sign == 0.0) sign = sg;
        xs.push_back(k);
        // the limit quantity is (omega/2)/E, so gamma's log is log(omega/2) - log E
        logs.push_back(std::log(std::abs(s.omega) / 2.0) - le.real());
        est.probes.push_back(k);
        est.samples.push_back(sg * std::abs(s.omega) / 2.0 / std::exp(le.real()));
    }
    sign *= s.omega > 0.0 ? 1.0 : -1.0;
    const auto basis = detail::ladder_basis(2, opt.omega_terms, opt);
    if (xs.size() < basis.size() + 1) throw PreconditionError("gamma_from_omega: ladder too short");
    detail::extrapolate(est, xs, logs, sign, basis, opt);
    return est;
}

/// gamma = lim -q^{(m)}(1) e^{-2 tau} / (c E(i tau) (2 tau)^{m+p}) as tau -> -inf,
/// with c = 4, p = 1 (Robin) or c = 1, p = 3 (Dirichlet). Evaluated in log
/// space on tau_j = -(4 + 2j), skipping the first rungs while exponentially
/// small terms are still visible; the fit is a + b/|tau| + c1 tau^2 + c2 tau^4 + c3 tau^6.
inline GammaEstimate gamma_from_endpoint(const HadamardProduct& hp, const PotentialScalars& s, Variant v,
                                         const LimitOptions& opt = {})
{
    if (!s.m_order) throw PreconditionError("gamma_from_endpoint: no nonvanishing derivative at x = 1");
    const int m = s.m_order->m;
    const double qm = s.m_order->value;
    if (qm == 0.0) throw PreconditionError("gamma_from_endpoint: q^(m)(1) = 0");
    GammaEstimate est;
    est.route = v == Variant::robin ? GammaRoute::endpoint_limit : GammaRoute::dirichlet_endpoint;
    est.truncation = hp.truncation();
    const double c = v == Variant::robin ? 4.0 : 1.0;
    const int p = m + (v == Variant::robin ? 1 : 3);
    int j0 = 0;
    while (std::exp(-2.0 * (4.0 + 2.0 * j0)) * std::pow(2.0 * (4.0 + 2.0 * j0), p + 1) > opt.endpoint_floor) ++j0;
    const double tmax =
        std::max(opt.reach * detail::largest_root_modulus(hp), 4.0 + 2.0 * (j0 + std::max(opt.min_rungs - 1, 0)));

    std::vector<double> xs, logs;
    double sign = 0.0;
    for (int j = j0; 4.0 + 2.0 * j <= tmax; ++j) {
        const double tau = -(4.0 + 2.0 * j);
        const cplx le = hp.log_eval(cplx{0.0, tau});
        const double se = std::cos(le.imag()) >= 0.0 ? 1.0 : -1.0;
        const double sp = p % 2 == 0 ? 1.0 : -1.0;  // sign of (2 tau)^p
        const double sg = -(qm > 0.0 ? 1.0 : -1.0) * se * sp;
        if (sign == 0.0) sign = sg;
        const double lr = std::log(std::abs(qm)) - 2.0 * tau - std::log(c) - le.real() - p * std::log(-2.0 * tau);
        xs.push_back(-tau);
        logs.push_back(lr);
        est.probes.push_back(tau);
        est.samples.push_back(std::isfinite(lr) && lr < 700.0 ? sg * std::exp(lr) : sg * HUGE_VAL);
    }
    const auto basis = detail::ladder_basis(1, opt.endpoint_terms, opt);
    if (xs.size() < basis.size() + 1) throw PreconditionError("gamma_from_endpoint: ladder too short");
    detail::extrapolate(est, xs, logs, sign, basis, opt);
    return est;
}

/// gamma = D(k0)/E(k0) at a single probe.
inline GammaEstimate gamma_direct(const Evaluator& d, const HadamardProduct& hp, cplx probe, double min_distance = 0.1)
{
    if (hp.distance_to_roots(probe) <= min_distance)
        throw PreconditionError("gamma_direct: probe within " + std::to_string(min_distance) + " of a root");
    const cplx r = d(probe) / hp(probe);
    GammaEstimate est;
    est.route = GammaRoute::direct;
    est.truncation = hp.truncation();
    est.gamma = r.real();
    est.imag_part = r.imag();
    est.probes = {probe.real()};
    est.samples = {r.real()};
    est.extrapolants = {r.real()};
    return est;
}

} // namespace tspec
