#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "charfun.hpp"
#include "errors.hpp"
#include "potential.hpp"
#include "roots.hpp"

namespace tspec {

/// Principal logarithm with the branch cut convention -pi < arg z <= pi.
/// std::log maps -x - 0i to arg -pi, which is folded back onto +pi here.
inline cplx principal_log(cplx z)
{
    double a = std::arg(z);
    if (a <= -std::numbers::pi) a = std::numbers::pi;
    return {std::log(std::abs(z)), a};
}

// ---------------------------------------------------------------------------
// z - kappa log z = w

struct TranscendentalProblem {
    cplx kappa;
    cplx w;
    cplx z;
    cplx seed;
    double residual = 0.0;  // |z - kappa log z - w|
    int iterations = 0;
};

inline cplx transcendental_seed(cplx kappa, cplx w)
{
    const cplx lw = principal_log(w);
    return w + kappa * lw + kappa * kappa * lw / w;
}

inline double transcendental_residual(cplx kappa, cplx w, cplx z)
{
    return std::abs(z - kappa * principal_log(z) - w);
}

/// Solves z - kappa log z = w for large |w| by Newton iteration from the
/// three-term expansion. Throws PreconditionError when |w| is below the
/// validity guard and ConvergenceError if 50 steps do not suffice.
inline TranscendentalProblem solve_transcendental(cplx kappa, cplx w)
{
    const double aw = std::abs(w);
    if (!(aw > 10.0) || !(aw > 4.0 * std::abs(kappa) * std::log(aw)))
        throw PreconditionError("solve_transcendental: |w| too small for the asymptotic seed");

    TranscendentalProblem p{kappa, w, w, w};
    if (kappa == cplx{0.0}) return p;

    p.seed = transcendental_seed(kappa, w);
    cplx z = p.seed;
    // residual floor set by rounding in z - w
    const double floor = std::max(1e-13, 8.0 * std::numeric_limits<double>::epsilon() * aw);
    for (int it = 1; it <= 50; ++it) {
        const cplx r = z - kappa * principal_log(z) - w;
        const cplx step = r / (1.0 - kappa / z);
        z -= step;
        p.iterations = it;
        if (std::abs(step) <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(z)) break;
    }
    p.z = z;
    p.residual = transcendental_residual(kappa, w, z);
    if (!(p.residual <= std::max(1e-12, floor)))
        throw ConvergenceError("solve_transcendental: Newton did not converge", p.residual);
    return p;
}

// ---------------------------------------------------------------------------
// g1(k) = 4ikw + q(1)(e^{2ik} - e^{-2ik})

inline cplx eval_g1(double omega, double q1, cplx k)
{
    return 4.0 * I * k * omega + q1 * (std::exp(2.0 * I * k) - std::exp(-2.0 * I * k));
}

inline cplx eval_g1(const PotentialScalars& s, cplx k) { return eval_g1(s.omega, s.q_at_1, k); }

inline cplx eval_g1_prime(double omega, double q1, cplx k)
{
    return 4.0 * I * omega + 2.0 * I * q1 * (std::exp(2.0 * I * k) + std::exp(-2.0 * I * k));
}

/// g1(k)/k, continued to k = 0.
inline cplx eval_g1_over_k(double omega, double q1, cplx k)
{
    if (std::abs(k) < 1e-6) return 4.0 * I * (omega + q1) - 16.0 * I * q1 * k * k / 3.0;
    return eval_g1(omega, q1, k) / k;
}

/// Square contour Gamma_n: |Re k|, |Im k| <= (n+1)pi.
inline Rect gamma_contour(int n)
{
    const double a = (n + 1) * std::numbers::pi;
    return {-a, a, -a, a};
}

/// Small square of half-width eps around mu.
inline Rect small_contour(cplx mu, double eps)
{
    return {mu.real() - eps, mu.real() + eps, mu.imag() - eps, mu.imag() + eps};
}

/// min |g1(k)| e^{-2|Im k|} over `per_edge` equispaced points on each edge of r.
inline double min_scaled_g1(double omega, double q1, const Rect& r, int per_edge = 400)
{
    double m = std::numeric_limits<double>::infinity();
    const std::array<cplx, 5> c{cplx{r.s0, r.t0}, cplx{r.s1, r.t0}, cplx{r.s1, r.t1}, cplx{r.s0, r.t1},
                                cplx{r.s0, r.t0}};
    for (int e = 0; e < 4; ++e)
        for (int j = 0; j < per_edge; ++j) {
            const cplx k = c[e] + (c[e + 1] - c[e]) * (static_cast<double>(j) / per_edge);
            m = std::min(m, std::abs(eval_g1(omega, q1, k)) * std::exp(-2.0 * std::abs(k.imag())));
        }
    return m;
}

// ---------------------------------------------------------------------------
// zeros of g1

enum class RatioCase { ratio_negative, ratio_positive, omega_zero };

inline const char* to_string(RatioCase c)
{
    switch (c) {
    case RatioCase::ratio_negative: return "ratio_negative";
    case RatioCase::ratio_positive: return "ratio_positive";
    case RatioCase::omega_zero: return "omega_zero";
    }
    return "?";
}

/// Default threshold under which a scalar hypothesis counts as "= 0".
inline constexpr double hypothesis_tolerance = 1e-10;

inline bool is_zero(double x, double scale = 1.0) { return std::abs(x) <= hypothesis_tolerance * std::max(1.0, scale); }

struct LeadingZeros {
    RatioCase case_tag = RatioCase::omega_zero;
    std::vector<cplx> mu;         // mu[n], n = 0..n_max, first-quadrant representatives
    std::vector<cplx> seed;       // formula value before polishing (mu[0]: box search only)
    std::vector<cplx> b;          // b_n (index 0 unused)
    std::vector<bool> polished;   // Newton on g1 converged to a zero in the n-th slot
    std::vector<bool> from_box;   // located by the fallback box search
};

namespace detail {

inline bool polished_ok(double omega, double q1, cplx mu)
{
    const double g = std::abs(eval_g1(omega, q1, mu));
    return g < 1e-10 * std::abs(eval_g1_prime(omega, q1, mu)) * std::max(1.0, std::abs(mu));
}

inline std::optional<cplx> polish_g1(double omega, double q1, cplx seed, double max_move)
{
    cplx z = seed;
    for (int it = 0; it < 60; ++it) {
        const cplx d = eval_g1_prime(omega, q1, z);
        if (d == cplx{0.0}) return std::nullopt;
        const cplx step = eval_g1(omega, q1, z) / d;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z - seed) > max_move) return std::nullopt;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    if (!polished_ok(omega, q1, z)) return std::nullopt;
    return z;
}

/// Zeros of g1/k in the box [n pi, (n+1) pi] x [-delta, log(2 n pi) + 2].
inline std::vector<cplx> g1_box_zeros(double omega, double q1, int n)
{
    const double pi = std::numbers::pi;
    const double delta = 1e-3;
    const double top = n == 0 ? 3.0 : std::log(2.0 * n * pi) + 2.0;
    const Rect box{n == 0 ? -delta : n * pi, (n + 1) * pi, -delta, top};
    const Evaluator f = [=](cplx k) { return eval_g1_over_k(omega, q1, k); };
    FindOptions opt;
    opt.newton.tol = 1e-14;
    std::vector<cplx> out;
    try {
        for (const Eigenvalue& e : find_zeros(f, box, opt).zeros) out.push_back(representative(e.k));
    } catch (const Error&) {
    }
    return out;
}

} // namespace detail

inline RatioCase ratio_case(double omega, double q1)
{
    if (is_zero(omega)) return RatioCase::omega_zero;
    return q1 / omega > 0.0 ? RatioCase::ratio_positive : RatioCase::ratio_negative;
}

/// b_n for n >= 1, first-quadrant branch.
inline cplx leading_b(double omega, double q1, int n)
{
    const double pi = std::numbers::pi;
    const double r = q1 / (2.0 * omega);
    if (r < 0.0) return {std::log(2.0 * n * pi) - std::log(-r), -pi / 2.0};
    return {std::log(2.0 * n * pi) - std::log(r), -1.5 * pi};
}

/// Closed-form asymptotic location of mu_n (n >= 1), before polishing.
inline cplx leading_seed(double omega, double q1, int n)
{
    const double pi = std::numbers::pi;
    const double r = q1 / (2.0 * omega);
    if (r < 0.0) {
        const double l = std::log(2.0 * n * pi) - std::log(-r);
        return {(n + 0.25) * pi - l / (4.0 * n * pi), 0.5 * (l + 1.0 / (4.0 * n))};
    }
    const double l = std::log(2.0 * n * pi) - std::log(r);
    return {(n + 0.75) * pi - l / (4.0 * n * pi), 0.5 * (l + 3.0 / (4.0 * n))};
}

/// First-quadrant zeros mu_0..mu_{n_max} of g1/k (omega != 0), or n pi / 2 (omega = 0).
inline LeadingZeros leading_zeros(double omega, double q1, int n_max)
{
    if (is_zero(q1)) throw PreconditionError("leading_zeros: q(1) = 0");
    if (n_max < 0) throw PreconditionError("leading_zeros: n_max < 0");
    LeadingZeros z;
    z.case_tag = ratio_case(omega, q1);
    const auto count = static_cast<std::size_t>(n_max + 1);
    z.mu.resize(count);
    z.seed.resize(count);
    z.b.assign(count, cplx{0.0});
    z.polished.assign(count, false);
    z.from_box.assign(count, false);

    if (z.case_tag == RatioCase::omega_zero) {
        for (int n = 0; n <= n_max; ++n) {
            z.mu[n] = z.seed[n] = n * std::numbers::pi / 2.0;
            z.polished[n] = true;
        }
        return z;
    }

    for (int n = 0; n <= n_max; ++n) {
        const double lo = n * std::numbers::pi, hi = (n + 1) * std::numbers::pi;
        if (n >= 1) {
            z.b[n] = leading_b(omega, q1, n);
            z.seed[n] = leading_seed(omega, q1, n);
            if (auto p = detail::polish_g1(omega, q1, z.seed[n], 0.25 * std::numbers::pi);
                p && p->real() > lo && p->real() < hi && p->imag() > 0.0) {
                z.mu[n] = *p;
                z.polished[n] = true;
                continue;
            }
        }
        const std::vector<cplx> found = detail::g1_box_zeros(omega, q1, n);
        z.from_box[n] = true;
        if (found.empty()) {
            z.mu[n] = z.seed[n];
            continue;
        }
        // several zeros can share a slot for small n; prefer the seed's neighbour,
        // else the one deepest in the upper half plane
        auto best = found.front();
        for (cplx c : found) {
            const bool better = n >= 1 ? std::abs(c - z.seed[n]) < std::abs(best - z.seed[n])
                                       : (c.imag() > best.imag() || (c.imag() == best.imag() && c.real() > best.real()));
            if (better) best = c;
        }
        if (n == 0) z.seed[0] = best;
        z.mu[n] = best;
        z.polished[n] = detail::polished_ok(omega, q1, best);
    }
    return z;
}

inline LeadingZeros leading_zeros(const PotentialScalars& s, int n_max)
{
    return leading_zeros(s.omega, s.q_at_1, n_max);
}

struct DegenerateZeros {
    cplx plus;              // the candidate with nonnegative real / imaginary part
    cplx minus;
    bool imaginary = false;
    bool genuine = false;   // satisfies g1 = g1' = 0
};

/// Candidate double zeros of g1 from the real-axis / imaginary-axis formulas.
inline std::optional<DegenerateZeros> g1_degenerate_zeros(double omega, double q1)
{
    if (is_zero(omega) || is_zero(q1)) throw PreconditionError("g1_degenerate_zeros: needs omega != 0 and q(1) != 0");
    const double r = omega / q1;
    DegenerateZeros d;
    if (std::abs(r) < 1.0) {
        const double m = 0.5 * std::sqrt(q1 * q1 / (omega * omega) - 1.0);
        d.plus = m;
        d.minus = -m;
    } else if (r < -1.0) {
        const double m = 0.5 * std::sqrt(1.0 - q1 * q1 / (omega * omega));
        d.plus = cplx{0.0, m};
        d.minus = cplx{0.0, -m};
        d.imaginary = true;
    } else if (r == -1.0) {
        d.plus = d.minus = 0.0;
    } else {
        return std::nullopt;
    }
    const cplx mu = d.plus;
    const double scale = std::abs(q1) + std::abs(omega) * std::max(1.0, std::abs(mu));
    const double c = std::abs(std::cos(2.0 * mu) + omega / q1);
    const double s = std::abs(std::sin(2.0 * mu) + 2.0 * omega * mu / q1);
    d.genuine = c < 1e-9 && s < 1e-9 * scale / std::abs(q1);
    return d;
}

// ---------------------------------------------------------------------------
// eigenvalue predictions

enum class TheoremTag { T41i_W21, T41i_W22, T41ii_W21, T41ii_W22, T42i, T42ii, Dirichlet_i, Dirichlet_ii };

inline constexpr std::array<std::pair<TheoremTag, std::string_view>, 8> theorem_tag_names{{
    {TheoremTag::T41i_W21, "T41i_W21"},
    {TheoremTag::T41i_W22, "T41i_W22"},
    {TheoremTag::T41ii_W21, "T41ii_W21"},
    {TheoremTag::T41ii_W22, "T41ii_W22"},
    {TheoremTag::T42i, "T42i"},
    {TheoremTag::T42ii, "T42ii"},
    {TheoremTag::Dirichlet_i, "Dirichlet_i"},
    {TheoremTag::Dirichlet_ii, "Dirichlet_ii"},
}};

inline std::string to_string(TheoremTag t)
{
    for (const auto& [tag, name] : theorem_tag_names)
        if (tag == t) return std::string(name);
    return "?";
}

inline TheoremTag parse_theorem_tag(std::string_view s)
{
    for (const auto& [tag, name] : theorem_tag_names)
        if (name == s) return tag;
    throw PreconditionError("unknown theorem tag: " + std::string(s));
}

inline Variant variant_of(TheoremTag t)
{
    return (t == TheoremTag::Dirichlet_i || t == TheoremTag::Dirichlet_ii) ? Variant::dirichlet : Variant::robin;
}

/// True for tags whose prediction includes the second-order correction.
inline bool refined_tag(TheoremTag t)
{
    return t == TheoremTag::T41i_W22 || t == TheoremTag::T41ii_W22 || t == TheoremTag::Dirichlet_i ||
           t == TheoremTag::Dirichlet_ii;
}

struct PredictedRoot {
    int n = 0;
    int branch = 0;   // +1 / -1 for the two T42ii families, 0 otherwise
    cplx leading;     // mu_n, n pi/2, mu_n^1 or n pi + s
    cplx refined;     // leading plus the 1/n correction where the theorem gives one

    cplx value(TheoremTag t) const { return refined_tag(t) ? refined : leading; }
};

struct AsymptoticPrediction {
    TheoremTag tag = TheoremTag::T41i_W21;
    QConstants q;
    std::vector<PredictedRoot> roots;
    std::optional<cplx> s_plus, s_minus;
    bool log_branch = false;
    bool degenerate = false;   // |Q2/q'(1)| = 1
    std::vector<bool> polished;  // per root: leading value is a polished g1 zero
};

/// Tag compatible with the scalars (Robin tags prefer the refined variant).
inline TheoremTag default_tag(const PotentialScalars& s, Variant v)
{
    const bool w0 = is_zero(s.omega), q0 = is_zero(s.q_at_1);
    if (v == Variant::dirichlet) {
        if (q0) throw PreconditionError("no Dirichlet asymptotics for q(1) = 0");
        return w0 ? TheoremTag::Dirichlet_ii : TheoremTag::Dirichlet_i;
    }
    if (!q0) return w0 ? TheoremTag::T41ii_W22 : TheoremTag::T41i_W22;
    if (is_zero(s.dq_at_1)) throw PreconditionError("no asymptotics: q(1) = q'(1) = 0");
    return w0 ? TheoremTag::T42ii : TheoremTag::T42i;
}

inline void check_hypotheses(const PotentialScalars& s, TheoremTag t)
{
    const bool w0 = is_zero(s.omega), q0 = is_zero(s.q_at_1), d0 = is_zero(s.dq_at_1);
    auto fail = [&](const char* why) {
        throw PreconditionError("hypotheses of " + to_string(t) + " not met: " + why);
    };
    switch (t) {
    case TheoremTag::T41i_W21:
    case TheoremTag::T41i_W22:
    case TheoremTag::Dirichlet_i:
        if (q0) fail("q(1) = 0");
        if (w0) fail("omega = 0");
        break;
    case TheoremTag::T41ii_W21:
    case TheoremTag::T41ii_W22:
    case TheoremTag::Dirichlet_ii:
        if (q0) fail("q(1) = 0");
        if (!w0) fail("omega != 0");
        break;
    case TheoremTag::T42i:
    case TheoremTag::T42ii:
        if (!q0) fail("q(1) != 0");
        if (d0) fail("q'(1) = 0");
        if (t == TheoremTag::T42i && w0) fail("omega = 0");
        if (t == TheoremTag::T42ii && !w0) fail("omega != 0");
        break;
    }
}

/// Predicted sqrt-eigenvalues for n = n_lo..n_hi (n_lo >= 0; indices where a
/// formula is undefined, e.g. the 1/n terms at n = 0, use the leading value only).
inline AsymptoticPrediction predict_eigenvalues(const PotentialScalars& s, double h, TheoremTag tag, int n_lo,
                                                int n_hi)
{
    check_hypotheses(s, tag);
    if (n_lo < 0 || n_hi < n_lo) throw PreconditionError("predict_eigenvalues: bad n range");
    const double pi = std::numbers::pi;
    AsymptoticPrediction p;
    p.tag = tag;
    p.q = q_constants(s, h);
    const double w = s.omega, q1 = s.q_at_1, dq1 = s.dq_at_1;

    auto push = [&](int n, int branch, cplx lead, cplx ref, bool pol) {
        p.roots.push_back({n, branch, lead, ref});
        p.polished.push_back(pol);
    };

    switch (tag) {
    case TheoremTag::T41i_W21:
    case TheoremTag::T41i_W22:
    case TheoremTag::Dirichlet_i: {
        const bool dir = tag == TheoremTag::Dirichlet_i;
        // the Dirichlet leading function is g1 with q(1) -> -q(1)
        const LeadingZeros lz = leading_zeros(w, dir ? -q1 : q1, n_hi);
        for (int n = n_lo; n <= n_hi; ++n) {
            const cplx mu = lz.mu[n];
            cplx ref = mu;
            if (n > 0) ref += (dir ? p.q.q3 : -p.q.q1) / (4.0 * n * pi * q1);
            push(n, 0, mu, ref, lz.polished[n]);
        }
        break;
    }
    case TheoremTag::T41ii_W21:
    case TheoremTag::T41ii_W22:
        for (int n = std::max(n_lo, 1); n <= n_hi; ++n) {
            const double sgn = n % 2 == 0 ? 1.0 : -1.0;
            const double lead = n * pi / 2.0;
            push(n, 0, lead, lead - (p.q.q1 + sgn * p.q.q2) / (2.0 * q1 * n * pi), true);
        }
        break;
    case TheoremTag::Dirichlet_ii:
        for (int n = std::max(n_lo, 1); n <= n_hi; ++n) {
            const double sgn = n % 2 == 0 ? 1.0 : -1.0;
            const double lead = (n + 1) * pi / 2.0;
            push(n, 0, lead, lead + (p.q.q3 + sgn * p.q.q4) / (2.0 * q1 * n * pi), true);
        }
        break;
    case TheoremTag::T42i: {
        const double r = dq1 / (2.0 * w);
        for (int n = std::max(n_lo, 1); n <= n_hi; ++n) {
            const cplx mu = r < 0.0 ? cplx{n * pi, std::log(2.0 * n * pi) - 0.5 * std::log(-r)}
                                    : cplx{(n + 0.5) * pi, std::log(2.0 * n * pi) - 0.5 * std::log(r)};
            push(n, 0, mu, mu, false);
        }
        break;
    }
    case TheoremTag::T42ii: {
        const double r = p.q.q2 / dq1;
        cplx sp, sm;
        if (std::abs(std::abs(r) - 1.0) <= 1e-14) {
            p.degenerate = true;
            sp = 0.5 * std::acos(std::clamp(-r, -1.0, 1.0));
            sm = -sp;
        } else if (std::abs(r) < 1.0) {
            sp = 0.5 * std::acos(-r);
            sm = -sp;
        } else {
            p.log_branch = true;
            const double root = std::sqrt(r * r - 1.0);
            sp = -0.5 * I * principal_log(cplx{-r + root});
            sm = -0.5 * I * principal_log(cplx{-r - root});
        }
        p.s_plus = sp;
        p.s_minus = sm;
        for (int n = std::max(n_lo, 1); n <= n_hi; ++n) {
            push(n, +1, n * pi + sp, n * pi + sp, true);
            push(n, -1, n * pi + sm, n * pi + sm, true);
        }
        break;
    }
    }
    return p;
}

// ---------------------------------------------------------------------------
// indexing

struct IndexedSpectrum {
    std::vector<Eigenvalue> indexed;     // sorted by index, then |k|
    std::vector<Eigenvalue> unmatched;   // no prediction slot within reach
    std::vector<std::string> conflicts;  // two zeros competing for one slot
};

/// Assigns each canonical zero the index n of the nearest predicted leading
/// value. A zero is accepted when it lies within 0.45 of the distance from that
/// slot to its nearest neighbouring slot.
inline IndexedSpectrum index_eigenvalues(const std::vector<Eigenvalue>& zeros, const AsymptoticPrediction& pred)
{
    IndexedSpectrum out;
    const auto& slots = pred.roots;
    std::vector<double> reach(slots.size(), std::numeric_limits<double>::infinity());
    std::vector<cplx> where(slots.size());
    for (std::size_t i = 0; i < slots.size(); ++i) where[i] = representative(slots[i].leading);
    for (std::size_t i = 0; i < slots.size(); ++i)
        for (std::size_t j = 0; j < slots.size(); ++j)
            if (i != j) reach[i] = std::min(reach[i], 0.45 * std::abs(where[i] - where[j]));

    std::vector<int> owner(slots.size(), -1);
    std::vector<Eigenvalue> canon = canonical_zeros(zeros);
    for (std::size_t z = 0; z < canon.size(); ++z) {
        std::size_t best = slots.size();
        double dbest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const double d = std::abs(canon[z].k - where[i]);
            if (d < dbest) {
                dbest = d;
                best = i;
            }
        }
        if (best == slots.size() || dbest > reach[best]) {
            out.unmatched.push_back(canon[z]);
            continue;
        }
        if (owner[best] >= 0) {
            const auto prev = static_cast<std::size_t>(owner[best]);
            out.conflicts.push_back("index " + std::to_string(slots[best].n) + ": zeros at |k| = " +
                                    std::to_string(std::abs(canon[prev].k)) + " and " +
                                    std::to_string(std::abs(canon[z].k)));
            if (dbest < std::abs(canon[prev].k - where[best])) {
                out.unmatched.push_back(canon[prev]);
                owner[best] = static_cast<int>(z);
            } else {
                out.unmatched.push_back(canon[z]);
            }
            continue;
        }
        owner[best] = static_cast<int>(z);
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (owner[i] < 0) continue;
        Eigenvalue e = canon[static_cast<std::size_t>(owner[i])];
        e.index = slots[i].n;
        out.indexed.push_back(e);
    }
    std::stable_sort(out.indexed.begin(), out.indexed.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.index != b.index) return a.index < b.index;
        return std::abs(a.k) < std::abs(b.k);
    });
    return out;
}

// ---------------------------------------------------------------------------
// residuals

struct ResidualRow {
    int n = 0;
    int branch = 0;
    cplx computed;
    cplx leading;
    cplx refined;
    cplx eps;             // computed - leading
    cplx next_order;      // n (computed - refined)
};

struct ResidualReport {
    TheoremTag tag = TheoremTag::T41i_W21;
    std::vector<ResidualRow> rows;
    int window = 5;
    std::vector<double> window_sums;   // sums of |eps|^2 over consecutive windows of n
    bool tail_decreasing = false;      // window sums strictly decreasing
    double loglog_slope = std::numeric_limits<double>::quiet_NaN();
    double max_next_order = 0.0;
};

/// Joins indexed zeros with the prediction over n in [n_lo, n_hi].
inline ResidualReport residual_report(const std::vector<Eigenvalue>& indexed, const AsymptoticPrediction& pred,
                                      int n_lo, int n_hi, int window = 5)
{
    if (window < 1) throw PreconditionError("residual_report: window < 1");
    ResidualReport rep;
    rep.tag = pred.tag;
    rep.window = window;
    for (const Eigenvalue& e : indexed) {
        if (e.index < n_lo || e.index > n_hi) continue;
        const cplx k = representative(e.k);
        const PredictedRoot* match = nullptr;
        double d = std::numeric_limits<double>::infinity();
        for (const PredictedRoot& r : pred.roots) {
            if (r.n != e.index) continue;
            const double dd = std::abs(k - representative(r.leading));
            if (dd < d) {
                d = dd;
                match = &r;
            }
        }
        if (!match) throw ValidationError("residual_report: index " + std::to_string(e.index) + " has no prediction");
        ResidualRow row;
        row.n = e.index;
        row.branch = match->branch;
        row.computed = k;
        row.leading = representative(match->leading);
        row.refined = representative(match->refined);
        row.eps = k - row.leading;
        row.next_order = static_cast<double>(e.index) * (k - row.refined);
        rep.rows.push_back(row);
    }
    if (rep.rows.empty()) throw ValidationError("residual_report: no indexed zeros in the requested range");
    std::sort(rep.rows.begin(), rep.rows.end(), [](const ResidualRow& a, const ResidualRow& b) {
        return a.n != b.n ? a.n < b.n : a.branch > b.branch;
    });

    for (const ResidualRow& r : rep.rows) rep.max_next_order = std::max(rep.max_next_order, std::abs(r.next_order));

    for (int a = n_lo; a + window - 1 <= n_hi; a += window) {
        double sum = 0.0;
        for (const ResidualRow& r : rep.rows)
            if (r.n >= a && r.n < a + window) sum += std::norm(r.eps);
        rep.window_sums.push_back(sum);
    }
    rep.tail_decreasing = rep.window_sums.size() >= 2;
    for (std::size_t i = 1; i < rep.window_sums.size(); ++i)
        if (!(rep.window_sums[i] < rep.window_sums[i - 1])) rep.tail_decreasing = false;

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const ResidualRow& r : rep.rows) {
        const double a = std::abs(r.eps);
        if (r.n <= 0 || !(a > 0.0)) continue;
        const double x = std::log(static_cast<double>(r.n)), y = std::log(a);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m >= 2) {
        const double den = m * sxx - sx * sx;
        if (den > 0.0) rep.loglog_slope = (m * sxy - sx * sy) / den;
    }
    return rep;
}

} // namespace tspec
