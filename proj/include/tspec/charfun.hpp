#pragma once

#include "tspec/errors.hpp"
#include "tspec/jost.hpp"
#include "tspec/potential.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace tspec {

/// Boundary condition at x = 0. Robin uses the h stored on the Potential.
enum class Variant { robin, dirichlet };

inline const char* to_string(Variant v) { return v == Variant::robin ? "robin" : "dirichlet"; }

struct FValue {
    cplx k;
    cplx value;  // F(k) = -i [f'(k,0) - h f(k,0)]
};

struct CharFunSample {
    cplx k;
    cplx value;
    Variant variant = Variant::robin;
};

struct CharFunOptions {
    JostOptions jost{};
    double k_small = 1e-3;
};

inline FValue eval_F(const Potential& p, cplx k, const JostOptions& opt = {})
{
    const JostValue j = jost_at_zero(p, k, opt);
    return FValue{k, -I * (j.fprime - p.h() * j.f)};
}

namespace detail {

// f(k,0), f'(k,0), f(-k,0), f'(-k,0). For real k the second pair is the conjugate of the first.
inline std::array<JostValue, 2> jost_pair(const Potential& p, cplx k, const JostOptions& opt)
{
    const JostValue plus = jost_at_zero(p, k, opt);
    if (k.imag() == 0.0) return {plus, JostValue{-k, std::conj(plus.f), std::conj(plus.fprime)}};
    return {plus, jost_at_zero(p, -k, opt)};
}

// Even part and odd-part-over-k of the boundary quantity g(k) (F for Robin, f(.,0) for Dirichlet).
struct SplitParts {
    cplx even;        // g(k) + g(-k)
    cplx odd_over_k;  // (g(k) - g(-k)) / k
};

inline SplitParts split_parts(const Potential& p, cplx k, Variant v, const JostOptions& opt)
{
    const auto jp = jost_pair(p, k, opt);
    cplx gp, gm;
    if (v == Variant::robin) {
        gp = -I * (jp[0].fprime - p.h() * jp[0].f);
        gm = -I * (jp[1].fprime - p.h() * jp[1].f);
    } else {
        gp = jp[0].f;
        gm = jp[1].f;
    }
    return {gp + gm, (gp - gm) / k};
}

} // namespace detail

/// Characteristic function whose zeros are the square roots of the transmission eigenvalues.
///
/// Robin:     D(k) = [F(k) + F(-k)] / 2i - h [F(k) - F(-k)] / 2k
/// Dirichlet: D(k) = [f(k,0) - f(-k,0)] / 2ik
///
/// Below |k| = k_small the (g(k) - g(-k))/k term is interpolated in |k|^2 from the
/// ray points {4, 2, 1.5, 1} k_small, which removes the 0/0 at the origin.
inline CharFunSample eval_D(const Potential& p, cplx k, Variant v, const CharFunOptions& opt = {})
{
    const double r = std::abs(k);
    detail::SplitParts parts;
    if (r >= opt.k_small) {
        parts = detail::split_parts(p, k, v, opt.jost);
    } else {
        const cplx dir = r > 0.0 ? k / r : cplx{1.0, 0.0};
        constexpr std::array<double, 4> scale{4.0, 2.0, 1.5, 1.0};
        std::array<double, 4> xs{};
        std::array<cplx, 4> ys{};
        for (std::size_t i = 0; i < 4; ++i) {
            const double ri = scale[i] * opt.k_small;
            xs[i] = ri * ri;
            ys[i] = detail::split_parts(p, ri * dir, v, opt.jost).odd_over_k;
        }
        // Neville evaluation of the cubic in r^2 at r^2 = |k|^2.
        const double x = r * r;
        for (std::size_t m = 1; m < 4; ++m)
            for (std::size_t i = 0; i + m < 4; ++i)
                ys[i] = ((x - xs[i + m]) * ys[i] + (xs[i] - x) * ys[i + 1]) / (xs[i] - xs[i + m]);
        parts.odd_over_k = ys[0];
        if (r > 0.0) {
            parts.even = detail::split_parts(p, k, v, opt.jost).even;
        } else {
            const JostValue j0 = jost_at_zero(p, 0.0, opt.jost);
            parts.even = v == Variant::robin ? 2.0 * (-I) * (j0.fprime - p.h() * j0.f) : 2.0 * j0.f;
        }
    }
    cplx d;
    if (v == Variant::robin)
        d = parts.even / (2.0 * I) - p.h() * parts.odd_over_k / 2.0;
    else
        d = parts.odd_over_k / (2.0 * I);
    return CharFunSample{k, d, v};
}

/// k -> D(k) as a plain callable, the form consumed by the root finder.
using Evaluator = std::function<cplx(cplx)>;

inline Evaluator make_evaluator(Potential p, Variant v, CharFunOptions opt = {})
{
    return [p = std::move(p), v, opt](cplx k) { return eval_D(p, k, v, opt).value; };
}

/// Axis-aligned rectangle [s0, s1] x [t0, t1] in the k-plane (s = Re k, t = Im k).
struct Rect {
    double s0 = 0.0, s1 = 0.0, t0 = 0.0, t1 = 0.0;

    double width() const noexcept { return s1 - s0; }
    double height() const noexcept { return t1 - t0; }
    bool contains(cplx z, double margin = 0.0) const noexcept
    {
        return z.real() >= s0 - margin && z.real() <= s1 + margin && z.imag() >= t0 - margin &&
               z.imag() <= t1 + margin;
    }
};

struct GridSample {
    cplx k;
    std::optional<cplx> value;  // empty when evaluation failed
    std::string error;
};

/// D on an n x m grid covering `region` (corners included), row-major in Im k.
/// Failures are recorded per point. Work is spread over `threads` workers.
inline std::vector<GridSample> sample_D_grid(const Potential& p, Variant v, const Rect& region, std::size_t n,
                                             std::size_t m, const CharFunOptions& opt = {}, unsigned threads = 1)
{
    if (n == 0 || m == 0) return {};
    std::vector<GridSample> out(n * m);
    for (std::size_t b = 0; b < m; ++b)
        for (std::size_t a = 0; a < n; ++a) {
            const double s = n == 1 ? region.s0 : region.s0 + region.width() * static_cast<double>(a) / (n - 1.0);
            const double t = m == 1 ? region.t0 : region.t0 + region.height() * static_cast<double>(b) / (m - 1.0);
            out[b * n + a].k = cplx{s, t};
        }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < out.size(); i = next++) {
            try {
                out[i].value = eval_D(p, out[i].k, v, opt).value;
            } catch (const Error& e) {
                out[i].error = e.what();
            }
        }
    };
    threads = std::max(1u, threads);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

} // namespace tspec
