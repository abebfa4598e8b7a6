#pragma once

#include "tspec/charfun.hpp"
#include "tspec/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tspec {

/// A zero sits on (or numerically at) the contour.
class BoundaryTooClose : public Error {
public:
    using Error::Error;
};

/// Boundary phase could not be resolved within the sample budget.
class PhaseResolutionError : public Error {
public:
    using Error::Error;
};

struct ContourBox {
    Rect rect;
    int winding = 0;                  // zeros inside, counted with multiplicity
    std::size_t boundary_samples = 0;
    double min_boundary_modulus = 0.0;
    double rounding_error = 0.0;      // |phase / 2 pi - winding|
    cplx first_moment{0.0};           // (1 / 2 pi i) contour integral of z D'/D, i.e. the sum of the zeros
};

struct WindingOptions {
    double max_jump = std::numbers::pi / 2;  // largest phase step accepted between neighbours
    std::size_t max_points = std::size_t{1} << 14;
    double base_spacing = 0.25;              // coarsest lattice spacing along an edge
    std::size_t min_per_edge = 8;
    double rounding_gap = 0.25;
    int max_perturbations = 3;
    double perturbation = 1e-4;              // relative to the box size
};

/// Memoises an evaluator on exact coordinates; shared contour edges are sampled once.
class CachedEvaluator {
public:
    explicit CachedEvaluator(const Evaluator& f) : f_(&f) {}

    cplx operator()(cplx z)
    {
        const Key key{std::bit_cast<std::uint64_t>(z.real()), std::bit_cast<std::uint64_t>(z.imag())};
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        const cplx v = (*f_)(z);
        ++evaluations_;
        cache_.emplace(key, v);
        return v;
    }

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    struct Key {
        std::uint64_t re, im;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept { return std::hash<std::uint64_t>{}(k.re * 0x9E3779B97F4A7C15ULL ^ k.im); }
    };
    const Evaluator* f_;
    std::unordered_map<Key, cplx, KeyHash> cache_;
    std::size_t evaluations_ = 0;
};

namespace detail {

struct EdgeAccumulator {
    double phase = 0.0;
    cplx moment{0.0};
    std::size_t samples = 0;
    double min_modulus = std::numeric_limits<double>::infinity();
};

inline void check_value(cplx v, cplx z)
{
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw BoundaryTooClose("non-finite value on contour at k=(" + std::to_string(z.real()) + "," +
                               std::to_string(z.imag()) + ")");
    if (v == cplx{0.0}) throw BoundaryTooClose("exact zero on contour");
}

template <class Eval>
void refine_segment(Eval& f, cplx z0, cplx v0, cplx z1, cplx v1, const WindingOptions& opt, EdgeAccumulator& acc)
{
    const cplx ratio = v1 / v0;
    const double jump = std::arg(ratio);
    if (std::abs(jump) <= opt.max_jump) {
        acc.phase += jump;
        acc.moment += 0.5 * (z0 + z1) * std::log(ratio);
        return;
    }
    if (std::abs(z1 - z0) < 1e-11 * (1.0 + std::abs(z0)))
        throw BoundaryTooClose("phase jump unresolved at segment length " + std::to_string(std::abs(z1 - z0)));
    if (++acc.samples > opt.max_points) throw PhaseResolutionError("boundary sample budget exhausted");
    const cplx zm = 0.5 * (z0 + z1);
    const cplx vm = f(zm);
    check_value(vm, zm);
    acc.min_modulus = std::min(acc.min_modulus, std::abs(vm));
    refine_segment(f, z0, v0, zm, vm, opt, acc);
    refine_segment(f, zm, vm, z1, v1, opt, acc);
}

// Edge from a to b along one axis; interior samples sit on a dyadic lattice so that
// neighbouring boxes reuse each other's evaluations.
template <class Eval>
void walk_edge(Eval& f, cplx a, cplx b, const WindingOptions& opt, EdgeAccumulator& acc)
{
    const bool horizontal = a.imag() == b.imag();
    const double ca = horizontal ? a.real() : a.imag();
    const double cb = horizontal ? b.real() : b.imag();
    const double len = std::abs(cb - ca);
    double spacing = opt.base_spacing;
    while (spacing > 1e-12 && len / spacing < static_cast<double>(opt.min_per_edge)) spacing *= 0.5;
    auto point = [&](double c) { return horizontal ? cplx{c, a.imag()} : cplx{a.real(), c}; };

    std::vector<double> coords{ca};
    const double lo = std::min(ca, cb), hi = std::max(ca, cb);
    const auto first = static_cast<long long>(std::floor(lo / spacing)) + 1;
    const auto last = static_cast<long long>(std::ceil(hi / spacing)) - 1;
    std::vector<double> inner;
    for (long long j = first; j <= last; ++j) inner.push_back(static_cast<double>(j) * spacing);
    if (cb < ca) std::reverse(inner.begin(), inner.end());
    coords.insert(coords.end(), inner.begin(), inner.end());
    coords.push_back(cb);

    cplx zp = point(coords[0]);
    cplx vp = f(zp);
    check_value(vp, zp);
    acc.min_modulus = std::min(acc.min_modulus, std::abs(vp));
    acc.samples += coords.size();
    if (acc.samples > opt.max_points) throw PhaseResolutionError("boundary sample budget exhausted");
    for (std::size_t i = 1; i < coords.size(); ++i) {
        const cplx z = point(coords[i]);
        const cplx v = f(z);
        check_value(v, z);
        acc.min_modulus = std::min(acc.min_modulus, std::abs(v));
        refine_segment(f, zp, vp, z, v, opt, acc);
        zp = z;
        vp = v;
    }
}

template <class Eval>
ContourBox count_once(Eval& f, const Rect& r, const WindingOptions& opt)
{
    EdgeAccumulator acc;
    const cplx c00{r.s0, r.t0}, c10{r.s1, r.t0}, c11{r.s1, r.t1}, c01{r.s0, r.t1};
    walk_edge(f, c00, c10, opt, acc);
    walk_edge(f, c10, c11, opt, acc);
    walk_edge(f, c11, c01, opt, acc);
    walk_edge(f, c01, c00, opt, acc);
    const double turns = acc.phase / (2.0 * std::numbers::pi);
    ContourBox box;
    box.rect = r;
    box.winding = static_cast<int>(std::lround(turns));
    box.rounding_error = std::abs(turns - box.winding);
    box.boundary_samples = acc.samples;
    box.min_boundary_modulus = acc.min_modulus;
    box.first_moment = acc.moment / (2.0 * std::numbers::pi * I);
    if (box.rounding_error >= opt.rounding_gap)
        throw PhaseResolutionError("winding number not near an integer: " + std::to_string(turns));
    return box;
}

inline Rect perturbed(const Rect& r, int attempt, double rel)
{
    const double size = std::max(r.width(), r.height());
    static constexpr std::array<std::array<double, 4>, 3> factors{
        {{1.0, 0.7, 1.3, 0.9}, {-1.1, -0.8, -1.2, -0.6}, {2.3, 1.7, 2.9, 1.9}}};
    const auto& fa = factors[static_cast<std::size_t>(attempt - 1) % 3];
    const double d = rel * size;
    return Rect{r.s0 - fa[0] * d, r.s1 + fa[1] * d, r.t0 - fa[2] * d, r.t1 + fa[3] * d};
}

} // namespace detail

/// Number of zeros of f inside `box` (with multiplicity) from the boundary phase
/// variation. If the boundary passes through or too near a zero the edges are
/// nudged by `perturbation` times the box size, at most `max_perturbations` times;
/// the returned box carries the rectangle actually used.
template <class Eval>
ContourBox winding_count(Eval& f, const Rect& box, const WindingOptions& opt = {})
{
    if (!(box.width() > 0.0 && box.height() > 0.0)) throw PreconditionError("contour box must have positive size");
    for (int attempt = 0;; ++attempt) {
        const Rect r = attempt == 0 ? box : detail::perturbed(box, attempt, opt.perturbation);
        try {
            return detail::count_once(f, r, opt);
        } catch (const BoundaryTooClose&) {
            if (attempt >= opt.max_perturbations) throw;
        } catch (const PhaseResolutionError&) {
            if (attempt >= opt.max_perturbations) throw;
        }
    }
}

inline ContourBox winding_count(const Evaluator& f, const Rect& box, const WindingOptions& opt = {})
{
    CachedEvaluator cached(f);
    return winding_count(cached, box, opt);
}

struct NewtonOptions {
    double tol = 1e-12;        // on |step| / max(1, |k|)
    int max_iter = 50;
    double diff_step = 1e-6;   // relative central-difference step
};

struct NewtonResult {
    cplx k;
    bool converged = false;
    int iterations = 0;
    double derivative_gap = 0.0;  // disagreement of the two directional differences, relative
};

/// Derivative of an analytic function from central differences along the real and
/// imaginary directions, averaged. Also reports their relative disagreement.
inline std::pair<cplx, double> analytic_derivative(const Evaluator& f, cplx k, double rel_step)
{
    const double h = rel_step * std::max(1.0, std::abs(k));
    const cplx dx = (f(k + h) - f(k - h)) / (2.0 * h);
    const cplx dy = (f(k + I * h) - f(k - I * h)) / (2.0 * I * h);
    const cplx d = 0.5 * (dx + dy);
    return {d, std::abs(dx - dy) / std::max(std::abs(d), 1e-300)};
}

inline NewtonResult newton_refine(const Evaluator& f, cplx seed, const NewtonOptions& opt = {},
                                  double max_step = std::numeric_limits<double>::infinity())
{
    NewtonResult r{seed};
    for (int it = 1; it <= opt.max_iter; ++it) {
        r.iterations = it;
        const cplx v = f(r.k);
        if (v == cplx{0.0}) {
            r.converged = true;
            return r;
        }
        const auto [d, gap] = analytic_derivative(f, r.k, opt.diff_step);
        r.derivative_gap = gap;
        if (d == cplx{0.0} || !std::isfinite(std::abs(d))) return r;
        cplx step = v / d;
        if (std::abs(step) > max_step) step *= max_step / std::abs(step);
        r.k -= step;
        if (!std::isfinite(r.k.real()) || !std::isfinite(r.k.imag())) return r;
        if (std::abs(step) < opt.tol * std::max(1.0, std::abs(r.k))) {
            r.converged = true;
            return r;
        }
    }
    return r;
}

/// Largest |f| on a circle of radius `radius` around k (8 points).
inline double local_scale(const Evaluator& f, cplx k, double radius)
{
    double m = 0.0;
    for (int j = 0; j < 8; ++j) m = std::max(m, std::abs(f(k + std::polar(radius, j * std::numbers::pi / 4))));
    return m;
}

enum class ZeroClass { real, imaginary, quadrant };

inline const char* to_string(ZeroClass c)
{
    switch (c) {
    case ZeroClass::real: return "real";
    case ZeroClass::imaginary: return "imaginary";
    case ZeroClass::quadrant: return "quadrant";
    }
    return "?";
}

inline ZeroClass classify(cplx k, double tol = 1e-9)
{
    const double s = tol * std::max(1.0, std::abs(k));
    if (std::abs(k.imag()) <= s) return ZeroClass::real;
    if (std::abs(k.real()) <= s) return ZeroClass::imaginary;
    return ZeroClass::quadrant;
}

/// A located zero of D, i.e. k_n with lambda_n = k_n^2.
struct Eigenvalue {
    cplx k;
    cplx lambda;
    int index = -1;         // -1 until index_eigenvalues assigns one
    int multiplicity = 1;
    double residual = 0.0;  // |D(k)|
    double scale = 0.0;     // max |D| on the surrounding circle used for the residual test
    ZeroClass cls = ZeroClass::quadrant;
    bool cluster = false;   // unresolved multiple zero / cluster, k is only a location estimate
};

struct FindOptions {
    WindingOptions winding{};
    NewtonOptions newton{};
    int max_depth = 30;
    double min_box = 1e-5;            // terminal box size
    double residual_radius = 1e-2;    // circle radius for the local scale
};

struct ZeroSearch {
    Rect region;                          // rectangle actually enclosed (after any perturbation)
    int total_winding = 0;
    std::vector<Eigenvalue> zeros;        // resolved simple zeros and terminal clusters
    std::vector<ContourBox> unresolved;   // terminal boxes with winding > 1
    std::size_t coarse_evaluations = 0;

    bool complete() const noexcept { return unresolved.empty(); }
};

namespace detail {

inline std::vector<Rect> split_rect(const Rect& r, double ratio)
{
    const double sm = r.s0 + ratio * r.width();
    const double tm = r.t0 + (1.0 - ratio) * r.height();
    if (r.width() > 2.0 * r.height()) return {{r.s0, sm, r.t0, r.t1}, {sm, r.s1, r.t0, r.t1}};
    if (r.height() > 2.0 * r.width()) return {{r.s0, r.s1, r.t0, tm}, {r.s0, r.s1, tm, r.t1}};
    return {{r.s0, sm, r.t0, tm}, {sm, r.s1, r.t0, tm}, {r.s0, sm, tm, r.t1}, {sm, r.s1, tm, r.t1}};
}

} // namespace detail

/// Split into four quadrants at the given fractional position.
inline std::array<Rect, 4> quarter(const Rect& r, double fs = 0.5, double ft = 0.5)
{
    const double sm = r.s0 + fs * r.width(), tm = r.t0 + ft * r.height();
    return {Rect{r.s0, sm, r.t0, tm}, Rect{sm, r.s1, r.t0, tm}, Rect{r.s0, sm, tm, r.t1}, Rect{sm, r.s1, tm, r.t1}};
}

/// All zeros of f inside `region`.
///
/// Boxes are subdivided until each encloses at most one zero; single-zero boxes
/// are polished by Newton iteration using `fine` (seeded from the contour's first
/// moment). Terminal boxes still holding several zeros are reported as clusters.
/// `coarse` is only used for contour phases and may be a cheaper evaluation of f.
inline ZeroSearch find_zeros(const Evaluator& fine, const Evaluator& coarse, const Rect& region,
                             const FindOptions& opt = {})
{
    CachedEvaluator cf(coarse);
    ZeroSearch out;
    const ContourBox root = winding_count(cf, region, opt.winding);
    out.region = root.rect;
    out.total_winding = root.winding;

    struct Item {
        ContourBox box;
        int depth;
    };
    std::vector<Item> stack{{root, 0}};
    constexpr std::array<double, 5> ratios{0.5137, 0.4771, 0.5419, 0.4523, 0.5631};

    auto record = [&](cplx k, int mult, bool cluster) {
        Eigenvalue e;
        e.k = k;
        e.lambda = k * k;
        e.multiplicity = mult;
        e.cluster = cluster;
        e.residual = std::abs(fine(k));
        e.scale = local_scale(fine, k, opt.residual_radius);
        e.cls = classify(k);
        out.zeros.push_back(e);
    };

    while (!stack.empty()) {
        const Item item = stack.back();
        stack.pop_back();
        const ContourBox& box = item.box;
        if (box.winding <= 0) continue;
        const Rect& r = box.rect;
        const double size = std::max(r.width(), r.height());

        if (box.winding == 1) {
            const cplx seed = r.contains(box.first_moment) ? box.first_moment
                                                           : cplx{0.5 * (r.s0 + r.s1), 0.5 * (r.t0 + r.t1)};
            const NewtonResult nr = newton_refine(fine, seed, opt.newton, 0.5 * size);
            if (nr.converged && r.contains(nr.k, 1e-9 * size)) {
                record(nr.k, 1, false);
                continue;
            }
        }
        const bool terminal = item.depth >= opt.max_depth || size <= opt.min_box;
        if (terminal) {
            const NewtonResult nr = newton_refine(fine, box.first_moment / static_cast<double>(box.winding),
                                                  opt.newton, 0.5 * size);
            const cplx where = r.contains(nr.k, size) ? nr.k : box.first_moment / static_cast<double>(box.winding);
            record(where, box.winding, box.winding > 1 || !nr.converged);
            if (box.winding > 1) out.unresolved.push_back(box);
            continue;
        }

        bool split_ok = false;
        for (double ratio : ratios) {
            std::vector<ContourBox> kids;
            try {
                int sum = 0;
                for (const Rect& c : detail::split_rect(r, ratio)) {
                    kids.push_back(detail::count_once(cf, c, opt.winding));
                    sum += kids.back().winding;
                }
                if (sum != box.winding) continue;
            } catch (const BoundaryTooClose&) {
                continue;
            } catch (const PhaseResolutionError&) {
                continue;
            }
            for (auto& k : kids) stack.push_back({k, item.depth + 1});
            split_ok = true;
            break;
        }
        if (!split_ok) {
            record(box.first_moment / static_cast<double>(box.winding), box.winding, true);
            out.unresolved.push_back(box);
        }
    }
    out.coarse_evaluations = cf.evaluations();
    std::sort(out.zeros.begin(), out.zeros.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
        return a.k.imag() < b.k.imag();
    });
    return out;
}

inline ZeroSearch find_zeros(const Evaluator& f, const Rect& region, const FindOptions& opt = {})
{
    return find_zeros(f, f, region, opt);
}

/// First-quadrant representative of the orbit {k, -k, k*, -k*}.
inline cplx representative(cplx k) { return {std::abs(k.real()), std::abs(k.imag())}; }

/// Collapses zeros related by k -> -k, k -> k* onto one first-quadrant representative
/// per orbit, keeping the copy with the smallest residual.
inline std::vector<Eigenvalue> canonical_zeros(const std::vector<Eigenvalue>& zeros, double tol = 1e-9)
{
    std::vector<Eigenvalue> out;
    for (const Eigenvalue& z : zeros) {
        Eigenvalue e = z;
        e.k = representative(z.k);
        if (classify(e.k) == ZeroClass::real) e.k.imag(0.0);
        if (classify(e.k) == ZeroClass::imaginary) e.k.real(0.0);
        e.lambda = e.k * e.k;
        e.cls = classify(e.k);
        auto it = std::find_if(out.begin(), out.end(), [&](const Eigenvalue& o) {
            return std::abs(o.k - e.k) <= tol * std::max(1.0, std::abs(e.k));
        });
        if (it == out.end())
            out.push_back(e);
        else if (e.residual < it->residual)
            *it = e;
    }
    std::sort(out.begin(), out.end(), [](const Eigenvalue& a, const Eigenvalue& b) {
        return std::abs(a.k) < std::abs(b.k);
    });
    return out;
}

/// Largest distance from a mirror image (-k, k*, -k*) of a zero to the nearest zero
/// of the set. Mirrors falling outside `region` (shrunk by `margin`) are ignored.
inline double symmetry_closure_gap(const std::vector<Eigenvalue>& zeros, const Rect& region, double margin = 1e-6)
{
    double worst = 0.0;
    const Rect inner{region.s0 + margin, region.s1 - margin, region.t0 + margin, region.t1 - margin};
    for (const Eigenvalue& z : zeros) {
        for (cplx m : {-z.k, std::conj(z.k), -std::conj(z.k)}) {
            if (!inner.contains(m)) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const Eigenvalue& o : zeros) best = std::min(best, std::abs(o.k - m));
            worst = std::max(worst, best);
        }
    }
    return worst;
}

} // namespace tspec
