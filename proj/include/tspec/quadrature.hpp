#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace tspec::quad {

struct Rule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights, Newton iteration on P_n from the Chebyshev guess.
inline Rule gauss_legendre(std::size_t n)
{
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

inline const Rule& gl8()
{
    static const Rule rule = gauss_legendre(8);
    return rule;
}

/// Composite 8-point Gauss-Legendre over `panels` equal panels of [a, b].
template <class F>
auto gauss(F&& f, double a, double b, std::size_t panels = 32)
{
    const Rule& r = gl8();
    const double w = (b - a) / static_cast<double>(panels);
    using R = decltype(f(a));
    R sum{};
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * w;
        R part{};
        for (std::size_t i = 0; i < r.nodes.size(); ++i)
            part += r.weights[i] * f(mid + 0.5 * w * r.nodes[i]);
        sum += part * (0.5 * w);
    }
    return sum;
}

/// Composite Simpson with `intervals` (rounded up to even) subintervals.
template <class F>
auto simpson(F&& f, double a, double b, std::size_t intervals)
{
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / static_cast<double>(intervals);
    using R = decltype(f(a));
    R sum = f(a) + f(b);
    for (std::size_t i = 1; i < intervals; ++i)
        sum += (i % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(i));
    return sum * (h / 3.0);
}

/// Trapezoid rule on uniformly spaced samples.
template <class T>
T trapezoid(std::span<const T> y, double h)
{
    if (y.size() < 2) return T{};
    T sum = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) sum += y[i];
    return sum * h;
}

/// Piecewise Chebyshev-Lobatto representation of functions on [a, b], with a
/// spectrally accurate cumulative integral taken from the right end.
class ChebyshevPanels {
public:
    ChebyshevPanels(double a, double b, std::size_t panels, std::size_t order = 16)
        : a_(a), b_(b), panels_(panels), order_(order)
    {
        ref_.resize(order);
        for (std::size_t i = 0; i < order; ++i)
            ref_[i] = -std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(order - 1));
        bary_.resize(order);
        for (std::size_t j = 0; j < order; ++j) {
            bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j + 1 == order) ? 0.5 : 1.0);
        }
        // tail_[i][j] = integral over [ref_i, 1] of the j-th Lagrange basis polynomial
        const Rule gl = gauss_legendre(order);
        tail_.assign(order * order, 0.0);
        for (std::size_t i = 0; i < order; ++i) {
            const double lo = ref_[i], half = 0.5 * (1.0 - lo), mid = 0.5 * (1.0 + lo);
            for (std::size_t g = 0; g < gl.nodes.size(); ++g) {
                const double s = mid + half * gl.nodes[g];
                const std::vector<double> l = basis(s);
                for (std::size_t j = 0; j < order; ++j) tail_[i * order + j] += gl.weights[g] * half * l[j];
            }
        }
        nodes_.resize(panels * order);
        const double w = (b - a) / static_cast<double>(panels);
        for (std::size_t p = 0; p < panels; ++p)
            for (std::size_t i = 0; i < order; ++i)
                nodes_[p * order + i] = a + w * (static_cast<double>(p) + 0.5 * (ref_[i] + 1.0));
    }

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t order() const noexcept { return order_; }

    /// out[i] = integral of g from nodes()[i] to b, given g sampled at nodes().
    template <class T>
    std::vector<T> integral_to_end(std::span<const T> g) const
    {
        std::vector<T> out(g.size());
        const double half = 0.5 * (b_ - a_) / static_cast<double>(panels_);
        T carry{};
        for (std::size_t p = panels_; p-- > 0;) {
            const std::size_t off = p * order_;
            for (std::size_t i = 0; i < order_; ++i) {
                T acc{};
                for (std::size_t j = 0; j < order_; ++j) acc += tail_[i * order_ + j] * g[off + j];
                out[off + i] = carry + half * acc;
            }
            carry = out[off];
        }
        return out;
    }

    /// Value at an arbitrary x in [a, b] by barycentric interpolation on the owning panel.
    template <class T>
    T interpolate(std::span<const T> g, double x) const
    {
        const double w = (b_ - a_) / static_cast<double>(panels_);
        std::size_t p = static_cast<std::size_t>(std::floor((x - a_) / w));
        if (p >= panels_) p = panels_ - 1;
        const double s = 2.0 * (x - a_ - w * static_cast<double>(p)) / w - 1.0;
        const std::vector<double> l = basis(s);
        T acc{};
        for (std::size_t j = 0; j < order_; ++j) acc += l[j] * g[p * order_ + j];
        return acc;
    }

private:
    std::vector<double> basis(double s) const
    {
        std::vector<double> l(order_, 0.0);
        for (std::size_t j = 0; j < order_; ++j)
            if (s == ref_[j]) {
                l[j] = 1.0;
                return l;
            }
        double den = 0.0;
        for (std::size_t j = 0; j < order_; ++j) {
            l[j] = bary_[j] / (s - ref_[j]);
            den += l[j];
        }
        for (double& v : l) v /= den;
        return l;
    }

    double a_, b_;
    std::size_t panels_, order_;
    std::vector<double> ref_, bary_, tail_, nodes_;
};

} // namespace tspec::quad
