#pragma once

#include "tspec/errors.hpp"
#include "tspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace tspec {

enum class PotentialKind { polynomial, grid, constant };

inline const char* to_string(PotentialKind k)
{
    switch (k) {
    case PotentialKind::polynomial: return "polynomial";
    case PotentialKind::grid: return "grid";
    case PotentialKind::constant: return "constant";
    }
    return "?";
}

/// Real potential q on [0, 1] together with the Robin parameter h.
///
/// Three interpretations are supported: a polynomial in ascending-degree
/// coefficients, uniform samples read as a natural cubic spline, or a constant.
/// Instances are immutable once built.
class Potential {
public:
    static Potential constant(double value, double h = 0.0)
    {
        Potential p(PotentialKind::constant, h);
        p.values_ = {value};
        return p;
    }

    static Potential polynomial(std::vector<double> coeffs, double h = 0.0)
    {
        if (coeffs.empty()) coeffs.push_back(0.0);
        Potential p(PotentialKind::polynomial, h);
        p.values_ = std::move(coeffs);
        p.check_finite();
        return p;
    }

    static Potential grid(std::vector<double> samples, double h = 0.0)
    {
        if (samples.size() < 4)
            throw DomainError("grid potential needs at least 4 samples, got " + std::to_string(samples.size()));
        Potential p(PotentialKind::grid, h);
        p.values_ = std::move(samples);
        p.check_finite();
        p.build_spline();
        return p;
    }

    PotentialKind kind() const noexcept { return kind_; }
    double h() const noexcept { return h_; }

    /// Polynomial coefficients, grid samples, or the single constant.
    std::span<const double> data() const noexcept { return values_; }

    Potential with_h(double h) const
    {
        Potential p = *this;
        p.h_ = h;
        return p;
    }

    /// c * q with the same h.
    Potential scaled(double c) const
    {
        Potential p = *this;
        for (double& v : p.values_) v *= c;
        for (auto& s : p.spline_) {
            s.a *= c;
            s.b *= c;
            s.c *= c;
            s.d *= c;
        }
        return p;
    }

    /// q(x); x must lie in [0, 1].
    double operator()(double x) const
    {
        if (!(x >= 0.0 && x <= 1.0)) throw DomainError("potential evaluated outside [0,1] at x=" + std::to_string(x));
        return value(x);
    }

    /// Unchecked evaluation used on hot paths; x is clamped into [0, 1].
    double value(double x) const noexcept { return derivative(std::clamp(x, 0.0, 1.0), 0); }

    /// q^{(order)}(x). Exact for polynomial/constant kinds, spline derivative for grids.
    double derivative(double x, int order) const noexcept
    {
        switch (kind_) {
        case PotentialKind::constant: return order == 0 ? values_[0] : 0.0;
        case PotentialKind::polynomial: {
            double acc = 0.0;
            for (std::size_t j = values_.size(); j-- > static_cast<std::size_t>(order);) {
                double c = values_[j];
                for (int r = 0; r < order; ++r) c *= static_cast<double>(j - static_cast<std::size_t>(r));
                acc = acc * x + c;
            }
            return acc;
        }
        case PotentialKind::grid: {
            const std::size_t n = values_.size() - 1;
            const double step = 1.0 / static_cast<double>(n);
            std::size_t i = static_cast<std::size_t>(std::floor(x / step));
            if (i >= n) i = n - 1;
            const Cubic& s = spline_[i];
            const double t = x - static_cast<double>(i) * step;
            switch (order) {
            case 0: return s.a + t * (s.b + t * (s.c + t * s.d));
            case 1: return s.b + t * (2.0 * s.c + 3.0 * t * s.d);
            case 2: return 2.0 * s.c + 6.0 * t * s.d;
            case 3: return 6.0 * s.d;
            default: return 0.0;
            }
        }
        }
        return 0.0;
    }

    bool derivatives_exact() const noexcept { return kind_ != PotentialKind::grid; }

    /// Highest derivative order that can be nonzero.
    int max_derivative_order() const noexcept
    {
        switch (kind_) {
        case PotentialKind::constant: return 0;
        case PotentialKind::polynomial: return static_cast<int>(values_.size()) - 1;
        case PotentialKind::grid: return 3;
        }
        return 0;
    }

    /// Panel count for composite quadrature; grid panels are aligned with spline knots.
    std::size_t quadrature_panels(std::size_t minimum = 32) const noexcept
    {
        if (kind_ != PotentialKind::grid) return minimum;
        const std::size_t intervals = values_.size() - 1;
        const std::size_t per = (minimum + intervals - 1) / intervals;
        return intervals * std::max<std::size_t>(per, 1);
    }

private:
    struct Cubic {
        double a, b, c, d;
    };

    Potential(PotentialKind kind, double h) : kind_(kind), h_(h) {}

    void check_finite() const
    {
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("potential data must be finite");
        if (!std::isfinite(h_)) throw DomainError("boundary parameter h must be finite");
    }

    // Natural cubic spline on the uniform grid x_i = i/n.
    void build_spline()
    {
        const std::size_t n = values_.size() - 1;
        const double step = 1.0 / static_cast<double>(n);
        std::vector<double> m(n + 1, 0.0);
        if (n >= 2) {
            // Tridiagonal system for interior second derivatives: m_{i-1} + 4 m_i + m_{i+1} = rhs_i.
            const std::size_t k = n - 1;
            std::vector<double> diag(k, 4.0), rhs(k);
            for (std::size_t i = 0; i < k; ++i)
                rhs[i] = 6.0 * (values_[i + 2] - 2.0 * values_[i + 1] + values_[i]) / (step * step);
            for (std::size_t i = 1; i < k; ++i) {
                const double w = 1.0 / diag[i - 1];
                diag[i] -= w;
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for (std::size_t i = k - 1; i-- > 0;) m[i + 1] = (rhs[i] - m[i + 2]) / diag[i];
        }
        spline_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double y0 = values_[i], y1 = values_[i + 1];
            spline_[i] = Cubic{y0, (y1 - y0) / step - step * (2.0 * m[i] + m[i + 1]) / 6.0, 0.5 * m[i],
                               (m[i + 1] - m[i]) / (6.0 * step)};
        }
    }

    PotentialKind kind_;
    double h_;
    std::vector<double> values_;
    std::vector<Cubic> spline_;
};

/// First nonvanishing derivative of q at x = 1.
struct EndpointOrder {
    int m = 0;
    double value = 0.0;   // q^{(m)}(1)
};

struct PotentialScalars {
    double omega = 0.0;          // integral of q over [0,1]
    double q_at_1 = 0.0;
    double dq_at_1 = 0.0;
    double q_at_0 = 0.0;
    double dq_at_0 = 0.0;
    double q_sq_integral = 0.0;  // integral of q^2 over [0,1]
    std::optional<EndpointOrder> m_order;  // empty when every derivative vanishes at 1
};

/// Default threshold below which q^{(m)}(1) counts as zero.
inline double endpoint_zero_tolerance(const Potential& p)
{
    double scale = 0.0;
    for (double v : p.data()) scale = std::max(scale, std::abs(v));
    return (p.derivatives_exact() ? 1e-13 : 1e-8) * std::max(scale, 1.0);
}

inline std::optional<EndpointOrder> endpoint_order(const Potential& p, double zero_tol)
{
    for (int m = 0; m <= p.max_derivative_order(); ++m) {
        const double d = p.derivative(1.0, m);
        if (std::abs(d) > zero_tol) return EndpointOrder{m, d};
    }
    return std::nullopt;
}

inline PotentialScalars derive_scalars(const Potential& p)
{
    PotentialScalars s;
    const std::size_t panels = p.quadrature_panels();
    auto q = [&](double x) { return p.value(x); };
    if (p.kind() == PotentialKind::constant) {
        const double c = p.data()[0];
        s.omega = c;
        s.q_sq_integral = c * c;
    } else {
        s.omega = quad::gauss(q, 0.0, 1.0, panels);
        s.q_sq_integral = quad::gauss([&](double x) { const double v = q(x); return v * v; }, 0.0, 1.0, panels);
    }
    s.q_at_0 = p.derivative(0.0, 0);
    s.dq_at_0 = p.derivative(0.0, 1);
    s.q_at_1 = p.derivative(1.0, 0);
    s.dq_at_1 = p.derivative(1.0, 1);
    s.m_order = endpoint_order(p, endpoint_zero_tolerance(p));
    return s;
}

/// Independent Simpson evaluation of (omega, integral of q^2) on twice the nodes of derive_scalars.
inline std::pair<double, double> crosscheck_integrals(const Potential& p)
{
    const std::size_t intervals = 2 * 8 * p.quadrature_panels();
    auto q = [&](double x) { return p.value(x); };
    return {quad::simpson(q, 0.0, 1.0, intervals),
            quad::simpson([&](double x) { const double v = q(x); return v * v; }, 0.0, 1.0, intervals)};
}

/// Correction constants of the refined eigenvalue asymptotics.
/// Q1, Q2 enter the Robin problem, Q3, Q4 the Dirichlet problem.
struct QConstants {
    double q1 = 0.0, q2 = 0.0, q3 = 0.0, q4 = 0.0;
};

inline QConstants q_constants(const PotentialScalars& s, double h)
{
    const double w = s.omega;
    QConstants c;
    c.q1 = s.dq_at_1 - s.q_at_1 * w - 4.0 * h * s.q_at_1;
    c.q2 = -s.dq_at_0 + s.q_sq_integral + s.q_at_0 * w - w * w * w / 6.0 + 4.0 * h * (s.q_at_0 + w * h);
    c.q3 = -s.dq_at_1 + s.q_at_1 * w;
    c.q4 = -s.dq_at_0 + s.q_at_0 * w - s.q_sq_integral + w * w * w / 6.0;
    return c;
}

} // namespace tspec
