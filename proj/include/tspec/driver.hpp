#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "gamma.hpp"
#include "io.hpp"

namespace tspec {

// ---------------------------------------------------------------------------
// shared pieces for the spectrum-file consumers

struct LoadedSpectrum {
    SpectrumFile file;
    Potential potential = Potential::constant(0.0);
    PotentialScalars scalars;
    std::vector<Eigenvalue> zeros;
};

inline LoadedSpectrum load_spectrum(SpectrumFile f)
{
    LoadedSpectrum out;
    out.potential = potential_from_json(f.header.potential);
    out.scalars = derive_scalars(out.potential);
    out.zeros = f.eigenvalues();
    out.file = std::move(f);
    return out;
}

inline int slots_for(const Rect& region)
{
    const double reach = std::max({std::abs(region.s0), std::abs(region.s1), 1.0});
    return static_cast<int>(std::ceil(reach / std::numbers::pi)) + 2;
}

/// Residual table for a spectrum under a theorem tag.
inline ResidualReport spectrum_residuals(const LoadedSpectrum& ls, TheoremTag tag, int n_lo, int n_hi)
{
    if (variant_of(tag) != ls.file.header.variant)
        throw PreconditionError(std::string("theorem ") + to_string(tag) + " does not apply to the " +
                                to_string(ls.file.header.variant) + " variant");
    const AsymptoticPrediction pred =
        predict_eigenvalues(ls.scalars, ls.potential.h(), tag, 0, std::max(n_hi, slots_for(ls.file.header.region)));
    const IndexedSpectrum ix = index_eigenvalues(ls.zeros, pred);
    return residual_report(ix.indexed, pred, n_lo, n_hi);
}

inline void write_residual_csv(std::ostream& os, const ResidualReport& rep)
{
    os << "n,re_eps,im_eps,abs_eps,n_abs_eps\n";
    os.precision(17);
    for (const ResidualRow& r : rep.rows) {
        const double a = std::abs(r.eps);
        os << r.n << ',' << r.eps.real() << ',' << r.eps.imag() << ',' << a << ',' << r.n * a << '\n';
    }
}

inline json residual_json(const ResidualReport& rep)
{
    json rows = json::array();
    for (const ResidualRow& r : rep.rows)
        rows.push_back({{"n", r.n},
                        {"branch", r.branch},
                        {"re_k", r.computed.real()},
                        {"im_k", r.computed.imag()},
                        {"re_eps", r.eps.real()},
                        {"im_eps", r.eps.imag()},
                        {"abs_next_order", std::abs(r.next_order)}});
    return {{"theorem", to_string(rep.tag)},
            {"rows", rows},
            {"window", rep.window},
            {"window_sums", rep.window_sums},
            {"tail_decreasing", rep.tail_decreasing},
            {"loglog_slope", std::isnan(rep.loglog_slope) ? json(nullptr) : json(rep.loglog_slope)},
            {"max_next_order", rep.max_next_order}};
}

inline json prediction_json(const AsymptoticPrediction& p)
{
    json roots = json::array();
    for (const PredictedRoot& r : p.roots) {
        const cplx v = r.value(p.tag);
        roots.push_back({{"n", r.n},
                         {"branch", r.branch},
                         {"re_k", v.real()},
                         {"im_k", v.imag()},
                         {"re_leading", r.leading.real()},
                         {"im_leading", r.leading.imag()}});
    }
    json j{{"theorem", to_string(p.tag)},
           {"Q", {p.q.q1, p.q.q2, p.q.q3, p.q.q4}},
           {"degenerate", p.degenerate},
           {"roots", roots}};
    if (p.s_plus) j["s_plus"] = {p.s_plus->real(), p.s_plus->imag()};
    if (p.s_minus) j["s_minus"] = {p.s_minus->real(), p.s_minus->imag()};
    return j;
}

// ---------------------------------------------------------------------------
// gamma

inline GammaRoute parse_gamma_route(const std::string& route, Variant v)
{
    const bool d = v == Variant::dirichlet;
    if (route == "omega") return d ? GammaRoute::dirichlet_omega : GammaRoute::omega_limit;
    if (route == "endpoint") return d ? GammaRoute::dirichlet_endpoint : GammaRoute::endpoint_limit;
    if (route == "direct") return GammaRoute::direct;
    throw ConfigError("unknown gamma route \"" + route + "\"");
}

inline json gamma_json(const GammaEstimate& e)
{
    json j{{"gamma", e.gamma},
           {"route", to_string(e.route)},
           {"truncation", e.truncation},
           {"probes", e.probes},
           {"samples", e.samples},
           {"extrapolants", e.extrapolants},
           {"gap", e.gap},
           {"stable", e.stable},
           {"residual_rms", e.residual_rms}};
    if (e.imag_part) j["imag_part"] = *e.imag_part;
    return j;
}

/// gamma from a spectrum by the chosen route; the direct route returns one
/// estimate per probe.
inline std::vector<GammaEstimate> run_gamma(const LoadedSpectrum& ls, const GammaConfig& g,
                                            const CharFunOptions& fine = {}, LimitOptions opt = {})
{
    const Variant v = ls.file.header.variant;
    const HadamardProduct hp = HadamardProduct::from_zeros(ls.zeros, g.truncation);
    if (hp.truncation() < g.truncation)
        throw PreconditionError("spectrum holds " + std::to_string(hp.truncation()) + " eigenvalue orbits, " +
                                std::to_string(g.truncation) + " requested");
    std::vector<GammaEstimate> out;
    switch (parse_gamma_route(g.route, v)) {
    case GammaRoute::omega_limit:
    case GammaRoute::dirichlet_omega: out.push_back(gamma_from_omega(hp, ls.scalars, v, opt)); break;
    case GammaRoute::endpoint_limit:
    case GammaRoute::dirichlet_endpoint: out.push_back(gamma_from_endpoint(hp, ls.scalars, v, opt)); break;
    case GammaRoute::direct: {
        const Evaluator d = make_evaluator(ls.potential, v, fine);
        for (double p : g.probes) out.push_back(gamma_direct(d, hp, cplx{p, 0.0}));
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// validation

struct Audit {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<Audit> audits;
    bool pass() const
    {
        for (const Audit& a : audits)
            if (!a.pass) return false;
        return !audits.empty();
    }
};

/// Expected zero count of the leading function inside Gamma_n, or nothing
/// when the counting statement does not cover the scalars.
inline std::optional<int> expected_gamma_count(const PotentialScalars& s, Variant v, int n)
{
    if (is_zero(s.omega) || is_zero(s.q_at_1)) return std::nullopt;
    const double q1 = v == Variant::robin ? s.q_at_1 : -s.q_at_1;
    return q1 / s.omega > 0.0 ? 4 * n + 5 : 4 * n + 3;
}

/// Winding of k^p D along Gamma_n, with p = 1 (Robin) or 3 (Dirichlet): the
/// power removes the poles D picks up relative to the leading function.
inline int gamma_count(const Potential& p, Variant v, int n, const CharFunOptions& opt = {})
{
    const Evaluator d = make_evaluator(p, v, opt);
    const int power = v == Variant::robin ? 1 : 3;
    const Evaluator f = [&](cplx k) { return std::pow(k, power) * d(k); };
    return winding_count(f, gamma_contour(n)).winding;
}

namespace detail {

inline std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace detail

/// Audits a spectrum: header hash, theorem hypotheses, symmetry closure,
/// Gamma_n counts, residual decay and gamma route consistency.
inline ValidationReport run_validate(const RunConfig& cfg, const SpectrumFile& file)
{
    ValidationReport rep;
    const LoadedSpectrum ls = load_spectrum(file);
    const Variant v = file.header.variant;

    rep.audits.push_back({"potential hash", potential_hash(ls.potential) == file.header.potential_hash,
                          "header " + file.header.potential_hash});

    const std::optional<TheoremTag> requested = cfg.theorem ? cfg.theorem : indexing_tag(ls.scalars, v);
    TheoremTag tag{};
    bool tag_ok = false;
    {
        Audit a{"theorem hypotheses", false, ""};
        if (!requested) {
            a.detail = "no theorem covers the potential scalars";
        } else if (tag = *requested; variant_of(tag) != v) {
            a.detail = to_string(tag) + " belongs to the " + to_string(variant_of(tag)) + " variant, spectrum is " +
                       to_string(v);
        } else {
            try {
                check_hypotheses(ls.scalars, tag);
                a.pass = true;
                a.detail = to_string(tag);
            } catch (const PreconditionError& e) {
                a.detail = e.what();
            }
        }
        tag_ok = a.pass;
        rep.audits.push_back(std::move(a));
    }

    {
        const double gap = symmetry_closure_gap(ls.zeros, file.header.region);
        rep.audits.push_back({"symmetry closure", gap <= 1e-9, "max mirror gap " + detail::fmt(gap)});
    }

    {
        Audit a{"Gamma_n counts", true, ""};
        if (!expected_gamma_count(ls.scalars, v, 2)) {
            a.detail = "not applicable (omega = 0 or q(1) = 0)";
        } else {
            for (int n = 2; n <= 4; ++n) {
                const int want = *expected_gamma_count(ls.scalars, v, n);
                const int got = gamma_count(ls.potential, v, n, cfg.coarse_options());
                a.pass = a.pass && got == want;
                if (!a.detail.empty()) a.detail += ' ';
                a.detail += "n=" + std::to_string(n) + ": " + std::to_string(got) + "/" + std::to_string(want);
            }
        }
        rep.audits.push_back(std::move(a));
    }

    {
        Audit a{"residual decay", false, ""};
        if (!tag_ok) {
            a.detail = "skipped: no valid theorem tag";
        } else {
            try {
                const ResidualReport r = spectrum_residuals(ls, tag, cfg.n_lo, cfg.n_hi);
                a.pass = r.rows.size() >= 3 && r.tail_decreasing && r.loglog_slope <= -0.5;
                a.detail = std::to_string(r.rows.size()) + " rows, slope " + detail::fmt(r.loglog_slope) +
                           (r.tail_decreasing ? ", tail sums decreasing" : ", tail sums not decreasing");
            } catch (const Error& e) {
                a.detail = e.what();
            }
        }
        rep.audits.push_back(std::move(a));
    }

    {
        Audit a{"gamma consistency", false, ""};
        try {
            LimitOptions opt;
            opt.throw_on_unstable = false;
            GammaConfig g = cfg.gamma;
            std::vector<double> values;
            std::string names;
            g.route = is_zero(ls.scalars.omega) ? "endpoint" : "omega";
            const GammaEstimate lim = run_gamma(ls, g, cfg.fine_options(), opt).front();
            values.push_back(lim.gamma);
            names = g.route + "=" + detail::fmt(lim.gamma);
            g.route = "direct";
            for (const GammaEstimate& e : run_gamma(ls, g, cfg.fine_options(), opt)) {
                values.push_back(e.gamma);
                names += " direct(" + detail::fmt(e.probes.front()) + ")=" + detail::fmt(e.gamma);
            }
            double worst = 0.0;
            for (double x : values)
                for (double y : values) worst = std::max(worst, std::abs(x - y) / std::abs(y));
            a.pass = std::isfinite(worst) && worst <= 0.10;
            a.detail = names + ", spread " + detail::fmt(worst);
        } catch (const Error& e) {
            a.detail = e.what();
        }
        rep.audits.push_back(std::move(a));
    }
    return rep;
}

inline json validation_json(const ValidationReport& r)
{
    json audits = json::array();
    for (const Audit& a : r.audits) audits.push_back({{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
    return {{"pass", r.pass()}, {"audits", audits}};
}

} // namespace tspec
