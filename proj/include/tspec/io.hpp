#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "asymptotics.hpp"
#include "charfun.hpp"
#include "errors.hpp"
#include "potential.hpp"
#include "roots.hpp"

namespace tspec {

inline constexpr const char* tool_version = "0.3.1";
inline constexpr const char* spectrum_format = "tspec-spectrum/1";

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// potentials

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items())
        if (!ok.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
}

inline double get_number(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
    if (!j.at(key).is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

inline std::vector<double> get_numbers(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
    const json& a = j.at(key);
    if (!a.is_array()) throw ConfigError(where + ": \"" + key + "\" must be an array");
    std::vector<double> out;
    for (const json& v : a) {
        if (!v.is_number()) throw ConfigError(where + ": \"" + key + "\" must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

} // namespace detail

inline json potential_to_json(const Potential& p)
{
    json j;
    j["kind"] = to_string(p.kind());
    const auto d = p.data();
    switch (p.kind()) {
    case PotentialKind::constant: j["value"] = d[0]; break;
    case PotentialKind::polynomial: j["coeffs"] = std::vector<double>(d.begin(), d.end()); break;
    case PotentialKind::grid: j["samples"] = std::vector<double>(d.begin(), d.end()); break;
    }
    j["h"] = p.h();
    return j;
}

/// Parses {"kind":..., ...}. `h` is taken from the object when present,
/// else from `fallback_h`; a missing h is reported through `has_h`.
inline Potential potential_from_json(const json& j, std::optional<double> fallback_h = std::nullopt,
                                     bool* has_h = nullptr)
{
    const std::string where = "potential";
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(where + ": needs a string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    std::optional<double> h = fallback_h;
    if (j.contains("h")) {
        if (fallback_h) throw ConfigError("h given both inside the potential and at top level");
        h = detail::get_number(j, "h", where);
    }
    if (has_h) *has_h = h.has_value();
    try {
        if (kind == "constant") {
            detail::reject_unknown(j, {"kind", "value", "h"}, where);
            return Potential::constant(detail::get_number(j, "value", where), h.value_or(0.0));
        }
        if (kind == "polynomial") {
            detail::reject_unknown(j, {"kind", "coeffs", "h"}, where);
            return Potential::polynomial(detail::get_numbers(j, "coeffs", where), h.value_or(0.0));
        }
        if (kind == "grid") {
            detail::reject_unknown(j, {"kind", "samples", "h"}, where);
            return Potential::grid(detail::get_numbers(j, "samples", where), h.value_or(0.0));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("potential: ") + e.what());
    }
    throw ConfigError(where + ": unknown kind \"" + kind + "\"");
}

/// FNV-1a over the canonical JSON of the potential, as 16 hex digits.
inline std::string potential_hash(const Potential& p)
{
    const std::string s = potential_to_json(p).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// run configuration

struct Tolerances {
    double ode_rtol = 1e-12;      // fine evaluator (Newton, residuals, reported values)
    double contour_rtol = 1e-6;   // coarse evaluator used for contour phases
    double newton_tol = 1e-12;
    double min_box = 1e-5;
};

struct GammaConfig {
    std::string route = "omega";             // omega | endpoint | direct
    int truncation = 30;
    std::vector<double> probes{0.37, 0.71};
};

struct RunConfig {
    Potential potential = Potential::constant(0.0);
    Variant variant = Variant::robin;
    std::optional<Rect> region;
    int depth = 30;
    std::optional<TheoremTag> theorem;
    int n_lo = 5, n_hi = 25;
    GammaConfig gamma;
    std::optional<std::string> output;
    std::optional<std::string> spectrum;
    int threads = 1;
    Tolerances tol;

    CharFunOptions fine_options() const
    {
        CharFunOptions o;
        o.jost.rtol = tol.ode_rtol;
        return o;
    }
    CharFunOptions coarse_options() const
    {
        CharFunOptions o;
        o.jost.rtol = tol.contour_rtol;
        return o;
    }
    FindOptions find_options() const
    {
        FindOptions f;
        f.max_depth = depth;
        f.min_box = tol.min_box;
        f.newton.tol = tol.newton_tol;
        return f;
    }
};

inline Rect parse_region(const std::vector<double>& v, const std::string& where = "region")
{
    if (v.size() != 4) throw ConfigError(where + ": expected 4 numbers s0,s1,t0,t1");
    const Rect r{v[0], v[1], v[2], v[3]};
    if (!(r.width() > 0.0 && r.height() > 0.0)) throw ConfigError(where + ": empty rectangle");
    return r;
}

/// Validates and converts a configuration document. Every object level
/// rejects unknown keys; Robin runs must state h.
inline RunConfig config_from_json(const json& j)
{
    detail::reject_unknown(j,
                           {"potential", "variant", "h", "region", "depth", "theorem", "n_range", "gamma", "output",
                            "spectrum", "threads", "tolerances"},
                           "config");
    RunConfig c;
    if (j.contains("variant")) {
        if (!j.at("variant").is_string()) throw ConfigError("config: \"variant\" must be a string");
        const std::string v = j.at("variant").get<std::string>();
        if (v == "robin")
            c.variant = Variant::robin;
        else if (v == "dirichlet")
            c.variant = Variant::dirichlet;
        else
            throw ConfigError("config: variant must be \"robin\" or \"dirichlet\"");
    }
    if (!j.contains("potential")) throw ConfigError("config: missing \"potential\"");
    std::optional<double> top_h;
    if (j.contains("h")) top_h = detail::get_number(j, "h", "config");
    bool has_h = false;
    c.potential = potential_from_json(j.at("potential"), top_h, &has_h);
    if (c.variant == Variant::robin && !has_h) throw ConfigError("config: Robin variant requires h");

    if (j.contains("region")) c.region = parse_region(detail::get_numbers(j, "region", "config"));
    if (j.contains("depth")) {
        if (!j.at("depth").is_number_integer() || j.at("depth").get<int>() < 1)
            throw ConfigError("config: \"depth\" must be a positive integer");
        c.depth = j.at("depth").get<int>();
    }
    if (j.contains("theorem")) {
        if (!j.at("theorem").is_string()) throw ConfigError("config: \"theorem\" must be a string");
        try {
            c.theorem = parse_theorem_tag(j.at("theorem").get<std::string>());
        } catch (const PreconditionError& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("n_range")) {
        const auto v = detail::get_numbers(j, "n_range", "config");
        if (v.size() != 2 || v[0] < 0 || v[1] < v[0] || v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]))
            throw ConfigError("config: \"n_range\" must be [lo, hi] with 0 <= lo <= hi integers");
        c.n_lo = static_cast<int>(v[0]);
        c.n_hi = static_cast<int>(v[1]);
    }
    if (j.contains("gamma")) {
        const json& g = j.at("gamma");
        detail::reject_unknown(g, {"route", "truncation", "probes"}, "gamma");
        if (g.contains("route")) {
            if (!g.at("route").is_string()) throw ConfigError("gamma: \"route\" must be a string");
            c.gamma.route = g.at("route").get<std::string>();
            if (c.gamma.route != "omega" && c.gamma.route != "endpoint" && c.gamma.route != "direct")
                throw ConfigError("gamma: route must be omega, endpoint or direct");
        }
        if (g.contains("truncation")) {
            if (!g.at("truncation").is_number_integer() || g.at("truncation").get<int>() < 1)
                throw ConfigError("gamma: \"truncation\" must be a positive integer");
            c.gamma.truncation = g.at("truncation").get<int>();
        }
        if (g.contains("probes")) c.gamma.probes = detail::get_numbers(g, "probes", "gamma");
    }
    for (const char* key : {"output", "spectrum"}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_string()) throw ConfigError(std::string("config: \"") + key + "\" must be a string");
        (std::string(key) == "output" ? c.output : c.spectrum) = j.at(key).get<std::string>();
    }
    if (j.contains("threads")) {
        if (!j.at("threads").is_number_integer() || j.at("threads").get<int>() < 1)
            throw ConfigError("config: \"threads\" must be a positive integer");
        c.threads = j.at("threads").get<int>();
    }
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::reject_unknown(t, {"ode_rtol", "contour_rtol", "newton_tol", "min_box"}, "tolerances");
        auto positive = [&](const char* key, double& dst) {
            if (!t.contains(key)) return;
            const double v = detail::get_number(t, key, "tolerances");
            if (!(v > 0.0)) throw ConfigError(std::string("tolerances: \"") + key + "\" must be positive");
            dst = v;
        };
        positive("ode_rtol", c.tol.ode_rtol);
        positive("contour_rtol", c.tol.contour_rtol);
        positive("newton_tol", c.tol.newton_tol);
        positive("min_box", c.tol.min_box);
    }
    return c;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline RunConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// spectrum files

struct SpectrumRecord {
    int index = -1;
    cplx k;
    int multiplicity = 1;
    double residual = 0.0;
    ZeroClass cls = ZeroClass::quadrant;
    bool cluster = false;

    bool operator==(const SpectrumRecord&) const = default;
};

struct SpectrumHeader {
    std::string format = spectrum_format;
    std::string version = tool_version;
    json potential;
    std::string potential_hash;
    Variant variant = Variant::robin;
    Rect region{};
    int total_winding = 0;
    bool complete = true;
    Tolerances tol;
    std::vector<std::string> warnings;
};

struct SpectrumFile {
    SpectrumHeader header;
    std::vector<SpectrumRecord> records;

    void sort_records()
    {
        std::stable_sort(records.begin(), records.end(), [](const SpectrumRecord& a, const SpectrumRecord& b) {
            if (a.index != b.index) return a.index < b.index;
            if (std::abs(a.k) != std::abs(b.k)) return std::abs(a.k) < std::abs(b.k);
            if (a.k.real() != b.k.real()) return a.k.real() < b.k.real();
            return a.k.imag() < b.k.imag();
        });
    }

    std::vector<Eigenvalue> eigenvalues() const
    {
        std::vector<Eigenvalue> out;
        for (const SpectrumRecord& r : records) {
            Eigenvalue e;
            e.k = r.k;
            e.lambda = r.k * r.k;
            e.index = r.index;
            e.multiplicity = r.multiplicity;
            e.residual = r.residual;
            e.cls = r.cls;
            e.cluster = r.cluster;
            out.push_back(e);
        }
        return out;
    }
};

inline ZeroClass parse_zero_class(const std::string& s)
{
    if (s == "real") return ZeroClass::real;
    if (s == "imaginary") return ZeroClass::imaginary;
    if (s == "quadrant") return ZeroClass::quadrant;
    throw ConfigError("spectrum: unknown class \"" + s + "\"");
}

inline json spectrum_to_json(const SpectrumFile& f)
{
    const SpectrumHeader& h = f.header;
    json head;
    head["format"] = h.format;
    head["tool_version"] = h.version;
    head["potential"] = h.potential;
    head["potential_hash"] = h.potential_hash;
    head["variant"] = to_string(h.variant);
    head["region"] = {h.region.s0, h.region.s1, h.region.t0, h.region.t1};
    head["total_winding"] = h.total_winding;
    head["complete"] = h.complete;
    head["tolerances"] = {{"ode_rtol", h.tol.ode_rtol},
                          {"contour_rtol", h.tol.contour_rtol},
                          {"newton_tol", h.tol.newton_tol},
                          {"min_box", h.tol.min_box}};
    head["warnings"] = h.warnings;
    json recs = json::array();
    for (const SpectrumRecord& r : f.records)
        recs.push_back({{"index", r.index},
                        {"re_k", r.k.real()},
                        {"im_k", r.k.imag()},
                        {"multiplicity", r.multiplicity},
                        {"residual", r.residual},
                        {"class", to_string(r.cls)},
                        {"cluster", r.cluster}});
    return {{"header", head}, {"records", recs}};
}

inline SpectrumFile spectrum_from_json(const json& j)
{
    try {
        detail::reject_unknown(j, {"header", "records"}, "spectrum");
        const json& head = j.at("header");
        SpectrumFile f;
        SpectrumHeader& h = f.header;
        h.format = head.at("format").get<std::string>();
        if (h.format != spectrum_format) throw ConfigError("spectrum: unsupported format " + h.format);
        h.version = head.at("tool_version").get<std::string>();
        h.potential = head.at("potential");
        h.potential_hash = head.at("potential_hash").get<std::string>();
        const std::string v = head.at("variant").get<std::string>();
        h.variant = v == "dirichlet" ? Variant::dirichlet : Variant::robin;
        const auto reg = head.at("region").get<std::vector<double>>();
        h.region = parse_region(reg, "spectrum region");
        h.total_winding = head.at("total_winding").get<int>();
        h.complete = head.at("complete").get<bool>();
        const json& t = head.at("tolerances");
        h.tol.ode_rtol = t.at("ode_rtol").get<double>();
        h.tol.contour_rtol = t.at("contour_rtol").get<double>();
        h.tol.newton_tol = t.at("newton_tol").get<double>();
        h.tol.min_box = t.at("min_box").get<double>();
        if (head.contains("warnings")) h.warnings = head.at("warnings").get<std::vector<std::string>>();
        for (const json& r : j.at("records")) {
            SpectrumRecord rec;
            rec.index = r.at("index").get<int>();
            rec.k = {r.at("re_k").get<double>(), r.at("im_k").get<double>()};
            rec.multiplicity = r.at("multiplicity").get<int>();
            rec.residual = r.at("residual").get<double>();
            rec.cls = parse_zero_class(r.at("class").get<std::string>());
            rec.cluster = r.value("cluster", false);
            f.records.push_back(rec);
        }
        return f;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spectrum: ") + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

inline void write_spectrum(const std::string& path, const SpectrumFile& f)
{
    write_text_file(path, spectrum_to_json(f).dump(2) + "\n");
}

inline SpectrumFile read_spectrum(const std::string& path) { return spectrum_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// spectrum run

struct SpectrumRun {
    SpectrumFile file;
    std::vector<std::string> conflicts;
    bool degenerate = false;   // D vanishes identically
};

/// Theorem tag used for indexing, or nothing when no theorem applies.
inline std::optional<TheoremTag> indexing_tag(const PotentialScalars& s, Variant v)
{
    try {
        return default_tag(s, v);
    } catch (const PreconditionError&) {
        return std::nullopt;
    }
}

/// Zero search over the configured region, indexing and record assembly.
inline SpectrumRun run_spectrum(const RunConfig& cfg)
{
    if (!cfg.region) throw ConfigError("spectrum: no region given");
    const Rect region = *cfg.region;
    SpectrumRun run;
    SpectrumHeader& h = run.file.header;
    h.potential = potential_to_json(cfg.potential);
    h.potential_hash = potential_hash(cfg.potential);
    h.variant = cfg.variant;
    h.region = region;
    h.tol = cfg.tol;

    const Evaluator fine = make_evaluator(cfg.potential, cfg.variant, cfg.fine_options());
    const Evaluator coarse = make_evaluator(cfg.potential, cfg.variant, cfg.coarse_options());

    bool all_zero = true;
    for (double v : cfg.potential.data()) all_zero = all_zero && v == 0.0;
    if (all_zero) {
        run.degenerate = true;
        h.warnings.push_back("degenerate characteristic function: q = 0 gives D = 0 identically");
        return run;
    }

    const ZeroSearch zs = find_zeros(fine, coarse, region, cfg.find_options());
    h.region = zs.region;
    h.total_winding = zs.total_winding;
    h.complete = zs.complete();
    if (!zs.complete()) h.warnings.push_back("unresolved clusters: " + std::to_string(zs.unresolved.size()));

    const PotentialScalars s = derive_scalars(cfg.potential);
    std::vector<int> index(zs.zeros.size(), -1);
    if (const auto tag = cfg.theorem ? cfg.theorem : indexing_tag(s, cfg.variant)) {
        const double reach = std::max({std::abs(region.s0), std::abs(region.s1), 1.0});
        const int n_max = static_cast<int>(std::ceil(reach / std::numbers::pi)) + 2;
        const AsymptoticPrediction pred = predict_eigenvalues(s, cfg.potential.h(), *tag, 0, n_max);
        const IndexedSpectrum ix = index_eigenvalues(zs.zeros, pred);
        run.conflicts = ix.conflicts;
        for (const std::string& c : ix.conflicts) h.warnings.push_back("indexing conflict at " + c);
        for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
            const cplx rep = representative(zs.zeros[i].k);
            for (const Eigenvalue& e : ix.indexed)
                if (std::abs(e.k - rep) <= 1e-9 * std::max(1.0, std::abs(rep))) index[i] = e.index;
        }
    } else {
        h.warnings.push_back("no asymptotic theorem applies; records left unindexed");
    }

    for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
        const Eigenvalue& z = zs.zeros[i];
        run.file.records.push_back({index[i], z.k, z.multiplicity, z.residual, z.cls, z.cluster});
    }
    run.file.sort_records();
    return run;
}

} // namespace tspec
