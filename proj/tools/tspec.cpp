// tspec command-line driver.
//
// Exit codes: 0 success, 1 bad configuration, 2 partial result or failed
// audit, 3 computation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include <tspec/driver.hpp>
#include <tspec/jost.hpp>

using namespace tspec;

namespace {

enum Exit { ok = 0, bad_config = 1, partial = 2, failure = 3 };

struct Common {
    std::string config_path;
    std::string out;
    int threads = 0;
    double tol = 0.0;
    std::string potential;
    std::string variant;
    std::string h;
};

std::vector<double> split_numbers(const std::string& s, char sep = ',')
{
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not a number: \"" + item + "\"");
        }
    }
    return out;
}

// "lo..hi" or a single "hi" (meaning 1..hi).
std::pair<int, int> parse_range(const std::string& s)
{
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) return {1, std::stoi(s)};
        return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw ConfigError("bad range \"" + s + "\", expected lo..hi");
    }
}

cplx parse_k(const std::string& s)
{
    const auto v = split_numbers(s);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() != 2) throw ConfigError("k must be given as re,im");
    return {v[0], v[1]};
}

// Config document from --config plus flag overrides; validated as a whole.
json config_document(const Common& c)
{
    json doc = c.config_path.empty() ? json::object() : read_json_file(c.config_path);
    if (!c.potential.empty()) {
        try {
            doc["potential"] = json::parse(c.potential);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("--potential: ") + e.what());
        }
    }
    if (!c.variant.empty()) doc["variant"] = c.variant;
    if (!c.h.empty()) {
        const auto v = split_numbers(c.h);
        if (v.size() != 1) throw ConfigError("--h takes one number");
        doc["h"] = v[0];
    }
    if (c.threads > 0) doc["threads"] = c.threads;
    if (c.tol > 0.0) {
        doc["tolerances"]["ode_rtol"] = c.tol;
        doc["tolerances"]["newton_tol"] = c.tol;
    }
    return doc;
}

void emit(const Common& c, const std::string& text)
{
    if (c.out.empty())
        std::cout << text;
    else
        write_text_file(c.out, text);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Transmission eigenvalues of the half-line Schroedinger problem"};
    app.require_subcommand(1, 2);
    app.set_help_flag("--help", "print help and exit");
    app.fallthrough();  // global flags are accepted after the subcommand too
    Common c;
    app.add_option("--config", c.config_path, "JSON run configuration")->envname("TSPEC_CONFIG");
    app.add_option("--out", c.out, "output file (default stdout)")->envname("TSPEC_OUT");
    app.add_option("--threads", c.threads, "worker threads")->envname("TSPEC_THREADS")->check(CLI::PositiveNumber);
    app.add_option("--tol", c.tol, "ODE and Newton tolerance")->envname("TSPEC_TOL")->check(CLI::PositiveNumber);
    app.add_option("--potential", c.potential, "potential as JSON, e.g. {\"kind\":\"constant\",\"value\":1}")
        ->envname("TSPEC_POTENTIAL");
    app.add_option("--variant", c.variant, "robin or dirichlet")->envname("TSPEC_VARIANT");
    app.add_option("--h", c.h, "Robin boundary parameter")->envname("TSPEC_H");

    std::string region, theorem, n_range, spectrum_path, route, probes, k_text, kernel_csv;
    int depth = 0, truncation = 0, grid_n = 41, grid_m = 21, kernel_mesh = 128;

    auto* spectrum = app.add_subcommand("spectrum", "locate zeros of D and write a spectrum file");
    spectrum->add_option("--region", region, "s0,s1,t0,t1");
    spectrum->add_option("--depth", depth, "maximum subdivision depth")->check(CLI::PositiveNumber);

    auto* charfun = app.add_subcommand("charfun", "evaluate the characteristic function");
    charfun->require_subcommand(1);
    auto* cf_eval = charfun->add_subcommand("eval", "print D(k)");
    cf_eval->add_option("--k", k_text, "re,im")->required();
    auto* cf_grid = charfun->add_subcommand("grid", "CSV of D over a rectangle");
    cf_grid->add_option("--region", region, "s0,s1,t0,t1")->required();
    cf_grid->add_option("--nx", grid_n, "points along Re k")->check(CLI::PositiveNumber);
    cf_grid->add_option("--ny", grid_m, "points along Im k")->check(CLI::PositiveNumber);
    cf_grid->add_option("--kernel-csv", kernel_csv, "also dump t, K(0,t) to this file");
    cf_grid->add_option("--kernel-mesh", kernel_mesh, "kernel mesh cells")->check(CLI::PositiveNumber);

    auto* asym = app.add_subcommand("asymptotics", "asymptotic predictions and residuals");
    asym->require_subcommand(1);
    auto* predict = asym->add_subcommand("predict", "predicted sqrt-eigenvalues as JSON");
    predict->add_option("--theorem", theorem, "theorem tag");
    predict->add_option("--n", n_range, "lo..hi")->required();
    auto* residuals = asym->add_subcommand("residuals", "CSV residual table for a spectrum file");
    residuals->add_option("--spectrum", spectrum_path, "spectrum file")->required();
    residuals->add_option("--theorem", theorem, "theorem tag");
    residuals->add_option("--n", n_range, "lo..hi");

    auto* gamma = app.add_subcommand("gamma", "normalization constant from a spectrum");
    gamma->add_option("--route", route, "omega, endpoint or direct")->required();
    gamma->add_option("--spectrum", spectrum_path, "spectrum file")->required();
    gamma->add_option("--truncation", truncation, "eigenvalue orbits in the product")->check(CLI::PositiveNumber);
    gamma->add_option("--probes", probes, "direct-route probes, comma separated");

    auto* validate = app.add_subcommand("validate", "audit a spectrum file");
    validate->add_option("--spectrum", spectrum_path, "spectrum file (computed from the config when absent)");
    validate->add_option("--theorem", theorem, "theorem tag");
    validate->add_option("--n", n_range, "lo..hi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_config;
    }

    try {
        // Subcommands that only read a spectrum file need no potential in the config.
        const bool from_file = (residuals->parsed() || gamma->parsed()) ||
                               (validate->parsed() && !spectrum_path.empty() && c.config_path.empty() &&
                                c.potential.empty());
        json doc = config_document(c);
        if (!region.empty()) doc["region"] = split_numbers(region);
        if (depth > 0) doc["depth"] = depth;
        if (!theorem.empty()) doc["theorem"] = theorem;
        if (!n_range.empty()) {
            const auto [lo, hi] = parse_range(n_range);
            doc["n_range"] = {lo, hi};
        }
        if (!route.empty()) doc["gamma"]["route"] = route;
        if (truncation > 0) doc["gamma"]["truncation"] = truncation;
        if (!probes.empty()) doc["gamma"]["probes"] = split_numbers(probes);
        if (!spectrum_path.empty()) doc["spectrum"] = spectrum_path;

        RunConfig cfg;
        std::optional<LoadedSpectrum> loaded;
        if (from_file) {
            const std::string path = doc.value("spectrum", std::string());
            loaded = load_spectrum(read_spectrum(path));
            // The potential comes from the spectrum header.
            doc["potential"] = loaded->file.header.potential;
            doc["variant"] = to_string(loaded->file.header.variant);
            doc.erase("h");
        }
        cfg = config_from_json(doc);
        if (!c.out.empty()) cfg.output = c.out;
        else if (cfg.output) c.out = *cfg.output;

        if (spectrum->parsed()) {
            const SpectrumRun run = run_spectrum(cfg);
            emit(c, dump(spectrum_to_json(run.file)));
            for (const std::string& w : run.file.header.warnings) std::cerr << "warning: " << w << '\n';
            return run.file.header.complete ? ok : partial;
        }

        if (cf_eval->parsed()) {
            const CharFunSample d = eval_D(cfg.potential, parse_k(k_text), cfg.variant, cfg.fine_options());
            emit(c, dump({{"re_k", d.k.real()}, {"im_k", d.k.imag()}, {"re_D", d.value.real()}, {"im_D", d.value.imag()},
                          {"variant", to_string(cfg.variant)}}));
            return ok;
        }

        if (cf_grid->parsed()) {
            const auto samples = sample_D_grid(cfg.potential, cfg.variant, *cfg.region, grid_n, grid_m,
                                               cfg.fine_options(), static_cast<unsigned>(cfg.threads));
            std::ostringstream os;
            os.precision(17);
            os << "re_k,im_k,re_D,im_D\n";
            int failed = 0;
            for (const GridSample& g : samples) {
                os << g.k.real() << ',' << g.k.imag() << ',';
                if (g.value)
                    os << g.value->real() << ',' << g.value->imag() << '\n';
                else {
                    os << "nan,nan\n";
                    ++failed;
                }
            }
            emit(c, os.str());
            if (!kernel_csv.empty()) {
                const KernelGrid kg = kernel_iterate(cfg.potential, static_cast<std::size_t>(kernel_mesh));
                std::ostringstream ks;
                write_kernel_csv(ks, kg);
                write_text_file(kernel_csv, ks.str());
            }
            if (failed) std::cerr << "warning: " << failed << " grid points failed\n";
            return failed ? partial : ok;
        }

        if (predict->parsed()) {
            const PotentialScalars s = derive_scalars(cfg.potential);
            const TheoremTag tag = cfg.theorem ? *cfg.theorem : default_tag(s, cfg.variant);
            if (variant_of(tag) != cfg.variant)
                throw ConfigError(std::string(to_string(tag)) + " does not match the " + to_string(cfg.variant) +
                                  " variant");
            emit(c, dump(prediction_json(predict_eigenvalues(s, cfg.potential.h(), tag, cfg.n_lo, cfg.n_hi))));
            return ok;
        }

        if (residuals->parsed()) {
            const TheoremTag tag =
                cfg.theorem ? *cfg.theorem : default_tag(loaded->scalars, loaded->file.header.variant);
            std::ostringstream os;
            write_residual_csv(os, spectrum_residuals(*loaded, tag, cfg.n_lo, cfg.n_hi));
            emit(c, os.str());
            return ok;
        }

        if (gamma->parsed()) {
            LimitOptions opt;
            opt.throw_on_unstable = false;
            const auto est = run_gamma(*loaded, cfg.gamma, cfg.fine_options(), opt);
            json j = json::array();
            bool stable = true;
            for (const GammaEstimate& e : est) {
                j.push_back(gamma_json(e));
                stable = stable && e.stable;
            }
            emit(c, dump(est.size() == 1 ? j.front() : j));
            if (!stable) std::cerr << "warning: limit extrapolation unstable\n";
            return stable ? ok : partial;
        }

        if (validate->parsed()) {
            SpectrumFile file;
            if (!spectrum_path.empty()) {
                file = loaded ? loaded->file : read_spectrum(spectrum_path);
            } else {
                const SpectrumRun run = run_spectrum(cfg);
                file = run.file;
            }
            const ValidationReport rep = run_validate(cfg, file);
            for (const Audit& a : rep.audits)
                std::fprintf(stderr, "%-20s %s  %s\n", a.name.c_str(), a.pass ? "PASS" : "FAIL", a.detail.c_str());
            emit(c, dump(validation_json(rep)));
            return rep.pass() ? ok : partial;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return bad_config;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return ok;
}
