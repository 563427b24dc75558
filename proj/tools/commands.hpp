#pragma once

// Command-line front end. run_cli() is the whole program minus main(), so
// tests can drive it in-process.
//
// Exit codes: 0 pass, 1 numeric failure, 2 usage or IO error.

#include "io.hpp"

#include <lmra/coulomb.hpp>
#include <lmra/filters.hpp>
#include <lmra/generator.hpp>
#include <lmra/landau.hpp>
#include <lmra/lattice.hpp>
#include <lmra/zak.hpp>

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lmra::cli {

using io::json;

inline constexpr int exit_pass = 0;
inline constexpr int exit_fail = 1;
inline constexpr int exit_usage = 2;

inline constexpr const char* output_dir_env = "LMRA_OUTPUT_DIR";

/// Everything a run depends on. Output locations and the worker count are
/// deliberately absent: they never change the numbers.
struct RunConfig {
    std::string command;

    std::string filter_source; // "builtin:<name>" or "file:<path>"
    FilterBank filter;
    Shape shape = Shape::triangular;
    std::optional<int> d; // sublattice period; defaults to the filter's dilation
    Pattern pattern = Pattern::along_a2;

    double tol = default_filter_tol; // validate
    int nmax = 2, mmax = 2;          // onc-check
    double quad_tol = default_quad_tol;
    std::optional<double> pass_tol;
    int grid = 64;                   // zak-check
    std::string route = "transform";

    double x0 = -2, x1 = 2, y0 = -2, y1 = 2; // synthesize, in units of a
    int nx = 41, ny = 41;
    int level = 0;
    std::string method; // closed | quadrature

    double radius = 6.0; // coulomb, units of a
    double box = 6.0;    // box half-width, units of a
    bool exchange = false;
    MonteCarloConfig mc;

    std::optional<double> nu; // wigner
    double eta_scale = 1.0;

    int sublattice() const { return d.value_or(filter.d); }
};

struct Options {
    std::optional<std::string> out;
    std::optional<std::string> csv;
    int threads = 1;
};

// ---------------------------------------------------------------------------
// Config <-> JSON

inline json filter_to_json(const RunConfig& c) {
    json coeffs = json::array();
    for (const auto& [n, h] : c.filter.coeffs) coeffs.push_back(json::array({n, h.real(), h.imag()}));
    return {{"source", c.filter_source}, {"d", c.filter.d}, {"coeffs", coeffs}};
}

inline json config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    if (c.command == "wigner") {
        j["nu"] = c.nu.value_or(c.d ? 1.0 / *c.d : 1.0);
        j["eta_scale"] = c.eta_scale;
        return j;
    }
    j["filter"] = filter_to_json(c);
    if (c.command == "validate") {
        j["tol"] = c.tol;
        return j;
    }
    j["shape"] = to_string(c.shape);
    j["d"] = c.sublattice();
    j["pattern"] = to_string(c.pattern);
    if (c.command == "onc-check") {
        j["nmax"] = c.nmax;
        j["mmax"] = c.mmax;
        j["quad_tol"] = c.quad_tol;
        j["pass_tol"] = c.pass_tol.value_or(1e-8);
    } else if (c.command == "zak-check") {
        j["grid"] = c.grid;
        j["route"] = c.route;
        j["pass_tol"] = c.pass_tol.value_or(1e-10);
    } else if (c.command == "synthesize") {
        j["grid"] = {{"x0", c.x0}, {"x1", c.x1}, {"nx", c.nx}, {"y0", c.y0}, {"y1", c.y1}, {"ny", c.ny}};
        j["level"] = c.level;
        j["method"] = c.method;
        j["quad_tol"] = c.quad_tol;
    } else if (c.command == "coulomb") {
        j["radius"] = c.radius;
        j["box"] = c.box;
        j["exchange"] = c.exchange;
        j["seed"] = c.mc.seed;
        j["points"] = c.mc.n_points;
        j["sampler"] = to_string(c.mc.sampler);
        j["blocks"] = c.mc.blocks;
        j["moment_panels"] = c.mc.moment_panels;
    }
    return j;
}

inline RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        if (j.contains("filter")) {
            const json& f = j["filter"];
            c.filter_source = f.value("source", std::string("embedded"));
            c.filter.d = f.at("d").get<int>();
            for (const json& e : f.at("coeffs"))
                c.filter.coeffs[e.at(0).get<int>()] = cplx(e.at(1).get<double>(), e.at(2).get<double>());
        }
        c.tol = j.value("tol", c.tol);
        if (j.contains("shape")) c.shape = parse_shape(j["shape"].get<std::string>());
        if (j.contains("d")) c.d = j["d"].get<int>();
        if (j.contains("pattern")) c.pattern = parse_pattern(j["pattern"].get<std::string>());
        c.nmax = j.value("nmax", c.nmax);
        c.mmax = j.value("mmax", c.mmax);
        c.quad_tol = j.value("quad_tol", c.quad_tol);
        if (j.contains("pass_tol")) c.pass_tol = j["pass_tol"].get<double>();
        if (j.contains("grid")) {
            if (j["grid"].is_object()) {
                const json& g = j["grid"];
                c.x0 = g.at("x0").get<double>();
                c.x1 = g.at("x1").get<double>();
                c.nx = g.at("nx").get<int>();
                c.y0 = g.at("y0").get<double>();
                c.y1 = g.at("y1").get<double>();
                c.ny = g.at("ny").get<int>();
            } else {
                c.grid = j["grid"].get<int>();
            }
        }
        c.route = j.value("route", c.route);
        c.level = j.value("level", c.level);
        c.method = j.value("method", c.method);
        c.radius = j.value("radius", c.radius);
        c.box = j.value("box", c.box);
        c.exchange = j.value("exchange", c.exchange);
        c.mc.seed = j.value("seed", c.mc.seed);
        c.mc.n_points = j.value("points", c.mc.n_points);
        if (j.contains("sampler")) c.mc.sampler = parse_sampler(j["sampler"].get<std::string>());
        c.mc.blocks = j.value("blocks", c.mc.blocks);
        c.mc.moment_panels = j.value("moment_panels", c.mc.moment_panels);
        if (j.contains("nu")) c.nu = j["nu"].get<double>();
        c.eta_scale = j.value("eta_scale", c.eta_scale);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed embedded config: ") + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Output plumbing

inline std::filesystem::path resolve_output(const std::string& name) {
    std::filesystem::path p(name);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv(output_dir_env); dir && *dir) return std::filesystem::path(dir) / p;
    return p;
}

inline void write_text(const std::optional<std::string>& target, const std::string& text, std::ostream& out) {
    if (!target) {
        out << text;
        return;
    }
    const auto path = resolve_output(*target);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::ios_base::failure("write failed for '" + path.string() + "'");
}

struct Outcome {
    json result;
    bool pass = true;
    std::string csv; // optional tabular companion
};

// ---------------------------------------------------------------------------
// Commands

inline Outcome cmd_validate(const RunConfig& c) {
    const ValidationReport rep = validate_orthonormality(c.filter, c.tol);
    json residuals = json::array();
    for (const auto& r : rep.residuals)
        residuals.push_back({{"lag", r.lag}, {"residual", io::to_json(r.residual)}, {"abs", std::abs(r.residual)}});
    Outcome o;
    o.pass = rep.pass;
    o.result = {{"residuals", residuals},
                {"max_residual", rep.max_residual},
                {"sum_rule_residual", validate_sum_rule(c.filter)},
                {"pass", rep.pass}};
    std::ostringstream csv;
    io::csv_row(csv, "lag", "re", "im", "abs");
    for (const auto& r : rep.residuals) io::csv_row(csv, r.lag, r.residual.real(), r.residual.imag(), std::abs(r.residual));
    o.csv = csv.str();
    return o;
}

inline Outcome cmd_onc_check(const RunConfig& c) {
    const LatticeSpec lat = make_lattice(c.shape, c.sublattice(), c.pattern);
    const GeneratorFunction h = make_t_d(c.filter, lat);
    const int d = c.sublattice();
    const OncMatrix S = onc_matrix(h, d, c.nmax, c.mmax, c.quad_tol);
    double row_dev = 0.0;
    for (int m = -c.mmax; m <= c.mmax; ++m)
        row_dev = std::max(row_dev, std::abs(S.at(0, m) - autocorrelation(c.filter, d * m)));
    const double dev = S.max_deviation_from_identity();
    const double pass_tol = c.pass_tol.value_or(1e-8);
    json entries = json::array();
    std::ostringstream csv;
    io::csv_row(csv, "n", "m", "re", "im");
    for (int n = -c.nmax; n <= c.nmax; ++n)
        for (int m = -c.mmax; m <= c.mmax; ++m) {
            const cplx v = S.at(n, m);
            entries.push_back(json::array({n, m, v.real(), v.imag()}));
            io::csv_row(csv, n, m, v.real(), v.imag());
        }
    Outcome o;
    o.pass = dev <= pass_tol;
    o.result = {{"entries", entries},
                {"max_deviation_from_identity", dev},
                {"hermiticity_defect", S.hermiticity_defect()},
                {"n0_row_vs_autocorrelation", row_dev},
                {"pass", o.pass}};
    o.csv = csv.str();
    return o;
}

inline Outcome cmd_zak_check(const RunConfig& c) {
    const LatticeSpec lat = make_lattice(c.shape, c.sublattice(), c.pattern);
    ZakFunction z;
    if (c.route == "transform") z = make_zak(make_t_d(c.filter, lat));
    else if (c.route == "closed") z = make_t_d_zak(c.filter, lat.a);
    else throw UnknownName("unknown zak route '" + c.route + "' (transform | closed)");
    const FlatnessReport rep = j_d_flatness(z, c.sublattice(), c.grid);
    const double pass_tol = c.pass_tol.value_or(1e-10);
    std::ostringstream csv;
    io::csv_row(csv, "k", "q", "J");
    json values = json::array();
    for (int i = 0; i < rep.grid_n; ++i)
        for (int j = 0; j < rep.grid_n; ++j) {
            const double v = rep.values[static_cast<std::size_t>(i) * rep.grid_n + j];
            io::csv_row(csv, rep.k_at(lat.a, i), rep.q_at(lat.a, j), v);
            values.push_back(v);
        }
    Outcome o;
    o.pass = rep.max_deviation <= pass_tol;
    o.result = {{"target", rep.target},
                {"max_deviation", rep.max_deviation},
                {"grid", rep.grid_n},
                {"values", values},
                {"pass", o.pass}};
    o.csv = csv.str();
    return o;
}

inline Outcome cmd_synthesize(const RunConfig& c, int threads) {
    const LatticeSpec lat = make_lattice(c.shape, c.sublattice(), c.pattern);
    const std::string method = c.method.empty() ? (c.level == 0 ? "closed" : "quadrature") : c.method;
    Wavefunction psi;
    if (method == "closed") {
        if (c.level != 0) throw Error("closed form exists for level 0 only");
        psi = [lat, f = c.filter](Vec2 r) { return lll_closed_form(lat, f, r); };
    } else if (method == "quadrature") {
        psi = make_wavefunction(KernelSpec{c.shape, c.level}, make_t_d(c.filter, lat), c.quad_tol);
    } else {
        throw UnknownName("unknown synthesis method '" + method + "' (closed | quadrature)");
    }
    const WaveField wf = sample_field(psi, c.x0 * lat.a, c.x1 * lat.a, c.nx, c.y0 * lat.a, c.y1 * lat.a,
                                      c.ny, c.filter_source, threads);
    std::ostringstream csv;
    io::csv_row(csv, "x", "y", "re", "im", "abs");
    json values = json::array();
    for (int j = 0; j < wf.ny; ++j)
        for (int i = 0; i < wf.nx; ++i) {
            const cplx v = wf.at(i, j);
            io::csv_row(csv, wf.x_at(i), wf.y_at(j), v.real(), v.imag(), std::abs(v));
            values.push_back(json::array({wf.x_at(i), wf.y_at(j), v.real(), v.imag()}));
        }
    Outcome o;
    o.result = {{"a", lat.a},
                {"method", method},
                {"nx", wf.nx},
                {"ny", wf.ny},
                {"norm_estimate", wf.norm_estimate},
                {"values", values}};
    o.csv = csv.str();
    return o;
}

inline json estimate_json(const McEstimate& e) {
    return {{"value", e.value}, {"stderr", e.stderr_}, {"imag", e.imag}, {"imag_stderr", e.imag_stderr}};
}

inline Outcome cmd_coulomb(const RunConfig& c, int threads) {
    const LatticeSpec lat = make_lattice(c.shape, c.sublattice(), c.pattern);
    const ValidationReport v = validate_orthonormality(c.filter);
    if (!v.pass) throw InvalidFilter("coulomb needs a filter that passes orthonormality");
    MonteCarloConfig mc = c.mc;
    mc.box_half_width = c.box * lat.a;
    mc.threads = threads;
    const Orbital orb = prepare_orbital([lat, f = c.filter](Vec2 r) { return lll_closed_form(lat, f, r); },
                                        lat, mc);
    const EnergyReport rep = delta_e(orb, lat, c.radius * lat.a, mc, c.exchange);
    json pairs = json::array();
    std::ostringstream csv;
    io::csv_row(csv, "n", "m", "distance", "E_d", "E_d_stderr", "E_ex", "E_ex_stderr", "classical", "term");
    for (const PairTerm& p : rep.pairs) {
        json e = {{"site", json::array({p.site.n, p.site.m})},
                  {"distance", p.distance},
                  {"direct", estimate_json(p.direct)},
                  {"classical", p.classical},
                  {"term", p.term()}};
        if (p.exchange) e["exchange"] = estimate_json(*p.exchange);
        pairs.push_back(e);
        io::csv_row(csv, p.site.n, p.site.m, p.distance, p.direct.value, p.direct.stderr_,
                    p.exchange ? p.exchange->value : 0.0, p.exchange ? p.exchange->stderr_ : 0.0,
                    p.classical, p.term());
    }
    Outcome o;
    o.result = {{"nu", rep.nu},
                {"E_W", rep.wigner},
                {"kinetic", rep.kinetic},
                {"delta_E", rep.delta_e},
                {"delta_E_stderr", rep.delta_e_stderr},
                {"total", rep.total},
                {"pairs", pairs},
                {"provenance",
                 {{"seed", mc.seed},
                  {"points", mc.n_points},
                  {"sampler", to_string(mc.sampler)},
                  {"blocks", mc.blocks},
                  {"box_half_width", mc.box_half_width},
                  {"truncation_radius", rep.truncation_radius},
                  {"box_norm", rep.box_norm},
                  {"orbital_centre", io::to_json(rep.orbital_centre)},
                  {"exchange", rep.include_exchange},
                  {"warnings", rep.warnings}}},
                {"reference", {{"quoted_delta_E", quoted_haar3_delta_e},
                               {"gaussian_construction_delta_E", gaussian_construction_delta_e}}}};
    o.csv = csv.str();
    return o;
}

inline Outcome cmd_wigner(const RunConfig& c) {
    const double nu = c.nu.value_or(c.d ? 1.0 / *c.d : 1.0);
    const double e = wigner_energy(nu, c.eta_scale);
    Outcome o;
    o.result = {{"nu", nu}, {"E_W", e}, {"coefficient", e / std::sqrt(nu)}};
    return o;
}

inline Outcome execute(const RunConfig& c, int threads) {
    if (c.command == "validate") return cmd_validate(c);
    if (c.command == "onc-check") return cmd_onc_check(c);
    if (c.command == "zak-check") return cmd_zak_check(c);
    if (c.command == "synthesize") return cmd_synthesize(c, threads);
    if (c.command == "coulomb") return cmd_coulomb(c, threads);
    if (c.command == "wigner") return cmd_wigner(c);
    throw UnknownName("unknown command '" + c.command + "'");
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

struct FilterArgs {
    std::string builtin_name;
    std::string file;
    std::string shape = "triangular";
    std::optional<int> d;
    std::string pattern = "along_a2";
};

inline void add_filter_options(CLI::App* sub, FilterArgs& fa, bool lattice = true) {
    auto* b = sub->add_option("--builtin", fa.builtin_name, "builtin filter (haar2, haar3, haar_<d>)");
    auto* f = sub->add_option("--file", fa.file, "filter file");
    b->excludes(f);
    if (!lattice) return;
    sub->add_option("--shape", fa.shape, "triangular | square");
    sub->add_option("--d", fa.d, "sublattice period (default: filter dilation)");
    sub->add_option("--pattern", fa.pattern, "along_a2 | along_a1");
}

inline void resolve_filter(const FilterArgs& fa, RunConfig& c) {
    if (!fa.builtin_name.empty()) {
        c.filter = builtin(fa.builtin_name);
        c.filter_source = "builtin:" + fa.builtin_name;
    } else if (!fa.file.empty()) {
        c.filter = load_filter(fa.file);
        c.filter_source = "file:" + fa.file;
    } else {
        throw CLI::ValidationError("filter", "one of --builtin or --file is required");
    }
    c.shape = parse_shape(fa.shape);
    c.d = fa.d;
    c.pattern = parse_pattern(fa.pattern);
}

} // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Orthonormal lowest-Landau-level bases from d-MRA filters"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    Options opt;
    std::string from;
    app.add_option("--out", opt.out, "JSON output file (default stdout); relative to $LMRA_OUTPUT_DIR if set");
    app.add_option("--csv", opt.csv, "CSV companion output");
    app.add_option("--threads", opt.threads, "worker cap; never changes results")->check(CLI::NonNegativeNumber);
    app.add_option("--from", from, "re-run the config embedded in a previous JSON output");

    RunConfig c;
    detail::FilterArgs fa;
    std::string sampler = "gaussian-importance";

    auto* validate = app.add_subcommand("validate", "check the orthonormality condition and sum rule");
    detail::add_filter_options(validate, fa, false);
    validate->add_option("--tol", c.tol, "pass tolerance on max |r_l|");

    auto* onc = app.add_subcommand("onc-check", "s-space orthonormality matrix");
    detail::add_filter_options(onc, fa);
    onc->add_option("--nmax", c.nmax, "largest |n| checked");
    onc->add_option("--mmax", c.mmax, "largest |m| checked");
    onc->add_option("--quad-tol", c.quad_tol, "quadrature tolerance");
    onc->add_option("--pass-tol", c.pass_tol, "pass tolerance on the deviation from identity");

    auto* zak = app.add_subcommand("zak-check", "J_d flatness on a grid of the Zak cell");
    detail::add_filter_options(zak, fa);
    zak->add_option("--grid", c.grid, "points per side of the Zak cell");
    zak->add_option("--route", c.route, "transform | closed");
    zak->add_option("--pass-tol", c.pass_tol, "pass tolerance on the flatness deviation");

    auto* syn = app.add_subcommand("synthesize", "sample the wavefunction on a grid");
    detail::add_filter_options(syn, fa);
    syn->add_option("--x0", c.x0, "grid bounds in units of a");
    syn->add_option("--x1", c.x1);
    syn->add_option("--y0", c.y0);
    syn->add_option("--y1", c.y1);
    syn->add_option("--nx", c.nx, "grid points along x");
    syn->add_option("--ny", c.ny, "grid points along y");
    syn->add_option("--level", c.level, "Landau level");
    syn->add_option("--method", c.method, "closed | quadrature");
    syn->add_option("--quad-tol", c.quad_tol, "quadrature tolerance");

    auto* coul = app.add_subcommand("coulomb", "Monte Carlo quantum correction to the Wigner energy");
    detail::add_filter_options(coul, fa);
    coul->add_option("--radius", c.radius, "lattice truncation radius in units of a");
    coul->add_option("--box", c.box, "sampling box half-width in units of a");
    coul->add_option("--points", c.mc.n_points, "Monte Carlo points per integral")->check(CLI::PositiveNumber);
    coul->add_option("--seed", c.mc.seed, "Philox key");
    coul->add_option("--sampler", sampler, "uniform | gaussian-importance");
    coul->add_option("--blocks", c.mc.blocks, "batch-means blocks for the standard error")->check(CLI::PositiveNumber);
    coul->add_flag("--exchange", c.exchange, "include exchange integrals");

    auto* wig = app.add_subcommand("wigner", "classical Wigner energy by Ewald summation");
    wig->add_option("--nu", c.nu, "filling factor");
    wig->add_option("--d", fa.d, "sublattice period (nu = 1/d)");
    wig->add_option("--eta-scale", c.eta_scale, "Ewald splitting parameter relative to its default");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_pass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_pass;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (!from.empty()) {
            std::ifstream in(from);
            if (!in) throw ParseError("cannot open '" + from + "'");
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception& e) {
                throw ParseError("'" + from + "' is not JSON: " + e.what());
            }
            if (!doc.contains("config")) throw ParseError("'" + from + "' has no embedded config");
            c = config_from_json(doc["config"]);
        } else {
            const auto subs = app.get_subcommands();
            if (subs.empty()) {
                err << "error: a command is required (or --from)\n" << app.help();
                return exit_usage;
            }
            c.command = subs.front()->get_name();
            if (c.command == "wigner") {
                c.d = fa.d;
            } else {
                detail::resolve_filter(fa, c);
            }
            c.mc.sampler = parse_sampler(sampler);
        }

        const Outcome o = execute(c, opt.threads);
        json doc;
        doc["command"] = c.command;
        doc["config"] = config_to_json(c);
        doc["result"] = o.result;
        write_text(opt.out, io::dump17(doc), out);
        if (opt.csv && !o.csv.empty()) write_text(opt.csv, o.csv, out);
        if (!o.pass) err << c.command << ": FAIL\n";
        return o.pass ? exit_pass : exit_fail;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const UnknownName& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidFilter& e) {
        err << "error: " << e.what() << '\n';
        return c.command == "coulomb" ? exit_fail : exit_usage;
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_fail;
    }
}

} // namespace lmra::cli
