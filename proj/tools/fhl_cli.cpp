// fhl: complex dimensions and heat content of generalized von Koch snowflakes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <new>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "fhl/error.hpp"
#include "fhl/expansion.hpp"
#include "fhl/geometry.hpp"
#include "fhl/heat.hpp"
#include "fhl/io.hpp"
#include "fhl/mellin.hpp"
#include "fhl/tube.hpp"
#include "fhl/zeta.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace fhl;
using cplx = std::complex<double>;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kQuality = 2, kResource = 3 };

struct Shape {
    std::vector<std::string> gkf;
    int depth = 4;
    bool square = false;
    std::string polyline;
    bool any_ratio = false;
    bool allow_coarse = false;
};

struct Profile {
    std::vector<std::string> gkf;
    std::string ratios;
};

void add_shape(CLI::App* sub, Shape& s) {
    auto* g = sub->add_option("--gkf", s.gkf, "snowflake parameters n r")->expected(2);
    sub->add_option("--depth", s.depth, "prefractal depth")->check(CLI::Range(0, 12));
    auto* q = sub->add_flag("--square", s.square, "unit square");
    auto* p = sub->add_option("--polyline", s.polyline, "closed polygon CSV (x,y)");
    sub->add_flag("--allow-any-ratio", s.any_ratio, "accept r above 1/3");
    sub->add_flag("--allow-coarse", s.allow_coarse, "skip the resolution >= 4 / r_min^depth check");
    g->excludes(q)->excludes(p);
    q->excludes(p);
}

void add_profile(CLI::App* sub, Profile& p) {
    auto* g = sub->add_option("--gkf", p.gkf, "snowflake parameters n r")->expected(2);
    auto* r = sub->add_option("--ratios", p.ratios, "ratio:multiplicity list, e.g. 0.5:2,0.25:1");
    g->excludes(r);
}

std::pair<int, double> gkf_args(const std::vector<std::string>& v) {
    try {
        return {std::stoi(v.at(0)), io::parse_double(v.at(1))};
    } catch (const std::exception&) {
        throw DomainError("--gkf expects an integer n and a ratio r");
    }
}

zeta::RatioProfile build_profile(const Profile& p) {
    if (!p.gkf.empty()) {
        auto [n, r] = gkf_args(p.gkf);
        return zeta::profile_of(geometry::gkf_system(n, r, true));
    }
    if (p.ratios.empty()) throw DomainError("give --gkf n r or --ratios");
    std::vector<geometry::RatioCount> rc;
    std::stringstream ss(p.ratios);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        const double r = io::parse_double(item.substr(0, colon));
        const int m = colon == std::string::npos ? 1 : std::stoi(item.substr(colon + 1));
        rc.push_back({r, m});
    }
    return zeta::make_profile(rc);
}

geometry::Polyline build_shape(const Shape& s, double resolution, json& info) {
    if (s.square) {
        info["shape"] = "square";
        return geometry::square();
    }
    if (!s.polyline.empty()) {
        info["shape"] = "polyline";
        info["polyline"] = s.polyline;
        return io::read_polyline_csv(s.polyline);
    }
    if (s.gkf.empty()) throw DomainError("give --gkf n r, --square or --polyline");
    auto [n, r] = gkf_args(s.gkf);
    if (n >= 3 && r >= geometry::self_avoidance_bound(n))
        std::cerr << "warning: r = " << r << " is not below the self-avoidance bound "
                  << geometry::self_avoidance_bound(n) << " for n = " << n << "\n";
    auto sys = geometry::gkf_system(n, r, s.any_ratio);
    info["shape"] = "gkf";
    info["n"] = n;
    info["r"] = r;
    info["depth"] = s.depth;
    if (resolution > 0 && !s.allow_coarse) {
        double rmin = 1.0;
        for (auto rc : sys.distinct_ratios()) rmin = std::min(rmin, rc.ratio);
        const double need = 4.0 / std::pow(rmin, s.depth);
        if (resolution < need)
            throw DomainError("resolution " + std::to_string(resolution) + " does not resolve depth " +
                              std::to_string(s.depth) + "; need at least " + std::to_string(need));
    }
    return geometry::snowflake(sys, s.depth).boundary;
}

std::string ensure_parent(const std::string& prefix) {
    const fs::path p(prefix);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return prefix;
}

// key=value lines for the options given on this run; replays with
// `fhl --config FILE <command>`.
std::string replay_config(const CLI::App* sub) {
    std::ostringstream out;
    for (const auto* opt : sub->get_options()) {
        if (opt->get_lnames().empty() || opt->count() == 0) continue;
        const std::string key = sub->get_name() + "." + opt->get_lnames()[0];
        if (opt->get_type_size() == 0) {
            out << key << "=true\n";
            continue;
        }
        const auto& res = opt->results();
        out << key << '=';
        if (res.size() > 1) out << '[';
        for (std::size_t k = 0; k < res.size(); ++k) out << (k ? ", " : "") << '"' << res[k] << '"';
        if (res.size() > 1) out << ']';
        out << '\n';
    }
    return out.str();
}

json option_values(const CLI::App* sub) {
    json j = json::object();
    for (const auto* opt : sub->get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
        const auto& res = opt->results();
        const std::string key = opt->get_lnames()[0];
        if (opt->get_type_size() == 0)
            j[key] = opt->count() > 0;
        else if (res.empty())
            j[key] = opt->get_default_str();
        else if (res.size() == 1)
            j[key] = res[0];
        else
            j[key] = res;
    }
    return j;
}

struct Run {
    CLI::App* app;
    CLI::App* sub;
    std::string prefix;
    cli::RunManifest m;
    cli::Stopwatch clock;

    Run(CLI::App* a, CLI::App* s, std::string out) : app(a), sub(s), prefix(ensure_parent(out)) {
        m.command = s->get_name();
        m.parameters = option_values(s);
    }
    std::string file(const std::string& suffix) const { return prefix + suffix; }
    void output(const std::string& path) { m.outputs.push_back(path); }
    int finish(int code) {
        m.wall_seconds = clock.seconds();
        m.replay_config = replay_config(sub);
        {
            std::ofstream cfg(file(".cfg"));
            cfg << m.replay_config;
        }
        m.results["exit_code"] = code;
        m.write(file(".manifest.json"));
        return code;
    }
};

void print(const json& j) { std::cout << j.dump(2) << std::endl; }

// ---------------------------------------------------------------------------

int cmd_gkf(Run& run, const Shape& s) {
    if (s.gkf.empty()) throw DomainError("gkf needs --gkf n r");
    auto [n, r] = gkf_args(s.gkf);
    auto sys = geometry::gkf_system(n, r, s.any_ratio);
    json info;
    info["n"] = n;
    info["r"] = r;
    json maps = json::array();
    for (const auto& m : sys.maps())
        maps.push_back({{"ratio", m.ratio()},
                        {"rotation", m.rotation()},
                        {"reflection", m.reflection()},
                        {"translation", {m.translation().x, m.translation().y}}});
    info["maps"] = maps;
    auto p = zeta::profile_of(sys);
    info["moran_dimension"] = zeta::moran_dimension(p);
    info["self_avoidance_bound"] = geometry::self_avoidance_bound(n);
    auto sf = geometry::snowflake(sys, s.depth);
    info["ratio_above_bound"] = sf.ratio_above_bound;
    info["depth"] = s.depth;
    info["vertices"] = sf.boundary.vertices.size();
    info["area"] = geometry::signed_area(sf.boundary);
    info["perimeter"] = geometry::perimeter(sf.boundary);
    io::write_polyline_csv(run.file("_boundary.csv"), sf.boundary);
    run.output(run.file("_boundary.csv"));
    auto curve = geometry::prefractal_curve(sys, s.depth);
    io::write_polyline_csv(run.file("_curve.csv"), curve);
    run.output(run.file("_curve.csv"));
    run.m.results = info;
    print(info);
    return run.finish(kOk);
}

int cmd_classify(Run& run, const Profile& pa, double sigma0) {
    auto p = build_profile(pa);
    auto cls = zeta::classify_lattice(p);
    auto adm = zeta::admissibility_report(p, sigma0);
    json j{{"moran_dimension", zeta::moran_dimension(p)},
           {"lower_dim_bound", zeta::lower_dim_bound(p)},
           {"lattice", zeta::to_string(cls.kind)},
           {"sigma0", sigma0},
           {"criterion", zeta::to_string(adm.criterion)},
           {"notes", adm.notes}};
    if (cls.kind == zeta::LatticeKind::Lattice) {
        j["lambda0"] = cls.lambda0;
        j["exponents"] = cls.exponents;
    }
    j["screen"] = adm.screen ? json(*adm.screen) : json(nullptr);
    run.m.results = j;
    print(j);
    return run.finish(kOk);
}

int cmd_dims(Run& run, const Profile& pa, double T, std::optional<double> smin,
             std::optional<double> smax) {
    auto p = build_profile(pa);
    auto w = zeta::default_window(p, T);
    if (smin) w.sigma_min = *smin;
    if (smax) w.sigma_max = *smax;
    if (!(w.sigma_max > w.sigma_min) || !(T > 0)) throw DomainError("invalid window");
    auto cls = zeta::classify_lattice(p);
    auto d = zeta::complex_dimensions(p, w, cls);
    io::write_json(run.file(".json"), io::to_json(d));
    io::write_dims_csv(run.file(".csv"), d);
    io::svg_poles(run.file(".svg"), "complex dimensions", d);
    for (auto s : {".json", ".csv", ".svg"}) run.output(run.file(s));
    json j{{"lattice", zeta::to_string(cls.kind)},
           {"method", zeta::to_string(d.method)},
           {"count", d.count_with_multiplicity()},
           {"undecided", d.undecided.size()},
           {"moran_dimension", zeta::moran_dimension(p)}};
    run.m.results = j;
    print(j);
    return run.finish(d.undecided.empty() ? kOk : kQuality);
}

struct HeatArgs {
    double res = 512, C = 1.0, tmin = 1e-6, tmax = 10.0, step_ratio = 0.0367, cg_tol = 1e-10;
    int per_decade = 64;
    bool no_multigrid = false, pgm = false, quiet = false;
    double max_mem_mb = 4096;
};

void check_budget(const geometry::Polyline& poly, double res, double max_mem_mb, double bytes_per_cell) {
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (auto v : poly.vertices) {
        x0 = std::min(x0, v.x), x1 = std::max(x1, v.x), y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
    }
    const double cells = (x1 - x0) * res * (y1 - y0) * res;
    const double mb = cells * bytes_per_cell / (1024.0 * 1024.0);
    if (mb > max_mem_mb)
        throw ResourceError("estimated " + std::to_string(static_cast<long>(mb)) + " MB needed, budget " +
                            std::to_string(static_cast<long>(max_mem_mb)) + " MB (--max-mem-mb)");
}

int cmd_heat(Run& run, const Shape& s, const HeatArgs& a) {
    json info;
    auto poly = build_shape(s, a.res, info);
    check_budget(poly, a.res, a.max_mem_mb, 240.0);
    auto grid = std::make_shared<const geometry::GridDomain>(geometry::rasterize(poly, a.res));
    heat::SolverOptions opt;
    opt.max_step_ratio = a.step_ratio;
    opt.cg_tol = a.cg_tol;
    opt.multigrid = !a.no_multigrid;
    opt.progress = !a.quiet;
    auto hr = heat::fd_heat_solve(grid, a.C, heat::default_t_grid(a.tmin, a.tmax, a.per_decade), opt);
    io::write_series_csv(run.file(".csv"), hr.E, "t", "E");
    run.output(run.file(".csv"));
    io::svg_loglog(run.file(".svg"), "heat content", {{"E(t)", hr.E}}, "t", "E");
    run.output(run.file(".svg"));
    if (a.pgm) {
        io::write_grid_pgm(run.file(".pgm"), *grid);
        run.output(run.file(".pgm"));
    }
    info["resolution"] = a.res;
    info["C"] = a.C;
    info["h"] = grid->h();
    info["area"] = grid->area();
    info["cells"] = grid->interior_count();
    info["scheme"] = hr.info.scheme;
    info["preconditioner"] = hr.info.preconditioner;
    info["kernels"] = hr.info.kernels;
    info["time_steps"] = hr.info.time_steps;
    info["cg_iterations"] = hr.info.cg_iterations;
    info["max_cg_iterations_per_step"] = hr.info.max_cg_iterations_per_step;
    info["local_error_tol"] = hr.info.local_error_tol;
    info["max_local_error"] = hr.info.max_local_error;
    info["u_min"] = hr.info.u_min;
    info["u_max"] = hr.info.u_max;
    info["solver_seconds"] = hr.info.wall_seconds;
    run.m.results = info;
    print(info);
    const bool bounded = hr.info.u_min >= -1e-5 && hr.info.u_max <= 1 + 1e-5;  // CG tolerance
    return run.finish(bounded ? kOk : kQuality);
}

int cmd_mc(Run& run, const Shape& s, const std::vector<double>& ts, double paths, double dt_fraction,
           double C, std::uint64_t seed, bool bridge) {
    json info;
    auto poly = build_shape(s, 0.0, info);
    heat::McOptions opt;
    opt.seed = seed;
    opt.bridge_correction = bridge;
    run.m.seed = seed;
    json rows = json::array();
    for (double t : ts) {
        auto r = heat::mc_heat_content(poly, C, t, static_cast<std::size_t>(paths), t * dt_fraction, opt);
        rows.push_back({{"t", t}, {"estimate", r.estimate}, {"stderr", r.stderr_}, {"paths", r.paths},
                        {"absorbed", r.absorbed}});
        info["area"] = r.area;
    }
    info["estimates"] = rows;
    info["bridge_correction"] = bridge;
    io::write_json(run.file(".json"), info);
    run.output(run.file(".json"));
    run.m.results = info;
    print(info);
    return run.finish(kOk);
}

struct TubeArgs {
    double res = 1024;
    std::optional<double> tmin, tmax, fit_lo, fit_hi;
    double period = 0.0, min_decades = 2.0;
    int trend_degree = 1;
    double max_mem_mb = 4096;
};

int cmd_tube(Run& run, const Shape& s, const TubeArgs& a) {
    json info;
    auto poly = build_shape(s, a.res, info);
    check_budget(poly, a.res, a.max_mem_mb, 40.0);
    auto grid = std::make_shared<const geometry::GridDomain>(geometry::rasterize(poly, a.res));
    auto probe = tube::tube_function(grid, {});
    const double rin = tube::inradius(probe);
    const double lo = a.tmin.value_or(grid->h()), hi = a.tmax.value_or(rin);
    auto t = mellin::log_grid(lo, hi, 64);
    tube::TubeRun tr;
    tr.grid = grid;
    tr.sorted_distances = std::move(probe.sorted_distances);
    for (double x : t) {
        tr.V.t.push_back(x);
        tr.V.v.push_back(tr.volume(x));
    }
    io::write_series_csv(run.file(".csv"), tr.V, "t", "V");
    io::svg_loglog(run.file(".svg"), "tube function", {{"V(t)", tr.V}}, "t", "V");
    run.output(run.file(".csv"));
    run.output(run.file(".svg"));
    info["resolution"] = a.res;
    info["h"] = grid->h();
    info["inradius"] = rin;
    int code = kOk;
    try {
        tube::FitWindow w{a.fit_lo, a.fit_hi, a.period, a.trend_degree, a.min_decades};
        auto f = tube::minkowski_fit(tr, 2, w);
        info["minkowski"] = {{"dim", f.dim}, {"slope", f.slope}, {"r2", f.r2}, {"t_lo", f.t_lo},
                             {"t_hi", f.t_hi}};
        if (a.period > 0)
            info["minkowski"]["harmonic"] = {{"period", f.period}, {"amplitude", f.amplitude},
                                             {"variance_reduction", f.variance_reduction}};
    } catch (const DomainError& e) {
        std::cerr << "warning: " << e.what() << "\n";
        info["minkowski"] = {{"error", e.what()}};
        code = kQuality;
    }
    run.m.results = info;
    print(info);
    return run.finish(code);
}

struct FitArgs {
    std::string heat, dims;
    int k = 0, N = 2;
    std::optional<double> T, sigma0, fit_lo, fit_hi, data_lo;
    double delta = 1.0, sigma_R = 0.0, max_residual = 0.05;
    bool fit_coefficients = false;
};

int cmd_fit(Run& run, const Profile& pa, const FitArgs& a) {
    auto p = build_profile(pa);
    auto E = io::read_series_csv(a.heat);
    run.m.inputs.push_back(a.heat);
    if (a.data_lo) {
        TimeSeries kept;
        for (std::size_t i = 0; i < E.size(); ++i)
            if (E.t[i] >= *a.data_lo) {
                kept.t.push_back(E.t[i]);
                kept.v.push_back(E.v[i]);
            }
        E = std::move(kept);
    }
    auto cls = zeta::classify_lattice(p);
    const double D = zeta::moran_dimension(p);
    const double T = a.T.value_or(cls.kind == zeta::LatticeKind::Lattice
                                      ? 3.0 * 2.0 * std::numbers::pi / std::log(1.0 / cls.lambda0) + 1e-9
                                      : 20.0);
    zeta::ComplexDimensionSet dims;
    if (!a.dims.empty()) {
        dims = io::dims_from_json(io::read_json(a.dims));
        run.m.inputs.push_back(a.dims);
    } else {
        dims = zeta::complex_dimensions(p, zeta::default_window(p, T), cls);
    }
    if (!dims.undecided.empty()) throw NumericError("dimension set has undecided boxes");
    const double lo = a.fit_lo.value_or(E.t.front()), hi = a.fit_hi.value_or(E.t.back());
    std::vector<expansion::Term> terms;
    json info;
    if (a.fit_coefficients) {
        std::vector<cplx> omegas;
        for (const auto& pole : dims.poles)
            if (std::abs(pole.omega.imag()) <= T) {
                if (pole.multiplicity != 1) throw DomainError("multiple pole: no residue formula");
                omegas.push_back(pole.omega);
            }
        terms = expansion::fit_residues(E, omegas, a.N, lo, hi);
    } else {
        auto hz = expansion::make_heat_zeta(p, E, a.sigma0.value_or(D / 2), a.sigma_R, a.delta, a.N);
        terms = expansion::heat_terms(hz, dims, T);
    }
    auto fit = expansion::build_expansion(E, terms, a.k, a.N, T, a.delta, lo, hi);
    io::write_series_csv(run.file("_residual.csv"), fit.residual, "t", "residual");
    io::write_json(run.file(".json"), io::to_json(fit, run.file("_residual.csv")));
    const TimeSeries measured = a.k == 0 ? E : expansion::antiderivative(E, a.k);
    io::svg_loglog(run.file(".svg"), "explicit formula, k = " + std::to_string(a.k),
                   {{"measured", measured, "#1f77b4"},
                    {"reconstruction", fit.reconstruction, "#d62728", true},
                    {"|residual|", fit.residual, "#7f7f7f"}},
                   "t", "E");
    for (auto s : {"_residual.csv", ".json", ".svg"}) run.output(run.file(s));
    info["terms"] = fit.terms.size();
    info["T"] = T;
    info["k"] = a.k;
    info["source"] = a.fit_coefficients ? "fitted" : "analytic";
    info["max_relative_residual"] = fit.max_relative_residual;
    info["window"] = {lo, hi};
    run.m.results = info;
    print(info);
    return run.finish(fit.max_relative_residual <= a.max_residual ? kOk : kQuality);
}

struct CompareArgs {
    std::string tube, heat;
    std::optional<double> tube_dim, heat_exponent, tube_lo, tube_hi, heat_lo, heat_hi;
    std::optional<double> search_lo, search_hi;
    double tolerance = 0.1;
    int N = 2;
};

int cmd_compare(Run& run, const CompareArgs& a) {
    json info;
    double dim, hexp;
    if (a.tube_dim) {
        dim = *a.tube_dim;
    } else {
        if (a.tube.empty()) throw DomainError("give --tube CSV or --tube-dim");
        auto V = io::read_series_csv(a.tube);
        run.m.inputs.push_back(a.tube);
        auto f = fit_loglog(V, a.tube_lo.value_or(V.t.front()), a.tube_hi.value_or(V.t.back()));
        dim = a.N - f.slope;
        info["tube_fit"] = {{"slope", f.slope}, {"r2", f.r2}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi}};
    }
    if (a.heat_exponent) {
        hexp = *a.heat_exponent;
    } else {
        if (a.heat.empty()) throw DomainError("give --heat CSV or --heat-exponent");
        auto E = io::read_series_csv(a.heat);
        run.m.inputs.push_back(a.heat);
        PowerFit f = a.heat_lo || a.heat_hi
                         ? fit_loglog(E, a.heat_lo.value_or(E.t.front()), a.heat_hi.value_or(E.t.back()))
                         : cleanest_decade(E, a.search_lo.value_or(E.t.front()),
                                           a.search_hi.value_or(E.t.back() / 10.0));
        hexp = f.slope;
        info["heat_fit"] = {{"slope", f.slope}, {"r2", f.r2}, {"t_lo", f.t_lo}, {"t_hi", f.t_hi}};
    }
    auto r = tube::compare_exponents(dim, hexp, a.N, a.tolerance);
    info["tube_dim"] = r.tube_dim;
    info["tube_exponent"] = r.tube_exponent;
    info["heat_exponent"] = r.heat_exponent;
    info["slope_ratio"] = r.slope_ratio;
    info["normalized_ratio"] = r.normalized_ratio;
    info["consistent"] = r.consistent;
    info["note"] = r.note;
    io::write_json(run.file(".json"), info);
    run.output(run.file(".json"));
    run.m.results = info;
    print(info);
    return run.finish(r.consistent ? kOk : kQuality);
}

int cmd_selftest(Run& run) {
    int failed = 0;
    json checks = json::array();
    auto check = [&](const std::string& name, bool ok, double value) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << value << ")\n";
        checks.push_back({{"name", name}, {"pass", ok}, {"value", value}});
        failed += !ok;
    };
    auto p = zeta::gkf_profile(3, 1.0 / 3.0);
    const double D = zeta::moran_dimension(p);
    check("moran dimension of GKF(3,1/3)", std::abs(D - std::log(4.0) / std::log(3.0)) < 1e-10, D);
    auto d = zeta::complex_dimensions(p, zeta::default_window(p, 20.0), zeta::classify_lattice(p));
    check("7 poles with |Im| <= 20", d.poles.size() == 7, static_cast<double>(d.poles.size()));
    const cplx res = zeta::residue_check(p, D);
    const double lead = 1.0 / zeta::dirichlet_poly_derivative(p, D).real();
    check("contour residue at D", std::abs(res - lead) < 1e-8 * lead, res.real());
    mellin::ClosedForm sq{[](double t) { return t * t; }, -2.0, {}};
    const double m = mellin::truncated_mellin(sq, 0.0, 1.0, 1.0).value.real();
    check("M[t^2](1) = 1/3", std::abs(m - 1.0 / 3.0) < 1e-10, m);
    auto g = geometry::rasterize(geometry::square(), 64);
    auto hr = heat::fd_heat_solve(g, 1.0, {0.05});
    double S = 0;
    for (int k = 0; k < 50; ++k) {
        const double a = (2 * k + 1) * std::numbers::pi;
        S += 8.0 / (a * a) * std::exp(-a * a * 0.05);
    }
    const double exact = 1.0 - S * S;
    check("square heat content at t = 0.05, resolution 64", std::abs(hr.E.v[0] / exact - 1) < 0.02,
          hr.E.v[0]);
    run.m.results = {{"checks", checks}};
    return run.finish(failed == 0 ? kOk : kQuality);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex dimensions and heat content of generalized von Koch snowflakes", "fhl"};
    app.set_version_flag("--version", cli::kVersion);
    app.set_config("--config", "", "key=value file supplying any flag; flags win");
    app.require_subcommand(1);

    Shape shape;
    Profile prof;
    std::map<std::string, std::string> out;
    auto out_opt = [&](CLI::App* s) {
        auto& o = out[s->get_name()] = s->get_name();
        s->add_option("--out", o, "output prefix")->capture_default_str();
    };

    auto* gkf = app.add_subcommand("gkf", "build a snowflake and export its boundary");
    add_shape(gkf, shape);
    out_opt(gkf);

    double sigma0 = 0.0;
    auto* classify = app.add_subcommand("classify", "lattice type and admissibility");
    add_profile(classify, prof);
    classify->add_option("--sigma0", sigma0, "remainder order")->capture_default_str();
    out_opt(classify);

    double T = 20.0;
    std::optional<double> smin, smax;
    auto* dims = app.add_subcommand("dims", "complex dimensions in a window");
    add_profile(dims, prof);
    dims->add_option("--T", T, "max |Im|")->capture_default_str();
    dims->add_option("--sigma-min", smin);
    dims->add_option("--sigma-max", smax);
    out_opt(dims);

    HeatArgs ha;
    auto* heat = app.add_subcommand("heat", "finite-difference heat content E(t)");
    add_shape(heat, shape);
    heat->add_option("--res", ha.res, "cells per unit length")->capture_default_str();
    heat->add_option("--C", ha.C, "diffusivity")->capture_default_str();
    heat->add_option("--tmin", ha.tmin)->capture_default_str();
    heat->add_option("--tmax", ha.tmax)->capture_default_str();
    heat->add_option("--per-decade", ha.per_decade)->capture_default_str();
    heat->add_option("--step-ratio", ha.step_ratio, "dt <= ratio * t")->capture_default_str();
    heat->add_option("--cg-tol", ha.cg_tol)->capture_default_str();
    heat->add_flag("--no-multigrid", ha.no_multigrid, "Jacobi-preconditioned CG");
    heat->add_flag("--pgm", ha.pgm, "also write the interior mask");
    heat->add_flag("--quiet", ha.quiet, "no progress on stderr");
    heat->add_option("--max-mem-mb", ha.max_mem_mb)->capture_default_str();
    out_opt(heat);

    std::vector<double> mc_t;
    double paths = 1e5, dt_fraction = 0.01, mcC = 1.0;
    std::uint64_t seed = 20240611;
    bool bridge = false;
    auto* mc = app.add_subcommand("mc", "Monte Carlo heat content");
    add_shape(mc, shape);
    mc->add_option("--t", mc_t, "times")->required();
    mc->add_option("--paths", paths)->capture_default_str();
    mc->add_option("--dt-fraction", dt_fraction, "dt = fraction * t, at most 0.01")->capture_default_str();
    mc->add_option("--C", mcC)->capture_default_str();
    mc->add_option("--seed", seed)->capture_default_str();
    mc->add_flag("--bridge", bridge, "Brownian-bridge crossing correction");
    out_opt(mc);

    TubeArgs ta;
    auto* tube = app.add_subcommand("tube", "tube function V(t) and Minkowski fit");
    add_shape(tube, shape);
    tube->add_option("--res", ta.res)->capture_default_str();
    tube->add_option("--tmin", ta.tmin);
    tube->add_option("--tmax", ta.tmax);
    tube->add_option("--fit-lo", ta.fit_lo);
    tube->add_option("--fit-hi", ta.fit_hi);
    tube->add_option("--period", ta.period, "harmonic period (multiplicative, as a log)");
    tube->add_option("--trend-degree", ta.trend_degree)->capture_default_str();
    tube->add_option("--min-decades", ta.min_decades)->capture_default_str();
    tube->add_option("--max-mem-mb", ta.max_mem_mb)->capture_default_str();
    out_opt(tube);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "residues and explicit-formula reconstruction");
    add_profile(fit, prof);
    fit->add_option("--heat", fa.heat, "t,E CSV")->required();
    fit->add_option("--dims", fa.dims, "dimension set JSON");
    fit->add_option("--k", fa.k)->capture_default_str();
    fit->add_option("--N", fa.N)->capture_default_str();
    fit->add_option("--T", fa.T);
    fit->add_option("--delta", fa.delta)->capture_default_str();
    fit->add_option("--sigma0", fa.sigma0, "small-t exponent of t^{-N/2} E (default D/2)");
    fit->add_option("--sigma-R", fa.sigma_R)->capture_default_str();
    fit->add_option("--data-lo", fa.data_lo, "ignore samples below this t (unresolved by the grid)");
    fit->add_option("--fit-lo", fa.fit_lo);
    fit->add_option("--fit-hi", fa.fit_hi);
    fit->add_option("--max-residual", fa.max_residual)->capture_default_str();
    fit->add_flag("--fit-coefficients", fa.fit_coefficients, "least-squares residues (labelled fitted)");
    out_opt(fit);

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "tube vs heat exponent ratio");
    compare->add_option("--tube", ca.tube, "t,V CSV");
    compare->add_option("--tube-dim", ca.tube_dim);
    compare->add_option("--tube-lo", ca.tube_lo);
    compare->add_option("--tube-hi", ca.tube_hi);
    compare->add_option("--heat", ca.heat, "t,E CSV");
    compare->add_option("--heat-exponent", ca.heat_exponent);
    compare->add_option("--heat-lo", ca.heat_lo);
    compare->add_option("--heat-hi", ca.heat_hi);
    compare->add_option("--search-lo", ca.search_lo, "cleanest-decade search start");
    compare->add_option("--search-hi", ca.search_hi, "cleanest-decade search end");
    compare->add_option("--tolerance", ca.tolerance)->capture_default_str();
    compare->add_option("--N", ca.N)->capture_default_str();
    out_opt(compare);

    auto* selftest = app.add_subcommand("selftest", "quick built-in checks");
    out_opt(selftest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        Run run(&app, sub, out.at(sub->get_name()));
        if (sub == gkf) return cmd_gkf(run, shape);
        if (sub == classify) return cmd_classify(run, prof, sigma0);
        if (sub == dims) return cmd_dims(run, prof, T, smin, smax);
        if (sub == heat) return cmd_heat(run, shape, ha);
        if (sub == mc) return cmd_mc(run, shape, mc_t, paths, dt_fraction, mcC, seed, bridge);
        if (sub == tube) return cmd_tube(run, shape, ta);
        if (sub == fit) return cmd_fit(run, prof, fa);
        if (sub == compare) return cmd_compare(run, ca);
        if (sub == selftest) return cmd_selftest(run);
    } catch (const ResourceError& e) {
        std::cerr << "resource: " << e.what() << "\n";
        return kResource;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource: out of memory\n";
        return kResource;
    } catch (const CoverageError& e) {
        std::cerr << "error: " << e.what() << " (data needed up to t = " << e.required() << ")\n";
        return kUsage;
    } catch (const NumericError& e) {
        std::cerr << "numeric: " << e.what() << "\n";
        return kQuality;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
