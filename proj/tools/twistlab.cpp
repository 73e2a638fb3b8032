#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "twistlab/aubry.hpp"
#include "twistlab/characteristics.hpp"
#include "twistlab/connecting.hpp"
#include "twistlab/io.hpp"
#include "twistlab/regularity.hpp"
#include "twistlab/systems.hpp"
#include "twistlab/twistmap.hpp"
#include "twistlab/weakkam.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace twistlab;

namespace {

struct RunConfig {
    std::string system = "standard";
    double eps = 0.0;
    int nx = 128, nt = 64;
    double tol = 1e-7;
    double tol_el = 1e-6;
    double aubry_tol = 0.0;     // 0: solver default
    double boundary_tol = 0.1;
    double kink_threshold = 0.0; // 0: solver default
    int seed = 12345;
    int threads = 1;
    bool json_out = false;
    std::string out = "out";
    std::string cache_dir; // resolved: flag > env > out/cache
    std::vector<double> v_cos = {1.0}, v_sin = {};
    std::vector<double> w_cos = {1.0}, w_sin = {};
};

void load_config_file(RunConfig& cfg, const std::string& path) {
    json j = json::parse(io::read_text(path));
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("system", cfg.system);
    get("eps", cfg.eps);
    get("nx", cfg.nx);
    get("nt", cfg.nt);
    get("tol", cfg.tol);
    get("tol_el", cfg.tol_el);
    get("aubry_tol", cfg.aubry_tol);
    get("boundary_tol", cfg.boundary_tol);
    get("kink_threshold", cfg.kink_threshold);
    get("seed", cfg.seed);
    get("threads", cfg.threads);
    get("out", cfg.out);
    get("cache_dir", cfg.cache_dir);
    if (j.contains("V")) {
        if (j["V"].contains("cos")) cfg.v_cos = j["V"]["cos"].get<std::vector<double>>();
        if (j["V"].contains("sin")) cfg.v_sin = j["V"]["sin"].get<std::vector<double>>();
    }
    if (j.contains("W")) {
        if (j["W"].contains("cos")) cfg.w_cos = j["W"]["cos"].get<std::vector<double>>();
        if (j["W"].contains("sin")) cfg.w_sin = j["W"]["sin"].get<std::vector<double>>();
    }
}

SystemSpec make_sys(const RunConfig& cfg) {
    if (cfg.eps < 0.0) throw Error(ErrorCode::Usage, "eps must be >= 0");
    if (cfg.nx < 8 || cfg.nt < 4) throw Error(ErrorCode::Usage, "grid too small");
    if (cfg.tol <= 0.0 || cfg.tol_el <= 0.0 || cfg.boundary_tol <= 0.0)
        throw Error(ErrorCode::Usage, "tolerances must be positive");
    TrigSeries V{cfg.v_cos, cfg.v_sin}, W{cfg.w_cos, cfg.w_sin};
    return make_system(cfg.system, cfg.eps, V, W);
}

json config_json(const RunConfig& cfg) {
    return json{{"system", cfg.system},
                {"eps", cfg.eps},
                {"nx", cfg.nx},
                {"nt", cfg.nt},
                {"tol", cfg.tol},
                {"tol_el", cfg.tol_el},
                {"aubry_tol", cfg.aubry_tol},
                {"boundary_tol", cfg.boundary_tol},
                {"kink_threshold", cfg.kink_threshold},
                {"seed", cfg.seed},
                {"threads", cfg.threads},
                {"V", {{"cos", cfg.v_cos}, {"sin", cfg.v_sin}}},
                {"W", {{"cos", cfg.w_cos}, {"sin", cfg.w_sin}}}};
}

/// Collects artifacts for one experiment directory and finishes with a
/// self-describing manifest.
struct Emitter {
    fs::path dir;
    RunConfig cfg;
    std::string command;
    json result; // main machine-readable result (also stdout with --json)
    std::vector<std::string> artifacts;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::vector<std::vector<double>>& rows) {
        io::write_csv(dir / name, header, rows);
        artifacts.push_back(name);
    }
    void svg(const std::string& name, const std::string& body) {
        io::write_text_atomic(dir / name, body);
        artifacts.push_back(name);
    }
    void json_file(const std::string& name, const json& j) {
        io::write_text_atomic(dir / name, j.dump(2) + "\n");
        artifacts.push_back(name);
    }
    void finish() {
        json_file(command + ".json", result);
        double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json manifest{{"command", command},
                      {"version", io::kVersionTag},
                      {"config", config_json(cfg)},
                      {"artifacts", artifacts},
                      {"wall_time_s", wall}};
        io::write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
        if (cfg.json_out) std::cout << result.dump(2) << "\n";
    }
};

Emitter make_emitter(const RunConfig& cfg, const std::string& command) {
    Emitter em;
    em.dir = fs::path(cfg.out) / command;
    fs::create_directories(em.dir);
    em.cfg = cfg;
    em.command = command;
    return em;
}

std::string sys_tag(const RunConfig& cfg) {
    std::string t = cfg.system + "|eps=" + io::fmt(cfg.eps) + "|V=";
    for (double v : cfg.v_cos) t += io::fmt(v) + ",";
    t += ";";
    for (double v : cfg.v_sin) t += io::fmt(v) + ",";
    t += "|W=";
    for (double v : cfg.w_cos) t += io::fmt(v) + ",";
    t += ";";
    for (double v : cfg.w_sin) t += io::fmt(v) + ",";
    return t;
}

/// Cached continuous solve: the section row and alpha survive in the cache as
/// a CSV payload keyed by all inputs.
WeakKamSolution cached_solve(const RunConfig& cfg, const SystemSpec& sys, double c) {
    fs::path cdir = cfg.cache_dir;
    auto key = io::cache_key("wkam", sys_tag(cfg) + "|c=" + io::fmt(c) +
                                         "|nx=" + std::to_string(cfg.nx) +
                                         "|nt=" + std::to_string(cfg.nt) +
                                         "|tol=" + io::fmt(cfg.tol));
    if (!cdir.empty()) {
        std::optional<std::string> hit;
        try {
            hit = io::cache_get(cdir, key);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::CorruptCache) throw; // evicted: recompute
        }
        if (hit) {
            // payload: first line alpha, then one row value per line
            std::istringstream in(*hit);
            double alpha;
            in >> alpha;
            std::vector<double> row(cfg.nx);
            for (double& v : row) in >> v;
            if (in) {
                WeakKamSolution sol;
                sol.sys = sys;
                sol.c = c;
                sol.alpha = alpha;
                sol.backend = Backend::continuous;
                sol.u.nx = cfg.nx;
                sol.u.nt = cfg.nt;
                detail::fill_rows(sol, row);
                return sol;
            }
        }
    }
    WeakKamSolution sol = solve_weak_kam(sys, c, cfg.nx, cfg.nt, cfg.tol);
    if (!cdir.empty()) {
        std::ostringstream out;
        out << io::fmt(sol.alpha);
        for (int i = 0; i < sol.u.nx; ++i) out << "\n" << io::fmt(sol.u.at(0, i));
        io::cache_put(cdir, key, out.str());
    }
    return sol;
}

int run_portrait(RunConfig cfg, int n_seeds, int iters) {
    SystemSpec sys = make_sys(cfg);
    std::mt19937_64 rng(std::uint64_t(cfg.seed));
    std::uniform_real_distribution<double> ux(0.0, 1.0), up(-0.5, 1.5);
    std::vector<std::array<double, 2>> seeds;
    for (int i = 0; i < n_seeds; ++i) seeds.push_back({ux(rng), up(rng)});
    PointCloud pc = phase_portrait(sys, seeds, iters);

    Emitter em = make_emitter(cfg, "portrait");
    std::vector<std::vector<double>> rows;
    rows.reserve(pc.x.size());
    for (std::size_t i = 0; i < pc.x.size(); ++i)
        rows.push_back({double(pc.seed_id[i]), pc.x[i], pc.p[i]});
    em.csv("portrait.csv", {"seed", "x", "p"}, rows);
    em.svg("portrait.svg", io::svg_scatter(pc.x, pc.p, &pc.seed_id));
    em.result = {{"seeds", n_seeds}, {"iters", iters}, {"points", pc.x.size()}};
    em.finish();
    return 0;
}

int run_beta(RunConfig cfg, int qmax, double hmin, double hmax) {
    SystemSpec sys = make_sys(cfg);
    BetaProfile prof = beta_profile(sys, qmax, hmin, hmax);
    Emitter em = make_emitter(cfg, "beta");
    std::vector<std::vector<double>> rows;
    std::vector<double> hs, bs;
    for (const auto& s : prof.samples) {
        rows.push_back({double(s.p), double(s.q), s.h, s.beta});
        hs.push_back(s.h);
        bs.push_back(s.beta);
    }
    em.csv("beta.csv", {"p", "q", "h", "beta"}, rows);
    em.svg("beta.svg", io::svg_lines(hs, {bs}));
    em.result = {{"qmax", qmax}, {"h_min", hmin}, {"h_max", hmax},
                 {"samples", prof.samples.size()}};
    em.finish();
    return 0;
}

int run_flats(RunConfig cfg, int p, int q) {
    SystemSpec sys = make_sys(cfg);
    auto [cm, cp] = flat_edges(sys, p, q);
    Emitter em = make_emitter(cfg, "flats");
    em.result = {{"p", p}, {"q", q}, {"c_minus", cm}, {"c_plus", cp},
                 {"width", cp - cm}};
    em.finish();
    return 0;
}

int run_upq(RunConfig cfg, int p, int q, int n_grid, int window, double c, bool has_c) {
    SystemSpec sys = make_sys(cfg);
    GridSection gs = build_u_pq(sys, p, q, n_grid, window);
    Emitter em = make_emitter(cfg, "upq");
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n_grid; ++i)
        rows.push_back({gs.x[i], gs.u_minus[i], gs.u_plus[i], gs.p_minus[i], gs.p_plus[i]});
    em.csv("upq.csv", {"x", "u_minus", "u_plus", "p_minus", "p_plus"}, rows);
    em.svg("upq.svg", io::svg_lines(gs.x, {gs.u_minus, gs.u_plus}));
    em.result = {{"p", p}, {"q", q}, {"n_grid", n_grid}, {"window", window}};
    if (has_c) em.result["splitting_point"] = splitting_point(sys, p, q, c, 0, window);
    em.finish();
    return 0;
}

int run_wkam(RunConfig cfg, double c, const std::string& backend) {
    SystemSpec sys = make_sys(cfg);
    Emitter em = make_emitter(cfg, "wkam");
    if (backend == "discrete") {
        auto [u, alpha] = discrete_weak_kam(sys, c, cfg.nx);
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < cfg.nx; ++i) rows.push_back({double(i) / cfg.nx, u[i]});
        em.csv("wkam.csv", {"x", "u"}, rows);
        em.result = {{"backend", "discrete"}, {"c", c}, {"alpha", alpha}};
    } else if (backend == "continuous") {
        WeakKamSolution sol = cached_solve(cfg, sys, c);
        std::vector<std::vector<double>> rows;
        int kinks = 0;
        for (int i = 0; i < sol.u.nx; ++i) {
            bool s = sol.singular_at(0, i);
            kinks += s;
            rows.push_back({double(i) / sol.u.nx, sol.u.at(0, i), sol.p_left.at(0, i),
                            sol.p_right.at(0, i), double(s)});
        }
        em.csv("wkam.csv", {"x", "u", "p_left", "p_right", "singular"}, rows);
        em.result = {{"backend", "continuous"},
                     {"c", c},
                     {"alpha", sol.alpha},
                     {"residual", sol.residual},
                     {"iterations", sol.iterations},
                     {"kinks", kinks},
                     {"lipschitz_K", sol.lipschitz_K},
                     {"semiconcavity_C", sol.semiconcavity_C}};
    } else {
        throw Error(ErrorCode::Usage, "backend must be continuous or discrete");
    }
    em.finish();
    return 0;
}

int run_gc(RunConfig cfg, double c, double x0, double t0, double T) {
    SystemSpec sys = make_sys(cfg);
    WeakKamSolution sol = cached_solve(cfg, sys, c);
    Characteristic chi = integrate_gc(sol, x0, t0, T);
    Emitter em = make_emitter(cfg, "gc");
    std::vector<std::vector<double>> rows;
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < chi.x_lift.size(); ++i) {
        double t = chi.t0 + double(i) * chi.dtau;
        rows.push_back({t, chi.x_lift[i], double(chi.singular[i])});
        ts.push_back(t);
        xs.push_back(chi.x_lift[i]);
    }
    em.csv("gc.csv", {"t", "x", "singular"}, rows);
    em.svg("gc.svg", io::svg_lines(ts, {xs}));
    em.result = {{"c", c}, {"x0", x0}, {"t0", t0}, {"T", T},
                 {"samples", chi.x_lift.size()}, {"desingularized", chi.desingularized}};
    em.finish();
    return 0;
}

int run_rho(RunConfig cfg, double c, double x0, double T, int periods) {
    SystemSpec sys = make_sys(cfg);
    WeakKamSolution sol = cached_solve(cfg, sys, c);
    Characteristic chi = integrate_gc(sol, x0, 0.0, T);
    double rho = rotation_number(chi, periods);
    Emitter em = make_emitter(cfg, "rho");
    em.result = {{"c", c}, {"x0", x0}, {"T", T}, {"periods", periods}, {"rho", rho}};
    em.finish();
    return 0;
}

int run_holder(RunConfig cfg, double cmin, double cmax, int n_c, int pairs) {
    if (n_c < 3) throw Error(ErrorCode::Usage, "need n_c >= 3");
    SystemSpec sys = make_sys(cfg);
    std::vector<double> cs;
    bool has_zero = false;
    for (int i = 0; i < n_c; ++i) {
        double c = cmin + (cmax - cmin) * double(i) / (n_c - 1);
        if (std::abs(c) < 1e-14) { c = 0.0; has_zero = true; }
        cs.push_back(c);
    }
    if (!has_zero)
        throw Error(ErrorCode::Usage, "holder: the c sweep must contain c = 0");
    std::vector<WeakKamSolution> sweep(cs.size());
    int nthreads = std::max(1, cfg.threads);
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errs(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < cs.size();)
                    sweep[i] = pinned_solution(sys, cs[i], cfg.nx, cfg.nt);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);

    SigmaTable table = sigma_of_c(sweep);
    HolderReport rep = holder_check(table, sweep, pairs);
    Emitter em = make_emitter(cfg, "holder");
    std::vector<std::vector<double>> rows;
    for (const auto& e : table.entries) rows.push_back({e.c, e.sigma, e.lipschitz_C});
    em.csv("sigma.csv", {"c", "sigma", "lipschitz_C"}, rows);
    em.result = {{"c_min", cmin}, {"c_max", cmax}, {"n_c", n_c},
                 {"pairs", rep.pairs}, {"max_ratio", rep.max_ratio},
                 {"grid_slack", rep.grid_slack}, {"pass", rep.pass}};
    em.finish();
    return rep.pass ? 0 : 2;
}

int run_connect(RunConfig cfg, double c1, double c2, double max_step, int T) {
    SystemSpec sys = make_sys(cfg);
    auto chain = transition_chain(sys, c1, c2, max_step, cfg.boundary_tol, T);
    Emitter em = make_emitter(cfg, "connect");
    std::vector<std::vector<double>> rows;
    json links = json::array();
    for (std::size_t l = 0; l < chain.size(); ++l) {
        const auto& orb = chain[l];
        for (std::size_t k = 0; k < orb.x.size(); ++k)
            rows.push_back({double(l), double(int(k) - orb.spec.T0), orb.x[k]});
        links.push_back({{"c", orb.spec.c},
                         {"c_prime", orb.spec.c_prime},
                         {"action", orb.action},
                         {"el_residual", orb.el_residual},
                         {"boundary_left", orb.boundary_left},
                         {"boundary_right", orb.boundary_right},
                         {"mu_clearance", orb.mu_clearance},
                         {"mu_support", {orb.spec.mu.lo, orb.spec.mu.hi}}});
    }
    em.csv("connect.csv", {"link", "i", "x"}, rows);
    em.result = {{"c1", c1}, {"c2", c2}, {"links", links}};
    em.finish();
    return 0;
}

int run_atlas(RunConfig cfg, double cmin, double cmax, int n_c, double dc_tol) {
    if (n_c < 2) throw Error(ErrorCode::Usage, "need n_c >= 2");
    SystemSpec sys = make_sys(cfg);
    std::vector<double> grid;
    for (int i = 0; i < n_c; ++i)
        grid.push_back(cmin + (cmax - cmin) * double(i) / (n_c - 1));
    InstabilityAtlas atlas = detect_instability(sys, grid, cfg.nx, cfg.nt, dc_tol);
    Emitter em = make_emitter(cfg, "atlas");
    json ivs = json::array();
    std::vector<std::vector<double>> rows;
    for (const auto& iv : atlas.intervals) {
        ivs.push_back({{"a", iv.a}, {"b", iv.b}, {"p", iv.p}, {"q", iv.q},
                       {"flagged_c", iv.flagged_c}});
        for (double c : iv.flagged_c) rows.push_back({c, iv.a, iv.b});
    }
    em.csv("atlas.csv", {"c", "interval_a", "interval_b"}, rows);
    em.result = {{"eps", atlas.eps}, {"c_min", cmin}, {"c_max", cmax},
                 {"intervals", ivs}};
    em.finish();
    return 0;
}

int run_validate(RunConfig cfg, int grid_density) {
    SystemSpec sys = make_sys(cfg);
    ValidationReport r = validate_standing_assumptions(sys, grid_density);
    SymplecticReport s = check_symplectic(sys, 1000, 0.37, 4096, unsigned(cfg.seed));
    Emitter em = make_emitter(cfg, "validate");
    bool pass = r.pass && s.max_det_err < 1e-9 && s.exactness < 1e-9;
    em.result = {{"min_Lvv", r.min_Lvv},
                 {"min_Hpp", r.min_Hpp},
                 {"min_twist", r.min_twist},
                 {"max_legendre", r.max_legendre},
                 {"max_periodicity", r.max_periodicity},
                 {"max_det_err", s.max_det_err},
                 {"exactness", s.exactness},
                 {"pass", pass}};
    em.finish();
    return pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for exact symplectic twist maps"};
    app.require_subcommand(1);

    RunConfig cfg;
    // config file first so that explicit flags can override its values
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") {
            try {
                load_config_file(cfg, argv[i + 1]);
            } catch (const std::exception& e) {
                std::cerr << "error: bad config file: " << e.what() << "\n";
                return 2;
            }
        }
    if (const char* env = std::getenv("TWISTLAB_CACHE_DIR"); env && cfg.cache_dir.empty())
        cfg.cache_dir = env;

    std::string config_path;
    app.add_option("--config", config_path, "run configuration file (JSON)");
    app.add_option("--eps", cfg.eps, "perturbation strength");
    app.add_option("--system", cfg.system, "system name");
    app.add_option("--nx", cfg.nx, "space grid");
    app.add_option("--nt", cfg.nt, "time grid");
    app.add_option("--tol", cfg.tol, "fixed point tolerance");
    app.add_option("--boundary-tol", cfg.boundary_tol, "connecting orbit boundary tolerance");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--threads", cfg.threads, "parallelism cap for sweeps");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--cache", cfg.cache_dir, "cache directory (default $TWISTLAB_CACHE_DIR)");
    app.add_flag("--json", cfg.json_out, "print the main result JSON to stdout");

    int n_seeds = 200, iters = 1000;
    auto* portrait = app.add_subcommand("portrait", "phase portrait point cloud");
    portrait->add_option("--seeds", n_seeds);
    portrait->add_option("--iters", iters);

    int qmax = 12;
    double hmin = -1.2, hmax = 1.2;
    auto* beta = app.add_subcommand("beta", "minimal average action over Farey samples");
    beta->add_option("--qmax", qmax);
    beta->add_option("--h-min", hmin);
    beta->add_option("--h-max", hmax);

    int fp = 0, fq = 1;
    auto* flats = app.add_subcommand("flats", "one-sided subderivatives of beta at p/q");
    flats->add_option("--p", fp);
    flats->add_option("--q", fq);

    int up = 0, uq = 1, n_grid = 101, window = 60;
    double uc = 0.0;
    auto* upq = app.add_subcommand("upq", "one-sided periodic primitives and splitting");
    upq->add_option("--p", up);
    upq->add_option("--q", uq);
    upq->add_option("--n-grid", n_grid);
    upq->add_option("--window", window);
    auto* uc_opt = upq->add_option("--c", uc, "splitting point at this class");

    double wc = 0.0;
    std::string backend = "continuous";
    auto* wkam = app.add_subcommand("wkam", "weak KAM solution and effective Hamiltonian");
    wkam->add_option("--c", wc);
    wkam->add_option("--backend", backend)->check(CLI::IsMember({"continuous", "discrete"}));

    double gc_c = 0.0, gc_x0 = 0.0, gc_t0 = 0.0, gc_T = 50.0;
    auto* gc = app.add_subcommand("gc", "generalized characteristic trajectory");
    gc->add_option("--c", gc_c);
    gc->add_option("--x0", gc_x0);
    gc->add_option("--t0", gc_t0);
    gc->add_option("--T", gc_T);

    double rc = 0.0, rx0 = 0.1, rT = 220.0;
    int rper = 200;
    auto* rho = app.add_subcommand("rho", "rotation number of a characteristic");
    rho->add_option("--c", rc);
    rho->add_option("--x0", rx0);
    rho->add_option("--T", rT);
    rho->add_option("--periods", rper);

    double hcmin = -0.4, hcmax = 0.4;
    int hn = 17, hpairs = 50;
    auto* holder = app.add_subcommand("holder", "Holder continuity report of the sigma sweep");
    holder->add_option("--c-min", hcmin);
    holder->add_option("--c-max", hcmax);
    holder->add_option("--n-c", hn);
    holder->add_option("--pairs", hpairs);

    double cc1 = -0.05, cc2 = 0.05, cstep = 0.1;
    int cT = 60;
    auto* connect = app.add_subcommand("connect", "transition chain of connecting orbits");
    connect->add_option("--c1", cc1);
    connect->add_option("--c2", cc2);
    connect->add_option("--max-step", cstep);
    connect->add_option("--T", cT);

    double acmin = -0.5, acmax = 0.5, adc = 5e-3;
    int an = 11;
    auto* atlas = app.add_subcommand("atlas", "instability intervals over a c scan");
    atlas->add_option("--c-min", acmin);
    atlas->add_option("--c-max", acmax);
    atlas->add_option("--n-c", an);
    atlas->add_option("--dc-tol", adc);

    int vdensity = 64;
    auto* validate = app.add_subcommand("validate", "standing assumption margins");
    validate->add_option("--grid-density", vdensity);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (cfg.cache_dir.empty()) cfg.cache_dir = (fs::path(cfg.out) / "cache").string();

    try {
        if (portrait->parsed()) return run_portrait(cfg, n_seeds, iters);
        if (beta->parsed()) return run_beta(cfg, qmax, hmin, hmax);
        if (flats->parsed()) return run_flats(cfg, fp, fq);
        if (upq->parsed()) return run_upq(cfg, up, uq, n_grid, window, uc, uc_opt->count() > 0);
        if (wkam->parsed()) return run_wkam(cfg, wc, backend);
        if (gc->parsed()) return run_gc(cfg, gc_c, gc_x0, gc_t0, gc_T);
        if (rho->parsed()) return run_rho(cfg, rc, rx0, rT, rper);
        if (holder->parsed()) return run_holder(cfg, hcmin, hcmax, hn, hpairs);
        if (connect->parsed()) return run_connect(cfg, cc1, cc2, cstep, cT);
        if (atlas->parsed()) return run_atlas(cfg, acmin, acmax, an, adc);
        if (validate->parsed()) return run_validate(cfg, vdensity);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case ErrorCode::Usage:
            case ErrorCode::AssumptionViolated:
            case ErrorCode::MonotonicityViolation:
                return 2;
            default:
                return 3; // numerical non-convergence family
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
