// Command-line front end: profile / vss / evolve / verify / trace / sweep.
// Single JSON config document, flags override fields. Exit codes:
// 0 pass, 1 check failure or solver divergence, 2 config error.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hjlab/profile.hpp"
#include "hjlab/scaling.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/trace.hpp"
#include "hjlab/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigError {
    std::vector<std::string> violations;
};

void fail_config(const ConfigError& err, bool json_errors) {
    if (json_errors) {
        json j{{"errors", err.violations}};
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& v : err.violations) {
            std::cerr << "config error: " << v << "\n";
        }
    }
}

json load_config(const std::string& path, ConfigError& err) {
    std::ifstream in(path);
    if (!in) {
        err.violations.push_back("config file not readable: " + path);
        return json::object();
    }
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        err.violations.push_back(std::string("config parse: ") + e.what());
        return json::object();
    }
}

hjlab::Grid parse_grid(const json& cfg, int dim, ConfigError& err) {
    hjlab::Grid g;
    g.dim = dim;
    if (!cfg.contains("grid")) {
        err.violations.push_back("missing field: grid");
        return g;
    }
    const json& jg = cfg["grid"];
    const std::string geo = jg.value("geometry", "cartesian");
    if (geo == "cartesian") {
        g.geometry = hjlab::Geometry::Cartesian1D;
    } else if (geo == "radial") {
        g.geometry = hjlab::Geometry::Radial;
    } else {
        err.violations.push_back("grid.geometry must be cartesian or radial");
    }
    g.x_min = jg.value("x_min", g.geometry == hjlab::Geometry::Radial ? 0.0
                                                                      : -1.0);
    g.x_max = jg.value("x_max", 1.0);
    g.n_cells = jg.value("n_cells", 0);
    if (g.n_cells < 3) err.violations.push_back("grid.n_cells must be >= 3");
    if (!(g.x_max > g.x_min)) {
        err.violations.push_back("grid.x_max must exceed grid.x_min");
    }
    return g;
}

hjlab::InitialData parse_initial(const json& cfg, ConfigError& err) {
    hjlab::InitialData d;
    if (!cfg.contains("initial")) {
        err.violations.push_back("missing field: initial");
        return d;
    }
    const json& ji = cfg["initial"];
    const std::string kind = ji.value("kind", "");
    if (kind == "function") {
        d.kind = hjlab::InitialData::Kind::Function;
        if (!ji.contains("values")) {
            err.violations.push_back("initial.values required for kind function");
        } else {
            d.values = ji["values"].get<std::vector<double>>();
        }
    } else if (kind == "dirac") {
        d.kind = hjlab::InitialData::Kind::Dirac;
        d.mass = ji.value("mass", 1.0);
        d.width = ji.value("width", 0.0);
        d.center = ji.value("center", 0.0);
        if (d.mass <= 0) err.violations.push_back("initial.mass must be > 0");
    } else if (kind == "indicator") {
        d.kind = hjlab::InitialData::Kind::Indicator;
        d.set_lo = ji.value("set_lo", 0.0);
        d.set_hi = ji.value("set_hi", 0.0);
        d.height = ji.value("height", 1.0);
        if (!(d.set_hi > d.set_lo)) {
            err.violations.push_back("initial.set_hi must exceed initial.set_lo");
        }
    } else if (kind == "infinite_on") {
        d.kind = hjlab::InitialData::Kind::InfiniteOn;
        d.set_lo = ji.value("set_lo", 0.0);
        d.set_hi = ji.value("set_hi", 0.0);
        if (ji.contains("ladder")) {
            d.ladder = ji["ladder"].get<std::vector<double>>();
        }
        if (d.ladder.size() < 2) {
            err.violations.push_back(
                "initial.ladder needs >= 2 increasing heights");
        }
        if (!(d.set_hi > d.set_lo)) {
            err.violations.push_back("initial.set_hi must exceed initial.set_lo");
        }
    } else {
        err.violations.push_back(
            "initial.kind must be function|dirac|indicator|infinite_on");
    }
    return d;
}

hjlab::SchemeConfig parse_scheme(const json& cfg, ConfigError& err) {
    hjlab::SchemeConfig s;
    if (!cfg.contains("scheme")) return s;
    const json& js = cfg["scheme"];
    const std::string grad = js.value("gradient", "upwind");
    if (grad == "upwind") {
        s.gradient = hjlab::GradientScheme::MonotoneUpwind;
    } else if (grad == "central") {
        s.gradient = hjlab::GradientScheme::Central;
    } else {
        err.violations.push_back("scheme.gradient must be upwind or central");
    }
    const std::string diff = js.value("diffusion", "backward_euler");
    if (diff == "backward_euler") {
        s.diffusion = hjlab::DiffusionScheme::BackwardEuler;
    } else if (diff == "crank_nicolson") {
        s.diffusion = hjlab::DiffusionScheme::CrankNicolson;
    } else {
        err.violations.push_back(
            "scheme.diffusion must be backward_euler or crank_nicolson");
    }
    s.cfl_safety = js.value("cfl_safety", s.cfl_safety);
    s.dt_max = js.value("dt_max", s.dt_max);
    if (!(s.cfl_safety > 0 && s.cfl_safety <= 1)) {
        err.violations.push_back("scheme.cfl_safety must lie in (0, 1]");
    }
    return s;
}

std::vector<double> parse_times(const json& cfg, ConfigError& err) {
    if (!cfg.contains("times")) {
        err.violations.push_back("missing field: times");
        return {};
    }
    const json& jt = cfg["times"];
    if (jt.is_array()) return jt.get<std::vector<double>>();
    const double t_min = jt.value("t_min", 0.0);
    const double t_max = jt.value("t_max", 0.0);
    const double ratio = jt.value("ratio", 1.3);
    if (!(t_min > 0 && t_max >= t_min && ratio > 1)) {
        err.violations.push_back(
            "times needs t_min > 0, t_max >= t_min, ratio > 1");
        return {};
    }
    return hjlab::geometric_times(t_min, t_max, ratio);
}

hjlab::Trajectory run_from_config(const json& cfg, double q, int dim,
                                  ConfigError& err) {
    const hjlab::Grid grid = parse_grid(cfg, dim, err);
    const hjlab::InitialData init = parse_initial(cfg, err);
    const hjlab::SchemeConfig scheme = parse_scheme(cfg, err);
    const std::vector<double> times = parse_times(cfg, err);
    const bool is_signed = cfg.value("signed", false);
    if (is_signed && q > 1.0) {
        err.violations.push_back("signed mode requires q <= 1");
    }
    if (!err.violations.empty()) throw ConfigError{err};
    const double t_end = times.back();
    return is_signed ? hjlab::signed_run(grid, init, q, t_end, times, scheme)
                     : hjlab::run(grid, init, q, t_end, times, scheme);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// "lo:step:hi" or a comma list of values
std::vector<double> parse_axis(const std::string& s, ConfigError& err) {
    std::vector<double> vals;
    if (s.find(':') != std::string::npos) {
        double lo, step, hi;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &lo, &step, &hi) != 3 ||
            step <= 0) {
            err.violations.push_back("sweep axis must be lo:step:hi: " + s);
            return vals;
        }
        for (double v = lo; v <= hi + 1e-12; v += step) vals.push_back(v);
    } else {
        for (const auto& tok : split_list(s)) vals.push_back(std::stod(tok));
    }
    return vals;
}

double profile_value_at(const hjlab::Profile& prof, double eta) {
    const auto& e = prof.eta;
    if (eta <= e.front()) return prof.f.front();
    if (eta >= e.back()) return prof.f.back();
    size_t i = 1;
    while (e[i] < eta) ++i;
    const double w = (eta - e[i - 1]) / (e[i] - e[i - 1]);
    return (1 - w) * prof.f[i - 1] + w * prof.f[i];
}

std::vector<hjlab::CheckReport> run_checks(const hjlab::Trajectory& traj,
                                           double q,
                                           const std::vector<std::string>& checks,
                                           const json& cfg, ConfigError& err) {
    std::vector<hjlab::CheckReport> out;
    std::optional<hjlab::ScalingParams> p;
    if (q > 1.0) p = hjlab::ScalingParams::make(q, traj.grid.dim);
    const json jc = cfg.value("check_params", json::object());
    for (const auto& name : checks) {
        if (name == "versa") {
            if (!p) { err.violations.push_back("check versa requires q > 1"); continue; }
            out.push_back(hjlab::check_gradient_bound(traj, *p));
        } else if (name == "growth") {
            if (!p) { err.violations.push_back("check growth requires q > 1"); continue; }
            out.push_back(hjlab::check_growth_bound(
                traj, *p, jc.value("growth_x0", 0.0)));
        } else if (name == "decay") {
            out.push_back(hjlab::check_off_support_decay(
                traj, jc.value("support_lo", 0.0), jc.value("support_hi", 0.0),
                jc.value("delta", 1.0), jc.value("probe_x", -1.0)));
        } else if (name == "lower") {
            if (!p) { err.violations.push_back("check lower requires q > 1"); continue; }
            out.push_back(hjlab::check_lower_rates(
                traj, *p, jc.value("region_lo", 0.0),
                jc.value("region_hi", 0.0)));
        } else if (name == "singular_rate") {
            if (!p) { err.violations.push_back("check singular_rate requires q > 1"); continue; }
            out.push_back(hjlab::check_singular_point_rate(
                traj, *p, jc.value("singular_x0", 0.0)));
        } else if (name == "boundary_rate") {
            if (!p) { err.violations.push_back("check boundary_rate requires q > 1"); continue; }
            const hjlab::Profile prof = hjlab::solve_halfspace_profile(*p);
            out.push_back(hjlab::check_boundary_rate(
                traj, *p, jc.value("boundary_x0", 0.0),
                profile_value_at(prof, 0.0), jc.value("boundary_tol", 0.1)));
        } else if (name == "mass") {
            out.push_back(hjlab::check_mass_dissipation(traj));
        } else {
            err.violations.push_back("unknown check: " + name);
        }
    }
    return out;
}

struct JobResult {
    std::string name;
    bool pass = false;
    std::string error;
    double seconds = 0.0;
};

int cmd_profile(double q, double eta_min, double eta_max,
                const std::string& out_dir) {
    hjlab::ShootingConfig sc;
    if (eta_min < 0) sc.eta_min = eta_min;
    if (eta_max > 0) sc.eta_max = eta_max;
    const auto p = hjlab::ScalingParams::make(q, 1);
    const hjlab::Profile prof = hjlab::solve_halfspace_profile(p, sc);
    fs::create_directories(out_dir);
    hjlab::write_profile(prof, out_dir + "/profile.csv");
    std::cout << "profile q=" << q << " f(0)=" << profile_value_at(prof, 0.0)
              << " tail growth constant=" << prof.growth_constant << "\n";
    return 0;
}

int cmd_vss(double q, int dim, const std::string& out_dir) {
    hjlab::ShootingConfig sc;
    const auto p = hjlab::ScalingParams::make(q, dim);
    const hjlab::Profile prof = hjlab::solve_vss_profile(p, sc);
    fs::create_directories(out_dir);
    hjlab::write_profile(prof, out_dir + "/vss_profile.csv");
    std::cout << "vss q=" << q << " N=" << dim
              << " F(0)=" << prof.f.front() << "\n";
    return 0;
}

// evolve / verify / trace share the run_from_config front half
int cmd_run(const std::string& command, const json& cfg, double q, int dim,
            const std::string& out_dir,
            const std::vector<std::string>& checks_flag, bool json_errors) {
    ConfigError err;
    hjlab::Trajectory traj;
    try {
        traj = run_from_config(cfg, q, dim, err);
    } catch (const ConfigError&) {
        fail_config(err, json_errors);
        return 2;
    } catch (const std::exception& e) {
        fs::create_directories(out_dir);
        std::ofstream(out_dir + "/FAILED") << e.what() << "\n";
        std::cerr << "solver failure: " << e.what() << "\n";
        return 1;
    }
    fs::create_directories(out_dir);
    hjlab::write_trajectory(traj, out_dir);

    if (command == "evolve") return 0;

    if (command == "verify") {
        std::vector<std::string> checks = checks_flag;
        if (checks.empty() && cfg.contains("checks")) {
            checks = cfg["checks"].get<std::vector<std::string>>();
        }
        if (checks.empty()) {
            err.violations.push_back("verify: no checks requested");
            fail_config(err, json_errors);
            return 2;
        }
        std::vector<hjlab::CheckReport> reports;
        if (q <= 1.0) {
            // the q <= 1 regime has its own boundedness audit plus mass
            for (const auto& name : checks) {
                if (name == "mass") {
                    reports.push_back(hjlab::check_mass_dissipation(traj));
                } else if (name == "trace_bounded") {
                    const json jc = cfg.value("check_params", json::object());
                    std::vector<double> pts =
                        jc.value("points", std::vector<double>{0.0});
                    reports.push_back(
                        hjlab::q_le_1_trace_boundedness(traj, pts));
                } else {
                    err.violations.push_back("check requires q > 1: " + name);
                }
            }
            if (!err.violations.empty()) {
                fail_config(err, json_errors);
                return 2;
            }
        } else {
            reports = run_checks(traj, q, checks, cfg, err);
            if (!err.violations.empty()) {
                fail_config(err, json_errors);
                return 2;
            }
        }
        bool all_pass = true;
        for (const auto& r : reports) {
            hjlab::write_report(r, out_dir + "/check_" + r.check_id + ".json");
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.check_id
                      << " max_violation=" << r.max_violation << "\n";
            if (!r.pass) all_pass = false;
        }
        return all_pass ? 0 : 1;
    }

    if (command == "trace") {
        const json jt = cfg.value("trace", json::object());
        if (!jt.contains("points") || !jt.contains("epsilons")) {
            err.violations.push_back("trace.points and trace.epsilons required");
            fail_config(err, json_errors);
            return 2;
        }
        const hjlab::TraceReport rep = hjlab::classify_points(
            traj, jt["points"].get<std::vector<double>>(),
            jt["epsilons"].get<std::vector<double>>());
        hjlab::write_trace_report(rep, out_dir + "/trace.json",
                                  out_dir + "/trace.csv");
        for (const auto& p : rep.points) {
            std::cout << "x=" << p.x << " " << hjlab::to_string(p.cls) << "\n";
        }
        return 0;
    }
    return 2;
}

int cmd_sweep(const json& cfg, const std::string& q_axis,
              const std::vector<std::string>& checks_flag, int jobs,
              const std::string& out_dir, bool json_errors) {
    ConfigError err;
    std::vector<double> qs;
    if (!q_axis.empty()) {
        qs = parse_axis(q_axis, err);
    } else if (cfg.contains("sweep") && cfg["sweep"].contains("q")) {
        qs = cfg["sweep"]["q"].get<std::vector<double>>();
    }
    if (qs.empty()) err.violations.push_back("sweep: no q axis given");
    const std::string sub = cfg.value("sweep", json::object())
                                .value("command", std::string("verify"));
    if (sub != "verify" && sub != "trace" && sub != "evolve") {
        err.violations.push_back("sweep.command must be verify|trace|evolve");
    }
    if (!err.violations.empty()) {
        fail_config(err, json_errors);
        return 2;
    }
    if (jobs <= 0) {
        jobs = int(std::thread::hardware_concurrency());
        if (jobs <= 0) jobs = 2;
    }

    std::vector<JobResult> results(qs.size());
    std::atomic<size_t> next{0};
    std::mutex io_mu;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= qs.size()) return;
            char name[64];
            std::snprintf(name, sizeof name, "q_%g", qs[i]);
            const std::string job_dir = out_dir + "/" + name;
            const auto t0 = std::chrono::steady_clock::now();
            JobResult& r = results[i];
            r.name = name;
            try {
                std::lock_guard<std::mutex> lk(io_mu);  // serialize stdout
                const int rc = cmd_run(sub, cfg, qs[i], cfg.value("dim", 1),
                                       job_dir, checks_flag, json_errors);
                r.pass = rc == 0;
                if (rc != 0) r.error = "exit " + std::to_string(rc);
            } catch (const std::exception& e) {
                r.error = e.what();
            }
            r.seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
        }
    };
    fs::create_directories(out_dir);
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json summary{{"jobs", json::array()}};
    bool all_pass = true;
    for (const auto& r : results) {
        summary["jobs"].push_back({{"name", r.name},
                                   {"pass", r.pass},
                                   {"error", r.error},
                                   {"seconds", r.seconds}});
        if (!r.pass) all_pass = false;
    }
    summary["all_pass"] = all_pass;
    std::ofstream(out_dir + "/summary.json") << summary.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for u_t - Lap(u) + |Du|^q = 0"};
    app.require_subcommand(1);

    double q = 0.0;
    int dim = 1;
    std::string config_path, out_dir = "out", checks_csv, q_axis;
    int jobs = 0;
    bool json_errors = false;
    double eta_min = 0.0, eta_max = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--q", q, "absorption exponent");
        sub->add_option("--dim", dim, "spatial dimension");
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--json-errors", json_errors,
                      "emit config errors as JSON on stdout");
    };

    CLI::App* sp = app.add_subcommand("profile", "half-space profile shoot");
    add_common(sp);
    sp->add_option("--eta-min", eta_min);
    sp->add_option("--eta-max", eta_max);

    CLI::App* sv = app.add_subcommand("vss", "very singular radial profile");
    add_common(sv);

    CLI::App* se = app.add_subcommand("evolve", "run the PDE solver");
    add_common(se);

    CLI::App* sf = app.add_subcommand("verify", "run solver + estimate checks");
    add_common(sf);
    sf->add_option("--checks", checks_csv, "comma list of check ids");

    CLI::App* st = app.add_subcommand("trace", "initial-trace classification");
    add_common(st);

    CLI::App* sw = app.add_subcommand("sweep", "parallel parameter sweep");
    add_common(sw);
    sw->add_option("--checks", checks_csv);
    sw->add_option("--jobs", jobs, "worker pool size");
    sw->add_option("--q-axis", q_axis, "lo:step:hi or comma list");

    CLI11_PARSE(app, argc, argv);

    ConfigError err;
    json cfg = json::object();
    if (!config_path.empty()) {
        cfg = load_config(config_path, err);
        if (!err.violations.empty()) {
            fail_config(err, json_errors);
            return 2;
        }
    }
    // flags override config fields
    if (q == 0.0 && cfg.contains("q")) q = cfg["q"].get<double>();
    if (dim == 1 && cfg.contains("dim")) dim = cfg["dim"].get<int>();
    if (out_dir == "out" && cfg.contains("out")) {
        out_dir = cfg["out"].get<std::string>();
    }
    const std::vector<std::string> checks = split_list(checks_csv);

    try {
        if (app.got_subcommand(sp)) {
            if (!(q > 1.0)) {
                err.violations.push_back("profile: q must be > 1");
                fail_config(err, json_errors);
                return 2;
            }
            return cmd_profile(q, eta_min, eta_max, out_dir);
        }
        if (app.got_subcommand(sv)) {
            if (!(q > 1.0)) {
                err.violations.push_back("vss: q must be > 1");
                fail_config(err, json_errors);
                return 2;
            }
            return cmd_vss(q, dim, out_dir);
        }
        if (app.got_subcommand(sw)) {
            return cmd_sweep(cfg, q_axis, checks, jobs, out_dir, json_errors);
        }
        std::string command = "evolve";
        if (app.got_subcommand(sf)) command = "verify";
        if (app.got_subcommand(st)) command = "trace";
        if (q == 0.0) {
            err.violations.push_back("missing field: q");
            fail_config(err, json_errors);
            return 2;
        }
        return cmd_run(command, cfg, q, dim, out_dir, checks, json_errors);
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
}
