#include "hjlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hjlab {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2) throw std::runtime_error("fit_slope: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Window {
    size_t k0;          // first audited snapshot
    int i0, i1;         // audited node range [i0, i1)
};

Window make_window(const Trajectory& traj, const AuditWindow& w) {
    Window win;
    win.k0 = std::min<size_t>(w.skip_snapshots, traj.snaps.size());
    win.i0 = w.boundary_cells;
    win.i1 = traj.grid.n_cells - w.boundary_cells;
    if (traj.grid.geometry == Geometry::Radial) win.i0 = 0;
    if (win.k0 >= traj.snaps.size() || win.i0 >= win.i1) {
        throw std::invalid_argument("audit window is empty");
    }
    return win;
}

// node range at time t with the sqrt(t) edge margin applied; the radial
// origin is a genuine symmetry axis and keeps its inner cells
std::pair<int, int> trimmed_range(const Trajectory& traj, const Window& win,
                                  const AuditWindow& w, double t) {
    const int extra =
        int(std::ceil(w.boundary_margin * std::sqrt(t) / traj.grid.dx()));
    int i0 = win.i0, i1 = win.i1;
    if (traj.grid.geometry != Geometry::Radial) {
        i0 = std::max(i0, extra);
    }
    i1 = std::min(i1, traj.grid.n_cells - extra);
    return {i0, i1};
}

void set_window_fields(CheckReport& rep, const Trajectory& traj,
                       const Window& win) {
    rep.window_x_lo = traj.grid.node(win.i0);
    rep.window_x_hi = traj.grid.node(win.i1 - 1);
    rep.window_t_lo = traj.times[win.k0];
    rep.window_t_hi = traj.times.back();
}

void push_offender(CheckReport& rep, double x, double t, double v) {
    rep.details.push_back({x, t, v});
    if (rep.details.size() > 16) {
        std::sort(rep.details.begin(), rep.details.end(),
                  [](auto& a, auto& b) { return a.value > b.value; });
        rep.details.resize(8);
    }
}

}  // namespace

std::string report_json(const CheckReport& rep) {
    nlohmann::json j{{"check_id", rep.check_id},
                     {"window",
                      {{"x", {rep.window_x_lo, rep.window_x_hi}},
                       {"t", {rep.window_t_lo, rep.window_t_hi}}}},
                     {"max_violation", rep.max_violation},
                     {"fitted_rate", rep.fitted_rate},
                     {"target", rep.target},
                     {"tolerance", rep.tolerance},
                     {"pass", rep.pass},
                     {"applicable", rep.applicable},
                     {"note", rep.note},
                     {"details", nlohmann::json::array()}};
    for (const auto& d : rep.details) {
        j["details"].push_back({{"x", d.x}, {"t", d.t}, {"value", d.value}});
    }
    return j.dump(2);
}

void write_report(const CheckReport& rep, const std::string& path) {
    std::ofstream(path) << report_json(rep) << "\n";
}

double aitken_limit(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("aitken_limit: empty");
    if (v.size() < 3) return v.back();
    const double s0 = v[v.size() - 3], s1 = v[v.size() - 2], s2 = v.back();
    const double den = s2 - 2.0 * s1 + s0;
    if (std::fabs(den) < 1e-14 * (std::fabs(s2) + std::fabs(s0) + 1e-300)) {
        return s2;
    }
    return s2 - (s2 - s1) * (s2 - s1) / den;
}

CheckReport check_gradient_bound(const Trajectory& traj,
                                 const ScalingParams& p,
                                 const AuditWindow& w) {
    if (!(p.q > 1.0)) {
        throw std::domain_error("check_gradient_bound: requires q > 1");
    }
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "versa";
    rep.tolerance = 0.05;
    set_window_fields(rep, traj, win);

    const double dx = traj.grid.dx();
    double umax = 0.0;
    for (const auto& s : traj.snaps) {
        for (double v : s) umax = std::max(umax, v);
    }
    const double floor = 1e-10 * umax;
    double worst = 0.0;
    for (size_t k = win.k0; k < traj.snaps.size(); ++k) {
        const auto& u = traj.snaps[k];
        const double t = traj.times[k];
        const auto [r0, r1] = trimmed_range(traj, win, w, t);
        for (int i = std::max(r0, 1); i < std::min(r1, traj.grid.n_cells - 1); ++i) {
            if (u[i] <= floor) continue;
            const double du = (u[i + 1] - u[i - 1]) / (2.0 * dx);
            const double r =
                t * (p.q - 1.0) * std::pow(std::fabs(du), p.q) / u[i];
            if (r > worst) {
                worst = r;
                push_offender(rep, traj.grid.node(i), t, r);
            }
        }
    }
    rep.max_violation = worst - 1.0;
    rep.pass = rep.max_violation <= rep.tolerance;
    return rep;
}

CheckReport check_growth_bound(const Trajectory& traj, const ScalingParams& p,
                               double x0, const AuditWindow& w) {
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "pluc";
    rep.tolerance = 0.10;
    rep.target = p.q_conj();
    set_window_fields(rep, traj, win);

    const double inv = 1.0 / (p.q - 1.0);
    double umax = 0.0;
    for (const auto& s : traj.snaps) {
        for (double v : s) umax = std::max(umax, v);
    }
    const double floor = 1e-8 * umax;

    // envelope prefactor audit over the whole window
    double env_worst = 0.0;
    for (size_t k = win.k0; k < traj.snaps.size(); ++k) {
        const double t = traj.times[k];
        const double tf = std::pow(t, inv);
        const auto [r0, r1] = trimmed_range(traj, win, w, t);
        for (int i = r0; i < r1; ++i) {
            const double u = traj.snaps[k][i];
            if (u <= floor) continue;
            const double d = std::fabs(traj.grid.node(i) - x0);
            const double env = u * tf / (std::pow(d, p.q_conj()) + 1.0);
            if (env > env_worst) {
                env_worst = env;
                push_offender(rep, traj.grid.node(i), t, env);
            }
        }
    }
    rep.max_violation = env_worst / (10.0 * p.c_q()) - 1.0;

    // exponent fit on the last audited snapshot, one distance decade out
    const size_t klast = traj.snaps.size() - 1;
    std::vector<double> lx, ly;
    const double tf = std::pow(traj.times[klast], inv);
    const auto [f0, f1] = trimmed_range(traj, win, w, traj.times[klast]);
    for (int i = f0; i < f1; ++i) {
        const double d = std::fabs(traj.grid.node(i) - x0);
        const double u = traj.snaps[klast][i];
        if (d >= 1.0 && d <= 10.0 && u > floor) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(u * tf));
        }
    }
    if (lx.size() >= 4) {
        rep.fitted_rate = fit_slope(lx, ly);
        rep.pass = rep.max_violation <= 0.0 &&
                   std::fabs(rep.fitted_rate - rep.target) <=
                       rep.tolerance * rep.target;
    } else {
        // no growth region: bounded data, envelope audit only
        rep.note = "no far-field growth region; exponent fit skipped";
        rep.fitted_rate = 0.0;
        rep.pass = rep.max_violation <= 0.0;
    }
    return rep;
}

CheckReport check_off_support_decay(const Trajectory& traj, double support_lo,
                                    double support_hi, double delta,
                                    double probe_x, const AuditWindow& w) {
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "ita_expo";
    rep.tolerance = 0.25;
    set_window_fields(rep, traj, win);

    double umax = 0.0;
    for (const auto& s : traj.snaps) {
        for (double v : s) umax = std::max(umax, v);
    }
    const double floor = std::max(1e-14 * umax, 1e-300);

    // sup of u at distance >= delta from the support, per snapshot
    std::vector<double> ts, sups, probes;
    for (size_t k = win.k0; k < traj.snaps.size(); ++k) {
        double sup = 0.0;
        const auto [r0, r1] = trimmed_range(traj, win, w, traj.times[k]);
        for (int i = r0; i < r1; ++i) {
            const double x = traj.grid.node(i);
            const double d =
                x < support_lo ? support_lo - x
                               : (x > support_hi ? x - support_hi : 0.0);
            if (d >= delta) sup = std::max(sup, traj.snaps[k][i]);
        }
        ts.push_back(traj.times[k]);
        sups.push_back(sup);
        probes.push_back(traj.value_at(k, probe_x));
    }
    if (*std::max_element(sups.begin(), sups.end()) <= floor) {
        rep.applicable = false;
        rep.pass = true;
        rep.note = "vacuous: off-support values below floor";
        return rep;
    }

    // linear-in-t check on the smallest decade
    std::vector<double> lt, ls;
    for (size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] <= 10.0 * ts.front() && sups[k] > floor) {
            lt.push_back(std::log(ts[k]));
            ls.push_back(std::log(sups[k]));
        }
    }
    if (lt.size() < 3) throw std::invalid_argument("off_support: too few snapshots");
    const double lin_slope = fit_slope(lt, ls);

    // exponential check at the probe: slope of log u vs 1/t over the two
    // smallest half-decades must agree within tolerance
    auto exp_slope = [&](double t_lo, double t_hi) {
        std::vector<double> xs, ys;
        for (size_t k = 0; k < ts.size(); ++k) {
            if (ts[k] >= t_lo && ts[k] <= t_hi && probes[k] > floor) {
                xs.push_back(1.0 / ts[k]);
                ys.push_back(std::log(probes[k]));
            }
        }
        if (xs.size() < 3) return 0.0;
        return fit_slope(xs, ys);
    };
    const double half = std::sqrt(10.0);
    const double s1 = exp_slope(ts.front(), ts.front() * half);
    const double s2 = exp_slope(ts.front() * half, ts.front() * 10.0);
    rep.fitted_rate = s1;  // -C2 estimate
    const bool exp_ok =
        s1 < 0.0 && s2 < 0.0 &&
        std::fabs(s1 - s2) <= rep.tolerance * std::fabs(s1);
    rep.max_violation = 0.9 - lin_slope;  // positive -> linear check failed
    rep.pass = lin_slope >= 0.9 && exp_ok;
    if (!exp_ok) rep.note = "exponential-rate stabilization failed";
    return rep;
}

CheckReport check_lower_rates(const Trajectory& traj, const ScalingParams& p,
                              double region_lo, double region_hi,
                              const AuditWindow& w) {
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "stv";
    rep.tolerance = 0.05;
    set_window_fields(rep, traj, win);

    const double inv = 1.0 / (p.q - 1.0);
    auto region_min = [&](size_t k) {
        double m = std::numeric_limits<double>::infinity();
        for (int i = win.i0; i < win.i1; ++i) {
            const double x = traj.grid.node(i);
            if (x >= region_lo && x <= region_hi) {
                m = std::min(m, traj.snaps[k][i]);
            }
        }
        return m;
    };
    const size_t k_small = win.k0;
    const size_t k_large = traj.snaps.size() - 1;
    const double t_small = traj.times[k_small];
    const double v_small = std::pow(t_small, inv) * region_min(k_small);
    const double v_large =
        std::pow(traj.times[k_large], inv) * region_min(k_large);

    if (v_small < 0.2 * v_large) {
        rep.applicable = false;
        rep.pass = true;
        rep.note = "NOT-APPLICABLE: t^{1/(q-1)} u decays (regular data)";
        return rep;
    }

    const double rho = 0.5 * (region_hi - region_lo);
    Barrier b = default_barrier(p);
    const double threshold = p.C_q_barrier() * std::pow(rho, p.q_conj()) *
                             std::exp(-b.lambda * t_small / (rho * rho));
    rep.target = threshold;
    rep.max_violation = (threshold - v_small) / threshold;
    rep.pass = v_small >= threshold * (1.0 - rep.tolerance);
    push_offender(rep, 0.5 * (region_lo + region_hi), t_small, v_small);
    return rep;
}

CheckReport check_singular_point_rate(const Trajectory& traj,
                                      const ScalingParams& p, double x0,
                                      const AuditWindow& w) {
    if (!(p.q < p.q_star)) {
        throw std::domain_error(
            "check_singular_point_rate: requires q < q* (fer regime)");
    }
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "fer";
    rep.tolerance = 0.25;
    set_window_fields(rep, traj, win);

    std::vector<double> lt, lv;
    double vmin = std::numeric_limits<double>::infinity();
    for (size_t k = win.k0; k < traj.snaps.size(); ++k) {
        const double t = traj.times[k];
        if (t > 10.0 * traj.times[win.k0]) break;
        const double v = std::pow(t, 0.5 * p.a()) * traj.value_at(k, x0);
        if (v > 0.0) {
            lt.push_back(std::log(t));
            lv.push_back(std::log(v));
            vmin = std::min(vmin, v);
        } else {
            vmin = 0.0;
        }
    }
    if (lt.size() < 3) throw std::invalid_argument("singular_point: too few snapshots");
    rep.fitted_rate = fit_slope(lt, lv);
    rep.target = 0.0;
    rep.max_violation = std::fabs(rep.fitted_rate);
    rep.pass = vmin > 0.0 && std::fabs(rep.fitted_rate) <= rep.tolerance;
    return rep;
}

CheckReport check_boundary_rate(const Trajectory& traj, const ScalingParams& p,
                                double x0, double f0_target, double tol,
                                const AuditWindow& w) {
    const Window win = make_window(traj, w);
    CheckReport rep;
    rep.check_id = "boundary_rate";
    rep.tolerance = tol;
    rep.target = f0_target;
    set_window_fields(rep, traj, win);

    // values ordered toward t -> 0
    std::vector<double> v;
    for (size_t k = traj.snaps.size(); k-- > win.k0;) {
        v.push_back(std::pow(traj.times[k], 0.5 * p.a()) *
                    traj.value_at(k, x0));
    }
    const double lim = aitken_limit(v);
    rep.fitted_rate = lim;
    rep.max_violation = std::fabs(lim - f0_target) / std::fabs(f0_target);
    rep.pass = rep.max_violation <= tol;
    push_offender(rep, x0, traj.times[win.k0], lim);
    return rep;
}

CheckReport check_mass_dissipation(const Trajectory& traj) {
    CheckReport rep;
    rep.check_id = "mass";
    rep.tolerance = 1e-8;
    const double m0 = traj.initial_mass();
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < traj.snaps.size(); ++k) {
        const double budget = m0 + traj.clamped_cum[k];
        const double used = traj.mass(k) + traj.absorbed_cum[k];
        const double excess = (used - budget) / std::max(m0, 1e-300);
        if (excess > worst) {
            worst = excess;
            push_offender(rep, 0.0, traj.times[k], excess);
        }
    }
    rep.max_violation = std::max(worst, 0.0);
    rep.pass = worst <= rep.tolerance;
    return rep;
}

CheckReport check_comparison(const Trajectory& a, const Trajectory& b) {
    if (a.grid.n_cells != b.grid.n_cells || a.grid.x_min != b.grid.x_min ||
        a.grid.x_max != b.grid.x_max || a.times.size() != b.times.size()) {
        throw std::invalid_argument("check_comparison: mismatched runs");
    }
    for (int i = 0; i < a.grid.n_cells; ++i) {
        if (a.initial[i] > b.initial[i] + 1e-14) {
            throw std::invalid_argument(
                "check_comparison: initial data not ordered");
        }
    }
    CheckReport rep;
    rep.check_id = "comparison";
    rep.tolerance = 0.0;
    double worst = 0.0;
    for (size_t k = 0; k < a.snaps.size(); ++k) {
        for (int i = 0; i < a.grid.n_cells; ++i) {
            const double d = a.snaps[k][i] - b.snaps[k][i];
            if (d > worst) {
                worst = d;
                push_offender(rep, a.grid.node(i), a.times[k], d);
            }
        }
    }
    rep.max_violation = worst;
    rep.pass = worst <= 1e-12;
    return rep;
}

}  // namespace hjlab
