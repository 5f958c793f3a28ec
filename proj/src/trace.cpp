#include "hjlab/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hjlab {

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// trapezoid mass of u over the ball B(x0, eps) intersected with the domain
double local_mass(const Trajectory& traj, size_t k, double x0, double eps) {
    const auto w = traj.grid.volume_weights();
    double m = 0.0;
    for (int i = 0; i < traj.grid.n_cells; ++i) {
        if (std::fabs(traj.grid.node(i) - x0) <= eps) {
            m += w[i] * traj.snaps[k][i];
        }
    }
    return m;
}

// indices of snapshots in the smallest time decade, smallest t first
std::vector<size_t> smallest_decade(const Trajectory& traj) {
    std::vector<size_t> idx;
    const double t0 = traj.times.front();
    for (size_t k = 0; k < traj.times.size(); ++k) {
        if (traj.times[k] <= 10.0 * t0) idx.push_back(k);
    }
    if (idx.size() < 4) {
        throw std::invalid_argument(
            "trace audit: fewer than 4 snapshots in the smallest decade");
    }
    return idx;
}

}  // namespace

const char* to_string(PointClass c) {
    switch (c) {
        case PointClass::Regular: return "REGULAR";
        case PointClass::Singular: return "SINGULAR";
        case PointClass::Undecided: return "UNDECIDED";
    }
    return "?";
}

TraceReport classify_points(const Trajectory& traj,
                            const std::vector<double>& points,
                            const std::vector<double>& epsilons) {
    if (epsilons.empty() || points.empty()) {
        throw std::invalid_argument("classify_points: empty audit set");
    }
    const double dx = traj.grid.dx();
    for (double e : epsilons) {
        if (e < 3.0 * dx) {
            throw std::invalid_argument(
                "classify_points: epsilon below 3 grid cells");
        }
    }
    std::vector<double> eps_sorted = epsilons;
    std::sort(eps_sorted.begin(), eps_sorted.end());

    const auto decade = smallest_decade(traj);
    TraceReport rep;
    rep.q = traj.q;
    rep.epsilons = eps_sorted;
    rep.t_window_lo = traj.times.front();
    rep.t_window_hi = traj.times.back();

    // global scale for the below-floor shortcut
    double mmax = 0.0;
    for (double x0 : points) {
        for (double e : eps_sorted) {
            mmax = std::max(mmax, local_mass(traj, decade.front(), x0, e));
        }
    }
    const double floor = 1e-10 * std::max(mmax, 1e-300);

    for (double x0 : points) {
        TracePoint tp;
        tp.x = x0;
        std::vector<PointClass> per_eps;
        for (double e : eps_sorted) {
            std::vector<double> lt, lm, m_small;
            bool below_floor = true;
            for (size_t k : decade) {
                const double m = local_mass(traj, k, x0, e);
                if (m > floor) below_floor = false;
                lt.push_back(std::log(traj.times[k]));
                lm.push_back(std::log(std::max(m, floor)));
            }
            // last three snapshots toward t -> 0 for the Cauchy test
            double mc[3];
            for (int j = 0; j < 3; ++j) {
                mc[j] = local_mass(traj, decade[j], x0, e);
            }
            PointClass c;
            double slope = fit_slope(lt, lm);
            if (below_floor) {
                c = PointClass::Regular;
                slope = 0.0;
            } else {
                const double scale =
                    std::max({std::fabs(mc[0]), std::fabs(mc[1]),
                              std::fabs(mc[2]), floor});
                const bool cauchy =
                    std::fabs(mc[0] - mc[1]) <= 0.05 * scale &&
                    std::fabs(mc[1] - mc[2]) <= 0.05 * scale;
                const bool increasing = mc[0] > mc[2];
                if (std::fabs(slope) <= 0.05 && cauchy) {
                    c = PointClass::Regular;
                } else if (slope <= -0.2 && increasing) {
                    c = PointClass::Singular;
                } else {
                    c = PointClass::Undecided;
                }
            }
            per_eps.push_back(c);
            if (e == eps_sorted.front()) tp.mass_slope = slope;
        }
        tp.cls = per_eps.front();  // smallest epsilon is the sharpest probe

        if (tp.cls == PointClass::Regular) {
            const double e = eps_sorted.front();
            std::vector<double> seq;
            for (size_t j = decade.size(); j-- > 0;) {
                seq.push_back(local_mass(traj, decade[j], x0, e));
            }
            const double vol =
                std::min(x0 + e, traj.grid.x_max) -
                std::max(x0 - e, traj.grid.x_min);
            tp.regular_density = aitken_limit(seq) / vol;
        }

        // gamma estimate (q > 1 only)
        if (traj.q > 1.0) {
            std::vector<double> seq;
            for (size_t j = decade.size(); j-- > 0;) {
                seq.push_back(std::pow(traj.times[decade[j]],
                                       1.0 / (traj.q - 1.0)) *
                              traj.value_at(decade[j], x0));
            }
            tp.gamma = std::max(aitken_limit(seq), 0.0);
        }

        // which singular rate plateaus first (1 < q < 2 only)
        if (tp.cls == PointClass::Singular && traj.q > 1.0 && traj.q < 2.0) {
            const double a = (2.0 - traj.q) / (traj.q - 1.0);
            std::vector<double> lt, li, lb;
            for (size_t k : decade) {
                const double u = traj.value_at(k, x0);
                if (u <= 0.0) continue;
                lt.push_back(std::log(traj.times[k]));
                li.push_back(std::log(std::pow(traj.times[k],
                                               1.0 / (traj.q - 1.0)) * u));
                lb.push_back(std::log(std::pow(traj.times[k], 0.5 * a) * u));
            }
            if (lt.size() >= 3) {
                const double si = std::fabs(fit_slope(lt, li));
                const double sb = std::fabs(fit_slope(lt, lb));
                tp.rate_tag = si <= sb ? "interior" : "boundary";
            }
        }
        rep.points.push_back(tp);
        rep.per_epsilon.push_back(per_eps);
    }
    return rep;
}

std::vector<double> estimate_regular_part(const Trajectory& traj,
                                          double region_lo, double region_hi,
                                          double test_width) {
    const auto decade = smallest_decade(traj);
    const auto w = traj.grid.volume_weights();
    std::vector<double> density;
    for (int c = 0; c < traj.grid.n_cells; ++c) {
        const double xc = traj.grid.node(c);
        if (xc < region_lo || xc > region_hi) continue;
        std::vector<double> seq;
        for (size_t j = decade.size(); j-- > 0;) {
            double I = 0.0;
            for (int i = 0; i < traj.grid.n_cells; ++i) {
                const double psi = std::max(
                    0.0, 1.0 - std::fabs(traj.grid.node(i) - xc) / test_width);
                I += w[i] * psi * traj.snaps[decade[j]][i];
            }
            seq.push_back(I / test_width);
        }
        density.push_back(aitken_limit(seq));
    }
    return density;
}

double recovered_local_mass(const Trajectory& traj, double x0, double radius) {
    const auto decade = smallest_decade(traj);
    std::vector<double> seq;
    for (size_t j = decade.size(); j-- > 0;) {
        seq.push_back(local_mass(traj, decade[j], x0, radius));
    }
    return aitken_limit(seq);
}

std::vector<double> estimate_gamma(const Trajectory& traj,
                                   const ScalingParams& p,
                                   const std::vector<double>& points) {
    if (!(p.q > 1.0)) {
        throw std::domain_error("estimate_gamma requires q > 1");
    }
    const auto decade = smallest_decade(traj);
    std::vector<double> out;
    for (double x0 : points) {
        std::vector<double> seq;
        for (size_t j = decade.size(); j-- > 0;) {
            seq.push_back(std::pow(traj.times[decade[j]],
                                   1.0 / (p.q - 1.0)) *
                          traj.value_at(decade[j], x0));
        }
        out.push_back(std::max(aitken_limit(seq), 0.0));
    }
    return out;
}

CheckReport q_le_1_trace_boundedness(const Trajectory& traj,
                                     const std::vector<double>& points) {
    if (traj.q > 1.0) {
        throw std::domain_error("q_le_1_trace_boundedness: requires q <= 1");
    }
    const double dx = traj.grid.dx();
    const std::vector<double> eps = {std::max(4.0 * dx, 0.1),
                                     std::max(8.0 * dx, 0.2)};
    TraceReport tr = classify_points(traj, points, eps);
    CheckReport rep;
    rep.check_id = "q_le_1_trace";
    rep.tolerance = 0.0;
    rep.window_t_lo = tr.t_window_lo;
    rep.window_t_hi = tr.t_window_hi;
    int bad = 0;
    for (const auto& p : tr.points) {
        if (p.cls != PointClass::Regular) {
            ++bad;
            rep.details.push_back({p.x, tr.t_window_lo, p.mass_slope});
        }
    }
    rep.max_violation = double(bad);
    rep.pass = bad == 0;
    return rep;
}

void write_trace_report(const TraceReport& rep, const std::string& json_path,
                        const std::string& csv_path) {
    nlohmann::json j{{"q", rep.q},
                     {"epsilons", rep.epsilons},
                     {"t_window", {rep.t_window_lo, rep.t_window_hi}},
                     {"points", nlohmann::json::array()}};
    for (size_t i = 0; i < rep.points.size(); ++i) {
        const auto& p = rep.points[i];
        nlohmann::json jp{{"x", p.x},
                          {"classification", to_string(p.cls)},
                          {"slope", p.mass_slope},
                          {"gamma", p.gamma}};
        if (p.cls == PointClass::Regular) {
            jp["regular_density"] = p.regular_density;
        }
        if (!p.rate_tag.empty()) jp["rate_tag"] = p.rate_tag;
        nlohmann::json pe = nlohmann::json::array();
        for (auto c : rep.per_epsilon[i]) pe.push_back(to_string(c));
        jp["per_epsilon"] = pe;
        j["points"].push_back(jp);
    }
    std::ofstream(json_path) << j.dump(2) << "\n";

    std::ofstream csv(csv_path);
    csv << "x,classification_code,density,gamma\n";
    char buf[96];
    for (const auto& p : rep.points) {
        const int code = p.cls == PointClass::Regular
                             ? 0
                             : (p.cls == PointClass::Singular ? 1 : 2);
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g\n", p.x, code,
                      p.regular_density, p.gamma);
        csv << buf;
    }
}

}  // namespace hjlab
