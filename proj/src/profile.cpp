#include "hjlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace hjlab {

namespace {

using State = std::array<double, 2>;
using Rhs = std::function<State(double, const State&)>;

// Dormand-Prince 5(4) coefficients
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                 e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640,
                 e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

State dopri_step(const Rhs& rhs, double t, const State& y, double h,
                 double* err_out) {
    auto axpy = [](const State& y0, double hh,
                   std::initializer_list<std::pair<double, const State*>> ks) {
        State r = y0;
        for (auto& [c, k] : ks) {
            r[0] += hh * c * (*k)[0];
            r[1] += hh * c * (*k)[1];
        }
        return r;
    };
    State k1 = rhs(t, y);
    State k2 = rhs(t + h * 0.2, axpy(y, h, {{a21, &k1}}));
    State k3 = rhs(t + h * 0.3, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    State k4 = rhs(t + h * 0.8, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    State k5 = rhs(t + h * 8.0 / 9.0,
                   axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    State k6 = rhs(t + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3},
                                      {a64, &k4}, {a65, &k5}}));
    State y5 = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    State k7 = rhs(t + h, y5);
    if (err_out) {
        double err = 0.0;
        const double ed[2] = {
            h * (e1 * k1[0] + e3 * k3[0] + e4 * k4[0] + e5 * k5[0] +
                 e6 * k6[0] + e7 * k7[0]),
            h * (e1 * k1[1] + e3 * k3[1] + e4 * k4[1] + e5 * k5[1] +
                 e6 * k6[1] + e7 * k7[1])};
        for (int i = 0; i < 2; ++i) err = std::max(err, std::fabs(ed[i]));
        *err_out = err;
    }
    return y5;
}

enum class StopReason { ReachedEnd, ObserverStop, StepUnderflow };

// Adaptive integration from t0 to t1 (either direction). The observer sees
// every accepted step (t_prev, y_prev, t_new, y_new) and may stop the run.
StopReason integrate(const Rhs& rhs, double t0, double t1, State y,
                     double abs_tol, double rel_tol, double max_step,
                     const std::function<bool(double, const State&, double,
                                              const State&)>& observer) {
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(max_step, 1e-3);
    int consecutive_rejects = 0;
    while (dir * (t1 - t) > 1e-14 * (std::fabs(t1) + 1.0)) {
        if (dir * (t + h) > dir * t1) h = t1 - t;
        double err;
        State ynew = dopri_step(rhs, t, y, h, &err);
        double sc = abs_tol;
        for (int i = 0; i < 2; ++i) {
            sc = std::max(sc, rel_tol * std::max(std::fabs(y[i]),
                                                 std::fabs(ynew[i])));
        }
        const double ratio = err / sc;
        if (ratio <= 1.0 || std::fabs(h) < 1e-13) {
            consecutive_rejects = 0;
            const double tprev = t;
            const State yprev = y;
            t += h;
            y = ynew;
            double fac = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            h = dir * std::min(std::fabs(h) * fac, max_step);
            if (!observer(tprev, yprev, t, y)) return StopReason::ObserverStop;
        } else {
            if (++consecutive_rejects > 60) return StopReason::StepUnderflow;
            h *= std::clamp(0.9 * std::pow(ratio, -0.2), 0.1, 0.5);
        }
    }
    return StopReason::ReachedEnd;
}

Rhs make_halfspace_rhs(const ScalingParams& p) {
    const double q = p.q;
    const double a = p.a();
    return [q, a](double eta, const State& y) -> State {
        return {y[1], -0.5 * eta * y[1] - 0.5 * a * y[0] +
                          std::pow(std::fabs(y[1]), q)};
    };
}

Rhs make_radial_rhs(const ScalingParams& p) {
    return [&p, q = p.q, a = p.a(), N = double(p.dim)](
               double r, const State& y) -> State {
        if (r <= 0.0) {
            return {y[1], (-0.5 * a * y[0] + std::pow(std::fabs(y[1]), q)) / N};
        }
        return {y[1], -((N - 1.0) / r + 0.5 * r) * y[1] - 0.5 * a * y[0] +
                          std::pow(std::fabs(y[1]), q)};
    };
}

struct GridAccumulator {
    std::vector<double> t;
    std::vector<State> y;
    void push(double tt, const State& yy) {
        if (!t.empty() && std::fabs(tt - t.back()) < 1e-13) return;
        t.push_back(tt);
        y.push_back(yy);
    }
};

enum class Shot { Undershoot, Overshoot, Inconclusive };

// One left-to-right shot: seeded on the Gaussian left tail with amplitude C,
// classified by loss of monotonicity/positivity (undershoot) or violation of
// the f^{1/q'} - c_q^{1/q'} eta envelope (overshoot).
Shot classify_halfspace(const ScalingParams& p, const ShootingConfig& cfg,
                        double C, double eta_end, GridAccumulator* grid,
                        double stop_at) {
    const double q = p.q;
    const double qc = p.q_conj();
    const double m = (3.0 - 2.0 * q) / (q - 1.0);
    const double e0 = cfg.eta_min;
    State y;
    y[0] = C * std::exp(-0.25 * e0 * e0) * std::pow(-e0, m);
    y[1] = y[0] * (-0.5 * e0 + m / e0);
    const double cq_root = std::pow(p.c_q(), 1.0 / qc);

    Shot outcome = Shot::Inconclusive;
    double envelope_ref = -1.0;  // set when crossing eta = 0
    auto obs = [&](double tp, const State& yp, double t, const State& yn) {
        if (grid) grid->push(t, yn);
        if (yn[0] <= 0.0 || yn[1] <= 0.0) {
            outcome = Shot::Undershoot;
            return false;
        }
        if (yn[1] > 1e8) {
            outcome = Shot::Overshoot;
            return false;
        }
        if (tp < 0.0 && t >= 0.0) {
            const double w = t > tp ? (0.0 - tp) / (t - tp) : 0.0;
            const double f0 = yp[0] + w * (yn[0] - yp[0]);
            envelope_ref = 1.1 * std::pow(f0, 1.0 / qc);
        }
        if (t > 0.0 && envelope_ref > 0.0) {
            if (std::pow(yn[0], 1.0 / qc) - cq_root * t > envelope_ref) {
                outcome = Shot::Overshoot;
                return false;
            }
        }
        // sub-separatrix shots flatten: d/deta f^{1/q'} -> 0, while the
        // separatrix keeps it near c_q^{1/q'}
        if (t >= 3.0) {
            const double slope =
                yn[1] * std::pow(yn[0], 1.0 / qc - 1.0) / qc;
            if (slope < 0.5 * cq_root) {
                outcome = Shot::Undershoot;
                return false;
            }
        }
        return true;
    };
    if (grid) grid->push(e0, y);
    const double target = std::min(eta_end, stop_at);
    StopReason r = integrate(make_halfspace_rhs(p), e0, target, y, cfg.abs_tol,
                             cfg.rel_tol, cfg.max_step, obs);
    if (r == StopReason::StepUnderflow) outcome = Shot::Overshoot;
    return outcome;
}

double linear_fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 2) throw std::runtime_error("fit: need at least 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double d = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / d;
}

// Max defect of re-stepping the stored grid with the same integrator order,
// normalized per unit step.
double residual_audit(const Rhs& rhs, const std::vector<double>& t,
                      const std::vector<State>& y) {
    double worst = 0.0;
    for (size_t i = 0; i + 1 < t.size(); ++i) {
        const double h = t[i + 1] - t[i];
        if (std::fabs(h) < 1e-12) continue;
        State pred = dopri_step(rhs, t[i], y[i], h, nullptr);
        const double d = std::max(std::fabs(pred[0] - y[i + 1][0]),
                                  std::fabs(pred[1] - y[i + 1][1]));
        worst = std::max(worst, d / std::fabs(h));
    }
    return worst;
}

}  // namespace

const char* to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Halfspace: return "halfspace";
        case ProfileKind::Vss: return "vss";
        case ProfileKind::UBeta: return "u_beta";
    }
    return "?";
}

std::array<double, 2> profile_rhs(const ScalingParams& p, double eta, double f,
                                  double g) {
    if (!std::isfinite(eta) || !std::isfinite(f) || !std::isfinite(g)) {
        throw std::invalid_argument("profile_rhs: non-finite input");
    }
    return make_halfspace_rhs(p)(eta, {f, g});
}

std::array<double, 2> radial_profile_rhs(const ScalingParams& p, double r,
                                         double F, double G) {
    if (r < 0.0) throw std::domain_error("radial_profile_rhs: r < 0");
    return make_radial_rhs(p)(r, {F, G});
}

Profile solve_halfspace_profile(const ScalingParams& p,
                                const ShootingConfig& cfg) {
    if (!(p.q > 1.0)) {
        throw std::domain_error("solve_halfspace_profile requires q > 1");
    }
    if (!(cfg.eta_min < 0.0 && cfg.eta_max > 0.0)) {
        throw std::invalid_argument("shooting window must straddle 0");
    }
    const double qc = p.q_conj();
    // Forward tracking of the separatrix degrades like exp(eta^2/4); stop
    // the shot well before that limit and continue the tail separately.
    const double shoot_end = std::min(cfg.eta_max, 12.0);

    auto classify = [&](double C) {
        return classify_halfspace(p, cfg, C, shoot_end, nullptr, shoot_end);
    };

    double lo = cfg.bracket_lo, hi = cfg.bracket_hi;
    Shot slo = classify(lo), shi = classify(hi);
    for (int k = 0; k < 8 && slo == Shot::Overshoot; ++k) {
        lo /= 10.0;
        slo = classify(lo);
    }
    for (int k = 0; k < 8 && shi == Shot::Undershoot; ++k) {
        hi *= 10.0;
        shi = classify(hi);
    }
    if (!(slo == Shot::Undershoot && shi == Shot::Overshoot)) {
        throw std::runtime_error(
            "solve_halfspace_profile: bracket endpoints classify identically");
    }
    double C = 0.5 * (lo + hi);
    for (int it = 0; it < cfg.max_bisections && hi - lo > 1e-16 * hi; ++it) {
        C = 0.5 * (lo + hi);
        Shot s = classify(C);
        if (s == Shot::Inconclusive) break;
        (s == Shot::Undershoot ? lo : hi) = C;
    }
    C = 0.5 * (lo + hi);

    // Dense left pass up to the splice point.
    const double eta_split = std::min(6.0, shoot_end - 1.0);
    const bool need_tail = cfg.eta_max > eta_split + 0.5;
    const double left_end = need_tail ? eta_split : cfg.eta_max;
    GridAccumulator left;
    classify_halfspace(p, cfg, C, left_end, &left, left_end);
    if (left.t.empty() || std::fabs(left.t.back() - left_end) > 1e-9) {
        throw std::runtime_error(
            "solve_halfspace_profile: converged shot terminated before the "
            "splice point");
    }

    std::vector<double> ts = left.t;
    std::vector<State> ys = left.y;

    if (need_tail) {
        // Tail continuation: the algebraic branch f ~ (c^{1/q'} eta + b)^{q'}
        // is backward-stable, so pick b by matching f at the splice point.
        const double f_match = left.y.back()[0];
        const double croot = std::pow(p.c_q(), 1.0 / qc);
        const double back_start = cfg.eta_max + 4.0;
        auto back_value = [&](double b) {
            State y = {std::pow(croot * back_start + b, qc),
                       qc * croot * std::pow(croot * back_start + b, qc - 1.0)};
            // a shot dying before the splice point counts as far undershoot
            double fs = -std::numeric_limits<double>::infinity();
            auto obs = [&](double, const State&, double t, const State& yn) {
                if (std::fabs(t - eta_split) < 1e-12) fs = yn[0];
                return yn[0] > 0.0;
            };
            integrate(make_halfspace_rhs(p), back_start, eta_split, y,
                      cfg.abs_tol, cfg.rel_tol, 0.25, obs);
            return fs;
        };
        double blo = 0.0;
        double bhi = std::pow(f_match, 1.0 / qc) - croot * eta_split + 0.05;
        double vlo = back_value(blo), vhi = back_value(bhi);
        for (int k = 0; k < 20 && !(vhi > f_match); ++k) {
            bhi += 0.5;
            vhi = back_value(bhi);
        }
        for (int k = 0;
             k < 20 && !(vlo < f_match) && croot * back_start + blo > 1.0;
             ++k) {
            blo -= 0.5;
            vlo = back_value(blo);
        }
        if (!(vlo <= f_match && vhi >= f_match)) {
            throw std::runtime_error(
                "solve_halfspace_profile: tail matching bracket failed");
        }
        double b = 0.5 * (blo + bhi);
        for (int it = 0; it < 120 && bhi - blo > 1e-14 * (1.0 + bhi); ++it) {
            b = 0.5 * (blo + bhi);
            (back_value(b) < f_match ? blo : bhi) = b;
        }
        b = 0.5 * (blo + bhi);

        GridAccumulator tail;
        State y = {std::pow(croot * back_start + b, qc),
                   qc * croot * std::pow(croot * back_start + b, qc - 1.0)};
        // quiet leg down to eta_max, then store down to the splice point
        State ycap = y;
        double tcap = back_start;
        integrate(make_halfspace_rhs(p), back_start, cfg.eta_max, y,
                  cfg.abs_tol, cfg.rel_tol, 0.25,
                  [&](double, const State&, double t, const State& yn) {
                      tcap = t;
                      ycap = yn;
                      return true;
                  });
        tail.push(tcap, ycap);
        integrate(make_halfspace_rhs(p), tcap, eta_split, ycap, cfg.abs_tol,
                  cfg.rel_tol, cfg.max_step,
                  [&](double, const State&, double t, const State& yn) {
                      tail.push(t, yn);
                      return true;
                  });
        // append reversed, skipping the splice duplicate
        for (size_t i = tail.t.size(); i-- > 0;) {
            if (tail.t[i] <= ts.back() + 1e-12) continue;
            ts.push_back(tail.t[i]);
            ys.push_back(tail.y[i]);
        }
    }

    Profile prof;
    prof.q = p.q;
    prof.dim = 1;
    prof.kind = ProfileKind::Halfspace;
    prof.shooting_parameter = C;
    prof.eta.reserve(ts.size());
    prof.f.reserve(ts.size());
    prof.g.reserve(ts.size());
    for (size_t i = 0; i < ts.size(); ++i) {
        prof.eta.push_back(ts[i]);
        prof.f.push_back(ys[i][0]);
        prof.g.push_back(ys[i][1]);
    }

    // growth constant: slope of f^{1/q'} against eta on the tail window.
    // The expansion carries a resonant eta^{q'-2} log eta term, which shows
    // up in f^{1/q'} as log(eta)/eta; include that basis or the fitted slope
    // is biased by O(log eta / eta^2).
    {
        const double w0 = cfg.eta_max - cfg.classification_window;
        double A[3][3] = {};
        double rhs3[3] = {};
        int npts = 0;
        for (size_t i = 0; i < prof.eta.size(); ++i) {
            const double e = prof.eta[i];
            if (e >= w0 && e <= cfg.eta_max + 1e-9 && prof.f[i] > 0.0) {
                const double phi[3] = {1.0, e, std::log(e) / e};
                const double yv = std::pow(prof.f[i], 1.0 / qc);
                for (int r = 0; r < 3; ++r) {
                    for (int c = 0; c < 3; ++c) A[r][c] += phi[r] * phi[c];
                    rhs3[r] += phi[r] * yv;
                }
                ++npts;
            }
        }
        if (npts >= 4) {
            for (int k = 0; k < 3; ++k) {  // Gaussian elimination, pivoting
                int piv = k;
                for (int r = k + 1; r < 3; ++r) {
                    if (std::fabs(A[r][k]) > std::fabs(A[piv][k])) piv = r;
                }
                std::swap(A[k], A[piv]);
                std::swap(rhs3[k], rhs3[piv]);
                for (int r = k + 1; r < 3; ++r) {
                    const double m = A[r][k] / A[k][k];
                    for (int c = k; c < 3; ++c) A[r][c] -= m * A[k][c];
                    rhs3[r] -= m * rhs3[k];
                }
            }
            double coef[3];
            for (int k = 3; k-- > 0;) {
                double s = rhs3[k];
                for (int c = k + 1; c < 3; ++c) s -= A[k][c] * coef[c];
                coef[k] = s / A[k][k];
            }
            prof.growth_constant = std::pow(coef[1], qc);
        }
    }
    // left-tail amplitude diagnostic
    {
        const double m = (3.0 - 2.0 * p.q) / (p.q - 1.0);
        double s = 0.0;
        int n = 0;
        for (size_t i = 0; i < prof.eta.size(); ++i) {
            const double e = prof.eta[i];
            if (e <= cfg.eta_min + 1.5 && e < 0.0) {
                s += prof.f[i] * std::exp(0.25 * e * e) * std::pow(-e, -m);
                ++n;
            }
        }
        if (n > 0) prof.tail_constant = s / n;
    }
    prof.residual_tol = residual_audit(make_halfspace_rhs(p), ts, ys);
    return prof;
}

namespace {

// Outward radial integration from the Taylor start at r0; returns false if F
// crossed zero (fast decay), true if it survived to eta_end.
bool integrate_radial(const ScalingParams& p, const ShootingConfig& cfg,
                      double beta, double eta_end, GridAccumulator* grid) {
    const double r0 = 1e-4;
    const double F2 = -0.5 * p.a() * beta / double(p.dim);
    State y = {beta + 0.5 * F2 * r0 * r0, F2 * r0};
    bool positive = true;
    auto obs = [&](double, const State&, double t, const State& yn) {
        if (grid) grid->push(t, yn);
        if (yn[0] <= 0.0) {
            positive = false;
            return false;
        }
        return true;
    };
    if (grid) grid->push(r0, y);
    integrate(make_radial_rhs(p), r0, eta_end, y, cfg.abs_tol, cfg.rel_tol,
              cfg.max_step, obs);
    return positive;
}

Profile finish_radial(const ScalingParams& p, const ShootingConfig& cfg,
                      double beta, double eta_end, ProfileKind kind) {
    GridAccumulator grid;
    integrate_radial(p, cfg, beta, eta_end, &grid);
    Profile prof;
    prof.q = p.q;
    prof.dim = p.dim;
    prof.kind = kind;
    prof.shooting_parameter = beta;
    for (size_t i = 0; i < grid.t.size(); ++i) {
        prof.eta.push_back(grid.t[i]);
        prof.f.push_back(grid.y[i][0]);
        prof.g.push_back(grid.y[i][1]);
    }
    prof.residual_tol = residual_audit(make_radial_rhs(p), grid.t, grid.y);
    return prof;
}

}  // namespace

Profile solve_vss_profile(const ScalingParams& p, const ShootingConfig& cfg) {
    if (!(p.q > 1.0) || p.q >= p.q_star) {
        throw std::domain_error("V.S.S. exists only for 1 < q < q*");
    }
    const double eta_end = std::min(cfg.eta_max, 12.0);
    auto slow = [&](double beta) {
        return integrate_radial(p, cfg, beta, eta_end, nullptr);
    };
    double lo = 0.05, hi = 50.0;
    bool s_lo = slow(lo), s_hi = slow(hi);
    for (int k = 0; k < 8 && s_lo; ++k) {
        lo /= 10.0;
        s_lo = slow(lo);
    }
    for (int k = 0; k < 8 && !s_hi; ++k) {
        hi *= 10.0;
        s_hi = slow(hi);
    }
    if (s_lo || !s_hi) {
        throw std::runtime_error(
            "solve_vss_profile: bracket endpoints classify identically");
    }
    for (int it = 0; it < cfg.max_bisections && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (slow(mid) ? hi : lo) = mid;
    }
    const double beta = 0.5 * (lo + hi);
    Profile prof = finish_radial(p, cfg, beta, eta_end, ProfileKind::Vss);

    // Gaussian-tail diagnostics on the classification window
    std::vector<double> xs, yv, lx, ly;
    const double w0 = 0.5 * eta_end, w1 = 0.88 * eta_end;
    double amp = 0.0;
    int namp = 0;
    for (size_t i = 0; i < prof.eta.size(); ++i) {
        const double e = prof.eta[i];
        if (e >= w0 && e <= w1 && prof.f[i] > 0.0) {
            xs.push_back(-0.25 * e * e);
            yv.push_back(std::log(prof.f[i]));
            amp += prof.f[i] * std::exp(0.25 * e * e) *
                   std::pow(e, double(p.dim) - p.a());
            ++namp;
        }
    }
    if (xs.size() >= 2) prof.tail_fit_diag = linear_fit_slope(xs, yv);
    if (namp > 0) prof.tail_constant = amp / namp;
    return prof;
}

Profile solve_u_beta(const ScalingParams& p, double beta,
                     const ShootingConfig& cfg) {
    if (!(p.q > 1.0 && p.q < 2.0)) {
        throw std::domain_error("solve_u_beta requires 1 < q < 2");
    }
    if (!(beta > 0.0)) {
        throw std::invalid_argument("solve_u_beta: beta must be > 0");
    }
    const double eta_end = cfg.eta_max;
    if (!integrate_radial(p, cfg, beta, eta_end, nullptr)) {
        throw std::runtime_error(
            "solve_u_beta: FAST trajectory (beta below the exponential "
            "threshold)");
    }
    Profile prof = finish_radial(p, cfg, beta, eta_end, ProfileKind::UBeta);

    std::vector<double> lx, ly;
    const double w0 = eta_end - cfg.classification_window;
    double amp = 0.0;
    int namp = 0;
    for (size_t i = 0; i < prof.eta.size(); ++i) {
        const double e = prof.eta[i];
        if (e >= w0 && prof.f[i] > 0.0) {
            lx.push_back(std::log(e));
            ly.push_back(std::log(prof.f[i]));
            amp += prof.f[i] * std::pow(e, p.a());
            ++namp;
        }
    }
    if (lx.size() >= 2) prof.tail_fit_diag = linear_fit_slope(lx, ly);
    if (namp > 0) prof.tail_constant = amp / namp;
    return prof;
}

void write_profile(const Profile& prof, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << "eta,f,g\n";
    char buf[96];
    for (size_t i = 0; i < prof.eta.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", prof.eta[i],
                      prof.f[i], prof.g[i]);
        out << buf;
    }
    nlohmann::json meta{{"q", prof.q},
                        {"N", prof.dim},
                        {"kind", to_string(prof.kind)},
                        {"shooting_parameter", prof.shooting_parameter},
                        {"tail_constant", prof.tail_constant},
                        {"growth_constant", prof.growth_constant},
                        {"tail_fit_diag", prof.tail_fit_diag},
                        {"residual_tol", prof.residual_tol}};
    std::ofstream js(csv_path + ".json");
    js << meta.dump(2) << "\n";
}

}  // namespace hjlab
