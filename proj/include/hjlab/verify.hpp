#pragma once

#include <string>
#include <vector>

#include "hjlab/profile.hpp"
#include "hjlab/scaling.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

struct CheckReport {
    std::string check_id;
    double max_violation = 0.0;   // worst normalized excess over the bound
    double fitted_rate = 0.0;     // least-squares exponent (rate checks)
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool applicable = true;       // false -> vacuous / NOT-APPLICABLE
    std::string note;
    double window_x_lo = 0.0, window_x_hi = 0.0;
    double window_t_lo = 0.0, window_t_hi = 0.0;
    struct Offender {
        double x = 0.0, t = 0.0, value = 0.0;
    };
    std::vector<Offender> details;
};

void write_report(const CheckReport& rep, const std::string& path);
std::string report_json(const CheckReport& rep);

// Audit window policy shared by all checks: skip the first two snapshots, a
// 3-cell boundary layer, and the parabolic influence cone of the artificial
// Dirichlet edges (margin * sqrt(t)).
struct AuditWindow {
    int skip_snapshots = 2;
    int boundary_cells = 3;
    double boundary_margin = 3.0;
};

// |Du(.,t)|^q <= u/((q-1) t): max of t(q-1)|Du|^q/u over the window.
CheckReport check_gradient_bound(const Trajectory& traj,
                                 const ScalingParams& p,
                                 const AuditWindow& w = {});

// Spatial envelope u t^{1/(q-1)} ~ |x-x0|^{q'}: fitted exponent and the
// bounded-prefactor audit.
CheckReport check_growth_bound(const Trajectory& traj, const ScalingParams& p,
                               double x0, const AuditWindow& w = {});

// Off-support decay: log-log slope >= 0.9 at distance delta from the support,
// plus exponential-rate stabilization of log u vs 1/t at a probe point.
CheckReport check_off_support_decay(const Trajectory& traj, double support_lo,
                                    double support_hi, double delta,
                                    double probe_x, const AuditWindow& w = {});

// Interior lower bound against the explicit barrier subsolution, and the
// t^{-a/2} plateau at a singular point for q < q*.
CheckReport check_lower_rates(const Trajectory& traj, const ScalingParams& p,
                              double region_lo, double region_hi,
                              const AuditWindow& w = {});
CheckReport check_singular_point_rate(const Trajectory& traj,
                                      const ScalingParams& p, double x0,
                                      const AuditWindow& w = {});

// t^{a/2} u(x0,t) -> f(0), Richardson-extrapolated over the last snapshots.
CheckReport check_boundary_rate(const Trajectory& traj, const ScalingParams& p,
                                double x0, double f0_target, double tol,
                                const AuditWindow& w = {});

// Discrete mass inequality with the clamped-mass budget.
CheckReport check_mass_dissipation(const Trajectory& traj);

// Nodewise ordering of two trajectories with ordered initial data.
CheckReport check_comparison(const Trajectory& a, const Trajectory& b);

// Aitken extrapolation of the tail of a geometric-grid sequence (values
// ordered with decreasing t; extrapolates to t -> 0).
double aitken_limit(const std::vector<double>& values);

}  // namespace hjlab
