#pragma once

#include <string>
#include <vector>

#include "hjlab/scaling.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/verify.hpp"

namespace hjlab {

enum class PointClass { Regular, Singular, Undecided };

const char* to_string(PointClass c);

struct TracePoint {
    double x = 0.0;
    PointClass cls = PointClass::Undecided;
    double mass_slope = 0.0;     // fitted local-mass growth exponent
    double regular_density = 0.0;  // defined on REGULAR points only
    double gamma = 0.0;          // extrapolated t^{1/(q-1)} u(x,t)
    std::string rate_tag;        // "interior" | "boundary" | ""
};

struct TraceReport {
    double q = 0.0;
    std::vector<double> epsilons;
    double t_window_lo = 0.0, t_window_hi = 0.0;
    std::vector<TracePoint> points;
    // per (point, epsilon) classification, for the monotonicity invariant
    std::vector<std::vector<PointClass>> per_epsilon;
};

// Local-mass dichotomy: slope of log m(x0,eps,t) vs log t on the smallest
// decade; REGULAR needs |slope| <= 0.05 plus a Cauchy test, SINGULAR needs
// slope <= -0.2 with m increasing as t drops.
TraceReport classify_points(const Trajectory& traj,
                            const std::vector<double>& points,
                            const std::vector<double>& epsilons);

// Richardson-extrapolated hat-function averages: nodal density estimates on
// a region classified regular.
std::vector<double> estimate_regular_part(const Trajectory& traj,
                                          double region_lo, double region_hi,
                                          double test_width);

// Local mass around x0 extrapolated to t -> 0 (Dirac mass recovery).
double recovered_local_mass(const Trajectory& traj, double x0, double radius);

// Extrapolated t^{1/(q-1)} u(x,t) per point.
std::vector<double> estimate_gamma(const Trajectory& traj,
                                   const ScalingParams& p,
                                   const std::vector<double>& points);

// q <= 1: every audit point must classify REGULAR with Cauchy local masses.
CheckReport q_le_1_trace_boundedness(const Trajectory& traj,
                                     const std::vector<double>& points);

void write_trace_report(const TraceReport& rep, const std::string& json_path,
                        const std::string& csv_path);

}  // namespace hjlab
