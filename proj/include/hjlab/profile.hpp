#pragma once

#include <array>
#include <string>
#include <vector>

#include "hjlab/scaling.hpp"

namespace hjlab {

enum class ProfileKind { Halfspace, Vss, UBeta };

const char* to_string(ProfileKind k);

struct Profile {
    double q = 0.0;
    int dim = 1;
    ProfileKind kind = ProfileKind::Halfspace;
    std::vector<double> eta;  // strictly increasing
    std::vector<double> f;    // profile values, >= 0
    std::vector<double> g;    // derivative values
    double shooting_parameter = 0.0;  // converged C (halfspace) or beta
    double tail_constant = 0.0;       // fitted asymptotic amplitude
    double growth_constant = 0.0;     // fitted lim eta^{-q'} f (halfspace)
    double tail_fit_diag = 0.0;       // gauss/log-log slope diagnostic
    double residual_tol = 0.0;        // max re-step defect over the grid
};

struct ShootingConfig {
    double eta_min = -8.0;
    double eta_max = 34.0;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double max_step = 0.05;
    double bracket_lo = 1e-4;
    double bracket_hi = 1e2;
    int max_bisections = 200;
    double classification_window = 8.0;  // eta-range used for tail fits
};

// RHS of f'' + (eta/2) f' + (a/2) f - |f'|^q = 0 as a first order system.
std::array<double, 2> profile_rhs(const ScalingParams& p, double eta, double f,
                                  double g);

// Radial version: F'' + ((N-1)/r + r/2) F' + (a/2) F - |F'|^q = 0, with the
// removable-singularity value F''(0) = -(a/2) F(0) / N at r = 0, G = 0.
std::array<double, 2> radial_profile_rhs(const ScalingParams& p, double r,
                                         double F, double G);

// Half-space profile of the trace-((0,inf),0) solution: left-tail shooting
// on the amplitude C of f ~ C e^{-eta^2/4} (-eta)^{(3-2q)/(q-1)}, plus a
// backward-stable tail continuation matched at an interior node.
Profile solve_halfspace_profile(const ScalingParams& p,
                                const ShootingConfig& cfg = {});

// Very singular profile (1 < q < q*): shooting on beta = F(0), F'(0) = 0,
// between the fast (sign-change) and slow (algebraic-tail) trajectory classes.
Profile solve_vss_profile(const ScalingParams& p,
                          const ShootingConfig& cfg = {});

// U_beta family member for given beta > beta*: outward integration with
// algebraic tail; tail_constant is the fitted C(beta) of f eta^a -> C(beta).
Profile solve_u_beta(const ScalingParams& p, double beta,
                     const ShootingConfig& cfg = {});

// Serialization: CSV (eta,f,g) plus a JSON metadata sidecar at <path>.json.
void write_profile(const Profile& prof, const std::string& csv_path);

}  // namespace hjlab
