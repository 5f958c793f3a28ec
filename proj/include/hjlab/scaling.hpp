#pragma once

#include <optional>
#include <stdexcept>

namespace hjlab {

// All q-derived constants shared by the profile and PDE machinery.
// The fields q_conj, a, c_q, C_q_barrier exist only for q > 1; the
// accessors throw std::domain_error otherwise.
struct ScalingParams {
    double q = 0.0;
    int dim = 1;
    double q_star = 0.0;  // (N+2)/(N+1)

    double q_conj() const { return require(q_conj_, "q_conj"); }
    double a() const { return require(a_, "a"); }
    double c_q() const { return require(c_q_, "c_q"); }
    double C_q_barrier() const { return require(C_q_barrier_, "C_q_barrier"); }
    bool has_supercritical_fields() const { return q_conj_.has_value(); }

    static ScalingParams make(double q, int dim);

    std::optional<double> q_conj_;
    std::optional<double> a_;
    std::optional<double> c_q_;
    std::optional<double> C_q_barrier_;

private:
    double require(const std::optional<double>& v, const char* name) const;
};

// Complementary error function, self-contained: Maclaurin series for small
// arguments, Lentz continued fraction beyond. Relative error < 1e-13 for
// |x| <= 10.
double erfc(double x);

// exp(x^2) * erfc(x) for x >= 1, evaluated without underflow.
double erfc_scaled(double x);

// The explicit q=2 half-space profile f(eta) = -ln(erfc(eta/2)/2).
// Stable for all finite eta: uses the scaled erfc for eta >= 3 and log1p
// on the negative side.
double closed_form_q2(double eta);

// f'(eta) = exp(-eta^2/4) / (sqrt(pi) * erfc(eta/2)), same stability domain.
double closed_form_q2_deriv(double eta);

// Compact-support subsolution of Prop-2.7 type: w(x,t) =
// rho^{-a} exp(-lambda t/rho^2) psi_h(t/rho^2) f(|x-center|/rho),
// vanishing outside the ball of radius rho.
struct Barrier {
    double h = 0.0;
    double lambda = 0.0;
    double radius = 1.0;
    double center = 0.0;
};

// h = M^q and lambda = max(N*M, (q-1)*M^q) with M = q'(1+q'), the choice
// that makes the barrier a classical subsolution.
Barrier default_barrier(const ScalingParams& p);

// Spatial factor (1 + q' r)(1 - r)^{q'} on [0,1], zero for r >= 1.
double barrier_spatial(const ScalingParams& p, double r);

// psi_h(t) = (1 - exp(-h(q-1)t))^{-1/(q-1)}, decreasing from +inf to 1.
double barrier_psi(const ScalingParams& p, double h, double t);

double barrier_subsolution(const Barrier& b, const ScalingParams& p,
                           double x, double t);

}  // namespace hjlab
