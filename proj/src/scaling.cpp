#include "hjlab/scaling.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hjlab {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kCfThreshold = 1.0;  // series below, continued fraction above
}  // namespace

double ScalingParams::require(const std::optional<double>& v,
                              const char* name) const {
    if (!v) {
        throw std::domain_error(std::string(name) +
                                " undefined for q<=1 (q=" + std::to_string(q) +
                                ")");
    }
    return *v;
}

ScalingParams ScalingParams::make(double q, int dim) {
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("scaling_params: q must be finite and > 0");
    }
    if (dim < 1) {
        throw std::invalid_argument("scaling_params: dim must be >= 1");
    }
    ScalingParams p;
    p.q = q;
    p.dim = dim;
    p.q_star = double(dim + 2) / double(dim + 1);
    if (q > 1.0) {
        const double qc = q / (q - 1.0);
        p.q_conj_ = qc;
        p.a_ = (2.0 - q) / (q - 1.0);
        // c_q = (q')^{-q'} (1/(q-1))^{1/(q-1)}, via logs for stability
        p.c_q_ = std::exp(-qc * std::log(qc) -
                          std::log(q - 1.0) / (q - 1.0));
        const double M = qc * (1.0 + qc);
        p.C_q_barrier_ =
            std::exp(-(q * std::log(M) + std::log(q - 1.0)) / (q - 1.0));
    }
    return p;
}

namespace {

// erf(x) by Maclaurin series; adequate for |x| <= ~1.2
double erf_series(double x) {
    const double x2 = x * x;
    double term = x;
    double sum = x;
    for (int n = 1; n < 80; ++n) {
        term *= -x2 / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return 2.0 / kSqrtPi * sum;
}

// Continued fraction for sqrt(pi) * exp(x^2) * erfc(x), x >= kCfThreshold:
//   1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated by the modified Lentz algorithm.
double erfcx_cf(double x) {
    const double tiny = 1e-300;
    double f = x != 0.0 ? x : tiny;
    double C = f;
    double D = 0.0;
    for (int n = 1; n < 400; ++n) {
        const double an = 0.5 * n;
        D = x + an * D;
        if (D == 0.0) D = tiny;
        C = x + an / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

}  // namespace

double erfc_scaled(double x) {
    if (x < kCfThreshold) {
        throw std::invalid_argument("erfc_scaled requires x >= 1");
    }
    return erfcx_cf(x) / kSqrtPi;
}

double erfc(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("erfc: non-finite argument");
    }
    const double ax = std::fabs(x);
    double pos;
    if (ax < kCfThreshold) {
        pos = 1.0 - erf_series(ax);
    } else {
        pos = std::exp(-ax * ax) * erfcx_cf(ax) / kSqrtPi;
    }
    return x >= 0.0 ? pos : 2.0 - pos;
}

double closed_form_q2(double eta) {
    if (!std::isfinite(eta)) {
        throw std::invalid_argument("closed_form_q2: non-finite argument");
    }
    const double z = 0.5 * eta;
    if (eta >= 3.0) {
        // -ln(exp(-z^2) erfcx(z) / 2) = z^2 + ln 2 - ln erfcx(z)
        return z * z + std::log(2.0) - std::log(erfc_scaled(z));
    }
    if (eta <= 0.0) {
        // erfc(z) = 2 - erfc(-z); -ln(1 - erfc(-z)/2) via log1p
        return -std::log1p(-0.5 * erfc(-z));
    }
    return -std::log(0.5 * erfc(z));
}

double closed_form_q2_deriv(double eta) {
    if (!std::isfinite(eta)) {
        throw std::invalid_argument("closed_form_q2_deriv: non-finite argument");
    }
    const double z = 0.5 * eta;
    if (eta >= 3.0) {
        return 1.0 / (kSqrtPi * erfc_scaled(z));
    }
    return std::exp(-z * z) / (kSqrtPi * erfc(z));
}

Barrier default_barrier(const ScalingParams& p) {
    const double qc = p.q_conj();
    const double M = qc * (1.0 + qc);
    Barrier b;
    b.h = std::pow(M, p.q);
    b.lambda = std::max(double(p.dim) * M, (p.q - 1.0) * std::pow(M, p.q));
    return b;
}

double barrier_spatial(const ScalingParams& p, double r) {
    if (r >= 1.0) return 0.0;
    if (r < 0.0) throw std::domain_error("barrier_spatial: r < 0");
    const double qc = p.q_conj();
    return (1.0 + qc * r) * std::pow(1.0 - r, qc);
}

double barrier_psi(const ScalingParams& p, double h, double t) {
    if (!(t > 0.0)) throw std::domain_error("barrier_psi: t must be > 0");
    const double e = -std::expm1(-h * (p.q - 1.0) * t);  // 1 - exp(-h(q-1)t)
    return std::pow(e, -1.0 / (p.q - 1.0));
}

double barrier_subsolution(const Barrier& b, const ScalingParams& p,
                           double x, double t) {
    if (!(t > 0.0)) throw std::domain_error("barrier_subsolution: t must be > 0");
    const double rho = b.radius;
    const double r = std::fabs(x - b.center) / rho;
    if (r >= 1.0) return 0.0;
    const double ts = t / (rho * rho);
    return std::pow(rho, -p.a()) * std::exp(-b.lambda * ts) *
           barrier_psi(p, b.h, ts) * barrier_spatial(p, r);
}

}  // namespace hjlab
