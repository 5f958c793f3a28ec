#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "hjlab/profile.hpp"
#include "hjlab/scaling.hpp"

using namespace hjlab;

namespace {

double lerp_profile(const Profile& prof, double eta) {
    const auto& e = prof.eta;
    REQUIRE(e.size() >= 2);
    REQUIRE(eta >= e.front());
    REQUIRE(eta <= e.back());
    size_t i = 1;
    while (i + 1 < e.size() && e[i] < eta) ++i;
    const double w = (eta - e[i - 1]) / (e[i] - e[i - 1]);
    return (1.0 - w) * prof.f[i - 1] + w * prof.f[i];
}

}  // namespace

TEST_CASE("profile rhs pinned values") {
    auto p15 = ScalingParams::make(1.5, 1);
    auto r = profile_rhs(p15, 2.0, 1.0, 0.5);
    CHECK(r[0] == doctest::Approx(0.5));
    // -(eta/2) g - (a/2) f + |g|^q = -0.5 - 0.5 + 0.5^1.5
    CHECK(r[1] == doctest::Approx(-1.0 + std::pow(0.5, 1.5)).epsilon(1e-13));

    auto p2 = ScalingParams::make(2.0, 1);
    auto r2 = profile_rhs(p2, 0.0, std::log(2.0), 1.0 / std::sqrt(M_PI));
    CHECK(r2[0] == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    CHECK(r2[1] == doctest::Approx(1.0 / M_PI).epsilon(1e-13));

    CHECK_THROWS_AS(profile_rhs(ScalingParams::make(0.9, 1), 0.0, 1.0, 0.0),
                    std::domain_error);
}

TEST_CASE("radial profile rhs and the r=0 row") {
    auto p = ScalingParams::make(1.75, 3);
    const double a = p.a();
    const double beta = 2.0;
    auto r0 = radial_profile_rhs(p, 0.0, beta, 0.0);
    CHECK(r0[0] == 0.0);
    CHECK(r0[1] == doctest::Approx(-0.5 * a * beta / 3.0).epsilon(1e-13));

    const double r = 0.7, F = 1.3, G = -0.4;
    auto rr = radial_profile_rhs(p, r, F, G);
    const double want =
        -((3.0 - 1.0) / r + 0.5 * r) * G - 0.5 * a * F + std::pow(0.4, 1.75);
    CHECK(rr[0] == doctest::Approx(G));
    CHECK(rr[1] == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("q=2 half-space profile reproduces the closed form") {
    auto p = ScalingParams::make(2.0, 1);
    Profile prof = solve_halfspace_profile(p);
    double worst = 0.0;
    for (size_t i = 0; i < prof.eta.size(); ++i) {
        if (prof.eta[i] < -6.0 || prof.eta[i] > 6.0) continue;
        worst = std::max(worst,
                         std::fabs(prof.f[i] - closed_form_q2(prof.eta[i])));
    }
    CHECK(worst <= 1e-7);
    // between-node interpolation carries the O(h^2) lerp error
    CHECK(lerp_profile(prof, 0.0) ==
          doctest::Approx(std::log(2.0)).epsilon(2e-4));
    CHECK(prof.growth_constant == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("half-space profile invariants across q") {
    for (double q : {1.3, 1.5, 2.0, 2.5}) {
        CAPTURE(q);
        auto p = ScalingParams::make(q, 1);
        Profile prof = solve_halfspace_profile(p);
        REQUIRE(prof.eta.size() >= 100);
        // grid strictly increasing, f nonnegative, f' nonnegative and
        // nondecreasing (convexity)
        for (size_t i = 0; i < prof.eta.size(); ++i) {
            if (i) CHECK(prof.eta[i] > prof.eta[i - 1]);
            CHECK(prof.f[i] >= 0.0);
            CHECK(prof.g[i] >= -1e-12);
            if (i) CHECK(prof.g[i] >= prof.g[i - 1] - 1e-9);
        }
        CHECK(prof.residual_tol >= 0.0);
        CHECK(prof.residual_tol <= 0.05);
        CHECK(prof.growth_constant ==
              doctest::Approx(p.c_q()).epsilon(0.02));
        // growth envelope: f stays below c_q eta^{q'} plus the f(0) offset
        const double off = 1.1 * std::pow(lerp_profile(prof, 0.0),
                                          1.0 / p.q_conj());
        for (size_t i = 0; i < prof.eta.size(); ++i) {
            if (prof.eta[i] < 0.5) continue;
            const double env = std::pow(prof.f[i], 1.0 / p.q_conj()) -
                               std::pow(p.c_q(), 1.0 / p.q_conj()) *
                                   prof.eta[i];
            CHECK(env <= off);
        }
    }
}

TEST_CASE("half-space shooting is deterministic") {
    auto p = ScalingParams::make(1.7, 1);
    Profile a = solve_halfspace_profile(p);
    Profile b = solve_halfspace_profile(p);
    REQUIRE(a.eta.size() == b.eta.size());
    CHECK(a.shooting_parameter == b.shooting_parameter);
    for (size_t i = 0; i < a.f.size(); ++i) {
        CHECK(a.f[i] == b.f[i]);
        CHECK(a.g[i] == b.g[i]);
    }
}

TEST_CASE("very singular profile at q=1.25") {
    auto p = ScalingParams::make(1.25, 1);
    Profile prof = solve_vss_profile(p);
    REQUIRE(prof.eta.size() >= 50);
    CHECK(prof.kind == ProfileKind::Vss);
    CHECK(prof.shooting_parameter > 0.0);
    // F'(0) = 0 at the Taylor start, F decreasing outward
    CHECK(std::fabs(prof.g.front()) <= 1e-3 * prof.f.front());
    for (size_t i = 1; i < prof.f.size(); ++i) {
        CHECK(prof.f[i] <= prof.f[i - 1] + 1e-12);
    }
    // Gaussian tail: slope of log F against -eta^2/4 near 1
    CHECK(prof.tail_fit_diag == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("very singular profile rejects q >= q*") {
    CHECK_THROWS_AS(solve_vss_profile(ScalingParams::make(1.6, 1)),
                    std::domain_error);
    CHECK_THROWS_AS(solve_vss_profile(ScalingParams::make(1.5, 1)),
                    std::domain_error);
}

TEST_CASE("u_beta family: algebraic tail and parameter checks") {
    auto p = ScalingParams::make(1.75, 1);
    Profile prof = solve_u_beta(p, 1.0);
    CHECK(prof.kind == ProfileKind::UBeta);
    CHECK(prof.f.front() == doctest::Approx(1.0).epsilon(1e-6));
    // tail F ~ C eta^{-a}: log-log slope -a = -1/3 within 5%
    CHECK(prof.tail_fit_diag == doctest::Approx(-p.a()).epsilon(0.05));
    CHECK(prof.tail_constant > 0.0);

    CHECK_THROWS_AS(solve_u_beta(ScalingParams::make(2.5, 1), 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(solve_u_beta(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_u_beta(p, -2.0), std::invalid_argument);
}

TEST_CASE("u_beta tail amplitude grows with beta") {
    auto p = ScalingParams::make(1.75, 1);
    double prev = 0.0;
    for (double beta : {0.5, 1.0, 2.0}) {
        Profile prof = solve_u_beta(p, beta);
        CHECK(prof.tail_constant > prev);
        prev = prof.tail_constant;
    }
}

TEST_CASE("profile serialization round trip") {
    auto p = ScalingParams::make(1.5, 1);
    Profile prof = solve_halfspace_profile(p);
    const std::string csv = "/tmp/hjlab_test_profile.csv";
    write_profile(prof, csv);

    std::ifstream in(csv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "eta,f,g");
    size_t rows = 0;
    std::string line;
    double e0 = 0.0, f0 = 0.0, g0 = 0.0;
    while (std::getline(in, line)) {
        if (rows == 0) {
            std::sscanf(line.c_str(), "%lf,%lf,%lf", &e0, &f0, &g0);
        }
        ++rows;
    }
    CHECK(rows == prof.eta.size());
    CHECK(e0 == prof.eta.front());
    CHECK(f0 == prof.f.front());

    std::ifstream js(csv + ".json");
    REQUIRE(js.good());
    std::stringstream ss;
    ss << js.rdbuf();
    CHECK(ss.str().find("\"q\"") != std::string::npos);
    CHECK(ss.str().find("halfspace") != std::string::npos);
    std::remove(csv.c_str());
    std::remove((csv + ".json").c_str());
}
