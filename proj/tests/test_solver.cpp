#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hjlab/solver.hpp"

using namespace hjlab;

namespace {

Grid unit_grid(double lo, double hi, int n) {
    Grid g;
    g.x_min = lo;
    g.x_max = hi;
    g.n_cells = n;
    return g;
}

double trapezoid_mass(const Grid& g, const std::vector<double>& v) {
    auto w = g.volume_weights();
    double m = 0.0;
    for (size_t i = 0; i < v.size(); ++i) m += w[i] * v[i];
    return m;
}

}  // namespace

TEST_CASE("grid validation") {
    Grid g = unit_grid(0.0, 1.0, 2);
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.n_cells = 11;
    g.x_max = -1.0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.x_max = 1.0;
    CHECK_NOTHROW(g.validate());

    Grid r;
    r.geometry = Geometry::Radial;
    r.dim = 3;
    r.x_min = 0.5;
    r.x_max = 1.0;
    r.n_cells = 11;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
    r.x_min = 0.0;
    CHECK_NOTHROW(r.validate());
    r.dim = 0;
    CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("volume weights integrate constants") {
    Grid g = unit_grid(0.0, 1.0, 11);
    std::vector<double> one(11, 1.0);
    CHECK(trapezoid_mass(g, one) == doctest::Approx(1.0).epsilon(1e-13));

    Grid r;
    r.geometry = Geometry::Radial;
    r.dim = 3;
    r.x_min = 0.0;
    r.x_max = 1.0;
    r.n_cells = 201;
    std::vector<double> oner(201, 1.0);
    // weights carry the full surface factor: sum ~ volume of the unit ball
    CHECK(trapezoid_mass(r, oner) ==
          doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-3));
}

TEST_CASE("initial data: dirac mollifier") {
    Grid g = unit_grid(-1.0, 1.0, 401);
    InitialData d;
    d.kind = InitialData::Kind::Dirac;
    d.mass = 2.5;
    d.center = 0.3;
    d.width = 0.2;
    auto v = build_initial(g, d);
    CHECK(trapezoid_mass(g, v) == doctest::Approx(2.5).epsilon(1e-12));
    for (double x : v) CHECK(x >= 0.0);

    // zero width defaults to 4 dx
    d.width = 0.0;
    d.center = 0.0;
    d.mass = 1.0;
    auto vd = build_initial(g, d);
    int nonzero = 0;
    for (double x : vd) nonzero += x > 0.0;
    CHECK(nonzero == 7);
    CHECK(trapezoid_mass(g, vd) == doctest::Approx(1.0).epsilon(1e-12));

    d.width = 0.005;  // < 2 dx
    CHECK_THROWS_AS(build_initial(g, d), std::invalid_argument);
    d.width = 0.2;
    d.mass = 0.0;
    CHECK_THROWS_AS(build_initial(g, d), std::invalid_argument);
    d.mass = 1.0;
    d.center = 5.0;  // off the grid
    CHECK_THROWS_AS(build_initial(g, d), std::invalid_argument);
}

TEST_CASE("initial data: indicator, function, infinite_on") {
    Grid g = unit_grid(-1.0, 1.0, 21);
    InitialData ind;
    ind.kind = InitialData::Kind::Indicator;
    ind.set_lo = -0.5;
    ind.set_hi = 0.5;
    ind.height = 2.0;
    auto v = build_initial(g, ind);
    CHECK(v[10] == doctest::Approx(2.0));         // x = 0 interior
    CHECK(v[15] == doctest::Approx(1.0));         // x = 0.5 half-covered cell
    CHECK(v[0] == 0.0);                           // dirichlet edge
    CHECK(v[20] == 0.0);

    InitialData fn;
    fn.kind = InitialData::Kind::Function;
    fn.values.assign(5, 1.0);  // wrong length
    CHECK_THROWS_AS(build_initial(g, fn), std::invalid_argument);

    InitialData inf;
    inf.kind = InitialData::Kind::InfiniteOn;
    inf.set_lo = -0.5;
    inf.set_hi = 0.5;
    inf.ladder = {1.0, 2.0};
    CHECK_THROWS_AS(build_initial(g, inf), std::invalid_argument);
}

TEST_CASE("stability bound of the explicit part") {
    Grid g = unit_grid(0.0, 1.0, 11);
    std::vector<double> ramp(11);
    for (int i = 0; i < 11; ++i) ramp[i] = 2.0 * g.node(i);
    SchemeConfig sc;
    sc.cfl_safety = 0.5;
    sc.dt_max = 1.0;
    const double q = 1.5;
    const double want = 0.5 * g.dx() / (2.0 * q * std::pow(2.0, q - 1.0));
    CHECK(stable_dt(g, ramp, q, sc) == doctest::Approx(want).epsilon(1e-12));

    // q < 1 uses the gradient floor P_eff = max(P, 0.5)
    for (int i = 0; i < 11; ++i) ramp[i] = 0.01 * g.node(i);
    const double q2 = 0.5;
    const double want2 =
        0.5 * g.dx() / (2.0 * q2 * std::pow(0.5, q2 - 1.0));
    CHECK(stable_dt(g, ramp, q2, sc) == doctest::Approx(want2).epsilon(1e-12));

    // absorption off: the bound is just dt_max
    sc.absorption = false;
    CHECK(stable_dt(g, ramp, q, sc) == sc.dt_max);
}

TEST_CASE("step rejects unstable dt and bad state") {
    Grid g = unit_grid(0.0, 1.0, 11);
    std::vector<double> ramp(11);
    for (int i = 0; i < 11; ++i) ramp[i] = 2.0 * g.node(i);
    SchemeConfig sc;
    const double bound = stable_dt(g, ramp, 1.5, sc);
    CHECK_THROWS_AS(step(g, ramp, 10.0 * bound, 1.5, sc),
                    std::invalid_argument);
    CHECK_NOTHROW(step(g, ramp, 0.5 * bound, 1.5, sc));

    std::vector<double> bad = ramp;
    bad[5] = std::nan("");
    CHECK_THROWS_AS(step(g, bad, 0.5 * bound, 1.5, sc),
                    std::invalid_argument);
    std::vector<double> short_state(5, 0.0);
    CHECK_THROWS_AS(step(g, short_state, 0.5 * bound, 1.5, sc),
                    std::invalid_argument);
}

TEST_CASE("zero state is a fixed point") {
    Grid g = unit_grid(-1.0, 1.0, 51);
    std::vector<double> zero(51, 0.0);
    SchemeConfig sc;
    auto u = step(g, zero, 1e-3, 1.5, sc);
    for (double v : u) CHECK(v == 0.0);
}

TEST_CASE("implicit diffusion decays discrete sine modes exactly") {
    // u0 = sin(pi x) on [0,1] is an eigenvector of the Dirichlet three-point
    // Laplacian; one BE (resp. CN) step must scale it by the known factor.
    Grid g = unit_grid(0.0, 1.0, 101);
    const double dx = g.dx();
    std::vector<double> u0(101);
    for (int i = 0; i < 101; ++i) u0[i] = std::sin(M_PI * g.node(i));
    const double lam = (2.0 - 2.0 * std::cos(M_PI * dx)) / (dx * dx);
    const double dt = 1e-3;

    SchemeConfig be;
    be.absorption = false;
    be.dt_max = dt;
    auto u_be = step(g, u0, dt, 2.0, be);
    const double fac_be = 1.0 / (1.0 + dt * lam);
    for (int i = 1; i < 100; ++i) {
        CHECK(u_be[i] == doctest::Approx(fac_be * u0[i]).epsilon(1e-10));
    }
    CHECK(u_be[0] == 0.0);
    CHECK(u_be[100] == 0.0);

    SchemeConfig cn = be;
    cn.diffusion = DiffusionScheme::CrankNicolson;
    auto u_cn = step(g, u0, dt, 2.0, cn);
    const double fac_cn = (1.0 - 0.5 * dt * lam) / (1.0 + 0.5 * dt * lam);
    for (int i = 1; i < 100; ++i) {
        CHECK(u_cn[i] == doctest::Approx(fac_cn * u0[i]).epsilon(1e-10));
    }
}

TEST_CASE("stepwise comparison of ordered states") {
    Grid g = unit_grid(-2.0, 2.0, 101);
    std::vector<double> lo(101), hi(101);
    for (int i = 0; i < 101; ++i) {
        const double x = g.node(i);
        lo[i] = std::exp(-2.0 * x * x);
        hi[i] = lo[i] + 0.3 * std::exp(-x * x);
    }
    SchemeConfig sc;
    const double q = 1.7;
    for (int k = 0; k < 5; ++k) {
        const double dt =
            0.9 * std::min(stable_dt(g, lo, q, sc), stable_dt(g, hi, q, sc));
        lo = step(g, lo, dt, q, sc);
        hi = step(g, hi, dt, q, sc);
        for (int i = 0; i < 101; ++i) CHECK(lo[i] <= hi[i] + 1e-12);
    }
}

TEST_CASE("run: boundary pinned to zero, mass nonincreasing") {
    Grid g = unit_grid(-1.0, 1.0, 201);
    InitialData ind;
    ind.kind = InitialData::Kind::Indicator;
    ind.set_lo = -0.5;
    ind.set_hi = 0.5;
    ind.height = 1.0;
    auto traj = run(g, ind, 1.5, 0.02, {0.005, 0.01, 0.02});
    REQUIRE(traj.times.size() == 3);
    double prev_mass = traj.initial_mass();
    for (size_t k = 0; k < traj.snaps.size(); ++k) {
        CHECK(traj.snaps[k].front() == 0.0);
        CHECK(traj.snaps[k].back() == 0.0);
        for (double v : traj.snaps[k]) CHECK(v >= 0.0);
        const double m = traj.mass(k);
        CHECK(m <= prev_mass + 1e-12);
        prev_mass = m;
    }
    // absorbed ledger is nonnegative and nondecreasing
    for (size_t k = 0; k < traj.absorbed_cum.size(); ++k) {
        CHECK(traj.absorbed_cum[k] >= 0.0);
        if (k) CHECK(traj.absorbed_cum[k] >= traj.absorbed_cum[k - 1]);
    }
}

TEST_CASE("run: argument validation") {
    Grid g = unit_grid(-1.0, 1.0, 51);
    InitialData ind;
    ind.kind = InitialData::Kind::Indicator;
    ind.set_lo = -0.5;
    ind.set_hi = 0.5;
    CHECK_THROWS_AS(run(g, ind, 0.0, 0.01, {0.01}), std::invalid_argument);
    CHECK_THROWS_AS(run(g, ind, 1.5, 0.01, {0.01, 0.005}),
                    std::invalid_argument);
    CHECK_THROWS_AS(run(g, ind, 1.5, 0.01, {-0.01}), std::invalid_argument);
    CHECK_THROWS_AS(signed_run(g, ind, 1.5, 0.01, {0.01}), std::domain_error);
}

TEST_CASE("run: infinite_on ladder diagnostics") {
    Grid g = unit_grid(-1.0, 1.0, 201);
    InitialData inf;
    inf.kind = InitialData::Kind::InfiniteOn;
    inf.set_lo = -0.4;
    inf.set_hi = 0.4;
    inf.ladder = {2.0, 4.0};
    auto traj = run(g, inf, 1.5, 0.02, {0.01, 0.02});
    REQUIRE(traj.ladder_gaps.size() == traj.times.size());
    for (double gap : traj.ladder_gaps) CHECK(gap >= 0.0);

    inf.ladder = {2.0};
    CHECK_THROWS_AS(run(g, inf, 1.5, 0.02, {0.01}), std::invalid_argument);
    inf.ladder = {2.0, 2.0};
    CHECK_THROWS_AS(run(g, inf, 1.5, 0.02, {0.01}), std::invalid_argument);
}

TEST_CASE("cole-hopf reference") {
    Grid g = unit_grid(-6.0, 6.0, 241);
    // constant data is a fixed point of the transform
    std::vector<double> u0(241, 0.7);
    auto ref = cole_hopf_reference(g, u0, 0.25);
    for (int i = 0; i < 241; ++i) {
        CHECK(ref[i] == doctest::Approx(0.7).epsilon(2e-4));
    }
    // linear data alpha x evolves exactly to alpha x - alpha^2 t
    const double alpha = 0.5, t = 0.25;
    for (int i = 0; i < 241; ++i) u0[i] = alpha * g.node(i);
    ref = cole_hopf_reference(g, u0, t);
    for (int i = 0; i < 241; ++i) {
        if (std::fabs(g.node(i)) > 2.0) continue;  // edge-extension zone
        CHECK(std::fabs(ref[i] - (alpha * g.node(i) - alpha * alpha * t)) <=
              5e-4);
    }
    CHECK_THROWS_AS(cole_hopf_reference(g, u0, 0.0), std::domain_error);
    Grid r;
    r.geometry = Geometry::Radial;
    r.x_min = 0.0;
    r.x_max = 1.0;
    r.n_cells = 241;
    CHECK_THROWS_AS(cole_hopf_reference(r, u0, 1e-3), std::invalid_argument);
}

TEST_CASE("geometric time ladder") {
    auto ts = geometric_times(1e-3, 1e-2, 2.0);
    REQUIRE(ts.size() == 5);
    CHECK(ts.front() == doctest::Approx(1e-3));
    CHECK(ts.back() == doctest::Approx(1e-2));
    for (size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] > ts[i - 1]);
    CHECK_THROWS_AS(geometric_times(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(geometric_times(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(geometric_times(1e-3, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("trajectory serialization") {
    Grid g = unit_grid(-1.0, 1.0, 101);
    InitialData ind;
    ind.kind = InitialData::Kind::Indicator;
    ind.set_lo = -0.5;
    ind.set_hi = 0.5;
    auto traj = run(g, ind, 1.5, 0.02, {0.01, 0.02});
    const std::string dir = "/tmp/hjlab_test_traj";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    write_trajectory(traj, dir);

    std::ifstream meta(dir + "/meta.json");
    REQUIRE(meta.good());
    std::string all((std::istreambuf_iterator<char>(meta)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("\"times\"") != std::string::npos);

    std::ifstream s0(dir + "/snap_0.csv");
    REQUIRE(s0.good());
    std::string header;
    std::getline(s0, header);
    CHECK(header == "x,u");
    size_t rows = 0;
    std::string line;
    while (std::getline(s0, line)) ++rows;
    CHECK(rows == 101);
    std::filesystem::remove_all(dir);
}
