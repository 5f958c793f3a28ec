#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hjlab/scaling.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/trace.hpp"

using namespace hjlab;

namespace {

// bounded smooth data, q = 1.5
const Trajectory& gauss_run() {
    static const Trajectory traj = [] {
        Grid g;
        g.x_min = -2.0;
        g.x_max = 2.0;
        g.n_cells = 401;
        std::vector<double> u0(401);
        for (int i = 0; i < 401; ++i) {
            u0[i] = std::exp(-4.0 * g.node(i) * g.node(i));
        }
        InitialData fn;
        fn.kind = InitialData::Kind::Function;
        fn.values = u0;
        return run(g, fn, 1.5, 0.05, geometric_times(5e-4, 0.05));
    }();
    return traj;
}

// infinite data on [0,2], q = 2, rungs tall enough that the self-similar
// front has swallowed x = 1 by the first output time
const Trajectory& wall_run() {
    static const Trajectory traj = [] {
        Grid g;
        g.x_min = -2.0;
        g.x_max = 2.0;
        g.n_cells = 401;
        InitialData inf;
        inf.kind = InitialData::Kind::InfiniteOn;
        inf.set_lo = 0.0;
        inf.set_hi = 2.0;
        inf.ladder = {500.0, 1000.0};
        return run(g, inf, 2.0, 0.01, geometric_times(1e-3, 0.01));
    }();
    return traj;
}

}  // namespace

TEST_CASE("bounded data classifies regular with the right density") {
    auto rep = classify_points(gauss_run(), {0.0, 0.7}, {0.1, 0.2});
    REQUIRE(rep.points.size() == 2);
    for (const auto& p : rep.points) {
        CAPTURE(p.x);
        CHECK(p.cls == PointClass::Regular);
        CHECK(std::fabs(p.mass_slope) <= 0.05);
    }
    // density ~ the epsilon-average of the initial data at the finest epsilon
    double want0 = 0.0;
    const int m = 400;
    for (int i = 0; i <= m; ++i) {
        const double x = -0.1 + 0.2 * i / m;
        want0 += std::exp(-4.0 * x * x) * ((i == 0 || i == m) ? 0.5 : 1.0);
    }
    want0 /= m;
    CHECK(rep.points[0].regular_density ==
          doctest::Approx(want0).epsilon(0.02));
    // per-epsilon table is filled for every (point, epsilon) pair
    REQUIRE(rep.per_epsilon.size() == 2);
    for (const auto& row : rep.per_epsilon) {
        REQUIRE(row.size() == 2);
        for (auto c : row) CHECK(c == PointClass::Regular);
    }
}

TEST_CASE("infinite-data wall: singular inside, regular outside") {
    auto rep = classify_points(wall_run(), {1.0, -1.0}, {0.1, 0.2});
    REQUIRE(rep.points.size() == 2);
    CHECK(rep.points[0].cls == PointClass::Singular);
    CHECK(rep.points[0].mass_slope <= -0.2);
    CHECK(rep.points[1].cls == PointClass::Regular);
    CHECK(rep.points[1].regular_density <= 1e-6);
}

TEST_CASE("gamma estimates on the wall evolution") {
    auto p = ScalingParams::make(2.0, 1);
    auto gam = estimate_gamma(wall_run(), p, {0.5, 1.0, -1.0});
    REQUIRE(gam.size() == 3);
    // t u -> c_q x^{q'} = x^2/4 inside the front
    CHECK(gam[0] == doctest::Approx(0.25 * 0.25).epsilon(0.15));
    CHECK(gam[1] == doctest::Approx(0.25).epsilon(0.15));
    CHECK(gam[2] <= 1e-6);
    CHECK_THROWS_AS(
        estimate_gamma(wall_run(), ScalingParams::make(0.8, 1), {0.0}),
        std::domain_error);
}

TEST_CASE("dirac mass is recovered at small epsilon") {
    Grid g;
    g.x_min = -1.0;
    g.x_max = 1.0;
    g.n_cells = 401;
    InitialData d;
    d.kind = InitialData::Kind::Dirac;
    d.mass = 1.0;
    d.width = 0.05;
    auto traj = run(g, d, 1.3, 0.01, geometric_times(1e-4, 1e-2));
    CHECK(recovered_local_mass(traj, 0.0, 0.3) ==
          doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("regular part reconstruction") {
    auto vals = estimate_regular_part(gauss_run(), -0.5, 0.5, 0.1);
    REQUIRE(!vals.empty());
    // midpoint of the region is x = 0 where the data peaks at 1
    const double mid = vals[vals.size() / 2];
    CHECK(mid == doctest::Approx(1.0).epsilon(0.05));
    for (double v : vals) CHECK(v >= 0.0);
}

TEST_CASE("q <= 1 boundedness audit") {
    Grid g;
    g.x_min = -2.0;
    g.x_max = 2.0;
    g.n_cells = 401;
    std::vector<double> u0(401);
    for (int i = 0; i < 401; ++i) {
        u0[i] = std::exp(-4.0 * g.node(i) * g.node(i));
    }
    InitialData fn;
    fn.kind = InitialData::Kind::Function;
    fn.values = u0;
    auto traj = run(g, fn, 0.8, 0.05, geometric_times(5e-4, 0.05));
    auto rep = q_le_1_trace_boundedness(traj, {0.0, 0.5, -0.5});
    CHECK(rep.check_id == "q_le_1_trace");
    CHECK(rep.pass);

    CHECK_THROWS_AS(q_le_1_trace_boundedness(gauss_run(), {0.0}),
                    std::domain_error);
}

TEST_CASE("trace audit rejects bad parameters") {
    // epsilon below three cells
    CHECK_THROWS_AS(classify_points(gauss_run(), {0.0}, {0.02}),
                    std::invalid_argument);
    CHECK_THROWS_AS(classify_points(gauss_run(), {}, {0.1}),
                    std::invalid_argument);
    // too few snapshots in the smallest decade
    Grid g;
    g.x_min = -1.0;
    g.x_max = 1.0;
    g.n_cells = 201;
    InitialData ind;
    ind.kind = InitialData::Kind::Indicator;
    ind.set_lo = -0.5;
    ind.set_hi = 0.5;
    auto traj = run(g, ind, 1.5, 0.02, {0.01, 0.02});
    CHECK_THROWS_AS(classify_points(traj, {0.0}, {0.1}),
                    std::invalid_argument);
}

TEST_CASE("trace report serialization") {
    auto rep = classify_points(gauss_run(), {0.0}, {0.1, 0.2});
    const std::string js = "/tmp/hjlab_test_trace.json";
    const std::string csv = "/tmp/hjlab_test_trace.csv";
    write_trace_report(rep, js, csv);

    std::ifstream jin(js);
    REQUIRE(jin.good());
    std::string all((std::istreambuf_iterator<char>(jin)),
                    std::istreambuf_iterator<char>());
    CHECK(all.find("\"classification\"") != std::string::npos);
    CHECK(all.find("REGULAR") != std::string::npos);

    std::ifstream cin_(csv);
    REQUIRE(cin_.good());
    std::string header;
    std::getline(cin_, header);
    CHECK(header == "x,classification_code,density,gamma");
    size_t rows = 0;
    std::string line;
    while (std::getline(cin_, line)) ++rows;
    CHECK(rows == 1);
    std::remove(js.c_str());
    std::remove(csv.c_str());
}
