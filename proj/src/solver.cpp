#include "hjlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hjlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sphere_area(int dim) {
    // |S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)
    return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// One-sided differences -> monotone (Osher-Sethian) or central gradient
// magnitude at every node. Boundary nodes get 0 (Dirichlet pins them).
void gradient_magnitude(const Grid& grid, const std::vector<double>& u,
                        GradientScheme scheme, std::vector<double>& out) {
    const int n = grid.n_cells;
    const double dx = grid.dx();
    out.assign(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double dm = (u[i] - u[i - 1]) / dx;
        const double dp = (u[i + 1] - u[i]) / dx;
        if (scheme == GradientScheme::MonotoneUpwind) {
            const double am = std::max(dm, 0.0);
            const double ap = std::min(dp, 0.0);
            out[i] = std::sqrt(am * am + ap * ap);
        } else {
            out[i] = std::fabs(u[i + 1] - u[i - 1]) / (2.0 * dx);
        }
    }
    if (grid.geometry == Geometry::Radial) {
        // symmetry at r=0: mirrored neighbor
        const double dm = (u[0] - u[1]) / dx;
        const double dp = (u[1] - u[0]) / dx;
        if (scheme == GradientScheme::MonotoneUpwind) {
            const double am = std::max(dm, 0.0);
            const double ap = std::min(dp, 0.0);
            out[0] = std::sqrt(am * am + ap * ap);
        } else {
            out[0] = 0.0;
        }
    }
}

// Thomas solve of a tridiagonal system; diag/lower/upper are overwritten.
void thomas(std::vector<double>& lower, std::vector<double>& diag,
            std::vector<double>& upper, std::vector<double>& rhs) {
    const size_t n = diag.size();
    for (size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

// Discrete Laplacian row coefficients (lower, diag, upper) scaled so the
// operator is (L u)_i; conservative form keeps the radial M-matrix sign.
struct LaplacianRows {
    std::vector<double> lo, di, up;
    LaplacianRows(const Grid& grid) {
        const int n = grid.n_cells;
        const double dx2 = grid.dx() * grid.dx();
        lo.assign(n, 0.0);
        di.assign(n, 0.0);
        up.assign(n, 0.0);
        if (grid.geometry == Geometry::Cartesian1D) {
            for (int i = 1; i + 1 < n; ++i) {
                lo[i] = 1.0 / dx2;
                up[i] = 1.0 / dx2;
                di[i] = -2.0 / dx2;
            }
        } else {
            const int N = grid.dim;
            // r = 0: 2N (u1 - u0)/dr^2 from symmetry
            di[0] = -2.0 * N / dx2;
            up[0] = 2.0 * N / dx2;
            for (int i = 1; i + 1 < n; ++i) {
                const double rm = i - 0.5, rp = i + 0.5, rc = i;
                const double cm = std::pow(rm / rc, N - 1) / dx2;
                const double cp = std::pow(rp / rc, N - 1) / dx2;
                lo[i] = cm;
                up[i] = cp;
                di[i] = -(cm + cp);
            }
        }
        // boundary rows identity (Dirichlet); handled in the solver
    }
    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        const size_t n = u.size();
        out.assign(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            double s = di[i] * u[i];
            if (i > 0) s += lo[i] * u[i - 1];
            if (i + 1 < n) s += up[i] * u[i + 1];
            out[i] = s;
        }
    }
};

class Stepper {
public:
    Stepper(const Grid& grid, double q, const SchemeConfig& scheme)
        : grid_(grid), q_(q), scheme_(scheme), lap_(grid),
          weights_(grid.volume_weights()) {}

    double stable_dt(const std::vector<double>& u) const {
        if (!scheme_.absorption) return scheme_.dt_max;
        std::vector<double> g;
        gradient_magnitude(grid_, u, scheme_.gradient, g);
        double pmax = 0.0;
        for (double v : g) pmax = std::max(pmax, v);
        // explicit-part monotonicity: dt * q * P^{q-1} * 2/dx <= 1
        const double p_eff = q_ >= 1.0 ? pmax : std::max(pmax, 0.5);
        if (p_eff <= 0.0) return scheme_.dt_max;
        const double bound =
            scheme_.cfl_safety * grid_.dx() /
            (2.0 * q_ * std::pow(p_eff, q_ - 1.0));
        return std::min(bound, scheme_.dt_max);
    }

    void advance(std::vector<double>& u, double dt) {
        const int n = grid_.n_cells;
        if (scheme_.absorption) {
            gradient_magnitude(grid_, u, scheme_.gradient, work_);
            const int i0 = grid_.geometry == Geometry::Radial ? 0 : 1;
            for (int i = i0; i + 1 < n; ++i) {
                const double dec = dt * std::pow(work_[i], q_);
                if (scheme_.nonneg && u[i] - dec < 0.0) {
                    absorbed_ += weights_[i] * std::max(u[i], 0.0);
                    clamped_ += weights_[i] * (dec - std::max(u[i], 0.0));
                    u[i] = 0.0;
                } else {
                    absorbed_ += weights_[i] * dec;
                    u[i] -= dec;
                }
            }
        }
        implicit_diffusion(u, dt);
        if (scheme_.nonneg) {
            for (int i = 0; i < n; ++i) {
                if (u[i] < 0.0) {
                    clamped_ += -weights_[i] * u[i];
                    u[i] = 0.0;
                }
            }
        }
    }

    double absorbed() const { return absorbed_; }
    double clamped() const { return clamped_; }

private:
    void implicit_diffusion(std::vector<double>& u, double dt) {
        const int n = grid_.n_cells;
        const double theta =
            scheme_.diffusion == DiffusionScheme::CrankNicolson ? 0.5 : 1.0;
        std::vector<double> lo(n), di(n), up(n), rhs(n);
        if (theta < 1.0) {
            lap_.apply(u, rhs);
            for (int i = 0; i < n; ++i) rhs[i] = u[i] + dt * (1 - theta) * rhs[i];
        } else {
            rhs = u;
        }
        const bool radial = grid_.geometry == Geometry::Radial;
        for (int i = 0; i < n; ++i) {
            lo[i] = -dt * theta * lap_.lo[i];
            up[i] = -dt * theta * lap_.up[i];
            di[i] = 1.0 - dt * theta * lap_.di[i];
        }
        // Dirichlet at x_min (cartesian) and x_max; symmetry row at r=0
        if (!radial) {
            lo[0] = up[0] = 0.0;
            di[0] = 1.0;
            rhs[0] = 0.0;
        }
        lo[n - 1] = up[n - 1] = 0.0;
        di[n - 1] = 1.0;
        rhs[n - 1] = 0.0;
        thomas(lo, di, up, rhs);
        u = rhs;
    }

    Grid grid_;
    double q_;
    SchemeConfig scheme_;
    LaplacianRows lap_;
    std::vector<double> weights_;
    std::vector<double> work_;
    double absorbed_ = 0.0;
    double clamped_ = 0.0;
};

std::vector<double> indicator_values(const Grid& grid, double lo, double hi,
                                     double height) {
    const int n = grid.n_cells;
    const double dx = grid.dx();
    std::vector<double> v(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double a = grid.node(i) - 0.5 * dx;
        const double b = grid.node(i) + 0.5 * dx;
        const double overlap =
            std::max(0.0, std::min(b, hi) - std::max(a, lo));
        v[i] = height * overlap / dx;
    }
    if (grid.geometry == Geometry::Cartesian1D) v[0] = 0.0;
    v[n - 1] = 0.0;
    return v;
}

Trajectory run_impl(const Grid& grid, const InitialData& init, double q,
                    double t_end, const std::vector<double>& output_times,
                    const SchemeConfig& scheme, bool signed_mode) {
    grid.validate();
    if (!(q > 0.0)) throw std::invalid_argument("run: q must be > 0");
    for (size_t i = 0; i < output_times.size(); ++i) {
        if (output_times[i] <= 0.0 ||
            (i > 0 && output_times[i] <= output_times[i - 1])) {
            throw std::invalid_argument("run: output_times must be positive "
                                        "and increasing");
        }
    }

    auto single = [&](const std::vector<double>& u0) {
        Trajectory traj;
        traj.grid = grid;
        traj.q = q;
        traj.signed_mode = signed_mode;
        traj.scheme = scheme;
        traj.init_spec = init;
        traj.initial = u0;
        Stepper st(grid, q, scheme);
        std::vector<double> u = u0;
        double t = 0.0;
        for (double tk : output_times) {
            if (tk > t_end + 1e-15) break;
            while (t < tk - 1e-15) {
                double dt = std::min(st.stable_dt(u), tk - t);
                st.advance(u, dt);
                t += dt;
            }
            for (double v : u) {
                if (!std::isfinite(v)) {
                    throw std::runtime_error(
                        "run: non-finite state at t=" + std::to_string(t));
                }
            }
            traj.times.push_back(t);
            traj.snaps.push_back(u);
            traj.absorbed_cum.push_back(st.absorbed());
            traj.clamped_cum.push_back(st.clamped());
        }
        return traj;
    };

    if (init.kind == InitialData::Kind::InfiniteOn) {
        if (init.ladder.size() < 2) {
            throw std::invalid_argument("infinite_on: ladder needs >= 2 rungs");
        }
        for (size_t i = 1; i < init.ladder.size(); ++i) {
            if (init.ladder[i] <= init.ladder[i - 1]) {
                throw std::invalid_argument(
                    "infinite_on: ladder must be strictly increasing");
            }
        }
        Trajectory prev, top;
        for (size_t r = 0; r < init.ladder.size(); ++r) {
            std::vector<double> u0 = indicator_values(
                grid, init.set_lo, init.set_hi, init.ladder[r]);
            Trajectory cur = single(u0);
            if (r + 1 == init.ladder.size()) {
                cur.ladder_gaps.assign(cur.times.size(), 0.0);
                for (size_t k = 0; k < cur.times.size(); ++k) {
                    double gap = 0.0;
                    for (int i = 0; i < grid.n_cells; ++i) {
                        gap = std::max(gap, std::fabs(cur.snaps[k][i] -
                                                      prev.snaps[k][i]));
                    }
                    cur.ladder_gaps[k] = gap;
                }
                top = std::move(cur);
            } else {
                prev = std::move(cur);
            }
        }
        return top;
    }
    return single(build_initial(grid, init));
}

}  // namespace

void Grid::validate() const {
    if (n_cells < 3) throw std::invalid_argument("grid: n_cells must be >= 3");
    if (!(x_max > x_min)) throw std::invalid_argument("grid: x_max <= x_min");
    if (geometry == Geometry::Radial) {
        if (x_min != 0.0) throw std::invalid_argument("radial grid: x_min != 0");
        if (dim < 1) throw std::invalid_argument("radial grid: dim < 1");
    }
}

std::vector<double> Grid::volume_weights() const {
    std::vector<double> w(n_cells, dx());
    w.front() *= 0.5;
    w.back() *= 0.5;
    if (geometry == Geometry::Radial) {
        const double area = sphere_area(dim);
        for (int i = 0; i < n_cells; ++i) {
            w[i] *= area * std::pow(node(i), dim - 1);
        }
    }
    return w;
}

double Trajectory::mass(size_t k) const {
    const auto w = grid.volume_weights();
    double s = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) s += w[i] * snaps[k][i];
    return s;
}

double Trajectory::initial_mass() const {
    const auto w = grid.volume_weights();
    double s = 0.0;
    for (int i = 0; i < grid.n_cells; ++i) s += w[i] * initial[i];
    return s;
}

double Trajectory::value_at(size_t k, double x) const {
    const double dx = grid.dx();
    const double s = (x - grid.x_min) / dx;
    const int i = std::clamp(int(std::floor(s)), 0, grid.n_cells - 2);
    const double w = s - i;
    return (1.0 - w) * snaps[k][i] + w * snaps[k][i + 1];
}

std::vector<double> build_initial(const Grid& grid, const InitialData& init) {
    grid.validate();
    const int n = grid.n_cells;
    const double dx = grid.dx();
    switch (init.kind) {
        case InitialData::Kind::Function: {
            if (int(init.values.size()) != n) {
                throw std::invalid_argument(
                    "build_initial: values size != n_cells");
            }
            return init.values;
        }
        case InitialData::Kind::Dirac: {
            double eps = init.width == 0.0 ? 4.0 * dx : init.width;
            if (eps < 2.0 * dx) {
                throw std::invalid_argument(
                    "build_initial: mollifier narrower than 2 cells");
            }
            if (!(init.mass > 0.0)) {
                throw std::invalid_argument("build_initial: dirac mass <= 0");
            }
            std::vector<double> v(n, 0.0);
            for (int i = 0; i < n; ++i) {
                const double r = std::fabs(grid.node(i) - init.center);
                if (r < eps) {
                    const double c = std::cos(0.5 * kPi * r / eps);
                    v[i] = c * c;
                }
            }
            const auto w = grid.volume_weights();
            double m = 0.0;
            for (int i = 0; i < n; ++i) m += w[i] * v[i];
            if (m <= 0.0) {
                throw std::invalid_argument(
                    "build_initial: mollifier support misses the grid");
            }
            for (int i = 0; i < n; ++i) v[i] *= init.mass / m;
            return v;
        }
        case InitialData::Kind::Indicator:
            return indicator_values(grid, init.set_lo, init.set_hi,
                                    init.height);
        case InitialData::Kind::InfiniteOn:
            throw std::invalid_argument(
                "build_initial: infinite_on data is realized by run() ladder "
                "rungs");
    }
    throw std::logic_error("build_initial: unknown kind");
}

double stable_dt(const Grid& grid, const std::vector<double>& state, double q,
                 const SchemeConfig& scheme) {
    return Stepper(grid, q, scheme).stable_dt(state);
}

std::vector<double> step(const Grid& grid, const std::vector<double>& state,
                         double dt, double q, const SchemeConfig& scheme) {
    grid.validate();
    if (int(state.size()) != grid.n_cells) {
        throw std::invalid_argument("step: state size != n_cells");
    }
    for (double v : state) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("step: non-finite state");
        }
    }
    Stepper st(grid, q, scheme);
    if (scheme.gradient == GradientScheme::MonotoneUpwind &&
        dt > st.stable_dt(state) * (1.0 + 1e-12)) {
        throw std::invalid_argument("step: dt violates the stability bound");
    }
    std::vector<double> u = state;
    st.advance(u, dt);
    return u;
}

Trajectory run(const Grid& grid, const InitialData& init, double q,
               double t_end, const std::vector<double>& output_times,
               const SchemeConfig& scheme) {
    SchemeConfig sc = scheme;
    sc.nonneg = true;
    return run_impl(grid, init, q, t_end, output_times, sc, false);
}

Trajectory signed_run(const Grid& grid, const InitialData& init, double q,
                      double t_end, const std::vector<double>& output_times,
                      const SchemeConfig& scheme) {
    if (!(q > 0.0 && q <= 1.0)) {
        throw std::domain_error("signed_run requires 0 < q <= 1");
    }
    SchemeConfig sc = scheme;
    sc.nonneg = false;
    return run_impl(grid, init, q, t_end, output_times, sc, true);
}

std::vector<double> cole_hopf_reference(const Grid& grid,
                                        const std::vector<double>& u0,
                                        double t) {
    grid.validate();
    if (grid.geometry != Geometry::Cartesian1D) {
        throw std::invalid_argument("cole_hopf_reference: cartesian 1d only");
    }
    if (!(t > 0.0)) throw std::domain_error("cole_hopf_reference: t <= 0");
    const int n = grid.n_cells;
    const double dx = grid.dx();
    std::vector<double> v0(n);
    for (int i = 0; i < n; ++i) v0[i] = std::exp(-u0[i]);
    std::vector<double> out(n);
    const double s = 2.0 * std::sqrt(t);
    for (int i = 0; i < n; ++i) {
        const double x = grid.node(i);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d = (x - grid.node(j)) / s;
            double w = std::exp(-d * d) * dx / (s * std::sqrt(kPi));
            if (j == 0 || j == n - 1) w *= 0.5;
            acc += w * v0[j];
        }
        // constant extension beyond the grid, integrated exactly
        acc += v0[0] * 0.5 * erfc((x - grid.x_min) / s);
        acc += v0[n - 1] * 0.5 * erfc((grid.x_max - x) / s);
        out[i] = -std::log(acc);
    }
    return out;
}

std::vector<double> geometric_times(double t_min, double t_max, double ratio) {
    if (!(t_min > 0.0 && t_max > t_min && ratio > 1.0)) {
        throw std::invalid_argument("geometric_times: bad parameters");
    }
    std::vector<double> ts;
    for (double t = t_min; t < t_max * (1.0 - 1e-12); t *= ratio) {
        ts.push_back(t);
    }
    ts.push_back(t_max);
    return ts;
}

void write_trajectory(const Trajectory& traj, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json meta{
        {"q", traj.q},
        {"signed", traj.signed_mode},
        {"geometry",
         traj.grid.geometry == Geometry::Radial ? "radial" : "cartesian1d"},
        {"dim", traj.grid.dim},
        {"x_min", traj.grid.x_min},
        {"x_max", traj.grid.x_max},
        {"n_cells", traj.grid.n_cells},
        {"times", traj.times},
        {"absorbed_cum", traj.absorbed_cum},
        {"clamped_cum", traj.clamped_cum},
        {"ladder_gaps", traj.ladder_gaps},
        {"scheme",
         {{"gradient", traj.scheme.gradient == GradientScheme::Central
                           ? "central"
                           : "monotone_upwind"},
          {"diffusion",
           traj.scheme.diffusion == DiffusionScheme::CrankNicolson
               ? "crank_nicolson"
               : "backward_euler"},
          {"cfl_safety", traj.scheme.cfl_safety},
          {"dt_max", traj.scheme.dt_max},
          {"absorption", traj.scheme.absorption}}}};
    std::ofstream(dir + "/meta.json") << meta.dump(2) << "\n";
    char buf[64];
    for (size_t k = 0; k < traj.snaps.size(); ++k) {
        std::ofstream out(dir + "/snap_" + std::to_string(k) + ".csv");
        out << "x,u\n";
        for (int i = 0; i < traj.grid.n_cells; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", traj.grid.node(i),
                          traj.snaps[k][i]);
            out << buf;
        }
    }
}

}  // namespace hjlab
