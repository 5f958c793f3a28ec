#pragma once

#include <string>
#include <vector>

#include "hjlab/scaling.hpp"

namespace hjlab {

enum class Geometry { Cartesian1D, Radial };

struct Grid {
    Geometry geometry = Geometry::Cartesian1D;
    int dim = 1;  // spatial dimension N (radial only; 1 for cartesian)
    double x_min = -1.0;
    double x_max = 1.0;
    int n_cells = 3;

    double dx() const { return (x_max - x_min) / (n_cells - 1); }
    double node(int i) const { return x_min + i * dx(); }
    // Trapezoid quadrature weights, including the r^{N-1} surface factor
    // for radial geometry.
    std::vector<double> volume_weights() const;
    void validate() const;
};

struct InitialData {
    enum class Kind { Function, Dirac, Indicator, InfiniteOn };
    Kind kind = Kind::Function;
    std::vector<double> values;  // Function
    double mass = 1.0;           // Dirac
    double width = 0.0;          // Dirac mollifier width (0 -> 4*dx)
    double center = 0.0;         // Dirac
    double set_lo = 0.0;         // Indicator / InfiniteOn support
    double set_hi = 0.0;
    double height = 1.0;             // Indicator
    std::vector<double> ladder;      // InfiniteOn rung heights, increasing
};

enum class GradientScheme { MonotoneUpwind, Central };
enum class DiffusionScheme { BackwardEuler, CrankNicolson };

struct SchemeConfig {
    GradientScheme gradient = GradientScheme::MonotoneUpwind;
    DiffusionScheme diffusion = DiffusionScheme::BackwardEuler;
    double cfl_safety = 0.5;
    double dt_max = 5e-3;
    bool absorption = true;
    bool nonneg = true;  // clamp undershoot at 0 and ledger the clamped mass
};

struct Trajectory {
    Grid grid;
    double q = 0.0;
    bool signed_mode = false;
    SchemeConfig scheme;
    InitialData init_spec;
    std::vector<double> initial;              // nodal values at t=0
    std::vector<double> times;                // > 0, increasing
    std::vector<std::vector<double>> snaps;   // one nodal array per time
    std::vector<double> absorbed_cum;         // ledger at snapshot times
    std::vector<double> clamped_cum;
    std::vector<double> ladder_gaps;  // sup gap to previous rung (InfiniteOn)

    double mass(size_t snap_index) const;
    double initial_mass() const;
    // nodal value by linear interpolation in space at snapshot k
    double value_at(size_t snap_index, double x) const;
};

std::vector<double> build_initial(const Grid& grid, const InitialData& init);

// One time step: explicit monotone absorption followed by implicit diffusion.
// Throws if dt violates the recorded stability bound of the explicit part.
std::vector<double> step(const Grid& grid, const std::vector<double>& state,
                         double dt, double q, const SchemeConfig& scheme);

// Stability bound of the explicit Hamiltonian for the given state.
double stable_dt(const Grid& grid, const std::vector<double>& state, double q,
                 const SchemeConfig& scheme);

Trajectory run(const Grid& grid, const InitialData& init, double q,
               double t_end, const std::vector<double>& output_times,
               const SchemeConfig& scheme = {});

// q <= 1 only; no positivity clamp, data may be signed.
Trajectory signed_run(const Grid& grid, const InitialData& init, double q,
                      double t_end, const std::vector<double>& output_times,
                      const SchemeConfig& scheme = {});

// Exact q=2 reference: -ln of the heat evolution of exp(-u0), by heat-kernel
// quadrature with constant extension beyond the grid ends.
std::vector<double> cole_hopf_reference(const Grid& grid,
                                        const std::vector<double>& u0,
                                        double t);

// Geometric output-time ladder t_min * ratio^j capped at t_max.
std::vector<double> geometric_times(double t_min, double t_max,
                                    double ratio = 1.3);

void write_trajectory(const Trajectory& traj, const std::string& dir);

}  // namespace hjlab
