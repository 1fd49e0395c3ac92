#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "evoflow/gas.hpp"
#include "evoflow/riemann.hpp"

namespace evoflow::euler1d {

using Eigen::ArrayXd;

enum class Boundary { Periodic, Transmissive };

/// CFL violation or positivity loss; carries the offending cell in the message.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Struct-of-arrays slice of primitive fields on cell centers.
struct PrimField {
    ArrayXd rho, u, p;

    Eigen::Index size() const { return rho.size(); }
    PrimState at(Eigen::Index i) const { return {rho[i], u[i], p[i]}; }
};

ArrayXd entropy_field(const PrimField& w, const GasParams& gas);
ArrayXd sound_speed_field(const PrimField& w, const GasParams& gas);
double max_wave_speed(const PrimField& w, const GasParams& gas);

/// One conservative Godunov step with exact-Riemann interface fluxes.
/// Requires dt * max(|u|+a) / dx <= 0.9.
PrimField step(const PrimField& w, double dt, double dx, Boundary bc,
               const GasParams& gas);

/// Flags cells adjacent to an interface with a pressure jump above jump_tol
/// (relative) and converging characteristics.
std::vector<bool> detect_shocks(const PrimField& w, const GasParams& gas,
                                double jump_tol = 0.05);

/// Particle path traced through the evolving velocity field, with the
/// gas-dynamic entropy recorded at every solver step.
struct Trajectory {
    double seed = 0.0;
    std::vector<double> t, x, s;
    bool exited = false;
    std::vector<std::pair<double, double>> shock_crossings;  ///< (t, x)
};

struct Solution1D {
    ArrayXd x;  ///< cell centers
    double dx = 0.0;
    double x_lo = 0.0, x_hi = 1.0;
    Boundary bc = Boundary::Transmissive;
    GasParams gas;
    std::vector<double> times;
    std::vector<PrimField> slices;
    std::vector<std::vector<bool>> shock_flags;
    std::vector<Trajectory> trajectories;
    double cfl = 0.0;
    long total_steps = 0;
};

struct RunConfig {
    double x_lo = 0.0, x_hi = 1.0;
    int n_cells = 400;
    double cfl = 0.8;
    Boundary bc = Boundary::Transmissive;
    GasParams gas{};
    double t_end = 0.25;
    std::vector<double> output_times;      ///< t_end is appended if absent
    std::vector<double> trajectory_seeds;  ///< particle positions at t = 0
    std::function<PrimState(double)> initial;
};

Solution1D run(const RunConfig& cfg);

/// Linear interpolation of a cell-centered field, periodic or clamped.
double sample_field(const ArrayXd& centers, const ArrayXd& f, double x,
                    Boundary bc, double x_lo, double x_hi);

struct EntropySeries {
    std::vector<double> t, s;
    bool truncated = false;
    std::vector<std::pair<double, double>> crossings;
};

/// Entropy history along the traced trajectory nearest to `seed`.
EntropySeries entropy_along_trajectory(const Solution1D& sol, double seed);

}  // namespace evoflow::euler1d
