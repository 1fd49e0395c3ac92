#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "evoflow/euler1d.hpp"
#include "evoflow/forms.hpp"

namespace evoflow::diagnostics {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

/// Primitive fields on a time-by-space grid (rows = times, cols = cells),
/// with optional external-action fields. Inputs either come from a solver
/// run or are sampled analytically.
struct FlowFields {
    ArrayXd t;
    ArrayXd x;
    ArrayXXd rho, u, p;
    std::optional<ArrayXXd> F;      ///< body force per unit mass
    std::optional<ArrayXXd> q;      ///< heat flux
    std::optional<ArrayXXd> tau;    ///< viscous stress (scalar in 1D)
    std::optional<ArrayXXd> swirl;  ///< quasi-1D U x rot U column
    GasParams gas;
    euler1d::Boundary bc = euler1d::Boundary::Transmissive;
    double x_lo = 0.0, x_hi = 1.0;

    Eigen::Index nt() const { return t.size(); }
    Eigen::Index nx() const { return x.size(); }
    void validate() const;

    static FlowFields from_solution(const euler1d::Solution1D& sol);
};

ArrayXXd temperature(const FlowFields& f);     // T = p / (rho R)
ArrayXXd total_enthalpy(const FlowFields& f);  // h0 = u^2/2 + gamma/(gamma-1) p/rho

/// Entropy-action coefficient along the trajectory for viscous heat-conducting
/// gas: A1 = (1/rho) d/dx(-q/T) - (q/(rho T)) dT/dx + (tau/rho) du/dx.
/// Missing q or tau contribute zero and are flagged.
struct A1Field {
    ArrayXXd A1;
    bool q_missing = true;
    bool tau_missing = true;
};
A1Field a1_viscous(const FlowFields& f);

/// The terms of the normal-direction balance, kept separate so instability
/// sources can be attributed. a_nu reassembles them as
/// (h0_gradient + convective - nonpotential + nonstationary) / T.
struct SourceBreakdown {
    ArrayXXd nonstationary;  ///< du/dt
    ArrayXXd nonpotential;   ///< F
    ArrayXXd convective;     ///< swirl column
    ArrayXXd h0_gradient;    ///< dh0/dx
    ArrayXXd viscous;        ///< (tau/rho) du/dx
    ArrayXXd heat;           ///< heat-flux part of A1
};
SourceBreakdown source_breakdown(const FlowFields& f);

ArrayXXd a_nu(const FlowFields& f);

/// Accompanying frame: xi1 is an along-parameter resampled from the traced
/// trajectories (mean arc length), xi2 labels trajectories by seed position.
/// Positions are kept unwrapped on periodic domains so rows stay monotone.
struct Frame {
    ArrayXd sigma;  ///< xi1 axis
    ArrayXd time;   ///< physical time of each row
    ArrayXd seeds;  ///< xi2 axis
    ArrayXXd xpos;  ///< (nt, n_seeds) trajectory positions
};

Frame build_frame(const FlowFields& f, int n_seeds);
Frame frame_from_solution(const euler1d::Solution1D& sol);

/// omega = A1 dxi1 + Anu dxi2 pulled back onto the frame grid; the physical
/// coefficients are retained for reporting.
struct EvolutionaryForm {
    forms::Grid2D grid;
    forms::OneForm2D omega;
    ArrayXXd A1_phys;
    ArrayXXd Anu_phys;
    Frame frame;
};

EvolutionaryForm build_evolutionary_form(const FlowFields& f, const Frame& frame);

forms::CommutatorField evolutionary_commutator(const EvolutionaryForm& form);

/// |K| resampled from the frame back onto the (t, x) grid of the fields.
ArrayXXd commutator_on_grid(const EvolutionaryForm& form, const FlowFields& f);

/// Roundoff floor of the finite-difference pipeline: the measured result of
/// running the same machinery on a uniform flow of the same shape and
/// magnitudes, combined with the cancellation bound of the stencils.
struct NoiseFloors {
    double K = 0.0;
    double A1 = 0.0;
    double accel = 0.0;
};
NoiseFloors noise_floor(const FlowFields& f, int n_seeds);

struct LagrangeOptions {
    std::optional<ArrayXd> force_potential;  ///< Phi on f.x
    bool excluded_subdomains = false;        ///< stand-in for multiple connectedness
    double rel_tol = 1e-8;
};

/// Eddy-free stable-flow condition: stationary flow, potential forces,
/// simply connected domain.
bool lagrange_check(const FlowFields& f, const LagrangeOptions& opt = {});

enum class InstabilityClass { Stable, ShockType, ConvectiveVortex, TurbulentPulsation };
const char* to_string(InstabilityClass c);

/// Decision table over the commutator sources. All classifications are
/// invariant under a common positive rescaling of the fields and floors.
InstabilityClass classify(const SourceBreakdown& src, const ArrayXXd& A1,
                          const NoiseFloors& floors);

/// A local domain shedding a structure: the windowed commutator collapses
/// while a captured discontinuity sits at the window boundary.
struct TransitionEvent {
    double t = 0.0;
    double x = 0.0;
    int window = 0;  ///< first cell index of the window
    double K_before = 0.0;
    double K_after = 0.0;
};

std::vector<TransitionEvent> transition_detector(const euler1d::Solution1D& sol,
                                                 int window_cells);

}  // namespace evoflow::diagnostics
