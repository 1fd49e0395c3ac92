#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "evoflow/gas.hpp"

namespace evoflow::thermo {

/// Thermodynamic state of a unit mass of ideal gas. All five quantities are
/// stored so that consistency (p V = R T, E = c_v T) can be asserted cheaply.
struct ThermoState {
    double T;  ///< temperature
    double V;  ///< specific volume
    double p;  ///< pressure
    double E;  ///< specific internal energy
    double S;  ///< thermodynamic entropy, normalized to S(T=1, V=1) = 0
};

/// Equation of state from (V, T). S = c_v ln T + R ln V.
ThermoState eos(double V, double T, const GasParams& gas);

/// Same, taking density instead of specific volume.
ThermoState eos_from_density(double rho, double T, const GasParams& gas);

/// A discretized process curve with per-step external actions. dQ is heat,
/// dW a non-compression mechanical action, dG any other energetic action.
/// All three arrays have states.size() - 1 entries.
struct ThermoPath {
    std::vector<ThermoState> states;
    Eigen::ArrayXd dQ;
    Eigen::ArrayXd dW;
    Eigen::ArrayXd dG;
    bool cyclic = false;

    int steps() const { return static_cast<int>(states.size()) - 1; }
    void validate() const;
};

/// Sum over steps of (dE + pbar dV - dQ - dG - dW) with midpoint pressure.
/// Tends to zero under refinement for physically consistent paths.
double first_law_residual(const ThermoPath& path);

/// Mixed-partial commutator of the heat form c_v dT + (RT/V) dV in (T, V)
/// coordinates. Analytically equal to R / V.
double heat_form_commutator(const GasParams& gas, double T, double V);

/// Rectangle in the (T, V) plane.
struct Rect {
    double T_lo, T_hi;
    double V_lo, V_hi;
};

/// Max |finite-difference commutator| of the heat form on an nT x nV grid
/// over `region`. With divide_by_T the form is (c_v/T) dT + (R/V) dV, whose
/// commutator vanishes; without it the commutator equals R/V pointwise.
double integrating_factor_defect(const GasParams& gas, const Rect& region,
                                 int nT, int nV, bool divide_by_T = true);

enum class Clausius {
    Reversible,
    IrreversibleConsistent,
    ViolatesSecondLaw,
};

const char* to_string(Clausius c);

struct ClausiusResult {
    double dS;           ///< entropy change from state entropies
    double heat_over_T;  ///< discretized integral of dQ/T
    Clausius verdict;
    double tol;          ///< tolerance used for the classification
};

/// Compare the entropy change against the integral of dQ/T. A negative `tol`
/// selects the default max(1e-10, 10 h^2 scale) with h the largest relative
/// step of the path.
ClausiusResult clausius(const ThermoPath& path, double tol = -1.0);

// -----------------------------------------------------------------------------
// Path builders shared by the scenario runner and the tests.
// -----------------------------------------------------------------------------

/// Reversible isothermal leg V0 -> V1 at temperature T. Heat per step is the
/// midpoint compression work, so the discrete first law closes exactly.
ThermoPath isothermal_leg(const GasParams& gas, double T, double V0, double V1,
                          int steps);

/// Reversible adiabat from (T0, V0) to volume V1 along T V^(gamma-1) = const.
ThermoPath adiabatic_leg(const GasParams& gas, double T0, double V0, double V1,
                         int steps);

/// Four-leg Carnot cycle between T_hot and T_cold starting at (T_hot, V0)
/// with isothermal expansion ratio r > 1. With friction > 0, that amount of
/// the hot-leg action is delivered as dW while dQ is reduced to match, which
/// leaves the first law intact but makes the cycle irreversible.
ThermoPath carnot_cycle(const GasParams& gas, double T_hot, double T_cold,
                        double V0, double r, int steps_per_leg,
                        double friction = 0.0);

}  // namespace evoflow::thermo
