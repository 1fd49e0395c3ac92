#include "evoflow/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "evoflow/forms.hpp"

namespace evoflow::thermo {

ThermoState eos(double V, double T, const GasParams& gas)
{
    if (!(V > 0.0) || !(T > 0.0))
        throw std::domain_error("eos: V and T must be positive");
    ThermoState st;
    st.T = T;
    st.V = V;
    st.p = gas.R * T / V;
    st.E = gas.c_v * T;
    st.S = gas.c_v * std::log(T) + gas.R * std::log(V);
    return st;
}

ThermoState eos_from_density(double rho, double T, const GasParams& gas)
{
    if (!(rho > 0.0))
        throw std::domain_error("eos_from_density: rho must be positive");
    return eos(1.0 / rho, T, gas);
}

void ThermoPath::validate() const
{
    if (states.size() < 2)
        throw std::invalid_argument("ThermoPath: at least 2 states required");
    const auto n = static_cast<Eigen::Index>(states.size()) - 1;
    if (dQ.size() != n || dW.size() != n || dG.size() != n)
        throw std::invalid_argument("ThermoPath: step arrays must have states-1 entries");
    for (const auto& st : states)
        if (!(st.T > 0.0) || !(st.V > 0.0) || !(st.p > 0.0))
            throw std::domain_error("ThermoPath: nonpositive state on path");
    if (cyclic) {
        const auto& a = states.front();
        const auto& b = states.back();
        const double scale = std::abs(a.T) + std::abs(a.V);
        if (std::abs(a.T - b.T) + std::abs(a.V - b.V) > 1e-9 * scale)
            throw std::invalid_argument("ThermoPath: cyclic path does not close");
    }
}

double first_law_residual(const ThermoPath& path)
{
    path.validate();
    double residual = 0.0;
    for (int i = 0; i < path.steps(); ++i) {
        const auto& a = path.states[i];
        const auto& b = path.states[i + 1];
        const double pbar = 0.5 * (a.p + b.p);
        residual += (b.E - a.E) + pbar * (b.V - a.V) - path.dQ[i] - path.dG[i] - path.dW[i];
    }
    return residual;
}

double heat_form_commutator(const GasParams& gas, double T, double V)
{
    if (!(T > 0.0) || !(V > 0.0))
        throw std::domain_error("heat_form_commutator: T and V must be positive");
    // d/dT (RT/V) - d/dV (c_v) = R/V
    return gas.R / V;
}

double integrating_factor_defect(const GasParams& gas, const Rect& region,
                                 int nT, int nV, bool divide_by_T)
{
    if (!(region.T_lo > 0.0) || !(region.V_lo > 0.0) ||
        !(region.T_hi > region.T_lo) || !(region.V_hi > region.V_lo))
        throw std::domain_error("integrating_factor_defect: region must be strictly positive");
    auto grid = forms::Grid2D::uniform(region.T_lo, region.T_hi, nT,
                                       region.V_lo, region.V_hi, nV);
    forms::OneForm2D form;
    form.A1.resize(nT, nV);
    form.A2.resize(nT, nV);
    for (int i = 0; i < nT; ++i) {
        for (int j = 0; j < nV; ++j) {
            const double T = grid.xi1[i];
            const double V = grid.xi2[j];
            if (divide_by_T) {
                form.A1(i, j) = gas.c_v / T;
                form.A2(i, j) = gas.R / V;
            } else {
                form.A1(i, j) = gas.c_v;
                form.A2(i, j) = gas.R * T / V;
            }
        }
    }
    return forms::commutator(form, grid).max_abs;
}

const char* to_string(Clausius c)
{
    switch (c) {
        case Clausius::Reversible: return "reversible";
        case Clausius::IrreversibleConsistent: return "irreversible-consistent";
        case Clausius::ViolatesSecondLaw: return "violates-second-law";
    }
    return "unknown";
}

ClausiusResult clausius(const ThermoPath& path, double tol)
{
    path.validate();

    double integral = 0.0;
    double abs_integral = 0.0;
    double h = 0.0;
    for (int i = 0; i < path.steps(); ++i) {
        const auto& a = path.states[i];
        const auto& b = path.states[i + 1];
        const double Tbar = 0.5 * (a.T + b.T);
        if (!(Tbar > 0.0))
            throw std::domain_error("clausius: nonpositive temperature on path");
        integral += path.dQ[i] / Tbar;
        abs_integral += std::abs(path.dQ[i]) / Tbar;
        const double step = std::abs(b.T - a.T) / Tbar +
                            std::abs(b.V - a.V) / (0.5 * (a.V + b.V));
        h = std::max(h, step);
    }

    const double dS = path.states.back().S - path.states.front().S;

    if (tol < 0.0) {
        const double scale = std::max({1.0, std::abs(dS), abs_integral});
        tol = std::max(1e-10, 10.0 * h * h * scale);
    }

    ClausiusResult res;
    res.dS = dS;
    res.heat_over_T = integral;
    res.tol = tol;
    if (std::abs(dS - integral) <= tol)
        res.verdict = Clausius::Reversible;
    else if (dS > integral + tol)
        res.verdict = Clausius::IrreversibleConsistent;
    else
        res.verdict = Clausius::ViolatesSecondLaw;
    return res;
}

namespace {

ThermoPath path_from_states(std::vector<ThermoState> states, bool reversible_heat)
{
    ThermoPath path;
    path.states = std::move(states);
    const int n = path.steps();
    path.dQ = Eigen::ArrayXd::Zero(n);
    path.dW = Eigen::ArrayXd::Zero(n);
    path.dG = Eigen::ArrayXd::Zero(n);
    if (reversible_heat) {
        // Heat consistent with the discrete first law: dQ = dE + pbar dV.
        for (int i = 0; i < n; ++i) {
            const auto& a = path.states[i];
            const auto& b = path.states[i + 1];
            path.dQ[i] = (b.E - a.E) + 0.5 * (a.p + b.p) * (b.V - a.V);
        }
    }
    return path;
}

}  // namespace

ThermoPath isothermal_leg(const GasParams& gas, double T, double V0, double V1,
                          int steps)
{
    if (steps < 1)
        throw std::invalid_argument("isothermal_leg: steps must be >= 1");
    std::vector<ThermoState> states;
    states.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        const double V = V0 + (V1 - V0) * static_cast<double>(i) / steps;
        states.push_back(eos(V, T, gas));
    }
    return path_from_states(std::move(states), true);
}

ThermoPath adiabatic_leg(const GasParams& gas, double T0, double V0, double V1,
                         int steps)
{
    if (steps < 1)
        throw std::invalid_argument("adiabatic_leg: steps must be >= 1");
    std::vector<ThermoState> states;
    states.reserve(steps + 1);
    const double k = T0 * std::pow(V0, gas.gamma - 1.0);
    for (int i = 0; i <= steps; ++i) {
        const double V = V0 + (V1 - V0) * static_cast<double>(i) / steps;
        const double T = k / std::pow(V, gas.gamma - 1.0);
        states.push_back(eos(V, T, gas));
    }
    // Adiabat: no external action of any kind.
    return path_from_states(std::move(states), false);
}

ThermoPath carnot_cycle(const GasParams& gas, double T_hot, double T_cold,
                        double V0, double r, int steps_per_leg, double friction)
{
    if (!(T_hot > T_cold) || !(T_cold > 0.0))
        throw std::domain_error("carnot_cycle: need T_hot > T_cold > 0");
    if (!(r > 1.0))
        throw std::domain_error("carnot_cycle: expansion ratio must exceed 1");

    // kappa maps a volume on the hot adiabat endpoint to the cold one.
    const double kappa = std::pow(T_hot / T_cold, 1.0 / (gas.gamma - 1.0));
    const double V1 = V0 * r;
    const double V2 = V1 * kappa;
    const double V3 = V0 * kappa;

    ThermoPath legs[4] = {
        isothermal_leg(gas, T_hot, V0, V1, steps_per_leg),
        adiabatic_leg(gas, T_hot, V1, V2, steps_per_leg),
        isothermal_leg(gas, T_cold, V2, V3, steps_per_leg),
        adiabatic_leg(gas, T_cold, V3, V0, steps_per_leg),
    };

    if (friction > 0.0) {
        // Divert `friction` of the hot-leg heat into mechanical action.
        const double per_step = friction / steps_per_leg;
        legs[0].dQ -= per_step;
        legs[0].dW += per_step;
    }

    ThermoPath cycle;
    cycle.cyclic = true;
    const int n_total = 4 * steps_per_leg;
    cycle.dQ = Eigen::ArrayXd::Zero(n_total);
    cycle.dW = Eigen::ArrayXd::Zero(n_total);
    cycle.dG = Eigen::ArrayXd::Zero(n_total);
    cycle.states.reserve(n_total + 1);
    int offset = 0;
    for (int leg = 0; leg < 4; ++leg) {
        const auto& l = legs[leg];
        const int first = (leg == 0) ? 0 : 1;  // skip duplicated junction state
        for (size_t i = first; i < l.states.size(); ++i)
            cycle.states.push_back(l.states[i]);
        cycle.dQ.segment(offset, steps_per_leg) = l.dQ;
        cycle.dW.segment(offset, steps_per_leg) = l.dW;
        cycle.dG.segment(offset, steps_per_leg) = l.dG;
        offset += steps_per_leg;
    }
    cycle.validate();
    return cycle;
}

}  // namespace evoflow::thermo
