#pragma once

#include <cmath>
#include <stdexcept>

namespace evoflow {

/// Ideal-gas parameters. c_v is derived from gamma and R but kept as a
/// member so downstream formulas read like the algebra they implement.
struct GasParams {
    double gamma = 1.4;
    double R = 1.0;
    double c_v = 2.5;

    GasParams() = default;
    GasParams(double gamma_, double R_)
        : gamma(gamma_), R(R_), c_v(R_ / (gamma_ - 1.0))
    {
        if (!(gamma > 1.0))
            throw std::domain_error("GasParams: gamma must exceed 1");
        if (!(R > 0.0))
            throw std::domain_error("GasParams: R must be positive");
    }
};

/// Primitive gas state at a point.
struct PrimState {
    double rho;
    double u;
    double p;

    bool valid() const { return rho > 0.0 && p > 0.0; }
};

inline double sound_speed(double p, double rho, const GasParams& gas)
{
    if (!(p > 0.0) || !(rho > 0.0))
        throw std::domain_error("sound_speed: p and rho must be positive");
    return std::sqrt(gas.gamma * p / rho);
}

inline double sound_speed(const PrimState& w, const GasParams& gas)
{
    return sound_speed(w.p, w.rho, gas);
}

/// Gas-dynamic entropy s = p / rho^gamma, constant along trajectories of
/// smooth ideal flow. Distinct from the thermodynamic entropy S(T, V).
inline double gasdyn_entropy(double p, double rho, const GasParams& gas)
{
    if (!(p > 0.0) || !(rho > 0.0))
        throw std::domain_error("gasdyn_entropy: p and rho must be positive");
    return p / std::pow(rho, gas.gamma);
}

inline double gasdyn_entropy(const PrimState& w, const GasParams& gas)
{
    return gasdyn_entropy(w.p, w.rho, gas);
}

}  // namespace evoflow
