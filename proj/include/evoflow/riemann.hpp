#pragma once

#include "evoflow/gas.hpp"

namespace evoflow::euler1d {

enum class WaveKind { Shock, Rarefaction };

/// Exact two-wave solution of the Riemann problem between two ideal-gas
/// states. Carries everything needed to sample the self-similar fan.
struct RiemannFan {
    PrimState left, right;
    GasParams gas;
    double pstar = 0.0;
    double ustar = 0.0;
    WaveKind left_wave = WaveKind::Rarefaction;
    WaveKind right_wave = WaveKind::Rarefaction;
    double rho_star_left = 0.0;
    double rho_star_right = 0.0;
    int iterations = 0;
};

/// Solves the two-wave pressure equation by safeguarded Newton iteration to
/// relative tolerance 1e-12. Throws std::domain_error on invalid states or
/// when the data would generate vacuum.
RiemannFan exact_riemann(const PrimState& left, const PrimState& right,
                         const GasParams& gas);

/// Samples the self-similar solution at speed xi = x/t.
PrimState sample(const RiemannFan& fan, double xi);

}  // namespace evoflow::euler1d
