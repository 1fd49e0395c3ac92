#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "evoflow/gas.hpp"

namespace evoflow::characteristics {

struct CharSpeeds {
    double c_plus;   ///< u + a
    double c_zero;   ///< u (trajectory / contact family)
    double c_minus;  ///< u - a
};

CharSpeeds char_speeds(const PrimState& w, const GasParams& gas);

/// Homogeneous system for the jumps of the spatial normal derivatives
/// ([d rho], [d u], [d s]) across a surface moving at speed c, obtained by
/// substituting the Hadamard relations [df/dt] = -c [df/dx] into the
/// primitive-variable system with closure p = s rho^gamma. The state and
/// surface speed are carried along so nullspace vectors can be completed
/// with the sound-speed jump.
struct ConsistencyMatrix {
    Eigen::Matrix3d M;
    PrimState state;
    double c = 0.0;
    GasParams gas;
};

ConsistencyMatrix consistency_matrix(const PrimState& w, double c,
                                     const GasParams& gas);

/// (u - c) ((u - c)^2 - a^2): closed form of det M, used for cross-checks.
double det_closed_form(const PrimState& w, double c, const GasParams& gas);

/// Jumps of the spatial normal derivatives across a break surface. d_a is
/// derived from d_rho and d_s through 2 a d_a = gamma s (gamma-1) rho^(gamma-2) d_rho
/// + gamma rho^(gamma-1) d_s.
struct BreakVector {
    double d_rho, d_u, d_s, d_a;
};

/// Thrown when the surface speed is not characteristic, i.e. the consistency
/// determinant is bounded away from zero and only the trivial break exists.
class NoBreakSurface : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unit-normalized nullspace of the consistency matrix. The determinant must
/// satisfy |det| <= tol * (|u| + a)^3.
BreakVector break_nullspace(const ConsistencyMatrix& cm, double tol = 1e-9);

/// Break ratio [d a]/[d s] = a / (2 gamma s) across the trajectory family.
double trajectory_break_relation(const PrimState& w, const GasParams& gas);

enum class Family { Plus, Minus };

/// Break ratio [d u]/[d a] = +-2/(gamma - 1) across the sound families.
double characteristic_break_relation(const GasParams& gas, Family family);

struct ShockFormation {
    double t_star;  ///< earliest characteristic-crossing time
    double x_star;  ///< crossing location (wrapped into the domain)
};

/// Earliest crossing of C+ characteristics for a right-running simple wave
/// on a periodic profile u0(x). Returns nullopt for non-compressive data.
/// The background state supplies the reference sound speed and velocity.
std::optional<ShockFormation> shock_formation(const Eigen::ArrayXd& x,
                                              const Eigen::ArrayXd& u0,
                                              const GasParams& gas,
                                              const PrimState& background);

}  // namespace evoflow::characteristics
