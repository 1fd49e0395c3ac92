#include "evoflow/characteristics.hpp"

#include <cmath>

namespace evoflow::characteristics {

CharSpeeds char_speeds(const PrimState& w, const GasParams& gas)
{
    const double a = sound_speed(w, gas);
    return {w.u + a, w.u, w.u - a};
}

ConsistencyMatrix consistency_matrix(const PrimState& w, double c,
                                     const GasParams& gas)
{
    if (!w.valid())
        throw std::domain_error("consistency_matrix: invalid state");
    const double a2 = gas.gamma * w.p / w.rho;
    const double s = gasdyn_entropy(w, gas);
    const double uc = w.u - c;
    ConsistencyMatrix cm;
    cm.M << uc, w.rho, 0.0,
            a2 / w.rho, uc, w.p / (s * w.rho),
            0.0, 0.0, uc;
    cm.state = w;
    cm.c = c;
    cm.gas = gas;
    return cm;
}

double det_closed_form(const PrimState& w, double c, const GasParams& gas)
{
    const double a2 = gas.gamma * w.p / w.rho;
    const double uc = w.u - c;
    return uc * (uc * uc - a2);
}

BreakVector break_nullspace(const ConsistencyMatrix& cm, double tol)
{
    const double a = sound_speed(cm.state, cm.gas);
    const double scale = std::abs(cm.state.u) + a;
    const double det = cm.M.determinant();
    if (std::abs(det) > tol * scale * scale * scale)
        throw NoBreakSurface("break_nullspace: surface speed is not characteristic "
                             "(|det| = " + std::to_string(std::abs(det)) + ")");

    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cm.M, Eigen::ComputeFullV);
    Eigen::Vector3d v = svd.matrixV().col(2);
    v.normalize();
    // Deterministic sign: largest-magnitude component positive.
    int imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;

    BreakVector b;
    b.d_rho = v[0];
    b.d_u = v[1];
    b.d_s = v[2];
    const double g = cm.gas.gamma;
    const double s = gasdyn_entropy(cm.state, cm.gas);
    const double rho = cm.state.rho;
    b.d_a = (g * s * (g - 1.0) * std::pow(rho, g - 2.0) * b.d_rho +
             g * std::pow(rho, g - 1.0) * b.d_s) / (2.0 * a);
    return b;
}

double trajectory_break_relation(const PrimState& w, const GasParams& gas)
{
    const double a = sound_speed(w, gas);
    const double s = gasdyn_entropy(w, gas);
    return a / (2.0 * gas.gamma * s);
}

double characteristic_break_relation(const GasParams& gas, Family family)
{
    const double r = 2.0 / (gas.gamma - 1.0);
    return family == Family::Plus ? r : -r;
}

std::optional<ShockFormation> shock_formation(const Eigen::ArrayXd& x,
                                              const Eigen::ArrayXd& u0,
                                              const GasParams& gas,
                                              const PrimState& background)
{
    const Eigen::Index n = x.size();
    if (n < 8 || u0.size() != n)
        throw std::invalid_argument("shock_formation: need >= 8 matching samples");
    const double h = x[1] - x[0];
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs((x[i] - x[i - 1]) - h) > 1e-9 * h)
            throw std::invalid_argument("shock_formation: grid must be uniform");
    const double L = h * n;  // periodic sample layout

    auto wrap = [&](Eigen::Index i) { return ((i % n) + n) % n; };
    Eigen::ArrayXd d(n), d2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d[i] = (u0[wrap(i + 1)] - u0[wrap(i - 1)]) / (2.0 * h);
        d2[i] = (u0[wrap(i + 2)] - u0[wrap(i - 2)]) / (4.0 * h);
    }

    const double dmax = d.abs().maxCoeff();
    if (dmax > 0.0) {
        // Slopes estimated at h and 2h must agree for a resolved profile.
        const double mismatch = (d - d2).abs().maxCoeff();
        if (mismatch > 0.25 * dmax)
            throw std::invalid_argument(
                "shock_formation: velocity profile is not smooth on this grid");
    }

    Eigen::Index imin = 0;
    const double dmin = d.minCoeff(&imin);
    const double lambda_slope = 0.5 * (gas.gamma + 1.0) * dmin;
    if (!(lambda_slope < -1e-14 * std::max(1.0, dmax)))
        return std::nullopt;

    const double a0 = sound_speed(background, gas);
    const double t_star = -1.0 / lambda_slope;
    const double du = u0[imin] - background.u;
    const double lambda = u0[imin] + a0 + 0.5 * (gas.gamma - 1.0) * du;

    double x_star = x[imin] + lambda * t_star;
    x_star = x[0] + std::fmod(x_star - x[0], L);
    if (x_star < x[0]) x_star += L;
    return ShockFormation{t_star, x_star};
}

}  // namespace evoflow::characteristics
