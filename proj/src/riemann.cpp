#include "evoflow/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evoflow::euler1d {

namespace {

// Pressure function f_K(p) across the K-side wave and its derivative.
// Shock branch for p > p_K, rarefaction otherwise.
void wave_function(double p, const PrimState& w, const GasParams& gas,
                   double& f, double& df)
{
    const double g = gas.gamma;
    const double a = std::sqrt(g * w.p / w.rho);
    if (p > w.p) {
        const double A = 2.0 / ((g + 1.0) * w.rho);
        const double B = (g - 1.0) / (g + 1.0) * w.p;
        const double root = std::sqrt(A / (p + B));
        f = (p - w.p) * root;
        df = root * (1.0 - 0.5 * (p - w.p) / (p + B));
    } else {
        const double pr = p / w.p;
        f = 2.0 * a / (g - 1.0) * (std::pow(pr, 0.5 * (g - 1.0) / g) - 1.0);
        df = std::pow(pr, -0.5 * (g + 1.0) / g) / (w.rho * a);
    }
}

double shock_density(double pstar, const PrimState& w, const GasParams& gas)
{
    const double mu2 = (gas.gamma - 1.0) / (gas.gamma + 1.0);
    const double pr = pstar / w.p;
    return w.rho * (pr + mu2) / (mu2 * pr + 1.0);
}

double rarefaction_density(double pstar, const PrimState& w, const GasParams& gas)
{
    return w.rho * std::pow(pstar / w.p, 1.0 / gas.gamma);
}

}  // namespace

RiemannFan exact_riemann(const PrimState& left, const PrimState& right,
                         const GasParams& gas)
{
    if (!left.valid() || !right.valid())
        throw std::domain_error("exact_riemann: states must have positive rho and p");

    const double g = gas.gamma;
    const double aL = std::sqrt(g * left.p / left.rho);
    const double aR = std::sqrt(g * right.p / right.rho);
    const double du = right.u - left.u;

    // Pressure positivity condition: the two-rarefaction bound.
    if (2.0 * (aL + aR) / (g - 1.0) <= du)
        throw std::domain_error("exact_riemann: data generate vacuum");

    // PVRS guess, floored away from zero.
    double p = 0.5 * (left.p + right.p) -
               0.125 * du * (left.rho + right.rho) * (aL + aR);
    const double p_floor = 1e-14 * std::min(left.p, right.p);
    p = std::max(p, p_floor);

    double lo = p_floor;
    double hi = std::max({left.p, right.p, p}) * 2.0;
    // Expand the bracket until f(hi) >= 0; f is increasing in p.
    auto eval = [&](double q) {
        double fL, dL, fR, dR;
        wave_function(q, left, gas, fL, dL);
        wave_function(q, right, gas, fR, dR);
        return std::pair{fL + fR + du, dL + dR};
    };
    while (eval(hi).first < 0.0) hi *= 4.0;

    int it = 0;
    const int max_iter = 100;
    for (; it < max_iter; ++it) {
        auto [f, df] = eval(p);
        if (f > 0.0) hi = std::min(hi, p);
        else lo = std::max(lo, p);
        double p_new = p - f / df;
        if (!(p_new > lo) || !(p_new < hi))
            p_new = 0.5 * (lo + hi);  // bisection safeguard
        const double rel = std::abs(p_new - p) / (0.5 * (p_new + p));
        p = p_new;
        if (rel < 1e-13) break;
    }

    RiemannFan fan;
    fan.left = left;
    fan.right = right;
    fan.gas = gas;
    fan.pstar = p;
    fan.iterations = it + 1;
    double fL, dL, fR, dR;
    wave_function(p, left, gas, fL, dL);
    wave_function(p, right, gas, fR, dR);
    fan.ustar = 0.5 * (left.u + right.u) + 0.5 * (fR - fL);
    fan.left_wave = p > left.p ? WaveKind::Shock : WaveKind::Rarefaction;
    fan.right_wave = p > right.p ? WaveKind::Shock : WaveKind::Rarefaction;
    fan.rho_star_left = fan.left_wave == WaveKind::Shock
                            ? shock_density(p, left, gas)
                            : rarefaction_density(p, left, gas);
    fan.rho_star_right = fan.right_wave == WaveKind::Shock
                             ? shock_density(p, right, gas)
                             : rarefaction_density(p, right, gas);
    return fan;
}

PrimState sample(const RiemannFan& fan, double xi)
{
    const double g = fan.gas.gamma;
    const double gm = g - 1.0;
    const double gp = g + 1.0;

    if (xi <= fan.ustar) {
        const PrimState& w = fan.left;
        const double a = std::sqrt(g * w.p / w.rho);
        if (fan.left_wave == WaveKind::Shock) {
            const double S = w.u - a * std::sqrt(0.5 * gp / g * fan.pstar / w.p + 0.5 * gm / g);
            if (xi <= S) return w;
            return {fan.rho_star_left, fan.ustar, fan.pstar};
        }
        const double a_star = a * std::pow(fan.pstar / w.p, 0.5 * gm / g);
        const double head = w.u - a;
        const double tail = fan.ustar - a_star;
        if (xi <= head) return w;
        if (xi >= tail) return {fan.rho_star_left, fan.ustar, fan.pstar};
        // Inside the left rarefaction.
        const double u = 2.0 / gp * (a + 0.5 * gm * w.u + xi);
        const double c = 2.0 / gp * (a + 0.5 * gm * (w.u - xi));
        return {w.rho * std::pow(c / a, 2.0 / gm), u, w.p * std::pow(c / a, 2.0 * g / gm)};
    }

    const PrimState& w = fan.right;
    const double a = std::sqrt(g * w.p / w.rho);
    if (fan.right_wave == WaveKind::Shock) {
        const double S = w.u + a * std::sqrt(0.5 * gp / g * fan.pstar / w.p + 0.5 * gm / g);
        if (xi >= S) return w;
        return {fan.rho_star_right, fan.ustar, fan.pstar};
    }
    const double a_star = a * std::pow(fan.pstar / w.p, 0.5 * gm / g);
    const double head = w.u + a;
    const double tail = fan.ustar + a_star;
    if (xi >= head) return w;
    if (xi <= tail) return {fan.rho_star_right, fan.ustar, fan.pstar};
    const double u = 2.0 / gp * (-a + 0.5 * gm * w.u + xi);
    const double c = 2.0 / gp * (a - 0.5 * gm * (w.u - xi));
    return {w.rho * std::pow(c / a, 2.0 / gm), u, w.p * std::pow(c / a, 2.0 * g / gm)};
}

}  // namespace evoflow::euler1d
