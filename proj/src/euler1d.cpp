#include "evoflow/euler1d.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evoflow::euler1d {

namespace {

struct Cons {
    ArrayXd rho, mom, E;
};

Cons to_cons(const PrimField& w, const GasParams& gas)
{
    Cons c;
    c.rho = w.rho;
    c.mom = w.rho * w.u;
    c.E = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * w.u.square();
    return c;
}

void flux_of(const PrimState& w, const GasParams& gas, double f[3])
{
    const double E = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * w.u * w.u;
    f[0] = w.rho * w.u;
    f[1] = w.rho * w.u * w.u + w.p;
    f[2] = w.u * (E + w.p);
}

}  // namespace

ArrayXd entropy_field(const PrimField& w, const GasParams& gas)
{
    return w.p / w.rho.pow(gas.gamma);
}

ArrayXd sound_speed_field(const PrimField& w, const GasParams& gas)
{
    return (gas.gamma * w.p / w.rho).sqrt();
}

double max_wave_speed(const PrimField& w, const GasParams& gas)
{
    return (w.u.abs() + sound_speed_field(w, gas)).maxCoeff();
}

PrimField step(const PrimField& w, double dt, double dx, Boundary bc,
               const GasParams& gas)
{
    const Eigen::Index n = w.size();
    if (n < 2)
        throw std::invalid_argument("step: need at least 2 cells");
    const double smax = max_wave_speed(w, gas);
    if (dt * smax / dx > 0.9 * (1.0 + 1e-12))
        throw SolverError("step: CFL violation, dt*smax/dx = " +
                          std::to_string(dt * smax / dx));

    // Interface fluxes, n+1 of them.
    Eigen::ArrayXXd F(3, n + 1);
    auto interface_flux = [&](const PrimState& l, const PrimState& r, Eigen::Index k) {
        double f[3];
        if (l.rho == r.rho && l.u == r.u && l.p == r.p) {
            flux_of(l, gas, f);
        } else {
            try {
                const auto fan = exact_riemann(l, r, gas);
                const PrimState s = sample(fan, 0.0);
                flux_of(s, gas, f);
            } catch (const std::domain_error& e) {
                // Vacuum generation mid-run is a numerical failure.
                throw SolverError("step: interface " + std::to_string(k) + ": " + e.what());
            }
        }
        F(0, k) = f[0];
        F(1, k) = f[1];
        F(2, k) = f[2];
    };

    for (Eigen::Index i = 1; i < n; ++i)
        interface_flux(w.at(i - 1), w.at(i), i);
    if (bc == Boundary::Periodic) {
        interface_flux(w.at(n - 1), w.at(0), 0);
        F.col(n) = F.col(0);
    } else {
        interface_flux(w.at(0), w.at(0), 0);
        interface_flux(w.at(n - 1), w.at(n - 1), n);
    }

    Cons c = to_cons(w, gas);
    const double r = dt / dx;
    for (Eigen::Index i = 0; i < n; ++i) {
        c.rho[i] -= r * (F(0, i + 1) - F(0, i));
        c.mom[i] -= r * (F(1, i + 1) - F(1, i));
        c.E[i] -= r * (F(2, i + 1) - F(2, i));
    }

    PrimField out;
    out.rho = c.rho;
    out.u = c.mom / c.rho;
    out.p = (gas.gamma - 1.0) * (c.E - 0.5 * c.mom.square() / c.rho);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(out.rho[i] > 0.0) || !(out.p[i] > 0.0))
            throw SolverError("step: positivity lost in cell " + std::to_string(i));
    }
    return out;
}

std::vector<bool> detect_shocks(const PrimField& w, const GasParams& gas,
                                double jump_tol)
{
    // A captured shock is smeared over a few cells by the first-order
    // scheme, so the jump is measured over bases of 1 to 3 cells.
    const Eigen::Index n = w.size();
    std::vector<bool> flags(n, false);
    const ArrayXd a = sound_speed_field(w, gas);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        for (Eigen::Index b = 1; b <= 3 && i + b < n; ++b) {
            const Eigen::Index j = i + b;
            const double jump = std::abs(w.p[j] - w.p[i]) / std::min(w.p[i], w.p[j]);
            if (jump <= jump_tol) continue;
            const bool plus_converging = w.u[i] + a[i] > w.u[j] + a[j];
            const bool minus_converging = w.u[i] - a[i] > w.u[j] - a[j];
            if (plus_converging || minus_converging) {
                for (Eigen::Index k = i; k <= j; ++k) flags[k] = true;
                break;
            }
        }
    }
    return flags;
}

double sample_field(const ArrayXd& centers, const ArrayXd& f, double x,
                    Boundary bc, double x_lo, double x_hi)
{
    const Eigen::Index n = centers.size();
    if (bc == Boundary::Periodic) {
        const double L = x_hi - x_lo;
        double xi = std::fmod(x - x_lo, L);
        if (xi < 0.0) xi += L;
        xi += x_lo;
        // Between the last and first centers the field wraps around.
        if (xi < centers[0] || xi >= centers[n - 1]) {
            const double gap = (centers[0] - x_lo) + (x_hi - centers[n - 1]);
            const double d = xi < centers[0] ? (xi - x_lo) + (x_hi - centers[n - 1])
                                             : xi - centers[n - 1];
            const double t = d / gap;
            return (1.0 - t) * f[n - 1] + t * f[0];
        }
        const auto it = std::upper_bound(centers.data(), centers.data() + n, xi);
        const Eigen::Index k = std::max<Eigen::Index>(1, it - centers.data()) - 1;
        const double t = (xi - centers[k]) / (centers[k + 1] - centers[k]);
        return (1.0 - t) * f[k] + t * f[k + 1];
    }
    if (x <= centers[0]) return f[0];
    if (x >= centers[n - 1]) return f[n - 1];
    const auto it = std::upper_bound(centers.data(), centers.data() + n, x);
    const Eigen::Index k = (it - centers.data()) - 1;
    const double t = (x - centers[k]) / (centers[k + 1] - centers[k]);
    return (1.0 - t) * f[k] + t * f[k + 1];
}

Solution1D run(const RunConfig& cfg)
{
    if (cfg.n_cells < 2)
        throw std::invalid_argument("run: n_cells must be >= 2");
    if (!(cfg.cfl > 0.0) || cfg.cfl > 0.9)
        throw std::invalid_argument("run: cfl must lie in (0, 0.9]");
    if (!(cfg.t_end > 0.0))
        throw std::invalid_argument("run: t_end must be positive");
    if (!cfg.initial)
        throw std::invalid_argument("run: initial condition not set");

    Solution1D sol;
    sol.x_lo = cfg.x_lo;
    sol.x_hi = cfg.x_hi;
    sol.dx = (cfg.x_hi - cfg.x_lo) / cfg.n_cells;
    sol.x = ArrayXd::LinSpaced(cfg.n_cells, cfg.x_lo + 0.5 * sol.dx,
                               cfg.x_hi - 0.5 * sol.dx);
    sol.bc = cfg.bc;
    sol.gas = cfg.gas;
    sol.cfl = cfg.cfl;

    PrimField w;
    w.rho.resize(cfg.n_cells);
    w.u.resize(cfg.n_cells);
    w.p.resize(cfg.n_cells);
    for (Eigen::Index i = 0; i < cfg.n_cells; ++i) {
        const PrimState st = cfg.initial(sol.x[i]);
        if (!st.valid())
            throw std::invalid_argument("run: initial state invalid at cell " + std::to_string(i));
        w.rho[i] = st.rho;
        w.u[i] = st.u;
        w.p[i] = st.p;
    }

    std::set<double> targets(cfg.output_times.begin(), cfg.output_times.end());
    targets.insert(cfg.t_end);
    for (double t : targets)
        if (t < 0.0 || t > cfg.t_end * (1.0 + 1e-12))
            throw std::invalid_argument("run: output time outside [0, t_end]");

    for (double seed : cfg.trajectory_seeds) {
        Trajectory tr;
        tr.seed = seed;
        tr.t.push_back(0.0);
        tr.x.push_back(seed);
        tr.s.push_back(sample_field(sol.x, entropy_field(w, cfg.gas), seed,
                                    cfg.bc, cfg.x_lo, cfg.x_hi));
        sol.trajectories.push_back(std::move(tr));
    }

    auto record = [&](double t, const PrimField& slice) {
        sol.times.push_back(t);
        sol.slices.push_back(slice);
        sol.shock_flags.push_back(detect_shocks(slice, cfg.gas));
    };

    double t = 0.0;
    auto next_target = targets.begin();
    if (*next_target == 0.0) {
        record(0.0, w);
        ++next_target;
    }

    std::vector<bool> in_shock(sol.trajectories.size(), false);

    while (next_target != targets.end()) {
        const double target = *next_target;
        const double smax = max_wave_speed(w, cfg.gas);
        double dt = cfg.cfl * sol.dx / smax;
        bool hits_target = false;
        if (t + dt >= target - 1e-14 * std::max(1.0, target)) {
            dt = target - t;
            hits_target = true;
        }

        const PrimField w_new = step(w, dt, sol.dx, cfg.bc, cfg.gas);
        const double t_new = hits_target ? target : t + dt;

        // Midpoint trajectory update using both time levels.
        const ArrayXd s_new = entropy_field(w_new, cfg.gas);
        const std::vector<bool> flags_new = detect_shocks(w_new, cfg.gas);
        for (size_t k = 0; k < sol.trajectories.size(); ++k) {
            Trajectory& tr = sol.trajectories[k];
            if (tr.exited) continue;
            const double x0 = tr.x.back();
            const double u0 = sample_field(sol.x, w.u, x0, cfg.bc, cfg.x_lo, cfg.x_hi);
            const double xm = x0 + 0.5 * dt * u0;
            const double um = 0.5 * (sample_field(sol.x, w.u, xm, cfg.bc, cfg.x_lo, cfg.x_hi) +
                                     sample_field(sol.x, w_new.u, xm, cfg.bc, cfg.x_lo, cfg.x_hi));
            double x1 = x0 + dt * um;
            if (cfg.bc == Boundary::Periodic) {
                const double L = cfg.x_hi - cfg.x_lo;
                x1 = cfg.x_lo + std::fmod(x1 - cfg.x_lo, L);
                if (x1 < cfg.x_lo) x1 += L;
            } else if (x1 < cfg.x_lo || x1 > cfg.x_hi) {
                tr.exited = true;
                continue;
            }
            tr.t.push_back(t_new);
            tr.x.push_back(x1);
            tr.s.push_back(sample_field(sol.x, s_new, x1, cfg.bc, cfg.x_lo, cfg.x_hi));

            // Report a crossing when the particle enters a flagged cell.
            const auto cell = static_cast<Eigen::Index>(
                std::clamp((x1 - cfg.x_lo) / sol.dx, 0.0, double(cfg.n_cells - 1)));
            const bool now_in = flags_new[cell];
            if (now_in && !in_shock[k])
                tr.shock_crossings.emplace_back(t_new, x1);
            in_shock[k] = now_in;
        }

        w = w_new;
        t = t_new;
        ++sol.total_steps;

        if (hits_target) {
            record(t, w);
            ++next_target;
        }
    }
    return sol;
}

EntropySeries entropy_along_trajectory(const Solution1D& sol, double seed)
{
    if (sol.trajectories.empty())
        throw std::invalid_argument("entropy_along_trajectory: no trajectories traced");
    const Trajectory* best = &sol.trajectories.front();
    for (const auto& tr : sol.trajectories)
        if (std::abs(tr.seed - seed) < std::abs(best->seed - seed)) best = &tr;
    EntropySeries series;
    series.t = best->t;
    series.s = best->s;
    series.truncated = best->exited;
    series.crossings = best->shock_crossings;
    return series;
}

}  // namespace evoflow::euler1d
