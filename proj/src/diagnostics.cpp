#include "evoflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evoflow::diagnostics {

namespace {

constexpr double kEpsC = 64.0 * std::numeric_limits<double>::epsilon();

double min_spacing(const ArrayXd& x)
{
    double h = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 1; i < x.size(); ++i) h = std::min(h, x[i] - x[i - 1]);
    return h;
}

// Linear interpolation over a strictly increasing abscissa, clamped outside.
double interp(const double* xs, const double* ys, Eigen::Index n, double x)
{
    if (x <= xs[0]) return ys[0];
    if (x >= xs[n - 1]) return ys[n - 1];
    const auto it = std::upper_bound(xs, xs + n, x);
    const Eigen::Index k = (it - xs) - 1;
    const double w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    return (1.0 - w) * ys[k] + w * ys[k + 1];
}

}  // namespace

void FlowFields::validate() const
{
    if (nt() < 3 || nx() < 3)
        throw std::invalid_argument("FlowFields: need at least 3 times and 3 cells");
    auto shape_ok = [&](const ArrayXXd& a) {
        return a.rows() == nt() && a.cols() == nx();
    };
    if (!shape_ok(rho) || !shape_ok(u) || !shape_ok(p))
        throw std::invalid_argument("FlowFields: field shapes do not match axes");
    for (const auto* opt : {&F, &q, &tau, &swirl})
        if (opt->has_value() && !shape_ok(**opt))
            throw std::invalid_argument("FlowFields: optional field shape mismatch");
    if ((rho <= 0.0).any() || (p <= 0.0).any())
        throw std::domain_error("FlowFields: rho and p must be positive");
}

FlowFields FlowFields::from_solution(const euler1d::Solution1D& sol)
{
    FlowFields f;
    const auto nt = static_cast<Eigen::Index>(sol.times.size());
    f.t = Eigen::Map<const ArrayXd>(sol.times.data(), nt);
    f.x = sol.x;
    f.rho.resize(nt, sol.x.size());
    f.u.resize(nt, sol.x.size());
    f.p.resize(nt, sol.x.size());
    for (Eigen::Index m = 0; m < nt; ++m) {
        f.rho.row(m) = sol.slices[m].rho.transpose();
        f.u.row(m) = sol.slices[m].u.transpose();
        f.p.row(m) = sol.slices[m].p.transpose();
    }
    f.gas = sol.gas;
    f.bc = sol.bc;
    f.x_lo = sol.x_lo;
    f.x_hi = sol.x_hi;
    return f;
}

ArrayXXd temperature(const FlowFields& f)
{
    return f.p / (f.rho * f.gas.R);
}

ArrayXXd total_enthalpy(const FlowFields& f)
{
    return 0.5 * f.u.square() + f.gas.gamma / (f.gas.gamma - 1.0) * f.p / f.rho;
}

A1Field a1_viscous(const FlowFields& f)
{
    f.validate();
    A1Field out;
    out.q_missing = !f.q.has_value();
    out.tau_missing = !f.tau.has_value();
    out.A1 = ArrayXXd::Zero(f.nt(), f.nx());

    const ArrayXXd T = temperature(f);
    if (f.q) {
        const ArrayXXd& q = *f.q;
        const ArrayXXd div_term = forms::d_axis2(-q / T, f.x) / f.rho;
        const ArrayXXd grad_term = -(q / (f.rho * T)) * forms::d_axis2(T, f.x);
        out.A1 += div_term + grad_term;
    }
    if (f.tau)
        out.A1 += (*f.tau / f.rho) * forms::d_axis2(f.u, f.x);
    return out;
}

SourceBreakdown source_breakdown(const FlowFields& f)
{
    f.validate();
    SourceBreakdown src;
    src.nonstationary = forms::d_axis1(f.u, f.t);
    src.nonpotential = f.F ? *f.F : ArrayXXd::Zero(f.nt(), f.nx());
    src.convective = f.swirl ? *f.swirl : ArrayXXd::Zero(f.nt(), f.nx());
    src.h0_gradient = forms::d_axis2(total_enthalpy(f), f.x);
    src.viscous = f.tau ? ArrayXXd((*f.tau / f.rho) * forms::d_axis2(f.u, f.x))
                        : ArrayXXd::Zero(f.nt(), f.nx());
    if (f.q) {
        const ArrayXXd T = temperature(f);
        src.heat = forms::d_axis2(ArrayXXd(-*f.q / T), f.x) / f.rho -
                   (*f.q / (f.rho * T)) * forms::d_axis2(T, f.x);
    } else {
        src.heat = ArrayXXd::Zero(f.nt(), f.nx());
    }
    return src;
}

ArrayXXd a_nu(const FlowFields& f)
{
    const SourceBreakdown src = source_breakdown(f);
    return (src.h0_gradient + src.convective - src.nonpotential + src.nonstationary) /
           temperature(f);
}

namespace {

// Keeps each row strictly increasing so the frame stays a chart.
void enforce_monotone_row(ArrayXXd& xpos, Eigen::Index row, double gap)
{
    for (Eigen::Index k = 1; k < xpos.cols(); ++k)
        if (xpos(row, k) <= xpos(row, k - 1) + gap)
            xpos(row, k) = xpos(row, k - 1) + gap;
}

ArrayXd arc_parameter(const ArrayXd& time, const ArrayXXd& xpos)
{
    ArrayXd sigma(time.size());
    sigma[0] = 0.0;
    for (Eigen::Index m = 1; m < time.size(); ++m) {
        const double dt = time[m] - time[m - 1];
        double mean = 0.0;
        for (Eigen::Index k = 0; k < xpos.cols(); ++k)
            mean += std::hypot(dt, xpos(m, k) - xpos(m - 1, k));
        sigma[m] = sigma[m - 1] + mean / xpos.cols();
    }
    return sigma;
}

}  // namespace

Frame build_frame(const FlowFields& f, int n_seeds)
{
    f.validate();
    if (n_seeds < 3)
        throw std::invalid_argument("build_frame: need at least 3 seeds");

    Frame fr;
    fr.time = f.t;
    const double L = f.x_hi - f.x_lo;
    const double h = L / n_seeds;
    fr.seeds = ArrayXd::LinSpaced(n_seeds, f.x_lo + 0.5 * h, f.x_hi - 0.5 * h);
    fr.xpos.resize(f.nt(), n_seeds);
    fr.xpos.row(0) = fr.seeds.transpose();

    auto velocity = [&](Eigen::Index row, double x) {
        // sample_field wraps periodic positions itself.
        const ArrayXd row_u = f.u.row(row).transpose();
        return euler1d::sample_field(f.x, row_u, x, f.bc, f.x_lo, f.x_hi);
    };

    const double gap = 1e-12 * L;
    for (Eigen::Index m = 0; m + 1 < f.nt(); ++m) {
        const double dt = f.t[m + 1] - f.t[m];
        for (Eigen::Index k = 0; k < n_seeds; ++k) {
            const double x0 = fr.xpos(m, k);
            const double u0 = velocity(m, x0);
            const double xm = x0 + 0.5 * dt * u0;
            const double um = 0.5 * (velocity(m, xm) + velocity(m + 1, xm));
            double x1 = x0 + dt * um;
            if (f.bc == euler1d::Boundary::Transmissive)
                x1 = std::clamp(x1, f.x_lo, f.x_hi);
            fr.xpos(m + 1, k) = x1;
        }
        enforce_monotone_row(fr.xpos, m + 1, gap);
    }
    fr.sigma = arc_parameter(fr.time, fr.xpos);
    return fr;
}

Frame frame_from_solution(const euler1d::Solution1D& sol)
{
    const auto n_seeds = static_cast<Eigen::Index>(sol.trajectories.size());
    if (n_seeds < 3)
        throw std::invalid_argument("frame_from_solution: need at least 3 trajectories");
    const auto nt = static_cast<Eigen::Index>(sol.times.size());
    if (nt < 3)
        throw std::invalid_argument("frame_from_solution: need at least 3 output times");

    Frame fr;
    fr.time = Eigen::Map<const ArrayXd>(sol.times.data(), nt);
    fr.seeds.resize(n_seeds);
    fr.xpos.resize(nt, n_seeds);
    const double L = sol.x_hi - sol.x_lo;

    for (Eigen::Index k = 0; k < n_seeds; ++k) {
        const auto& tr = sol.trajectories[k];
        fr.seeds[k] = tr.seed;
        // Unwrap periodic jumps so each path is continuous.
        std::vector<double> xs(tr.x.size());
        double offset = 0.0;
        for (size_t i = 0; i < tr.x.size(); ++i) {
            if (i > 0) {
                const double raw = tr.x[i] - tr.x[i - 1];
                if (sol.bc == euler1d::Boundary::Periodic) {
                    if (raw > 0.5 * L) offset -= L;
                    else if (raw < -0.5 * L) offset += L;
                }
            }
            xs[i] = tr.x[i] + offset;
        }
        for (Eigen::Index m = 0; m < nt; ++m)
            fr.xpos(m, k) = interp(tr.t.data(), xs.data(),
                                   static_cast<Eigen::Index>(tr.t.size()), fr.time[m]);
    }
    for (Eigen::Index i = 1; i < n_seeds; ++i)
        if (!(fr.seeds[i] > fr.seeds[i - 1]))
            throw std::invalid_argument("frame_from_solution: seeds must be increasing");
    const double gap = 1e-12 * L;
    for (Eigen::Index m = 0; m < nt; ++m) enforce_monotone_row(fr.xpos, m, gap);
    fr.sigma = arc_parameter(fr.time, fr.xpos);
    return fr;
}

EvolutionaryForm build_evolutionary_form(const FlowFields& f, const Frame& frame)
{
    f.validate();
    if (frame.time.size() != f.nt())
        throw std::invalid_argument("build_evolutionary_form: frame rows do not match fields");

    const ArrayXXd a1_xt = a1_viscous(f).A1;
    const ArrayXXd anu_xt = a_nu(f);
    const Eigen::Index nt = f.nt();
    const Eigen::Index ns = frame.seeds.size();
    const double L = f.x_hi - f.x_lo;

    ArrayXXd A1_phys(nt, ns), Anu_phys(nt, ns);
    for (Eigen::Index m = 0; m < nt; ++m) {
        const ArrayXd row_a1 = a1_xt.row(m).transpose();
        const ArrayXd row_anu = anu_xt.row(m).transpose();
        for (Eigen::Index k = 0; k < ns; ++k) {
            double x = frame.xpos(m, k);
            if (f.bc == euler1d::Boundary::Periodic) {
                x = std::fmod(x - f.x_lo, L);
                if (x < 0.0) x += L;
                x += f.x_lo;
            }
            A1_phys(m, k) = euler1d::sample_field(f.x, row_a1, x, f.bc, f.x_lo, f.x_hi);
            Anu_phys(m, k) = euler1d::sample_field(f.x, row_anu, x, f.bc, f.x_lo, f.x_hi);
        }
    }

    // Pull back: A1 is a rate along the trajectory (per unit time), A_nu a
    // derivative in x at fixed time; the chain rule maps both into the
    // (xi1, xi2) chart.
    const ArrayXd dt_dsigma = forms::d_line(frame.time, frame.sigma);
    ArrayXXd dx_dseed(nt, ns);
    for (Eigen::Index m = 0; m < nt; ++m) {
        const ArrayXd row = frame.xpos.row(m).transpose();
        dx_dseed.row(m) = forms::d_line(row, frame.seeds).transpose();
    }

    forms::OneForm2D omega;
    omega.A1 = A1_phys.colwise() * dt_dsigma;
    omega.A2 = Anu_phys * dx_dseed;

    return EvolutionaryForm{forms::Grid2D(frame.sigma, frame.seeds),
                            std::move(omega), std::move(A1_phys),
                            std::move(Anu_phys), frame};
}

forms::CommutatorField evolutionary_commutator(const EvolutionaryForm& form)
{
    return forms::commutator(form.omega, form.grid);
}

ArrayXXd commutator_on_grid(const EvolutionaryForm& form, const FlowFields& f)
{
    const forms::CommutatorField cf = evolutionary_commutator(form);
    const Eigen::Index nt = f.nt(), nx = f.nx(), ns = form.frame.seeds.size();
    const double L = f.x_hi - f.x_lo;
    ArrayXXd out(nt, nx);
    std::vector<double> pos(ns), val(ns);
    for (Eigen::Index m = 0; m < nt; ++m) {
        for (Eigen::Index k = 0; k < ns; ++k) {
            pos[k] = form.frame.xpos(m, k);
            val[k] = cf.K(m, k);
        }
        for (Eigen::Index j = 0; j < nx; ++j) {
            double x = f.x[j];
            if (f.bc == euler1d::Boundary::Periodic) {
                // Unwrapped trajectory rows drift; shift x by whole periods
                // onto the row's span (clamped if it lands in the seed gap).
                const double shift = std::ceil((pos.front() - x) / L - 1e-12);
                x += shift * L;
            }
            out(m, j) = interp(pos.data(), val.data(), ns, x);
        }
    }
    return out;
}

NoiseFloors noise_floor(const FlowFields& f, int n_seeds)
{
    f.validate();

    // Uniform calibration fields of the same shape and magnitudes.
    FlowFields g;
    g.t = f.t;
    g.x = f.x;
    g.gas = f.gas;
    g.bc = f.bc;
    g.x_lo = f.x_lo;
    g.x_hi = f.x_hi;
    g.rho = ArrayXXd::Constant(f.nt(), f.nx(), f.rho.mean());
    g.u = ArrayXXd::Constant(f.nt(), f.nx(), f.u.mean());
    g.p = ArrayXXd::Constant(f.nt(), f.nx(), f.p.mean());

    const SourceBreakdown src = source_breakdown(g);
    const A1Field a1 = a1_viscous(g);
    const Frame fr = build_frame(g, n_seeds);
    const EvolutionaryForm ef = build_evolutionary_form(g, fr);
    const forms::CommutatorField cf = evolutionary_commutator(ef);

    const double hx = min_spacing(f.x);
    const double ht = min_spacing(f.t);
    const double hs = min_spacing(fr.sigma);
    const double hseed = min_spacing(fr.seeds);

    NoiseFloors floors;
    const double measured_accel =
        std::max({src.nonstationary.abs().maxCoeff(), src.h0_gradient.abs().maxCoeff()});
    floors.accel = std::max(measured_accel,
                            kEpsC * (total_enthalpy(f).abs().maxCoeff() / hx +
                                     f.u.abs().maxCoeff() / ht));
    double a1_scale = 0.0;
    if (f.q) {
        const ArrayXXd T = temperature(f);
        a1_scale += (*f.q / T).abs().maxCoeff() / hx +
                    (*f.q / (f.rho * T)).abs().maxCoeff() * T.abs().maxCoeff() / hx;
    }
    if (f.tau)
        a1_scale += (*f.tau / f.rho).abs().maxCoeff() * f.u.abs().maxCoeff() / hx;
    floors.A1 = std::max(a1.A1.abs().maxCoeff(), kEpsC * a1_scale);

    // Roundoff floor of the frame commutator given coefficient magnitudes
    // of the actual form.
    const EvolutionaryForm ef_actual =
        build_evolutionary_form(f, build_frame(f, n_seeds));
    const double omega_scale = ef_actual.omega.A2.abs().maxCoeff() / hs +
                               ef_actual.omega.A1.abs().maxCoeff() / hseed;
    floors.K = std::max(cf.max_abs, kEpsC * omega_scale);
    return floors;
}

bool lagrange_check(const FlowFields& f, const LagrangeOptions& opt)
{
    f.validate();
    if (opt.excluded_subdomains) return false;

    const double L = f.x_hi - f.x_lo;
    const double a_ref = std::sqrt(f.gas.gamma * f.p.maxCoeff() / f.rho.minCoeff());
    const double accel_scale = (a_ref * a_ref + f.u.abs().maxCoeff() * f.u.abs().maxCoeff()) / L;

    const ArrayXXd dudt = forms::d_axis1(f.u, f.t);
    if (dudt.abs().maxCoeff() > opt.rel_tol * accel_scale) return false;

    if (f.F) {
        const ArrayXXd& F = *f.F;
        const double f_scale = std::max(F.abs().maxCoeff(), accel_scale);
        if (opt.force_potential) {
            if (opt.force_potential->size() != f.nx())
                throw std::invalid_argument("lagrange_check: potential size mismatch");
            const ArrayXd dphi = forms::d_line(*opt.force_potential, f.x);
            for (Eigen::Index m = 0; m < f.nt(); ++m)
                if ((F.row(m).transpose() - dphi).abs().maxCoeff() > opt.rel_tol * f_scale)
                    return false;
        } else {
            // Best-fit stationary potential: gradient of the time average.
            // Any time variation of F is the non-gradient obstruction.
            const ArrayXd Fbar = F.colwise().mean().transpose();
            for (Eigen::Index m = 0; m < f.nt(); ++m)
                if ((F.row(m).transpose() - Fbar).abs().maxCoeff() > opt.rel_tol * f_scale)
                    return false;
        }
    }
    return true;
}

const char* to_string(InstabilityClass c)
{
    switch (c) {
        case InstabilityClass::Stable: return "Stable";
        case InstabilityClass::ShockType: return "ShockType";
        case InstabilityClass::ConvectiveVortex: return "ConvectiveVortex";
        case InstabilityClass::TurbulentPulsation: return "TurbulentPulsation";
    }
    return "unknown";
}

InstabilityClass classify(const SourceBreakdown& src, const ArrayXXd& A1,
                          const NoiseFloors& floors)
{
    const double n_ns = src.nonstationary.abs().maxCoeff();
    const double n_np = src.nonpotential.abs().maxCoeff();
    const double n_conv = src.convective.abs().maxCoeff();
    const double n_a1 = A1.abs().maxCoeff();

    const bool sig_a1 = n_a1 > 10.0 * floors.A1;
    const bool sig_ns = n_ns > 10.0 * floors.accel;
    const bool sig_np = n_np > 10.0 * floors.accel;
    const bool sig_conv = n_conv > 10.0 * floors.accel;

    if (!sig_a1 && !sig_ns && !sig_np && !sig_conv)
        return InstabilityClass::Stable;
    if (sig_a1)
        return InstabilityClass::TurbulentPulsation;
    if ((sig_np || sig_conv) && std::max(n_np, n_conv) >= n_ns)
        return InstabilityClass::ConvectiveVortex;
    return InstabilityClass::ShockType;
}

std::vector<TransitionEvent> transition_detector(const euler1d::Solution1D& sol,
                                                 int window_cells)
{
    if (sol.times.size() < 3)
        throw std::invalid_argument("transition_detector: need >= 3 output times");
    const FlowFields f = FlowFields::from_solution(sol);
    const Frame fr = frame_from_solution(sol);
    const EvolutionaryForm ef = build_evolutionary_form(f, fr);
    const ArrayXXd K = commutator_on_grid(ef, f).abs();
    const NoiseFloors floors = noise_floor(f, static_cast<int>(sol.trajectories.size()));

    const Eigen::Index nt = f.nt(), nx = f.nx();
    const int w = window_cells;
    if (w < 4 || w > nx)
        throw std::invalid_argument("transition_detector: window must be in [4, n_cells]");

    // The resampled commutator smears around a moving discontinuity by the
    // distance it travels between frames plus the seed spacing, so the
    // window interior stands off from the boundary by that width.
    double dt_frame = 0.0;
    for (Eigen::Index m = 1; m < nt; ++m)
        dt_frame = std::max(dt_frame, f.t[m] - f.t[m - 1]);
    double smax = 0.0;
    for (const auto& slice : sol.slices)
        smax = std::max(smax, euler1d::max_wave_speed(slice, sol.gas));
    const auto n_seeds = static_cast<double>(sol.trajectories.size());
    int margin = static_cast<int>(std::ceil(smax * dt_frame / sol.dx) +
                                  std::ceil(nx / n_seeds)) + 2;
    margin = std::clamp(margin, 1, std::max(1, (w - 4) / 2));

    std::vector<TransitionEvent> events;
    for (int c = 0; c + w <= nx; ++c) {
        double peak = 0.0;
        for (Eigen::Index m = 0; m < nt; ++m) {
            const double cur = K.block(m, c + margin, 1, w - 2 * margin).maxCoeff();
            if (m > 0 && peak > 10.0 * floors.K && cur < 0.25 * peak) {
                // Look for a captured discontinuity at the window boundary.
                const auto& flags = sol.shock_flags[m];
                int flag_cell = -1;
                for (int d : {0, -1, 1}) {
                    const int lo = c + d, hi = c + w - 1 + d;
                    if (lo >= 0 && lo < nx && flags[lo]) { flag_cell = lo; break; }
                    if (hi >= 0 && hi < nx && flags[hi]) { flag_cell = hi; break; }
                }
                if (flag_cell >= 0) {
                    // Report the collapse against the pre-shedding peak.
                    events.push_back({sol.times[m], sol.x[flag_cell], c, peak, cur});
                    peak = cur;  // re-arm only after K rises again
                }
            }
            peak = std::max(peak, cur);
        }
    }
    std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
        return a.t != b.t ? a.t < b.t : (a.x != b.x ? a.x < b.x : a.window < b.window);
    });
    // Adjacent sliding windows report the same shedding; keep one per (t, x).
    events.erase(std::unique(events.begin(), events.end(),
                             [](const auto& a, const auto& b) {
                                 return a.t == b.t && a.x == b.x;
                             }),
                 events.end());
    return events;
}

}  // namespace evoflow::diagnostics
