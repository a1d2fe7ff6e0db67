#include "kslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kslab {

const char* to_string(StopReason r)
{
    switch (r) {
        case StopReason::TEnd: return "TEnd";
        case StopReason::Steady: return "Steady";
        case StopReason::BlowUp: return "BlowUp";
    }
    return "?";
}

Grid Grid::uniform(double L, int n)
{
    if (n < 8) throw std::invalid_argument("grid needs at least 8 cells");
    if (!(L > 0.0)) throw std::invalid_argument("interval length must be positive");
    Grid g;
    g.L = L;
    g.n = n;
    g.dx = L / n;
    g.x.resize(n);
    for (int i = 0; i < n; ++i) g.x[i] = (i + 0.5) * g.dx;
    return g;
}

std::string check_solver_config(const SolverConfig& cfg, const Grid& g, const ModelParams& p)
{
    if (!(cfg.dt > 0.0)) return "dt must be positive";
    if (cfg.t_end < 0.0) return "t_end must be nonnegative";
    if (cfg.snapshot_every < 1) return "snapshot_every must be >= 1";
    if (cfg.series_every < 1) return "series_every must be >= 1";
    if (cfg.scheme == Scheme::Explicit) {
        const double bound = g.dx * g.dx / (2.0 * std::max({p.d1, p.d2, 1.0}));
        if (cfg.dt > bound) {
            return "explicit scheme requires dt <= dx^2 / (2 max(d1,d2,1)) = "
                   + std::to_string(bound);
        }
    }
    return {};
}

State initial_state(const Grid& g, const Equilibrium& eq, double amplitude, double wavenumber)
{
    State s;
    s.t = 0.0;
    s.u.resize(g.n);
    s.v.resize(g.n);
    s.w.resize(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double pert = amplitude * std::cos(wavenumber * std::numbers::pi * g.x[i]);
        s.u[i] = eq.u + pert;
        s.v[i] = eq.v + pert;
        s.w[i] = eq.w + pert;
    }
    const double lo = std::min({*std::min_element(s.u.begin(), s.u.end()),
                                *std::min_element(s.v.begin(), s.v.end()),
                                *std::min_element(s.w.begin(), s.w.end())});
    if (!(lo > 0.0)) {
        throw std::invalid_argument("perturbation amplitude drives a field nonpositive");
    }
    return s;
}

void Stepper::Tri::factor(int n, double dt, double dx, double d, double extra)
{
    const double off = -dt * d / (dx * dx);
    diag.resize(n);
    upper.resize(n);
    scratch.resize(n);
    // mirror-ghost Neumann rows: one-sided second difference at the walls
    std::vector<double> b(n, 1.0 + dt * extra + 2.0 * dt * d / (dx * dx));
    b[0] = b[n - 1] = 1.0 + dt * extra + dt * d / (dx * dx);

    // prefactored Thomas sweep: upper[i] = c / denom_i, diag[i] = 1 / denom_i
    double denom = b[0];
    diag[0] = 1.0 / denom;
    upper[0] = off / denom;
    for (int i = 1; i < n; ++i) {
        denom = b[i] - off * upper[i - 1];
        diag[i] = 1.0 / denom;
        upper[i] = off / denom;
    }
    lower_ = off;
}

void Stepper::Tri::solve(std::vector<double>& rhs)
{
    const int n = static_cast<int>(rhs.size());
    scratch[0] = rhs[0] * diag[0];
    for (int i = 1; i < n; ++i) {
        scratch[i] = (rhs[i] - lower_ * scratch[i - 1]) * diag[i];
    }
    rhs[n - 1] = scratch[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        rhs[i] = scratch[i] - upper[i] * rhs[i + 1];
    }
}

Stepper::Stepper(const Grid& g, const ModelParams& p, const SolverConfig& cfg)
    : grid_(&g), p_(p), cfg_(cfg)
{
    const std::string err = check_solver_config(cfg, g, p);
    if (!err.empty()) throw std::invalid_argument("solver config: " + err);
    if (cfg.scheme == Scheme::SemiImplicit) {
        tri_u_.factor(g.n, cfg.dt, g.dx, p.d1, 0.0);
        tri_v_.factor(g.n, cfg.dt, g.dx, p.d2, 0.0);
        tri_w_.factor(g.n, cfg.dt, g.dx, 1.0, p.lambda);
    }
    flux_.resize(g.n);
    rate_u_.resize(g.n);
    rate_v_.resize(g.n);
    rate_w_.resize(g.n);
    wnew_.resize(g.n);
}

void Stepper::chemo_divergence(double coeff, const std::vector<double>& field,
                               const std::vector<double>& w, std::vector<double>& out) const
{
    const int n = grid_->n;
    const double dx = grid_->dx;
    // face fluxes F_{i+1/2} = coeff * f_face * (w_{i+1} - w_i)/dx; wall faces
    // carry zero flux, so they never enter
    double prevF = 0.0;
    for (int i = 0; i < n; ++i) {
        double F = 0.0;
        if (i < n - 1) {
            const double gw = (w[i + 1] - w[i]) / dx;
            double face;
            if (cfg_.advection == Advection::Upwind) {
                face = (coeff * gw > 0.0) ? field[i] : field[i + 1];
            } else {
                face = 0.5 * (field[i] + field[i + 1]);
            }
            F = coeff * face * gw;
        }
        out[i] = (F - prevF) / dx;
        prevF = F;
    }
}

void Stepper::laplacian(const std::vector<double>& f, std::vector<double>& out) const
{
    const int n = grid_->n;
    const double idx2 = 1.0 / (grid_->dx * grid_->dx);
    out[0] = (f[1] - f[0]) * idx2;
    for (int i = 1; i < n - 1; ++i) {
        out[i] = (f[i - 1] - 2.0 * f[i] + f[i + 1]) * idx2;
    }
    out[n - 1] = (f[n - 2] - f[n - 1]) * idx2;
}

StepInfo Stepper::step(State& s)
{
    const int n = grid_->n;
    const double dt = cfg_.dt;
    StepInfo info;

    if (cfg_.scheme == Scheme::SemiImplicit) {
        // w first, from beginning-of-step u + v
        for (int i = 0; i < n; ++i) wnew_[i] = s.w[i] + dt * (s.u[i] + s.v[i]);
        tri_w_.solve(wnew_);

        chemo_divergence(p_.chi, s.u, wnew_, flux_);
        for (int i = 0; i < n; ++i) {
            const double reac = p_.mu1 * (1.0 - s.u[i] - p_.a1 * s.v[i]) * s.u[i];
            rate_u_[i] = s.u[i] + dt * (reac - flux_[i]);
        }
        tri_u_.solve(rate_u_);

        chemo_divergence(p_.xi, s.v, wnew_, flux_);
        for (int i = 0; i < n; ++i) {
            const double reac = p_.mu2 * (1.0 - p_.a2 * s.u[i] - s.v[i]) * s.v[i];
            rate_v_[i] = s.v[i] + dt * (reac - flux_[i]);
        }
        tri_v_.solve(rate_v_);
    } else {
        laplacian(s.w, rate_w_);
        for (int i = 0; i < n; ++i) {
            wnew_[i] = s.w[i] + dt * (rate_w_[i] - p_.lambda * s.w[i] + s.u[i] + s.v[i]);
        }
        laplacian(s.u, rate_u_);
        chemo_divergence(p_.chi, s.u, s.w, flux_);
        for (int i = 0; i < n; ++i) {
            const double reac = p_.mu1 * (1.0 - s.u[i] - p_.a1 * s.v[i]) * s.u[i];
            rate_u_[i] = s.u[i] + dt * (p_.d1 * rate_u_[i] - flux_[i] + reac);
        }
        laplacian(s.v, rate_v_);
        chemo_divergence(p_.xi, s.v, s.w, flux_);
        for (int i = 0; i < n; ++i) {
            const double reac = p_.mu2 * (1.0 - p_.a2 * s.u[i] - s.v[i]) * s.v[i];
            rate_v_[i] = s.v[i] + dt * (p_.d2 * rate_v_[i] - flux_[i] + reac);
        }
    }

    double max_delta = 0.0, max_abs = 0.0;
    double min_uv = std::numeric_limits<double>::infinity();
    double max_uv = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
        max_delta = std::max({max_delta, std::fabs(rate_u_[i] - s.u[i]),
                              std::fabs(rate_v_[i] - s.v[i]), std::fabs(wnew_[i] - s.w[i])});
        max_abs = std::max({max_abs, std::fabs(rate_u_[i]), std::fabs(rate_v_[i]),
                            std::fabs(wnew_[i])});
        min_uv = std::min({min_uv, rate_u_[i], rate_v_[i]});
        max_uv = std::max({max_uv, std::fabs(rate_u_[i]), std::fabs(rate_v_[i])});
        finite = finite && std::isfinite(rate_u_[i]) && std::isfinite(rate_v_[i])
                        && std::isfinite(wnew_[i]);
    }
    info.max_rate = max_delta / dt;
    info.blowup = !finite || max_abs > cfg_.blowup_ceiling;
    info.negativity = min_uv < -10.0 * std::numeric_limits<double>::epsilon() * max_uv;

    s.u.swap(rate_u_);
    s.v.swap(rate_v_);
    s.w.swap(wnew_);
    return info;
}

double mass(std::span<const double> field, const Grid& g)
{
    double sum = 0.0;
    for (double f : field) sum += f;
    return sum * g.dx;
}

namespace {

SeriesSample sample_of(const State& s, const Grid& g)
{
    SeriesSample out;
    out.t = s.t;
    out.u_at_x0 = s.u.front();
    out.u_at_mid = s.u[g.n / 2];
    out.mass_u = mass(s.u, g);
    out.mass_v = mass(s.v, g);
    out.linf_u = 0.0;
    for (double u : s.u) out.linf_u = std::max(out.linf_u, std::fabs(u));
    return out;
}

} // namespace

Trajectory run(State state, const Grid& g, const ModelParams& p, const SolverConfig& cfg,
               const std::vector<Observer>& observers)
{
    Stepper stepper(g, p, cfg);
    Trajectory traj;
    traj.mass_u0 = mass(state.u, g);
    traj.mass_v0 = mass(state.v, g);
    traj.snapshots.push_back(state);
    traj.series.push_back(sample_of(state, g));
    for (const auto& obs : observers) obs(state);

    const double t0 = state.t;
    const long nsteps = std::llround(cfg.t_end / cfg.dt);
    int steady_run = 0;
    traj.reason = StopReason::TEnd;

    for (long step = 1; step <= nsteps; ++step) {
        const StepInfo info = stepper.step(state);
        state.t = t0 + static_cast<double>(step) * cfg.dt;

        if (info.negativity) {
            if (traj.negativity_events == 0) traj.first_negativity_time = state.t;
            ++traj.negativity_events;
        }
        if (step % cfg.snapshot_every == 0) {
            traj.snapshots.push_back(state);
            for (const auto& obs : observers) obs(state);
        }
        if (step % cfg.series_every == 0) {
            traj.series.push_back(sample_of(state, g));
        }
        if (info.blowup) {
            traj.reason = StopReason::BlowUp;
            break;
        }
        steady_run = (info.max_rate < cfg.steady_tol) ? steady_run + 1 : 0;
        if (steady_run >= 100) {
            traj.reason = StopReason::Steady;
            break;
        }
    }

    if (traj.snapshots.back().t != state.t) {
        traj.snapshots.push_back(state);
        for (const auto& obs : observers) obs(state);
    }
    if (traj.series.back().t != state.t) {
        traj.series.push_back(sample_of(state, g));
    }
    return traj;
}

} // namespace kslab
