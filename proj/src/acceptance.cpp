#include "kslab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "kslab/bifurcation.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/linear_analysis.hpp"
#include "kslab/oracles.hpp"
#include "kslab/solver.hpp"

namespace kslab::acceptance {

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& msg)
    {
        if (!cond) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << msg;
        }
    }
    void note(const std::string& msg)
    {
        if (detail.tellp() > 0) detail << "; ";
        detail << msg;
    }
};

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

ModelParams small_interval_params()   // Table-1 regime
{
    ModelParams p;
    p.d1 = 1.0; p.d2 = 0.1; p.a1 = p.a2 = 0.5; p.mu1 = p.mu2 = 1.0;
    p.lambda = 0.5; p.xi = 0.5; p.L = 0.5; p.chi = 0.0;
    return p;
}

ModelParams hopf_params()             // Table-3 regime
{
    ModelParams p;
    p.d1 = 5.0; p.d2 = 0.1; p.a1 = p.a2 = 0.5; p.mu1 = p.mu2 = 1.0;
    p.lambda = 5.0; p.xi = 0.1; p.L = 4.0; p.chi = 0.0;
    return p;
}

ModelParams coarsening_params()       // spike/coarsening regime
{
    ModelParams p;
    p.d1 = 0.2; p.d2 = 0.3; p.a1 = p.a2 = 0.5; p.mu1 = p.mu2 = 1.0;
    p.lambda = 0.5; p.chi = 20.0; p.xi = 50.0; p.L = 0.5;
    return p;
}

ModelParams random_valid_params(std::mt19937& rng)
{
    auto logu = [&rng](double lo, double hi) {
        std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
        return std::exp(d(rng));
    };
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    ModelParams p;
    p.d1 = logu(0.2, 5.0);
    p.d2 = logu(0.2, 5.0);
    p.mu1 = logu(0.5, 2.0);
    p.mu2 = logu(0.5, 2.0);
    p.a1 = uni(0.05, 0.9);
    p.a2 = uni(0.05, 0.9);
    p.lambda = logu(0.5, 3.0);
    p.xi = uni(0.05, 1.5);
    p.L = uni(0.5, 3.5);
    p.chi = 0.0;
    return p;
}

CriterionResult criterion1()
{
    Check c;
    const ModelParams p = small_interval_params();
    const Equilibrium eq = compute_equilibrium(p);
    const double tilde_ref[7] = {61.0, 238.6, 534.7, 949.2, 1482.2, 2133.6, 2903.4};
    const double hat_ref[7] = {75.2, 290.2, 648.4, 1150.0, 1794.9, 2583.1, 3514.6};
    double worst = 0.0;
    for (int k = 1; k <= 7; ++k) {
        const auto mode = ModeWavenumber::of(k, p.L);
        const double ct = chi_tilde(mode, p, eq);
        const double ch = chi_hat(mode, p, eq);
        worst = std::max({worst, std::fabs(ct - tilde_ref[k - 1]), std::fabs(ch - hat_ref[k - 1])});
        c.expect(std::fabs(ct - tilde_ref[k - 1]) <= 0.05,
                 "chi_tilde(" + std::to_string(k) + ")=" + fmt(ct));
        c.expect(std::fabs(ch - hat_ref[k - 1]) <= 0.05,
                 "chi_hat(" + std::to_string(k) + ")=" + fmt(ch));
    }
    if (c.pass) c.note("max deviation " + fmt(worst) + " (tol 0.05)");
    return {1, "small-interval threshold table (k=1..7)", c.pass, c.detail.str()};
}

CriterionResult criterion2()
{
    Check c;
    ModelParams p = small_interval_params();
    const int L_list[10] = {3, 5, 7, 9, 11, 13, 15, 17, 19, 21};
    const int k_ref[10] = {1, 1, 2, 3, 3, 4, 4, 5, 5, 6};
    const double chi_ref[10] = {4.5868, 4.8455, 4.4330, 4.5868, 4.4260,
                                4.4815, 4.4290, 4.4465, 4.4327, 4.4330};
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        p.L = L_list[i];
        const Equilibrium eq = compute_equilibrium(p);
        const StabilityReport rep = critical_chi(p, eq);
        worst = std::max(worst, std::fabs(rep.chi0 - chi_ref[i]));
        c.expect(rep.argmin_k == k_ref[i], "L=" + std::to_string(L_list[i]) + ": k0="
                 + std::to_string(rep.argmin_k) + " want " + std::to_string(k_ref[i]));
        c.expect(std::fabs(rep.chi0 - chi_ref[i]) <= 0.0005,
                 "L=" + std::to_string(L_list[i]) + ": chi0=" + fmt(rep.chi0));
        c.expect(rep.loss_type == LossType::SteadyState,
                 "L=" + std::to_string(L_list[i]) + ": loss type not SteadyState");
    }
    if (c.pass) c.note("max |chi0 - ref| " + fmt(worst) + " (tol 0.0005)");
    return {2, "wavemode selection table over L", c.pass, c.detail.str()};
}

CriterionResult criterion3()
{
    Check c;
    ModelParams p = hopf_params();
    const int k_ref[14] = {1, 1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4, 5};
    const double chi_ref[14] = {129.0, 69.7, 63.2, 66.5, 64.5, 63.2, 64.2,
                                63.8, 63.2, 63.7, 63.5, 63.2, 63.5, 63.4};
    double worst = 0.0;
    for (int L = 1; L <= 14; ++L) {
        p.L = L;
        const Equilibrium eq = compute_equilibrium(p);
        const StabilityReport rep = critical_chi(p, eq);
        worst = std::max(worst, std::fabs(rep.chi0 - chi_ref[L - 1]));
        c.expect(rep.argmin_k == k_ref[L - 1], "L=" + std::to_string(L) + ": k1="
                 + std::to_string(rep.argmin_k) + " want " + std::to_string(k_ref[L - 1]));
        c.expect(std::fabs(rep.chi0 - chi_ref[L - 1]) <= 0.05,
                 "L=" + std::to_string(L) + ": chi0=" + fmt(rep.chi0));
        c.expect(rep.loss_type == LossType::Hopf,
                 "L=" + std::to_string(L) + ": loss type not Hopf");
    }
    if (c.pass) c.note("max |chi0 - ref| " + fmt(worst) + " (tol 0.05)");
    return {3, "oscillatory threshold table over L", c.pass, c.detail.str()};
}

CriterionResult criterion4()
{
    Check c;
    ModelParams p = small_interval_params();
    p.L = 1.0;
    p.d1 = p.d2 = 1e4;
    const double lambda_star = 18.0 * std::numbers::pi * std::numbers::pi;

    for (const double factor : {0.5, 2.0}) {
        p.lambda = factor * lambda_star;
        const Equilibrium eq = compute_equilibrium(p);
        const StabilityReport rep = critical_chi(p, eq);
        c.expect(rep.loss_type == LossType::SteadyState && rep.argmin_k == 1,
                 "large-diffusion loss is not steady-type at k0=1");
        const BranchInfo b = compute_K2(ModeWavenumber::of(rep.argmin_k, p.L), p, eq);
        c.expect(b.status == BranchStatus::Ok, "K2 pipeline reported " + std::string(to_string(b.status)));
        if (factor < 1.0) {
            c.expect(b.K2 > 0.0, "K2=" + fmt(b.K2) + " not positive at lambda=0.5*lambda_star");
        } else {
            c.expect(b.K2 < 0.0, "K2=" + fmt(b.K2) + " not negative at lambda=2*lambda_star");
        }
        c.expect(b.K2_asymptotic_sign == (factor < 1.0 ? 1 : -1), "sign law disagrees");
    }

    // ratio of the exact K2 to the large-diffusion leading term
    p.d1 = p.d2 = 1e5;
    p.lambda = 0.5 * lambda_star;
    const Equilibrium eq = compute_equilibrium(p);
    const StabilityReport rep = critical_chi(p, eq);
    const auto mode = ModeWavenumber::of(rep.argmin_k, p.L);
    const BranchInfo b = compute_K2(mode, p, eq);
    const double H1 = mode.lambda + p.lambda;
    const double bracket = p.L * H1 * H1 * H1
        * ((14.0 - 2.0 * p.a1 * p.a2) * mode.lambda / (1.0 - p.a1 * p.a2) - p.lambda)
        / (48.0 * eq.u * eq.u);
    const double k2_leading = bracket * p.d1 / (eq.u * mode.lambda * p.L / 2.0);
    const double ratio = b.K2 / k2_leading;
    c.expect(ratio >= 0.9 && ratio <= 1.1, "K2/leading=" + fmt(ratio) + " outside [0.9,1.1]");
    if (c.pass) c.note("sign law holds; K2/leading at d=1e5: " + fmt(ratio));
    return {4, "pitchfork constant sign law and asymptotics", c.pass, c.detail.str()};
}

CriterionResult criterion5()
{
    Check c;
    std::mt19937 rng(20240817);
    double worst_a = 0.0, worst_c = 0.0, worst_d = 0.0;
    int rh_checked = 0;

    for (int trial = 0; trial < 50; ++trial) {
        const ModelParams p = random_valid_params(rng);
        const Equilibrium eq = compute_equilibrium(p);
        std::uniform_int_distribution<int> kdist(1, 12);
        const auto mode = ModeWavenumber::of(kdist(rng), p.L);

        // (a) closed forms vs bisection roots
        const double ct = chi_tilde(mode, p, eq);
        const double ch = chi_hat(mode, p, eq);
        const auto ct_b = oracle::chi_tilde_bisection(mode, p, eq);
        const auto ch_b = oracle::chi_hat_bisection(mode, p, eq);
        c.expect(ct_b.has_value() && ch_b.has_value(), "bisection bracket failed");
        if (ct_b && ch_b) {
            const double ea = std::fabs(*ct_b - ct) / std::max(1.0, std::fabs(ct));
            const double eb = std::fabs(*ch_b - ch) / std::max(1.0, std::fabs(ch));
            worst_a = std::max({worst_a, ea, eb});
            c.expect(ea <= 1e-6, "chi_tilde bisection mismatch " + fmt(ea));
            c.expect(eb <= 1e-6, "chi_hat bisection mismatch " + fmt(eb));
        }

        // (b) Routh-Hurwitz vs direct root real parts, away from thresholds
        std::uniform_real_distribution<double> chi_dist(-0.5 * std::fabs(ct) - 1.0,
                                                        2.0 * std::fabs(ct) + 2.0);
        for (int j = 0; j < 4; ++j) {
            const double chi = chi_dist(rng);
            const double margin = 1e-3 * (1.0 + std::fabs(ct) + std::fabs(ch));
            if (std::fabs(chi - ct) < margin || std::fabs(chi - ch) < margin) continue;
            const auto coeffs = char_coeffs(mode, chi, p, eq);
            const auto roots = cubic_roots(coeffs);
            const double max_re = std::max({roots[0].real(), roots[1].real(), roots[2].real()});
            if (std::fabs(max_re) < 1e-7 * std::max(1.0, coeffs.alpha2)) continue;
            ++rh_checked;
            c.expect(routh_hurwitz_stable(coeffs) == (max_re < 0.0),
                     "Routh-Hurwitz vs roots disagree at k=" + std::to_string(mode.k)
                     + " chi=" + fmt(chi));
        }

        // (c) Cramer vs pivoted elimination on the three corrector systems
        const double chi_k = ct;
        const Mat3 systems[3] = {mean_matrix(p), double_mode_matrix(mode, p, eq, chi_k),
                                 projection_matrix(mode, p, eq)};
        const std::array<double, 3> rhss[3] = {mean_rhs(mode, p, eq),
                                               double_mode_rhs(mode, p, eq, chi_k),
                                               {1.0, 0.0, 0.0}};
        for (int s = 0; s < 3; ++s) {
            const auto xc = cramer3(systems[s], rhss[s]);
            const auto xg = oracle::solve3_pivoted(systems[s], rhss[s]);
            double scale = 0.0;
            for (int i = 0; i < 3; ++i) scale = std::max(scale, std::fabs(xg[i]));
            for (int i = 0; i < 3; ++i) {
                const double rel = std::fabs(xc[i] - xg[i]) / std::max(scale, 1e-300);
                worst_c = std::max(worst_c, rel);
                c.expect(rel <= 1e-10, "Cramer vs pivoted solve differ by " + fmt(rel));
            }
        }

        // (d) G: exact integrals vs the fine-grid corrector BVP oracle
        const auto mode_low = ModeWavenumber::of(1 + trial % 2, p.L);
        const MeanIntegrals mean = solve_mean_system(mode_low, p, eq);
        const DoubleModeIntegrals dbl =
            solve_double_mode_system(mode_low, p, eq, chi_tilde(mode_low, p, eq));
        if (dbl.status == BranchStatus::Ok) {
            const double g_exact = rhs_G(mode_low, p, eq, dbl, mean);
            const auto bvp = oracle::corrector_bvp_projections(mode_low, p, eq);
            const double rel = std::fabs(bvp.G - g_exact)
                / std::max(std::fabs(g_exact), 1e-12);
            worst_d = std::max(worst_d, rel);
            c.expect(rel <= 1e-6, "G vs BVP oracle differ by " + fmt(rel)
                     + " at k=" + std::to_string(mode_low.k) + " L=" + fmt(p.L));
        }
    }
    c.expect(rh_checked >= 50, "too few Routh-Hurwitz comparisons survived the margin filter");
    if (c.pass) {
        c.note("worst: bisection " + fmt(worst_a) + ", Cramer " + fmt(worst_c)
               + ", BVP " + fmt(worst_d));
    }
    return {5, "closed forms vs independent oracles (50 random sets)", c.pass, c.detail.str()};
}

struct SimOutcome {
    Trajectory traj;
    Grid grid;
    int dominant = 0;
    PeriodEstimate period;
    bool mass_ok = true;
};

SimOutcome run_pattern_sim(ModelParams p, double chi, double dt, double t_end,
                           Advection adv, double dx = 0.01, int series_every = 10,
                           int snapshot_every = 500)
{
    p.chi = chi;
    const Equilibrium eq = compute_equilibrium(p);
    SimOutcome out;
    out.grid = Grid::uniform(p.L, std::max(8, static_cast<int>(std::llround(p.L / dx))));
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.advection = adv;
    cfg.snapshot_every = snapshot_every;
    cfg.series_every = series_every;
    const State init = initial_state(out.grid, eq, 0.01, 2.4);
    out.traj = run(init, out.grid, p, cfg);

    const State& last = out.traj.snapshots.back();
    const int kcut = std::min(24, out.grid.n / 2 - 1);
    out.dominant = dominant_mode(mode_amplitudes(last.u, out.grid, kcut)).k;
    std::vector<double> ts, u0;
    for (const auto& s : out.traj.series) {
        ts.push_back(s.t);
        u0.push_back(s.u_at_x0);
    }
    out.period = detect_period(ts, u0);
    out.mass_ok = check_mass_bound(out.traj.series, out.traj.mass_u0, p.mu1, p.L, true).ok
               && check_mass_bound(out.traj.series, out.traj.mass_v0, p.mu2, p.L, false).ok;
    return out;
}

CriterionResult criterion6()
{
    Check c;
    const int L_list[4] = {7, 9, 11, 13};
    const int mode_ref[4] = {2, 3, 3, 4};
    std::vector<std::future<SimOutcome>> futs;
    for (int i = 0; i < 4; ++i) {
        futs.push_back(std::async(std::launch::async, [&, i] {
            ModelParams p = small_interval_params();
            p.L = L_list[i];
            return run_pattern_sim(p, 6.0, 0.01, 1500.0, Advection::Central, 0.01, 100, 2000);
        }));
    }
    for (int i = 0; i < 4; ++i) {
        const SimOutcome out = futs[i].get();
        const std::string tag = "L=" + std::to_string(L_list[i]);
        c.expect(out.traj.reason == StopReason::Steady,
                 tag + ": no steady state (reason " + to_string(out.traj.reason) + ")");
        c.expect(out.dominant == mode_ref[i], tag + ": dominant mode "
                 + std::to_string(out.dominant) + " want " + std::to_string(mode_ref[i]));
        c.expect(out.mass_ok, tag + ": mass bound violated");
    }
    if (c.pass) c.note("steady states with selected wavemodes 2,3,3,4");
    return {6, "wavemode selection dynamics (chi=6)", c.pass, c.detail.str()};
}

CriterionResult criterion7()
{
    Check c;
    // chi = 100 runs comfortably at dt = 1e-3; chi = 1000 sits far above the
    // advective stability range of that step, so it gets dt = 2e-5
    auto fut100 = std::async(std::launch::async, [&] {
        return run_pattern_sim(small_interval_params(), 100.0, 1e-3, 300.0,
                               Advection::Central, 0.01, 100, 5000);
    });
    auto fut1000 = std::async(std::launch::async, [&] {
        return run_pattern_sim(small_interval_params(), 1000.0, 2e-5, 300.0,
                               Advection::Central, 0.01, 2000, 100000);
    });
    const SimOutcome s100 = fut100.get();
    const SimOutcome s1000 = fut1000.get();

    for (const auto* s : {&s100, &s1000}) {
        const std::string tag = (s == &s100) ? "chi=100" : "chi=1000";
        c.expect(s->traj.reason == StopReason::Steady, tag + ": did not reach steady state");
        const auto& u = s->traj.snapshots.back().u;
        bool decreasing = true;
        for (size_t i = 1; i < u.size(); ++i) decreasing = decreasing && u[i] < u[i - 1];
        c.expect(decreasing, tag + ": u not strictly decreasing");
        c.expect(s->dominant == 1, tag + ": dominant mode " + std::to_string(s->dominant));
        c.expect(s->mass_ok, tag + ": mass bound violated");
    }
    const double peak100 = s100.traj.snapshots.back().u.front();
    const double peak1000 = s1000.traj.snapshots.back().u.front();
    c.expect(peak1000 > peak100,
             "peak u(0) decreases with chi: " + fmt(peak1000) + " (chi=1000) vs "
             + fmt(peak100) + " (chi=100); steady-state continuation confirms the"
             " computed states, see notes");
    if (c.pass) c.note("monotone layers, peaks " + fmt(peak100) + " -> " + fmt(peak1000));
    return {7, "monotone boundary layer (chi=100,1000)", c.pass, c.detail.str()};
}

CriterionResult criterion8()
{
    Check c;
    auto fut4 = std::async(std::launch::async, [&] {
        ModelParams p = hopf_params();
        p.L = 4.0;
        return run_pattern_sim(p, 80.0, 0.01, 250.0, Advection::Central, 0.01, 10, 500);
    });
    const int L_list[4] = {6, 8, 12, 14};
    const int mode_ref[4] = {2, 3, 4, 5};
    std::vector<std::future<SimOutcome>> futs;
    for (int i = 0; i < 4; ++i) {
        futs.push_back(std::async(std::launch::async, [&, i] {
            ModelParams p = hopf_params();
            p.L = L_list[i];
            return run_pattern_sim(p, 80.0, 0.01, 250.0, Advection::Central, 0.01, 10, 500);
        }));
    }

    const SimOutcome s4 = fut4.get();
    c.expect(s4.period.verdict == PeriodVerdict::Periodic,
             "L=4: " + std::string(to_string(s4.period.verdict)));
    if (s4.period.verdict == PeriodVerdict::Periodic) {
        c.expect(std::fabs(s4.period.period - 11.0) <= 0.2 * 11.0,
                 "L=4: period " + fmt(s4.period.period) + " outside 11 +- 20%");
    }
    c.expect(s4.mass_ok, "L=4: mass bound violated");

    for (int i = 0; i < 4; ++i) {
        const SimOutcome out = futs[i].get();
        const std::string tag = "L=" + std::to_string(L_list[i]);
        c.expect(out.period.verdict == PeriodVerdict::Periodic, tag + ": not periodic");
        if (out.period.verdict == PeriodVerdict::Periodic) {
            c.expect(out.period.period >= 6.0 && out.period.period <= 10.0,
                     tag + ": period " + fmt(out.period.period) + " outside [6,10]");
        }
        // dominant spatial mode of the oscillating pattern: average the mode
        // magnitudes over the last quarter of the snapshots
        const auto& snaps = out.traj.snapshots;
        const size_t q0 = snaps.size() - std::max<size_t>(1, snaps.size() / 4);
        const int kcut = std::min(16, out.grid.n / 2 - 1);
        std::vector<double> acc(kcut + 1, 0.0);
        for (size_t s = q0; s < snaps.size(); ++s) {
            const ModeSpectrum spec = mode_amplitudes(snaps[s].u, out.grid, kcut);
            for (int k = 0; k <= kcut; ++k) acc[k] += std::fabs(spec.amplitudes[k]);
        }
        int dom = 1;
        for (int k = 2; k <= kcut; ++k) {
            if (acc[k] > acc[dom]) dom = k;
        }
        c.expect(dom == mode_ref[i], tag + ": oscillation mode " + std::to_string(dom)
                 + " want " + std::to_string(mode_ref[i]));
        c.expect(out.mass_ok, tag + ": mass bound violated");
    }
    if (c.pass) c.note("period(L=4)=" + fmt(s4.period.period) + ", modes 2,3,4,5 in [6,10]");
    return {8, "time-periodic patterns in the oscillatory regime", c.pass, c.detail.str()};
}

CriterionResult criterion9()
{
    Check c;

    // equilibrium is a discrete fixed point over 1e5 steps (chi on the
    // stable side; above the threshold rounding noise is amplified by the
    // genuine linear instability)
    {
        ModelParams p = small_interval_params();
        p.chi = 50.0;
        const Equilibrium eq = compute_equilibrium(p);
        const Grid g = Grid::uniform(p.L, 50);
        SolverConfig cfg;
        cfg.dt = 0.01;
        cfg.t_end = 1000.0;   // 1e5 steps
        cfg.steady_tol = 0.0; // never stop early
        cfg.snapshot_every = 100000;
        cfg.series_every = 100000;
        State s = initial_state(g, eq, 0.0, 2.4);
        const Trajectory traj = run(s, g, p, cfg);
        double drift = 0.0;
        const State& last = traj.snapshots.back();
        for (int i = 0; i < g.n; ++i) {
            drift = std::max({drift, std::fabs(last.u[i] - eq.u), std::fabs(last.v[i] - eq.v),
                              std::fabs(last.w[i] - eq.w)});
        }
        c.expect(drift < 1e-10, "fixed-point drift " + fmt(drift));
        c.note("drift " + fmt(drift));
    }

    // second-order spatial convergence on the pure diffusion subproblem
    {
        ModelParams p = small_interval_params();
        p.chi = p.xi = 0.0;
        p.mu1 = p.mu2 = 1e-300;   // kinetics off; keeps positivity validation intact
        p.L = 1.0;
        const double rate = p.d1 * std::numbers::pi * std::numbers::pi;
        const double t_fix = 0.1;
        auto error_at = [&](int n) {
            const Grid g = Grid::uniform(p.L, n);
            SolverConfig cfg;
            cfg.dt = 0.25 * g.dx * g.dx;   // keeps the O(dt) error scaling as O(dx^2)
            cfg.t_end = t_fix;
            cfg.steady_tol = 0.0;
            cfg.snapshot_every = 1 << 30;
            cfg.series_every = 1 << 30;
            Equilibrium eq{1.0, 1.0, 2.0 / p.lambda};
            State s = initial_state(g, eq, 0.5, 1.0 / p.L);
            const Trajectory traj = run(s, g, p, cfg);
            const State& last = traj.snapshots.back();
            const double tt = last.t;
            double err = 0.0;
            for (int i = 0; i < g.n; ++i) {
                const double exact = eq.u + 0.5 * std::exp(-rate * tt)
                    * std::cos(std::numbers::pi * g.x[i] / p.L);
                err = std::max(err, std::fabs(last.u[i] - exact));
            }
            return err;
        };
        const double e1 = error_at(64);
        const double e2 = error_at(128);
        c.expect(e1 / e2 >= 3.9, "spatial convergence ratio " + fmt(e1 / e2) + " < 3.9");
        c.note("convergence ratio " + fmt(e1 / e2));
    }

    // conservative flux form: discrete masses frozen with kinetics/decay off
    {
        ModelParams p = small_interval_params();
        p.chi = 5.0;
        p.xi = 3.0;
        p.mu1 = p.mu2 = 1e-300;
        p.lambda = 1e-300;
        const Grid g = Grid::uniform(p.L, 50);
        SolverConfig cfg;
        cfg.scheme = Scheme::Explicit;
        cfg.dt = 4e-5;
        cfg.t_end = 5.0;
        cfg.steady_tol = 0.0;
        cfg.snapshot_every = 1 << 30;
        cfg.series_every = 1 << 30;
        Equilibrium eq{0.5, 0.5, 1.0};   // reference levels only; kinetics are off
        State s = initial_state(g, eq, 0.01, 2.4);
        const double m0u = mass(s.u, g), m0v = mass(s.v, g);
        const Trajectory traj = run(s, g, p, cfg);
        const State& last = traj.snapshots.back();
        const double du = std::fabs(mass(last.u, g) - m0u) / cfg.t_end;
        const double dv = std::fabs(mass(last.v, g) - m0v) / cfg.t_end;
        c.expect(du <= 1e-12 && dv <= 1e-12,
                 "mass drift per unit time u:" + fmt(du) + " v:" + fmt(dv));
        c.note("mass drift/t " + fmt(std::max(du, dv)));
    }

    // Lemma-type mass inequality along a genuine pattern-forming run
    {
        const SimOutcome out = run_pattern_sim(small_interval_params(), 100.0, 1e-3, 100.0,
                                               Advection::Central, 0.01, 10, 5000);
        c.expect(out.mass_ok, "mass bound violated on the chi=100 run");
    }

    // early-time growth rate of the selected mode vs the dominant eigenvalue
    {
        ModelParams p = small_interval_params();
        const Equilibrium eq = compute_equilibrium(p);
        const auto mode = ModeWavenumber::of(1, p.L);
        const double chik = chi_tilde(mode, p, eq);
        p.chi = 1.05 * chik;
        const auto roots = cubic_roots(char_coeffs(mode, p.chi, p, eq));
        const double sigma = std::max({roots[0].real(), roots[1].real(), roots[2].real()});

        const Grid g = Grid::uniform(p.L, 50);
        SolverConfig cfg;
        cfg.dt = 1e-3;   // the splitting bias on the growth rate is O(dt)
        cfg.t_end = 40.0;
        cfg.steady_tol = 0.0;
        cfg.snapshot_every = 100;
        cfg.series_every = 1 << 30;
        const Eigenmode em = eigenmode(mode, p, eq);
        State s;
        s.t = 0.0;
        s.u.resize(g.n);
        s.v.resize(g.n);
        s.w.resize(g.n);
        const double eps0 = 2e-6;
        for (int i = 0; i < g.n; ++i) {
            const double cosx = std::cos(mode.k * std::numbers::pi * g.x[i] / p.L);
            s.u[i] = eq.u + eps0 * em.P * cosx;
            s.v[i] = eq.v + eps0 * em.Q * cosx;
            s.w[i] = eq.w + eps0 * cosx;
        }
        const Trajectory traj = run(s, g, p, cfg);
        double t1 = -1.0, t2 = -1.0, a1 = 0.0, a2 = 0.0;
        for (const auto& snap : traj.snapshots) {
            const ModeSpectrum spec = mode_amplitudes(snap.u, g, 4);
            const double amp = std::fabs(spec.amplitudes[mode.k]);
            if (t1 < 0.0 && amp >= 2e-4) { t1 = snap.t; a1 = amp; }
            if (t2 < 0.0 && amp >= 2e-3) { t2 = snap.t; a2 = amp; }
        }
        c.expect(t1 >= 0.0 && t2 > t1, "mode amplitude never traversed the fit window");
        if (t1 >= 0.0 && t2 > t1) {
            const double measured = std::log(a2 / a1) / (t2 - t1);
            const double rel = std::fabs(measured - sigma) / sigma;
            c.expect(rel <= 0.15, "growth rate " + fmt(measured) + " vs eigenvalue "
                     + fmt(sigma) + " (" + fmt(100.0 * rel) + "%)");
            c.note("rate " + fmt(measured) + " vs sigma " + fmt(sigma));
        }
    }

    return {9, "solver property suite", c.pass, c.detail.str()};
}

CriterionResult criterion10()
{
    Check c;
    auto fut_small = std::async(std::launch::async, [&] {
        ModelParams p = coarsening_params();
        p.L = 0.5;
        return run_pattern_sim(p, p.chi, 1e-3, 200.0, Advection::Upwind, 0.01, 100, 10000);
    });
    auto fut_large = std::async(std::launch::async, [&] {
        ModelParams p = coarsening_params();
        p.L = 10.0;
        // the second species rides advection velocities near 100, so the
        // donor-cell step needs dt ~ dx/100; snapshots every 10 time units
        return run_pattern_sim(p, p.chi, 1e-4, 300.0, Advection::Upwind, 0.01, 10000, 100000);
    });

    const SimOutcome small = fut_small.get();
    c.expect(small.traj.reason != StopReason::BlowUp, "L=0.5 run blew up");
    const int spikes_small = count_spikes(small.traj.snapshots.back().u, small.grid);
    c.expect(spikes_small == 1, "L=0.5: spike count " + std::to_string(spikes_small));
    c.expect(small.mass_ok, "L=0.5: mass bound violated");

    const SimOutcome large = fut_large.get();
    c.expect(large.traj.reason != StopReason::BlowUp, "L=10 run blew up");
    c.expect(large.mass_ok, "L=10: mass bound violated");
    std::vector<int> counts;
    for (const auto& snap : large.traj.snapshots) {
        counts.push_back(count_spikes(snap.u, large.grid));
    }
    std::ostringstream seq;
    seq << "L=10 counts";
    for (int v : counts) seq << " " << v;
    // single-snapshot readings flicker while spike heights breathe around
    // the prominence threshold; a median-of-3 keeps only sustained levels
    std::vector<int> level = counts;
    for (size_t i = 1; i + 1 < counts.size(); ++i) {
        std::array<int, 3> w{counts[i - 1], counts[i], counts[i + 1]};
        std::sort(w.begin(), w.end());
        level[i] = w[1];
    }
    // the initial data excites a dense transient; the pattern counts as
    // formed at the first snapshot after t = 0
    const size_t formed = 1;
    const int early_max = *std::max_element(level.begin() + formed,
                                            level.begin() + formed + 3);
    const int final_count = level.back();
    c.expect(final_count < early_max, "L=10: final spike count " + std::to_string(final_count)
             + " not below early maximum " + std::to_string(early_max) + " (" + seq.str() + ")");
    // non-increasing in the running-envelope sense; a one-spike excursion is
    // tolerated while two spikes ride through a merge or one re-emerges
    int running_min = level[formed];
    bool envelope_ok = true;
    for (size_t i = formed; i < level.size(); ++i) {
        if (level[i] > running_min + 1) envelope_ok = false;
        running_min = std::min(running_min, level[i]);
    }
    c.expect(envelope_ok, "L=10: spike count rose above the coarsening envelope ("
             + seq.str() + ")");
    if (c.pass) {
        c.note("L=0.5 single spike; " + seq.str() + " -> " + std::to_string(final_count));
    }
    return {10, "spike formation and coarsening", c.pass, c.detail.str()};
}

using CriterionFn = CriterionResult (*)();

constexpr CriterionFn kCriteria[10] = {criterion1, criterion2, criterion3, criterion4,
                                       criterion5, criterion6, criterion7, criterion8,
                                       criterion9, criterion10};

} // namespace

std::vector<CriterionResult> run(const std::vector<int>& ids)
{
    std::vector<int> list = ids;
    if (list.empty()) {
        for (int i = 1; i <= 10; ++i) list.push_back(i);
    }
    std::vector<CriterionResult> results;
    for (int id : list) {
        if (id < 1 || id > 10) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r = kCriteria[id - 1]();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
    }
    return results;
}

bool run_all(std::ostream& out, const std::vector<int>& ids)
{
    const auto results = run(ids);
    bool all = true;
    for (const auto& r : results) {
        all = all && r.pass;
        out << (r.pass ? "[PASS]" : "[FAIL]") << " criterion " << r.id << ": " << r.name
            << " (" << static_cast<int>(r.seconds * 1000.0) << " ms)";
        if (!r.detail.empty()) out << " -- " << r.detail;
        out << "\n";
    }
    out << (all ? "selftest: all criteria passed\n" : "selftest: FAILURES present\n");
    return all;
}

} // namespace kslab::acceptance
