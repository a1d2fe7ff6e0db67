#include "kslab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kslab/acceptance.hpp"
#include "kslab/bifurcation.hpp"
#include "kslab/diagnostics.hpp"
#include "kslab/linear_analysis.hpp"
#include "kslab/plot.hpp"

namespace fs = std::filesystem;

namespace kslab {

namespace {

void write_error_record(const ExperimentSpec& spec, int code, const std::string& stage,
                        const std::string& message, const std::string& key = {})
{
    std::error_code ec;
    fs::create_directories(spec.output_dir, ec);
    nlohmann::json j;
    j["exit_code"] = code;
    j["stage"] = stage;
    j["error"] = message;
    if (!key.empty()) j["key"] = key;
    std::ofstream out(fs::path(spec.output_dir) / "error.json");
    out << j.dump(2) << "\n";
}

Grid grid_for(const ExperimentSpec& spec)
{
    const int n = std::max(8, static_cast<int>(std::llround(spec.params.L / spec.dx)));
    return Grid::uniform(spec.params.L, n);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        if (first) {
            while (std::getline(ss, cell, ',')) t.header.push_back(cell);
            first = false;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

int run_table(const ExperimentSpec& spec)
{
    const auto violations = validate_analysis(spec.params);
    if (!violations.empty()) {
        write_error_record(spec, kExitConfigError, "table", violations.front().message,
                           violations.front().field);
        std::cerr << "error: " << violations.front().message << "\n";
        return kExitConfigError;
    }
    const Equilibrium eq = compute_equilibrium(spec.params);
    fs::create_directories(spec.output_dir);
    const fs::path out_path = fs::path(spec.output_dir) / "table.csv";
    std::ofstream out(out_path);
    out << "k,chi_tilde,chi_hat\n";
    for (int k = 1; k <= spec.kmax; ++k) {
        const auto mode = ModeWavenumber::of(k, spec.params.L);
        out << k << "," << format_value(chi_tilde(mode, spec.params, eq)) << ","
            << format_value(chi_hat(mode, spec.params, eq)) << "\n";
    }
    const StabilityReport rep = critical_chi(spec.params, eq, spec.kmax);
    out << "# chi0=" << format_value(rep.chi0) << ",argmin_k=" << rep.argmin_k
        << ",loss_type=" << to_string(rep.loss_type) << "\n";
    std::cout << "wrote " << out_path.string() << "  (chi0=" << format_value(rep.chi0)
              << " at k=" << rep.argmin_k << ", " << to_string(rep.loss_type) << ")\n";
    return kExitOk;
}

int run_bifurcation_cmd(const ExperimentSpec& spec)
{
    const auto violations = validate_analysis(spec.params);
    if (!violations.empty()) {
        write_error_record(spec, kExitConfigError, "bifurcation", violations.front().message,
                           violations.front().field);
        std::cerr << "error: " << violations.front().message << "\n";
        return kExitConfigError;
    }
    const Equilibrium eq = compute_equilibrium(spec.params);
    fs::create_directories(spec.output_dir);
    const fs::path out_path = fs::path(spec.output_dir) / "bifurcation.csv";
    std::ofstream out(out_path);
    out << "k,chi_k,P_k,Q_k,K2,lambda_star,K2_asymptotic_sign,predicted_stability,status\n";
    bool any_singular = false;
    for (int k = 1; k <= spec.kmax; ++k) {
        const auto mode = ModeWavenumber::of(k, spec.params.L);
        const BranchInfo b = compute_K2(mode, spec.params, eq, spec.kmax);
        any_singular = any_singular || b.status == BranchStatus::NearSingular;
        out << b.k << "," << format_value(b.chi_k) << "," << format_value(b.P) << ","
            << format_value(b.Q) << "," << format_value(b.K2) << ","
            << format_value(b.lambda_star) << "," << b.K2_asymptotic_sign << ","
            << to_string(b.predicted_stability) << "," << to_string(b.status) << "\n";
    }
    std::cout << "wrote " << out_path.string() << "\n";
    return kExitOk;
}

void write_profile(const fs::path& path, const Grid& g, const State& s)
{
    std::ofstream out(path);
    out << "x,u,v,w\n";
    for (int i = 0; i < g.n; ++i) {
        out << format_value(g.x[i]) << "," << format_value(s.u[i]) << ","
            << format_value(s.v[i]) << "," << format_value(s.w[i]) << "\n";
    }
}

void write_series(const fs::path& path, const Trajectory& traj)
{
    std::ofstream out(path);
    out << "t,u_at_x0,u_at_midpoint,mass_u,mass_v,Linf_u\n";
    for (const auto& s : traj.series) {
        out << format_value(s.t) << "," << format_value(s.u_at_x0) << ","
            << format_value(s.u_at_mid) << "," << format_value(s.mass_u) << ","
            << format_value(s.mass_v) << "," << format_value(s.linf_u) << "\n";
    }
}

struct AnalysisRow {
    int dominant_mode = 0;
    std::string period;   // numeric string, "Steady" or "NotPeriodic"
    int spike_count = 0;
    bool mass_bound_ok = true;
};

void write_summary(const fs::path& path, const AnalysisRow& row)
{
    std::ofstream out(path);
    out << "dominant_mode,period,spike_count,mass_bound_ok\n";
    out << row.dominant_mode << "," << row.period << "," << row.spike_count << ","
        << (row.mass_bound_ok ? 1 : 0) << "\n";
}

AnalysisRow analyze_trajectory(const Grid& g, const std::vector<double>& ts,
                               const std::vector<double>& u_at_x0,
                               const std::vector<double>& mass_u,
                               const std::vector<double>& mass_v,
                               std::span<const double> final_u, const ModelParams& p)
{
    AnalysisRow row;
    const int kcut = std::min(32, g.n / 2 - 1);
    row.dominant_mode = dominant_mode(mode_amplitudes(final_u, g, kcut)).k;
    row.spike_count = count_spikes(final_u, g);
    if (ts.size() >= 8) {
        const PeriodEstimate pe = detect_period(ts, u_at_x0);
        row.period = pe.verdict == PeriodVerdict::Periodic ? format_value(pe.period)
                                                           : to_string(pe.verdict);
    } else {
        row.period = to_string(PeriodVerdict::NotPeriodic);
    }
    // Lemma-style mass inequality for both species
    bool ok = true;
    for (int species = 0; species < 2; ++species) {
        const auto& m = species == 0 ? mass_u : mass_v;
        const double mu = species == 0 ? p.mu1 : p.mu2;
        for (size_t i = 0; i < m.size(); ++i) {
            const double bound = std::exp(-mu * (ts[i] - ts[0])) * m[0] + p.L;
            if (bound - m[i] < -1e-6) { ok = false; break; }
        }
    }
    row.mass_bound_ok = ok;
    return row;
}

int run_simulate(const ExperimentSpec& spec)
{
    const auto violations = validate_analysis(spec.params);
    if (!violations.empty()) {
        write_error_record(spec, kExitConfigError, "simulate", violations.front().message,
                           violations.front().field);
        std::cerr << "error: " << violations.front().message << "\n";
        return kExitConfigError;
    }
    const Equilibrium eq = compute_equilibrium(spec.params);
    const Grid g = grid_for(spec);
    Trajectory traj;
    try {
        const State init = initial_state(g, eq, spec.amplitude, spec.wavenumber);
        traj = run(init, g, spec.params, spec.solver);
    } catch (const std::invalid_argument& e) {
        write_error_record(spec, kExitConfigError, "simulate", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    fs::create_directories(spec.output_dir);
    const fs::path dir(spec.output_dir);
    char name[64];
    for (size_t i = 0; i < traj.snapshots.size(); ++i) {
        std::snprintf(name, sizeof(name), "profile_%06zu.csv", i);
        write_profile(dir / name, g, traj.snapshots[i]);
    }
    write_series(dir / "timeseries.csv", traj);
    save_config((dir / "config_used.cfg").string(), spec);

    std::vector<double> ts, u0, mu_series, mv_series;
    for (const auto& s : traj.series) {
        ts.push_back(s.t);
        u0.push_back(s.u_at_x0);
        mu_series.push_back(s.mass_u);
        mv_series.push_back(s.mass_v);
    }
    const State& last = traj.snapshots.back();
    const AnalysisRow row = analyze_trajectory(g, ts, u0, mu_series, mv_series, last.u, spec.params);
    write_summary(dir / "summary.csv", row);

    if (spec.emit_plots) {
        write_svg_plot((dir / "profile_final.svg").string(), "final profile", "x", "density",
                       {{"u", g.x, last.u}, {"v", g.x, last.v}, {"w", g.x, last.w}});
        write_svg_plot((dir / "timeseries.svg").string(), "u at x = 0", "t", "u",
                       {{"u(0,t)", ts, u0}});
    }

    std::cout << "simulate: " << to_string(traj.reason) << " at t="
              << format_value(traj.snapshots.back().t) << ", dominant_mode="
              << row.dominant_mode << ", period=" << row.period << ", spikes="
              << row.spike_count << "\n";
    if (traj.negativity_events > 0) {
        std::cout << "note: " << traj.negativity_events
                  << " negativity warnings (first at t="
                  << format_value(traj.first_negativity_time)
                  << "); consider advection=upwind or finer dx\n";
    }
    if (traj.reason == StopReason::BlowUp) {
        write_error_record(spec, kExitNumericalFailure, "simulate",
                           "solution blew up at t=" + format_value(traj.snapshots.back().t));
        return kExitNumericalFailure;
    }
    return kExitOk;
}

struct SweepRow {
    double value = 0.0;
    StabilityReport report;
    bool simulated = false;
    SimObservables sim;
    std::string error;
};

int run_sweep(const ExperimentSpec& spec)
{
    if (spec.sweep_param.empty() || spec.sweep_values.empty()) {
        write_error_record(spec, kExitConfigError, "sweep",
                           "sweep needs sweep_param and a nonempty sweep_values list",
                           "sweep_param");
        std::cerr << "error: sweep needs sweep_param and sweep_values\n";
        return kExitConfigError;
    }
    try {
        get_numeric_field(spec, spec.sweep_param);
    } catch (const ConfigError& e) {
        write_error_record(spec, kExitConfigError, "sweep", e.what(), e.key);
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }

    const size_t nvals = spec.sweep_values.size();
    std::vector<SweepRow> rows(nvals);
    std::atomic<size_t> next{0};
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned njobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs) : hw;

    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < nvals; i = next.fetch_add(1)) {
            SweepRow& row = rows[i];
            row.value = spec.sweep_values[i];
            try {
                ExperimentSpec local = spec;
                set_numeric_field(local, spec.sweep_param, row.value);
                const auto bad = validate_analysis(local.params);
                if (!bad.empty()) throw ConfigError(bad.front().field, bad.front().message);
                const Equilibrium eq = compute_equilibrium(local.params);
                row.report = critical_chi(local.params, eq, local.kmax);
                if (spec.sweep_simulate) {
                    row.sim = simulate_observables(local);
                    row.simulated = true;
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < std::min<size_t>(njobs, nvals); ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    fs::create_directories(spec.output_dir);
    const fs::path out_path = fs::path(spec.output_dir) / "sweep.csv";
    std::ofstream out(out_path);
    out << spec.sweep_param << ",chi0,argmin_k,loss_type";
    if (spec.sweep_simulate) out << ",stop_reason,dominant_mode,period,spike_count,mass_bound_ok";
    out << "\n";
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            write_error_record(spec, kExitNumericalFailure, "sweep", row.error);
            std::cerr << "error at " << spec.sweep_param << "=" << format_value(row.value)
                      << ": " << row.error << "\n";
            return kExitNumericalFailure;
        }
        out << format_value(row.value) << "," << format_value(row.report.chi0) << ","
            << row.report.argmin_k << "," << to_string(row.report.loss_type);
        if (spec.sweep_simulate) {
            out << "," << row.sim.stop_reason << "," << row.sim.dominant_mode << ","
                << row.sim.period_verdict << "," << row.sim.spike_count << ","
                << (row.sim.mass_bound_ok ? 1 : 0);
        }
        out << "\n";
    }
    std::cout << "wrote " << out_path.string() << " (" << nvals << " rows)\n";
    return kExitOk;
}

int run_analyze(const ExperimentSpec& spec)
{
    const std::string dir = spec.input_dir.empty() ? spec.output_dir : spec.input_dir;
    try {
        const CsvTable series = read_csv((fs::path(dir) / "timeseries.csv").string());
        std::vector<std::string> profiles;
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string n = entry.path().filename().string();
            if (n.starts_with("profile_") && n.ends_with(".csv")) profiles.push_back(entry.path().string());
        }
        if (profiles.empty()) throw std::runtime_error("no profile_*.csv found in '" + dir + "'");
        std::sort(profiles.begin(), profiles.end());
        const CsvTable prof = read_csv(profiles.back());

        const int n = static_cast<int>(prof.rows.size());
        if (n < 8) throw std::runtime_error("profile too short");
        const double dx = prof.rows[1][0] - prof.rows[0][0];
        const Grid g = Grid::uniform(dx * n, n);
        std::vector<double> u(n);
        for (int i = 0; i < n; ++i) u[i] = prof.rows[i][1];

        std::vector<double> ts, u0, mu_series, mv_series;
        for (const auto& r : series.rows) {
            ts.push_back(r[0]);
            u0.push_back(r[1]);
            mu_series.push_back(r[3]);
            mv_series.push_back(r[4]);
        }
        const AnalysisRow row = analyze_trajectory(g, ts, u0, mu_series, mv_series, u, spec.params);
        fs::create_directories(spec.output_dir);
        const fs::path out_path = fs::path(spec.output_dir) / "summary.csv";
        write_summary(out_path, row);
        std::cout << "wrote " << out_path.string() << ": dominant_mode=" << row.dominant_mode
                  << ", period=" << row.period << ", spikes=" << row.spike_count
                  << ", mass_bound_ok=" << (row.mass_bound_ok ? 1 : 0) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        write_error_record(spec, kExitConfigError, "analyze", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace

SimObservables simulate_observables(const ExperimentSpec& spec)
{
    const Equilibrium eq = compute_equilibrium(spec.params);
    const Grid g = grid_for(spec);
    const State init = initial_state(g, eq, spec.amplitude, spec.wavenumber);
    const Trajectory traj = run(init, g, spec.params, spec.solver);

    SimObservables obs;
    obs.stop_reason = to_string(traj.reason);
    const State& last = traj.snapshots.back();
    const int kcut = std::min(32, g.n / 2 - 1);
    obs.dominant_mode = dominant_mode(mode_amplitudes(last.u, g, kcut)).k;
    obs.spike_count = count_spikes(last.u, g);
    std::vector<double> ts, u0;
    for (const auto& s : traj.series) {
        ts.push_back(s.t);
        u0.push_back(s.u_at_x0);
    }
    if (ts.size() >= 8) {
        const PeriodEstimate pe = detect_period(ts, u0);
        obs.period_verdict = to_string(pe.verdict);
        obs.period = pe.verdict == PeriodVerdict::Periodic ? pe.period : 0.0;
    } else {
        obs.period_verdict = to_string(PeriodVerdict::NotPeriodic);
    }
    const MassBoundReport mu_rep = check_mass_bound(traj.series, traj.mass_u0, spec.params.mu1,
                                                    spec.params.L, true);
    const MassBoundReport mv_rep = check_mass_bound(traj.series, traj.mass_v0, spec.params.mu2,
                                                    spec.params.L, false);
    obs.mass_bound_ok = mu_rep.ok && mv_rep.ok;
    return obs;
}

int run_experiment(const ExperimentSpec& spec)
{
    switch (spec.command) {
        case Command::Table: return run_table(spec);
        case Command::Bifurcation: return run_bifurcation_cmd(spec);
        case Command::Simulate: return run_simulate(spec);
        case Command::Sweep: return run_sweep(spec);
        case Command::Analyze: return run_analyze(spec);
        case Command::Selftest:
            return acceptance::run_all(std::cout) ? kExitOk : kExitSelftestMismatch;
    }
    return kExitConfigError;
}

} // namespace kslab
