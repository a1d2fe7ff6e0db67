#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "kslab/acceptance.hpp"
#include "kslab/experiments.hpp"

namespace {

struct FlagSet {
    std::optional<std::string> config;
    std::optional<double> d1, d2, chi, xi, mu1, mu2, a1, a2, lambda, L;
    std::optional<double> dt, t_end, steady_tol, dx, amplitude, wavenumber, blowup_ceiling;
    std::optional<int> snapshot_every, series_every, kmax, jobs;
    std::optional<std::string> scheme, advection, output_dir, input_dir, sweep_param, values;
    bool plots = false;
    bool sim = false;
};

void add_common_options(CLI::App* cmd, FlagSet& f)
{
    cmd->add_option("--config", f.config, "flat key = value configuration file");
    cmd->add_option("--d1", f.d1, "diffusion rate of u");
    cmd->add_option("--d2", f.d2, "diffusion rate of v");
    cmd->add_option("--chi", f.chi, "chemotaxis rate of u");
    cmd->add_option("--xi", f.xi, "chemotaxis rate of v");
    cmd->add_option("--mu1", f.mu1, "growth rate of u");
    cmd->add_option("--mu2", f.mu2, "growth rate of v");
    cmd->add_option("--a1", f.a1, "competition strength of v on u");
    cmd->add_option("--a2", f.a2, "competition strength of u on v");
    cmd->add_option("--lambda", f.lambda, "chemical decay rate");
    cmd->add_option("--L", f.L, "interval length");
    cmd->add_option("--dt", f.dt, "time step");
    cmd->add_option("--t-end", f.t_end, "final time");
    cmd->add_option("--dx", f.dx, "cell width");
    cmd->add_option("--scheme", f.scheme, "explicit | semi_implicit");
    cmd->add_option("--advection", f.advection, "central | upwind");
    cmd->add_option("--snapshot-every", f.snapshot_every, "steps between profile snapshots");
    cmd->add_option("--series-every", f.series_every, "steps between time-series samples");
    cmd->add_option("--steady-tol", f.steady_tol, "steady-state rate tolerance");
    cmd->add_option("--blowup-ceiling", f.blowup_ceiling, "field magnitude treated as blow-up");
    cmd->add_option("--amplitude", f.amplitude, "initial perturbation amplitude");
    cmd->add_option("--wavenumber", f.wavenumber, "initial perturbation wavenumber");
    cmd->add_option("--kmax", f.kmax, "mode truncation bound");
    cmd->add_option("--jobs", f.jobs, "sweep worker count (0 = all processors)");
    cmd->add_option("-o,--output-dir", f.output_dir, "output directory");
    cmd->add_flag("--plots", f.plots, "emit SVG plots alongside CSV output");
}

int resolve_and_run(kslab::Command command, const FlagSet& f,
                    const std::vector<int>& criteria)
{
    kslab::ExperimentSpec spec;
    try {
        if (f.config) kslab::apply_config_file(*f.config, spec);
        spec.command = command;   // the subcommand outranks a config-file `command` key
        if (const char* env = std::getenv("KSLAB_OUTPUT_DIR")) spec.output_dir = env;

        auto setp = [&spec](const std::optional<double>& v, double& target) {
            if (v) target = *v;
        };
        setp(f.d1, spec.params.d1);
        setp(f.d2, spec.params.d2);
        setp(f.chi, spec.params.chi);
        setp(f.xi, spec.params.xi);
        setp(f.mu1, spec.params.mu1);
        setp(f.mu2, spec.params.mu2);
        setp(f.a1, spec.params.a1);
        setp(f.a2, spec.params.a2);
        setp(f.lambda, spec.params.lambda);
        setp(f.L, spec.params.L);
        setp(f.dt, spec.solver.dt);
        setp(f.t_end, spec.solver.t_end);
        setp(f.steady_tol, spec.solver.steady_tol);
        setp(f.blowup_ceiling, spec.solver.blowup_ceiling);
        setp(f.dx, spec.dx);
        setp(f.amplitude, spec.amplitude);
        setp(f.wavenumber, spec.wavenumber);
        if (f.snapshot_every) spec.solver.snapshot_every = *f.snapshot_every;
        if (f.series_every) spec.solver.series_every = *f.series_every;
        if (f.kmax) spec.kmax = *f.kmax;
        if (f.jobs) spec.jobs = *f.jobs;
        if (f.scheme) kslab::apply_key_value("scheme", *f.scheme, spec);
        if (f.advection) kslab::apply_key_value("advection", *f.advection, spec);
        if (f.output_dir) spec.output_dir = *f.output_dir;
        if (f.input_dir) spec.input_dir = *f.input_dir;
        if (f.sweep_param) spec.sweep_param = *f.sweep_param;
        if (f.values) kslab::apply_key_value("sweep_values", *f.values, spec);
        if (f.plots) spec.emit_plots = true;
        if (f.sim) spec.sweep_simulate = true;
    } catch (const kslab::ConfigError& e) {
        std::cerr << "config error (" << e.key << "): " << e.what() << "\n";
        return kslab::kExitConfigError;
    }

    if (command == kslab::Command::Selftest) {
        return kslab::acceptance::run_all(std::cout, criteria)
            ? kslab::kExitOk : kslab::kExitSelftestMismatch;
    }
    return kslab::run_experiment(spec);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"kslab -- stability, bifurcation and pattern-formation toolkit for a "
                 "two-species chemotaxis-competition system on an interval"};
    app.require_subcommand(1);

    struct Sub {
        kslab::Command command;
        FlagSet flags;
        std::vector<int> criteria;
    };
    std::vector<std::pair<CLI::App*, Sub>> subs;
    subs.reserve(6);   // options bind pointers into Sub; no reallocation allowed

    auto make = [&](const char* name, const char* help, kslab::Command cmd) -> Sub& {
        CLI::App* s = app.add_subcommand(name, help);
        subs.emplace_back(s, Sub{cmd, {}, {}});
        Sub& sub = subs.back().second;
        add_common_options(s, sub.flags);
        return sub;
    };

    make("table", "dispersion thresholds per mode plus the critical chemotaxis rate",
         kslab::Command::Table);
    make("bifurcation", "per-mode branch data: chi_k, eigenmode, pitchfork constant",
         kslab::Command::Bifurcation);
    make("simulate", "time-step the system and export trajectory CSVs",
         kslab::Command::Simulate);
    Sub& sweep = make("sweep", "repeat the critical-chi analysis along a parameter axis",
                      kslab::Command::Sweep);
    subs[3].first->add_option("--param", sweep.flags.sweep_param, "parameter to sweep")
        ->required();
    subs[3].first->add_option("--values", sweep.flags.values, "comma-separated value list")
        ->required();
    subs[3].first->add_flag("--sim", sweep.flags.sim, "also simulate at each sweep value");
    Sub& analyze = make("analyze", "summarize trajectory CSVs (modes, period, spikes)",
                        kslab::Command::Analyze);
    subs[4].first->add_option("--input-dir", analyze.flags.input_dir,
                              "directory holding timeseries.csv and profile_*.csv");
    Sub& selftest = make("selftest", "run the built-in verification suite",
                         kslab::Command::Selftest);
    subs[5].first->add_option("--criteria", selftest.criteria,
                              "subset of criteria to run (default: all)");

    CLI11_PARSE(app, argc, argv);

    for (auto& [cli_sub, sub] : subs) {
        if (cli_sub->parsed()) {
            return resolve_and_run(sub.command, sub.flags, sub.criteria);
        }
    }
    return kslab::kExitConfigError;
}
