#ifndef KSLAB_EXPERIMENTS_HPP
#define KSLAB_EXPERIMENTS_HPP

#include <string>

#include "kslab/config.hpp"

namespace kslab {

/// Exit statuses shared by the CLI and run_experiment.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalFailure = 3;
inline constexpr int kExitSelftestMismatch = 4;

/// Executes the spec's command, writing CSV output (and optional SVG plots)
/// under spec.output_dir. Failures produce a machine-readable error record
/// (error.json) in the output directory and a nonzero exit status.
int run_experiment(const ExperimentSpec& spec);

/// Observables extracted from one finished simulation.
struct SimObservables {
    std::string stop_reason;
    int dominant_mode = 0;
    std::string period_verdict;
    double period = 0.0;
    int spike_count = 0;
    bool mass_bound_ok = true;
};

/// Runs one simulation per the spec (no file output) and summarizes it.
/// Throws on invalid configuration; blow-up is reported via stop_reason.
SimObservables simulate_observables(const ExperimentSpec& spec);

} // namespace kslab

#endif
