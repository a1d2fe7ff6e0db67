#ifndef KSLAB_CONFIG_HPP
#define KSLAB_CONFIG_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "kslab/model.hpp"
#include "kslab/solver.hpp"

namespace kslab {

enum class Command { Table, Bifurcation, Simulate, Sweep, Analyze, Selftest };

const char* to_string(Command c);

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string key_, const std::string& what_)
        : std::runtime_error(what_), key(std::move(key_)) {}
};

/// Fully resolved experiment description. File values are overridden by CLI
/// flags; whatever remains takes the defaults below (the small-interval
/// parameter set with dx = dt = 0.01).
struct ExperimentSpec {
    ModelParams params;
    SolverConfig solver;
    Command command = Command::Table;
    double dx = 0.01;
    double amplitude = 0.01;    // initial perturbation amplitude
    double wavenumber = 2.4;    // initial perturbation wavenumber (of cos(w pi x))
    int kmax = 200;
    std::string sweep_param;    // names a ModelParams/SolverConfig/mesh field
    std::vector<double> sweep_values;
    bool sweep_simulate = false;
    std::string output_dir = "out";
    std::string input_dir;      // analyze: directory holding trajectory CSVs
    bool emit_plots = false;
    int jobs = 0;               // 0 = number of available processors

    bool operator==(const ExperimentSpec&) const = default;
};

/// Parses a flat key = value configuration file into `spec`. Unknown keys,
/// malformed values and constraint violations throw ConfigError naming the
/// offending key.
void apply_config_file(const std::string& path, ExperimentSpec& spec);

/// Applies a single key/value pair (shared by the file loader and CLI
/// overrides). Throws ConfigError.
void apply_key_value(const std::string& key, const std::string& value, ExperimentSpec& spec);

/// Serializes the spec as a flat key = value file that apply_config_file
/// round-trips exactly.
std::string config_to_string(const ExperimentSpec& spec);
void save_config(const std::string& path, const ExperimentSpec& spec);

/// Numeric formatting used for every CSV/config value: 10 significant digits.
std::string format_value(double v);

/// Looks up a sweepable numeric field by config key; throws ConfigError for
/// unknown names.
double get_numeric_field(const ExperimentSpec& spec, const std::string& key);
void set_numeric_field(ExperimentSpec& spec, const std::string& key, double value);

} // namespace kslab

#endif
