#include "kslab/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kslab {

const char* to_string(Command c)
{
    switch (c) {
        case Command::Table: return "table";
        case Command::Bifurcation: return "bifurcation";
        case Command::Simulate: return "simulate";
        case Command::Sweep: return "sweep";
        case Command::Analyze: return "analyze";
        case Command::Selftest: return "selftest";
    }
    return "?";
}

std::string format_value(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s)
{
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& value)
{
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "value for '" + key + "' is not a number: '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value)
{
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "value for '" + key + "' is not an integer: '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError(key, "value for '" + key + "' is not a boolean: '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value)
{
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ConfigError(key, "'" + key + "' needs a nonempty value list");
    return out;
}

} // namespace

void apply_key_value(const std::string& key, const std::string& value, ExperimentSpec& spec)
{
    ModelParams& p = spec.params;
    SolverConfig& s = spec.solver;
    if (key == "d1") p.d1 = parse_double(key, value);
    else if (key == "d2") p.d2 = parse_double(key, value);
    else if (key == "chi") p.chi = parse_double(key, value);
    else if (key == "xi") p.xi = parse_double(key, value);
    else if (key == "mu1") p.mu1 = parse_double(key, value);
    else if (key == "mu2") p.mu2 = parse_double(key, value);
    else if (key == "a1") p.a1 = parse_double(key, value);
    else if (key == "a2") p.a2 = parse_double(key, value);
    else if (key == "lambda") p.lambda = parse_double(key, value);
    else if (key == "L") p.L = parse_double(key, value);
    else if (key == "dt") s.dt = parse_double(key, value);
    else if (key == "t_end") s.t_end = parse_double(key, value);
    else if (key == "steady_tol") s.steady_tol = parse_double(key, value);
    else if (key == "snapshot_every") s.snapshot_every = parse_int(key, value);
    else if (key == "series_every") s.series_every = parse_int(key, value);
    else if (key == "blowup_ceiling") s.blowup_ceiling = parse_double(key, value);
    else if (key == "scheme") {
        if (value == "explicit") s.scheme = Scheme::Explicit;
        else if (value == "semi_implicit") s.scheme = Scheme::SemiImplicit;
        else throw ConfigError(key, "scheme must be 'explicit' or 'semi_implicit'");
    } else if (key == "advection") {
        if (value == "central") s.advection = Advection::Central;
        else if (value == "upwind") s.advection = Advection::Upwind;
        else throw ConfigError(key, "advection must be 'central' or 'upwind'");
    }
    else if (key == "dx") spec.dx = parse_double(key, value);
    else if (key == "amplitude") spec.amplitude = parse_double(key, value);
    else if (key == "wavenumber") spec.wavenumber = parse_double(key, value);
    else if (key == "kmax") spec.kmax = parse_int(key, value);
    else if (key == "sweep_param") spec.sweep_param = value;
    else if (key == "sweep_values") spec.sweep_values = parse_list(key, value);
    else if (key == "sim") spec.sweep_simulate = parse_bool(key, value);
    else if (key == "output_dir") spec.output_dir = value;
    else if (key == "input_dir") spec.input_dir = value;
    else if (key == "plots") spec.emit_plots = parse_bool(key, value);
    else if (key == "jobs") spec.jobs = parse_int(key, value);
    else if (key == "command") {
        if (value == "table") spec.command = Command::Table;
        else if (value == "bifurcation") spec.command = Command::Bifurcation;
        else if (value == "simulate") spec.command = Command::Simulate;
        else if (value == "sweep") spec.command = Command::Sweep;
        else if (value == "analyze") spec.command = Command::Analyze;
        else if (value == "selftest") spec.command = Command::Selftest;
        else throw ConfigError(key, "unknown command '" + value + "'");
    }
    else throw ConfigError(key, "unknown configuration key '" + key + "'");
}

void apply_config_file(const std::string& path, ExperimentSpec& spec)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config", "line " + std::to_string(lineno)
                              + " is not of the form key = value");
        }
        apply_key_value(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)), spec);
    }
}

std::string config_to_string(const ExperimentSpec& spec)
{
    std::ostringstream out;
    const ModelParams& p = spec.params;
    const SolverConfig& s = spec.solver;
    out << "command = " << to_string(spec.command) << "\n";
    out << "d1 = " << format_value(p.d1) << "\n";
    out << "d2 = " << format_value(p.d2) << "\n";
    out << "chi = " << format_value(p.chi) << "\n";
    out << "xi = " << format_value(p.xi) << "\n";
    out << "mu1 = " << format_value(p.mu1) << "\n";
    out << "mu2 = " << format_value(p.mu2) << "\n";
    out << "a1 = " << format_value(p.a1) << "\n";
    out << "a2 = " << format_value(p.a2) << "\n";
    out << "lambda = " << format_value(p.lambda) << "\n";
    out << "L = " << format_value(p.L) << "\n";
    out << "dt = " << format_value(s.dt) << "\n";
    out << "t_end = " << format_value(s.t_end) << "\n";
    out << "scheme = " << (s.scheme == Scheme::Explicit ? "explicit" : "semi_implicit") << "\n";
    out << "advection = " << (s.advection == Advection::Upwind ? "upwind" : "central") << "\n";
    out << "snapshot_every = " << s.snapshot_every << "\n";
    out << "series_every = " << s.series_every << "\n";
    out << "steady_tol = " << format_value(s.steady_tol) << "\n";
    out << "blowup_ceiling = " << format_value(s.blowup_ceiling) << "\n";
    out << "dx = " << format_value(spec.dx) << "\n";
    out << "amplitude = " << format_value(spec.amplitude) << "\n";
    out << "wavenumber = " << format_value(spec.wavenumber) << "\n";
    out << "kmax = " << spec.kmax << "\n";
    if (!spec.sweep_param.empty()) {
        out << "sweep_param = " << spec.sweep_param << "\n";
        out << "sweep_values = ";
        for (size_t i = 0; i < spec.sweep_values.size(); ++i) {
            if (i) out << ",";
            out << format_value(spec.sweep_values[i]);
        }
        out << "\n";
    }
    out << "sim = " << (spec.sweep_simulate ? 1 : 0) << "\n";
    out << "output_dir = " << spec.output_dir << "\n";
    if (!spec.input_dir.empty()) out << "input_dir = " << spec.input_dir << "\n";
    out << "plots = " << (spec.emit_plots ? 1 : 0) << "\n";
    out << "jobs = " << spec.jobs << "\n";
    return out.str();
}

void save_config(const std::string& path, const ExperimentSpec& spec)
{
    std::ofstream out(path);
    out << config_to_string(spec);
}

double get_numeric_field(const ExperimentSpec& spec, const std::string& key)
{
    const ModelParams& p = spec.params;
    const SolverConfig& s = spec.solver;
    if (key == "d1") return p.d1;
    if (key == "d2") return p.d2;
    if (key == "chi") return p.chi;
    if (key == "xi") return p.xi;
    if (key == "mu1") return p.mu1;
    if (key == "mu2") return p.mu2;
    if (key == "a1") return p.a1;
    if (key == "a2") return p.a2;
    if (key == "lambda") return p.lambda;
    if (key == "L") return p.L;
    if (key == "dt") return s.dt;
    if (key == "t_end") return s.t_end;
    if (key == "steady_tol") return s.steady_tol;
    if (key == "dx") return spec.dx;
    if (key == "amplitude") return spec.amplitude;
    if (key == "wavenumber") return spec.wavenumber;
    throw ConfigError(key, "'" + key + "' is not a sweepable numeric field");
}

void set_numeric_field(ExperimentSpec& spec, const std::string& key, double value)
{
    ModelParams& p = spec.params;
    SolverConfig& s = spec.solver;
    if (key == "d1") p.d1 = value;
    else if (key == "d2") p.d2 = value;
    else if (key == "chi") p.chi = value;
    else if (key == "xi") p.xi = value;
    else if (key == "mu1") p.mu1 = value;
    else if (key == "mu2") p.mu2 = value;
    else if (key == "a1") p.a1 = value;
    else if (key == "a2") p.a2 = value;
    else if (key == "lambda") p.lambda = value;
    else if (key == "L") p.L = value;
    else if (key == "dt") s.dt = value;
    else if (key == "t_end") s.t_end = value;
    else if (key == "steady_tol") s.steady_tol = value;
    else if (key == "dx") spec.dx = value;
    else if (key == "amplitude") spec.amplitude = value;
    else if (key == "wavenumber") spec.wavenumber = value;
    else throw ConfigError(key, "'" + key + "' is not a sweepable numeric field");
}

} // namespace kslab
