#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>

namespace vfpns {

enum class ExperimentKind {
    operator_verify,
    linear_spectrum,
    linear_decay,
    torus_run,
    box_run,
    lp_report,
};

std::string experiment_name(ExperimentKind kind);
ExperimentKind experiment_from_name(const std::string& name);

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// One JSON document drives every experiment.  Unknown fields are
/// rejected with the offending path.
struct Config {
    ExperimentKind experiment = ExperimentKind::operator_verify;
    int dim = 3;
    int n_per_axis = 16;
    double box_length = 6.283185307179586;
    int hermite_degree = 6;
    double mu = 1.0;
    double gamma = 1.4;
    double c0 = 1.0;
    double r0 = 1.0;  // cutoff radius in units of 2π/L
    std::array<double, 7> tau{0.05, 0.05, 0.005, 0.1, 0.1, 0.05, 0.05};
    double dt = 0.01;
    double t_end = 50.0;
    double epsilon = 1e-2;
    long long seed = 1;
    int sample_every = 10;
    std::array<double, 2> fit_window{5.0, 50.0};
    std::map<std::string, double> tolerances;
    std::string output_dir = "out";

    double r0_abs() const { return r0 * 2.0 * 3.14159265358979323846 / box_length; }
    double tolerance(const std::string& name, double fallback) const;
    void validate() const;
};

Config default_config(ExperimentKind kind);

/// Parse a JSON document (text) against the schema; unknown fields and
/// type mismatches raise ConfigError with the field path.
Config parse_config(const std::string& json_text);

/// Full resolved configuration as a JSON document with stable key order.
std::string config_to_json(const Config& config);

}  // namespace vfpns
