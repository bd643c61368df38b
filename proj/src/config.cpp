#include "vfpns/config.hpp"

#include <json.hpp>

namespace vfpns {

using ordered_json = nlohmann::ordered_json;

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::operator_verify: return "operator-verify";
        case ExperimentKind::linear_spectrum: return "linear-spectrum";
        case ExperimentKind::linear_decay: return "linear-decay";
        case ExperimentKind::torus_run: return "torus-run";
        case ExperimentKind::box_run: return "box-run";
        case ExperimentKind::lp_report: return "lp-report";
    }
    throw std::logic_error("experiment_name: unknown kind");
}

ExperimentKind experiment_from_name(const std::string& name) {
    for (auto kind : {ExperimentKind::operator_verify, ExperimentKind::linear_spectrum,
                      ExperimentKind::linear_decay, ExperimentKind::torus_run,
                      ExperimentKind::box_run, ExperimentKind::lp_report}) {
        if (experiment_name(kind) == name) return kind;
    }
    throw ConfigError("experiment: unknown value '" + name + "'");
}

double Config::tolerance(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

void Config::validate() const {
    if (dim < 1 || dim > 3) throw ConfigError("dim: must be 1, 2 or 3");
    if (n_per_axis < 8 || (n_per_axis & (n_per_axis - 1)) != 0)
        throw ConfigError("n_per_axis: must be a power of two >= 8");
    if (!(box_length > 0.0)) throw ConfigError("box_length: must be positive");
    if (hermite_degree < 2 || hermite_degree > 12)
        throw ConfigError("hermite_degree: must lie in [2, 12]");
    if (!(mu > 0.0)) throw ConfigError("mu: must be positive");
    if (!(gamma > 1.0)) throw ConfigError("gamma: must be > 1");
    if (!(c0 > 0.0)) throw ConfigError("c0: must be positive");
    if (!(r0 > 0.0)) throw ConfigError("r0: must be positive");
    for (double t : tau)
        if (!(t > 0.0 && t < 1.0)) throw ConfigError("tau: entries must lie in (0,1)");
    if (!(dt > 0.0)) throw ConfigError("dt: must be positive");
    if (!(t_end >= 0.0)) throw ConfigError("t_end: must be nonnegative");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
    if (sample_every < 1) throw ConfigError("sample_every: must be >= 1");
    if (!(fit_window[0] <= fit_window[1])) throw ConfigError("fit_window: must be ordered");
}

Config default_config(ExperimentKind kind) {
    Config c;
    c.experiment = kind;
    switch (kind) {
        case ExperimentKind::operator_verify:
            c.tolerances = {{"oracle_max_delta", 1e-10}};
            break;
        case ExperimentKind::linear_spectrum:
            c.hermite_degree = 6;
            c.tolerances = {{"gap_c_min", 0.0}, {"lambda_hat_min", 0.0}};
            break;
        case ExperimentKind::linear_decay:
            c.hermite_degree = 6;
            c.fit_window = {10.0, 1000.0};
            c.tolerances = {{"slope_m0", -0.75}, {"slope_m0_tol", 0.08},
                            {"slope_m1", -1.25}, {"slope_m1_tol", 0.10}};
            break;
        case ExperimentKind::torus_run:
            c.n_per_axis = 16;
            c.hermite_degree = 4;
            c.dt = 0.01;
            c.t_end = 50.0;
            c.sample_every = 10;
            c.fit_window = {5.0, 40.0};  // excludes the roundoff-limited tail
            c.tolerances = {{"r_squared_min", 0.99},
                            {"drift_per_time_max", 1e-8},
                            {"energy_step_tol", 1e-9}};
            break;
        case ExperimentKind::box_run:
            c.n_per_axis = 64;
            c.box_length = 64.0 * 2.0 * 3.14159265358979323846;
            c.hermite_degree = 2;
            c.dt = 0.1;
            c.t_end = 80.0;
            c.sample_every = 10;
            c.fit_window = {5.0, 80.0};
            c.tolerances = {{"slope_min", -0.95}, {"slope_max", -0.55}};
            break;
        case ExperimentKind::lp_report:
            c.n_per_axis = 32;
            c.box_length = 32.0 * 2.0 * 3.14159265358979323846;
            c.hermite_degree = 2;
            c.dt = 0.1;
            c.t_end = 40.0;
            c.sample_every = 25;  // snapshot every 2.5 time units
            c.fit_window = {5.0, 40.0};
            break;
    }
    return c;
}

namespace {

template <typename T>
T get_number(const ordered_json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError(key + ": expected a number");
    return j.get<T>();
}

}  // namespace

Config parse_config(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& err) {
        throw ConfigError(std::string("invalid JSON: ") + err.what());
    }
    if (!doc.is_object()) throw ConfigError("top level: expected an object");
    if (!doc.contains("experiment") || !doc["experiment"].is_string())
        throw ConfigError("experiment: required string field");

    Config c = default_config(experiment_from_name(doc["experiment"].get<std::string>()));

    for (const auto& [key, value] : doc.items()) {
        if (key == "experiment") {
            continue;
        } else if (key == "dim") {
            c.dim = get_number<int>(value, key);
        } else if (key == "n_per_axis") {
            c.n_per_axis = get_number<int>(value, key);
        } else if (key == "box_length") {
            c.box_length = get_number<double>(value, key);
        } else if (key == "hermite_degree") {
            c.hermite_degree = get_number<int>(value, key);
        } else if (key == "mu") {
            c.mu = get_number<double>(value, key);
        } else if (key == "gamma") {
            c.gamma = get_number<double>(value, key);
        } else if (key == "c0") {
            c.c0 = get_number<double>(value, key);
        } else if (key == "r0") {
            c.r0 = get_number<double>(value, key);
        } else if (key == "tau") {
            if (!value.is_array() || value.size() != 7)
                throw ConfigError("tau: expected an array of 7 numbers");
            for (int i = 0; i < 7; ++i)
                c.tau[i] = get_number<double>(value[i], "tau[" + std::to_string(i) + "]");
        } else if (key == "dt") {
            c.dt = get_number<double>(value, key);
        } else if (key == "t_end") {
            c.t_end = get_number<double>(value, key);
        } else if (key == "epsilon") {
            c.epsilon = get_number<double>(value, key);
        } else if (key == "seed") {
            c.seed = get_number<long long>(value, key);
        } else if (key == "sample_every") {
            c.sample_every = get_number<int>(value, key);
        } else if (key == "fit_window") {
            if (!value.is_array() || value.size() != 2)
                throw ConfigError("fit_window: expected an array of 2 numbers");
            c.fit_window[0] = get_number<double>(value[0], "fit_window[0]");
            c.fit_window[1] = get_number<double>(value[1], "fit_window[1]");
        } else if (key == "tolerances") {
            if (!value.is_object()) throw ConfigError("tolerances: expected an object");
            for (const auto& [tkey, tval] : value.items())
                c.tolerances[tkey] = get_number<double>(tval, "tolerances." + tkey);
        } else if (key == "output_dir") {
            if (!value.is_string()) throw ConfigError("output_dir: expected a string");
            c.output_dir = value.get<std::string>();
        } else {
            throw ConfigError(key + ": unknown field");
        }
    }
    c.validate();
    return c;
}

std::string config_to_json(const Config& c) {
    ordered_json doc;
    doc["experiment"] = experiment_name(c.experiment);
    doc["dim"] = c.dim;
    doc["n_per_axis"] = c.n_per_axis;
    doc["box_length"] = c.box_length;
    doc["hermite_degree"] = c.hermite_degree;
    doc["mu"] = c.mu;
    doc["gamma"] = c.gamma;
    doc["c0"] = c.c0;
    doc["r0"] = c.r0;
    doc["tau"] = c.tau;
    doc["dt"] = c.dt;
    doc["t_end"] = c.t_end;
    doc["epsilon"] = c.epsilon;
    doc["seed"] = c.seed;
    doc["sample_every"] = c.sample_every;
    doc["fit_window"] = c.fit_window;
    doc["tolerances"] = c.tolerances;
    doc["output_dir"] = c.output_dir;
    return doc.dump(2);
}

}  // namespace vfpns
