// Command-line driver: one subcommand per experiment, configured by a
// single JSON document (see --help for the schema).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "vfpns/experiments.hpp"

namespace {

constexpr const char* kSchemaHelp =
    "Config schema (JSON object; unknown fields rejected):\n"
    "  experiment     one of operator-verify | linear-spectrum | linear-decay |\n"
    "                 torus-run | box-run | lp-report\n"
    "  dim            spatial/velocity dimension, 1..3 (default 3)\n"
    "  n_per_axis     grid points per axis, power of two >= 8\n"
    "  box_length     periodic box length L\n"
    "  hermite_degree velocity truncation degree N, 2..12\n"
    "  mu             viscosity > 0\n"
    "  gamma          pressure exponent > 1 (P(n) = c0 n^gamma)\n"
    "  c0             pressure constant > 0\n"
    "  r0             frequency-split radius, in units of 2*pi/L\n"
    "  tau            array of 7 energy-functional weights in (0,1)\n"
    "  dt, t_end      time step and horizon\n"
    "  epsilon        initial-data H^2 size\n"
    "  seed           RNG seed (integer)\n"
    "  sample_every   diagnostics cadence in steps\n"
    "  fit_window     [t_lo, t_hi] for the decay fits\n"
    "  tolerances     per-experiment thresholds (object of numbers)\n"
    "  output_dir     run directory for config echo, CSV series, summary\n"
    "\n"
    "Exit codes: 0 pass, 1 check failure, 2 config error, 3 runtime abort.\n";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("Fourier-Hermite simulator and linear analyzer for the "
                             "compressible Navier-Stokes / Vlasov-Fokker-Planck system "
                             "with density-dependent friction.\n\n") +
                 kSchemaHelp};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string output_dir;
    long long seed = -1;
    bool have_seed = false;

    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--output", output_dir, "override output_dir");
    app.add_option("--seed", seed, "override the RNG seed")->each([&](const std::string&) {
        have_seed = true;
    });

    const std::pair<const char*, vfpns::ExperimentKind> kinds[] = {
        {"operator-verify", vfpns::ExperimentKind::operator_verify},
        {"linear-spectrum", vfpns::ExperimentKind::linear_spectrum},
        {"linear-decay", vfpns::ExperimentKind::linear_decay},
        {"torus-run", vfpns::ExperimentKind::torus_run},
        {"box-run", vfpns::ExperimentKind::box_run},
        {"lp-report", vfpns::ExperimentKind::lp_report},
    };
    vfpns::ExperimentKind selected = vfpns::ExperimentKind::operator_verify;
    for (const auto& [name, kind] : kinds) {
        auto* sub = app.add_subcommand(name, "run the " + std::string(name) + " experiment");
        sub->callback([&selected, kind = kind] { selected = kind; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        vfpns::Config config;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            config = vfpns::parse_config(buffer.str());
            if (config.experiment != selected) {
                // the subcommand wins; keep the file's numeric settings
                config.experiment = selected;
            }
        } else {
            config = vfpns::default_config(selected);
        }
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (have_seed) config.seed = seed;
        config.validate();

        const auto result = vfpns::run_experiment(config);
        std::cout << result.summary_json;
        return result.exit_code;
    } catch (const vfpns::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "runtime error: " << err.what() << "\n";
        return 3;
    }
}
