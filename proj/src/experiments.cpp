#include "vfpns/experiments.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "vfpns/dynamics.hpp"
#include "vfpns/energy.hpp"
#include "vfpns/initial_data.hpp"
#include "vfpns/linear_analysis.hpp"
#include "vfpns/quadrature.hpp"
#include "vfpns/timestepper.hpp"

namespace vfpns {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct Reporter {
    std::filesystem::path dir;
    ordered_json summary;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    explicit Reporter(const Config& config) : dir(config.output_dir) {
        std::filesystem::create_directories(dir);
        write_text(dir / "config.json", config_to_json(config) + "\n");
        summary["experiment"] = experiment_name(config.experiment);
        summary["config"] = ordered_json::parse(config_to_json(config));
    }

    ExperimentResult finish(int exit_code) {
        const auto elapsed = std::chrono::duration<double>(
                                 std::chrono::steady_clock::now() - start)
                                 .count();
        summary["wall_time_seconds"] = elapsed;
        summary["exit_code"] = exit_code;
        const std::string text = summary.dump(2) + "\n";
        write_text(dir / "summary.json", text);
        return {exit_code, text};
    }
};

EnergyWeights weights_from(const Config& c) {
    EnergyWeights w;
    w.tau1 = c.tau[0];
    w.tau2 = c.tau[1];
    w.tau3 = c.tau[2];
    w.tau4 = c.tau[3];
    w.tau5 = c.tau[4];
    w.tau6 = c.tau[5];
    w.tau7 = c.tau[6];
    w.validate();
    return w;
}

ModelParams params_from(const Config& c) {
    ModelParams p;
    p.mu = c.mu;
    p.gamma = c.gamma;
    p.c0 = c.c0;
    p.validate();
    return p;
}

// ---------------------------------------------------------------- operator-verify

ExperimentResult run_operator_verify(const Config& config) {
    Reporter rep(config);
    const double tol = config.tolerance("oracle_max_delta", 1e-10);
    const int repeats = 200;

    std::string csv = "hermite_degree,op,max_delta\n";
    ordered_json ops_summary = ordered_json::array();
    double worst = 0.0;

    for (int n_max : {4, 6, 8}) {
        auto tr = enumerate_truncation(3, n_max);
        auto rule = make_gauss_hermite(3, n_max + 4);
        std::mt19937_64 rng(static_cast<unsigned long long>(config.seed) + n_max);
        std::normal_distribution<double> gauss(0.0, 1.0);

        std::map<std::string, double> delta;
        for (int rep_i = 0; rep_i < repeats; ++rep_i) {
            VelocityCoeffs c(tr);
            double norm_sq = 0.0;
            for (int p = 0; p < tr->size(); ++p) {
                if (tr->degree(p) > n_max - 1) continue;  // closure-safe band
                c.values[p] = {gauss(rng), gauss(rng)};
                norm_sq += std::norm(c.values[p]);
            }
            const double inv = 1.0 / std::sqrt(norm_sq);
            for (auto& v : c.values) v *= inv;

            auto track = [&](const std::string& name, double d) {
                delta[name] = std::max(delta[name], d);
            };
            auto max_diff = [](const VelocityCoeffs& a, const VelocityCoeffs& b) {
                double m = 0.0;
                for (size_t i = 0; i < a.values.size(); ++i)
                    m = std::max(m, std::abs(a.values[i] - b.values[i]));
                return m;
            };

            track("apply_fokker_planck",
                  max_diff(quadrature_project(oracle_fokker_planck_at_nodes(c, rule), rule, tr),
                           apply_fokker_planck(c)));
            for (int axis = 0; axis < 3; ++axis) {
                track("multiply_by_v",
                      max_diff(quadrature_project(oracle_multiply_v_at_nodes(c, rule, axis), rule,
                                                  tr),
                               multiply_by_v(c, axis)));
                track("differentiate_v",
                      max_diff(
                          quadrature_project(oracle_differentiate_v_at_nodes(c, rule, axis), rule,
                                             tr),
                          differentiate_v(c, axis)));
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    track("gamma_moment",
                          std::abs(oracle_gamma_moment(c, rule, i, j) - gamma_moment(c, i, j)));
            track("nu_norm_sq", std::abs(oracle_nu_norm_sq(c, rule) - nu_norm_sq(c)));
            const auto split = macro_micro_split(c);
            track("macro_micro_split", std::abs(oracle_density_moment(c, rule) - split.a));
            const auto bm = oracle_velocity_moment(c, rule);
            for (int i = 0; i < 3; ++i)
                track("macro_micro_split", std::abs(bm[i] - split.b[i]));
        }

        for (const auto& [op, d] : delta) {
            csv += std::to_string(n_max) + "," + op + "," + g17(d) + "\n";
            ordered_json entry;
            entry["hermite_degree"] = n_max;
            entry["op"] = op;
            entry["max_delta"] = d;
            ops_summary.push_back(entry);
            worst = std::max(worst, d);
        }
    }

    write_text(rep.dir / "operator_verify.csv", csv);
    rep.summary["ops"] = ops_summary;
    rep.summary["max_delta"] = worst;
    rep.summary["tolerance"] = tol;
    const bool pass = worst <= tol;
    rep.summary["pass"] = pass;
    return rep.finish(pass ? 0 : 1);
}

// ---------------------------------------------------------------- linear-spectrum

ExperimentResult run_linear_spectrum(const Config& config) {
    Reporter rep(config);
    const auto params = params_from(config);
    auto trunc = enumerate_truncation(config.dim, config.hermite_degree);

    std::vector<double> ks;
    const int samples = 50;
    for (int i = 0; i < samples; ++i)
        ks.push_back(0.05 * std::pow(20.0 / 0.05, i / double(samples - 1)));

    const auto shape = abscissa_gap_shape(ks, trunc, params);

    CertificateOptions copts;
    copts.seed = static_cast<unsigned long long>(config.seed);
    auto cert = search_gap_certificate(ks, trunc, params, copts);

    const auto zero_mode = build_mode_matrix({0.0, 0.0, 0.0}, trunc, params);
    const auto ev = mode_eigenvalues(zero_mode);
    int kernel_dim = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < 1e-8) ++kernel_dim;

    std::string csv = "k,rate_abscissa,rate_certified\n";
    for (size_t i = 0; i < ks.size(); ++i)
        csv += g17(ks[i]) + "," + g17(shape.rates[i]) + "," + g17(cert.per_k_rate[i]) + "\n";
    write_text(rep.dir / "spectrum.csv", csv);

    rep.summary["gap_shape_c"] = shape.c;
    rep.summary["lambda_hat"] = cert.lambda_hat;
    rep.summary["tau4_used"] = cert.tau4;
    rep.summary["tau5_used"] = cert.tau5;
    rep.summary["kernel_dim_at_zero"] = kernel_dim;
    rep.summary["kernel_dim_expected"] = config.dim + 2;

    const bool pass = shape.c > config.tolerance("gap_c_min", 0.0) &&
                      cert.lambda_hat > config.tolerance("lambda_hat_min", 0.0) &&
                      kernel_dim == config.dim + 2;
    rep.summary["pass"] = pass;
    return rep.finish(pass ? 0 : 1);
}

// ---------------------------------------------------------------- linear-decay

ExperimentResult run_linear_decay(const Config& config) {
    Reporter rep(config);
    const auto params = params_from(config);
    auto trunc = enumerate_truncation(config.dim, config.hermite_degree);

    std::vector<double> times;
    for (int i = 0; i <= 24; ++i)
        times.push_back(config.fit_window[0] *
                        std::pow(config.fit_window[1] / config.fit_window[0], i / 24.0));

    auto curve_for = [&](int m, bool low) {
        DecayCurveOptions opts;
        opts.m = m;
        opts.low_freq_only = low;
        opts.r0 = config.r0;  // absolute: the curve lives in continuum k
        return semigroup_decay_curve(trunc, params, times, opts);
    };
    const auto c_m0 = curve_for(0, false);
    const auto c_m0_low = curve_for(0, true);
    const auto c_m1 = curve_for(1, false);
    const auto c_m1_low = curve_for(1, true);

    std::string csv = "t,value_m0,value_m0_low,value_m1,value_m1_low\n";
    for (size_t i = 0; i < times.size(); ++i)
        csv += g17(times[i]) + "," + g17(c_m0.values[i]) + "," + g17(c_m0_low.values[i]) + "," +
               g17(c_m1.values[i]) + "," + g17(c_m1_low.values[i]) + "\n";
    write_text(rep.dir / "decay.csv", csv);

    const std::array<double, 2> window = config.fit_window;
    auto report_fit = [&](const char* name, const DecayCurve& curve, double target,
                          double tol) {
        const auto fit = fit_decay_exponent(curve.times, curve.values, window);
        ordered_json entry;
        entry["slope"] = fit.exponent;
        entry["target"] = target;
        entry["tolerance"] = tol;
        entry["residual"] = fit.residual;
        entry["window"] = window;
        entry["tail_warning"] = curve.tail_warning;
        const bool ok = std::abs(fit.exponent - target) <= tol;
        entry["pass"] = ok;
        rep.summary[name] = entry;
        return ok;
    };
    const double s0 = config.tolerance("slope_m0", -0.75);
    const double s0tol = config.tolerance("slope_m0_tol", 0.08);
    const double s1 = config.tolerance("slope_m1", -1.25);
    const double s1tol = config.tolerance("slope_m1_tol", 0.10);
    bool pass = report_fit("fit_m0", c_m0, s0, s0tol);
    pass &= report_fit("fit_m1", c_m1, s1, s1tol);
    pass &= report_fit("fit_m0_low_freq", c_m0_low, s0, s0tol);
    pass &= report_fit("fit_m1_low_freq", c_m1_low, s1, s1tol);
    rep.summary["pass"] = pass;
    return rep.finish(pass ? 0 : 1);
}

// ---------------------------------------------------------------- shared run helpers

std::string records_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string csv = DiagnosticsRecord::csv_header() + "\n";
    for (const auto& r : records) csv += r.csv_row() + "\n";
    return csv;
}

std::string monitor_csv(const IntegrationResult& run) {
    std::string csv = "time,E,D,E1,D1,low_freq_source\n";
    for (size_t i = 0; i < run.monitor_times.size(); ++i)
        csv += g17(run.monitor_times[i]) + "," + g17(run.monitor_energy[i]) + "," +
               g17(run.monitor_dissipation[i]) + "," + g17(run.monitor_energy1[i]) + "," +
               g17(run.monitor_dissipation1[i]) + "," + g17(run.monitor_low_freq_source[i]) +
               "\n";
    return csv;
}

// ---------------------------------------------------------------- torus-run

ExperimentResult run_torus(const Config& config) {
    Reporter rep(config);
    const auto params = params_from(config);
    const auto weights = weights_from(config);
    auto grid = make_grid(config.dim, config.n_per_axis, config.box_length);
    auto trunc = enumerate_truncation(config.dim, config.hermite_degree);
    TransformContext ctx(grid);

    InitialDataOptions gen;
    gen.kind = InitialDataKind::torus_random;
    gen.seed = static_cast<unsigned long long>(config.seed);
    gen.epsilon = config.epsilon;
    const auto initial = generate_initial_data(gen, grid, trunc, ctx);
    const auto scales = conservation_scales(initial, ctx);

    const auto table = precompute_propagators(grid, trunc, params, config.dt);
    IntegrateOptions opts;
    opts.sample_every = config.sample_every;
    opts.energy_monitor = true;
    opts.r0_abs = config.r0_abs();
    const auto run = integrate(initial, config.t_end, table, params, weights, ctx, opts);

    write_text(rep.dir / "records.csv", records_csv(run.records));
    write_text(rep.dir / "monitor.csv", monitor_csv(run));

    if (run.aborted) {
        rep.summary["aborted"] = true;
        rep.summary["abort_reason"] = run.abort_reason;
        return rep.finish(3);
    }

    // exponential decay of 𝓔 over the fit window
    const auto efit =
        fit_exponential_rate(run.monitor_times, run.monitor_energy, config.fit_window);
    rep.summary["energy_rate"] = efit.rate;
    rep.summary["energy_fit_r_squared"] = efit.r_squared;

    // per-step monotonicity and the 𝓔' + λ𝓓 ≤ 0 constant
    double worst_increase = -std::numeric_limits<double>::infinity();
    double lambda_fit = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < run.monitor_energy.size(); ++i) {
        worst_increase =
            std::max(worst_increase, run.monitor_energy[i] - run.monitor_energy[i - 1]);
        const double dt = run.monitor_times[i] - run.monitor_times[i - 1];
        const double de = (run.monitor_energy[i] - run.monitor_energy[i - 1]) / dt;
        const double dbar =
            0.5 * (run.monitor_dissipation[i] + run.monitor_dissipation[i - 1]);
        if (dbar > 0.0) lambda_fit = std::min(lambda_fit, -de / dbar);
    }
    rep.summary["energy_worst_step_increase"] = worst_increase;
    rep.summary["lambda_fit"] = lambda_fit;

    // (G5.20)-style monitor: E1(t) ≤ E1(0) + C ∫‖∇²(a^L,b^L,ρ^L,u^L)‖²
    double c_fit = 0.0;
    double lambda16_fit = std::numeric_limits<double>::infinity();
    {
        std::vector<double> source_int(run.monitor_times.size(), 0.0);
        for (size_t i = 1; i < run.monitor_times.size(); ++i) {
            const double dt = run.monitor_times[i] - run.monitor_times[i - 1];
            source_int[i] =
                source_int[i - 1] + 0.5 * dt *
                                        (run.monitor_low_freq_source[i] +
                                         run.monitor_low_freq_source[i - 1]);
        }
        for (size_t i = 1; i < run.monitor_times.size(); ++i) {
            if (source_int[i] <= 0.0) continue;
            c_fit = std::max(c_fit,
                             (run.monitor_energy1[i] - run.monitor_energy1[0]) / source_int[i]);
        }
        c_fit = std::max(c_fit, 0.0);
        for (size_t i = 1; i < run.monitor_times.size(); ++i) {
            const double dt = run.monitor_times[i] - run.monitor_times[i - 1];
            const double de1 = (run.monitor_energy1[i] - run.monitor_energy1[i - 1]) / dt;
            const double d1bar =
                0.5 * (run.monitor_dissipation1[i] + run.monitor_dissipation1[i - 1]);
            const double sbar = 0.5 * (run.monitor_low_freq_source[i] +
                                       run.monitor_low_freq_source[i - 1]);
            if (d1bar > 0.0)
                lambda16_fit = std::min(lambda16_fit, (c_fit * sbar - de1) / d1bar);
        }
    }
    rep.summary["e1_source_constant"] = c_fit;
    rep.summary["lambda16_fit"] = lambda16_fit;

    const auto drift = conservation_drift(run.records, scales);
    rep.summary["drift_mass_particle"] = drift.mass_particle;
    rep.summary["drift_mass_fluid"] = drift.mass_fluid;
    rep.summary["drift_momentum"] = drift.momentum;

    double pos_min = std::numeric_limits<double>::infinity();
    for (const auto& r : run.records) pos_min = std::min(pos_min, r.positivity_min);
    rep.summary["positivity_min"] = pos_min;

    ordered_json checks;
    checks["exponential_r_squared"] =
        efit.r_squared > config.tolerance("r_squared_min", 0.99);
    checks["rate_positive"] = efit.rate > 0.0;
    checks["energy_monotone"] =
        worst_increase <= config.tolerance("energy_step_tol", 1e-9);
    checks["lambda_positive"] = lambda_fit > 0.0;
    checks["drift"] = drift.worst <= config.tolerance("drift_per_time_max", 1e-8);
    checks["positivity"] = pos_min > 0.0;
    checks["e1_source_fit_finite"] = std::isfinite(c_fit);
    rep.summary["checks"] = checks;

    bool pass = true;
    for (const auto& [key, val] : checks.items()) pass = pass && val.get<bool>();
    rep.summary["pass"] = pass;
    return rep.finish(pass ? 0 : 1);
}

// ---------------------------------------------------------------- box-run

ExperimentResult run_box(const Config& config) {
    Reporter rep(config);
    const auto params = params_from(config);
    const auto weights = weights_from(config);
    auto grid = make_grid(config.dim, config.n_per_axis, config.box_length);
    auto trunc = enumerate_truncation(config.dim, config.hermite_degree);
    TransformContext ctx(grid);

    InitialDataOptions gen;
    gen.kind = InitialDataKind::box_bump;
    gen.seed = static_cast<unsigned long long>(config.seed);
    gen.epsilon = config.epsilon;
    const auto initial = generate_initial_data(gen, grid, trunc, ctx);

    const auto table = precompute_propagators(grid, trunc, params, config.dt);

    std::vector<double> series_t, series_v;
    IntegrateOptions opts;
    opts.sample_every = config.sample_every;
    opts.energy_monitor = false;  // per-step functionals are not needed here
    opts.r0_abs = config.r0_abs();
    opts.record_observer = [&](const SystemState& s) {
        double fluid = l2_norm_sq(s.rho);
        for (const auto& u : s.vel) fluid += l2_norm_sq(u);
        series_t.push_back(s.time);
        series_v.push_back(zq2_coefficient_norm(s) + std::sqrt(fluid));
    };
    const auto run = integrate(initial, config.t_end, table, params, weights, ctx, opts);

    write_text(rep.dir / "records.csv", records_csv(run.records));
    std::string csv = "t,l2_value\n";
    for (size_t i = 0; i < series_t.size(); ++i)
        csv += g17(series_t[i]) + "," + g17(series_v[i]) + "\n";
    write_text(rep.dir / "box_series.csv", csv);

    if (run.aborted) {
        rep.summary["aborted"] = true;
        rep.summary["abort_reason"] = run.abort_reason;
        return rep.finish(3);
    }

    const auto fit = fit_decay_exponent(series_t, series_v, config.fit_window);
    rep.summary["l2_slope"] = fit.exponent;
    rep.summary["l2_fit_residual"] = fit.residual;
    rep.summary["slope_range"] = ordered_json::array(
        {config.tolerance("slope_min", -0.95), config.tolerance("slope_max", -0.55)});
    const bool in_range = fit.exponent >= config.tolerance("slope_min", -0.95) &&
                          fit.exponent <= config.tolerance("slope_max", -0.55);
    rep.summary["slope_in_range"] = in_range;
    // finite boxes cannot realize the R³ asymptotics; the slope is reported
    // as a diagnostic and does not gate the exit status
    rep.summary["soft_check"] = true;
    rep.summary["pass"] = true;
    return rep.finish(0);
}

// ---------------------------------------------------------------- lp-report

ExperimentResult run_lp_report(const Config& config) {
    Reporter rep(config);
    const auto params = params_from(config);
    const auto weights = weights_from(config);
    auto grid = make_grid(config.dim, config.n_per_axis, config.box_length);
    auto trunc = enumerate_truncation(config.dim, config.hermite_degree);
    TransformContext ctx(grid);

    const long steps = std::lround(config.t_end / config.dt);
    const long snapshots = steps / config.sample_every + 1;
    if (snapshots < 8)
        throw ConfigError("lp-report: cadence yields fewer than 8 snapshots");

    InitialDataOptions gen;
    gen.kind = InitialDataKind::box_bump;
    gen.seed = static_cast<unsigned long long>(config.seed);
    gen.epsilon = config.epsilon;
    const auto initial = generate_initial_data(gen, grid, trunc, ctx);
    const auto table = precompute_propagators(grid, trunc, params, config.dt);

    std::vector<SystemState> states;
    IntegrateOptions opts;
    opts.sample_every = config.sample_every;
    opts.energy_monitor = false;
    opts.r0_abs = config.r0_abs();
    opts.record_observer = [&](const SystemState& s) { states.push_back(s); };
    const auto run = integrate(initial, config.t_end, table, params, weights, ctx, opts);

    if (run.aborted) {
        rep.summary["aborted"] = true;
        rep.summary["abort_reason"] = run.abort_reason;
        return rep.finish(3);
    }
    if (static_cast<long>(states.size()) < 8)
        throw ConfigError("lp-report: fewer than 8 snapshots recorded");

    const auto rule = make_gauss_hermite(config.dim, config.hermite_degree + 4);
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<double> plist{2.0, 3.0, 6.0, inf};

    std::string csv = "p,fitted_exponent,reference_exponent,residual\n";
    ordered_json table_json = ordered_json::array();
    for (double p : plist) {
        std::vector<double> t, v;
        for (const auto& s : states) {
            double fluid = 0.0;
            const auto rho_p = ctx.to_physical(s.rho);
            fluid += lebesgue_norm(rho_p, *grid, p);
            std::vector<Complex> speed(grid->total_modes(), Complex(0.0));
            for (const auto& u : s.vel) {
                const auto up = ctx.to_physical(u);
                for (int i = 0; i < grid->total_modes(); ++i)
                    speed[i] += Complex(up[i].real() * up[i].real(), 0.0);
            }
            for (auto& x : speed) x = std::sqrt(x.real());
            fluid += lebesgue_norm(speed, *grid, p);
            t.push_back(s.time);
            v.push_back(zq_norm(s, p, rule, ctx) + fluid);
        }
        const auto fit = fit_decay_exponent(t, v, config.fit_window);
        const double reference = p <= 6.0 ? -1.5 * (1.0 - 1.0 / p) : -1.25;
        const std::string plabel = std::isinf(p) ? "inf" : g17(p);
        csv += plabel + "," + g17(fit.exponent) + "," + g17(reference) + "," +
               g17(fit.residual) + "\n";
        ordered_json entry;
        entry["p"] = plabel;
        entry["fitted_exponent"] = fit.exponent;
        entry["reference_exponent"] = reference;
        entry["residual"] = fit.residual;
        table_json.push_back(entry);
    }
    write_text(rep.dir / "lp_table.csv", csv);
    rep.summary["table"] = table_json;
    rep.summary["note"] = "reference exponents attached for comparison, not hard-asserted";
    rep.summary["pass"] = true;
    return rep.finish(0);
}

}  // namespace

ExperimentResult run_experiment(const Config& config) {
    config.validate();
    switch (config.experiment) {
        case ExperimentKind::operator_verify: return run_operator_verify(config);
        case ExperimentKind::linear_spectrum: return run_linear_spectrum(config);
        case ExperimentKind::linear_decay: return run_linear_decay(config);
        case ExperimentKind::torus_run: return run_torus(config);
        case ExperimentKind::box_run: return run_box(config);
        case ExperimentKind::lp_report: return run_lp_report(config);
    }
    throw std::logic_error("run_experiment: unknown experiment");
}

}  // namespace vfpns
