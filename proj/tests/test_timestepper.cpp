#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vfpns/timestepper.hpp"

using namespace vfpns;

namespace {

constexpr double kPi = std::numbers::pi;

SystemState smooth_state(std::shared_ptr<const Grid> grid, std::shared_ptr<const Truncation> trunc,
                         double amp) {
    // deterministic smooth data, safely away from vacuum
    SystemState s(grid, trunc);
    const auto p1 = grid->linear_of_signed({1, 0, 0});
    const auto m1 = grid->conjugate_mode(p1);
    const auto p2 = grid->linear_of_signed({0, 1, 0});
    const auto m2 = grid->conjugate_mode(p2);
    s.rho.coeffs[p1] = 0.5 * amp;
    s.rho.coeffs[m1] = 0.5 * amp;
    s.vel[0].coeffs[p1] = Complex(0.0, -0.5 * amp);
    s.vel[0].coeffs[m1] = Complex(0.0, 0.5 * amp);
    s.fcoeffs[0].coeffs[p2] = 0.4 * amp;
    s.fcoeffs[0].coeffs[m2] = 0.4 * amp;
    s.fcoeffs[1].coeffs[p2] = Complex(0.0, -0.3 * amp);
    s.fcoeffs[1].coeffs[m2] = Complex(0.0, 0.3 * amp);
    if (grid->dim() >= 2) {
        s.vel[1].coeffs[p2] = 0.25 * amp;
        s.vel[1].coeffs[m2] = 0.25 * amp;
    }
    return s;
}

double state_distance(const SystemState& a, const SystemState& b) {
    SystemState d = a;
    d.axpy(-1.0, b);
    double total = l2v_l2x_sq(d) + l2_norm_sq(d.rho);
    for (const auto& u : d.vel) total += l2_norm_sq(u);
    return std::sqrt(total);
}

}  // namespace

TEST_CASE("propagator table: kernel, accuracy, determinism") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    const double dt = 0.1;
    auto table = precompute_propagators(grid, trunc, params, dt);

    const int zero_mode = grid->linear_of_signed({0, 0, 0});
    const int n = trunc->size() + 4;
    const int na = trunc->size();

    // d+2 conserved directions are fixed by the k=0 propagator
    std::vector<Eigen::VectorXcd> kernel;
    kernel.push_back(Eigen::VectorXcd::Zero(n));
    kernel.back()(0) = 1.0;  // particle mass
    kernel.push_back(Eigen::VectorXcd::Zero(n));
    kernel.back()(na) = 1.0;  // fluid mass
    for (int i = 0; i < 3; ++i) {
        kernel.push_back(Eigen::VectorXcd::Zero(n));
        kernel.back()(1 + i) = 1.0;
        kernel.back()(na + 1 + i) = 1.0;  // b_i + u_i
    }
    for (const auto& v : kernel)
        CHECK((table.exponential(zero_mode) * v - v).norm() < 1e-12);

    // accuracy against a high-order reference on one sampled k
    const int probe = grid->linear_of_signed({2, -1, 1});
    const auto mode = build_mode_matrix(grid->wavevector(probe), trunc, params);
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(n, n);
    const int steps = 2000;
    const double h = dt / steps;
    for (int s = 0; s < steps; ++s) {
        const Eigen::MatrixXcd k1 = mode.matrix * y;
        const Eigen::MatrixXcd k2 = mode.matrix * (y + 0.5 * h * k1);
        const Eigen::MatrixXcd k3 = mode.matrix * (y + 0.5 * h * k2);
        const Eigen::MatrixXcd k4 = mode.matrix * (y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK((table.exponential(probe) - y).norm() / y.norm() < 1e-12);

    // dt → 0 limit
    auto tiny = precompute_propagators(grid, trunc, params, 1e-8);
    CHECK((tiny.exponential(probe) - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-6);

    // semigroup property through the table
    auto doubled = precompute_propagators(grid, trunc, params, 2.0 * dt);
    CHECK((doubled.exponential(probe) - table.exponential(probe) * table.exponential(probe))
              .norm() < 1e-10);

    // bit-identical rebuild
    auto again = precompute_propagators(grid, trunc, params, dt);
    CHECK((again.exponential(probe) - table.exponential(probe)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((again.phi1(probe) - table.phi1(probe)).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS(precompute_propagators(grid, trunc, params, 0.0));
}

TEST_CASE("linear-only march matches the exact propagators") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    TransformContext ctx(grid);
    const double dt = 0.05;
    auto table = precompute_propagators(grid, trunc, params, dt);

    auto s = smooth_state(grid, trunc, 0.1);
    SystemState current = s;
    const int n = current.mode_vector_size();
    for (int m = 0; m < 100; ++m) current = step(current, table, ctx, true);

    // reference: one exponential per mode over the whole horizon
    double diff = 0.0;
    Eigen::VectorXcd x(n);
    for (int lin = 0; lin < grid->total_modes(); ++lin) {
        if (!grid->in_band(lin)) continue;
        s.gather_mode(lin, std::span<Complex>(x.data(), n));
        const auto mode = build_mode_matrix(grid->wavevector(lin), trunc, params);
        Eigen::VectorXcd ref = matrix_exponential(100 * dt * mode.matrix) * x;
        std::vector<Complex> got(n);
        current.gather_mode(lin, got);
        for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(got[i] - ref(i)));
    }
    CHECK(diff < 1e-10);
}

TEST_CASE("equilibrium is preserved bit-exactly") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    TransformContext ctx(grid);
    auto table = precompute_propagators(grid, trunc, params, 0.1);
    SystemState zero(grid, trunc);
    auto next = step(zero, table, ctx);
    CHECK(next.max_abs() == 0.0);
}

TEST_CASE("observed convergence order of the nonlinear step") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    TransformContext ctx(grid);
    auto s0 = smooth_state(grid, trunc, 0.4);
    const double t_end = 1.0;

    auto march = [&](double dt) {
        auto table = precompute_propagators(grid, trunc, params, dt);
        SystemState current = s0;
        const long steps = std::lround(t_end / dt);
        for (long m = 0; m < steps; ++m) current = step(current, table, ctx);
        return current;
    };
    auto u1 = march(0.2);
    auto u2 = march(0.1);
    auto u3 = march(0.05);
    const double e1 = state_distance(u1, u2);
    const double e2 = state_distance(u2, u3);
    const double order = std::log2(e1 / e2);
    INFO("observed order ", order);
    CHECK(order >= 1.8);
}

TEST_CASE("integrate: cadence, zero data, and monotone energy on small data") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    EnergyWeights weights;
    TransformContext ctx(grid);
    auto table = precompute_propagators(grid, trunc, params, 0.02);

    SystemState zero(grid, trunc);
    auto still = integrate(zero, zero.time, table, params, weights, ctx);
    CHECK(still.records.size() == 1);
    CHECK_FALSE(still.aborted);

    auto quiet = integrate(zero, 0.2, table, params, weights, ctx);
    for (const auto& rec : quiet.records) {
        CHECK(rec.energy_E == 0.0);
        CHECK(rec.zq2 == 0.0);
    }

    auto s = smooth_state(grid, trunc, 1e-3);
    IntegrateOptions opts;
    opts.sample_every = 5;
    auto run = integrate(s, 2.0, table, params, weights, ctx, opts);
    CHECK_FALSE(run.aborted);
    REQUIRE(run.monitor_energy.size() > 50);
    for (size_t i = 1; i < run.monitor_energy.size(); ++i)
        CHECK(run.monitor_energy[i] <= run.monitor_energy[i - 1] + 1e-9);
    // fitted λ with 𝓔' + λ𝓓 ≤ 0 stays positive
    double lambda = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < run.monitor_energy.size(); ++i) {
        const double de = (run.monitor_energy[i] - run.monitor_energy[i - 1]) /
                          (run.monitor_times[i] - run.monitor_times[i - 1]);
        const double dmean =
            0.5 * (run.monitor_dissipation[i] + run.monitor_dissipation[i - 1]);
        if (dmean > 0.0) lambda = std::min(lambda, -de / dmean);
    }
    CHECK(lambda > 0.0);
}

TEST_CASE("integrate aborts on vacuum with the partial series retained") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;
    EnergyWeights weights;
    TransformContext ctx(grid);
    auto table = precompute_propagators(grid, trunc, params, 0.01);

    SystemState s(grid, trunc);
    s.rho.coeffs[grid->linear_of_signed({0, 0, 0})] = -1.2;  // below vacuum
    auto run = integrate(s, 1.0, table, params, weights, ctx);
    CHECK(run.aborted);
    CHECK(run.records.size() == 1);
    CHECK(run.abort_reason.find("vacuum") != std::string::npos);
}
