#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vfpns/dynamics.hpp"
#include "vfpns/linear_analysis.hpp"

using namespace vfpns;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("mode matrix structure at k = 0") {
    auto trunc = enumerate_truncation(3, 4);
    ModelParams params;
    auto mode = build_mode_matrix({0.0, 0.0, 0.0}, trunc, params);
    const int n = mode.size();

    // real at k = 0
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) CHECK(mode.matrix(i, j).imag() == 0.0);

    // kernel dimension d+2
    auto ev = mode_eigenvalues(mode);
    int kernel = 0;
    for (int i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i)) < 1e-10) ++kernel;
    CHECK(kernel == 5);

    // the (b − u) direction decays at rate 2
    const int na = trunc->size();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    x(1) = 1.0;           // b₁
    x(na + 1) = -1.0;     // u₁
    Eigen::VectorXcd bx = mode.matrix * x;
    CHECK((bx + 2.0 * x).norm() < 1e-14);

    // pure micro modes decouple with eigenvalue −|α|
    MultiIndex a211{{2, 1, 1}};
    Eigen::VectorXcd micro = Eigen::VectorXcd::Zero(n);
    micro(trunc->position(a211)) = 1.0;
    CHECK((mode.matrix * micro + 4.0 * micro).norm() < 1e-14);

    // spectral abscissa after removing the kernel: the slowest survivor is −1
    // in neither block; the explicit structure gives −2
    CHECK(spectral_abscissa(mode, true) == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("f-block is skew-hermitian transport plus the diagonal collision") {
    auto trunc = enumerate_truncation(3, 4);
    ModelParams params;
    auto mode = build_mode_matrix({0.7, -1.3, 0.4}, trunc, params);
    const int na = trunc->size();
    for (int p = 0; p < na; ++p)
        for (int q = 0; q < na; ++q) {
            const Complex sym = mode.matrix(p, q) + std::conj(mode.matrix(q, p));
            const Complex expected = (p == q) ? Complex(-2.0 * trunc->degree(p)) : Complex(0.0);
            CHECK(std::abs(sym - expected) < 1e-14);
        }
}

TEST_CASE("mode matrix action agrees with linear_rhs on single-mode states") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    ModelParams params;
    params.mu = 0.8;
    std::mt19937_64 rng(127);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int rep = 0; rep < 5; ++rep) {
        const std::array<int, 3> mi{1 + rep % 3, -2 + rep, rep % 2};
        const int lin = grid->linear_of_signed(mi);
        const auto k = grid->wavevector(lin);
        auto mode = build_mode_matrix(k, trunc, params);
        const int n = mode.size();

        Eigen::VectorXcd x(n);
        for (int i = 0; i < n; ++i) x(i) = Complex(gauss(rng), gauss(rng));

        SystemState state(grid, trunc);
        state.scatter_mode(lin, std::span<const Complex>(x.data(), n));
        auto rhs = linear_rhs(state, params);
        std::vector<Complex> got(n);
        rhs.gather_mode(lin, got);

        Eigen::VectorXcd expected = mode.matrix * x;
        double diff = 0.0;
        for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(got[i] - expected(i)));
        CHECK(diff < 1e-12);
    }
}

TEST_CASE("spectral abscissa of a handmade diagonal") {
    auto trunc = enumerate_truncation(1, 2);
    ModeMatrix m;
    m.k = {1.0, 0.0, 0.0};
    m.trunc = trunc;
    m.matrix = Eigen::MatrixXcd::Zero(2, 2);
    m.matrix(0, 0) = -1.0;
    m.matrix(1, 1) = -3.0;
    CHECK(spectral_abscissa(m, false) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("abscissa survey: trivial kernel away from k = 0 and gap saturation") {
    auto trunc = enumerate_truncation(3, 4);
    ModelParams params;
    std::vector<double> ks;
    for (int i = 0; i < 25; ++i) ks.push_back(0.05 * std::pow(20.0 / 0.05, i / 24.0));
    auto fit = abscissa_gap_shape(ks, trunc, params);
    CHECK(fit.c > 0.0);
    for (double r : fit.rates) CHECK(r > 0.0);
    // saturation: the largest sampled |k| still has a rate bounded away from 0
    CHECK(fit.rates.back() > 0.1);
}

TEST_CASE("matrix exponential against a high-accuracy reference integration") {
    auto trunc = enumerate_truncation(3, 3);
    ModelParams params;
    auto mode = build_mode_matrix({1.3, -0.4, 0.2}, trunc, params);
    const int n = mode.size();
    const double dt = 0.37;

    const Eigen::MatrixXcd prop = matrix_exponential(dt * mode.matrix);

    // RK4 on the full matrix ODE with a tiny step as the oracle
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(n, n);
    const int steps = 4000;
    const double h = dt / steps;
    for (int s = 0; s < steps; ++s) {
        const Eigen::MatrixXcd k1 = mode.matrix * y;
        const Eigen::MatrixXcd k2 = mode.matrix * (y + 0.5 * h * k1);
        const Eigen::MatrixXcd k3 = mode.matrix * (y + 0.5 * h * k2);
        const Eigen::MatrixXcd k4 = mode.matrix * (y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    CHECK((prop - y).norm() / y.norm() < 1e-10);

    // semigroup property
    const Eigen::MatrixXcd prop2 = matrix_exponential(2.0 * dt * mode.matrix);
    CHECK((prop2 - prop * prop).norm() / prop2.norm() < 1e-10);

    // dt → 0 limit
    const Eigen::MatrixXcd tiny = matrix_exponential(1e-8 * mode.matrix);
    CHECK((tiny - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-6);
}

TEST_CASE("phi1 is consistent with the exponential") {
    auto trunc = enumerate_truncation(3, 2);
    ModelParams params;

    // invertible case: φ₁(A) = (e^A − I)A^{-1}
    auto mode = build_mode_matrix({0.9, 0.1, -0.5}, trunc, params);
    Eigen::MatrixXcd a = 0.25 * mode.matrix;
    a.diagonal().array() -= 0.3;  // push away from singularity
    const auto pair = exp_and_phi1(a);
    const int n = static_cast<int>(a.rows());
    const Eigen::MatrixXcd direct =
        (pair.exponential - Eigen::MatrixXcd::Identity(n, n)) * a.inverse();
    CHECK((pair.phi1 - direct).norm() / direct.norm() < 1e-12);

    // singular case: on a kernel vector φ₁ acts as the identity
    auto zero_mode = build_mode_matrix({0.0, 0.0, 0.0}, trunc, params);
    const auto pair0 = exp_and_phi1(0.1 * zero_mode.matrix);
    const int na = trunc->size();
    Eigen::VectorXcd kernel_vec = Eigen::VectorXcd::Zero(zero_mode.size());
    kernel_vec(0) = 1.0;  // particle mass direction
    CHECK((pair0.phi1 * kernel_vec - kernel_vec).norm() < 1e-13);
    CHECK((pair0.exponential * kernel_vec - kernel_vec).norm() < 1e-13);
}

TEST_CASE("lyapunov functional basics") {
    auto trunc = enumerate_truncation(3, 3);
    const int n = trunc->size() + 4;
    const std::array<double, 3> k{0.8, -0.2, 0.4};
    const double p1 = 1.4;

    std::vector<Complex> zero(n, Complex(0.0));
    CHECK(lyapunov_value(k, *trunc, zero, 0.1, 0.1, p1) == 0.0);

    std::mt19937_64 rng(131);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int rep = 0; rep < 1000; ++rep) {
        std::vector<Complex> x(n);
        for (auto& v : x) v = Complex(gauss(rng), gauss(rng));
        const double kk = 0.05 * std::pow(400.0, rep / 999.0);
        const std::array<double, 3> krand{kk, 0.0, 0.0};

        // τ₄ = τ₅ = 0 → plain weighted norm
        double plain = 0.0;
        for (int p = 0; p < trunc->size(); ++p) plain += std::norm(x[p]);
        plain += p1 * std::norm(x[trunc->size()]);
        for (int i = 0; i < 3; ++i) plain += std::norm(x[trunc->size() + 1 + i]);
        CHECK(lyapunov_value(krand, *trunc, x, 0.0, 0.0, p1) ==
              doctest::Approx(plain).epsilon(1e-13));

        // positivity margin at the default weights
        const double v = lyapunov_value(krand, *trunc, x, 0.1, 0.1, p1);
        CHECK(v >= 0.5 * plain);

        // quadratic homogeneity (rates are scale-invariant)
        std::vector<Complex> x2 = x;
        for (auto& c : x2) c *= 2.0;
        CHECK(lyapunov_value(krand, *trunc, x2, 0.1, 0.1, p1) ==
              doctest::Approx(4.0 * v).epsilon(1e-13));
    }
}

TEST_CASE("gap certificate at |k| = 1") {
    auto trunc = enumerate_truncation(3, 3);
    ModelParams params;
    const std::vector<double> ks{1.0};
    CertificateOptions opts;
    opts.trials = 3;
    auto cert = gap_certificate(ks, trunc, params, 0.1, 0.1, opts);
    INFO("lambda_hat = ", cert.lambda_hat);
    CHECK(cert.ok);
    CHECK(cert.lambda_hat > 0.0);

    auto searched = search_gap_certificate(ks, trunc, params, opts);
    CHECK(searched.ok);

    // micro-only initial data decays at least like the certificate says
    const auto mode = build_mode_matrix({1.0, 0.0, 0.0}, trunc, params);
    const int n = mode.size();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    MultiIndex a_micro{{2, 1, 0}};
    x(trunc->position(a_micro)) = 1.0;
    std::vector<Complex> vec(n);
    std::copy(x.data(), x.data() + n, vec.begin());
    const double v0 = lyapunov_value({1.0, 0.0, 0.0}, *trunc, vec, cert.tau4, cert.tau5,
                                     params.p_prime_1());
    const double bound_rate = std::min(1.0, cert.lambda_hat / 2.0);
    const Eigen::MatrixXcd step = matrix_exponential(0.5 * mode.matrix);
    double t = 0.0;
    for (int s = 0; s < 40; ++s) {
        x = step * x;
        t += 0.5;
        std::copy(x.data(), x.data() + n, vec.begin());
        const double v = lyapunov_value({1.0, 0.0, 0.0}, *trunc, vec, cert.tau4, cert.tau5,
                                        params.p_prime_1());
        CHECK(v <= v0 * std::exp(-bound_rate * t) * (1.0 + 1e-9));
    }

    CHECK_THROWS(gap_certificate(std::vector<double>{}, trunc, params, 0.1, 0.1, opts));
    CHECK_THROWS(gap_certificate(std::vector<double>{0.0}, trunc, params, 0.1, 0.1, opts));
}

TEST_CASE("decay fitting") {
    std::vector<double> t, v;
    for (int i = 0; i <= 200; ++i) {
        const double ti = std::pow(10.0, 3.0 * i / 200.0);
        t.push_back(ti);
        v.push_back(std::pow(1.0 + ti, -0.75));
    }
    auto fit = fit_decay_exponent(t, v, {10.0, 1000.0});
    CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(1e-3));
    CHECK(fit.residual < 1e-10);

    std::vector<double> vexp;
    for (double ti : t) vexp.push_back(std::exp(-ti));
    // exponential decay flagged as strongly non-algebraic, restricted to a
    // window where values stay representable
    auto efit = fit_decay_exponent(t, vexp, {10.0, 100.0});
    CHECK(efit.exponent < -5.0);

    std::vector<double> vconst(t.size(), 3.2);
    auto cfit = fit_decay_exponent(t, vconst, {10.0, 1000.0});
    CHECK(std::abs(cfit.exponent) < 1e-6);

    std::vector<double> vrate;
    for (double ti : t) vrate.push_back(2.0 * std::exp(-0.3 * ti));
    auto rfit = fit_exponential_rate(t, vrate, {1.0, 100.0});
    CHECK(rfit.rate == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(rfit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> bad(t.size(), -1.0);
    CHECK_THROWS(fit_decay_exponent(t, bad, {10.0, 1000.0}));
}

TEST_CASE("semigroup decay curve reproduces the algebraic rates at desk scale") {
    auto trunc = enumerate_truncation(3, 4);
    ModelParams params;
    std::vector<double> times;
    for (int i = 0; i <= 24; ++i) times.push_back(10.0 * std::pow(100.0, i / 24.0));

    DecayCurveOptions opts;
    opts.shells = 220;
    opts.m = 0;
    auto curve = semigroup_decay_curve(trunc, params, times, opts);
    CHECK_FALSE(curve.tail_warning);
    auto fit = fit_decay_exponent(curve.times, curve.values, {10.0, 1000.0});
    INFO("m=0 slope ", fit.exponent);
    CHECK(fit.exponent == doctest::Approx(-0.75).epsilon(0.08 / 0.75));

    opts.m = 1;
    auto curve1 = semigroup_decay_curve(trunc, params, times, opts);
    auto fit1 = fit_decay_exponent(curve1.times, curve1.values, {10.0, 1000.0});
    INFO("m=1 slope ", fit1.exponent);
    CHECK(fit1.exponent == doctest::Approx(-1.25).epsilon(0.10 / 1.25));

    // low-frequency restriction keeps the same exponent
    opts.m = 0;
    opts.low_freq_only = true;
    auto curve_low = semigroup_decay_curve(trunc, params, times, opts);
    auto fit_low = fit_decay_exponent(curve_low.times, curve_low.values, {10.0, 1000.0});
    CHECK(fit_low.exponent == doctest::Approx(-0.75).epsilon(0.08 / 0.75));

    // a too-small k_max leaves spectral mass at the boundary and warns
    DecayCurveOptions cramped;
    cramped.shells = 60;
    cramped.k_max = 0.5;
    std::vector<double> tearly{1.0, 2.0};
    auto warned = semigroup_decay_curve(trunc, params, tearly, cramped);
    CHECK(warned.tail_warning);

    // data supported at |k| ≥ 1 decays faster than any power: the local
    // slope steepens monotonically on log-log axes
    DecayCurveOptions hi;
    hi.shells = 220;
    hi.profile_min_k = 1.0;
    std::vector<double> tshort;
    for (int i = 0; i <= 12; ++i) tshort.push_back(1.0 * std::pow(20.0, i / 12.0));
    auto hicurve = semigroup_decay_curve(trunc, params, tshort, hi);
    auto early = fit_decay_exponent(hicurve.times, hicurve.values, {1.0, 4.0});
    auto late = fit_decay_exponent(hicurve.times, hicurve.values, {5.0, 20.0});
    CHECK(late.exponent < early.exponent);
    CHECK(late.exponent < -5.0);
}
