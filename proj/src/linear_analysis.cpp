#include "vfpns/linear_analysis.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vfpns/spectral.hpp"

namespace vfpns {

double lyapunov_value(const std::array<double, 3>& k, const Truncation& trunc,
                      std::span<const Complex> mode_state, double tau4, double tau5,
                      double p_prime_1) {
    const int na = trunc.size();
    const int d = trunc.dim();
    double ksq = 0.0;
    for (int i = 0; i < d; ++i) ksq += k[i] * k[i];

    double f_sq = 0.0;
    for (int p = 0; p < na; ++p) f_sq += std::norm(mode_state[p]);
    const Complex rho = mode_state[na];
    std::array<Complex, 3> u{};
    for (int i = 0; i < d; ++i) u[i] = mode_state[na + 1 + i];
    const Complex a = mode_state[0];
    std::array<Complex, 3> b{};
    for (int i = 0; i < d; ++i) b[i] = mode_state[1 + i];

    std::vector<Complex> micro(mode_state.begin(), mode_state.begin() + na);
    for (int p = 0; p <= d; ++p) micro[p] = 0.0;

    // 𝓔₁(f̂) = (1+|k|²)^{-1}[Σ_ij (ik_i b̂_j + ik_j b̂_i | Γ_ij(micro)) − (â | ik·b̂)]
    Complex e1(0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const Complex sym = Complex(0.0, k[i]) * b[j] + Complex(0.0, k[j]) * b[i];
            e1 += sym * std::conj(gamma_moment(trunc, micro, i, j));
        }
    Complex ikb(0.0);
    for (int i = 0; i < d; ++i) ikb += Complex(0.0, k[i]) * b[i];
    e1 -= a * std::conj(ikb);
    e1 /= (1.0 + ksq);

    Complex u_ikrho(0.0);
    for (int i = 0; i < d; ++i) u_ikrho += u[i] * std::conj(Complex(0.0, k[i]) * rho);

    double total = f_sq + p_prime_1 * std::norm(rho);
    for (int i = 0; i < d; ++i) total += std::norm(u[i]);
    total += tau4 * e1.real() + tau5 * u_ikrho.real() / (1.0 + ksq);
    return total;
}

GapCertificate gap_certificate(std::span<const double> k_magnitudes,
                               std::shared_ptr<const Truncation> trunc, const ModelParams& params,
                               double tau4, double tau5, const CertificateOptions& opts) {
    if (k_magnitudes.empty())
        throw std::invalid_argument("gap_certificate: k_samples must be nonempty");
    const int na = trunc->size();
    const int d = trunc->dim();
    const int n = na + 1 + d;
    const double p1 = params.p_prime_1();

    GapCertificate cert;
    cert.tau4 = tau4;
    cert.tau5 = tau5;
    cert.lambda_hat = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (double kmag : k_magnitudes) {
        if (!(kmag > 0.0)) throw std::invalid_argument("gap_certificate: k must be nonzero");
        const std::array<double, 3> k{kmag, 0.0, 0.0};
        const auto mode = build_mode_matrix(k, trunc, params);
        const Eigen::MatrixXcd step = matrix_exponential(opts.dt * mode.matrix);
        const double shape = kmag * kmag / (1.0 + kmag * kmag);

        double rate = std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < opts.trials; ++trial) {
            Eigen::VectorXcd x(n);
            for (int i = 0; i < n; ++i) x(i) = Complex(gauss(rng), gauss(rng));
            std::vector<Complex> vec(x.data(), x.data() + n);
            const double v0 = lyapunov_value(k, *trunc, vec, tau4, tau5, p1);
            double t = 0.0;
            while (t < opts.t_end - 0.5 * opts.dt) {
                x = step * x;
                t += opts.dt;
                std::copy(x.data(), x.data() + n, vec.begin());
                const double v = lyapunov_value(k, *trunc, vec, tau4, tau5, p1);
                if (v <= 0.0 || v0 <= 0.0) {
                    rate = -1.0;  // functional lost positivity: certificate fails
                    break;
                }
                rate = std::min(rate, -std::log(v / v0) / (shape * t));
            }
            if (rate < 0.0) break;
        }
        cert.per_k_rate.push_back(rate);
        cert.lambda_hat = std::min(cert.lambda_hat, rate);
    }
    cert.ok = cert.lambda_hat > 0.0;
    return cert;
}

GapCertificate search_gap_certificate(std::span<const double> k_magnitudes,
                                      std::shared_ptr<const Truncation> trunc,
                                      const ModelParams& params, const CertificateOptions& opts) {
    const double candidates[][2] = {{0.1, 0.1},   {0.05, 0.05}, {0.05, 0.1},
                                    {0.1, 0.05},  {0.02, 0.02}, {0.01, 0.01},
                                    {0.005, 0.005}};
    GapCertificate best;
    for (const auto& c : candidates) {
        auto cert = gap_certificate(k_magnitudes, trunc, params, c[0], c[1], opts);
        if (cert.ok) return cert;
        if (best.per_k_rate.empty() || cert.lambda_hat > best.lambda_hat) best = cert;
    }
    return best;
}

DecayCurve semigroup_decay_curve(std::shared_ptr<const Truncation> trunc,
                                 const ModelParams& params, std::span<const double> times,
                                 const DecayCurveOptions& opts) {
    const int na = trunc->size();
    const int d = trunc->dim();
    const int n = na + 1 + d;
    if (opts.shells < 8) throw std::invalid_argument("semigroup_decay_curve: too few shells");

    // log-spaced shells with trapezoid weights in k
    std::vector<double> kgrid(opts.shells), weights(opts.shells);
    const double ratio = std::log(opts.k_max / opts.k_min);
    for (int j = 0; j < opts.shells; ++j)
        kgrid[j] = opts.k_min * std::exp(ratio * j / double(opts.shells - 1));
    for (int j = 0; j < opts.shells; ++j) {
        const double lo = j == 0 ? kgrid[0] : 0.5 * (kgrid[j - 1] + kgrid[j]);
        const double hi = j + 1 == opts.shells ? kgrid[j] : 0.5 * (kgrid[j] + kgrid[j + 1]);
        weights[j] = hi - lo;
    }
    const double sphere_factor = d == 3 ? 4.0 * std::numbers::pi
                                : d == 2 ? 2.0 * std::numbers::pi
                                         : 2.0;

    // rotation-invariant unit profile vector: equal density / fluid-density mix
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(n);
    xi(0) = 1.0 / std::sqrt(2.0);
    xi(na) = 1.0 / std::sqrt(2.0);

    DecayCurve curve;
    curve.times.assign(times.begin(), times.end());
    curve.values.assign(times.size(), 0.0);
    std::vector<double> integrand0(opts.shells, 0.0);

    for (int j = 0; j < opts.shells; ++j) {
        const double kmag = kgrid[j];
        const std::array<double, 3> k{kmag, 0.0, 0.0};
        const auto mode = build_mode_matrix(k, trunc, params);

        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(mode.matrix);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("semigroup_decay_curve: eigensolver failed");
        const Eigen::VectorXcd coeffs = solver.eigenvectors().partialPivLu().solve(xi);

        double profile = std::exp(-kmag * kmag);
        if (opts.low_freq_only) profile *= phi0_cutoff(kmag, opts.r0);
        if (kmag < opts.profile_min_k) profile = 0.0;
        double geom = weights[j] * sphere_factor * profile * profile;
        for (int i = 0; i < d - 1; ++i) geom *= kmag;  // k^{d−1}
        for (int i = 0; i < opts.m; ++i) geom *= kmag * kmag;  // |k|^{2m}

        for (size_t ti = 0; ti < curve.times.size(); ++ti) {
            Eigen::VectorXcd amp = coeffs;
            for (int i = 0; i < n; ++i)
                amp(i) *= std::exp(curve.times[ti] * solver.eigenvalues()(i));
            const double nrm = (solver.eigenvectors() * amp).squaredNorm();
            curve.values[ti] += geom * nrm;
            if (ti == 0) integrand0[j] = geom * nrm;
        }
    }
    for (auto& v : curve.values) v = std::sqrt(v);

    // crude tail check: mass in the outermost decade at t = times[0]
    double total0 = 0.0, tail0 = 0.0;
    for (int j = 0; j < opts.shells; ++j) {
        total0 += integrand0[j];
        if (kgrid[j] > 0.8 * opts.k_max) tail0 += integrand0[j];
    }
    curve.tail_warning = total0 > 0.0 && tail0 / total0 > 0.01;
    return curve;
}

namespace {

struct LsqResult {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

LsqResult least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LsqResult r;
    r.points = n;
    const double denom = n * sxx - sx * sx;
    r.slope = (n * sxy - sx * sy) / denom;
    r.intercept = (sy - r.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (int i = 0; i < n; ++i) {
        const double fit = r.intercept + r.slope * x[i];
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    r.rms = std::sqrt(ss_res / n);
    r.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return r;
}

}  // namespace

DecayFit fit_decay_exponent(std::span<const double> times, std::span<const double> values,
                            const std::array<double, 2>& window) {
    std::vector<double> x, y;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window[0] || times[i] > window[1]) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit_decay_exponent: nonpositive value in window");
        x.push_back(std::log1p(times[i]));
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 2) throw std::invalid_argument("fit_decay_exponent: window has too few samples");
    const auto lsq = least_squares(x, y);
    DecayFit fit;
    fit.exponent = lsq.slope;
    fit.residual = lsq.rms;
    fit.window = window;
    fit.points = lsq.points;
    return fit;
}

ExponentialFit fit_exponential_rate(std::span<const double> times, std::span<const double> values,
                                    const std::array<double, 2>& window) {
    std::vector<double> x, y;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window[0] || times[i] > window[1]) continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("fit_exponential_rate: nonpositive value in window");
        x.push_back(times[i]);
        y.push_back(std::log(values[i]));
    }
    if (x.size() < 2)
        throw std::invalid_argument("fit_exponential_rate: window has too few samples");
    const auto lsq = least_squares(x, y);
    ExponentialFit fit;
    fit.rate = -lsq.slope;
    fit.r_squared = lsq.r_squared;
    fit.window = window;
    fit.points = lsq.points;
    return fit;
}

GapShapeFit abscissa_gap_shape(std::span<const double> k_magnitudes,
                               std::shared_ptr<const Truncation> trunc,
                               const ModelParams& params) {
    GapShapeFit fit;
    fit.c = std::numeric_limits<double>::infinity();
    for (double kmag : k_magnitudes) {
        const std::array<double, 3> k{kmag, 0.0, 0.0};
        const auto mode = build_mode_matrix(k, trunc, params);
        const double rate = -spectral_abscissa(mode, false);
        fit.rates.push_back(rate);
        const double shape = kmag * kmag / (1.0 + kmag * kmag);
        fit.c = std::min(fit.c, rate / shape);
    }
    return fit;
}

}  // namespace vfpns
