#pragma once

#include <optional>

#include "vfpns/mode_matrix.hpp"

namespace vfpns {

/// Per-mode Lyapunov functional 𝓔_F(f̂, ρ̂, û) with the interpolation
/// cross terms weighted by τ₄, τ₅.
double lyapunov_value(const std::array<double, 3>& k, const Truncation& trunc,
                      std::span<const Complex> mode_state, double tau4, double tau5,
                      double p_prime_1);

struct GapCertificate {
    double lambda_hat = 0.0;        // min over k of the certified rate
    std::vector<double> per_k_rate; // largest λ with 𝓔_F(t) ≤ e^{−λ|k|²t/(1+|k|²)}𝓔_F(0)
    double tau4 = 0.0;
    double tau5 = 0.0;
    bool ok = false;                // λ̂ > 0
};

struct CertificateOptions {
    double t_end = 50.0;
    double dt = 0.5;
    int trials = 5;
    unsigned long long seed = 12345;
};

/// Evolves random mode states under e^{tB(k)} and measures the decay of
/// 𝓔_F against the |k|²/(1+|k|²) shape.  k ≠ 0 required.
GapCertificate gap_certificate(std::span<const double> k_magnitudes,
                               std::shared_ptr<const Truncation> trunc, const ModelParams& params,
                               double tau4, double tau5, const CertificateOptions& opts = {});

/// gap_certificate with the default weights, falling back to a coarse grid
/// search over (τ₄, τ₅) when the certificate fails.
GapCertificate search_gap_certificate(std::span<const double> k_magnitudes,
                                      std::shared_ptr<const Truncation> trunc,
                                      const ModelParams& params,
                                      const CertificateOptions& opts = {});

struct DecayCurve {
    std::vector<double> times;
    std::vector<double> values;
    bool tail_warning = false;  // spectral mass beyond k_max above 1%
};

struct DecayCurveOptions {
    int m = 0;                 // spatial derivative order
    int shells = 400;          // log-spaced radial shells
    double k_min = 1e-3;
    double k_max = 20.0;
    bool low_freq_only = false;  // restrict by φ₀(k) (the low-frequency variant)
    double r0 = 1.0;
    double profile_min_k = 0.0;  // zero the profile below this radius
};

/// ( ∫ |k|^{2m} ‖e^{tB(k)} Û₀(k)‖² dk )^{1/2} with the flat radial profile
/// Û₀(k) = e^{−|k|²} ξ, ξ the unit (density, fluid-density) mix, which keeps
/// the integrand exactly radial.
DecayCurve semigroup_decay_curve(std::shared_ptr<const Truncation> trunc,
                                 const ModelParams& params, std::span<const double> times,
                                 const DecayCurveOptions& opts = {});

struct DecayFit {
    double exponent = 0.0;  // slope of log value against log(1+t)
    double residual = 0.0;  // rms residual of the fit
    std::array<double, 2> window{0.0, 0.0};
    int points = 0;
};

DecayFit fit_decay_exponent(std::span<const double> times, std::span<const double> values,
                            const std::array<double, 2>& window);

struct ExponentialFit {
    double rate = 0.0;       // λ in value ≈ C e^{−λt}
    double r_squared = 0.0;
    std::array<double, 2> window{0.0, 0.0};
    int points = 0;
};

ExponentialFit fit_exponential_rate(std::span<const double> times, std::span<const double> values,
                                    const std::array<double, 2>& window);

struct GapShapeFit {
    std::vector<double> rates;  // −abscissa per sampled k
    double c = 0.0;             // largest c with rate(k) ≥ c|k|²/(1+|k|²) for all k
};

GapShapeFit abscissa_gap_shape(std::span<const double> k_magnitudes,
                               std::shared_ptr<const Truncation> trunc, const ModelParams& params);

}  // namespace vfpns
