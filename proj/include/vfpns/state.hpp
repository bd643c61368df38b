#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vfpns/hermite.hpp"
#include "vfpns/spectral.hpp"

namespace vfpns {

/// Barotropic pressure P(n) = c0 n^γ and viscosity μ.
struct ModelParams {
    double mu = 1.0;
    double gamma = 1.4;
    double c0 = 1.0;

    double p_prime_1() const { return c0 * gamma; }  // P'(1)
    void validate() const;
};

/// Cross-term weights of the temporal energy functionals.  All "sufficiently
/// small" in the analysis; the defaults are validated by the sampled
/// norm-equivalence tests.
struct EnergyWeights {
    double tau1 = 0.05;
    double tau2 = 0.05;
    double tau3 = 0.005;
    double tau4 = 0.1;
    double tau5 = 0.1;
    double tau6 = 0.05;
    double tau7 = 0.05;
    double c_mixed_1 = 1.0;  // C_k multipliers of the |β| = k mixed terms
    double c_mixed_2 = 1.0;

    void validate() const;
};

/// Full perturbation triple (f, ρ, u): Hermite coefficients of f as one
/// spectral field per velocity index, plus the fluid fields.
struct SystemState {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const Truncation> trunc;
    std::vector<SpectralField> fcoeffs;  // trunc->size() entries
    SpectralField rho;
    std::vector<SpectralField> vel;  // grid->dim() entries
    double time = 0.0;

    SystemState(std::shared_ptr<const Grid> g, std::shared_ptr<const Truncation> t);

    int mode_vector_size() const { return trunc->size() + 1 + grid->dim(); }

    /// Per-mode vector (ĉ_α(k)..., ρ̂(k), û(k)) in the documented ordering.
    void gather_mode(int lin, std::span<Complex> out) const;
    void scatter_mode(int lin, std::span<const Complex> in);

    void set_zero();
    void axpy(double a, const SystemState& other);  // this += a * other
    void scale(double a);

    double max_abs() const;
    bool all_finite() const;
};

/// One time sample of every monitored quantity.  Serializes to a fixed
/// CSV column order and a JSON object with identical field names.
struct DiagnosticsRecord {
    double time = 0.0;
    double zq2 = 0.0;       // ‖f‖_{Z₂}
    double h2_f = 0.0;      // ‖f‖_{H²_{x,v}}
    double h2_rho = 0.0;
    double h2_u = 0.0;
    double energy_E = 0.0;
    double dissipation_D = 0.0;
    double energy_E1 = 0.0;
    double dissipation_D1 = 0.0;
    double mass_particle = 0.0;
    double mass_fluid = 0.0;
    double momentum_x = 0.0;
    double momentum_y = 0.0;
    double momentum_z = 0.0;
    double positivity_min = 0.0;
    double grad_f = 0.0;
    double grad_rho = 0.0;
    double grad_u = 0.0;

    static std::string csv_header();
    std::string csv_row() const;
    std::string json_object() const;
};

}  // namespace vfpns
