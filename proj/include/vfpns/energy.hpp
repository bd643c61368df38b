#pragma once

#include "vfpns/quadrature.hpp"
#include "vfpns/state.hpp"

namespace vfpns {

struct FirstOrderFunctionals {
    double E = 0.0;
    double D = 0.0;
    double E0 = 0.0;
};

struct SecondOrderFunctionals {
    double E1 = 0.0;
    double D1 = 0.0;
    double E0H = 0.0;
};

struct ConservedQuantities {
    double particle_mass = 0.0;
    double fluid_mass = 0.0;
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
};

/// ‖f‖²_{H^s_{x,v}} = Σ_{|α|+|β| ≤ s} ‖∂_x^α ∂_v^β f‖², s ≤ 2.  Velocity
/// derivatives go through the closed ladder.
double mixed_norm_Hxv_sq(const SystemState& state, int s);

double l2v_l2x_sq(const SystemState& state);

/// ‖f‖_{Z_q} by Gauss-Hermite nodes in v and the grid L^q in x.
double zq_norm(const SystemState& state, double q, const QuadratureRule& rule,
               TransformContext& ctx);

/// Coefficient-space identity for q = 2: (Σ_α ‖c_α‖²_{L²})^{1/2}.
double zq2_coefficient_norm(const SystemState& state);

FirstOrderFunctionals first_order_functionals(const SystemState& state, const ModelParams& params,
                                              const EnergyWeights& weights);

/// r0 is the cutoff radius in absolute wavenumber units.
SecondOrderFunctionals second_order_functionals(const SystemState& state,
                                                const ModelParams& params,
                                                const EnergyWeights& weights, double r0);

ConservedQuantities conserved_quantities(const SystemState& state, TransformContext& ctx);

/// L¹ sizes of the conserved-quantity integrands, the normalization for
/// relative drift: ∫|a|, ∫|ρ| and ∫(|b| + (1+ρ)|u|).
struct ConservationScales {
    double mass_particle = 0.0;
    double mass_fluid = 0.0;
    double momentum = 0.0;
};

ConservationScales conservation_scales(const SystemState& state, TransformContext& ctx);

struct DriftReport {
    double mass_particle = 0.0;
    double mass_fluid = 0.0;
    double momentum = 0.0;
    double worst = 0.0;
};

/// Relative drift of the conserved triple per unit time: the largest
/// deviation |Q(t) − Q(0)| over any elapsed window of at least one time
/// unit, per unit elapsed time, against the initial L¹ scales.
DriftReport conservation_drift(const std::vector<DiagnosticsRecord>& records,
                               const ConservationScales& scales);

/// min over grid × probe nodes of F = M + √M f; truncation does not
/// guarantee positivity, so this is a reported monitor.
double positivity_min(const SystemState& state, const QuadratureRule& probe,
                      TransformContext& ctx);

DiagnosticsRecord make_diagnostics_record(const SystemState& state, const ModelParams& params,
                                          const EnergyWeights& weights, double r0,
                                          const QuadratureRule& probe, TransformContext& ctx);

}  // namespace vfpns
