#pragma once

#include <stdexcept>

#include "vfpns/state.hpp"

namespace vfpns {

/// Raised when the state leaves the admissible region (1+ρ ≤ 0 on the
/// grid, or non-finite values).  The simulation aborts rather than clamps.
class StateQualityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Constant-coefficient part: ∂_t f = −v·∇_x f + u·v√M + Lf,
/// ∂_t ρ = −div u, ∂_t u = −P'(1)∇ρ + μΔu − (u − b).
SystemState linear_rhs(const SystemState& state, const ModelParams& params);

/// Remainder of (I-3)–(I-5): kinetic −(1+ρ)u·∇_v f + ½(1+ρ)u·v f + ρLf
/// + ρu·v√M; fluid S_ρ, S_u.  Spatial products use the 2/3 rule.
SystemState nonlinear_rhs(const SystemState& state, const ModelParams& params,
                          TransformContext& ctx);

SystemState full_rhs(const SystemState& state, const ModelParams& params, TransformContext& ctx);

/// Independent assembly of the unsplit equations, used as a cross-check
/// against linear_rhs + nonlinear_rhs.
SystemState direct_full_rhs(const SystemState& state, const ModelParams& params,
                            TransformContext& ctx);

/// c0·γ·(1+ρ)^{γ−2} pointwise on the physical grid.
std::vector<double> pressure_coefficient(std::span<const Complex> rho_physical,
                                         const ModelParams& params);

}  // namespace vfpns
