#pragma once

#include "vfpns/state.hpp"

namespace vfpns {

enum class InitialDataKind { torus_random, box_bump, mode_probe };

struct InitialDataOptions {
    InitialDataKind kind = InitialDataKind::torus_random;
    unsigned long long seed = 1;
    double epsilon = 1e-2;             // target H² size
    std::array<int, 3> probe_k{1, 0, 0};  // mode_probe wavevector (integer lattice)
    int probe_alpha = 0;               // mode_probe velocity index position
};

/// torus_random: band-limited (|k| ≤ n/4) random smooth fields scaled to
/// H² size ε, then projected onto the conserved-quantity constraints of
/// the torus theory (∫a = ∫ρ = 0, ∫(b+(1+ρ)u) = 0).
/// box_bump: Gaussian envelopes of width L/32 centered in the box.
/// mode_probe: a single (k, α) excitation, kept real.
/// Deterministic per seed.
SystemState generate_initial_data(const InitialDataOptions& opts,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const Truncation> trunc,
                                  TransformContext& ctx);

/// √(‖f‖²_{H²_{x,v}} + ‖(ρ,u)‖²_{H²}), the smallness measure of the data.
double state_h2_norm(const SystemState& state);

}  // namespace vfpns
