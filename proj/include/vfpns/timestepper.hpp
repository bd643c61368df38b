#pragma once

#include <functional>

#include "vfpns/dynamics.hpp"
#include "vfpns/energy.hpp"
#include "vfpns/mode_matrix.hpp"

namespace vfpns {

/// Exact linear propagators e^{ΔtB(k)} and ETD weights φ₁(ΔtB(k)) for
/// every mode inside the dealiasing band.  Rebuilding with identical
/// inputs is bit-identical.
class PropagatorTable {
  public:
    PropagatorTable(std::shared_ptr<const Grid> grid, std::shared_ptr<const Truncation> trunc,
                    const ModelParams& params, double dt);

    double dt() const { return dt_; }
    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    std::shared_ptr<const Truncation> trunc_ptr() const { return trunc_; }
    const ModelParams& params() const { return params_; }

    bool has_mode(int lin) const { return slot_[lin] >= 0; }
    const Eigen::MatrixXcd& exponential(int lin) const { return exp_[slot_[lin]]; }
    const Eigen::MatrixXcd& phi1(int lin) const { return phi_[slot_[lin]]; }

    /// Lattice positions of the band modes, in slot order.
    const std::vector<int>& band_modes() const { return modes_; }
    const Eigen::MatrixXcd& exponential_slot(int slot) const { return exp_[slot]; }
    const Eigen::MatrixXcd& phi1_slot(int slot) const { return phi_[slot]; }

    bool matches(const SystemState& state) const;

  private:
    std::shared_ptr<const Grid> grid_;
    std::shared_ptr<const Truncation> trunc_;
    ModelParams params_;
    double dt_;
    std::vector<int> slot_;   // lattice position → table slot, −1 outside band
    std::vector<int> modes_;  // slot → lattice position
    std::vector<Eigen::MatrixXcd> exp_;
    std::vector<Eigen::MatrixXcd> phi_;
};

PropagatorTable precompute_propagators(std::shared_ptr<const Grid> grid,
                                       std::shared_ptr<const Truncation> trunc,
                                       const ModelParams& params, double dt);

/// One ETD-RK2 step: U₁ = e^{hB}Uₙ + hφ₁(hB)N(Uₙ), then the (h/2)
/// φ₁-weighted correction with N(U₁).  With the nonlinearity disabled the
/// step is the exact linear flow.
SystemState step(const SystemState& state, const PropagatorTable& table,
                 TransformContext& ctx, bool linear_only = false);

struct IntegrateOptions {
    int sample_every = 10;       // full diagnostics cadence, in steps
    bool linear_only = false;
    bool energy_monitor = true;  // record 𝓔, 𝓓, 𝓔₁, 𝓓₁ at every step
    double r0_abs = 1.0;         // cutoff radius for the E1 diagnostics
    int probe_order = 4;         // positivity probe nodes per axis
    std::function<void(const SystemState&)> record_observer;  // at record cadence
};

struct IntegrationResult {
    std::vector<DiagnosticsRecord> records;
    std::vector<double> monitor_times;   // per-step energy monitor
    std::vector<double> monitor_energy;
    std::vector<double> monitor_dissipation;
    std::vector<double> monitor_energy1;
    std::vector<double> monitor_dissipation1;
    std::vector<double> monitor_low_freq_source;  // ‖∇²(a^L,b^L,ρ^L,u^L)‖²
    bool aborted = false;
    std::string abort_reason;
    SystemState final_state;
};

/// The (G5.20)-style source term ‖∇²(a^L, b^L, ρ^L, u^L)‖².
double low_freq_hessian_source(const SystemState& state, double r0);

IntegrationResult integrate(const SystemState& initial, double t_end,
                            const PropagatorTable& table, const ModelParams& params,
                            const EnergyWeights& weights, TransformContext& ctx,
                            const IntegrateOptions& opts = {});

}  // namespace vfpns
