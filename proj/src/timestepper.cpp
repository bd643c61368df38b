#include "vfpns/timestepper.hpp"

#include <cmath>
#include <stdexcept>

namespace vfpns {

PropagatorTable::PropagatorTable(std::shared_ptr<const Grid> grid,
                                 std::shared_ptr<const Truncation> trunc,
                                 const ModelParams& params, double dt)
    : grid_(std::move(grid)), trunc_(std::move(trunc)), params_(params), dt_(dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("PropagatorTable: dt must be positive");
    if (grid_->dim() != trunc_->dim())
        throw std::invalid_argument("PropagatorTable: grid and truncation dimensions differ");

    const int total = grid_->total_modes();
    slot_.assign(total, -1);
    int count = 0;
    for (int lin = 0; lin < total; ++lin)
        if (grid_->in_band(lin)) {
            slot_[lin] = count++;
            modes_.push_back(lin);
        }
    exp_.resize(count);
    phi_.resize(count);

    for (int lin = 0; lin < total; ++lin) {
        const int s = slot_[lin];
        if (s < 0) continue;
        const auto mode = build_mode_matrix(grid_->wavevector(lin), trunc_, params_);
        auto pair = exp_and_phi1(dt_ * mode.matrix);
        exp_[s] = std::move(pair.exponential);
        phi_[s] = std::move(pair.phi1);
    }
}

PropagatorTable precompute_propagators(std::shared_ptr<const Grid> grid,
                                       std::shared_ptr<const Truncation> trunc,
                                       const ModelParams& params, double dt) {
    return PropagatorTable(std::move(grid), std::move(trunc), params, dt);
}

bool PropagatorTable::matches(const SystemState& state) const {
    return *state.grid == *grid_ && state.trunc->dim() == trunc_->dim() &&
           state.trunc->max_degree() == trunc_->max_degree();
}

namespace {

void require_in_band(const SystemState& state) {
    const Grid& g = *state.grid;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        if (g.in_band(lin)) continue;
        bool zero = std::abs(state.rho.coeffs[lin]) == 0.0;
        for (const auto& u : state.vel) zero = zero && std::abs(u.coeffs[lin]) == 0.0;
        for (const auto& f : state.fcoeffs) zero = zero && std::abs(f.coeffs[lin]) == 0.0;
        if (!zero)
            throw std::invalid_argument(
                "step: state carries content outside the dealiasing band");
    }
}

}  // namespace

SystemState step(const SystemState& state, const PropagatorTable& table, TransformContext& ctx,
                 bool linear_only) {
    if (!table.matches(state)) throw std::invalid_argument("step: table does not match state");
    const int n = state.mode_vector_size();
    const double h = table.dt();
    const auto& modes = table.band_modes();
    const int nb = static_cast<int>(modes.size());

    // contiguous mode-major packing of the band modes
    auto pack = [&](const SystemState& s, std::vector<Complex>& buf) {
        buf.resize(static_cast<size_t>(nb) * n);
        const int na = s.trunc->size();
        const int d = s.grid->dim();
        for (int p = 0; p < na; ++p) {
            const auto& field = s.fcoeffs[p].coeffs;
            for (int slot = 0; slot < nb; ++slot) buf[size_t(slot) * n + p] = field[modes[slot]];
        }
        for (int slot = 0; slot < nb; ++slot) buf[size_t(slot) * n + na] = s.rho.coeffs[modes[slot]];
        for (int axis = 0; axis < d; ++axis) {
            const auto& field = s.vel[axis].coeffs;
            for (int slot = 0; slot < nb; ++slot)
                buf[size_t(slot) * n + na + 1 + axis] = field[modes[slot]];
        }
    };
    auto unpack = [&](const std::vector<Complex>& buf, SystemState& s) {
        const int na = s.trunc->size();
        const int d = s.grid->dim();
        for (int p = 0; p < na; ++p) {
            auto& field = s.fcoeffs[p].coeffs;
            for (int slot = 0; slot < nb; ++slot) field[modes[slot]] = buf[size_t(slot) * n + p];
        }
        for (int slot = 0; slot < nb; ++slot) s.rho.coeffs[modes[slot]] = buf[size_t(slot) * n + na];
        for (int axis = 0; axis < d; ++axis) {
            auto& field = s.vel[axis].coeffs;
            for (int slot = 0; slot < nb; ++slot)
                field[modes[slot]] = buf[size_t(slot) * n + na + 1 + axis];
        }
    };

    std::vector<Complex> x0, n0, stage_buf, n1;
    pack(state, x0);

    SystemState result(state.grid, state.trunc);
    result.time = state.time + h;

    if (linear_only) {
        stage_buf.resize(x0.size());
        for (int slot = 0; slot < nb; ++slot) {
            Eigen::Map<const Eigen::VectorXcd> x(x0.data() + size_t(slot) * n, n);
            Eigen::Map<Eigen::VectorXcd> y(stage_buf.data() + size_t(slot) * n, n);
            y.noalias() = table.exponential_slot(slot) * x;
        }
        unpack(stage_buf, result);
        return result;
    }

    const SystemState nl0 = nonlinear_rhs(state, table.params(), ctx);
    pack(nl0, n0);

    SystemState stage(state.grid, state.trunc);
    stage.time = state.time + h;
    stage_buf.resize(x0.size());
    for (int slot = 0; slot < nb; ++slot) {
        Eigen::Map<const Eigen::VectorXcd> x(x0.data() + size_t(slot) * n, n);
        Eigen::Map<const Eigen::VectorXcd> nl(n0.data() + size_t(slot) * n, n);
        Eigen::Map<Eigen::VectorXcd> y(stage_buf.data() + size_t(slot) * n, n);
        y.noalias() = table.exponential_slot(slot) * x;
        y.noalias() += h * (table.phi1_slot(slot) * nl);
    }
    unpack(stage_buf, stage);

    const SystemState nl1 = nonlinear_rhs(stage, table.params(), ctx);
    pack(nl1, n1);
    for (int slot = 0; slot < nb; ++slot) {
        Eigen::Map<Eigen::VectorXcd> y(stage_buf.data() + size_t(slot) * n, n);
        Eigen::Map<Eigen::VectorXcd> d0(n0.data() + size_t(slot) * n, n);
        Eigen::Map<const Eigen::VectorXcd> d1(n1.data() + size_t(slot) * n, n);
        d0 = d1 - d0;
        y.noalias() += 0.5 * h * (table.phi1_slot(slot) * d0);
    }
    unpack(stage_buf, result);
    return result;
}

double low_freq_hessian_source(const SystemState& state, double r0) {
    const Grid& g = *state.grid;
    const int d = g.dim();
    double total = 0.0;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const double ksq = g.k_norm_sq(lin);
        const double phi = phi0_cutoff(std::sqrt(ksq), r0);
        if (phi == 0.0) continue;
        double amp = std::norm(state.fcoeffs[0].coeffs[lin]) + std::norm(state.rho.coeffs[lin]);
        for (int i = 0; i < d; ++i)
            amp += std::norm(state.fcoeffs[1 + i].coeffs[lin]) +
                   std::norm(state.vel[i].coeffs[lin]);
        total += ksq * ksq * phi * phi * amp;
    }
    return g.volume() * total;
}

IntegrationResult integrate(const SystemState& initial, double t_end,
                            const PropagatorTable& table, const ModelParams& params,
                            const EnergyWeights& weights, TransformContext& ctx,
                            const IntegrateOptions& opts) {
    if (!(t_end >= initial.time))
        throw std::invalid_argument("integrate: t_end must not precede the state time");
    require_in_band(initial);

    const double h = table.dt();
    const long steps = std::lround((t_end - initial.time) / h);
    const auto probe = make_gauss_hermite(initial.trunc->dim(), opts.probe_order);

    IntegrationResult result{{}, {}, {}, {}, {}, {}, {}, false, {}, initial};
    SystemState current = initial;

    auto emit_record = [&](const SystemState& s) {
        result.records.push_back(
            make_diagnostics_record(s, params, weights, opts.r0_abs, probe, ctx));
        if (opts.record_observer) opts.record_observer(s);
    };
    auto emit_monitor = [&](const SystemState& s) {
        if (!opts.energy_monitor) return;
        const auto f = first_order_functionals(s, params, weights);
        const auto g = second_order_functionals(s, params, weights, opts.r0_abs);
        result.monitor_times.push_back(s.time);
        result.monitor_energy.push_back(f.E);
        result.monitor_dissipation.push_back(f.D);
        result.monitor_energy1.push_back(g.E1);
        result.monitor_dissipation1.push_back(g.D1);
        result.monitor_low_freq_source.push_back(low_freq_hessian_source(s, opts.r0_abs));
    };

    emit_record(current);
    emit_monitor(current);

    for (long s = 1; s <= steps; ++s) {
        SystemState next(initial.grid, initial.trunc);
        try {
            next = step(current, table, ctx, opts.linear_only);
        } catch (const StateQualityError& err) {
            result.aborted = true;
            result.abort_reason = err.what();
            break;
        }
        if (!next.all_finite()) {
            result.aborted = true;
            result.abort_reason = "non-finite values after step";
            break;
        }
        current = std::move(next);
        emit_monitor(current);
        if (s % opts.sample_every == 0 || s == steps) emit_record(current);
    }
    result.final_state = std::move(current);
    return result;
}

}  // namespace vfpns
