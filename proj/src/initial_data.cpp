#include "vfpns/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "vfpns/energy.hpp"

namespace vfpns {

double state_h2_norm(const SystemState& state) {
    double total = mixed_norm_Hxv_sq(state, 2) + sobolev_norm_sq(state.rho, 2);
    for (const auto& u : state.vel) total += sobolev_norm_sq(u, 2);
    return std::sqrt(total);
}

namespace {

void symmetrize(SpectralField& f) {
    const Grid& g = *f.grid;
    SpectralField sym(f.grid);
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const int neg = g.conjugate_mode(lin);
        sym.coeffs[lin] = 0.5 * (f.coeffs[lin] + std::conj(f.coeffs[neg]));
    }
    f = sym;
}

SystemState torus_random(const InitialDataOptions& opts, std::shared_ptr<const Grid> grid,
                         std::shared_ptr<const Truncation> trunc, TransformContext& ctx) {
    SystemState state(grid, trunc);
    const Grid& g = *grid;
    const int band = g.n() / 4;
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto fill = [&](SpectralField& f, double scale) {
        for (int lin = 0; lin < g.total_modes(); ++lin) {
            const auto m = g.signed_indices_of(lin);
            double msq = 0.0;
            bool inside = true;
            for (int axis = 0; axis < g.dim(); ++axis) {
                if (std::abs(m[axis]) > band) inside = false;
                msq += double(m[axis]) * m[axis];
            }
            if (!inside) continue;
            const double envelope = std::exp(-msq / double(band * band));
            f.coeffs[lin] = scale * envelope * Complex(gauss(rng), gauss(rng));
        }
        symmetrize(f);
    };

    for (int p = 0; p < trunc->size(); ++p)
        fill(state.fcoeffs[p], std::pow(0.5, trunc->degree(p)));
    fill(state.rho, 1.0);
    for (auto& u : state.vel) fill(u, 1.0);

    const double h2 = state_h2_norm(state);
    if (h2 > 0.0) state.scale(opts.epsilon / h2);

    // conserved-quantity projection: ∫a = ∫ρ = 0, ∫(b + (1+ρ)u) = 0
    const int zero = g.linear_of_signed({0, 0, 0});
    state.fcoeffs[0].coeffs[zero] = 0.0;
    state.rho.coeffs[zero] = 0.0;
    for (int i = 0; i < g.dim(); ++i) {
        const auto rho_u = dealiased_product(state.rho, state.vel[i], ctx);
        state.fcoeffs[1 + i].coeffs[zero] =
            -(state.vel[i].coeffs[zero] + rho_u.coeffs[zero]);
    }
    return state;
}

SystemState box_bump(const InitialDataOptions& opts, std::shared_ptr<const Grid> grid,
                     std::shared_ptr<const Truncation> trunc, TransformContext& ctx) {
    SystemState state(grid, trunc);
    const Grid& g = *grid;
    const double sigma = g.length() / 32.0;
    const double center = 0.5 * g.length();
    const double dx = g.length() / g.n();

    std::vector<Complex> envelope(g.total_modes());
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const auto m = g.indices_of(lin);
        double r2 = 0.0;
        for (int axis = 0; axis < g.dim(); ++axis) {
            const double x = m[axis] * dx - center;
            r2 += x * x;
        }
        envelope[lin] = std::exp(-r2 / (2.0 * sigma * sigma));
    }
    SpectralField bump = ctx.to_spectral(envelope);
    truncate_to_band(bump);

    state.fcoeffs[0] = bump;  // particle density
    state.rho = bump;
    state.vel[0] = bump;

    const double h2 = state_h2_norm(state);
    if (h2 > 0.0) state.scale(opts.epsilon / h2);
    return state;
}

SystemState mode_probe(const InitialDataOptions& opts, std::shared_ptr<const Grid> grid,
                       std::shared_ptr<const Truncation> trunc) {
    SystemState state(grid, trunc);
    const Grid& g = *grid;
    if (opts.probe_alpha < 0 || opts.probe_alpha >= trunc->size())
        throw std::invalid_argument("mode_probe: velocity index out of range");
    const int lin = g.linear_of_signed(opts.probe_k);
    if (!g.in_band(lin))
        throw std::invalid_argument("mode_probe: wavevector outside the dealiasing band");
    const int neg = g.conjugate_mode(lin);
    state.fcoeffs[opts.probe_alpha].coeffs[lin] = 0.5 * opts.epsilon;
    state.fcoeffs[opts.probe_alpha].coeffs[neg] += 0.5 * opts.epsilon;
    return state;
}

}  // namespace

SystemState generate_initial_data(const InitialDataOptions& opts,
                                  std::shared_ptr<const Grid> grid,
                                  std::shared_ptr<const Truncation> trunc,
                                  TransformContext& ctx) {
    if (!(opts.epsilon > 0.0))
        throw std::invalid_argument("generate_initial_data: epsilon must be positive");
    if (grid->dim() != trunc->dim())
        throw std::invalid_argument("generate_initial_data: dimension mismatch");
    switch (opts.kind) {
        case InitialDataKind::torus_random:
            return torus_random(opts, grid, trunc, ctx);
        case InitialDataKind::box_bump:
            return box_bump(opts, grid, trunc, ctx);
        case InitialDataKind::mode_probe:
            return mode_probe(opts, grid, trunc);
    }
    throw std::logic_error("generate_initial_data: unknown kind");
}

}  // namespace vfpns
