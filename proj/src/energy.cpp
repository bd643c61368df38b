#include "vfpns/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vfpns {

namespace {

// Spatial multi-indices |a| ≤ s with their k-multipliers Π k_i^{2a_i}.
struct SpatialIndexSet {
    std::vector<std::array<int, 3>> list;

    static SpatialIndexSet up_to(int dim, int s) {
        SpatialIndexSet set;
        std::array<int, 3> a{0, 0, 0};
        auto emit = [&](auto&& self, int axis) -> void {
            if (axis == dim) {
                if (a[0] + a[1] + a[2] <= s) set.list.push_back(a);
                return;
            }
            for (int j = 0; j <= s; ++j) {
                a[axis] = j;
                self(self, axis + 1);
            }
            a[axis] = 0;
        };
        emit(emit, 0);
        return set;
    }

    static double multiplier(const std::array<int, 3>& a, const std::array<double, 3>& k) {
        double m = 1.0;
        for (int axis = 0; axis < 3; ++axis)
            for (int j = 0; j < a[axis]; ++j) m *= k[axis] * k[axis];
        return m;
    }
};

// Velocity derivative combinations |β| ≤ 2 as axis sequences.
struct BetaSet {
    std::vector<std::vector<int>> axes;   // axis sequence to apply
    std::vector<int> order;               // |β|

    static BetaSet up_to_two(int dim) {
        BetaSet set;
        set.axes.push_back({});
        set.order.push_back(0);
        for (int i = 0; i < dim; ++i) {
            set.axes.push_back({i});
            set.order.push_back(1);
        }
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                set.axes.push_back({i, j});
                set.order.push_back(2);
            }
        return set;
    }
};

void apply_beta(const Truncation& tr, const std::vector<int>& axes, std::span<const Complex> in,
                std::span<Complex> out, std::span<Complex> scratch) {
    if (axes.empty()) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    if (axes.size() == 1) {
        ladder_differentiate_v(tr, axes[0], in, out);
        return;
    }
    ladder_differentiate_v(tr, axes[0], in, scratch);
    ladder_differentiate_v(tr, axes[1], scratch, out);
}

double norm_sq(std::span<const Complex> x) {
    double s = 0.0;
    for (const auto& v : x) s += std::norm(v);
    return s;
}

}  // namespace

double mixed_norm_Hxv_sq(const SystemState& state, int s) {
    if (s < 0 || s > 2) throw std::invalid_argument("mixed_norm_Hxv_sq: s must be 0, 1 or 2");
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const auto spatial = SpatialIndexSet::up_to(g.dim(), s);
    const auto betas = BetaSet::up_to_two(tr.dim());

    std::vector<Complex> vf(na), out(na), scratch(na);
    double total = 0.0;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        for (int p = 0; p < na; ++p) vf[p] = state.fcoeffs[p].coeffs[lin];
        const auto k = g.wavevector(lin);
        // per-β squared norms once per mode
        std::array<double, 10> sb{};
        for (size_t b = 0; b < betas.axes.size(); ++b) {
            apply_beta(tr, betas.axes[b], vf, out, scratch);
            sb[b] = norm_sq(out);
        }
        double contrib = 0.0;
        for (const auto& a : spatial.list) {
            const int order_a = a[0] + a[1] + a[2];
            const double mult = SpatialIndexSet::multiplier(a, k);
            for (size_t b = 0; b < betas.axes.size(); ++b)
                if (order_a + betas.order[b] <= s) contrib += mult * sb[b];
        }
        total += contrib;
    }
    return g.volume() * total;
}

double l2v_l2x_sq(const SystemState& state) {
    double total = 0.0;
    for (const auto& f : state.fcoeffs) total += l2_norm_sq(f);
    return total;
}

double zq2_coefficient_norm(const SystemState& state) { return std::sqrt(l2v_l2x_sq(state)); }

double zq_norm(const SystemState& state, double q, const QuadratureRule& rule,
               TransformContext& ctx) {
    if (q < 1.0) throw std::invalid_argument("zq_norm: q must be >= 1");
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int points = g.total_modes();

    std::vector<std::vector<Complex>> phys(na);
    for (int p = 0; p < na; ++p) phys[p] = ctx.to_physical(state.fcoeffs[p]);

    const HermiteTable table = make_hermite_table(rule, tr.max_degree());
    std::vector<Complex> poly(points);
    double total = 0.0;
    for (int node = 0; node < rule.node_count(); ++node) {
        std::array<int, 3> digits{0, 0, 0};
        int rem = node;
        for (int axis = rule.dim - 1; axis >= 0; --axis) {
            digits[axis] = rem % rule.order;
            rem /= rule.order;
        }
        std::fill(poly.begin(), poly.end(), Complex(0.0));
        for (int p = 0; p < na; ++p) {
            double basis = 1.0;
            for (int axis = 0; axis < tr.dim(); ++axis)
                basis *= table.value(tr.entry(p, axis), digits[axis]);
            if (basis == 0.0) continue;
            const auto& field = phys[p];
            for (int i = 0; i < points; ++i) poly[i] += basis * field[i];
        }
        // f(·,v) = poly(·)√M(v), and the node weight already carries M(v)dv,
        // so ‖f(·,v)‖²_{L^q} dv integrates to w · ‖poly‖²_{L^q}.
        const double lq = lebesgue_norm(poly, g, q);
        total += rule.weight(node) * lq * lq;
    }
    return std::sqrt(total);
}

namespace {

struct ModeScalars {
    Complex a;
    std::array<Complex, 3> b{};
    Complex rho;
    std::array<Complex, 3> u{};
};

ModeScalars gather_scalars(const SystemState& state, int lin) {
    ModeScalars m;
    m.a = state.fcoeffs[0].coeffs[lin];
    const int d = state.grid->dim();
    for (int i = 0; i < d; ++i) m.b[i] = state.fcoeffs[1 + i].coeffs[lin];
    m.rho = state.rho.coeffs[lin];
    for (int i = 0; i < d; ++i) m.u[i] = state.vel[i].coeffs[lin];
    return m;
}

Complex gamma_of(const Truncation& tr, std::span<const Complex> micro, int i, int j) {
    return gamma_moment(tr, micro, i, j);
}

}  // namespace

FirstOrderFunctionals first_order_functionals(const SystemState& state, const ModelParams& params,
                                              const EnergyWeights& weights) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int d = g.dim();
    const auto spatial2 = SpatialIndexSet::up_to(d, 2);
    const auto spatial1 = SpatialIndexSet::up_to(d, 1);
    const auto betas = BetaSet::up_to_two(d);

    std::vector<Complex> vf(na), micro(na), out(na), scratch(na);

    double hxv_sq = 0.0;        // ‖f‖²_{H²_{x,v}}
    double h2_fluid = 0.0;      // ‖(ρ,u)‖²_{H²}
    double e0 = 0.0;
    double cross_urho = 0.0;    // Σ_{|a|≤1} ∫ ∂ᵃu·∂ᵃ∇ρ
    double mixed_micro = 0.0;   // Σ C_k Σ ‖∂ᵃ∂^β micro‖², 1 ≤ |β| = k
    double d_total = 0.0;

    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const auto ms = gather_scalars(state, lin);
        bool empty = ms.rho == Complex(0.0);
        for (int i = 0; i < d && empty; ++i) empty = ms.u[i] == Complex(0.0);
        for (int p = 0; p < na && empty; ++p) empty = state.fcoeffs[p].coeffs[lin] == Complex(0.0);
        if (empty) continue;

        for (int p = 0; p < na; ++p) vf[p] = state.fcoeffs[p].coeffs[lin];
        std::copy(vf.begin(), vf.end(), micro.begin());
        for (int p = 0; p <= d; ++p) micro[p] = 0.0;

        const auto k = g.wavevector(lin);
        double ksq = 0.0;
        for (int i = 0; i < d; ++i) ksq += k[i] * k[i];

        double h2mult = 0.0;
        for (const auto& a : spatial2.list) h2mult += SpatialIndexSet::multiplier(a, k);
        double h1mult = 0.0;
        for (const auto& a : spatial1.list) h1mult += SpatialIndexSet::multiplier(a, k);

        // β-resolved norms/ν-forms of the micro part, and full-f norms
        std::array<double, 10> s_full{}, s_micro{}, nu_micro{};
        for (size_t b = 0; b < betas.axes.size(); ++b) {
            apply_beta(tr, betas.axes[b], vf, out, scratch);
            s_full[b] = norm_sq(out);
            apply_beta(tr, betas.axes[b], micro, out, scratch);
            s_micro[b] = norm_sq(out);
            nu_micro[b] = nu_form_sq(tr, out);
        }

        // ‖f‖²_{H²_{x,v}}
        for (const auto& a : spatial2.list) {
            const int oa = a[0] + a[1] + a[2];
            const double mult = SpatialIndexSet::multiplier(a, k);
            for (size_t b = 0; b < betas.axes.size(); ++b)
                if (oa + betas.order[b] <= 2) hxv_sq += mult * s_full[b];
        }

        double fluid_sq = std::norm(ms.rho);
        for (int i = 0; i < d; ++i) fluid_sq += std::norm(ms.u[i]);
        h2_fluid += h2mult * fluid_sq;

        // 𝓔₀ = Σ_{|a|≤1}[Σ_ij ∂ᵃ(∂_i b_j + ∂_j b_i)·∂ᵃΓ_ij(micro) − ∂ᵃa·∂ᵃ∇·b]
        double e0_k = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const Complex sym = Complex(0.0, k[i]) * ms.b[j] + Complex(0.0, k[j]) * ms.b[i];
                e0_k += (sym * std::conj(gamma_of(tr, micro, i, j))).real();
            }
        Complex divb(0.0);
        for (int i = 0; i < d; ++i) divb += Complex(0.0, k[i]) * ms.b[i];
        e0_k -= (ms.a * std::conj(divb)).real();
        e0 += h1mult * e0_k;

        double cross_k = 0.0;
        for (int i = 0; i < d; ++i)
            cross_k += (ms.u[i] * std::conj(Complex(0.0, k[i]) * ms.rho)).real();
        cross_urho += h1mult * cross_k;

        for (size_t b = 0; b < betas.axes.size(); ++b) {
            if (betas.order[b] == 1)
                mixed_micro += weights.c_mixed_1 * h1mult * s_micro[b];
            else if (betas.order[b] == 2)
                mixed_micro += weights.c_mixed_2 * s_micro[b];
        }

        // 𝓓 per (G3.45)
        double bu_sq = 0.0;
        for (int i = 0; i < d; ++i) bu_sq += std::norm(ms.b[i] - ms.u[i]);
        double abrho_sq = std::norm(ms.a) + std::norm(ms.rho);
        for (int i = 0; i < d; ++i) abrho_sq += std::norm(ms.b[i]);
        double u_sq = 0.0;
        for (int i = 0; i < d; ++i) u_sq += std::norm(ms.u[i]);

        double d_k = h2mult * bu_sq + ksq * h1mult * abrho_sq + ksq * h2mult * u_sq;
        d_k += h2mult * nu_micro[0];
        for (const auto& a : spatial2.list) {
            const int oa = a[0] + a[1] + a[2];
            const double mult = SpatialIndexSet::multiplier(a, k);
            for (size_t b = 0; b < betas.axes.size(); ++b)
                if (oa + betas.order[b] <= 2) d_k += mult * nu_micro[b];
        }
        d_total += d_k;
    }

    const double vol = g.volume();
    FirstOrderFunctionals out_f;
    out_f.E0 = vol * e0;
    out_f.E = vol * (hxv_sq + h2_fluid) + weights.tau1 * out_f.E0 + weights.tau2 * vol * cross_urho +
              weights.tau3 * vol * mixed_micro;
    out_f.D = vol * d_total;
    (void)params;
    return out_f;
}

SecondOrderFunctionals second_order_functionals(const SystemState& state,
                                                const ModelParams& params,
                                                const EnergyWeights& weights, double r0) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int d = g.dim();

    std::vector<Complex> vf(na), micro(na);

    double hess_f = 0.0;     // ‖∇²f‖²_{L²_v(L²)}
    double hess_fluid = 0.0; // ‖∇²(u,ρ)‖²
    double e0h = 0.0;
    double cross = 0.0;      // ∫ ∇div u · ∇ρ^H
    double d1 = 0.0;

    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const auto ms = gather_scalars(state, lin);
        bool empty = ms.rho == Complex(0.0);
        for (int i = 0; i < d && empty; ++i) empty = ms.u[i] == Complex(0.0);
        for (int p = 0; p < na && empty; ++p) empty = state.fcoeffs[p].coeffs[lin] == Complex(0.0);
        if (empty) continue;

        for (int p = 0; p < na; ++p) vf[p] = state.fcoeffs[p].coeffs[lin];
        std::copy(vf.begin(), vf.end(), micro.begin());
        for (int p = 0; p <= d; ++p) micro[p] = 0.0;

        const auto k = g.wavevector(lin);
        double ksq = 0.0;
        for (int i = 0; i < d; ++i) ksq += k[i] * k[i];
        const double k4 = ksq * ksq;
        const double phi1 = 1.0 - phi0_cutoff(std::sqrt(ksq), r0);

        hess_f += k4 * norm_sq(vf);
        double fluid_sq = std::norm(ms.rho);
        for (int i = 0; i < d; ++i) fluid_sq += std::norm(ms.u[i]);
        hess_fluid += k4 * fluid_sq;

        // 𝓔₀^H with ∇ on both factors and the high cutoff on both
        double e0h_k = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const Complex sym = Complex(0.0, k[i]) * ms.b[j] + Complex(0.0, k[j]) * ms.b[i];
                e0h_k += (sym * std::conj(gamma_of(tr, micro, i, j))).real();
            }
        Complex divb(0.0);
        for (int i = 0; i < d; ++i) divb += Complex(0.0, k[i]) * ms.b[i];
        e0h_k -= (ms.a * std::conj(divb)).real();
        e0h += ksq * phi1 * phi1 * e0h_k;

        // ∫∇div u · ∇ρ^H
        Complex divu(0.0);
        for (int i = 0; i < d; ++i) divu += Complex(0.0, k[i]) * ms.u[i];
        for (int i = 0; i < d; ++i) {
            const Complex lhs = Complex(0.0, k[i]) * divu;
            const Complex rhs = Complex(0.0, k[i]) * (phi1 * ms.rho);
            cross += (lhs * std::conj(rhs)).real();
        }

        double bu_sq = 0.0, u_sq = 0.0;
        for (int i = 0; i < d; ++i) {
            bu_sq += std::norm(ms.b[i] - ms.u[i]);
            u_sq += std::norm(ms.u[i]);
        }
        double abrho_sq = std::norm(ms.a) + std::norm(ms.rho);
        for (int i = 0; i < d; ++i) abrho_sq += std::norm(ms.b[i]);
        d1 += k4 * (bu_sq + phi1 * phi1 * abrho_sq + u_sq + nu_form_sq(tr, micro));
    }

    const double vol = g.volume();
    SecondOrderFunctionals out;
    out.E0H = vol * e0h;
    out.E1 = vol * (hess_f + hess_fluid) + weights.tau6 * out.E0H - weights.tau7 * vol * cross;
    out.D1 = vol * d1;
    (void)params;
    return out;
}

ConservedQuantities conserved_quantities(const SystemState& state, TransformContext& ctx) {
    const Grid& g = *state.grid;
    const double vol = g.volume();
    const int zero = g.linear_of_signed({0, 0, 0});
    ConservedQuantities q;
    q.particle_mass = vol * state.fcoeffs[0].coeffs[zero].real();
    q.fluid_mass = vol * state.rho.coeffs[zero].real();
    for (int i = 0; i < g.dim(); ++i) {
        const auto rho_u = dealiased_product(state.rho, state.vel[i], ctx);
        q.momentum[i] = vol * (state.fcoeffs[1 + i].coeffs[zero].real() +
                               state.vel[i].coeffs[zero].real() + rho_u.coeffs[zero].real());
    }
    return q;
}

ConservationScales conservation_scales(const SystemState& state, TransformContext& ctx) {
    const Grid& g = *state.grid;
    const double cell = g.volume() / g.total_modes();
    ConservationScales scales;
    auto l1 = [&](const SpectralField& f) {
        double total = 0.0;
        for (const auto& v : ctx.to_physical(f)) total += std::abs(v.real());
        return cell * total;
    };
    scales.mass_particle = l1(state.fcoeffs[0]);
    scales.mass_fluid = l1(state.rho);
    const auto rho_p = ctx.to_physical(state.rho);
    for (int i = 0; i < g.dim(); ++i) {
        const auto b_p = ctx.to_physical(state.fcoeffs[1 + i]);
        const auto u_p = ctx.to_physical(state.vel[i]);
        double total = 0.0;
        for (int x = 0; x < g.total_modes(); ++x)
            total += std::abs(b_p[x].real()) + (1.0 + rho_p[x].real()) * std::abs(u_p[x].real());
        scales.momentum += cell * total;
    }
    return scales;
}

DriftReport conservation_drift(const std::vector<DiagnosticsRecord>& records,
                               const ConservationScales& scales) {
    DriftReport drift;
    if (records.size() < 2) return drift;
    const auto& r0 = records.front();
    for (const auto& r : records) {
        // rates over sub-unit windows would divide a one-off deviation by an
        // arbitrarily small elapsed time; a drift is secular by definition
        const double elapsed = std::max(r.time - r0.time, 1.0);
        if (r.time <= r0.time) continue;
        auto rate = [&](double v, double v0, double scale) {
            return std::abs(v - v0) / elapsed / std::max(scale, 1e-300);
        };
        drift.mass_particle = std::max(
            drift.mass_particle, rate(r.mass_particle, r0.mass_particle, scales.mass_particle));
        drift.mass_fluid =
            std::max(drift.mass_fluid, rate(r.mass_fluid, r0.mass_fluid, scales.mass_fluid));
        const double dm = std::abs(r.momentum_x - r0.momentum_x) +
                          std::abs(r.momentum_y - r0.momentum_y) +
                          std::abs(r.momentum_z - r0.momentum_z);
        drift.momentum =
            std::max(drift.momentum, dm / elapsed / std::max(scales.momentum, 1e-300));
    }
    drift.worst = std::max({drift.mass_particle, drift.mass_fluid, drift.momentum});
    return drift;
}

double positivity_min(const SystemState& state, const QuadratureRule& probe,
                      TransformContext& ctx) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int points = g.total_modes();

    std::vector<std::vector<Complex>> phys(na);
    for (int p = 0; p < na; ++p) phys[p] = ctx.to_physical(state.fcoeffs[p]);

    const HermiteTable table = make_hermite_table(probe, tr.max_degree());
    double minimum = std::numeric_limits<double>::infinity();
    std::vector<double> basis(na);
    for (int node = 0; node < probe.node_count(); ++node) {
        std::array<int, 3> digits{0, 0, 0};
        int rem = node;
        for (int axis = probe.dim - 1; axis >= 0; --axis) {
            digits[axis] = rem % probe.order;
            rem /= probe.order;
        }
        for (int p = 0; p < na; ++p) {
            double b = 1.0;
            for (int axis = 0; axis < tr.dim(); ++axis)
                b *= table.value(tr.entry(p, axis), digits[axis]);
            basis[p] = b;
        }
        const double m_v = maxwellian(tr.dim(), probe.node(node));
        for (int i = 0; i < points; ++i) {
            double poly = 0.0;
            for (int p = 0; p < na; ++p) poly += basis[p] * phys[p][i].real();
            minimum = std::min(minimum, m_v * (1.0 + poly));
        }
    }
    return minimum;
}

DiagnosticsRecord make_diagnostics_record(const SystemState& state, const ModelParams& params,
                                          const EnergyWeights& weights, double r0,
                                          const QuadratureRule& probe, TransformContext& ctx) {
    DiagnosticsRecord rec;
    rec.time = state.time;
    rec.zq2 = zq2_coefficient_norm(state);
    rec.h2_f = std::sqrt(mixed_norm_Hxv_sq(state, 2));
    rec.h2_rho = std::sqrt(sobolev_norm_sq(state.rho, 2));
    double h2u = 0.0, grad_u = 0.0;
    for (const auto& u : state.vel) {
        h2u += sobolev_norm_sq(u, 2);
        for (int axis = 0; axis < state.grid->dim(); ++axis)
            grad_u += l2_norm_sq(derivative(u, axis));
    }
    rec.h2_u = std::sqrt(h2u);

    const auto first = first_order_functionals(state, params, weights);
    rec.energy_E = first.E;
    rec.dissipation_D = first.D;
    const auto second = second_order_functionals(state, params, weights, r0);
    rec.energy_E1 = second.E1;
    rec.dissipation_D1 = second.D1;

    const auto cons = conserved_quantities(state, ctx);
    rec.mass_particle = cons.particle_mass;
    rec.mass_fluid = cons.fluid_mass;
    rec.momentum_x = cons.momentum[0];
    rec.momentum_y = cons.momentum[1];
    rec.momentum_z = cons.momentum[2];

    rec.positivity_min = positivity_min(state, probe, ctx);

    double grad_f = 0.0;
    for (const auto& f : state.fcoeffs)
        for (int axis = 0; axis < state.grid->dim(); ++axis)
            grad_f += l2_norm_sq(derivative(f, axis));
    double grad_rho = 0.0;
    for (int axis = 0; axis < state.grid->dim(); ++axis)
        grad_rho += l2_norm_sq(derivative(state.rho, axis));
    rec.grad_f = std::sqrt(grad_f);
    rec.grad_rho = std::sqrt(grad_rho);
    rec.grad_u = std::sqrt(grad_u);
    return rec;
}

}  // namespace vfpns
