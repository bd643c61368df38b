#include "vfpns/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace vfpns {

namespace {

using Field = std::vector<Complex>;

void check_admissible(std::span<const Complex> rho_phys) {
    for (const auto& r : rho_phys) {
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
            throw StateQualityError("state has non-finite density values");
        if (1.0 + r.real() <= 0.0)
            throw StateQualityError("density reached vacuum: 1+rho <= 0 on the grid");
    }
}

Field physical_of(const SpectralField& f, TransformContext& ctx) {
    Field out(f.grid->total_modes());
    ctx.to_physical_banded(f, out);
    return out;
}

SpectralField spectral_of(const Field& phys, TransformContext& ctx) {
    SpectralField out(ctx.grid_ptr());
    ctx.to_spectral_banded(phys, out);
    return out;
}

}  // namespace

SystemState linear_rhs(const SystemState& state, const ModelParams& params) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int d = g.dim();
    const double p1 = params.p_prime_1();

    SystemState out(state.grid, state.trunc);
    out.time = state.time;

    std::vector<Complex> vf(na), rhs(na), ladder(na);
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const auto k = g.wavevector(lin);
        double ksq = 0.0;
        for (int i = 0; i < d; ++i) ksq += k[i] * k[i];

        for (int p = 0; p < na; ++p) vf[p] = state.fcoeffs[p].coeffs[lin];
        ladder_fokker_planck(tr, vf, rhs);
        for (int axis = 0; axis < d; ++axis) {
            if (k[axis] == 0.0) continue;
            ladder_multiply_v(tr, axis, vf, ladder);
            const Complex ik(0.0, -k[axis]);  // −i k_axis
            for (int p = 0; p < na; ++p) rhs[p] += ik * ladder[p];
        }
        for (int axis = 0; axis < d; ++axis) rhs[1 + axis] += state.vel[axis].coeffs[lin];
        for (int p = 0; p < na; ++p) out.fcoeffs[p].coeffs[lin] = rhs[p];

        Complex div_u(0.0);
        for (int axis = 0; axis < d; ++axis)
            div_u += Complex(0.0, k[axis]) * state.vel[axis].coeffs[lin];
        out.rho.coeffs[lin] = -div_u;

        for (int axis = 0; axis < d; ++axis) {
            out.vel[axis].coeffs[lin] = -Complex(0.0, k[axis]) * p1 * state.rho.coeffs[lin] -
                                        (params.mu * ksq + 1.0) * state.vel[axis].coeffs[lin] +
                                        state.fcoeffs[1 + axis].coeffs[lin];
        }
    }
    return out;
}

std::vector<double> pressure_coefficient(std::span<const Complex> rho_physical,
                                         const ModelParams& params) {
    std::vector<double> coeff(rho_physical.size());
    for (size_t i = 0; i < rho_physical.size(); ++i) {
        const double n = 1.0 + rho_physical[i].real();
        if (n <= 0.0)
            throw StateQualityError("pressure_coefficient: nonpositive density");
        coeff[i] = params.c0 * params.gamma * std::pow(n, params.gamma - 2.0);
    }
    return coeff;
}

SystemState nonlinear_rhs(const SystemState& state, const ModelParams& params,
                          TransformContext& ctx) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int d = g.dim();
    const int points = g.total_modes();
    const double p1 = params.p_prime_1();

    SystemState out(state.grid, state.trunc);
    out.time = state.time;

    const Field rho_p = physical_of(state.rho, ctx);
    check_admissible(rho_p);
    std::array<Field, 3> u_p;
    for (int axis = 0; axis < d; ++axis) u_p[axis] = physical_of(state.vel[axis], ctx);

    // w_i = dealiased ρ u_i, needed both spectrally (for the √M row) and
    // physically (second factor of the (1+ρ)u products).
    std::array<Field, 3> w_p;
    std::array<SpectralField, 3> w_s{SpectralField(state.grid), SpectralField(state.grid),
                                     SpectralField(state.grid)};
    for (int axis = 0; axis < d; ++axis) {
        Field prod(points);
        for (int i = 0; i < points; ++i) prod[i] = rho_p[i] * u_p[axis][i];
        w_s[axis] = spectral_of(prod, ctx);
        w_p[axis] = ctx.to_physical(w_s[axis]);
    }

    // kinetic terms per velocity index.  (∂_{v_i} − ½v_i) is exactly the
    // lowering operator, (g_i f)_α = −√(α_i) c_{α−e_i}, so the whole
    // assembly works pointwise on the transformed coefficient fields.
    std::vector<Field> c_phys(na);
    for (int p = 0; p < na; ++p) c_phys[p] = physical_of(state.fcoeffs[p], ctx);

    Field accum(points);
    for (int p = 0; p < na; ++p) {
        const double degree = tr.degree(p);
        for (int i = 0; i < points; ++i) accum[i] = -degree * rho_p[i] * c_phys[p][i];  // ρLf
        for (int axis = 0; axis < d; ++axis) {
            const int down = tr.lowered(p, axis);
            if (down < 0) continue;
            const double root = std::sqrt(double(tr.entry(p, axis)));
            const Field& lowered = c_phys[down];
            const Field& u_axis = u_p[axis];
            const Field& w_axis = w_p[axis];
            for (int i = 0; i < points; ++i)
                accum[i] += root * (u_axis[i] + w_axis[i]) * lowered[i];
        }
        ctx.to_spectral_banded(accum, out.fcoeffs[p]);
    }
    for (int axis = 0; axis < d; ++axis)
        for (int lin = 0; lin < points; ++lin)
            out.fcoeffs[1 + axis].coeffs[lin] += w_s[axis].coeffs[lin];  // ρ u·v√M

    // S_ρ = −ρ div u − ∇ρ·u
    Field work(points);
    {
        Field srho(points, Complex(0.0));
        for (int axis = 0; axis < d; ++axis) {
            ctx.to_physical_derivative_banded(state.vel[axis], axis, work);  // ∂_axis u_axis
            for (int i = 0; i < points; ++i) srho[i] -= rho_p[i] * work[i];
            ctx.to_physical_derivative_banded(state.rho, axis, work);
            for (int i = 0; i < points; ++i) srho[i] -= work[i] * u_p[axis][i];
        }
        ctx.to_spectral_banded(srho, out.rho);
    }

    // S_u = −u·∇u − (P'(1+ρ)/(1+ρ) − P'(1))∇ρ − μ(ρ/(1+ρ))Δu − au
    {
        const auto pcoef = pressure_coefficient(rho_p, params);
        const Field& a_p = c_phys[0];
        Field su(points);
        for (int j = 0; j < d; ++j) {
            std::fill(su.begin(), su.end(), Complex(0.0));
            for (int axis = 0; axis < d; ++axis) {
                ctx.to_physical_derivative_banded(state.vel[j], axis, work);
                for (int i = 0; i < points; ++i) su[i] -= u_p[axis][i] * work[i];
            }
            ctx.to_physical_derivative_banded(state.rho, j, work);
            for (int i = 0; i < points; ++i) su[i] -= (pcoef[i] - p1) * work[i];
            ctx.to_physical_laplacian_banded(state.vel[j], work);
            for (int i = 0; i < points; ++i) {
                const double n = 1.0 + rho_p[i].real();
                su[i] -= params.mu * (rho_p[i].real() / n) * work[i];
                su[i] -= a_p[i] * u_p[j][i];
            }
            ctx.to_spectral_banded(su, out.vel[j]);
        }
    }
    return out;
}

SystemState full_rhs(const SystemState& state, const ModelParams& params, TransformContext& ctx) {
    SystemState out = linear_rhs(state, params);
    const SystemState nl = nonlinear_rhs(state, params, ctx);
    out.axpy(1.0, nl);
    return out;
}

SystemState direct_full_rhs(const SystemState& state, const ModelParams& params,
                            TransformContext& ctx) {
    const Grid& g = *state.grid;
    const Truncation& tr = *state.trunc;
    const int na = tr.size();
    const int d = g.dim();
    const int points = g.total_modes();

    SystemState out(state.grid, state.trunc);
    out.time = state.time;

    const Field rho_p = physical_of(state.rho, ctx);
    check_admissible(rho_p);
    std::array<Field, 3> u_p;
    for (int axis = 0; axis < d; ++axis) u_p[axis] = physical_of(state.vel[axis], ctx);

    // q_i = dealiased (1+ρ)u_i
    std::array<Field, 3> q_p;
    std::array<SpectralField, 3> q_s{SpectralField(state.grid), SpectralField(state.grid),
                                     SpectralField(state.grid)};
    for (int axis = 0; axis < d; ++axis) {
        Field prod(points);
        for (int i = 0; i < points; ++i) prod[i] = (1.0 + rho_p[i]) * u_p[axis][i];
        q_s[axis] = spectral_of(prod, ctx);
        q_p[axis] = ctx.to_physical(q_s[axis]);
    }

    // kinetic: ∂_t f = −v·∇_x f + (1+ρ)Lf − (1+ρ)u·(∂_v − ½v)f + (1+ρ)u·v√M
    std::vector<Complex> vf(na), gvec(na), dvec(na), transport(na);
    std::vector<SpectralField> gspec;
    gspec.reserve(na * d);
    for (int axis = 0; axis < d; ++axis)
        for (int p = 0; p < na; ++p) gspec.emplace_back(state.grid);
    for (int lin = 0; lin < points; ++lin) {
        const auto k = g.wavevector(lin);
        for (int p = 0; p < na; ++p) vf[p] = state.fcoeffs[p].coeffs[lin];
        std::fill(transport.begin(), transport.end(), Complex(0.0));
        for (int axis = 0; axis < d; ++axis) {
            ladder_multiply_v(tr, axis, vf, gvec);
            for (int p = 0; p < na; ++p) transport[p] -= Complex(0.0, k[axis]) * gvec[p];
            ladder_differentiate_v(tr, axis, vf, dvec);
            for (int p = 0; p < na; ++p) gspec[axis * na + p].coeffs[lin] = dvec[p] - 0.5 * gvec[p];
        }
        for (int p = 0; p < na; ++p) out.fcoeffs[p].coeffs[lin] = transport[p];
    }

    Field accum(points), cphys(points), gphys(points);
    for (int p = 0; p < na; ++p) {
        cphys = physical_of(state.fcoeffs[p], ctx);
        const double degree = tr.degree(p);
        for (int i = 0; i < points; ++i)
            accum[i] = -degree * (1.0 + rho_p[i]) * cphys[i];  // (1+ρ)Lf
        for (int axis = 0; axis < d; ++axis) {
            gphys = physical_of(gspec[axis * na + p], ctx);
            for (int i = 0; i < points; ++i) accum[i] -= q_p[axis][i] * gphys[i];
        }
        auto contribution = spectral_of(accum, ctx);
        for (int lin = 0; lin < points; ++lin)
            out.fcoeffs[p].coeffs[lin] += contribution.coeffs[lin];
    }
    for (int axis = 0; axis < d; ++axis)
        for (int lin = 0; lin < points; ++lin)
            out.fcoeffs[1 + axis].coeffs[lin] += q_s[axis].coeffs[lin];

    // (I-4): ∂_t ρ = −(1+ρ)div u − ∇ρ·u
    {
        SpectralField divu(state.grid);
        for (int axis = 0; axis < d; ++axis) {
            auto dui = derivative(state.vel[axis], axis);
            for (int lin = 0; lin < points; ++lin) divu.coeffs[lin] += dui.coeffs[lin];
        }
        const Field divu_p = physical_of(divu, ctx);
        Field rhs(points);
        for (int i = 0; i < points; ++i) rhs[i] = -(1.0 + rho_p[i]) * divu_p[i];
        for (int axis = 0; axis < d; ++axis) {
            const Field drho_p = physical_of(derivative(state.rho, axis), ctx);
            for (int i = 0; i < points; ++i) rhs[i] -= drho_p[i] * u_p[axis][i];
        }
        out.rho = spectral_of(rhs, ctx);
    }

    // (I-5): ∂_t u = −u·∇u − (P'(1+ρ)/(1+ρ))∇ρ + μΔu/(1+ρ) + b − u − au
    {
        const auto pcoef = pressure_coefficient(rho_p, params);
        const Field a_p = physical_of(state.fcoeffs[0], ctx);
        for (int j = 0; j < d; ++j) {
            Field rhs(points, Complex(0.0));
            for (int axis = 0; axis < d; ++axis) {
                const Field duj = physical_of(derivative(state.vel[j], axis), ctx);
                for (int i = 0; i < points; ++i) rhs[i] -= u_p[axis][i] * duj[i];
            }
            const Field drho_p = physical_of(derivative(state.rho, j), ctx);
            const Field lap_u = physical_of(laplacian(state.vel[j]), ctx);
            for (int i = 0; i < points; ++i) {
                rhs[i] -= pcoef[i] * drho_p[i];
                rhs[i] += params.mu * lap_u[i] / (1.0 + rho_p[i].real());
                rhs[i] -= a_p[i] * u_p[j][i];
            }
            out.vel[j] = spectral_of(rhs, ctx);
            for (int lin = 0; lin < points; ++lin)
                out.vel[j].coeffs[lin] +=
                    state.fcoeffs[1 + j].coeffs[lin] - state.vel[j].coeffs[lin];
        }
    }
    return out;
}

}  // namespace vfpns
