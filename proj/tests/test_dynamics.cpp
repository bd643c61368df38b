#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vfpns/dynamics.hpp"
#include "vfpns/energy.hpp"

using namespace vfpns;

namespace {

constexpr double kPi = std::numbers::pi;

void make_hermitian(SpectralField& f) {
    const Grid& g = *f.grid;
    SpectralField sym(f.grid);
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const int neg = g.conjugate_mode(lin);
        sym.coeffs[lin] = 0.5 * (f.coeffs[lin] + std::conj(f.coeffs[neg]));
    }
    f = sym;
}

SystemState random_state(std::shared_ptr<const Grid> grid, std::shared_ptr<const Truncation> trunc,
                         std::mt19937_64& rng, double amplitude) {
    SystemState state(grid, trunc);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Grid& g = *grid;
    const int band = g.n() / 4;
    auto fill = [&](SpectralField& f, double scale) {
        for (int lin = 0; lin < g.total_modes(); ++lin) {
            const auto m = g.signed_indices_of(lin);
            bool inside = true;
            for (int axis = 0; axis < g.dim(); ++axis)
                if (std::abs(m[axis]) > band) inside = false;
            if (!inside) continue;
            f.coeffs[lin] = scale * Complex(gauss(rng), gauss(rng));
        }
        make_hermitian(f);
    };
    for (int p = 0; p < trunc->size(); ++p)
        fill(state.fcoeffs[p], amplitude * std::pow(0.5, trunc->degree(p)));
    fill(state.rho, amplitude);
    for (auto& u : state.vel) fill(u, amplitude);
    return state;
}

double state_norm(const SystemState& s) {
    double total = l2v_l2x_sq(s) + l2_norm_sq(s.rho);
    for (const auto& u : s.vel) total += l2_norm_sq(u);
    return std::sqrt(total);
}

SystemState state_diff(const SystemState& a, const SystemState& b) {
    SystemState d = a;
    d.axpy(-1.0, b);
    return d;
}

}  // namespace

TEST_CASE("zero state is a fixed point of every assembly") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    SystemState zero(grid, trunc);
    CHECK(state_norm(linear_rhs(zero, params)) == 0.0);
    CHECK(state_norm(nonlinear_rhs(zero, params, ctx)) == 0.0);
    CHECK(state_norm(full_rhs(zero, params, ctx)) == 0.0);
    CHECK(state_norm(direct_full_rhs(zero, params, ctx)) == 0.0);
}

TEST_CASE("linear rhs on a single velocity mode") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    ModelParams params;
    params.mu = 0.7;

    SystemState s(grid, trunc);
    const auto klin = grid->linear_of_signed({2, -1, 0});
    s.vel[0].coeffs[klin] = 1.0;

    auto rhs = linear_rhs(s, params);
    const double ksq = 4.0 + 1.0;
    // ∂_t u = −μ|k|²u − u
    CHECK(std::abs(rhs.vel[0].coeffs[klin] - Complex(-(params.mu * ksq + 1.0))) < 1e-14);
    // ∂_t ρ = −ik·u
    CHECK(std::abs(rhs.rho.coeffs[klin] - Complex(0.0, -2.0)) < 1e-14);
    // ∂_t f = u·v√M at α = e₁
    CHECK(std::abs(rhs.fcoeffs[1].coeffs[klin] - Complex(1.0)) < 1e-14);
    for (int p : {0, 2, 3}) CHECK(std::abs(rhs.fcoeffs[p].coeffs[klin]) == 0.0);
}

TEST_CASE("k=0 drag block conserves b+u") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    ModelParams params;
    SystemState s(grid, trunc);
    const auto zero_mode = grid->linear_of_signed({0, 0, 0});
    s.fcoeffs[1].coeffs[zero_mode] = 0.3;  // b₁
    s.vel[0].coeffs[zero_mode] = -0.8;
    auto rhs = linear_rhs(s, params);
    // ∂_t b = u − b, ∂_t u = b − u
    CHECK(std::abs(rhs.fcoeffs[1].coeffs[zero_mode] - Complex(-0.8 - 0.3)) < 1e-14);
    CHECK(std::abs(rhs.vel[0].coeffs[zero_mode] - Complex(0.3 + 0.8)) < 1e-14);
    CHECK(std::abs(rhs.fcoeffs[1].coeffs[zero_mode] + rhs.vel[0].coeffs[zero_mode]) < 1e-15);
}

TEST_CASE("nonlinear rhs with rho only: everything but the pressure remainder vanishes") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(97);

    // f = 0, u = 0: every u- and f-coupling drops; S_u keeps only
    // −(P'(1+ρ)/(1+ρ) − P'(1))∇ρ, which is O(ρ²) but not zero.
    SystemState s(grid, trunc);
    auto r = random_state(grid, trunc, rng, 0.01);
    s.rho = r.rho;
    auto nl = nonlinear_rhs(s, params, ctx);
    for (const auto& f : nl.fcoeffs)
        for (const auto& c : f.coeffs) CHECK(std::abs(c) == 0.0);
    for (const auto& c : nl.rho.coeffs) CHECK(std::abs(c) == 0.0);

    const auto rho_p = ctx.to_physical(s.rho);
    const auto pcoef = pressure_coefficient(rho_p, params);
    for (int j = 0; j < 3; ++j) {
        const auto drho_p = ctx.to_physical(derivative(s.rho, j));
        std::vector<Complex> term(grid->total_modes());
        for (int i = 0; i < grid->total_modes(); ++i)
            term[i] = -(pcoef[i] - params.p_prime_1()) * drho_p[i];
        auto expected = ctx.to_spectral(term);
        truncate_to_band(expected);
        double diff = 0.0;
        for (int lin = 0; lin < grid->total_modes(); ++lin)
            diff = std::max(diff, std::abs(nl.vel[j].coeffs[lin] - expected.coeffs[lin]));
        CHECK(diff < 1e-14);
    }

    // with γ = 2 the coefficient is constant and the remainder vanishes too
    ModelParams iso;
    iso.gamma = 2.0;
    iso.c0 = 0.5;
    auto nl2 = nonlinear_rhs(s, iso, ctx);
    CHECK(state_norm(nl2) < 1e-15);
}

TEST_CASE("pressure coefficient values") {
    ModelParams params;  // c0 = 1, γ = 1.4
    std::vector<Complex> rho(4, Complex(0.0));
    auto c = pressure_coefficient(rho, params);
    for (double v : c) CHECK(v == doctest::Approx(1.4).epsilon(1e-15));

    std::vector<Complex> rho1(4, Complex(0.1));
    auto c1 = pressure_coefficient(rho1, params);
    for (double v : c1)
        CHECK(v == doctest::Approx(1.4 * std::pow(1.1, -0.6)).epsilon(1e-14));

    ModelParams iso;
    iso.gamma = 2.0;
    iso.c0 = 0.8;
    std::mt19937_64 rng(101);
    std::vector<Complex> rnd(16);
    for (auto& v : rnd) v = Complex(0.2 * std::uniform_real_distribution<>(-1, 1)(rng), 0.0);
    for (double v : pressure_coefficient(rnd, iso))
        CHECK(v == doctest::Approx(1.6).epsilon(1e-15));

    std::vector<Complex> vacuum(2, Complex(-1.0));
    CHECK_THROWS_AS(pressure_coefficient(vacuum, params), StateQualityError);
}

TEST_CASE("split identity and direct-assembly cross-check") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(103);

    for (int rep = 0; rep < 20; ++rep) {
        auto s = random_state(grid, trunc, rng, 0.02);
        auto full = full_rhs(s, params, ctx);
        auto lin = linear_rhs(s, params);
        auto nl = nonlinear_rhs(s, params, ctx);
        lin.axpy(1.0, nl);
        CHECK(state_norm(state_diff(full, lin)) < 1e-12);

        auto direct = direct_full_rhs(s, params, ctx);
        const double scale = std::max(1.0, state_norm(full));
        CHECK(state_norm(state_diff(full, direct)) / scale < 1e-10);
    }
}

TEST_CASE("nonlinear rhs with rho = 0 reduces to the drag-free couplings") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(127);

    auto s = random_state(grid, trunc, rng, 0.01);
    std::fill(s.rho.coeffs.begin(), s.rho.coeffs.end(), Complex(0.0));
    auto nl = nonlinear_rhs(s, params, ctx);

    // S_ρ = 0
    for (const auto& c : nl.rho.coeffs) CHECK(std::abs(c) == 0.0);

    // fluid part: −u·∇u − au, assembled independently
    const auto a_p = ctx.to_physical(s.fcoeffs[0]);
    for (int j = 0; j < 3; ++j) {
        std::vector<Complex> su(grid->total_modes(), Complex(0.0));
        for (int axis = 0; axis < 3; ++axis) {
            const auto up = ctx.to_physical(s.vel[axis]);
            const auto duj = ctx.to_physical(derivative(s.vel[j], axis));
            for (int i = 0; i < grid->total_modes(); ++i) su[i] -= up[i] * duj[i];
        }
        const auto uj = ctx.to_physical(s.vel[j]);
        for (int i = 0; i < grid->total_modes(); ++i) su[i] -= a_p[i] * uj[i];
        auto expected = ctx.to_spectral(su);
        truncate_to_band(expected);
        for (int lin = 0; lin < grid->total_modes(); ++lin)
            CHECK(std::abs(nl.vel[j].coeffs[lin] - expected.coeffs[lin]) < 1e-13);
    }

    // kinetic part: −u·∇_v f + ½u·v f alone
    SystemState expected_kin(grid, trunc);
    std::vector<Complex> vf(trunc->size()), dv(trunc->size()), mv(trunc->size());
    std::vector<SpectralField> g;
    for (int axis = 0; axis < 3; ++axis)
        for (int p = 0; p < trunc->size(); ++p) g.emplace_back(grid);
    for (int lin = 0; lin < grid->total_modes(); ++lin) {
        for (int p = 0; p < trunc->size(); ++p) vf[p] = s.fcoeffs[p].coeffs[lin];
        for (int axis = 0; axis < 3; ++axis) {
            ladder_differentiate_v(*trunc, axis, vf, dv);
            ladder_multiply_v(*trunc, axis, vf, mv);
            for (int p = 0; p < trunc->size(); ++p)
                g[axis * trunc->size() + p].coeffs[lin] = dv[p] - 0.5 * mv[p];
        }
    }
    for (int p = 0; p < trunc->size(); ++p) {
        std::vector<Complex> accum(grid->total_modes(), Complex(0.0));
        for (int axis = 0; axis < 3; ++axis) {
            const auto up = ctx.to_physical(s.vel[axis]);
            const auto gp = ctx.to_physical(g[axis * trunc->size() + p]);
            for (int i = 0; i < grid->total_modes(); ++i) accum[i] -= up[i] * gp[i];
        }
        auto expected = ctx.to_spectral(accum);
        truncate_to_band(expected);
        for (int lin = 0; lin < grid->total_modes(); ++lin)
            CHECK(std::abs(nl.fcoeffs[p].coeffs[lin] - expected.coeffs[lin]) < 1e-13);
    }
}

TEST_CASE("vacuum data aborts with a state-quality error") {
    auto grid = make_grid(1, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(1, 2);
    TransformContext ctx(grid);
    ModelParams params;
    SystemState s(grid, trunc);
    s.rho.coeffs[grid->linear_of_signed({0, 0, 0})] = -1.5;
    CHECK_THROWS_AS(nonlinear_rhs(s, params, ctx), StateQualityError);
}

TEST_CASE("linearization consistency: nonlinear remainder is O(eps^2)") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(107);

    for (int rep = 0; rep < 5; ++rep) {
        auto base = random_state(grid, trunc, rng, 1.0);
        auto lin = linear_rhs(base, params);

        auto remainder_norm = [&](double eps) {
            auto scaled = base;
            scaled.scale(eps);
            auto full = full_rhs(scaled, params, ctx);
            auto expect = lin;
            expect.scale(eps);
            return state_norm(state_diff(full, expect));
        };
        const double r1 = remainder_norm(1e-3);
        const double r2 = remainder_norm(5e-4);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
    }
}

TEST_CASE("discrete conservation at the rhs level") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 3);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(109);
    const int zero_mode = grid->linear_of_signed({0, 0, 0});

    for (int rep = 0; rep < 10; ++rep) {
        auto s = random_state(grid, trunc, rng, 1e-4);
        auto rhs = full_rhs(s, params, ctx);

        // particle mass and fluid mass rows vanish identically at k=0
        CHECK(std::abs(rhs.fcoeffs[0].coeffs[zero_mode]) < 1e-16);
        CHECK(std::abs(rhs.rho.coeffs[zero_mode]) < 1e-16);

        // d/dt ∫(b + (1+ρ)u) = 0
        for (int i = 0; i < 3; ++i) {
            const Complex db = rhs.fcoeffs[1 + i].coeffs[zero_mode];
            const Complex du = rhs.vel[i].coeffs[zero_mode];
            const Complex drho_u = dealiased_product(rhs.rho, s.vel[i], ctx).coeffs[zero_mode] +
                                   dealiased_product(s.rho, rhs.vel[i], ctx).coeffs[zero_mode];
            CHECK(std::abs(db + du + drho_u) < 1e-12);
        }
    }
}

TEST_CASE("moment system projections of the kinetic rhs") {
    auto grid = make_grid(3, 8, 2.0 * kPi);
    auto trunc = enumerate_truncation(3, 4);
    TransformContext ctx(grid);
    ModelParams params;
    std::mt19937_64 rng(113);

    auto s = random_state(grid, trunc, rng, 0.01);
    auto rhs = full_rhs(s, params, ctx);

    // ∂_t a = −∇·b exactly
    for (int lin = 0; lin < grid->total_modes(); ++lin) {
        const auto k = grid->wavevector(lin);
        Complex divb(0.0);
        for (int i = 0; i < 3; ++i)
            divb += Complex(0.0, k[i]) * s.fcoeffs[1 + i].coeffs[lin];
        CHECK(std::abs(rhs.fcoeffs[0].coeffs[lin] + divb) < 1e-14);
    }

    // ∂_t b_i = −∂_i a − Σ_j ∂_j Γ_ij(micro) + (1+ρ)(u_i−b_i) + (1+ρ)u_i a
    for (int i = 0; i < 3; ++i) {
        SpectralField expected(grid);
        // drag + forcing assembled with the same dealiased products
        SpectralField ui_minus_bi(grid), a_field = s.fcoeffs[0];
        for (int lin = 0; lin < grid->total_modes(); ++lin)
            ui_minus_bi.coeffs[lin] = s.vel[i].coeffs[lin] - s.fcoeffs[1 + i].coeffs[lin];
        auto rho_drag = dealiased_product(s.rho, ui_minus_bi, ctx);
        auto ua = dealiased_product(s.vel[i], a_field, ctx);
        auto rho_u = dealiased_product(s.rho, s.vel[i], ctx);
        auto rho_ua = dealiased_product(rho_u, a_field, ctx);

        for (int lin = 0; lin < grid->total_modes(); ++lin) {
            const auto k = grid->wavevector(lin);
            Complex val = -Complex(0.0, k[i]) * s.fcoeffs[0].coeffs[lin];
            std::vector<Complex> micro(trunc->size());
            for (int p = 0; p < trunc->size(); ++p) micro[p] = s.fcoeffs[p].coeffs[lin];
            for (int p = 0; p <= 3; ++p) micro[p] = 0.0;
            for (int j = 0; j < 3; ++j)
                val -= Complex(0.0, k[j]) * gamma_moment(*trunc, micro, i, j);
            val += ui_minus_bi.coeffs[lin] + rho_drag.coeffs[lin];
            val += ua.coeffs[lin] + rho_ua.coeffs[lin];
            expected.coeffs[lin] = val;
        }
        double diff = 0.0;
        for (int lin = 0; lin < grid->total_modes(); ++lin)
            diff = std::max(diff, std::abs(rhs.fcoeffs[1 + i].coeffs[lin] - expected.coeffs[lin]));
        CHECK(diff < 1e-10);
    }
}
