#pragma once

#include <array>
#include <vector>

#include "vfpns/hermite.hpp"

namespace vfpns {

/// Tensor Gauss-Hermite rule for the normalized Maxwellian weight:
/// Σ_k w_k g(v_k) = ∫ g(v) M(v) dv  exactly for per-axis polynomial
/// degree ≤ 2·order − 1.
struct QuadratureRule {
    int dim = 0;
    int order = 0;
    std::vector<double> nodes_1d;    // order entries
    std::vector<double> weights_1d;  // order entries, sum 1

    int node_count() const;
    std::array<double, 3> node(int k) const;  // tensor node, row-major over axes
    double weight(int k) const;
};

QuadratureRule make_gauss_hermite(int dim, int order);

/// Per-axis tables of normalized Hermite values h_n = He_n/√(n!) and their
/// first two derivatives at the rule's nodes.  The independent oracle path
/// evaluates everything pointwise through these.
struct HermiteTable {
    int order = 0;
    int max_degree = 0;
    std::vector<double> h;    // (max_degree+1) × order, h[n*order + k]
    std::vector<double> dh;
    std::vector<double> ddh;

    double value(int n, int k) const { return h[n * order + k]; }
    double deriv(int n, int k) const { return dh[n * order + k]; }
    double deriv2(int n, int k) const { return ddh[n * order + k]; }
};

HermiteTable make_hermite_table(const QuadratureRule& rule, int max_degree);

/// f(v_k) = Σ_α c_α e_α(v_k) at every tensor node.
std::vector<Complex> quadrature_oracle(const VelocityCoeffs& c, const QuadratureRule& rule);

/// Inverse: c_α = ∫ f e_α dv by quadrature.  Requires order ≥ N+2 so the
/// round trip is exact.
VelocityCoeffs quadrature_project(const std::vector<Complex>& samples, const QuadratureRule& rule,
                                  std::shared_ptr<const Truncation> trunc);

// Pointwise oracle evaluations of the velocity operators, independent of
// the ladder kernels: everything is computed from the Hermite recurrences
// and the explicit Gaussian factor at the nodes, then re-projected.
std::vector<Complex> oracle_fokker_planck_at_nodes(const VelocityCoeffs& c,
                                                   const QuadratureRule& rule);
std::vector<Complex> oracle_multiply_v_at_nodes(const VelocityCoeffs& c,
                                                const QuadratureRule& rule, int axis);
std::vector<Complex> oracle_differentiate_v_at_nodes(const VelocityCoeffs& c,
                                                     const QuadratureRule& rule, int axis);

double oracle_nu_norm_sq(const VelocityCoeffs& c, const QuadratureRule& rule);
Complex oracle_gamma_moment(const VelocityCoeffs& c, const QuadratureRule& rule, int i, int j);
Complex oracle_density_moment(const VelocityCoeffs& c, const QuadratureRule& rule);
std::array<Complex, 3> oracle_velocity_moment(const VelocityCoeffs& c, const QuadratureRule& rule);

/// √M(v) and M(v) with the normalized constant (2π)^{-d/2}.
double maxwellian(int dim, const std::array<double, 3>& v);
double sqrt_maxwellian(int dim, const std::array<double, 3>& v);

}  // namespace vfpns
