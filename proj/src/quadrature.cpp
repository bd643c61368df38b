#include "vfpns/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vfpns {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int ipow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

}  // namespace

int QuadratureRule::node_count() const { return ipow(order, dim); }

std::array<double, 3> QuadratureRule::node(int k) const {
    std::array<double, 3> v{0.0, 0.0, 0.0};
    for (int axis = dim - 1; axis >= 0; --axis) {
        v[axis] = nodes_1d[k % order];
        k /= order;
    }
    return v;
}

double QuadratureRule::weight(int k) const {
    double w = 1.0;
    for (int axis = dim - 1; axis >= 0; --axis) {
        w *= weights_1d[k % order];
        k /= order;
    }
    return w;
}

QuadratureRule make_gauss_hermite(int dim, int order) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("make_gauss_hermite: dim must be 1..3");
    if (order < 1) throw std::invalid_argument("make_gauss_hermite: order must be >= 1");

    // Golub-Welsch on the probabilists' Hermite Jacobi matrix: zero
    // diagonal, off-diagonal √n, nodes directly in v with weight M(v)dv.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
    for (int n = 1; n < order; ++n) {
        const double b = std::sqrt(double(n));
        J(n, n - 1) = b;
        J(n - 1, n) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("make_gauss_hermite: eigensolve failed");

    QuadratureRule rule;
    rule.dim = dim;
    rule.order = order;
    rule.nodes_1d.resize(order);
    rule.weights_1d.resize(order);
    for (int k = 0; k < order; ++k) {
        rule.nodes_1d[k] = solver.eigenvalues()(k);
        const double v0 = solver.eigenvectors()(0, k);
        rule.weights_1d[k] = v0 * v0;  // μ₀ = ∫M dv = 1
    }
    return rule;
}

HermiteTable make_hermite_table(const QuadratureRule& rule, int max_degree) {
    HermiteTable table;
    table.order = rule.order;
    table.max_degree = max_degree;
    const int stride = rule.order;
    table.h.assign((max_degree + 1) * stride, 0.0);
    table.dh.assign((max_degree + 1) * stride, 0.0);
    table.ddh.assign((max_degree + 1) * stride, 0.0);

    for (int k = 0; k < rule.order; ++k) {
        const double t = rule.nodes_1d[k];
        table.h[k] = 1.0;
        if (max_degree >= 1) table.h[stride + k] = t;
        for (int n = 1; n < max_degree; ++n) {
            // h_{n+1} = (t h_n − √n h_{n-1}) / √(n+1)
            table.h[(n + 1) * stride + k] =
                (t * table.h[n * stride + k] - std::sqrt(double(n)) * table.h[(n - 1) * stride + k]) /
                std::sqrt(double(n + 1));
        }
        for (int n = 1; n <= max_degree; ++n)
            table.dh[n * stride + k] = std::sqrt(double(n)) * table.h[(n - 1) * stride + k];
        for (int n = 2; n <= max_degree; ++n)
            table.ddh[n * stride + k] =
                std::sqrt(double(n) * double(n - 1)) * table.h[(n - 2) * stride + k];
    }
    return table;
}

double maxwellian(int dim, const std::array<double, 3>& v) {
    double vv = 0.0;
    for (int i = 0; i < dim; ++i) vv += v[i] * v[i];
    return std::pow(kTwoPi, -0.5 * dim) * std::exp(-0.5 * vv);
}

double sqrt_maxwellian(int dim, const std::array<double, 3>& v) {
    double vv = 0.0;
    for (int i = 0; i < dim; ++i) vv += v[i] * v[i];
    return std::pow(kTwoPi, -0.25 * dim) * std::exp(-0.25 * vv);
}

namespace {

// Polynomial part of f at node k: p(v) = Σ_α c_α Π_i h_{α_i}(v_i), so that
// f = p·√M.  Used by every oracle below.
Complex poly_at_node(const VelocityCoeffs& c, const QuadratureRule& rule, const HermiteTable& table,
                     int k) {
    const Truncation& tr = *c.trunc;
    Complex total(0.0);
    std::array<int, 3> digits{0, 0, 0};
    int rem = k;
    for (int axis = rule.dim - 1; axis >= 0; --axis) {
        digits[axis] = rem % rule.order;
        rem /= rule.order;
    }
    for (int p = 0; p < tr.size(); ++p) {
        double basis = 1.0;
        for (int axis = 0; axis < tr.dim(); ++axis)
            basis *= table.value(tr.entry(p, axis), digits[axis]);
        total += c.values[p] * basis;
    }
    return total;
}

struct NodeDigits {
    std::array<int, 3> d{0, 0, 0};
};

NodeDigits digits_of(const QuadratureRule& rule, int k) {
    NodeDigits nd;
    for (int axis = rule.dim - 1; axis >= 0; --axis) {
        nd.d[axis] = k % rule.order;
        k /= rule.order;
    }
    return nd;
}

}  // namespace

std::vector<Complex> quadrature_oracle(const VelocityCoeffs& c, const QuadratureRule& rule) {
    const HermiteTable table = make_hermite_table(rule, c.trunc->max_degree());
    const int count = rule.node_count();
    std::vector<Complex> samples(count);
    for (int k = 0; k < count; ++k) {
        samples[k] = poly_at_node(c, rule, table, k) * sqrt_maxwellian(rule.dim, rule.node(k));
    }
    return samples;
}

VelocityCoeffs quadrature_project(const std::vector<Complex>& samples, const QuadratureRule& rule,
                                  std::shared_ptr<const Truncation> trunc) {
    if (rule.order < trunc->max_degree() + 2)
        throw std::invalid_argument("quadrature_project: rule order < N+2, round trip not exact");
    if (static_cast<int>(samples.size()) != rule.node_count())
        throw std::invalid_argument("quadrature_project: sample count mismatch");

    const Truncation& tr = *trunc;
    const HermiteTable table = make_hermite_table(rule, tr.max_degree());
    VelocityCoeffs out(trunc);
    const int count = rule.node_count();
    for (int k = 0; k < count; ++k) {
        const auto nd = digits_of(rule, k);
        const Complex ratio = samples[k] / sqrt_maxwellian(rule.dim, rule.node(k));
        const double w = rule.weight(k);
        for (int p = 0; p < tr.size(); ++p) {
            double basis = 1.0;
            for (int axis = 0; axis < tr.dim(); ++axis)
                basis *= table.value(tr.entry(p, axis), nd.d[axis]);
            out.values[p] += w * ratio * basis;
        }
    }
    return out;
}

std::vector<Complex> oracle_fokker_planck_at_nodes(const VelocityCoeffs& c,
                                                   const QuadratureRule& rule) {
    // Lf = Δ_v f − (|v|²/4) f + (d/2) f evaluated pointwise;
    // per axis, (h e^{-t²/4})'' = (h'' − t h' + (t²/4 − 1/2) h) e^{-t²/4}.
    const Truncation& tr = *c.trunc;
    const HermiteTable table = make_hermite_table(rule, tr.max_degree());
    const int count = rule.node_count();
    std::vector<Complex> samples(count);
    const int d = tr.dim();
    for (int k = 0; k < count; ++k) {
        const auto nd = digits_of(rule, k);
        const auto v = rule.node(k);
        Complex lap(0.0), val(0.0);
        for (int p = 0; p < tr.size(); ++p) {
            std::array<double, 3> factor{1.0, 1.0, 1.0};
            for (int axis = 0; axis < d; ++axis)
                factor[axis] = table.value(tr.entry(p, axis), nd.d[axis]);
            double prod = 1.0;
            for (int axis = 0; axis < d; ++axis) prod *= factor[axis];
            val += c.values[p] * prod;
            for (int axis = 0; axis < d; ++axis) {
                const int n = tr.entry(p, axis);
                const double t = v[axis];
                const double second = table.deriv2(n, nd.d[axis]) - t * table.deriv(n, nd.d[axis]) +
                                      (0.25 * t * t - 0.5) * factor[axis];
                double rest = 1.0;
                for (int other = 0; other < d; ++other)
                    if (other != axis) rest *= factor[other];
                lap += c.values[p] * second * rest;
            }
        }
        double vv = 0.0;
        for (int axis = 0; axis < d; ++axis) vv += v[axis] * v[axis];
        samples[k] = (lap - 0.25 * vv * val + 0.5 * d * val) * sqrt_maxwellian(d, v);
    }
    return samples;
}

std::vector<Complex> oracle_multiply_v_at_nodes(const VelocityCoeffs& c, const QuadratureRule& rule,
                                                int axis) {
    auto samples = quadrature_oracle(c, rule);
    const int count = rule.node_count();
    for (int k = 0; k < count; ++k) samples[k] *= rule.node(k)[axis];
    return samples;
}

std::vector<Complex> oracle_differentiate_v_at_nodes(const VelocityCoeffs& c,
                                                     const QuadratureRule& rule, int axis) {
    // ∂_i f = Σ_α c_α (h'_{α_i} − (v_i/2) h_{α_i}) Π_{j≠i} h_{α_j} · √M
    const Truncation& tr = *c.trunc;
    const HermiteTable table = make_hermite_table(rule, tr.max_degree());
    const int count = rule.node_count();
    const int d = tr.dim();
    std::vector<Complex> samples(count);
    for (int k = 0; k < count; ++k) {
        const auto nd = digits_of(rule, k);
        const auto v = rule.node(k);
        Complex total(0.0);
        for (int p = 0; p < tr.size(); ++p) {
            const int n = tr.entry(p, axis);
            double term = table.deriv(n, nd.d[axis]) - 0.5 * v[axis] * table.value(n, nd.d[axis]);
            for (int other = 0; other < d; ++other)
                if (other != axis) term *= table.value(tr.entry(p, other), nd.d[other]);
            total += c.values[p] * term;
        }
        samples[k] = total * sqrt_maxwellian(d, v);
    }
    return samples;
}

double oracle_nu_norm_sq(const VelocityCoeffs& c, const QuadratureRule& rule) {
    // ∫(|∇f|² + (1+|v|²)|f|²)dv with the integrand divided through by M so
    // the Maxwellian-weighted rule applies.
    const int count = rule.node_count();
    const int d = c.trunc->dim();
    auto f = quadrature_oracle(c, rule);
    std::vector<std::vector<Complex>> grads(d);
    for (int axis = 0; axis < d; ++axis)
        grads[axis] = oracle_differentiate_v_at_nodes(c, rule, axis);
    double total = 0.0;
    for (int k = 0; k < count; ++k) {
        const auto v = rule.node(k);
        double vv = 0.0;
        for (int axis = 0; axis < d; ++axis) vv += v[axis] * v[axis];
        double integrand = (1.0 + vv) * std::norm(f[k]);
        for (int axis = 0; axis < d; ++axis) integrand += std::norm(grads[axis][k]);
        total += rule.weight(k) * integrand / maxwellian(d, v);
    }
    return total;
}

Complex oracle_gamma_moment(const VelocityCoeffs& c, const QuadratureRule& rule, int i, int j) {
    const int count = rule.node_count();
    const int d = c.trunc->dim();
    auto f = quadrature_oracle(c, rule);
    Complex total(0.0);
    for (int k = 0; k < count; ++k) {
        const auto v = rule.node(k);
        const double kernel = v[i] * v[j] - (i == j ? 1.0 : 0.0);
        total += rule.weight(k) * kernel * f[k] / sqrt_maxwellian(d, v);
    }
    return total;
}

Complex oracle_density_moment(const VelocityCoeffs& c, const QuadratureRule& rule) {
    const int count = rule.node_count();
    const int d = c.trunc->dim();
    auto f = quadrature_oracle(c, rule);
    Complex total(0.0);
    for (int k = 0; k < count; ++k)
        total += rule.weight(k) * f[k] / sqrt_maxwellian(d, rule.node(k));
    return total;
}

std::array<Complex, 3> oracle_velocity_moment(const VelocityCoeffs& c, const QuadratureRule& rule) {
    const int count = rule.node_count();
    const int d = c.trunc->dim();
    auto f = quadrature_oracle(c, rule);
    std::array<Complex, 3> total{Complex(0.0), Complex(0.0), Complex(0.0)};
    for (int k = 0; k < count; ++k) {
        const auto v = rule.node(k);
        const Complex ratio = rule.weight(k) * f[k] / sqrt_maxwellian(d, v);
        for (int axis = 0; axis < d; ++axis) total[axis] += v[axis] * ratio;
    }
    return total;
}

}  // namespace vfpns
