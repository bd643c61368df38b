#include "vfpns/mode_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace vfpns {

ModeMatrix build_mode_matrix(const std::array<double, 3>& k,
                             std::shared_ptr<const Truncation> trunc, const ModelParams& params) {
    const Truncation& tr = *trunc;
    const int na = tr.size();
    const int d = tr.dim();
    const int n = na + 1 + d;
    const double p1 = params.p_prime_1();
    double ksq = 0.0;
    for (int i = 0; i < d; ++i) ksq += k[i] * k[i];

    ModeMatrix out;
    out.k = k;
    out.trunc = trunc;
    out.matrix = Eigen::MatrixXcd::Zero(n, n);
    auto& m = out.matrix;

    for (int p = 0; p < na; ++p) {
        m(p, p) += Complex(-double(tr.degree(p)), 0.0);  // L
        for (int axis = 0; axis < d; ++axis) {
            if (k[axis] == 0.0) continue;
            const int ai = tr.entry(p, axis);
            const int up = tr.raised(p, axis);
            if (up >= 0) m(p, up) += Complex(0.0, -k[axis]) * std::sqrt(double(ai + 1));
            const int down = tr.lowered(p, axis);
            if (down >= 0) m(p, down) += Complex(0.0, -k[axis]) * std::sqrt(double(ai));
        }
    }
    for (int axis = 0; axis < d; ++axis) m(1 + axis, na + 1 + axis) += 1.0;  // û·v√M

    for (int axis = 0; axis < d; ++axis) m(na, na + 1 + axis) = Complex(0.0, -k[axis]);

    for (int axis = 0; axis < d; ++axis) {
        const int row = na + 1 + axis;
        m(row, na) = Complex(0.0, -k[axis]) * p1;
        m(row, row) += Complex(-(params.mu * ksq + 1.0), 0.0);
        m(row, 1 + axis) += 1.0;  // b̂
    }
    return out;
}

Eigen::VectorXcd mode_eigenvalues(const ModeMatrix& m) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m.matrix, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("mode_eigenvalues: eigensolver failed");
    return solver.eigenvalues();
}

double spectral_abscissa(const ModeMatrix& m, bool exclude_conserved) {
    Eigen::VectorXcd ev = mode_eigenvalues(m);
    std::vector<Complex> vals(ev.data(), ev.data() + ev.size());
    double ksq = 0.0;
    for (int i = 0; i < m.dim(); ++i) ksq += m.k[i] * m.k[i];
    if (exclude_conserved && ksq == 0.0) {
        std::sort(vals.begin(), vals.end(),
                  [](const Complex& a, const Complex& b) { return std::abs(a) < std::abs(b); });
        const int kernel = m.dim() + 2;
        for (int j = 0; j < kernel; ++j) {
            if (std::abs(vals[j]) > 1e-8)
                throw std::runtime_error("spectral_abscissa: expected kernel of dimension d+2");
        }
        vals.erase(vals.begin(), vals.begin() + kernel);
    }
    double abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& v : vals) abscissa = std::max(abscissa, v.real());
    return abscissa;
}

ExpPhiPair exp_and_phi1(const Eigen::MatrixXcd& a) {
    const int n = static_cast<int>(a.rows());
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(n, n);

    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // ∞-norm
    int squarings = 0;
    if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
    const double scale = std::ldexp(1.0, -squarings);
    const Eigen::MatrixXcd b = a * scale;

    // Taylor at ‖B‖ ≤ 1/4: both series converge to full precision in ~20 terms
    Eigen::MatrixXcd exp_b = identity;
    Eigen::MatrixXcd phi_b = identity;
    Eigen::MatrixXcd term = identity;
    for (int j = 1; j <= 24; ++j) {
        term = (term * b) / double(j);
        exp_b += term;
        phi_b += term / double(j + 1);
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }

    for (int s = 0; s < squarings; ++s) {
        phi_b = 0.5 * phi_b * (exp_b + identity);  // φ₁(2A) = ½ φ₁(A)(e^A + I)
        exp_b = exp_b * exp_b;
    }
    return {std::move(exp_b), std::move(phi_b)};
}

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a) {
    return exp_and_phi1(a).exponential;
}

}  // namespace vfpns
