#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>

#include "vfpns/hermite.hpp"
#include "vfpns/state.hpp"

namespace vfpns {

/// Dense linearized evolution matrix B(k) for one wavenumber, acting on
/// the mode vector (ĉ_α ..., ρ̂, û₁..û_d) in truncation order.
struct ModeMatrix {
    std::array<double, 3> k{0.0, 0.0, 0.0};
    std::shared_ptr<const Truncation> trunc;
    Eigen::MatrixXcd matrix;

    int dim() const { return trunc->dim(); }
    int size() const { return trunc->size() + 1 + trunc->dim(); }
};

ModeMatrix build_mode_matrix(const std::array<double, 3>& k,
                             std::shared_ptr<const Truncation> trunc, const ModelParams& params);

/// Max real part of the spectrum.  With exclude_conserved at k = 0 the
/// (d+2)-dimensional kernel is removed first.
double spectral_abscissa(const ModeMatrix& m, bool exclude_conserved);

Eigen::VectorXcd mode_eigenvalues(const ModeMatrix& m);

struct ExpPhiPair {
    Eigen::MatrixXcd exponential;  // e^A
    Eigen::MatrixXcd phi1;         // (e^A − I) A^{-1}, as the entire function
};

/// Scaling-and-squaring evaluation of e^A and φ₁(A) together; the Taylor
/// base stage keeps φ₁ regular at singular A.
ExpPhiPair exp_and_phi1(const Eigen::MatrixXcd& a);

Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& a);

}  // namespace vfpns
