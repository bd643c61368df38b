#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace vfpns {

using Complex = std::complex<double>;

/// Velocity multi-index (α₁,…,α_d); unused trailing entries stay zero.
struct MultiIndex {
    std::array<int, 3> entries{0, 0, 0};

    int degree() const { return entries[0] + entries[1] + entries[2]; }
    bool operator==(const MultiIndex&) const = default;
};

/// Graded enumeration of all multi-indices with |α| ≤ N in d velocity
/// dimensions.  Position 0 is the zero index and positions 1..d are the
/// unit indices e_1..e_d, ordered by axis.  Within a degree the ordering
/// is lexicographically decreasing, which is deterministic and
/// reproducible across runs.
class Truncation {
  public:
    Truncation(int dim_v, int max_degree);

    int dim() const { return dim_; }
    int max_degree() const { return max_degree_; }
    int size() const { return static_cast<int>(indices_.size()); }

    const MultiIndex& index(int pos) const { return indices_[pos]; }
    const std::vector<MultiIndex>& index_list() const { return indices_; }

    /// Position of α in the enumeration, or -1 if |α| > N.
    int position(const MultiIndex& alpha) const;

    /// Position of α ± e_axis, or -1 when the neighbour leaves the
    /// truncated set (zero-flux closure drops that coupling).
    int raised(int pos, int axis) const { return raised_[axis][pos]; }
    int lowered(int pos, int axis) const { return lowered_[axis][pos]; }

    int entry(int pos, int axis) const { return indices_[pos].entries[axis]; }
    int degree(int pos) const { return indices_[pos].degree(); }

  private:
    int dim_;
    int max_degree_;
    std::vector<MultiIndex> indices_;
    std::vector<int> position_table_;  // dense (N+1)^d lookup
    std::array<std::vector<int>, 3> raised_;
    std::array<std::vector<int>, 3> lowered_;

    int flat(const MultiIndex& alpha) const;
};

std::shared_ptr<const Truncation> enumerate_truncation(int dim_v, int max_degree);

/// Coefficients of f(v) = Σ_α c_α e_α(v) in the orthonormal Hermite
/// eigenbasis e_α = He_α √M / √(α!) of the linearized Fokker-Planck
/// operator, with M(v) = (2π)^{-d/2} e^{-|v|²/2}.
struct VelocityCoeffs {
    std::shared_ptr<const Truncation> trunc;
    std::vector<Complex> values;

    explicit VelocityCoeffs(std::shared_ptr<const Truncation> t)
        : trunc(std::move(t)), values(trunc->size(), Complex(0.0)) {}
    VelocityCoeffs(std::shared_ptr<const Truncation> t, std::vector<Complex> v)
        : trunc(std::move(t)), values(std::move(v)) {}
};

// Span-based ladder kernels shared with the per-spatial-mode code paths.
// All apply the zero-flux closure: couplings into degree N+1 are dropped.
void ladder_multiply_v(const Truncation& tr, int axis, std::span<const Complex> in,
                       std::span<Complex> out);
void ladder_differentiate_v(const Truncation& tr, int axis, std::span<const Complex> in,
                            std::span<Complex> out);
void ladder_fokker_planck(const Truncation& tr, std::span<const Complex> in,
                          std::span<Complex> out);

/// Quadratic ν-form x ↦ ∫(|∇_v f|² + (1+|v|²)|f|²)dv of the represented
/// function, assembled from the closed ladder operators.
double nu_form_sq(const Truncation& tr, std::span<const Complex> x);

VelocityCoeffs apply_fokker_planck(const VelocityCoeffs& c);
VelocityCoeffs multiply_by_v(const VelocityCoeffs& c, int axis);
VelocityCoeffs differentiate_v(const VelocityCoeffs& c, int axis);

struct MacroMicro {
    Complex a;
    std::array<Complex, 3> b;
    VelocityCoeffs micro;
};

MacroMicro macro_micro_split(const VelocityCoeffs& c);

/// Γ_ij(f) = ⟨(v_i v_j − δ_ij)√M, f⟩, exact from degree ≤ 2 coefficients.
Complex gamma_moment(const VelocityCoeffs& c, int i, int j);
Complex gamma_moment(const Truncation& tr, std::span<const Complex> x, int i, int j);

double nu_norm_sq(const VelocityCoeffs& c);

/// Minimum generalized eigenvalue of ⟨-Lf,f⟩ against the ν-form on
/// span{e_α : α ≠ 0}: the truncation-dependent coercivity constant λ₀(N).
double coercivity_constant(const Truncation& tr);

}  // namespace vfpns
