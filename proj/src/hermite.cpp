#include "vfpns/hermite.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vfpns {

namespace {

// Lexicographically decreasing within a fixed degree.
bool lex_greater(const MultiIndex& a, const MultiIndex& b) {
    for (int i = 0; i < 3; ++i) {
        if (a.entries[i] != b.entries[i]) return a.entries[i] > b.entries[i];
    }
    return false;
}

}  // namespace

Truncation::Truncation(int dim_v, int max_degree) : dim_(dim_v), max_degree_(max_degree) {
    if (dim_v < 1 || dim_v > 3) throw std::invalid_argument("Truncation: dim_v must be 1, 2 or 3");
    if (max_degree < 2) throw std::invalid_argument("Truncation: max_degree must be >= 2");

    for (int deg = 0; deg <= max_degree_; ++deg) {
        std::vector<MultiIndex> level;
        MultiIndex alpha;
        // enumerate all α with |α| = deg
        std::array<int, 3> a{0, 0, 0};
        auto emit = [&](auto&& self, int axis, int remaining) -> void {
            if (axis == dim_ - 1) {
                a[axis] = remaining;
                MultiIndex m;
                for (int i = 0; i < dim_; ++i) m.entries[i] = a[i];
                level.push_back(m);
                return;
            }
            for (int j = remaining; j >= 0; --j) {
                a[axis] = j;
                self(self, axis + 1, remaining - j);
            }
        };
        emit(emit, 0, deg);
        std::sort(level.begin(), level.end(), lex_greater);
        indices_.insert(indices_.end(), level.begin(), level.end());
    }

    const int span = max_degree_ + 1;
    int table_size = 1;
    for (int i = 0; i < dim_; ++i) table_size *= span;
    position_table_.assign(table_size, -1);
    for (int p = 0; p < size(); ++p) position_table_[flat(indices_[p])] = p;

    for (int axis = 0; axis < dim_; ++axis) {
        raised_[axis].assign(size(), -1);
        lowered_[axis].assign(size(), -1);
        for (int p = 0; p < size(); ++p) {
            MultiIndex up = indices_[p];
            up.entries[axis] += 1;
            raised_[axis][p] = position(up);
            MultiIndex down = indices_[p];
            down.entries[axis] -= 1;
            if (down.entries[axis] >= 0) lowered_[axis][p] = position(down);
        }
    }
}

int Truncation::flat(const MultiIndex& alpha) const {
    const int span = max_degree_ + 1;
    int idx = 0;
    for (int i = 0; i < dim_; ++i) idx = idx * span + alpha.entries[i];
    return idx;
}

int Truncation::position(const MultiIndex& alpha) const {
    for (int i = 0; i < dim_; ++i) {
        if (alpha.entries[i] < 0 || alpha.entries[i] > max_degree_) return -1;
    }
    if (alpha.degree() > max_degree_) return -1;
    return position_table_[flat(alpha)];
}

std::shared_ptr<const Truncation> enumerate_truncation(int dim_v, int max_degree) {
    return std::make_shared<const Truncation>(dim_v, max_degree);
}

void ladder_multiply_v(const Truncation& tr, int axis, std::span<const Complex> in,
                       std::span<Complex> out) {
    // (v_i f)_α = √(α_i+1) c_{α+e_i} + √(α_i) c_{α-e_i}
    const int n = tr.size();
    for (int p = 0; p < n; ++p) {
        const int ai = tr.entry(p, axis);
        Complex v(0.0);
        const int up = tr.raised(p, axis);
        if (up >= 0) v += std::sqrt(double(ai + 1)) * in[up];
        const int down = tr.lowered(p, axis);
        if (down >= 0) v += std::sqrt(double(ai)) * in[down];
        out[p] = v;
    }
}

void ladder_differentiate_v(const Truncation& tr, int axis, std::span<const Complex> in,
                            std::span<Complex> out) {
    // ∂_v e_n = (√n/2) e_{n-1} − (√(n+1)/2) e_{n+1}, per axis
    const int n = tr.size();
    for (int p = 0; p < n; ++p) {
        const int ai = tr.entry(p, axis);
        Complex v(0.0);
        const int up = tr.raised(p, axis);
        if (up >= 0) v += 0.5 * std::sqrt(double(ai + 1)) * in[up];
        const int down = tr.lowered(p, axis);
        if (down >= 0) v -= 0.5 * std::sqrt(double(ai)) * in[down];
        out[p] = v;
    }
}

void ladder_fokker_planck(const Truncation& tr, std::span<const Complex> in,
                          std::span<Complex> out) {
    const int n = tr.size();
    for (int p = 0; p < n; ++p) out[p] = -double(tr.degree(p)) * in[p];
}

double nu_form_sq(const Truncation& tr, std::span<const Complex> x) {
    const int n = tr.size();
    double total = 0.0;
    for (int p = 0; p < n; ++p) total += std::norm(x[p]);
    std::vector<Complex> work(n);
    for (int axis = 0; axis < tr.dim(); ++axis) {
        ladder_multiply_v(tr, axis, x, work);
        for (int p = 0; p < n; ++p) total += std::norm(work[p]);
        ladder_differentiate_v(tr, axis, x, work);
        for (int p = 0; p < n; ++p) total += std::norm(work[p]);
    }
    return total;
}

VelocityCoeffs apply_fokker_planck(const VelocityCoeffs& c) {
    VelocityCoeffs out(c.trunc);
    ladder_fokker_planck(*c.trunc, c.values, out.values);
    return out;
}

VelocityCoeffs multiply_by_v(const VelocityCoeffs& c, int axis) {
    VelocityCoeffs out(c.trunc);
    ladder_multiply_v(*c.trunc, axis, c.values, out.values);
    return out;
}

VelocityCoeffs differentiate_v(const VelocityCoeffs& c, int axis) {
    VelocityCoeffs out(c.trunc);
    ladder_differentiate_v(*c.trunc, axis, c.values, out.values);
    return out;
}

MacroMicro macro_micro_split(const VelocityCoeffs& c) {
    const Truncation& tr = *c.trunc;
    MacroMicro result{c.values[0], {Complex(0.0), Complex(0.0), Complex(0.0)}, VelocityCoeffs(c.trunc)};
    result.micro.values = c.values;
    result.micro.values[0] = 0.0;
    for (int axis = 0; axis < tr.dim(); ++axis) {
        result.b[axis] = c.values[1 + axis];
        result.micro.values[1 + axis] = 0.0;
    }
    return result;
}

Complex gamma_moment(const Truncation& tr, std::span<const Complex> x, int i, int j) {
    if (i == j) {
        MultiIndex alpha;
        alpha.entries[i] = 2;
        return std::sqrt(2.0) * x[tr.position(alpha)];
    }
    MultiIndex alpha;
    alpha.entries[i] = 1;
    alpha.entries[j] = 1;
    return x[tr.position(alpha)];
}

Complex gamma_moment(const VelocityCoeffs& c, int i, int j) {
    return gamma_moment(*c.trunc, c.values, i, j);
}

double nu_norm_sq(const VelocityCoeffs& c) { return nu_form_sq(*c.trunc, c.values); }

double coercivity_constant(const Truncation& tr) {
    const int n = tr.size() - 1;  // exclude α = 0
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int p = 1; p <= n; ++p) A(p - 1, p - 1) = double(tr.degree(p));

    // ν-form Gram matrix on span{e_α : α ≠ 0}, columns probed through the
    // same closed ladder kernels the norm uses.
    Eigen::MatrixXd B(n, n);
    const int full = tr.size();
    std::vector<Complex> unit(full), work(full);
    std::vector<std::vector<Complex>> columns;
    columns.reserve(n);
    for (int q = 1; q <= n; ++q) {
        std::fill(unit.begin(), unit.end(), Complex(0.0));
        unit[q] = 1.0;
        // accumulate Q e_q  where Q = I + Σ V_iᵀV_i + Σ D_iᵀD_i
        std::vector<Complex> col(full, Complex(0.0));
        col[q] = 1.0;
        std::vector<Complex> tmp(full);
        for (int axis = 0; axis < tr.dim(); ++axis) {
            ladder_multiply_v(tr, axis, unit, work);
            ladder_multiply_v(tr, axis, work, tmp);  // V symmetric
            for (int p = 0; p < full; ++p) col[p] += tmp[p];
            ladder_differentiate_v(tr, axis, unit, work);
            // Dᵀ has the mirrored ladder coefficients
            for (int p = 0; p < full; ++p) tmp[p] = 0.0;
            for (int p = 0; p < full; ++p) {
                const int ai = tr.entry(p, axis);
                const int up = tr.raised(p, axis);
                if (up >= 0) tmp[up] += 0.5 * std::sqrt(double(ai + 1)) * work[p];
                const int down = tr.lowered(p, axis);
                if (down >= 0) tmp[down] -= 0.5 * std::sqrt(double(ai)) * work[p];
            }
            for (int p = 0; p < full; ++p) col[p] += tmp[p];
        }
        columns.push_back(std::move(col));
    }
    for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) B(p, q) = columns[q][p + 1].real();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, B);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("coercivity_constant: generalized eigensolve failed");
    return solver.eigenvalues().minCoeff();
}

}  // namespace vfpns
