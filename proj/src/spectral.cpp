#include "vfpns/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vfpns {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Grid::Grid(int dim, int points_per_axis, double box_length)
    : dim_(dim), n_(points_per_axis), length_(box_length) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1..3");
    if (!is_power_of_two(n_) || n_ < 8)
        throw std::invalid_argument("Grid: points_per_axis must be a power of two >= 8");
    if (!(box_length > 0.0)) throw std::invalid_argument("Grid: box_length must be positive");
    total_ = 1;
    for (int i = 0; i < dim_; ++i) total_ *= n_;
    dk_ = 2.0 * std::numbers::pi / length_;
}

double Grid::volume() const {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= length_;
    return v;
}

std::array<int, 3> Grid::indices_of(int lin) const {
    std::array<int, 3> m{0, 0, 0};
    for (int axis = dim_ - 1; axis >= 0; --axis) {
        m[axis] = lin % n_;
        lin /= n_;
    }
    return m;
}

std::array<int, 3> Grid::signed_indices_of(int lin) const {
    auto m = indices_of(lin);
    for (int axis = 0; axis < dim_; ++axis) m[axis] = signed_index(m[axis]);
    return m;
}

std::array<double, 3> Grid::wavevector(int lin) const {
    auto m = signed_indices_of(lin);
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int axis = 0; axis < dim_; ++axis) k[axis] = dk_ * m[axis];
    return k;
}

double Grid::k_norm_sq(int lin) const {
    auto k = wavevector(lin);
    double s = 0.0;
    for (int axis = 0; axis < dim_; ++axis) s += k[axis] * k[axis];
    return s;
}

int Grid::linear_of_signed(const std::array<int, 3>& m) const {
    int lin = 0;
    for (int axis = 0; axis < dim_; ++axis) {
        int idx = m[axis] < 0 ? m[axis] + n_ : m[axis];
        lin = lin * n_ + idx;
    }
    return lin;
}

int Grid::conjugate_mode(int lin) const {
    auto m = indices_of(lin);
    std::array<int, 3> neg{0, 0, 0};
    for (int axis = 0; axis < dim_; ++axis) neg[axis] = (n_ - m[axis]) % n_;
    int out = 0;
    for (int axis = 0; axis < dim_; ++axis) out = out * n_ + neg[axis];
    return out;
}

bool Grid::in_band(int lin) const {
    auto m = signed_indices_of(lin);
    const int limit = band_limit();
    for (int axis = 0; axis < dim_; ++axis)
        if (std::abs(m[axis]) > limit) return false;
    return true;
}

std::shared_ptr<const Grid> make_grid(int dim, int points_per_axis, double box_length) {
    return std::make_shared<const Grid>(dim, points_per_axis, box_length);
}

TransformContext::TransformContext(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), buffer_(grid_->total_modes()) {
    band_mask_.resize(grid_->total_modes());
    k_sq_.resize(grid_->total_modes());
    for (int axis = 0; axis < grid_->dim(); ++axis) k_axis_[axis].resize(grid_->total_modes());
    for (int lin = 0; lin < grid_->total_modes(); ++lin) {
        band_mask_[lin] = grid_->in_band(lin) ? 1 : 0;
        const auto k = grid_->wavevector(lin);
        k_sq_[lin] = grid_->k_norm_sq(lin);
        for (int axis = 0; axis < grid_->dim(); ++axis) k_axis_[axis][lin] = k[axis];
    }
    const int n = grid_->n();
    int dims[3] = {n, n, n};
    // FFTW_ESTIMATE keeps planning deterministic run to run.
    plan_forward_ = fftw_plan_dft(grid_->dim(), dims, as_fftw(buffer_.data()),
                                  as_fftw(buffer_.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    plan_backward_ = fftw_plan_dft(grid_->dim(), dims, as_fftw(buffer_.data()),
                                   as_fftw(buffer_.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plan_forward_ || !plan_backward_)
        throw std::runtime_error("TransformContext: FFTW planning failed");
}

TransformContext::~TransformContext() {
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

void TransformContext::to_physical(const SpectralField& f, std::span<Complex> out) {
    if (!(*f.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    if (out.size() != static_cast<size_t>(grid_->total_modes()))
        throw std::invalid_argument("transform: output size mismatch");
    std::copy(f.coeffs.begin(), f.coeffs.end(), buffer_.begin());
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    std::copy(buffer_.begin(), buffer_.end(), out.begin());
}

std::vector<Complex> TransformContext::to_physical(const SpectralField& f) {
    std::vector<Complex> out(grid_->total_modes());
    to_physical(f, out);
    return out;
}

void TransformContext::to_spectral(std::span<const Complex> physical, SpectralField& out) {
    if (physical.size() != static_cast<size_t>(grid_->total_modes()))
        throw std::invalid_argument("transform: input size mismatch");
    if (!(*out.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    std::copy(physical.begin(), physical.end(), buffer_.begin());
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    const double scale = 1.0 / grid_->total_modes();
    for (int i = 0; i < grid_->total_modes(); ++i) out.coeffs[i] = buffer_[i] * scale;
}

SpectralField TransformContext::to_spectral(std::span<const Complex> physical) {
    SpectralField out(grid_);
    to_spectral(physical, out);
    return out;
}

void TransformContext::to_physical_banded(const SpectralField& f, std::span<Complex> out) {
    if (!(*f.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    const int total = grid_->total_modes();
    for (int lin = 0; lin < total; ++lin)
        buffer_[lin] = band_mask_[lin] ? f.coeffs[lin] : Complex(0.0);
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    std::copy(buffer_.begin(), buffer_.end(), out.begin());
}

void TransformContext::to_spectral_banded(std::span<const Complex> physical, SpectralField& out) {
    if (!(*out.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    std::copy(physical.begin(), physical.end(), buffer_.begin());
    fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    const double scale = 1.0 / grid_->total_modes();
    const int total = grid_->total_modes();
    for (int lin = 0; lin < total; ++lin)
        out.coeffs[lin] = band_mask_[lin] ? buffer_[lin] * scale : Complex(0.0);
}

SpectralField derivative(const SpectralField& f, int axis) {
    SpectralField out(f.grid);
    const Grid& g = *f.grid;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const double k = g.wavevector(lin)[axis];
        out.coeffs[lin] = Complex(0.0, k) * f.coeffs[lin];
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out(f.grid);
    const Grid& g = *f.grid;
    for (int lin = 0; lin < g.total_modes(); ++lin)
        out.coeffs[lin] = -g.k_norm_sq(lin) * f.coeffs[lin];
    return out;
}

void truncate_to_band(SpectralField& f) {
    const Grid& g = *f.grid;
    for (int lin = 0; lin < g.total_modes(); ++lin)
        if (!g.in_band(lin)) f.coeffs[lin] = 0.0;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g,
                                TransformContext& ctx) {
    if (!(*f.grid == *g.grid)) throw std::invalid_argument("dealiased_product: grid mismatch");
    SpectralField a = f;
    SpectralField b = g;
    truncate_to_band(a);
    truncate_to_band(b);
    auto pa = ctx.to_physical(a);
    auto pb = ctx.to_physical(b);
    for (size_t i = 0; i < pa.size(); ++i) pa[i] *= pb[i];
    SpectralField out = ctx.to_spectral(pa);
    truncate_to_band(out);
    return out;
}

void TransformContext::to_physical_derivative_banded(const SpectralField& f, int axis,
                                                      std::span<Complex> out) {
    if (!(*f.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    const int total = grid_->total_modes();
    const auto& ks = k_axis_[axis];
    for (int lin = 0; lin < total; ++lin)
        buffer_[lin] = band_mask_[lin] ? Complex(0.0, ks[lin]) * f.coeffs[lin] : Complex(0.0);
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    std::copy(buffer_.begin(), buffer_.end(), out.begin());
}

void TransformContext::to_physical_laplacian_banded(const SpectralField& f,
                                                    std::span<Complex> out) {
    if (!(*f.grid == *grid_)) throw std::invalid_argument("transform: grid mismatch");
    const int total = grid_->total_modes();
    for (int lin = 0; lin < total; ++lin)
        buffer_[lin] = band_mask_[lin] ? -k_sq_[lin] * f.coeffs[lin] : Complex(0.0);
    fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(buffer_.data()),
                     as_fftw(buffer_.data()));
    std::copy(buffer_.begin(), buffer_.end(), out.begin());
}

double phi0_cutoff(double k_abs, double r0) {
    if (k_abs <= 0.5 * r0) return 1.0;
    if (k_abs > r0) return 0.0;
    const double s = (k_abs - 0.5 * r0) / (0.5 * r0);
    const double c = std::cos(0.5 * std::numbers::pi * s);
    return c * c;
}

FreqSplit freq_split(const SpectralField& f, double r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("freq_split: r0 must be positive");
    FreqSplit out{SpectralField(f.grid), SpectralField(f.grid)};
    const Grid& g = *f.grid;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const double phi = phi0_cutoff(std::sqrt(g.k_norm_sq(lin)), r0);
        out.low.coeffs[lin] = phi * f.coeffs[lin];
        out.high.coeffs[lin] = f.coeffs[lin] - out.low.coeffs[lin];
    }
    return out;
}

double l2_norm_sq(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.coeffs) s += std::norm(c);
    return f.grid->volume() * s;
}

double sobolev_norm_sq(const SpectralField& f, int s) {
    if (s < 0) throw std::invalid_argument("sobolev_norm_sq: s must be >= 0");
    const Grid& g = *f.grid;
    const int d = g.dim();
    // multiplier Σ_{|α| ≤ s} Π_i k_i^{2α_i}, each multi-index counted once
    std::vector<std::array<int, 3>> alphas;
    std::array<int, 3> a{0, 0, 0};
    auto emit = [&](auto&& self, int axis) -> void {
        if (axis == d) {
            if (a[0] + a[1] + a[2] <= s) alphas.push_back(a);
            return;
        }
        for (int j = 0; j <= s; ++j) {
            a[axis] = j;
            self(self, axis + 1);
        }
        a[axis] = 0;
    };
    emit(emit, 0);

    double total = 0.0;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const auto k = g.wavevector(lin);
        double w = 0.0;
        for (const auto& alpha : alphas) {
            double term = 1.0;
            for (int axis = 0; axis < d; ++axis)
                for (int j = 0; j < alpha[axis]; ++j) term *= k[axis] * k[axis];
            w += term;
        }
        total += w * std::norm(f.coeffs[lin]);
    }
    return g.volume() * total;
}

double lebesgue_norm(std::span<const Complex> physical, const Grid& grid, double p) {
    if (p < 1.0) throw std::invalid_argument("lebesgue_norm: p must be >= 1");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& v : physical) m = std::max(m, std::abs(v));
        return m;
    }
    const double cell = grid.volume() / grid.total_modes();
    double s = 0.0;
    for (const auto& v : physical) s += std::pow(std::abs(v), p);
    return std::pow(cell * s, 1.0 / p);
}

double l2_inner(const SpectralField& f, const SpectralField& g) {
    double s = 0.0;
    for (size_t i = 0; i < f.coeffs.size(); ++i)
        s += (f.coeffs[i] * std::conj(g.coeffs[i])).real();
    return f.grid->volume() * s;
}

double hermitian_defect(const SpectralField& f) {
    const Grid& g = *f.grid;
    double m = 0.0;
    for (int lin = 0; lin < g.total_modes(); ++lin) {
        const int neg = g.conjugate_mode(lin);
        m = std::max(m, std::abs(f.coeffs[lin] - std::conj(f.coeffs[neg])));
    }
    return m;
}

}  // namespace vfpns
