#pragma once

#include <array>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "vfpns/hermite.hpp"

namespace vfpns {

/// Periodic box lattice.  Spectral coefficients are stored so that
/// g(x) = Σ_k ĝ(k) e^{ik·x}; with this convention the one Parseval
/// constant used by every norm is ‖g‖²_{L²} = L^d Σ_k |ĝ(k)|²
/// (identically Σ_k |ĝ_dft(k)|² L^d / n^{2d} in unnormalized-DFT units).
class Grid {
  public:
    Grid(int dim, int points_per_axis, double box_length);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double length() const { return length_; }
    int total_modes() const { return total_; }
    double dk() const { return dk_; }
    double volume() const;

    /// Signed integer index of axis-position m in FFT layout.
    int signed_index(int m) const { return m < n_ / 2 ? m : m - n_; }

    std::array<int, 3> indices_of(int lin) const;
    std::array<int, 3> signed_indices_of(int lin) const;
    std::array<double, 3> wavevector(int lin) const;
    double k_norm_sq(int lin) const;

    int linear_of_signed(const std::array<int, 3>& m) const;
    /// Position of -k for the mode at lin.
    int conjugate_mode(int lin) const;

    /// 2/3-rule dealiasing band: every |signed index| ≤ floor(n/3).
    bool in_band(int lin) const;
    int band_limit() const { return n_ / 3; }

    bool operator==(const Grid& other) const {
        return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
    }

  private:
    int dim_;
    int n_;
    double length_;
    int total_;
    double dk_;
};

std::shared_ptr<const Grid> make_grid(int dim, int points_per_axis, double box_length);

/// Scalar field on the lattice, stored spectrally.
struct SpectralField {
    std::shared_ptr<const Grid> grid;
    std::vector<Complex> coeffs;

    explicit SpectralField(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), coeffs(grid->total_modes(), Complex(0.0)) {}
};

/// FFT scratch + plans for one grid.  Not thread-safe: one context per
/// concurrent worker.
class TransformContext {
  public:
    explicit TransformContext(std::shared_ptr<const Grid> grid);
    ~TransformContext();
    TransformContext(const TransformContext&) = delete;
    TransformContext& operator=(const TransformContext&) = delete;

    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }

    std::vector<Complex> to_physical(const SpectralField& f);
    void to_physical(const SpectralField& f, std::span<Complex> out);
    SpectralField to_spectral(std::span<const Complex> physical);
    void to_spectral(std::span<const Complex> physical, SpectralField& out);

    /// Fused variants for the dealiased product pipelines: the input is
    /// band-truncated on the way in (resp. the result on the way out)
    /// without materializing an intermediate field.
    void to_physical_banded(const SpectralField& f, std::span<Complex> out);
    void to_spectral_banded(std::span<const Complex> physical, SpectralField& out);
    /// F⁻¹[i k_axis f̂] and F⁻¹[−|k|² f̂] on the band, without materializing
    /// the differentiated field.
    void to_physical_derivative_banded(const SpectralField& f, int axis, std::span<Complex> out);
    void to_physical_laplacian_banded(const SpectralField& f, std::span<Complex> out);

  private:
    std::shared_ptr<const Grid> grid_;
    std::vector<Complex> buffer_;
    std::vector<unsigned char> band_mask_;
    std::array<std::vector<double>, 3> k_axis_;
    std::vector<double> k_sq_;
    void* plan_forward_;
    void* plan_backward_;
};

SpectralField derivative(const SpectralField& f, int axis);
SpectralField laplacian(const SpectralField& f);

/// Pointwise physical product under the 2/3 rule: both factors and the
/// result are truncated to the dealiasing band.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g,
                                TransformContext& ctx);

void truncate_to_band(SpectralField& f);

/// Radial cutoff φ₀: 1 on |k| ≤ r₀/2, cos² ramp on (r₀/2, r₀], 0 beyond.
double phi0_cutoff(double k_abs, double r0);

struct FreqSplit {
    SpectralField low;
    SpectralField high;
};
FreqSplit freq_split(const SpectralField& f, double r0);

double l2_norm_sq(const SpectralField& f);
double sobolev_norm_sq(const SpectralField& f, int s);
double lebesgue_norm(std::span<const Complex> physical, const Grid& grid, double p);

double l2_inner(const SpectralField& f, const SpectralField& g);

/// Largest |ĝ(k) − conj(ĝ(−k))| over the lattice; zero for real data.
double hermitian_defect(const SpectralField& f);

}  // namespace vfpns
