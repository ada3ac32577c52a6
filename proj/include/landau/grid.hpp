#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>

namespace landau {

/// Phase-space grid for (x, v) in T x [-L, L).
///
/// The x-domain has length 2*pi with Nx samples; v is sampled at
/// v_m = -L + m*dv, m = 0..Nv-1. Dual wavenumbers are stored in FFT order:
/// index i maps to k = i for i < Nx/2 and to i - Nx otherwise (same for eta,
/// scaled by d_eta = pi/L).
class SpectralGrid {
public:
  SpectralGrid() = default;
  SpectralGrid(std::size_t nx, std::size_t nv, double half_width);

  std::size_t nx() const { return nx_; }
  std::size_t nv() const { return nv_; }
  std::size_t size() const { return nx_ * nv_; }
  double half_width() const { return half_width_; }

  double dx() const { return 2.0 * std::numbers::pi / static_cast<double>(nx_); }
  double dv() const { return 2.0 * half_width_ / static_cast<double>(nv_); }
  double d_eta() const { return std::numbers::pi / half_width_; }

  double x(std::size_t j) const { return dx() * static_cast<double>(j); }
  double v(std::size_t m) const { return -half_width_ + dv() * static_cast<double>(m); }

  int k(std::size_t i) const {
    const auto n = static_cast<long>(nx_);
    const auto ii = static_cast<long>(i);
    return static_cast<int>(ii < n / 2 ? ii : ii - n);
  }
  int eta_index(std::size_t n) const {
    const auto nv = static_cast<long>(nv_);
    const auto nn = static_cast<long>(n);
    return static_cast<int>(nn < nv / 2 ? nn : nn - nv);
  }
  double eta(std::size_t n) const { return d_eta() * eta_index(n); }

  /// Storage row of wavenumber k, or -1 when k is outside the grid.
  long row_of_k(int k) const;
  /// Storage column of eta = n * d_eta, or -1 when outside the grid.
  long column_of_eta_index(int n) const;

  /// Largest representable |eta| (positive side).
  double eta_max() const { return d_eta() * static_cast<double>(nv_ / 2 - 1); }
  int k_max() const { return static_cast<int>(nx_ / 2); }

  bool operator==(const SpectralGrid&) const = default;

private:
  std::size_t nx_ = 0;
  std::size_t nv_ = 0;
  double half_width_ = 0.0;
};

}  // namespace landau
