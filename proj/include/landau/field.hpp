#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "landau/grid.hpp"

namespace landau {

using Complex = std::complex<double>;

/// Which axes are in spectral space. Storage is always Nx x Nv row-major with
/// the first axis (x or k) as the row index.
enum class Rep : std::uint32_t { XV = 0, KV = 1, KEta = 2, XEta = 3 };

/// Physical f(t, x, v) or gliding g(t, x, v) = f(t, x + t v, v).
enum class Frame : std::uint32_t { Physical = 0, Gliding = 1 };

std::string to_string(Rep rep);
std::string to_string(Frame frame);

struct PhaseSpaceField {
  SpectralGrid grid;
  Rep rep = Rep::XV;
  Frame frame = Frame::Physical;
  double time = 0.0;
  std::vector<Complex> data;
  /// Set by glide when the shear pushes content past the eta range of the grid.
  bool validity_warning = false;

  PhaseSpaceField() = default;
  PhaseSpaceField(SpectralGrid g, Rep r, Frame f = Frame::Physical, double t = 0.0)
      : grid(g), rep(r), frame(f), time(t), data(g.size()) {}

  Complex& at(std::size_t row, std::size_t col) { return data[row * grid.nv() + col]; }
  const Complex& at(std::size_t row, std::size_t col) const {
    return data[row * grid.nv() + col];
  }
  std::span<Complex> row(std::size_t r) { return {data.data() + r * grid.nv(), grid.nv()}; }
  std::span<const Complex> row(std::size_t r) const {
    return {data.data() + r * grid.nv(), grid.nv()};
  }
};

/// Fourier coefficients rho(k) of the spatial density, k in FFT order.
struct SpatialDensity {
  SpectralGrid grid;
  double time = 0.0;
  std::vector<Complex> coeffs;

  Complex at_k(int k) const;
};

struct ForceField {
  SpectralGrid grid;
  double time = 0.0;
  std::vector<Complex> coeffs;
  /// |rho(0)| exceeded 1e-8; the mean was projected out.
  bool neutrality_warning = false;

  Complex at_k(int k) const;
  /// Samples F(x_j), assuming a real force (imaginary parts dropped).
  std::vector<double> physical() const;
};

/// Largest |imag| over the samples of an XV field.
double max_imag(const PhaseSpaceField& field);
double max_abs(const PhaseSpaceField& field);
/// Sum over samples of |data|^2 times dx*dv (only meaningful in XV).
double l2_norm_squared(const PhaseSpaceField& field);
/// dx * dv * sum over samples (only meaningful in XV).
Complex mass(const PhaseSpaceField& field);

}  // namespace landau
