#pragma once

#include <optional>
#include <string>
#include <vector>

#include "landau/field.hpp"

namespace landau {

enum class Taper {
  CosSquared,  ///< psi^(eta) = cos^2(pi eta / (2 r)) on |eta| <= r
  Binomial,    ///< psi(v) proportional to (1 + cos(pi v / L))^p with p d_eta <= r
};

/// Velocity profile psi(v) sampled on the grid, with its continuum transform.
struct VelocityProfile {
  SpectralGrid grid;
  std::string name;
  std::vector<double> samples;  ///< psi(v_m)
  /// psi^ on the eta grid, FFT order (same convention as transform()).
  std::vector<Complex> spectrum;
  /// Spectral support radius; infinity for profiles without compact support.
  double radius = 0.0;
  /// ||psi^||_{L^1} in eta.
  double l1_norm = 0.0;
  /// Closed form of psi^ at arbitrary eta when one exists.
  double (*closed_form)(double) = nullptr;

  /// Continuum transform at eta: closed form when known, else band-limited
  /// evaluation of the samples.
  Complex hat(double eta) const;
};

/// Spectrally constructed bump with psi^(0) = 1 and psi^(eta) = 0 for |eta| > r.
/// Throws std::invalid_argument when r < 2 d_eta, quoting the smallest L that works.
VelocityProfile band_limited_bump(const SpectralGrid& grid, double r = 0.1,
                                  Taper taper = Taper::CosSquared);

/// psi(v) = exp(-v^2/2)/sqrt(2 pi), psi^(eta) = exp(-eta^2/2).
VelocityProfile gaussian_profile(const SpectralGrid& grid);

/// Re sum_k c_k (1+k^2)^{s/2} exp(i k x) exp(i(-eta_k - k t) v) psi(v), k = 1..K,
/// with eta_k = k unless given. Its density vanishes for every t > 0 as long as
/// the shifted supports avoid eta = 0.
PhaseSpaceField trivial_solution(const SpectralGrid& grid, double s,
                                 const std::vector<Complex>& coefficients,
                                 const VelocityProfile& psi, double t,
                                 const std::optional<std::vector<double>>& eta_k = std::nullopt);

/// eps cos(x - t0 v) psi + eps sin(k x + (eta - k t0) v) psi, sampled at t0.
PhaseSpaceField two_wave_data(const SpectralGrid& grid, double epsilon, int k, double eta,
                              const VelocityProfile& psi, double t0);

/// eps cos(k0 x) psi(v).
PhaseSpaceField single_mode_data(const SpectralGrid& grid, double epsilon, int k0,
                                 const VelocityProfile& psi);

}  // namespace landau
