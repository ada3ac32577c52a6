#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "landau/field.hpp"

namespace landau {

/// Raised when an operation receives NaN or Inf data.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Convert between representations.
///
/// Convention: f^(k, eta) = (1/Nx) sum_j dv sum_m f(x_j, v_m) exp(-i k x_j - i eta v_m),
/// i.e. Fourier-series coefficients in x and a Riemann sum for the continuum
/// transform in v. The inverse is f = sum_k (1/2L) sum_eta f^ exp(i k x + i eta v),
/// so that a round trip is the identity.
PhaseSpaceField transform(const PhaseSpaceField& field, Rep target);

/// rho(k) = dv * sum_m f^(k, v_m), i.e. the eta = 0 slice of the KEta data.
/// Gliding input is first sheared back to the physical frame at field.time.
SpatialDensity density(const PhaseSpaceField& field);

/// F^(k) = rho(k) / (i k); F^(0) = 0 and the x-Nyquist mode is zeroed so that F is real.
ForceField poisson_force(const SpatialDensity& rho);

enum class GlideDirection { ToGliding, ToPhysical };

/// Window within which the eta grid resolves the sheared content.
struct ValidityWindow {
  int k_max = 0;             ///< largest active |k|; 0 means Nx/2
  double eta_support = 0.0;  ///< |eta| extent of the unsheared content
};

/// g(x, v) = f(x + t v, v), realized exactly on the samples by the multiplier
/// exp(+i k t v) in the KV representation (inverse uses exp(-i k t v)).
/// The result is returned in KV.
PhaseSpaceField glide(const PhaseSpaceField& field, double t, GlideDirection direction,
                      ValidityWindow window = {});

/// d/d eta of the KEta data, computed as the transform of (-i v) g(x, v).
PhaseSpaceField eta_derivative(const PhaseSpaceField& field);

/// Free-transport shear f(x, v) <- f(x - h v, v). Returns KV.
PhaseSpaceField shear_x(const PhaseSpaceField& field, double h);

/// Reject NaN/Inf samples with a diagnostic naming the first offending index.
void require_finite(const PhaseSpaceField& field, const std::string& where);

/// Evaluate the continuum v-transform of a KV row at an arbitrary eta:
/// dv * sum_m row[m] exp(-i eta v_m).
Complex eval_eta(const SpectralGrid& grid, std::span<const Complex> kv_row, double eta);

// Snapshot file: 64-byte little-endian header then Nx*Nv (re, im) float64 pairs,
// row-major with the first axis (x or k) as the row.
//   0  char[8]  "VPSNAP01"
//   8  uint64   Nx
//   16 uint64   Nv
//   24 float64  L
//   32 float64  time
//   40 uint32   rep   (0 XV, 1 KV, 2 KEta, 3 XEta)
//   44 uint32   frame (0 physical, 1 gliding)
//   48 uint8[16] reserved, zero
void write_snapshot(const std::filesystem::path& path, const PhaseSpaceField& field);
PhaseSpaceField read_snapshot(const std::filesystem::path& path);

}  // namespace landau
