#include "landau/solutions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "landau/spectral.hpp"

namespace landau {
namespace {

using std::numbers::pi;

// Real samples of (1/2L) sum_n psi^_n exp(i eta_n v) for a real, even spectrum.
std::vector<double> samples_from_even_spectrum(const SpectralGrid& g,
                                               const std::vector<Complex>& spec) {
  PhaseSpaceField f(g, Rep::XEta);
  for (std::size_t n = 0; n < g.nv(); ++n) f.at(0, n) = spec[n];
  // Row 0 carries psi; other rows stay zero and are discarded.
  const PhaseSpaceField xv = transform(f, Rep::XV);
  std::vector<double> out(g.nv());
  for (std::size_t m = 0; m < g.nv(); ++m) out[m] = xv.at(0, m).real();
  return out;
}

double gaussian_hat(double eta) { return std::exp(-0.5 * eta * eta); }

void check_support(const SpectralGrid& g, double centre, double radius, const char* what) {
  if (std::abs(centre) + radius > g.eta_max()) {
    std::ostringstream msg;
    msg << what << ": spectral content at |eta| = " << std::abs(centre) + radius
        << " exceeds the grid range " << g.eta_max();
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

Complex VelocityProfile::hat(double eta) const {
  if (closed_form) return closed_form(eta);
  std::vector<Complex> row(samples.begin(), samples.end());
  return eval_eta(grid, row, eta);
}

VelocityProfile band_limited_bump(const SpectralGrid& grid, double r, Taper taper) {
  const double de = grid.d_eta();
  if (!(r >= 2.0 * de)) {
    std::ostringstream msg;
    msg << "band_limited_bump: radius " << r << " is below 2 d_eta = " << 2.0 * de
        << "; need L >= " << 2.0 * pi / r;
    throw std::invalid_argument(msg.str());
  }
  VelocityProfile p;
  p.grid = grid;
  p.radius = r;
  p.spectrum.assign(grid.nv(), 0.0);

  if (taper == Taper::CosSquared) {
    p.name = "cos2";
    for (std::size_t n = 0; n < grid.nv(); ++n) {
      const double eta = grid.eta(n);
      if (std::abs(eta) < r) {
        const double c = std::cos(pi * eta / (2.0 * r));
        p.spectrum[n] = c * c;
      }
    }
  } else {
    p.name = "binomial";
    // (1 + cos th)^p = 2^-p sum_j C(2p, p+j) e^{i j th}, normalized to psi^(0) = 1.
    const int order = static_cast<int>(std::floor(r / de + 1e-12));
    check_support(grid, 0.0, order * de, "band_limited_bump");
    const double ln_centre = std::lgamma(2.0 * order + 1) - 2.0 * std::lgamma(order + 1.0);
    for (int j = -order; j <= order; ++j) {
      const double ln_c = std::lgamma(2.0 * order + 1) - std::lgamma(order + j + 1.0) -
                          std::lgamma(order - j + 1.0);
      p.spectrum[static_cast<std::size_t>(grid.column_of_eta_index(j))] = std::exp(ln_c - ln_centre);
    }
  }
  for (const auto& c : p.spectrum) p.l1_norm += std::abs(c) * de;
  p.samples = samples_from_even_spectrum(grid, p.spectrum);
  return p;
}

VelocityProfile gaussian_profile(const SpectralGrid& grid) {
  VelocityProfile p;
  p.grid = grid;
  p.name = "gaussian";
  p.radius = std::numeric_limits<double>::infinity();
  p.l1_norm = std::sqrt(2.0 * pi);
  p.closed_form = gaussian_hat;
  p.samples.resize(grid.nv());
  p.spectrum.resize(grid.nv());
  for (std::size_t m = 0; m < grid.nv(); ++m) {
    const double v = grid.v(m);
    p.samples[m] = std::exp(-0.5 * v * v) / std::sqrt(2.0 * pi);
  }
  for (std::size_t n = 0; n < grid.nv(); ++n) p.spectrum[n] = gaussian_hat(grid.eta(n));
  return p;
}

PhaseSpaceField trivial_solution(const SpectralGrid& grid, double s,
                                 const std::vector<Complex>& coefficients,
                                 const VelocityProfile& psi, double t,
                                 const std::optional<std::vector<double>>& eta_k) {
  if (!(t > 0.0)) throw std::invalid_argument("trivial_solution: t must be positive");
  if (eta_k && eta_k->size() < coefficients.size())
    throw std::invalid_argument("trivial_solution: fewer eta_k than coefficients");
  const std::size_t modes = coefficients.size();
  if (modes >= grid.nx() / 2)
    throw std::invalid_argument("trivial_solution: more modes than the x grid resolves");

  PhaseSpaceField f(grid, Rep::XV, Frame::Physical, t);
  for (std::size_t idx = 0; idx < modes; ++idx) {
    const int k = static_cast<int>(idx) + 1;
    const double shift = (eta_k ? (*eta_k)[idx] : static_cast<double>(k)) + k * t;
    check_support(grid, shift, psi.radius, "trivial_solution");
    const Complex amp = coefficients[idx] * std::pow(1.0 + k * k, 0.5 * s);
    for (std::size_t j = 0; j < grid.nx(); ++j)
      for (std::size_t m = 0; m < grid.nv(); ++m)
        f.at(j, m) += (amp * std::polar(1.0, k * grid.x(j) - shift * grid.v(m))).real() *
                      psi.samples[m];
  }
  return f;
}

PhaseSpaceField two_wave_data(const SpectralGrid& grid, double epsilon, int k, double eta,
                              const VelocityProfile& psi, double t0) {
  if (!(std::abs(t0) > 0.1)) throw std::invalid_argument("two_wave_data: need |t0| > 0.1");
  if (!(std::abs(eta - k * t0) > 0.1))
    throw std::invalid_argument("two_wave_data: need |eta - k t0| > 0.1");
  if (k < 1 || k >= static_cast<int>(grid.nx() / 2))
    throw std::invalid_argument("two_wave_data: k outside the x grid");
  if (std::isfinite(psi.radius)) {
    check_support(grid, t0, psi.radius, "two_wave_data");
    check_support(grid, eta - k * t0, psi.radius, "two_wave_data");
  }
  PhaseSpaceField f(grid, Rep::XV, Frame::Physical, t0);
  for (std::size_t j = 0; j < grid.nx(); ++j) {
    const double x = grid.x(j);
    for (std::size_t m = 0; m < grid.nv(); ++m) {
      const double v = grid.v(m);
      f.at(j, m) = epsilon * psi.samples[m] *
                   (std::cos(x - t0 * v) + std::sin(k * x + (eta - k * t0) * v));
    }
  }
  return f;
}

PhaseSpaceField single_mode_data(const SpectralGrid& grid, double epsilon, int k0,
                                 const VelocityProfile& psi) {
  if (k0 < 1 || k0 >= static_cast<int>(grid.nx() / 2))
    throw std::invalid_argument("single_mode_data: k0 outside the x grid");
  PhaseSpaceField f(grid, Rep::XV);
  for (std::size_t j = 0; j < grid.nx(); ++j)
    for (std::size_t m = 0; m < grid.nv(); ++m)
      f.at(j, m) = epsilon * std::cos(k0 * grid.x(j)) * psi.samples[m];
  return f;
}

}  // namespace landau
