#include "landau/grid.hpp"

#include <stdexcept>

namespace landau {

SpectralGrid::SpectralGrid(std::size_t nx, std::size_t nv, double half_width)
    : nx_(nx), nv_(nv), half_width_(half_width) {
  if (nx == 0 || nx % 2 != 0) throw std::invalid_argument("SpectralGrid: Nx must be positive and even");
  if (nv == 0 || nv % 2 != 0) throw std::invalid_argument("SpectralGrid: Nv must be positive and even");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument("SpectralGrid: L must be positive");
}

long SpectralGrid::row_of_k(int k) const {
  const long n = static_cast<long>(nx_);
  if (k < -n / 2 || k >= n / 2) return -1;
  return k >= 0 ? k : k + n;
}

long SpectralGrid::column_of_eta_index(int idx) const {
  const long n = static_cast<long>(nv_);
  if (idx < -n / 2 || idx >= n / 2) return -1;
  return idx >= 0 ? idx : idx + n;
}

}  // namespace landau
