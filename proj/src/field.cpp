#include "landau/field.hpp"

#include <algorithm>
#include <cmath>

namespace landau {

std::string to_string(Rep rep) {
  switch (rep) {
    case Rep::XV: return "XV";
    case Rep::KV: return "KV";
    case Rep::KEta: return "KEta";
    case Rep::XEta: return "XEta";
  }
  return "?";
}

std::string to_string(Frame frame) {
  return frame == Frame::Physical ? "physical" : "gliding";
}

Complex SpatialDensity::at_k(int k) const {
  const long row = grid.row_of_k(k);
  return row < 0 ? Complex{} : coeffs[static_cast<std::size_t>(row)];
}

Complex ForceField::at_k(int k) const {
  const long row = grid.row_of_k(k);
  return row < 0 ? Complex{} : coeffs[static_cast<std::size_t>(row)];
}

std::vector<double> ForceField::physical() const {
  std::vector<double> out(grid.nx(), 0.0);
  for (std::size_t j = 0; j < grid.nx(); ++j) {
    Complex acc{};
    const double x = grid.x(j);
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      if (coeffs[i] == Complex{}) continue;
      acc += coeffs[i] * std::polar(1.0, grid.k(i) * x);
    }
    out[j] = acc.real();
  }
  return out;
}

double max_imag(const PhaseSpaceField& field) {
  double m = 0.0;
  for (const auto& c : field.data) m = std::max(m, std::abs(c.imag()));
  return m;
}

double max_abs(const PhaseSpaceField& field) {
  double m = 0.0;
  for (const auto& c : field.data) m = std::max(m, std::abs(c));
  return m;
}

double l2_norm_squared(const PhaseSpaceField& field) {
  double acc = 0.0;
  for (const auto& c : field.data) acc += std::norm(c);
  return acc * field.grid.dx() * field.grid.dv();
}

Complex mass(const PhaseSpaceField& field) {
  Complex acc{};
  for (const auto& c : field.data) acc += c;
  return acc * field.grid.dx() * field.grid.dv();
}

}  // namespace landau
