#include "landau/spectral.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fft_backend.hpp"

namespace landau {
namespace {

bool x_spectral(Rep rep) { return rep == Rep::KV || rep == Rep::KEta; }
bool v_spectral(Rep rep) { return rep == Rep::KEta || rep == Rep::XEta; }

Rep make_rep(bool xs, bool vs) {
  if (xs) return vs ? Rep::KEta : Rep::KV;
  return vs ? Rep::XEta : Rep::XV;
}

void forward_x(PhaseSpaceField& f) {
  const auto& g = f.grid;
  detail::fft_many(f.data.data(), g.nx(), g.nv(), detail::Axis::Columns, -1);
  const double scale = 1.0 / static_cast<double>(g.nx());
  for (auto& c : f.data) c *= scale;
}

void inverse_x(PhaseSpaceField& f) {
  const auto& g = f.grid;
  detail::fft_many(f.data.data(), g.nx(), g.nv(), detail::Axis::Columns, +1);
}

// The grid starts at v = -L, which contributes exp(i eta L) = (-1)^n.
void forward_v(PhaseSpaceField& f) {
  const auto& g = f.grid;
  detail::fft_many(f.data.data(), g.nx(), g.nv(), detail::Axis::Rows, -1);
  const double dv = g.dv();
  for (std::size_t r = 0; r < g.nx(); ++r) {
    auto row = f.row(r);
    for (std::size_t n = 0; n < g.nv(); ++n) row[n] *= (n % 2 == 0) ? dv : -dv;
  }
}

void inverse_v(PhaseSpaceField& f) {
  const auto& g = f.grid;
  const double scale = 1.0 / (2.0 * g.half_width());
  for (std::size_t r = 0; r < g.nx(); ++r) {
    auto row = f.row(r);
    for (std::size_t n = 0; n < g.nv(); ++n) row[n] *= (n % 2 == 0) ? scale : -scale;
  }
  detail::fft_many(f.data.data(), g.nx(), g.nv(), detail::Axis::Rows, +1);
}

// Multiply each KV row k by exp(i * sign * k * t * v_m).
void apply_shear(PhaseSpaceField& f, double kt_per_k) {
  const auto& g = f.grid;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double rate = g.k(i) * kt_per_k;
    if (rate == 0.0) continue;
    auto row = f.row(i);
    for (std::size_t m = 0; m < g.nv(); ++m) row[m] *= std::polar(1.0, rate * g.v(m));
  }
}

}  // namespace

void require_finite(const PhaseSpaceField& field, const std::string& where) {
  for (std::size_t idx = 0; idx < field.data.size(); ++idx) {
    const auto& c = field.data[idx];
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      std::ostringstream msg;
      msg << where << ": non-finite value at (" << idx / field.grid.nv() << ", "
          << idx % field.grid.nv() << ") in rep " << to_string(field.rep);
      throw NumericalError(msg.str());
    }
  }
}

PhaseSpaceField transform(const PhaseSpaceField& field, Rep target) {
  require_finite(field, "transform");
  PhaseSpaceField out = field;
  if (field.rep == target) return out;

  const bool xs_from = x_spectral(field.rep);
  const bool vs_from = v_spectral(field.rep);
  const bool xs_to = x_spectral(target);
  const bool vs_to = v_spectral(target);

  if (xs_from != xs_to) xs_to ? forward_x(out) : inverse_x(out);
  if (vs_from != vs_to) vs_to ? forward_v(out) : inverse_v(out);
  out.rep = make_rep(xs_to, vs_to);
  return out;
}

SpatialDensity density(const PhaseSpaceField& field) {
  if (field.frame == Frame::Gliding && !std::isfinite(field.time))
    throw std::invalid_argument("density: gliding-frame field carries no time tag");
  PhaseSpaceField kv = field.frame == Frame::Gliding
                           ? glide(field, field.time, GlideDirection::ToPhysical)
                           : transform(field, Rep::KV);
  const auto& g = kv.grid;
  SpatialDensity rho{g, field.time, std::vector<Complex>(g.nx())};
  const double dv = g.dv();
  for (std::size_t i = 0; i < g.nx(); ++i) {
    Complex acc{};
    for (const auto& c : kv.row(i)) acc += c;
    rho.coeffs[i] = acc * dv;
  }
  return rho;
}

ForceField poisson_force(const SpatialDensity& rho) {
  const auto& g = rho.grid;
  ForceField force{g, rho.time, std::vector<Complex>(g.nx()), false};
  if (std::abs(rho.at_k(0)) > 1e-8) force.neutrality_warning = true;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const int k = g.k(i);
    if (k == 0 || k == -static_cast<int>(g.nx() / 2)) continue;
    force.coeffs[i] = rho.coeffs[i] / Complex(0.0, static_cast<double>(k));
  }
  return force;
}

PhaseSpaceField glide(const PhaseSpaceField& field, double t, GlideDirection direction,
                      ValidityWindow window) {
  const bool to_gliding = direction == GlideDirection::ToGliding;
  if (field.frame == (to_gliding ? Frame::Gliding : Frame::Physical))
    throw std::invalid_argument("glide: field is already in the " + to_string(field.frame) +
                                " frame");
  PhaseSpaceField out = transform(field, Rep::KV);
  apply_shear(out, to_gliding ? t : -t);
  out.frame = to_gliding ? Frame::Gliding : Frame::Physical;
  out.time = t;

  const int k_max = window.k_max > 0 ? window.k_max : field.grid.k_max();
  if (std::abs(k_max * t) + window.eta_support > field.grid.eta_max())
    out.validity_warning = true;
  return out;
}

PhaseSpaceField shear_x(const PhaseSpaceField& field, double h) {
  PhaseSpaceField out = transform(field, Rep::KV);
  apply_shear(out, -h);
  return out;
}

PhaseSpaceField eta_derivative(const PhaseSpaceField& field) {
  PhaseSpaceField kv = transform(field, Rep::KV);
  const auto& g = kv.grid;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    auto row = kv.row(i);
    for (std::size_t m = 0; m < g.nv(); ++m) row[m] *= Complex(0.0, -g.v(m));
  }
  return transform(kv, Rep::KEta);
}

Complex eval_eta(const SpectralGrid& grid, std::span<const Complex> kv_row, double eta) {
  // Phasor recurrence: exp(-i eta v_m) = exp(-i eta v_0) * step^m.
  const Complex step = std::polar(1.0, -eta * grid.dv());
  Complex phase = std::polar(1.0, -eta * grid.v(0));
  Complex acc{};
  for (std::size_t m = 0; m < kv_row.size(); ++m) {
    acc += kv_row[m] * phase;
    phase *= step;
    if ((m & 255u) == 255u) phase /= std::abs(phase);
  }
  return acc * grid.dv();
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

constexpr char kMagic[8] = {'V', 'P', 'S', 'N', 'A', 'P', '0', '1'};

template <typename T>
void put(char* buf, std::size_t offset, T value) {
  std::memcpy(buf + offset, &value, sizeof(T));
}

template <typename T>
T get(const char* buf, std::size_t offset) {
  T value;
  std::memcpy(&value, buf + offset, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const PhaseSpaceField& field) {
  char header[64] = {};
  std::memcpy(header, kMagic, 8);
  put<std::uint64_t>(header, 8, field.grid.nx());
  put<std::uint64_t>(header, 16, field.grid.nv());
  put<double>(header, 24, field.grid.half_width());
  put<double>(header, 32, field.time);
  put<std::uint32_t>(header, 40, static_cast<std::uint32_t>(field.rep));
  put<std::uint32_t>(header, 44, static_cast<std::uint32_t>(field.frame));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
  out.write(header, sizeof header);
  out.write(reinterpret_cast<const char*>(field.data.data()),
            static_cast<std::streamsize>(field.data.size() * sizeof(Complex)));
  if (!out) throw std::runtime_error("failed writing snapshot: " + path.string());
}

PhaseSpaceField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot: " + path.string());
  char header[64];
  in.read(header, sizeof header);
  if (!in || std::memcmp(header, kMagic, 8) != 0)
    throw std::runtime_error("not a VPSNAP01 snapshot: " + path.string());

  const auto nx = get<std::uint64_t>(header, 8);
  const auto nv = get<std::uint64_t>(header, 16);
  const auto rep = get<std::uint32_t>(header, 40);
  const auto frame = get<std::uint32_t>(header, 44);
  if (rep > 3 || frame > 1) throw std::runtime_error("corrupt snapshot header: " + path.string());

  PhaseSpaceField field(SpectralGrid(nx, nv, get<double>(header, 24)), static_cast<Rep>(rep),
                        static_cast<Frame>(frame), get<double>(header, 32));
  in.read(reinterpret_cast<char*>(field.data.data()),
          static_cast<std::streamsize>(field.data.size() * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated snapshot: " + path.string());
  return field;
}

}  // namespace landau
