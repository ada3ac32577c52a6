#include "landau/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace landau {
namespace {

// The Nyquist row/column has no conjugate partner, so any nonzero frequency
// there would break reality. Both multipliers treat it as frequency zero.
int split_k(const SpectralGrid& g, std::size_t i) {
  return i == g.nx() / 2 ? 0 : g.k(i);
}
double split_eta(const SpectralGrid& g, std::size_t n) {
  return n == g.nv() / 2 ? 0.0 : g.eta(n);
}

// KV in place: row k times exp(-i k h v).
void transport_multiplier(PhaseSpaceField& kv, double h) {
  const auto& g = kv.grid;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const double rate = -split_k(g, i) * h;
    if (rate == 0.0) continue;
    auto row = kv.row(i);
    for (std::size_t m = 0; m < g.nv(); ++m) row[m] *= std::polar(1.0, rate * g.v(m));
  }
}

// XEta in place: row x_j times exp(-i eta h F(x_j)).
void kick_multiplier(PhaseSpaceField& xeta, const std::vector<double>& force, double h) {
  const auto& g = xeta.grid;
  for (std::size_t j = 0; j < g.nx(); ++j) {
    const double shift = h * force[j];
    if (shift == 0.0) continue;
    auto row = xeta.row(j);
    for (std::size_t n = 0; n < g.nv(); ++n) row[n] *= std::polar(1.0, -split_eta(g, n) * shift);
  }
}

void check_hermitian(const ForceField& force) {
  const auto& g = force.grid;
  double scale = 0.0;
  for (const auto& c : force.coeffs) scale = std::max(scale, std::abs(c));
  const double tol = 1e-12 * std::max(scale, 1.0);
  if (std::abs(force.coeffs[0].imag()) > tol)
    throw std::invalid_argument("step_kick: force mean is not real");
  for (int k = 1; k < static_cast<int>(g.nx() / 2); ++k) {
    if (std::abs(force.at_k(-k) - std::conj(force.at_k(k))) > tol) {
      std::ostringstream msg;
      msg << "step_kick: force spectrum is not Hermitian at k = " << k;
      throw std::invalid_argument(msg.str());
    }
  }
  if (std::abs(force.at_k(-static_cast<int>(g.nx() / 2)).imag()) > tol)
    throw std::invalid_argument("step_kick: force Nyquist mode is not real");
}

void project_real(PhaseSpaceField& xv) {
  for (auto& c : xv.data) c = c.real();
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.5) throw std::invalid_argument("dt must lie in (0, 0.5]");
  if (!(t0 < t_end)) throw std::invalid_argument("t0 must be smaller than t_end");
  if (diag_every < 1) throw std::invalid_argument("diag_every must be a positive integer");
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be non-negative");
}

SimState step_free_transport(const SimState& state, double h) {
  if (h < 0.0) throw std::invalid_argument("step_free_transport: h must be non-negative");
  PhaseSpaceField kv = transform(state.f, Rep::KV);
  transport_multiplier(kv, h);
  kv.time = state.time + h;
  return {state.time + h, transform(kv, Rep::XV), state.step_index};
}

SimState step_kick(const SimState& state, const ForceField& force, double h) {
  if (!(force.grid == state.f.grid)) throw std::invalid_argument("step_kick: grid mismatch");
  check_hermitian(force);
  PhaseSpaceField xeta = transform(state.f, Rep::XEta);
  kick_multiplier(xeta, force.physical(), h);
  return {state.time, transform(xeta, Rep::XV), state.step_index};
}

SimState strang_step(const SimState& state, double h, bool force_off, bool real_valued) {
  PhaseSpaceField kv = transform(state.f, Rep::KV);
  if (force_off) {
    transport_multiplier(kv, h);
  } else {
    transport_multiplier(kv, 0.5 * h);
    const ForceField force = poisson_force(density(kv));
    PhaseSpaceField xeta = transform(kv, Rep::XEta);
    kick_multiplier(xeta, force.physical(), h);
    kv = transform(xeta, Rep::KV);
    transport_multiplier(kv, 0.5 * h);
  }
  SimState next{state.time + h, transform(kv, Rep::XV), state.step_index + 1};
  next.f.time = next.time;
  if (real_valued) project_real(next.f);
  return next;
}

ValidityWindow measure_support(const PhaseSpaceField& field, double rel_tol) {
  const PhaseSpaceField fh = transform(field, Rep::KEta);
  const auto& g = fh.grid;
  const double peak = max_abs(fh);
  ValidityWindow w{0, 0.0};
  if (peak == 0.0) return w;
  const double cut = rel_tol * peak;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t n = 0; n < g.nv(); ++n) {
      if (std::abs(fh.at(i, n)) <= cut) continue;
      w.k_max = std::max(w.k_max, std::abs(g.k(i)));
      w.eta_support = std::max(w.eta_support, std::abs(g.eta(n)));
    }
  }
  return w;
}

double valid_until(const SpectralGrid& grid, ValidityWindow window, double t0) {
  if (window.k_max <= 0) return std::numeric_limits<double>::infinity();
  return t0 + (grid.eta_max() - window.eta_support) / window.k_max;
}

std::filesystem::path write_checkpoint(const std::filesystem::path& dir, const SimState& state,
                                       const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  std::ostringstream stem;
  stem << "checkpoint_" << state.step_index;
  const auto snap = dir / (stem.str() + ".vpsnap");
  PhaseSpaceField f = state.f;
  f.time = state.time;
  write_snapshot(snap, f);
  nlohmann::json side = {{"time", state.time},
                         {"step", state.step_index},
                         {"config_hash", config_hash},
                         {"snapshot", snap.filename().string()}};
  std::ofstream(dir / (stem.str() + ".json")) << side.dump(2) << '\n';
  return snap;
}

RunResult run(const SimConfig& cfg, const PhaseSpaceField& f0, const std::vector<Monitor>& monitors) {
  cfg.validate();
  if (!(f0.grid == cfg.grid)) throw std::invalid_argument("run: initial data grid differs from config");
  if (cfg.real_valued && max_imag(transform(f0, Rep::XV)) > 1e-12 * std::max(1.0, max_abs(f0)))
    throw std::invalid_argument("run: initial samples are not real");

  RunResult result;
  result.window = cfg.window.k_max > 0 ? cfg.window : measure_support(f0);
  result.t_valid = valid_until(cfg.grid, result.window, cfg.t0);

  SimState state{cfg.t0, transform(f0, Rep::XV), 0};
  state.f.frame = Frame::Physical;
  state.f.time = cfg.t0;

  std::vector<double> pending = cfg.checkpoint_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_ckpt = 0;

  const double span = cfg.t_end - cfg.t0;
  const long n_steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));

  auto diagnose = [&] {
    if (state.time > result.t_valid * (1 + 1e-12)) result.validity_breached = true;
    if (monitors.empty()) return;
    PhaseSpaceField gl = glide(state.f, state.time, GlideDirection::ToGliding);
    gl.validity_warning = result.validity_breached;
    const SpatialDensity rho = density(state.f);
    const Diagnostic d{state.time, state.step_index, gl, rho, result.validity_breached};
    for (const auto& m : monitors) m(d);
  };
  auto checkpoint = [&] {
    const double slack = 1e-9 * cfg.dt;
    while (next_ckpt < pending.size() && pending[next_ckpt] <= state.time + slack) {
      if (!cfg.checkpoint_dir.empty()) {
        result.last_checkpoint = write_checkpoint(cfg.checkpoint_dir, state, cfg.config_hash);
        result.checkpoints.push_back(*result.last_checkpoint);
      }
      ++next_ckpt;
    }
  };

  diagnose();
  checkpoint();
  for (long s = 1; s <= n_steps; ++s) {
    const double target = s == n_steps ? cfg.t_end : cfg.t0 + static_cast<double>(s) * cfg.dt;
    SimState next;
    try {
      next = strang_step(state, target - state.time, cfg.force_off, cfg.real_valued);
      require_finite(next.f, "run");
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "non-finite state at step " << s << " (t = " << target << "): " << e.what()
          << "; last good checkpoint: "
          << (result.last_checkpoint ? result.last_checkpoint->string() : std::string("none"));
      result.aborted = true;
      result.abort_message = msg.str();
      break;
    }
    next.time = target;
    next.f.time = target;
    state = std::move(next);
    if (s % cfg.diag_every == 0 || s == n_steps) diagnose();
    checkpoint();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace landau
