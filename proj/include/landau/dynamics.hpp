#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "landau/spectral.hpp"

namespace landau {

struct SimConfig {
  SpectralGrid grid;
  double dt = 0.01;
  double t0 = 0.0;
  double t_end = 1.0;
  double epsilon = 0.0;
  int diag_every = 1;
  bool force_off = false;
  /// Project samples onto real values after every step.
  bool real_valued = true;
  /// Override for the measured validity window of f0 (k_max = 0 means measure).
  ValidityWindow window{};
  std::vector<double> checkpoint_times;
  std::filesystem::path checkpoint_dir;
  std::string config_hash;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct SimState {
  double time = 0.0;
  PhaseSpaceField f;  ///< physical frame, XV
  long step_index = 0;
};

/// f(x, v) <- f(x - h v, v).
SimState step_free_transport(const SimState& state, double h);

/// f(x, v) <- f(x, v - h F(x)). Rejects a force whose spectrum is not Hermitian.
SimState step_kick(const SimState& state, const ForceField& force, double h);

/// Transport h/2, force from the midpoint density, kick h, transport h/2.
SimState strang_step(const SimState& state, double h, bool force_off = false,
                     bool real_valued = true);

/// Read-only view handed to monitors at each diagnostic time.
struct Diagnostic {
  double time;
  long step;
  const PhaseSpaceField& gliding;  ///< KV, gliding frame at `time`
  const SpatialDensity& density;
  bool validity_breached;
};

using Monitor = std::function<void(const Diagnostic&)>;

struct RunResult {
  SimState final_state;
  bool aborted = false;
  std::string abort_message;
  std::optional<std::filesystem::path> last_checkpoint;
  std::vector<std::filesystem::path> checkpoints;
  ValidityWindow window;
  double t_valid = 0.0;
  bool validity_breached = false;
};

/// Support of a field: largest |k| and |eta| whose KEta magnitude exceeds
/// rel_tol times the maximum.
ValidityWindow measure_support(const PhaseSpaceField& field, double rel_tol = 1e-10);

/// Last time at which content of the given support still fits the eta grid.
double valid_until(const SpectralGrid& grid, ValidityWindow window, double t0);

/// Integrate from cfg.t0 to cfg.t_end. Monitors see every diag_every-th step
/// plus the first and last. A non-finite state stops the run (aborted = true)
/// and the result keeps the last finite state.
RunResult run(const SimConfig& cfg, const PhaseSpaceField& f0,
              const std::vector<Monitor>& monitors = {});

/// Snapshot + JSON sidecar {time, step, config_hash}.
std::filesystem::path write_checkpoint(const std::filesystem::path& dir, const SimState& state,
                                       const std::string& config_hash);

}  // namespace landau
