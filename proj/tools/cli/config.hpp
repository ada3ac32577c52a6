#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "landau/field.hpp"
#include "landau/grid.hpp"
#include "landau/solutions.hpp"
#include "landau/weights.hpp"

namespace landau::cli {

/// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  std::string type = "bump";  ///< "bump" or "gaussian"
  double r = 0.1;
  Taper taper = Taper::CosSquared;
};

struct InitialSpec {
  std::string type;  ///< trivial | two_wave | single_mode | snapshot | zero
  ProfileSpec profile;
  // trivial
  double s = 0.0;
  std::vector<Complex> coefficients;
  std::optional<std::vector<double>> eta_k;
  // two_wave
  int k = 2;
  double eta = 30.0;
  // single_mode
  int k0 = 1;
  // snapshot
  std::filesystem::path path;
};

struct ParamsSpec {
  double N = 1.0;
  double sigma = 4.0;
  double alpha = 0.45;
  std::optional<double> C;  ///< empty = "auto"
  ConstraintMode mode = ConstraintMode::Strict;
  std::optional<double> t_min;  ///< defaults to dt
};

struct BoundSpec {
  int k_max = 16;
  int l_max = 16;
  int t_samples = 20;
  double t_min = 0.01;
  int level = 2;
  int max_power = 12;
};

struct OutputSpec {
  std::filesystem::path dir = "out";
  int K_report = 3;
  std::vector<double> checkpoint_times;
};

struct VolterraSpec {
  int K = 3;
  std::optional<double> t_end;  ///< defaults to the run's t_end
  double dt = 0.05;
  std::string background = "initial";  ///< zero | initial | simulation
  double snapshot_every = 0.1;
};

struct RunConfig {
  std::size_t Nx = 32, Nv = 1024;
  double L = 64.0;
  double t0 = 0.5, t_end = 10.0, dt = 0.01;
  int diag_every = 10;
  double epsilon = 0.01;
  bool bootstrap = true;
  bool force_off = false;
  ParamsSpec params;
  BoundSpec bound;
  InitialSpec initial;
  OutputSpec output;
  VolterraSpec volterra;

  nlohmann::json raw;       ///< parsed document, comments stripped
  std::string hash;         ///< digest of the canonical dump of raw
  std::filesystem::path base_dir;  ///< relative paths resolve against this

  SpectralGrid grid() const { return {Nx, Nv, L}; }
};

/// Parse a JSON config (comments allowed). Throws ConfigError with the offending key.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// Profile and initial field named by the config, at time t0.
VelocityProfile make_profile(const RunConfig& cfg);
PhaseSpaceField make_initial(const RunConfig& cfg);

/// Generator parameters for the config with C filled in when fixed (auto leaves C = 1).
GeneratorParams config_params(const RunConfig& cfg);

BoundOptions bound_options(const BoundSpec& b, double T);

nlohmann::json to_json(const GeneratorParams& p);
nlohmann::json to_json(const std::vector<ConstraintRow>& rows);

}  // namespace landau::cli
