#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "landau/field.hpp"
#include "landau/solutions.hpp"

namespace landau {

struct GrowthResult {
  double value;      ///< may be +inf when only the log is representable
  double log_value;
  long argmax;       ///< largest k attaining the sup (0 = empty product)
};

/// sup_{k >= 0} prod_{l=1}^k p / l^3, computed in log space.
GrowthResult growth_factor(double p);

struct TruncatedGrowth {
  double value;
  double log_value;
  long l_low, l_high;  ///< product range; empty when l_low > l_high
  std::string tag;     ///< "exp" when |eta| / cbrt(eps |eta|) <= T, else "else"
};

/// prod over integer l in [max(1, ceil(eta/T)), floor(cbrt(eps eta))] of eps eta / l^3.
TruncatedGrowth truncated_growth(double epsilon, double eta, double T);

/// eta_* = sqrt(eps T^3).
double cutoff_frequency_model(double epsilon, double T);
/// gamma_N = (1/3) (3N - 2) / (3N - 1).
double gamma_model(double N);

/// eta/k, eta/(k-1), ..., eta/1.
std::vector<double> echo_chain_times(int k, double eta);

struct EchoPrediction {
  double time;
  std::pair<int, int> modes;
  double v_frequency;
  double amplitude;
  std::vector<double> chain_times;
};

/// Echo of the two-wave data: time eta/k at modes k +- 1 with size eps^2 |eta| / k^3 ||psi^||_1.
/// When t0 is given, also enforces |eta - k t0| > 0.1.
EchoPrediction predict_echo(double epsilon, int k, double eta, double psi_hat_l1,
                            std::optional<double> t0 = std::nullopt);

struct EchoPeak {
  int mode = 0;
  double lo = 0.0, hi = 0.0;  ///< search window
  double time = 0.0;
  double amplitude = 0.0;     ///< 2 |rho(k)|, the size of the real cosine
  bool interior = false;      ///< maximum is a local one, not a window edge
};

/// Largest 2 |rho(t, mode)| over samples with t in [lo, hi].
EchoPeak find_echo_peak(const std::vector<double>& times, const std::vector<double>& rho_abs, int mode,
                        double lo, double hi);

struct EchoMeasurement {
  EchoPrediction prediction;
  std::vector<EchoPeak> primary;  ///< modes k-1 and k+1 around eta/k
  std::optional<EchoPeak> secondary;  ///< mode k-1 around eta/(k-1), when k >= 2
  double ratio = 0.0;  ///< secondary amplitude (or best primary) over the predicted amplitude
};

/// rho_abs[m] holds |rho(t, m)| on `times` for m = 0..K. Windows are +-window_frac
/// around each predicted time; modes beyond K are skipped.
EchoMeasurement measure_echo(const EchoPrediction& prediction, const std::vector<double>& times,
                             const std::vector<std::vector<double>>& rho_abs, double window_frac = 0.1);

/// g~(s, k, eta) for continuum eta.
using Background = std::function<Complex(double s, int k, double eta)>;

struct VolterraState {
  std::vector<double> times;
  int K = 0;
  /// rho[i][k + K] = rho~(times[i], k).
  std::vector<std::vector<Complex>> rho;

  Complex at(std::size_t i, int k) const { return rho[i][static_cast<std::size_t>(k + K)]; }
};

/// rho(t,k) = g(s0, k, k t) + coupling * sum_{0<|l|<=K} int_{s0}^t k (t-s)/l rho(s,l) g(s, k-l, k t - l s) ds,
/// marched with the trapezoidal rule (the s = t node carries a zero kernel).
VolterraState volterra_solve(const Background& background, int K, const std::vector<double>& times,
                             double coupling = -1.0);
/// Same equation with the free term g(s0, k, k t) taken from a separate accessor.
VolterraState volterra_solve(const Background& background, const Background& free_term, int K,
                             const std::vector<double>& times, double coupling = -1.0);

/// Background built from gliding-frame snapshots; rows with |k| <= k_keep are
/// retained and evaluated at continuum eta by band-limited summation. Times
/// between snapshots are linearly interpolated.
class SnapshotBackground {
public:
  explicit SnapshotBackground(int k_keep) : k_keep_(k_keep) {}
  /// Accepts any representation in either frame (converted to the gliding frame at f.time).
  void add(const PhaseSpaceField& f);
  Complex operator()(double s, int k, double eta) const;
  Background as_background() const;
  const std::vector<double>& times() const { return times_; }

private:
  Complex eval(std::size_t idx, int k, double eta) const;
  int k_keep_;
  SpectralGrid grid_;
  std::vector<double> times_;
  std::vector<std::vector<Complex>> rows_;  ///< per snapshot, (2 k_keep + 1) KV rows
};

struct SecondModelReport {
  double fitted = 0.0;     ///< sqrt(2) ||g(t1) - g(t0)|| / ||d_v g(t0)||
  double predicted = 0.0;  ///< eps int_{t0}^{t1} |psi^(t)| dt
  double ratio = 0.0;
};

/// Compare the growth of the gliding solution against the transport model
/// d_t g ~ eps psi^(t) cos(x - t v) d_v g. Diagnostic only.
SecondModelReport second_model_check(const PhaseSpaceField& g0, const PhaseSpaceField& g1,
                                     double epsilon, const VelocityProfile& psi);

}  // namespace landau
