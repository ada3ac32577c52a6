#include "landau/echo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "landau/spectral.hpp"
#include "landau/util.hpp"

namespace landau {

GrowthResult growth_factor(double p) {
  if (!(p > 0)) throw std::invalid_argument("growth_factor: p must be positive");
  // Factors p / l^3 are >= 1 exactly while l^3 <= p, so the running product
  // peaks at the last such l.
  const double lp = std::log(p);
  double log_value = 0.0;
  long k = 0;
  for (long l = 1;; ++l) {
    const double cube = static_cast<double>(l) * l * l;
    if (cube > p) break;
    log_value += lp - 3.0 * std::log(static_cast<double>(l));
    k = l;
  }
  return {std::exp(log_value), log_value, k};
}

TruncatedGrowth truncated_growth(double epsilon, double eta, double T) {
  if (!(epsilon > 0 && eta > 0 && T > 0))
    throw std::invalid_argument("truncated_growth: inputs must be positive");
  const double x = epsilon * eta;
  long hi = static_cast<long>(std::floor(std::cbrt(x)));
  while (static_cast<double>(hi + 1) * (hi + 1) * (hi + 1) <= x) ++hi;
  while (hi > 0 && static_cast<double>(hi) * hi * hi > x) --hi;
  const long lo = std::max(1L, static_cast<long>(std::ceil(eta / T)));

  TruncatedGrowth r{1.0, 0.0, lo, hi, ""};
  const double lx = std::log(x);
  for (long l = lo; l <= hi; ++l) r.log_value += lx - 3.0 * std::log(static_cast<double>(l));
  r.value = std::exp(r.log_value);
  r.tag = eta / std::cbrt(x) <= T ? "exp" : "else";
  return r;
}

double cutoff_frequency_model(double epsilon, double T) {
  if (!(epsilon > 0 && T > 0)) throw std::invalid_argument("cutoff_frequency_model: inputs must be positive");
  return std::sqrt(epsilon * T * T * T);
}

double gamma_model(double N) {
  if (!(N > 0)) throw std::invalid_argument("gamma_model: N must be positive");
  return (3.0 * N - 2.0) / (3.0 * (3.0 * N - 1.0));
}

std::vector<double> echo_chain_times(int k, double eta) {
  if (k < 1) throw std::invalid_argument("echo_chain_times: k must be >= 1");
  std::vector<double> out;
  for (int j = k; j >= 1; --j) out.push_back(eta / j);
  return out;
}

EchoPrediction predict_echo(double epsilon, int k, double eta, double psi_hat_l1,
                            std::optional<double> t0) {
  if (k < 1) throw std::invalid_argument("predict_echo: k must be >= 1");
  if (t0 && !(std::abs(eta - k * *t0) > 0.1))
    throw std::invalid_argument("predict_echo: need |eta - k t0| > 0.1");
  EchoPrediction e;
  e.time = eta / k;
  e.modes = {k - 1, k + 1};
  e.v_frequency = eta;
  e.amplitude = epsilon * epsilon * std::abs(eta) / (static_cast<double>(k) * k * k) * psi_hat_l1;
  e.chain_times = echo_chain_times(k, eta);
  return e;
}

EchoPeak find_echo_peak(const std::vector<double>& times, const std::vector<double>& rho_abs, int mode,
                        double lo, double hi) {
  if (times.size() != rho_abs.size()) throw std::invalid_argument("find_echo_peak: size mismatch");
  EchoPeak p;
  p.mode = mode;
  p.lo = lo;
  p.hi = hi;
  std::size_t first = times.size(), last = 0, best = times.size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < lo || times[i] > hi) continue;
    first = std::min(first, i);
    last = i;
    if (best == times.size() || rho_abs[i] > rho_abs[best]) best = i;
  }
  if (best == times.size()) return p;
  p.time = times[best];
  p.amplitude = 2.0 * rho_abs[best];
  p.interior = best != first && best != last;
  return p;
}

EchoMeasurement measure_echo(const EchoPrediction& prediction, const std::vector<double>& times,
                             const std::vector<std::vector<double>>& rho_abs, double window_frac) {
  EchoMeasurement m;
  m.prediction = prediction;
  const int K = static_cast<int>(rho_abs.size()) - 1;
  const double tp = prediction.time;
  for (int mode : {prediction.modes.first, prediction.modes.second}) {
    if (mode < 1 || mode > K) continue;
    m.primary.push_back(find_echo_peak(times, rho_abs[static_cast<std::size_t>(mode)], mode,
                                       tp * (1 - window_frac), tp * (1 + window_frac)));
  }
  const int k = prediction.modes.first + 1;
  const int lower = prediction.modes.first;
  if (k >= 2 && lower <= K) {
    const double ts = prediction.v_frequency / lower;
    m.secondary = find_echo_peak(times, rho_abs[static_cast<std::size_t>(lower)], lower,
                                 ts * (1 - window_frac), ts * (1 + window_frac));
  }
  double measured = m.secondary ? m.secondary->amplitude : 0.0;
  if (!m.secondary)
    for (const auto& p : m.primary) measured = std::max(measured, p.amplitude);
  m.ratio = prediction.amplitude > 0 ? measured / prediction.amplitude : 0.0;
  return m;
}

VolterraState volterra_solve(const Background& background, int K, const std::vector<double>& times,
                             double coupling) {
  return volterra_solve(background, background, K, times, coupling);
}

VolterraState volterra_solve(const Background& background, const Background& free_term, int K,
                             const std::vector<double>& times, double coupling) {
  if (K < 1) throw std::invalid_argument("volterra_solve: K must be >= 1");
  if (times.empty()) throw std::invalid_argument("volterra_solve: empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("volterra_solve: times must increase");

  const std::size_t M = times.size();
  const std::size_t width = static_cast<std::size_t>(2 * K + 1);
  VolterraState st{times, K, std::vector<std::vector<Complex>>(M, std::vector<Complex>(width))};
  const double s0 = times[0];

  auto checked = [](const Background& fn, double s, int k, double eta) {
    const Complex v = fn(s, k, eta);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "volterra_solve: background is not finite at s = " << s << ", k = " << k
          << ", eta = " << eta;
      throw NumericalError(msg.str());
    }
    return v;
  };
  auto bg = [&](double s, int k, double eta) { return checked(background, s, k, eta); };

  for (std::size_t i = 0; i < M; ++i) {
    const double t = times[i];
    parallel_for(width, [&](std::size_t col) {
      const int k = static_cast<int>(col) - K;
      Complex acc = checked(free_term, s0, k, k * t);
      if (k != 0 && i > 0) {
        Complex integral{};
        for (std::size_t j = 0; j < i; ++j) {  // node j = i has a zero kernel
          const double s = times[j];
          const double w = 0.5 * ((j > 0 ? times[j] - times[j - 1] : 0.0) + (times[j + 1] - times[j]));
          for (int l = -K; l <= K; ++l) {
            if (l == 0) continue;
            const Complex r = st.rho[j][static_cast<std::size_t>(l + K)];
            if (r == Complex{}) continue;
            integral += w * (k * (t - s) / l) * r * bg(s, k - l, k * t - l * s);
          }
        }
        acc += coupling * integral;
      }
      st.rho[i][col] = acc;
    });
  }
  return st;
}

void SnapshotBackground::add(const PhaseSpaceField& f) {
  PhaseSpaceField kv = f.frame == Frame::Gliding
                           ? transform(f, Rep::KV)
                           : glide(f, f.time, GlideDirection::ToGliding);
  if (times_.empty()) {
    grid_ = kv.grid;
  } else {
    if (!(kv.grid == grid_)) throw std::invalid_argument("SnapshotBackground: grid mismatch");
    if (!(kv.time > times_.back())) throw std::invalid_argument("SnapshotBackground: times must increase");
  }
  std::vector<Complex> rows;
  rows.reserve(static_cast<std::size_t>(2 * k_keep_ + 1) * grid_.nv());
  for (int k = -k_keep_; k <= k_keep_; ++k) {
    const long r = grid_.row_of_k(k);
    if (r < 0) {
      rows.insert(rows.end(), grid_.nv(), Complex{});
    } else {
      const auto row = kv.row(static_cast<std::size_t>(r));
      rows.insert(rows.end(), row.begin(), row.end());
    }
  }
  times_.push_back(kv.time);
  rows_.push_back(std::move(rows));
}

Complex SnapshotBackground::eval(std::size_t idx, int k, double eta) const {
  if (std::abs(k) > k_keep_) return {};
  const std::size_t off = static_cast<std::size_t>(k + k_keep_) * grid_.nv();
  return eval_eta(grid_, std::span<const Complex>(rows_[idx].data() + off, grid_.nv()), eta);
}

Complex SnapshotBackground::operator()(double s, int k, double eta) const {
  if (times_.empty()) throw std::logic_error("SnapshotBackground: no snapshots");
  const double tol = 1e-9 * std::max(1.0, std::abs(s));
  if (s < times_.front() - tol || s > times_.back() + tol) {
    std::ostringstream msg;
    msg << "SnapshotBackground: s = " << s << " outside [" << times_.front() << ", "
        << times_.back() << "]";
    throw std::out_of_range(msg.str());
  }
  auto it = std::lower_bound(times_.begin(), times_.end(), s - tol);
  const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi < times_.size() && std::abs(times_[hi] - s) <= tol) return eval(hi, k, eta);
  const std::size_t lo = hi - 1;
  const double w = (s - times_[lo]) / (times_[hi] - times_[lo]);
  return (1 - w) * eval(lo, k, eta) + w * eval(hi, k, eta);
}

Background SnapshotBackground::as_background() const {
  return [this](double s, int k, double eta) { return (*this)(s, k, eta); };
}

namespace {

// ||h||^2 via Parseval on KEta data, optionally weighted by eta^2 (d_v h).
double spectral_norm(const PhaseSpaceField& keta, bool v_derivative) {
  const auto& g = keta.grid;
  double acc = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t n = 0; n < g.nv(); ++n) {
      const double w = v_derivative ? g.eta(n) * g.eta(n) : 1.0;
      acc += w * std::norm(keta.at(i, n));
    }
  return std::sqrt(acc * g.d_eta());
}

PhaseSpaceField gliding_keta(const PhaseSpaceField& f) {
  if (f.frame == Frame::Gliding) return transform(f, Rep::KEta);
  return transform(glide(f, f.time, GlideDirection::ToGliding), Rep::KEta);
}

}  // namespace

SecondModelReport second_model_check(const PhaseSpaceField& g0, const PhaseSpaceField& g1,
                                     double epsilon, const VelocityProfile& psi) {
  const PhaseSpaceField a = gliding_keta(g0);
  PhaseSpaceField diff = gliding_keta(g1);
  for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= a.data[i];

  SecondModelReport r;
  const double base = spectral_norm(a, true);
  r.fitted = base > 0 ? std::sqrt(2.0) * spectral_norm(diff, false) / base : 0.0;

  // Simpson's rule on |psi^(t)| over [t0, t1].
  const double t0 = g0.time, t1 = g1.time;
  const int n = 2000;
  const double h = (t1 - t0) / n;
  double acc = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
    acc += w * std::abs(psi.hat(t0 + j * h));
  }
  r.predicted = epsilon * acc * h / 3.0;
  r.ratio = r.predicted > 0 ? r.fitted / r.predicted : 0.0;
  return r;
}

}  // namespace landau
