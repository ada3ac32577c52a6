#include "landau/weights.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "landau/util.hpp"

namespace landau {
namespace {

constexpr double kLogMax = 709.78;  // ln(DBL_MAX), slightly rounded down

// "p/q" for simple rationals, "%.6g" otherwise.
std::string pretty(double x) {
  for (int q = 1; q <= 240; ++q) {
    const double num = x * q;
    if (std::abs(num - std::round(num)) < 1e-9 * q) {
      const long n = std::lround(num);
      if (q == 1) return std::to_string(n);
      return std::to_string(n) + "/" + std::to_string(q);
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ConstraintRow row(std::string name, std::string text, bool ok) {
  return {std::move(name), std::move(text) + (ok ? ": OK" : ": FAIL"), ok};
}

bool leq(double a, double b) { return a <= b + 1e-12 * std::max(std::abs(a), std::abs(b)); }

struct LogTerm {
  double value;
  std::size_t index;
};

// Weighted log-sum over KEta data: log of d_eta * sum exp(coef * W) <>^{2 sigma} (|g|^2 + |dg|^2).
double weighted_sum(const PhaseSpaceField& g, const PhaseSpaceField* dg, double coef,
                    const GeneratorParams& p, const char* what) {
  const auto& grid = g.grid;
  const CutoffWeight W(p);
  std::vector<LogTerm> terms;
  terms.reserve(g.data.size());
  for (std::size_t i = 0; i < grid.nx(); ++i) {
    const double k = grid.k(i);
    for (std::size_t n = 0; n < grid.nv(); ++n) {
      const std::size_t idx = i * grid.nv() + n;
      double mag = std::norm(g.data[idx]);
      if (dg) mag += std::norm(dg->data[idx]);
      if (mag == 0.0) continue;
      const double b = bracket(k, grid.eta(n));
      terms.push_back({coef * W.of_bracket(b) + 2.0 * p.sigma * std::log(b) + std::log(mag), idx});
    }
  }
  if (terms.empty()) return 0.0;
  const auto top = std::max_element(terms.begin(), terms.end(),
                                    [](const LogTerm& a, const LogTerm& b) { return a.value < b.value; });
  double acc = 0.0;
  for (const auto& t : terms) acc += std::exp(t.value - top->value);
  const double log_total = top->value + std::log(acc) + std::log(grid.d_eta());
  if (!(log_total < kLogMax)) {
    const std::size_t i = top->index / grid.nv(), n = top->index % grid.nv();
    std::ostringstream msg;
    msg << what << ": weighted sum overflows (log value " << log_total << "), dominated by k = "
        << grid.k(i) << ", eta = " << grid.eta(n) << "; reduce z or the spectral support";
    throw WeightOverflow(msg.str(), grid.k(i), grid.eta(n));
  }
  return std::exp(log_total);
}

}  // namespace

std::vector<ConstraintRow> check_constraints(const GeneratorParams& p) {
  std::vector<ConstraintRow> rows;
  auto s = [](double x) { return pretty(x); };
  rows.push_back(row("epsilon_range", "epsilon = " + s(p.epsilon) + " in (0, 1/10]",
                     p.epsilon > 0 && leq(p.epsilon, 0.1)));
  rows.push_back(row("N_positive", "N = " + s(p.N) + " > 0", p.N > 0));
  rows.push_back(row("sigma_range", "sigma = " + s(p.sigma) + " > 3", p.sigma > 3));
  rows.push_back(row("alpha_range", "alpha = " + s(p.alpha) + " in (1/3, 1/2)",
                     p.alpha > 1.0 / 3.0 && p.alpha < 0.5));
  const double beta_cap = 1.0 / (3.0 * p.sigma);
  rows.push_back(row("beta_sigma", "beta = " + s(p.beta) + " ≤ 1/(3σ) = " + s(beta_cap),
                     p.beta >= 0 && leq(p.beta, beta_cap)));
  rows.push_back(row("beta_prime_sigma",
                     "beta' = " + s(p.beta_prime) + " ≤ γ/σ = " + s(p.gamma / p.sigma),
                     p.beta_prime >= 0 && leq(p.beta_prime, p.gamma / p.sigma)));
  rows.push_back(row("gamma_upper", "gamma = " + s(p.gamma) + " ≤ 1/3", leq(p.gamma, 1.0 / 3.0)));
  rows.push_back(row("gamma_lower",
                     "gamma = " + s(p.gamma) + " ≥ (1−α)/2 = " + s((1 - p.alpha) / 2),
                     leq((1 - p.alpha) / 2, p.gamma)));
  const double lhs = std::pow(p.epsilon, p.beta_prime - p.beta);
  const double rhs = std::pow(p.eta_star, 1.0 / 3.0 - p.gamma);
  rows.push_back(row("cutoff_identity",
                     "ε^(β'−β) = " + s(lhs) + " = η_*^(1/3−γ) = " + s(rhs),
                     std::abs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs)));
  rows.push_back(row("eta_star_T2", "eta_* = " + s(p.eta_star) + " ≥ T² = " + s(p.T * p.T),
                     leq(p.T * p.T, p.eta_star)));
  rows.push_back(row("alpha_transport", "alpha = " + s(p.alpha) + " > 1 − 2γ = " + s(1 - 2 * p.gamma),
                     p.alpha > 1 - 2 * p.gamma + 1e-12));
  rows.push_back(row("C_positive", "C = " + s(p.C) + " > 0", p.C > 0));
  return rows;
}

GeneratorParams derive_params(double epsilon, double N, double sigma, double alpha, double C,
                              ConstraintMode mode) {
  if (!(epsilon > 0 && epsilon < 1) || !(N > 0) || !(sigma > 0))
    throw ConstraintError("domain", "derive_params: need 0 < epsilon < 1, N > 0, sigma > 0");
  GeneratorParams p;
  p.epsilon = epsilon;
  p.N = N;
  p.sigma = sigma;
  p.alpha = alpha;
  p.C = C;
  p.T = std::pow(epsilon, -N);
  p.beta = 1.0 / (3.0 * sigma);
  p.beta_prime = 0.0;
  p.gamma = 1.0 / 3.0 - p.beta / (2.0 * N);
  p.eta_star = std::pow(epsilon, -2.0 * N);
  if (mode == ConstraintMode::Strict) {
    for (const auto& r : check_constraints(p))
      if (!r.ok) throw ConstraintError(r.name, "constraint " + r.name + " violated: " + r.text);
  }
  return p;
}

CutoffWeight::CutoffWeight(const GeneratorParams& p)
    : p_(p), low_coeff_(std::pow(p.epsilon, p.beta)), high_coeff_(std::pow(p.epsilon, p.beta_prime)) {}

double CutoffWeight::low_branch(double b) const { return low_coeff_ * std::cbrt(b); }
double CutoffWeight::high_branch(double b) const { return high_coeff_ * std::pow(b, p_.gamma); }
double CutoffWeight::of_bracket(double b) const { return std::min(low_branch(b), high_branch(b)); }

double cutoff_weight(const CutoffWeight& W, double k, double eta) { return W(k, eta); }

double z_of_t(double t, double T, double t_min) {
  if (t > T * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "z_of_t: t = " << t << " exceeds the horizon T = " << T;
    throw std::invalid_argument(msg.str());
  }
  return 2.0 * std::log(T) - std::log(std::max(t, t_min));
}

double energy_E1(const PhaseSpaceField& g, const PhaseSpaceField& dg, double z,
                 const GeneratorParams& p) {
  if (g.rep != Rep::KEta || dg.rep != Rep::KEta)
    throw std::invalid_argument("energy_E1: expects KEta data");
  if (!(g.grid == dg.grid)) throw std::invalid_argument("energy_E1: grid mismatch");
  return weighted_sum(g, &dg, 2.0 * p.C * z, p, "energy_E1");
}

double energy_E1(const PhaseSpaceField& g, double z, const GeneratorParams& p) {
  return energy_E1(transform(g, Rep::KEta), eta_derivative(g), z, p);
}

double energy_E2(const SpatialDensity& rho, double t, double z, const GeneratorParams& p) {
  if (t < 0) throw std::invalid_argument("energy_E2: t must be non-negative");
  const CutoffWeight W(p);
  const auto& g = rho.grid;
  double best = -std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (std::size_t i = 0; i < g.nx(); ++i) {
    const int k = g.k(i);
    const double mag = std::abs(rho.coeffs[i]);
    if (k == 0 || mag == 0.0) continue;
    const double b = bracket(k, k * t);
    const double lv = -p.alpha * std::log(std::abs(k)) + p.C * z * W.of_bracket(b) +
                      p.sigma * std::log(b) + std::log(mag);
    if (lv > best) {
      best = lv;
      best_k = k;
    }
  }
  if (best == -std::numeric_limits<double>::infinity()) return 0.0;
  if (!(best < kLogMax)) {
    std::ostringstream msg;
    msg << "energy_E2: weighted density overflows at k = " << best_k << ", eta = " << best_k * t;
    throw WeightOverflow(msg.str(), best_k, best_k * t);
  }
  return std::exp(best);
}

InitialCheck check_initial(const PhaseSpaceField& f0, const GeneratorParams& p) {
  const PhaseSpaceField fh = transform(f0, Rep::KEta);
  const PhaseSpaceField dfh = eta_derivative(f0);
  InitialCheck r;
  r.threshold = p.epsilon / 100.0;
  r.value = weighted_sum(fh, &dfh, p.C * std::log(p.T), p, "check_initial");
  r.pass = r.value <= r.threshold;
  return r;
}

namespace {

struct KernelCtx {
  const GeneratorParams& p;
  const CutoffWeight& W;
  double t, zt, t_min, w_kt, lb_kt;
  int k;
};

// log|C_{k,l}(t,s)| and its sign; -inf at s = t.
double log_abs_kernel(const KernelCtx& c, double s, int l) {
  const double kl = c.k - l;
  const double eta_kl = c.k * c.t - l * s;
  const double b1 = bracket(kl, eta_kl);
  const double b2 = bracket(l, l * s);
  const double zs = 2.0 * std::log(c.p.T) - std::log(std::max(s, c.t_min));
  const double la = c.p.C * (c.zt - zs) * c.w_kt;
  const double lb = c.p.C * zs * (c.w_kt - c.W.of_bracket(b1) - c.W.of_bracket(b2));
  const double lp = c.p.sigma * (c.lb_kt - std::log(b1) - std::log(b2));
  const double lq = c.p.alpha * (std::log(std::abs(l)) - std::log(std::abs(c.k)));
  const double r = std::abs(c.k * (c.t - s) / l);
  if (r == 0.0) return -std::numeric_limits<double>::infinity();
  return la + lb + lp + lq + std::log(r);
}

KernelCtx make_ctx(const GeneratorParams& p, const CutoffWeight& W, double t, int k, double t_min) {
  const double b = bracket(k, k * t);
  const double zt = 2.0 * std::log(p.T) - std::log(std::max(t, t_min));
  return {p, W, t, zt, t_min, W.of_bracket(b), std::log(b), k};
}

std::vector<double> breakpoints(double t, int k, int l, double t_min) {
  std::vector<double> pts{0.0, t, 0.5 * t};
  if (t_min > 0 && t_min < t) pts.push_back(t_min);
  for (int j = 1; j <= 12; ++j) pts.push_back(t * (1.0 - std::ldexp(1.0, -j)));
  for (int j = 2; j <= 8; ++j) pts.push_back(t * std::ldexp(1.0, -j));
  const double sr = static_cast<double>(k) * t / l;
  if (sr > 0 && sr < t) {
    pts.push_back(sr);
    const double w = bracket(k - l, 0.0) / (4.0 * std::abs(l));
    for (int j = 0; j <= 10; ++j) {
      const double d = w * std::ldexp(1.0, j);
      if (sr - d > 0) pts.push_back(sr - d);
      if (sr + d < t) pts.push_back(sr + d);
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts)
    if (out.empty() || x - out.back() > 1e-13 * t) out.push_back(x);
  return out;
}

double integrate_l(const KernelCtx& c, int l, int level) {
  using Quad = boost::math::quadrature::gauss<double, 10>;
  const double tail_t = std::pow(bracket(0, c.t), c.p.sigma - 1.0);
  auto integrand = [&](double s) {
    const double lk = log_abs_kernel(c, s, l);
    if (lk == -std::numeric_limits<double>::infinity()) return 0.0;
    return c.p.epsilon * std::exp(lk) * std::pow(bracket(0, s), 1.0 - c.p.sigma) * tail_t;
  };
  const auto pts = breakpoints(c.t, c.k, l, c.t_min);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double h = (pts[i + 1] - pts[i]) / level;
    for (int j = 0; j < level; ++j) {
      const double a = pts[i] + j * h;
      acc += Quad::integrate(integrand, a, a + h);
    }
  }
  return acc;
}

BoundResult bound_at_level(const GeneratorParams& p, const BoundOptions& opt, int level) {
  const CutoffWeight W(p);
  const std::size_t nt = opt.t_grid.size();
  std::vector<BoundCell> cells(static_cast<std::size_t>(opt.k_max) * nt);
  parallel_for(cells.size(), [&](std::size_t idx) {
    const int k = static_cast<int>(idx / nt) + 1;
    const double t = opt.t_grid[idx % nt];
    const KernelCtx c = make_ctx(p, W, t, k, opt.t_min);
    double sum = 0.0, best = -1.0;
    int best_l = 0;
    for (int l = -opt.l_max; l <= opt.l_max; ++l) {
      if (l == 0) continue;
      const double v = integrate_l(c, l, level);
      sum += v;
      if (v > best) {
        best = v;
        best_l = l;
      }
    }
    cells[idx] = {k, t, sum, best_l};
  });
  BoundResult r;
  r.cells = std::move(cells);
  for (const auto& cell : r.cells) {
    if (cell.partial > r.c_max) {
      r.c_max = cell.partial;
      r.k = cell.k;
      r.t = cell.t;
      r.l = cell.dominant_l;
    }
  }
  return r;
}

}  // namespace

double kernel_Ckl(double t, double s, int k, int l, const GeneratorParams& p, double t_min) {
  if (l == 0) throw std::invalid_argument("kernel_Ckl: l must be nonzero");
  if (k == 0) throw std::invalid_argument("kernel_Ckl: k must be nonzero");
  if (!(s >= 0 && s <= t && t <= p.T * (1 + 1e-12)))
    throw std::invalid_argument("kernel_Ckl: need 0 <= s <= t <= T");
  const CutoffWeight W(p);
  const KernelCtx c = make_ctx(p, W, t, k, t_min);
  const double lk = log_abs_kernel(c, s, l);
  if (lk == -std::numeric_limits<double>::infinity()) return 0.0;
  const double sign = (static_cast<double>(k) * (t - s) / l) < 0 ? -1.0 : 1.0;
  return sign * std::exp(lk);
}

BoundResult e2_bound_constant(const GeneratorParams& p, const BoundOptions& opt) {
  if (opt.k_max < 1 || opt.l_max < 1) throw std::invalid_argument("e2_bound_constant: empty mode range");
  if (opt.t_grid.empty()) throw std::invalid_argument("e2_bound_constant: empty t grid");
  for (double t : opt.t_grid)
    if (!(t > 0 && t <= p.T * (1 + 1e-12)))
      throw std::invalid_argument("e2_bound_constant: t grid must lie in (0, T]");
  BoundResult r = bound_at_level(p, opt, opt.level);
  r.c_max_refined = r.c_max;
  if (opt.refine) {
    const BoundResult fine = bound_at_level(p, opt, 2 * opt.level);
    r.c_max_refined = fine.c_max;
    r.refinement_change = fine.c_max > 0 ? std::abs(fine.c_max - r.c_max) / fine.c_max : 0.0;
    r.converged = r.refinement_change <= opt.refine_tol;
  }
  return r;
}

SweepResult minimal_C(GeneratorParams p, const BoundOptions& opt, int max_power) {
  SweepResult out;
  BoundOptions coarse = opt;
  coarse.refine = false;
  double previous = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= max_power; ++j) {
    p.C = std::ldexp(1.0, j);
    const BoundResult r = e2_bound_constant(p, coarse);
    out.table.push_back({p.C, r.c_max});
    if (r.c_max > previous * (1 + 1e-9)) out.monotonicity_violations.push_back(p.C);
    previous = r.c_max;
    if (r.c_max <= 0.5) {
      BoundResult full = opt.refine ? e2_bound_constant(p, opt) : r;
      if (std::max(full.c_max, full.c_max_refined) <= 0.5) {
        out.C = p.C;
        out.at_C = std::move(full);
        break;
      }
    }
  }
  return out;
}

void write_bound_csv(const std::filesystem::path& path, const BoundResult& result) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "k,t,partial,dominant_l\n";
  for (const auto& c : result.cells)
    out << c.k << ',' << format_double(c.t) << ',' << format_double(c.partial) << ','
        << c.dominant_l << '\n';
}

double exp_bound_ratio(const CutoffWeight& W, double C1, double k, double eta,
                       ExpBoundVariant variant) {
  const auto& p = W.params();
  const double b = bracket(k, eta);
  const bool low = W.low_branch(b) <= W.high_branch(b);
  const double q = low ? 1.0 / 3.0 : p.gamma;
  const double y = C1 * W.of_bracket(b);
  const double power = variant == ExpBoundVariant::C13 ? 1.0 / q : p.sigma / q;
  return std::exp(power * std::log(y) - y);
}

namespace {

struct Sampler {
  std::mt19937_64 rng;
  double log_top;
  std::uniform_real_distribution<double> unit{0.0, 1.0};
  Sampler(std::uint64_t seed, double eta_star) : rng(seed), log_top(std::log(4.0 * eta_star)) {}
  std::pair<double, double> next() {
    const double r = std::expm1(unit(rng) * log_top);
    const double th = 2.0 * std::numbers::pi * unit(rng);
    return {std::round(r * std::cos(th)), r * std::sin(th)};
  }
};

}  // namespace

ExpBoundResult exp_bound_check(const CutoffWeight& W, double C1, std::size_t samples,
                               ExpBoundVariant variant, std::uint64_t seed) {
  if (!(C1 > 0)) throw std::invalid_argument("exp_bound_check: C1 must be positive");
  Sampler sm(seed, W.params().eta_star);
  ExpBoundResult r;
  r.samples = samples;
  auto consider = [&](double k, double eta) {
    const double v = exp_bound_ratio(W, C1, k, eta, variant);
    if (v > r.worst_ratio) {
      r.worst_ratio = v;
      r.k = k;
      r.eta = eta;
    }
  };
  consider(0.0, 0.0);
  for (std::size_t i = 1; i < samples; ++i) {
    const auto [k, eta] = sm.next();
    consider(k, eta);
  }
  return r;
}

SubadditivityResult subadditivity_check(const CutoffWeight& W, std::size_t samples,
                                        std::uint64_t seed) {
  Sampler sm(seed, W.params().eta_star);
  SubadditivityResult r;
  r.samples = samples;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  const double cut = W.params().eta_star;
  for (std::size_t i = 0; i < samples; ++i) {
    const auto [k1, e1] = sm.next();
    const auto [k2, e2] = sm.next();
    const double a = W(k1, e1), b = W(k2, e2), ab = W(k1 + k2, e1 + e2);
    const double excess = ab - a - b;
    if (excess > 1e-14 * (a + b)) ++r.violations;
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.k1 = k1;
      r.eta1 = e1;
      r.k2 = k2;
      r.eta2 = e2;
    }
    const double top = std::max({bracket(k1, e1), bracket(k2, e2), bracket(k1 + k2, e1 + e2)});
    (top > cut ? r.above_cutoff : r.below_cutoff) += 1;
  }
  return r;
}

CrossoverResult branch_crossover(const CutoffWeight& W, std::size_t samples, std::uint64_t seed) {
  const double es = W.params().eta_star;
  CrossoverResult r;
  r.gap_at_eta_star = std::abs(W.low_branch(es) - W.high_branch(es)) / W.low_branch(es);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, std::log(4.0 * es));
  for (std::size_t i = 0; i < samples; ++i) {
    const double b = std::exp(u(rng));
    const double expect = b <= es ? W.low_branch(b) : W.high_branch(b);
    r.worst_branch_mismatch =
        std::max(r.worst_branch_mismatch, std::abs(W.of_bracket(b) - expect) / expect);
  }
  return r;
}

double e1_threshold(const GeneratorParams& p) { return 16.0 * p.epsilon * p.epsilon; }

double e2_threshold(const GeneratorParams& p, double t) {
  return 4.0 * p.epsilon * std::pow(1.0 + t, 1.0 - p.sigma);
}

std::optional<BootstrapViolation> bootstrap_monitor(const std::vector<EnergyReport>& reports,
                                                    const GeneratorParams& p) {
  double last = -std::numeric_limits<double>::infinity();
  for (const auto& r : reports) {
    if (r.time < last) throw std::invalid_argument("bootstrap_monitor: reports out of time order");
    last = r.time;
    if (!(r.E1 <= e1_threshold(p))) return BootstrapViolation{r.time, "E1", r.E1, e1_threshold(p)};
    const double th = e2_threshold(p, r.time);
    if (!(r.E2 <= th)) return BootstrapViolation{r.time, "E2", r.E2, th};
  }
  return std::nullopt;
}

EnergyMonitor::EnergyMonitor(GeneratorParams p, double t_min, int k_report)
    : p_(p), t_min_(t_min), k_report_(k_report) {}

void EnergyMonitor::operator()(const Diagnostic& d) {
  EnergyReport r;
  r.time = d.time;
  r.z = z_of_t(d.time, p_.T, t_min_);
  r.E1 = energy_E1(d.gliding, r.z, p_);
  r.E2 = energy_E2(d.density, d.time, r.z, p_);
  const int top = std::min(k_report_, static_cast<int>(d.density.grid.nx() / 2) - 1);
  for (int k = 0; k <= top; ++k) r.mode_amplitudes.push_back(std::abs(d.density.at_k(k)));
  r.e1_ok = r.E1 <= e1_threshold(p_);
  r.e2_ok = r.E2 <= e2_threshold(p_, d.time);
  r.validity_breached = d.validity_breached;
  reports_.push_back(std::move(r));
}

Monitor EnergyMonitor::as_monitor() {
  return [this](const Diagnostic& d) { (*this)(d); };
}

}  // namespace landau
