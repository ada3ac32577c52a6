#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landau/dynamics.hpp"
#include "landau/spectral.hpp"

namespace landau {

/// One row of the parameter constraint table.
struct ConstraintRow {
  std::string name;  ///< stable identifier, e.g. "alpha_transport"
  std::string text;  ///< human-readable inequality with values
  bool ok = true;
};

class ConstraintError : public std::invalid_argument {
public:
  ConstraintError(std::string constraint, const std::string& what)
      : std::invalid_argument(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

private:
  std::string constraint_;
};

struct GeneratorParams {
  double epsilon = 0.1;
  double N = 1.0;
  double T = 10.0;
  double sigma = 4.0;
  double alpha = 0.45;
  double beta = 1.0 / 12.0;
  double beta_prime = 0.0;
  double gamma = 7.0 / 24.0;
  double eta_star = 100.0;
  double C = 1.0;
};

/// Evaluate every constraint on the tuple.
std::vector<ConstraintRow> check_constraints(const GeneratorParams& p);

enum class ConstraintMode { Strict, Report };

/// beta = 1/(3 sigma), beta' = 0, gamma = 1/3 - beta/(2N), eta_* = eps^{-2N},
/// T = eps^{-N}. Strict mode throws ConstraintError on the first failing row;
/// Report mode returns the tuple regardless (inspect check_constraints()).
GeneratorParams derive_params(double epsilon, double N, double sigma, double alpha, double C = 1.0,
                              ConstraintMode mode = ConstraintMode::Strict);

/// <k, eta> = sqrt(1 + k^2 + eta^2).
inline double bracket(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }

/// W(k, eta) = min(eps^beta <k,eta>^{1/3}, eps^beta' <k,eta>^gamma).
class CutoffWeight {
public:
  explicit CutoffWeight(const GeneratorParams& p);
  double operator()(double k, double eta) const { return of_bracket(bracket(k, eta)); }
  double of_bracket(double b) const;
  double low_branch(double b) const;
  double high_branch(double b) const;
  const GeneratorParams& params() const { return p_; }

private:
  GeneratorParams p_;
  double low_coeff_, high_coeff_;
};

double cutoff_weight(const CutoffWeight& W, double k, double eta);

/// z(t) = 2 ln T - ln max(t, t_min). Throws for t > T.
double z_of_t(double t, double T, double t_min);

/// Raised when a weighted sum leaves the double range; names the dominant mode.
class WeightOverflow : public NumericalError {
public:
  WeightOverflow(const std::string& what, int k, double eta)
      : NumericalError(what), k_(k), eta_(eta) {}
  int k() const { return k_; }
  double eta() const { return eta_; }

private:
  int k_;
  double eta_;
};

/// sum_k d_eta sum_eta exp(2 C z W) <k,eta>^{2 sigma} (|g|^2 + |dg|^2), both in KEta.
double energy_E1(const PhaseSpaceField& g, const PhaseSpaceField& dg, double z,
                 const GeneratorParams& p);
/// Convenience: E1 of a field in any representation (derivative computed here).
double energy_E1(const PhaseSpaceField& g, double z, const GeneratorParams& p);

/// max_{k != 0} |k|^{-alpha} exp(C z W(k, k t)) <k, k t>^sigma |rho(k)|.
double energy_E2(const SpatialDensity& rho, double t, double z, const GeneratorParams& p);

struct InitialCheck {
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

/// sum_k d_eta sum_eta <k,eta>^{2 sigma} exp(C ln T W) (|f|^2 + |d_eta f|^2) <= eps/100.
InitialCheck check_initial(const PhaseSpaceField& f0, const GeneratorParams& p);

/// eps C_{k,l}(t, s) with eps factored out. Throws for l = 0 or s outside [0, t].
double kernel_Ckl(double t, double s, int k, int l, const GeneratorParams& p, double t_min);

struct BoundOptions {
  int k_max = 64;
  int l_max = 64;
  std::vector<double> t_grid;
  double t_min = 0.01;
  int level = 2;          ///< panels per breakpoint interval
  bool refine = true;     ///< repeat at 2*level and compare
  double refine_tol = 0.01;
};

struct BoundCell {
  int k;
  double t;
  double partial;  ///< sum_l integral at (k, t)
  int dominant_l;
};

struct BoundResult {
  double c_max = 0.0;
  int k = 0;
  double t = 0.0;
  int l = 0;
  double c_max_refined = 0.0;
  double refinement_change = 0.0;  ///< |refined - coarse| / refined
  bool converged = true;
  std::vector<BoundCell> cells;
};

/// sup_{k, t} sum_{0 < |l| <= l_max} int_0^t eps |C_{k,l}(t,s)| <s>^{1-sigma} <t>^{sigma-1} ds.
BoundResult e2_bound_constant(const GeneratorParams& p, const BoundOptions& opt);

struct SweepEntry {
  double C;
  double c_max;
};

struct SweepResult {
  std::optional<double> C;  ///< smallest power of two with c_max <= 1/2
  BoundResult at_C;
  std::vector<SweepEntry> table;
  std::vector<double> monotonicity_violations;  ///< C values where doubling raised c_max
};

/// Sweep C = 2^j, j = 0..max_power, stopping at the first C with c_max <= 1/2.
SweepResult minimal_C(GeneratorParams p, const BoundOptions& opt, int max_power = 12);

void write_bound_csv(const std::filesystem::path& path, const BoundResult& result);

enum class ExpBoundVariant {
  C13,  ///< exp(-C1 W) <= (C1 a)^{-1/q} <k,eta>^{-1}
  Cb,   ///< exp(-C1 W) <= (C1 a)^{-sigma/q} <k,eta>^{-sigma}
};

struct ExpBoundResult {
  double worst_ratio = 0.0;
  double k = 0.0;
  double eta = 0.0;
  std::size_t samples = 0;
};

/// LHS/RHS of the exponential-versus-polynomial bound, where W = a <k,eta>^q
/// on the active branch. Samples (k, eta) log-uniformly over both sides of eta_*.
ExpBoundResult exp_bound_check(const CutoffWeight& W, double C1, std::size_t samples,
                               ExpBoundVariant variant, std::uint64_t seed = 1);
double exp_bound_ratio(const CutoffWeight& W, double C1, double k, double eta,
                       ExpBoundVariant variant);

struct SubadditivityResult {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_excess = 0.0;  ///< max of W(a+b) - W(a) - W(b)
  double k1 = 0, eta1 = 0, k2 = 0, eta2 = 0;
  std::size_t below_cutoff = 0, above_cutoff = 0;
};

SubadditivityResult subadditivity_check(const CutoffWeight& W, std::size_t samples,
                                        std::uint64_t seed = 1);

/// Largest relative gap between the min form and the branch that should be
/// active (low below eta_*, high above), plus the gap of the branches at eta_*.
struct CrossoverResult {
  double gap_at_eta_star = 0.0;
  double worst_branch_mismatch = 0.0;
};
CrossoverResult branch_crossover(const CutoffWeight& W, std::size_t samples, std::uint64_t seed = 1);

struct EnergyReport {
  double time = 0.0;
  double z = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  std::vector<double> mode_amplitudes;  ///< |rho(k)| for k = 0..K
  bool e1_ok = true;
  bool e2_ok = true;
  bool validity_breached = false;
};

double e1_threshold(const GeneratorParams& p);
double e2_threshold(const GeneratorParams& p, double t);

struct BootstrapViolation {
  double time;
  std::string which;  ///< "E1" or "E2"
  double value;
  double threshold;
};

/// First report (in time order) breaking E1 <= 16 eps^2 or E2 <= 4 eps (1+t)^{1-sigma}.
std::optional<BootstrapViolation> bootstrap_monitor(const std::vector<EnergyReport>& reports,
                                                    const GeneratorParams& p);

/// Folds diagnostics from dynamics::run into EnergyReport rows.
class EnergyMonitor {
public:
  EnergyMonitor(GeneratorParams p, double t_min, int k_report);
  void operator()(const Diagnostic& d);
  Monitor as_monitor();
  const std::vector<EnergyReport>& reports() const { return reports_; }

private:
  GeneratorParams p_;
  double t_min_;
  int k_report_;
  std::vector<EnergyReport> reports_;
};

}  // namespace landau
