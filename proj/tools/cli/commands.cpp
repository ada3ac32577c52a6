#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <fftw3.h>
#include <json.hpp>

#include "config.hpp"
#include "landau/dynamics.hpp"
#include "landau/echo.hpp"
#include "landau/spectral.hpp"
#include "landau/util.hpp"
#include "landau/weights.hpp"

namespace landau::cli {
namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

json versions() {
  return {{"landau_lab", kVersion},
          {"fftw", std::string(fftw_version)},
          {"compiler", __VERSION__},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

// NaN and infinity are not JSON; emit null instead.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json bound_json(const BoundResult& b) {
  return {{"c_max", num(b.c_max)},
          {"witness", {{"k", b.k}, {"t", num(b.t)}, {"l", b.l}}},
          {"c_max_refined", num(b.c_max_refined)},
          {"refinement_change", num(b.refinement_change)},
          {"converged", b.converged}};
}

json sweep_json(const SweepResult& s) {
  json table = json::array();
  for (const auto& e : s.table) table.push_back({{"C", e.C}, {"c_max", num(e.c_max)}});
  return {{"C", s.C ? json(*s.C) : json(nullptr)},
          {"table", table},
          {"monotonicity_violations", s.monotonicity_violations}};
}

json prediction_json(const EchoPrediction& e) {
  return {{"time", e.time},
          {"modes", {e.modes.first, e.modes.second}},
          {"v_frequency", e.v_frequency},
          {"amplitude", e.amplitude},
          {"chain_times", e.chain_times}};
}

json peak_json(const EchoPeak& p) {
  return {{"mode", p.mode},         {"window", {p.lo, p.hi}},     {"time", p.time},
          {"amplitude", p.amplitude}, {"local_maximum", p.interior}};
}

/// Resolve C: fixed from the config, or the smallest passing power of two.
/// Returns false when the sweep finds none.
bool resolve_C(const RunConfig& cfg, GeneratorParams& p, json& c_info, std::ostream& err) {
  if (cfg.params.C) {
    p.C = *cfg.params.C;
    c_info = {{"mode", "fixed"}, {"value", p.C}};
    return true;
  }
  const SweepResult s = minimal_C(p, bound_options(cfg.bound, p.T), cfg.bound.max_power);
  c_info = {{"mode", "auto"}, {"sweep", sweep_json(s)}};
  if (!s.C) {
    err << "no C up to 2^" << cfg.bound.max_power << " brings the bound constant to 1/2\n";
    return false;
  }
  p.C = *s.C;
  c_info["value"] = p.C;
  c_info["bound"] = bound_json(s.at_C);
  return true;
}

struct Prepared {
  RunConfig cfg;
  PhaseSpaceField f0;
  GeneratorParams params;
  json c_info;
  ValidityWindow window;
  double t_valid = 0.0;
  double t_min = 0.0;
};

/// Loads and validates a run. Returns an exit code other than kOk on refusal.
int prepare(const RunArgs& a, double t_end_override, Prepared& out, std::ostream& err,
            bool need_C = true, bool bootstrap = true) {
  out.cfg = load_config(a.config);
  auto& cfg = out.cfg;
  if (a.force_off) cfg.force_off = true;
  if (t_end_override > 0) cfg.t_end = t_end_override;
  if (cfg.output.K_report >= static_cast<int>(cfg.Nx / 2))
    throw ConfigError("output.K_report must be below Nx/2");
  out.f0 = make_initial(cfg);
  out.params = config_params(cfg);
  out.t_min = cfg.params.t_min.value_or(cfg.dt);
  if (bootstrap && cfg.bootstrap && cfg.t_end > out.params.T * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "t_end = " << cfg.t_end << " exceeds T = eps^-N = " << out.params.T
        << " while bootstrap monitoring is enabled";
    throw ConfigError(msg.str());
  }
  out.window = measure_support(out.f0);
  out.t_valid = valid_until(cfg.grid(), out.window, cfg.t0);
  if (out.t_valid < cfg.t_end && !a.override_validity) {
    std::ostringstream msg;
    msg << "grid validity window ends at t = " << out.t_valid << ", before t_end = " << cfg.t_end
        << " (content up to |k| = " << out.window.k_max << ", |eta| = " << out.window.eta_support
        << "); enlarge Nv or L, or pass --override-validity";
    throw ConfigError(msg.str());
  }
  if (need_C && !resolve_C(cfg, out.params, out.c_info, err)) return kVerificationFailure;
  return kOk;
}

SimConfig sim_config(const Prepared& p) {
  SimConfig s;
  s.grid = p.cfg.grid();
  s.dt = p.cfg.dt;
  s.t0 = p.cfg.t0;
  s.t_end = p.cfg.t_end;
  s.epsilon = p.cfg.epsilon;
  s.diag_every = p.cfg.diag_every;
  s.force_off = p.cfg.force_off;
  s.window = p.window;
  s.checkpoint_times = p.cfg.output.checkpoint_times;
  s.checkpoint_dir = p.cfg.output.dir / "snapshots";
  s.config_hash = p.cfg.hash;
  return s;
}

struct Recorded {
  std::vector<double> times;
  std::vector<std::vector<double>> amps;  ///< [k][sample]
  std::vector<EnergyReport> reports;
};

/// Full simulate pipeline; shared by simulate and echo.
int simulate(const RunArgs& a, std::ostream& out, std::ostream& err, json* echo_out) {
  Prepared prep;
  if (int code = prepare(a, 0.0, prep, err); code != kOk) return code;
  const RunConfig& cfg = prep.cfg;
  GeneratorParams& p = prep.params;
  std::filesystem::create_directories(cfg.output.dir);

  const int K = cfg.output.K_report;
  const bool energies = cfg.bootstrap;
  const double z0 = cfg.t0 <= p.T ? z_of_t(cfg.t0, p.T, prep.t_min) : std::nan("");

  std::ofstream csv(cfg.output.dir / "run.csv");
  if (!csv) throw std::runtime_error("cannot write run.csv");
  csv << "# config_hash " << cfg.hash << '\n';
  csv << "t,step,z,E1,E1_z0,E2,e1_ok,e2_ok,validity_breached";
  for (int k = 0; k <= K; ++k) csv << ",rho_abs_" << k;
  csv << '\n';

  Recorded rec;
  rec.amps.resize(static_cast<std::size_t>(K) + 1);
  Monitor monitor = [&](const Diagnostic& d) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double z = nan, e1 = nan, e1z0 = nan, e2 = nan;
    std::string ok1, ok2;
    if (energies && d.time <= p.T * (1 + 1e-12)) {
      EnergyReport r;
      r.time = d.time;
      r.z = z = z_of_t(std::min(d.time, p.T), p.T, prep.t_min);
      r.E1 = e1 = energy_E1(d.gliding, z, p);
      r.E2 = e2 = energy_E2(d.density, d.time, z, p);
      if (std::isfinite(z0)) e1z0 = energy_E1(d.gliding, z0, p);
      r.e1_ok = e1 <= e1_threshold(p);
      r.e2_ok = e2 <= e2_threshold(p, d.time);
      r.validity_breached = d.validity_breached;
      ok1 = r.e1_ok ? "1" : "0";
      ok2 = r.e2_ok ? "1" : "0";
      rec.reports.push_back(std::move(r));
    }
    rec.times.push_back(d.time);
    csv << format_double(d.time) << ',' << d.step << ',' << format_double(z) << ',' << format_double(e1) << ','
        << format_double(e1z0) << ',' << format_double(e2) << ',' << ok1 << ',' << ok2 << ','
        << (d.validity_breached ? 1 : 0);
    for (int k = 0; k <= K; ++k) {
      const double v = std::abs(d.density.at_k(k));
      rec.amps[static_cast<std::size_t>(k)].push_back(v);
      csv << ',' << format_double(v);
    }
    csv << '\n' << std::flush;
  };

  json meta = {{"config", cfg.raw},
               {"config_hash", cfg.hash},
               {"params", to_json(p)},
               {"constraints", to_json(check_constraints(p))},
               {"C", prep.c_info},
               {"t_min", prep.t_min},
               {"force_off", cfg.force_off},
               {"validity",
                {{"k_max", prep.window.k_max},
                 {"eta_support", prep.window.eta_support},
                 {"t_valid", num(prep.t_valid)},
                 {"t_end", cfg.t_end},
                 {"override", a.override_validity}}},
               {"threads", thread_count()},
               {"versions", versions()}};

  RunResult result;
  std::string abort_message;
  try {
    result = run(sim_config(prep), prep.f0, {monitor});
    if (result.aborted) abort_message = result.abort_message;
  } catch (const NumericalError& e) {
    abort_message = e.what();
  }
  csv.close();

  meta["validity"]["breached"] = result.validity_breached;
  json ckpts = json::array();
  for (const auto& c : result.checkpoints) ckpts.push_back(c.filename().string());
  meta["checkpoints"] = ckpts;
  if (energies) {
    const auto v = bootstrap_monitor(rec.reports, p);
    meta["bootstrap"] = {{"enabled", true}, {"clean", !v}};
    if (v)
      meta["bootstrap"]["violation"] = {
          {"time", v->time}, {"which", v->which}, {"value", num(v->value)}, {"threshold", v->threshold}};
  } else {
    meta["bootstrap"] = {{"enabled", false}};
  }
  meta["status"] = abort_message.empty() ? "ok" : "aborted";
  if (!abort_message.empty()) meta["abort_message"] = abort_message;

  if (cfg.initial.type == "two_wave" && cfg.initial.k >= 1) {
    const VelocityProfile psi = make_profile(cfg);
    const auto pred = predict_echo(cfg.epsilon, cfg.initial.k, cfg.initial.eta, psi.l1_norm, cfg.t0);
    const auto m = measure_echo(pred, rec.times, rec.amps);
    json measured = {{"primary", json::array()}};
    for (const auto& pk : m.primary) measured["primary"].push_back(peak_json(pk));
    measured["secondary"] = m.secondary ? peak_json(*m.secondary) : json(nullptr);
    json e = {{"config_hash", cfg.hash},
              {"prediction", prediction_json(pred)},
              {"measured", measured},
              {"ratio", num(m.ratio)}};
    write_json(cfg.output.dir / "echo.json", e);
    if (echo_out) *echo_out = e;
  }
  write_json(cfg.output.dir / "meta.json", meta);

  if (!abort_message.empty()) {
    err << "numerical abort: " << abort_message << '\n';
    return kNumericalAbort;
  }
  out << "wrote " << (cfg.output.dir / "run.csv").string() << " (" << rec.times.size()
      << " rows, t_valid = " << format_double(prep.t_valid) << ")\n";
  return kOk;
}

}  // namespace

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ConstraintError& e) {
    err << "constraint failed: " << e.constraint() << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternal;
  }
}

int cmd_params(const ParamsArgs& a, std::ostream& out, std::ostream& err) {
  const GeneratorParams p = derive_params(a.epsilon, a.N, a.sigma, a.alpha, a.C, ConstraintMode::Report);
  const auto rows = check_constraints(p);
  if (a.json) {
    out << json{{"params", to_json(p)}, {"constraints", to_json(rows)}}.dump(2) << '\n';
  } else {
    const json pj = to_json(p);
    for (const auto& [k, v] : pj.items()) out << std::setw(11) << std::left << k << ' ' << v << '\n';
    out << '\n';
    for (const auto& r : rows) out << r.text << '\n';
  }
  int code = kOk;
  for (const auto& r : rows)
    if (!r.ok) {
      err << "constraint failed: " << r.name << ": " << r.text << '\n';
      code = kConfigError;
    }
  return code;
}

int cmd_simulate(const RunArgs& a, std::ostream& out, std::ostream& err) {
  return simulate(a, out, err, nullptr);
}

int cmd_echo(const EchoArgs& a, std::ostream& out, std::ostream& err) {
  if (a.predict_only) {
    const RunConfig cfg = load_config(a.run.config);
    if (cfg.initial.type != "two_wave") throw ConfigError("echo needs two_wave initial data");
    const VelocityProfile psi = make_profile(cfg);
    const auto pred = predict_echo(cfg.epsilon, cfg.initial.k, cfg.initial.eta, psi.l1_norm, cfg.t0);
    out << json{{"config_hash", cfg.hash}, {"prediction", prediction_json(pred)}}.dump(2) << '\n';
    return kOk;
  }
  if (load_config(a.run.config).initial.type != "two_wave")
    throw ConfigError("echo needs two_wave initial data");
  json e;
  std::ostringstream quiet;
  const int code = simulate(a.run, quiet, err, &e);
  if (!e.is_null()) out << e.dump(2) << '\n';
  return code;
}

int cmd_check_initial(const RunArgs& a, std::ostream& out, std::ostream& err) {
  Prepared prep;
  RunArgs relaxed = a;
  relaxed.override_validity = true;  // only the data matter here
  if (int code = prepare(relaxed, 0.0, prep, err, true, false); code != kOk) return code;
  const InitialCheck c = check_initial(prep.f0, prep.params);
  out << json{{"config_hash", prep.cfg.hash},
              {"pass", c.pass},
              {"value", num(c.value)},
              {"threshold", c.threshold},
              {"C", prep.params.C}}
             .dump(2)
      << '\n';
  if (!c.pass) {
    err << "initial data fail the smallness check: " << format_double(c.value) << " > "
        << format_double(c.threshold) << '\n';
    return kVerificationFailure;
  }
  return kOk;
}

int cmd_volterra(const RunArgs& a, std::ostream& out, std::ostream& err) {
  Prepared prep;
  RunConfig peek = load_config(a.config);
  const double t_end = peek.volterra.t_end.value_or(peek.t_end);
  if (int code = prepare(a, t_end, prep, err, false, false); code != kOk) return code;
  const RunConfig& cfg = prep.cfg;
  const auto& vs = cfg.volterra;
  if (vs.K < 1) throw ConfigError("volterra.K must be at least 1");
  if (!(vs.dt > 0)) throw ConfigError("volterra.dt must be positive");

  std::vector<double> times;
  const long n = std::max(1L, static_cast<long>(std::ceil((t_end - cfg.t0) / vs.dt - 1e-9)));
  for (long i = 0; i <= n; ++i) times.push_back(i == n ? t_end : cfg.t0 + static_cast<double>(i) * vs.dt);

  const int keep = std::min(2 * vs.K, static_cast<int>(cfg.Nx / 2) - 1);
  SnapshotBackground initial(keep);
  initial.add(prep.f0);
  const double t0 = cfg.t0;
  const Background free_term = [&](double, int k, double eta) { return initial(t0, k, eta); };

  SnapshotBackground simulated(keep);
  Background background;
  if (vs.background == "zero") {
    background = [](double, int, double) { return Complex{}; };
  } else if (vs.background == "initial") {
    background = free_term;
  } else {
    const double ratio = vs.snapshot_every / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
      throw ConfigError("volterra.snapshot_every must be a positive multiple of time.dt");
    SimConfig sc = sim_config(prep);
    sc.diag_every = static_cast<int>(std::round(ratio));
    sc.checkpoint_times.clear();
    const RunResult r =
        run(sc, prep.f0, {[&](const Diagnostic& d) { simulated.add(d.gliding); }});
    if (r.aborted) {
      err << "numerical abort: " << r.abort_message << '\n';
      return kNumericalAbort;
    }
    background = simulated.as_background();
  }

  const VolterraState st = volterra_solve(background, free_term, vs.K, times);

  std::filesystem::create_directories(cfg.output.dir);
  std::ofstream csv(cfg.output.dir / "volterra.csv");
  if (!csv) throw std::runtime_error("cannot write volterra.csv");
  csv << "# config_hash " << cfg.hash << '\n' << "t";
  for (int k = 0; k <= vs.K; ++k) csv << ",re_" << k << ",im_" << k << ",abs_" << k;
  csv << '\n';
  std::vector<double> peak(static_cast<std::size_t>(vs.K) + 1, 0.0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    csv << format_double(times[i]);
    for (int k = 0; k <= vs.K; ++k) {
      const Complex r = st.at(i, k);
      csv << ',' << format_double(r.real()) << ',' << format_double(r.imag()) << ','
          << format_double(std::abs(r));
      peak[static_cast<std::size_t>(k)] = std::max(peak[static_cast<std::size_t>(k)], std::abs(r));
    }
    csv << '\n';
  }
  out << json{{"config_hash", cfg.hash},
              {"background", vs.background},
              {"K", vs.K},
              {"points", times.size()},
              {"peak_abs", peak},
              {"output", (cfg.output.dir / "volterra.csv").string()}}
             .dump(2)
      << '\n';
  return kOk;
}

int cmd_verify_weights(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  GeneratorParams p = derive_params(a.epsilon, a.N, a.sigma, a.alpha, a.C.value_or(1.0),
                                    ConstraintMode::Report);
  const auto rows = check_constraints(p);
  for (const auto& r : rows)
    if (!r.ok) err << "note: constraint not met (report mode): " << r.name << ": " << r.text << '\n';

  BoundSpec bs;
  bs.k_max = a.k_max;
  bs.l_max = a.l_max.value_or(a.k_max);
  bs.t_samples = a.t_samples;
  bs.t_min = a.t_min;
  bs.level = a.level;
  BoundOptions opt = bound_options(bs, p.T);
  opt.refine = a.refine;

  json report = {{"params", to_json(p)}, {"constraints", to_json(rows)}, {"threads", thread_count()}};
  BoundResult bound;
  if (a.C) {
    bound = e2_bound_constant(p, opt);
    report["C"] = {{"mode", "fixed"}, {"value", p.C}};
  } else {
    const SweepResult s = minimal_C(p, opt, a.max_power);
    report["C"] = {{"mode", "auto"}, {"sweep", sweep_json(s)}};
    if (s.C) {
      p.C = *s.C;
      report["C"]["value"] = p.C;
      bound = s.at_C;
    } else {
      bound = e2_bound_constant([&] {
        GeneratorParams q = p;
        q.C = std::ldexp(1.0, a.max_power);
        return q;
      }(), opt);
    }
  }
  report["bound"] = bound_json(bound);
  if (!a.csv.empty()) write_bound_csv(a.csv, bound);

  const CutoffWeight W(p);
  const auto sub = subadditivity_check(W, static_cast<std::size_t>(a.subadditivity_samples), a.seed);
  const auto cross = branch_crossover(W, 10000, a.seed);
  const auto e13 = exp_bound_check(W, a.C1, static_cast<std::size_t>(a.exp_samples), ExpBoundVariant::C13, a.seed);
  const auto eb = exp_bound_check(W, a.C1, static_cast<std::size_t>(a.exp_samples), ExpBoundVariant::Cb, a.seed);
  report["subadditivity"] = {{"samples", sub.samples},
                             {"violations", sub.violations},
                             {"worst_excess", sub.worst_excess},
                             {"witness", {sub.k1, sub.eta1, sub.k2, sub.eta2}},
                             {"below_cutoff", sub.below_cutoff},
                             {"above_cutoff", sub.above_cutoff}};
  report["crossover"] = {{"gap_at_eta_star", cross.gap_at_eta_star},
                         {"worst_branch_mismatch", cross.worst_branch_mismatch}};
  auto exp_json = [](const ExpBoundResult& r) {
    return json{{"worst_ratio", r.worst_ratio}, {"k", r.k}, {"eta", r.eta}, {"samples", r.samples}};
  };
  report["exp_bound"] = {{"C1", a.C1}, {"C13", exp_json(e13)}, {"Cb", exp_json(eb)}};

  const double c_worst = std::max(bound.c_max, a.refine ? bound.c_max_refined : 0.0);
  const bool bound_ok = c_worst <= 0.5 && (!a.refine || bound.converged);
  const bool ok = bound_ok && sub.violations == 0 && e13.worst_ratio <= 1.0 && eb.worst_ratio <= 1.0 &&
                  cross.gap_at_eta_star < 1e-9 && cross.worst_branch_mismatch < 1e-9;
  report["pass"] = ok;
  out << report.dump(2) << '\n';
  if (!a.report.empty()) write_json(a.report, report);

  if (!ok) {
    if (!bound_ok)
      err << "bound check failed: c_max = " << format_double(c_worst) << " at k = " << bound.k
          << ", t = " << format_double(bound.t) << ", l = " << bound.l
          << " (refinement change " << format_double(bound.refinement_change) << ")\n";
    if (sub.violations)
      err << "subadditivity failed " << sub.violations << " times; worst excess "
          << format_double(sub.worst_excess) << " at (" << sub.k1 << ", " << sub.eta1 << ") + ("
          << sub.k2 << ", " << sub.eta2 << ")\n";
    if (e13.worst_ratio > 1.0 || eb.worst_ratio > 1.0)
      err << "exponential bound exceeded: C13 ratio " << format_double(e13.worst_ratio) << " at ("
          << e13.k << ", " << e13.eta << "), Cb ratio " << format_double(eb.worst_ratio) << " at ("
          << eb.k << ", " << eb.eta << ")\n";
    return kVerificationFailure;
  }
  return kOk;
}

}  // namespace landau::cli
