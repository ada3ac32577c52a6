#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "landau/util.hpp"

namespace landau::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, _] : obj.items())
    if (!known.count(key)) throw ConfigError("unknown key '" + where + key + "'");
}

const json* section(const json& root, const char* name) {
  if (!root.contains(name)) return nullptr;
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(std::string("'") + name + "' must be an object");
  return &s;
}

template <class T>
void read(const json* obj, const std::string& where, const char* key, T& out) {
  if (!obj || !obj->contains(key)) return;
  try {
    out = obj->at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("'" + where + key + "' has the wrong type");
  }
}

Complex read_coefficient(const json& c) {
  if (c.is_number()) return {c.get<double>(), 0.0};
  if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())
    return {c[0].get<double>(), c[1].get<double>()};
  throw ConfigError("'initial.coefficients' entries must be numbers or [re, im] pairs");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  try {
    cfg.raw = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.raw.is_object()) throw ConfigError("config must be a JSON object");
  cfg.hash = fnv1a_hex(cfg.raw.dump());
  cfg.base_dir = base_dir;
  const json& root = cfg.raw;
  reject_unknown(root, "", {"grid", "time", "epsilon", "params", "bound", "initial", "output",
                            "volterra", "bootstrap", "force_off"});

  const json* g = section(root, "grid");
  if (g) reject_unknown(*g, "grid.", {"Nx", "Nv", "L"});
  read(g, "grid.", "Nx", cfg.Nx);
  read(g, "grid.", "Nv", cfg.Nv);
  read(g, "grid.", "L", cfg.L);

  const json* t = section(root, "time");
  if (t) reject_unknown(*t, "time.", {"t0", "t_end", "dt", "diag_every"});
  read(t, "time.", "t0", cfg.t0);
  read(t, "time.", "t_end", cfg.t_end);
  read(t, "time.", "dt", cfg.dt);
  read(t, "time.", "diag_every", cfg.diag_every);

  read(&root, "", "epsilon", cfg.epsilon);
  read(&root, "", "bootstrap", cfg.bootstrap);
  read(&root, "", "force_off", cfg.force_off);

  if (const json* p = section(root, "params")) {
    reject_unknown(*p, "params.", {"N", "sigma", "alpha", "C", "mode", "t_min"});
    read(p, "params.", "N", cfg.params.N);
    read(p, "params.", "sigma", cfg.params.sigma);
    read(p, "params.", "alpha", cfg.params.alpha);
    if (p->contains("C")) {
      const json& c = p->at("C");
      if (c.is_string() && c.get<std::string>() == "auto") cfg.params.C.reset();
      else if (c.is_number()) cfg.params.C = c.get<double>();
      else throw ConfigError("'params.C' must be \"auto\" or a number");
    }
    std::string mode = "strict";
    read(p, "params.", "mode", mode);
    if (mode == "strict") cfg.params.mode = ConstraintMode::Strict;
    else if (mode == "report") cfg.params.mode = ConstraintMode::Report;
    else throw ConfigError("'params.mode' must be \"strict\" or \"report\"");
    if (p->contains("t_min")) {
      double tm = 0;
      read(p, "params.", "t_min", tm);
      cfg.params.t_min = tm;
    }
  }

  if (const json* b = section(root, "bound")) {
    reject_unknown(*b, "bound.", {"k_max", "l_max", "t_samples", "t_min", "level", "max_power"});
    read(b, "bound.", "k_max", cfg.bound.k_max);
    read(b, "bound.", "l_max", cfg.bound.l_max);
    read(b, "bound.", "t_samples", cfg.bound.t_samples);
    read(b, "bound.", "t_min", cfg.bound.t_min);
    read(b, "bound.", "level", cfg.bound.level);
    read(b, "bound.", "max_power", cfg.bound.max_power);
  }

  const json* init = section(root, "initial");
  if (!init) throw ConfigError("missing 'initial' section");
  reject_unknown(*init, "initial.",
                 {"type", "profile", "s", "coefficients", "eta_k", "k", "eta", "k0", "path"});
  read(init, "initial.", "type", cfg.initial.type);
  static const std::set<std::string> kinds{"trivial", "two_wave", "single_mode", "snapshot", "zero"};
  if (!kinds.count(cfg.initial.type))
    throw ConfigError("'initial.type' must be one of trivial, two_wave, single_mode, snapshot, zero");
  if (const json* pr = section(*init, "profile")) {
    reject_unknown(*pr, "initial.profile.", {"type", "r", "taper"});
    read(pr, "initial.profile.", "type", cfg.initial.profile.type);
    read(pr, "initial.profile.", "r", cfg.initial.profile.r);
    std::string taper = "cos2";
    read(pr, "initial.profile.", "taper", taper);
    if (taper == "cos2") cfg.initial.profile.taper = Taper::CosSquared;
    else if (taper == "binomial") cfg.initial.profile.taper = Taper::Binomial;
    else throw ConfigError("'initial.profile.taper' must be \"cos2\" or \"binomial\"");
    if (cfg.initial.profile.type != "bump" && cfg.initial.profile.type != "gaussian")
      throw ConfigError("'initial.profile.type' must be \"bump\" or \"gaussian\"");
  }
  read(init, "initial.", "s", cfg.initial.s);
  if (init->contains("coefficients")) {
    const json& cs = init->at("coefficients");
    if (!cs.is_array()) throw ConfigError("'initial.coefficients' must be an array");
    for (const auto& c : cs) cfg.initial.coefficients.push_back(read_coefficient(c));
  }
  if (init->contains("eta_k")) {
    std::vector<double> ek;
    read(init, "initial.", "eta_k", ek);
    cfg.initial.eta_k = ek;
  }
  read(init, "initial.", "k", cfg.initial.k);
  read(init, "initial.", "eta", cfg.initial.eta);
  read(init, "initial.", "k0", cfg.initial.k0);
  std::string path;
  read(init, "initial.", "path", path);
  if (cfg.initial.type == "snapshot") {
    if (path.empty()) throw ConfigError("'initial.path' is required for snapshot data");
    cfg.initial.path = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path)
                                                                  : base_dir / path;
    if (!std::filesystem::exists(cfg.initial.path))
      throw ConfigError("snapshot file not found: " + cfg.initial.path.string());
  }
  if (cfg.initial.type == "trivial" && cfg.initial.coefficients.empty())
    throw ConfigError("'initial.coefficients' is required for trivial data");

  if (const json* o = section(root, "output")) {
    reject_unknown(*o, "output.", {"dir", "K_report", "checkpoint_times"});
    std::string dir = cfg.output.dir.string();
    read(o, "output.", "dir", dir);
    cfg.output.dir = dir;
    read(o, "output.", "K_report", cfg.output.K_report);
    read(o, "output.", "checkpoint_times", cfg.output.checkpoint_times);
  }
  if (cfg.output.dir.is_relative()) cfg.output.dir = base_dir / cfg.output.dir;

  if (const json* v = section(root, "volterra")) {
    reject_unknown(*v, "volterra.", {"K", "t_end", "dt", "background", "snapshot_every"});
    read(v, "volterra.", "K", cfg.volterra.K);
    if (v->contains("t_end")) {
      double te = 0;
      read(v, "volterra.", "t_end", te);
      cfg.volterra.t_end = te;
    }
    read(v, "volterra.", "dt", cfg.volterra.dt);
    read(v, "volterra.", "background", cfg.volterra.background);
    read(v, "volterra.", "snapshot_every", cfg.volterra.snapshot_every);
    const auto& bg = cfg.volterra.background;
    if (bg != "zero" && bg != "initial" && bg != "simulation")
      throw ConfigError("'volterra.background' must be zero, initial or simulation");
  }

  if (cfg.Nx < 4 || cfg.Nv < 4) throw ConfigError("grid.Nx and grid.Nv must be at least 4");
  if (!(cfg.L > 0)) throw ConfigError("grid.L must be positive");
  if (!(cfg.epsilon >= 0)) throw ConfigError("epsilon must be non-negative");
  if (cfg.output.K_report < 0) throw ConfigError("output.K_report must be non-negative");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path());
}

VelocityProfile make_profile(const RunConfig& cfg) {
  const auto g = cfg.grid();
  if (cfg.initial.profile.type == "gaussian") return gaussian_profile(g);
  return band_limited_bump(g, cfg.initial.profile.r, cfg.initial.profile.taper);
}

PhaseSpaceField make_initial(const RunConfig& cfg) {
  const auto g = cfg.grid();
  const auto& in = cfg.initial;
  if (in.type == "zero") {
    PhaseSpaceField f(g, Rep::XV);
    f.time = cfg.t0;
    return f;
  }
  if (in.type == "snapshot") {
    PhaseSpaceField f = read_snapshot(in.path);
    if (!(f.grid == g)) throw ConfigError("snapshot grid does not match the config grid");
    return f;
  }
  const VelocityProfile psi = make_profile(cfg);
  PhaseSpaceField f = [&] {
    if (in.type == "trivial") return trivial_solution(g, in.s, in.coefficients, psi, cfg.t0, in.eta_k);
    if (in.type == "two_wave") return two_wave_data(g, cfg.epsilon, in.k, in.eta, psi, cfg.t0);
    return single_mode_data(g, cfg.epsilon, in.k0, psi);
  }();
  f.time = cfg.t0;
  return f;
}

GeneratorParams config_params(const RunConfig& cfg) {
  return derive_params(cfg.epsilon, cfg.params.N, cfg.params.sigma, cfg.params.alpha,
                       cfg.params.C.value_or(1.0), cfg.params.mode);
}

BoundOptions bound_options(const BoundSpec& b, double T) {
  if (b.k_max < 1 || b.l_max < 1 || b.t_samples < 1)
    throw ConfigError("bound.k_max, bound.l_max and bound.t_samples must be positive");
  BoundOptions opt;
  opt.k_max = b.k_max;
  opt.l_max = b.l_max;
  opt.t_min = b.t_min;
  opt.level = b.level;
  for (int i = 1; i <= b.t_samples; ++i) opt.t_grid.push_back(T * i / b.t_samples);
  return opt;
}

nlohmann::json to_json(const GeneratorParams& p) {
  return {{"epsilon", p.epsilon}, {"N", p.N},         {"T", p.T},
          {"sigma", p.sigma},     {"alpha", p.alpha}, {"beta", p.beta},
          {"beta_prime", p.beta_prime}, {"gamma", p.gamma}, {"eta_star", p.eta_star},
          {"C", p.C}};
}

nlohmann::json to_json(const std::vector<ConstraintRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) out.push_back({{"name", r.name}, {"text", r.text}, {"ok", r.ok}});
  return out;
}

}  // namespace landau::cli
