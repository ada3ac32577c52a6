#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"

using namespace landau::cli;

namespace {

// Accepts "auto" or a positive number.
std::optional<double> parse_C(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size() || !(v > 0)) throw CLI::ValidationError("--C", "expected \"auto\" or a positive number");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-space Vlasov-Poisson laboratory: echoes, weights and bootstrap diagnostics"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 config or constraint error, 3 numerical abort, 4 verification failure.\n"
      "LANDAU_LAB_THREADS caps internal parallelism.");

  ParamsArgs pa;
  auto* params = app.add_subcommand("params", "Derive generator parameters and print the constraint table");
  params->add_option("--epsilon", pa.epsilon, "Perturbation size")->required();
  params->add_option("--N", pa.N, "Time-horizon exponent, T = eps^-N")->capture_default_str();
  params->add_option("--sigma", pa.sigma, "Sobolev index")->capture_default_str();
  params->add_option("--alpha", pa.alpha, "Density weight exponent")->capture_default_str();
  params->add_option("--C", pa.C, "Weight constant")->capture_default_str();
  params->add_flag("--json", pa.json, "Print JSON instead of a table");

  RunArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run the split-step solver from a config file");
  simulate->add_option("--config", sa.config, "JSON config (comments allowed)")->required()->check(CLI::ExistingFile);
  simulate->add_flag("--force-off", sa.force_off, "Drop the self-consistent force (free transport)");
  simulate->add_flag("--override-validity", sa.override_validity,
                     "Run past the grid validity window; rows are flagged");

  VerifyArgs va;
  std::string verify_C = "auto";
  int l_max = -1;
  auto* verify = app.add_subcommand("verify-weights", "Bound-constant quadrature and weight property checks");
  verify->add_option("--epsilon", va.epsilon)->capture_default_str();
  verify->add_option("--N", va.N)->capture_default_str();
  verify->add_option("--sigma", va.sigma)->capture_default_str();
  verify->add_option("--alpha", va.alpha)->capture_default_str();
  verify->add_option("--C", verify_C, "\"auto\" sweeps powers of two")->capture_default_str();
  verify->add_option("--k-max", va.k_max)->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--l-max", l_max, "Defaults to --k-max");
  verify->add_option("--t-samples", va.t_samples, "Uniform t samples on (0, T]")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--t-min", va.t_min)->capture_default_str();
  verify->add_option("--level", va.level, "Quadrature panels per interval")->capture_default_str();
  verify->add_option("--max-power", va.max_power, "Largest C = 2^j tried")->capture_default_str();
  verify->add_flag("!--no-refine", va.refine, "Skip the refinement pass");
  verify->add_option("--subadditivity-samples", va.subadditivity_samples)->capture_default_str();
  verify->add_option("--exp-samples", va.exp_samples)->capture_default_str();
  verify->add_option("--C1", va.C1, "Constant in the exponential-versus-polynomial bounds")->capture_default_str();
  verify->add_option("--seed", va.seed)->capture_default_str();
  verify->add_option("--csv", va.csv, "Write per-(k, t) partial sums");
  verify->add_option("--report", va.report, "Also write the JSON report here");

  RunArgs voa;
  auto* volterra = app.add_subcommand("volterra", "Solve the density integral equation");
  volterra->add_option("--config", voa.config)->required()->check(CLI::ExistingFile);
  volterra->add_flag("--override-validity", voa.override_validity);

  RunArgs ca;
  auto* check = app.add_subcommand("check-initial", "Weighted smallness check of the initial data");
  check->add_option("--config", ca.config)->required()->check(CLI::ExistingFile);

  EchoArgs ea;
  auto* echo = app.add_subcommand("echo", "Predict and measure the echo of two-wave data");
  echo->add_option("--config", ea.run.config)->required()->check(CLI::ExistingFile);
  echo->add_flag("--predict-only", ea.predict_only, "Skip the simulation");
  echo->add_flag("--override-validity", ea.run.override_validity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  return guarded(
      [&]() -> int {
        if (*params) return cmd_params(pa, std::cout, std::cerr);
        if (*simulate) return cmd_simulate(sa, std::cout, std::cerr);
        if (*verify) {
          va.C = parse_C(verify_C);
          if (l_max > 0) va.l_max = l_max;
          return cmd_verify_weights(va, std::cout, std::cerr);
        }
        if (*volterra) return cmd_volterra(voa, std::cout, std::cerr);
        if (*check) return cmd_check_initial(ca, std::cout, std::cerr);
        return cmd_echo(ea, std::cout, std::cerr);
      },
      std::cerr);
}
