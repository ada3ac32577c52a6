#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

namespace landau::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfigError = 2,
  kNumericalAbort = 3,
  kVerificationFailure = 4,
};

struct ParamsArgs {
  double epsilon = 0.1;
  double N = 1.0;
  double sigma = 4.0;
  double alpha = 0.45;
  double C = 1.0;
  bool json = false;
};

struct RunArgs {
  std::filesystem::path config;
  bool force_off = false;
  bool override_validity = false;
};

struct VerifyArgs {
  double epsilon = 0.1;
  double N = 1.0;
  double sigma = 4.0;
  double alpha = 0.4;
  std::optional<double> C;  ///< empty = sweep powers of two
  int k_max = 64;
  std::optional<int> l_max;  ///< defaults to k_max
  int t_samples = 40;
  double t_min = 0.01;
  int level = 2;
  int max_power = 12;
  bool refine = true;
  long subadditivity_samples = 1000000;
  long exp_samples = 100000;
  double C1 = 64.0;
  unsigned long seed = 1;
  std::filesystem::path csv;   ///< optional per-cell table
  std::filesystem::path report;  ///< optional copy of the JSON report
};

struct EchoArgs {
  RunArgs run;
  bool predict_only = false;
};

int cmd_params(const ParamsArgs& a, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunArgs& a, std::ostream& out, std::ostream& err);
int cmd_verify_weights(const VerifyArgs& a, std::ostream& out, std::ostream& err);
int cmd_volterra(const RunArgs& a, std::ostream& out, std::ostream& err);
int cmd_check_initial(const RunArgs& a, std::ostream& out, std::ostream& err);
int cmd_echo(const EchoArgs& a, std::ostream& out, std::ostream& err);

/// Runs a command body and maps escaping exceptions onto exit codes.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace landau::cli
