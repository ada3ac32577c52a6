#include <doctest.h>

#include <cmath>
#include <numbers>

#include "landau/solutions.hpp"
#include "landau/weights.hpp"

using namespace landau;

namespace {

PhaseSpaceField spike(const SpectralGrid& g, int k, int eta_index, Complex value) {
  PhaseSpaceField f(g, Rep::KEta);
  f.at(static_cast<std::size_t>(g.row_of_k(k)), static_cast<std::size_t>(g.column_of_eta_index(eta_index))) = value;
  return f;
}

bool has_failure(const std::vector<ConstraintRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.name == name) return !r.ok;
  return false;
}

}  // namespace

TEST_CASE("derive_params") {
  auto p = derive_params(0.01, 1.0, 4.0, 0.45);
  CHECK(p.beta == doctest::Approx(1.0 / 12));
  CHECK(p.eta_star == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(p.T == doctest::Approx(100.0));
  CHECK(p.gamma == doctest::Approx(1.0 / 3 - 1.0 / 24).epsilon(1e-15));
  CHECK(std::pow(p.epsilon, p.beta_prime - p.beta) ==
        doctest::Approx(std::pow(p.eta_star, 1.0 / 3 - p.gamma)).epsilon(1e-12));
  CHECK(derive_params(0.07, 2.5, 4.0, 0.49).beta == doctest::Approx(1.0 / 12));
  for (const auto& r : check_constraints(p)) CHECK_MESSAGE(r.ok, r.text);

  bool beta_row = false;
  for (const auto& r : check_constraints(p))
    if (r.name == "beta_sigma") beta_row = r.text == "beta = 1/12 ≤ 1/(3σ) = 1/12: OK";
  CHECK(beta_row);

  SUBCASE("alpha below the transport threshold") {
    try {
      derive_params(0.1, 1.0, 4.0, 0.34);
      FAIL("expected a constraint error");
    } catch (const ConstraintError& e) {
      CHECK(e.constraint() == "gamma_lower");
    }
    auto rows = check_constraints(derive_params(0.1, 1.0, 4.0, 0.34, 1.0, ConstraintMode::Report));
    CHECK(has_failure(rows, "alpha_transport"));
    CHECK_FALSE(has_failure(rows, "beta_sigma"));
  }
  SUBCASE("report mode keeps alpha = 0.4") {
    auto q = derive_params(0.1, 1.0, 4.0, 0.4, 1.0, ConstraintMode::Report);
    CHECK(q.alpha == 0.4);
    CHECK(has_failure(check_constraints(q), "alpha_transport"));
    CHECK_THROWS_AS(derive_params(0.1, 1.0, 4.0, 0.4), ConstraintError);
  }
  SUBCASE("epsilon out of range") {
    CHECK_THROWS_AS(derive_params(0.2, 1.0, 4.0, 0.45), ConstraintError);
    CHECK_THROWS_AS(derive_params(0.1, 1.0, 2.5, 0.45), ConstraintError);
  }
}

TEST_CASE("cutoff weight") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45);
  CutoffWeight W(p);
  CHECK(cutoff_weight(W, 0, 0) == doctest::Approx(std::pow(0.1, 1.0 / 12)));
  CHECK(cutoff_weight(W, 1, 0) == doctest::Approx(0.9265).epsilon(1e-4));
  const double far = 1e6;
  CHECK(W(0, far) == doctest::Approx(std::pow(bracket(0, far), p.gamma)).epsilon(1e-14));
  double prev = 0.0;
  for (double r = 0; r < 1e5; r = r * 1.3 + 0.5) {
    CHECK(W(0, r) >= prev);
    prev = W(0, r);
  }
}

TEST_CASE("z of t") {
  CHECK(z_of_t(100, 100, 0.01) == doctest::Approx(std::log(100.0)));
  CHECK(z_of_t(1, 100, 0.01) == doctest::Approx(9.2103).epsilon(1e-5));
  CHECK(z_of_t(0, 100, 0.01) == z_of_t(0.01, 100, 0.01));
  CHECK(z_of_t(3, 100, 0.01) > z_of_t(4, 100, 0.01));
  CHECK(z_of_t(50, 100, 0.01) >= std::log(100.0));
  CHECK_THROWS(z_of_t(101, 100, 0.01));
}

TEST_CASE("energies") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45, 2.0);
  SpectralGrid g(8, 64, 8.0);
  PhaseSpaceField zero(g, Rep::KEta);
  CHECK(energy_E1(zero, zero, 3.0, p) == 0.0);

  const double z = 1.7;
  auto one = spike(g, 0, 0, 1.0);
  CHECK(energy_E1(one, zero, z, p) ==
        doctest::Approx(std::exp(2 * p.C * z * std::pow(p.epsilon, p.beta)) * g.d_eta()).epsilon(1e-13));

  SUBCASE("quadratic homogeneity") {
    auto s = spike(g, 2, 5, Complex(0.3, 0.1));
    PhaseSpaceField s3 = s;
    for (auto& c : s3.data) c *= 3.0;
    CHECK(energy_E1(s3, z, p) == doctest::Approx(9 * energy_E1(s, z, p)).epsilon(1e-12));
  }
  SUBCASE("overflow names the mode") {
    auto far = spike(g, 3, 30, 1.0);
    try {
      energy_E1(far, zero, 400.0, p);
      FAIL("expected overflow");
    } catch (const WeightOverflow& e) {
      CHECK(e.k() == 3);
      CHECK(e.eta() == doctest::Approx(30 * g.d_eta()));
    }
  }
  SUBCASE("E2") {
    SpatialDensity rho{g, 0.0, std::vector<Complex>(g.nx())};
    CHECK(energy_E2(rho, 1.0, z, p) == 0.0);
    rho.coeffs[1] = p.epsilon;
    CHECK(energy_E2(rho, 0.0, 0.0, p) == doctest::Approx(p.epsilon * std::pow(2.0, p.sigma / 2)));
    rho.coeffs[0] = 100.0;  // k = 0 never counts
    CHECK(energy_E2(rho, 0.0, 0.0, p) == doctest::Approx(p.epsilon * std::pow(2.0, p.sigma / 2)));
    const double a = energy_E2(rho, 2.0, z, p);
    for (auto& c : rho.coeffs) c *= 2.0;
    CHECK(energy_E2(rho, 2.0, z, p) == doctest::Approx(2 * a));
  }
}

TEST_CASE("check_initial") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45, 1.0);
  SpectralGrid g(8, 128, 10.0);
  auto zero = check_initial(PhaseSpaceField(g, Rep::XV), p);
  CHECK(zero.pass);
  CHECK(zero.value == 0.0);
  CHECK(zero.threshold == doctest::Approx(1e-3));

  auto f = single_mode_data(g, 1.0, 1, gaussian_profile(g));
  const double unit = check_initial(f, p).value;
  REQUIRE(unit > 0);
  PhaseSpaceField scaled = f;
  const double a = std::sqrt((p.epsilon / 200) / unit);
  for (auto& c : scaled.data) c *= a;
  auto r = check_initial(scaled, p);
  CHECK(r.pass);
  CHECK(r.value == doctest::Approx(p.epsilon / 200).epsilon(1e-12));
  for (auto& c : scaled.data) c *= 2.0;
  CHECK(check_initial(scaled, p).value == doctest::Approx(4 * r.value).epsilon(1e-12));
  CHECK_FALSE(check_initial(scaled, p).pass);
}

TEST_CASE("kernel C_kl") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45, 4.0);
  const double tmin = 0.01;
  CHECK(kernel_Ckl(3.0, 3.0, 2, 1, p, tmin) == 0.0);
  CHECK_THROWS(kernel_Ckl(3.0, 1.0, 2, 0, p, tmin));
  CHECK_THROWS(kernel_Ckl(3.0, 4.0, 2, 1, p, tmin));
  CHECK(kernel_Ckl(3.0, 1.0, 2, 1, p, tmin) > 0);
  CHECK(kernel_Ckl(3.0, 1.0, 2, -1, p, tmin) < 0);

  SUBCASE("five-factor recomposition at k = l, s = t/2") {
    const int k = 3;
    const double t = 4.0, s = 2.0;
    CutoffWeight W(p);
    auto z = [&](double x) { return 2 * std::log(p.T) - std::log(std::max(x, tmin)); };
    auto br = [](double a, double b) { return std::sqrt(1 + a * a + b * b); };
    const double f1 = std::exp(p.C * (z(t) - z(s)) * W(k, k * t));
    const double f2 = std::exp(p.C * z(s) * (W(k, k * t) - W(0, k * t - k * s) - W(k, k * s)));
    const double f3 = std::pow(br(k, k * t), p.sigma) * std::pow(br(0, k * t - k * s), -p.sigma) *
                      std::pow(br(k, k * s), -p.sigma);
    const double f4 = std::pow(k, -p.alpha) * std::pow(k, p.alpha);
    const double f5 = static_cast<double>(k) * (t - s) / k;
    CHECK(kernel_Ckl(t, s, k, k, p, tmin) == doctest::Approx(f1 * f2 * f3 * f4 * f5).epsilon(1e-12));
  }
  SUBCASE("mean-value step of the time weight") {
    CutoffWeight W(p);
    for (double t : {0.5, 2.0, 7.0})
      for (double s : {0.1, 0.4 * t, 0.9 * t}) {
        const double lhs = std::exp(-p.C * (z_of_t(s, p.T, tmin) - z_of_t(t, p.T, tmin)) * W(1, t));
        const double rhs = std::exp(-p.C * ((t - s) / t) * W(1, t));
        CHECK(lhs <= rhs * (1 + 1e-14));
      }
  }
}

TEST_CASE("e2 bound constant on small ranges") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.4, 4.0, ConstraintMode::Report);
  BoundOptions opt;
  opt.k_max = 4;
  opt.l_max = 4;
  opt.t_grid = {0.5, 2.0, 5.0, 10.0};
  auto base = e2_bound_constant(p, opt);
  CHECK(base.c_max > 0);
  CHECK(base.converged);
  CHECK(base.cells.size() == 16);
  CHECK(base.k >= 1);

  SUBCASE("doubling C does not increase c_max") {
    GeneratorParams q = p;
    double prev = base.c_max;
    for (int i = 0; i < 3; ++i) {
      q.C *= 2;
      const double c = e2_bound_constant(q, opt).c_max;
      CHECK(c <= prev * (1 + 1e-12));
      prev = c;
    }
  }
  SUBCASE("epsilon to zero") {
    GeneratorParams q = p;
    // The weight's eps^beta factor also shrinks, so the decay is slower than linear.
    q.epsilon = 1e-4;
    const double mid = e2_bound_constant(q, opt).c_max;
    q.epsilon = 1e-8;
    const double tiny = e2_bound_constant(q, opt).c_max;
    CHECK(mid < base.c_max);
    CHECK(tiny < 1e-2 * mid);
  }
  SUBCASE("longer horizon never lowers the sup") {
    BoundOptions shorter = opt;
    shorter.t_grid = {0.5, 2.0};
    CHECK(e2_bound_constant(p, shorter).c_max <= base.c_max);
  }
  SUBCASE("single mode range") {
    BoundOptions one = opt;
    one.k_max = 1;
    one.l_max = 1;
    const double c = e2_bound_constant(p, one).c_max;
    CHECK(c > 0);
    CHECK(std::isfinite(c));
  }
  SUBCASE("sweep finds a power of two") {
    auto sw = minimal_C(p, opt, 8);
    REQUIRE(sw.C.has_value());
    CHECK(sw.at_C.c_max_refined <= 0.5);
    CHECK(sw.monotonicity_violations.empty());
    if (*sw.C > 1) CHECK(sw.table[sw.table.size() - 2].c_max > 0.5);
  }
}

TEST_CASE("exponential bounds") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45);
  CutoffWeight W(p);
  SUBCASE("scalar check at the origin") {
    const double y = std::pow(0.1, 1.0 / 12);
    CHECK(exp_bound_ratio(W, 1.0, 0, 0, ExpBoundVariant::C13) ==
          doctest::Approx(y * y * y * std::exp(-y)));
    CHECK(exp_bound_ratio(W, 1.0, 0, 0, ExpBoundVariant::C13) < 1);
    // y = 3 is the peak of y^3 e^{-y}: (3/e)^3 > 1, so the bound needs larger C1.
    CHECK(exp_bound_ratio(W, 3.0 / y, 0, 0, ExpBoundVariant::C13) ==
          doctest::Approx(std::pow(3 / std::numbers::e, 3)));
  }
  SUBCASE("sampled at C1 = 64") {
    for (auto v : {ExpBoundVariant::C13, ExpBoundVariant::Cb}) {
      auto r = exp_bound_check(W, 64.0, 20000, v, 5);
      CHECK(r.worst_ratio <= 1.0);
      CHECK(r.samples == 20000);
    }
    CHECK(exp_bound_check(W, 4.0, 20000, ExpBoundVariant::Cb, 5).worst_ratio > 1.0);
  }
}

TEST_CASE("subadditivity and crossover") {
  for (double eps : {0.1, 0.01}) {
    CutoffWeight W(derive_params(eps, 1.0, 4.0, 0.45));
    auto r = subadditivity_check(W, 100000, 9);
    CHECK(r.violations == 0);
    CHECK(r.worst_excess <= 0);
    CHECK(r.above_cutoff > 1000);
    CHECK(r.below_cutoff > 1000);
    auto c = branch_crossover(W, 10000, 2);
    CHECK(c.gap_at_eta_star < 1e-12);
    CHECK(c.worst_branch_mismatch < 1e-12);
  }
}

TEST_CASE("bootstrap monitor") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45);
  std::vector<EnergyReport> reports;
  for (int i = 0; i <= 5; ++i) reports.push_back({double(i), 1.0, 0.0, 0.0, {}, true, true, false});
  CHECK_FALSE(bootstrap_monitor(reports, p).has_value());

  reports[3].E1 = 17 * p.epsilon * p.epsilon;
  auto v = bootstrap_monitor(reports, p);
  REQUIRE(v.has_value());
  CHECK(v->time == 3.0);
  CHECK(v->which == "E1");

  reports[3].E1 = 0;
  reports[2].E2 = 1.01 * e2_threshold(p, 2.0);
  v = bootstrap_monitor(reports, p);
  REQUIRE(v.has_value());
  CHECK(v->which == "E2");

  std::swap(reports[0], reports[1]);
  CHECK_THROWS(bootstrap_monitor(reports, p));
}

TEST_CASE("energy monitor on a trivial-solution run") {
  auto p = derive_params(0.1, 1.0, 4.0, 0.45, 1.0);
  SpectralGrid g(8, 512, 64.0);
  auto psi = band_limited_bump(g, 1.0, Taper::Binomial);
  SimConfig cfg;
  cfg.grid = g;
  cfg.dt = 0.05;
  cfg.t0 = 0.5;
  cfg.t_end = 2.0;
  cfg.diag_every = 5;
  EnergyMonitor mon(p, cfg.dt, 3);
  run(cfg, trivial_solution(g, 0.0, {1e-6, 5e-7}, psi, cfg.t0), {mon.as_monitor()});
  REQUIRE(mon.reports().size() == 7);
  for (const auto& r : mon.reports()) {
    CHECK(r.E2 <= 1e-8);
    CHECK(r.mode_amplitudes.size() == 4);
    CHECK(r.mode_amplitudes[1] < 1e-15);
    CHECK(r.E1 > 0);
    CHECK(r.z == doctest::Approx(z_of_t(r.time, p.T, cfg.dt)));
  }
}
