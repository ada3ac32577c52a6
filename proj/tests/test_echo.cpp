#include <doctest.h>

#include <cmath>
#include <numeric>

#include "landau/dynamics.hpp"
#include "landau/echo.hpp"
#include "landau/solutions.hpp"
#include "landau/spectral.hpp"

using namespace landau;

namespace {

double brute_log_growth(double p, long& argmax) {
  double best = 0.0, acc = 0.0;
  argmax = 0;
  for (long l = 1; l <= 400; ++l) {
    acc += std::log(p) - 3.0 * std::log(static_cast<double>(l));
    if (acc >= best - 1e-12) {
      best = std::max(best, acc);
      argmax = l;
    }
  }
  return best;
}

std::vector<double> uniform_times(double a, double b, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = a + (b - a) * i / n;
  return t;
}

}  // namespace

TEST_CASE("growth factor") {
  auto g1 = growth_factor(1.0);
  CHECK(g1.value == doctest::Approx(1.0));
  CHECK(g1.argmax == 1);

  auto g = growth_factor(1000.0);
  CHECK(g.argmax == 10);
  CHECK(g.log_value == doctest::Approx(23.7645).epsilon(1e-4));
  long arg = 0;
  CHECK(g.log_value == doctest::Approx(brute_log_growth(1000.0, arg)));
  CHECK(arg == 10);

  for (double p : {2.0, 7.9, 8.0, 27.5, 300.0, 12345.0}) {
    long a = 0;
    const double ref = brute_log_growth(p, a);
    auto r = growth_factor(p);
    CHECK(r.log_value == doctest::Approx(ref));
    CHECK(r.argmax == a);
  }

  auto big = growth_factor(1e6);
  CHECK(big.argmax == 100);
  CHECK(big.log_value / std::cbrt(1e6) == doctest::Approx(2.90).epsilon(0.01));
  CHECK_THROWS(growth_factor(0.0));
}

TEST_CASE("truncated growth and cutoff model") {
  auto r = truncated_growth(1e-2, 1e5, 1e3);
  CHECK(r.value == 1.0);
  CHECK(r.tag == "else");
  CHECK(r.l_low > r.l_high);

  // eps eta = 1000, T large: full product up to l = 10.
  auto full = truncated_growth(1e-2, 1e5, 1e6);
  CHECK(full.tag == "exp");
  CHECK(full.l_low == 1);
  CHECK(full.l_high == 10);
  CHECK(full.log_value == doctest::Approx(growth_factor(1000.0).log_value));

  // Exact cube: eps eta = 27 includes l = 3.
  CHECK(truncated_growth(0.27, 100.0, 1e9).l_high == 3);

  CHECK(cutoff_frequency_model(0.01, 100.0) == doctest::Approx(100.0));
  CHECK(gamma_model(1.0) == doctest::Approx(1.0 / 6.0));
  CHECK(gamma_model(2.0) == doctest::Approx(4.0 / 15.0));
  double prev = 0.0;
  for (double N = 1; N <= 64; N *= 2) {
    const double gN = gamma_model(N);
    CHECK(gN > prev);
    CHECK(gN < 1.0 / 3.0);
    prev = gN;
  }
  CHECK(gamma_model(1e8) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("echo prediction") {
  auto e = predict_echo(0.02, 2, 30.0, 1.5);
  CHECK(e.time == doctest::Approx(15.0));
  CHECK(e.modes.first == 1);
  CHECK(e.modes.second == 3);
  CHECK(e.v_frequency == 30.0);
  CHECK(e.amplitude == doctest::Approx(0.02 * 0.02 * 30.0 / 8.0 * 1.5));

  auto chain = echo_chain_times(3, 60.0);
  REQUIRE(chain.size() == 3);
  CHECK(chain[0] == doctest::Approx(20.0));
  CHECK(chain[1] == doctest::Approx(30.0));
  CHECK(chain[2] == doctest::Approx(60.0));

  CHECK_THROWS_AS(predict_echo(0.02, 0, 30.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(predict_echo(0.02, 2, 30.0, 1.0, 15.0), std::invalid_argument);
  CHECK_NOTHROW(predict_echo(0.02, 2, 30.0, 1.0, 1.5));
}

TEST_CASE("echo peak measurement") {
  std::vector<double> t;
  std::vector<std::vector<double>> amp(4);
  for (int i = 0; i <= 400; ++i) {
    const double ti = 0.1 * i;
    t.push_back(ti);
    amp[0].push_back(0.0);
    amp[1].push_back(1e-4 * std::exp(-(ti - 29.5) * (ti - 29.5)) + 1e-5 * std::exp(-(ti - 15) * (ti - 15)));
    amp[2].push_back(1e-3);
    amp[3].push_back(2e-5 * std::exp(-(ti - 15.2) * (ti - 15.2)));
  }
  auto pred = predict_echo(0.02, 2, 30.0, 1.0);
  auto m = measure_echo(pred, t, amp);
  REQUIRE(m.primary.size() == 2);
  CHECK(m.primary[0].mode == 1);
  CHECK(m.primary[0].time == doctest::Approx(15.0));
  CHECK(m.primary[1].time == doctest::Approx(15.2));
  CHECK(m.primary[1].interior);
  REQUIRE(m.secondary);
  CHECK(m.secondary->time == doctest::Approx(29.5));
  CHECK(m.secondary->amplitude == doctest::Approx(2e-4));
  CHECK(m.ratio == doctest::Approx(2e-4 / pred.amplitude));

  // Monotone data peaks at the window edge.
  auto edge = find_echo_peak(t, amp[2], 2, 10.0, 12.0);
  CHECK_FALSE(edge.interior);
  CHECK(find_echo_peak(t, amp[2], 2, 100.0, 120.0).amplitude == 0.0);
}

TEST_CASE("volterra solver") {
  const auto times = uniform_times(0.0, 6.0, 1200);

  SUBCASE("zero background") {
    auto st = volterra_solve([](double, int, double) { return Complex{}; }, 2, times);
    for (std::size_t i = 0; i < times.size(); ++i)
      for (int k = -2; k <= 2; ++k) CHECK(st.at(i, k) == Complex{});
  }

  SUBCASE("no coupling returns the free term") {
    auto bg = [](double s, int k, double eta) { return Complex(k + s, eta); };
    auto st = volterra_solve(bg, 2, times, 0.0);
    CHECK(st.at(100, 1) == Complex(1.0, times[100]));
    CHECK(st.at(7, -2) == Complex(-2.0, -2.0 * times[7]));
  }

  SUBCASE("linear in the free term") {
    auto bg = [](double s, int k, double eta) {
      return Complex(std::cos(0.3 * k * s), 0.1 * std::sin(eta)) * 0.2;
    };
    auto free1 = [](double, int k, double eta) { return Complex(1.0 / (1 + k * k), 0.05 * eta); };
    auto free3 = [&](double s, int k, double eta) { return 3.0 * free1(s, k, eta); };
    const auto short_times = uniform_times(0.0, 3.0, 300);
    auto a = volterra_solve(bg, free1, 2, short_times);
    auto b = volterra_solve(bg, free3, 2, short_times);
    double worst = 0.0;
    for (std::size_t i = 0; i < short_times.size(); ++i)
      for (int k = -2; k <= 2; ++k)
        worst = std::max(worst, std::abs(b.at(i, k) - 3.0 * a.at(i, k)) / (1.0 + std::abs(b.at(i, k))));
    CHECK(worst < 1e-12);
    CHECK(std::abs(a.at(300, 1) - free1(0, 1, 3.0)) > 1e-3);
  }

  SUBCASE("scalar reduction") {
    // Only the k = 0 background row is active inside the integral, so
    // rho(t, 1) = 1 - int_0^t (t - s) rho(s, 1) ds, i.e. cos t.
    auto bg = [](double, int k, double) { return k == 0 || std::abs(k) == 1 ? Complex(1.0) : Complex{}; };
    auto st = volterra_solve(bg, 1, times);

    // Dense trapezoid solve of the same scalar equation.
    std::vector<double> ref(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        const double w = 0.5 * ((j > 0 ? times[j] - times[j - 1] : 0.0) + (times[j + 1] - times[j]));
        acc += w * (times[i] - times[j]) * ref[j];
      }
      ref[i] = 1.0 - acc;
    }
    double dense = 0.0, exact = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      dense = std::max(dense, std::abs(st.at(i, 1) - ref[i]));
      dense = std::max(dense, std::abs(st.at(i, -1) - ref[i]));
      exact = std::max(exact, std::abs(st.at(i, 1) - std::cos(times[i])));
    }
    CHECK(dense < 1e-8);
    CHECK(exact < 1e-4);
  }

  SUBCASE("rejects bad input") {
    auto bg = [](double, int, double) { return Complex(1.0); };
    CHECK_THROWS_AS(volterra_solve(bg, 0, times), std::invalid_argument);
    CHECK_THROWS_AS(volterra_solve(bg, 1, {0.0, 1.0, 1.0}), std::invalid_argument);
    auto nan_bg = [](double s, int, double) { return s > 1.0 ? Complex(NAN) : Complex(1.0); };
    CHECK_THROWS_AS(volterra_solve(nan_bg, 1, times), NumericalError);
  }
}

TEST_CASE("snapshot background and second model") {
  SpectralGrid g(8, 256, 10.0);
  auto psi = gaussian_profile(g);
  SimState s{0.5, two_wave_data(g, 0.05, 2, 3.0, psi, 0.5), 0};

  SnapshotBackground bg(3);
  bg.add(s.f);
  SimState s1 = step_free_transport(s, 0.5);
  bg.add(s1.f);
  SimState s2 = step_free_transport(s1, 1.0);
  bg.add(s2.f);
  REQUIRE(bg.times().size() == 3);

  // Free streaming freezes the gliding profile.
  for (int k = -3; k <= 3; ++k)
    for (double eta : {-2.3, 0.0, 0.7, 3.0}) {
      const Complex a = bg(0.5, k, eta);
      CHECK(std::abs(bg(1.3, k, eta) - a) < 1e-10);
      CHECK(std::abs(bg(2.0, k, eta) - a) < 1e-10);
    }
  // The sin(2x + (eta - 2 t0) v) wave sits at eta = 2 in the gliding frame.
  CHECK(std::abs(bg(1.0, 2, 2.0)) > 1e-3);
  CHECK(std::abs(bg(1.0, 4, 2.0)) == 0.0);
  CHECK_THROWS_AS(bg(3.0, 1, 0.0), std::out_of_range);

  SnapshotBackground early(1);
  early.add(s1.f);
  CHECK_THROWS(early.add(s.f));

  auto rep = second_model_check(s.f, s2.f, 0.05, psi);
  CHECK(rep.fitted < 1e-10);
  CHECK(rep.predicted > 0.0);
}

TEST_CASE("second model against a nonlinear run") {
  SpectralGrid g(16, 2048, 10.0);
  auto psi = gaussian_profile(g);
  double fitted[2];
  for (int i = 0; i < 2; ++i) {
    const double eps = 0.01 * (i + 1);
    auto f0 = two_wave_data(g, eps, 2, 200.0, psi, 0.5);
    SimConfig c;
    c.grid = g;
    c.dt = 0.01;
    c.t0 = 0.5;
    c.t_end = 5.0;
    c.epsilon = eps;
    c.diag_every = 1000000;
    auto r = run(c, f0, {});
    REQUIRE_FALSE(r.aborted);
    auto rep = second_model_check(f0, r.final_state.f, eps, psi);
    CHECK(rep.ratio > 1.0 / 3.0);
    CHECK(rep.ratio < 3.0);
    fitted[i] = rep.fitted;
  }
  CHECK(fitted[1] / fitted[0] > 1.4);
  CHECK(fitted[1] / fitted[0] < 2.6);
}
