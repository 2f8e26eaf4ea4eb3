#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stripwall/analytic.hpp>

#include "test_util.hpp"

using namespace stripwall;
using test::pi;

TEST_CASE("kernel K values and singularity") {
  CHECK(kernel_K(1.0) == doctest::Approx(pi * std::cosh(pi) / std::pow(std::sinh(pi), 2)).epsilon(1e-14));
  CHECK(kernel_K(-0.3) == kernel_K(0.3));
  CHECK_THROWS_AS(kernel_K(0.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_power_law(0.0), std::invalid_argument);
  // small-x behaviour is the power law
  CHECK(kernel_K(1e-3) == doctest::Approx(kernel_power_law(1e-3)).epsilon(1e-5));
  // large-x decay ~ 2 pi e^{-pi x}
  CHECK(kernel_K(8.0) == doctest::Approx(2.0 * pi * std::exp(-8.0 * pi)).epsilon(1e-9));
}

TEST_CASE("regularized kernel") {
  CHECK(std::isfinite(kernel_K_eps(0.0, 0.1)));
  CHECK(kernel_K_eps(0.0, 0.1) < 0.0);
  CHECK(kernel_K_eps(0.7, 0.2) == kernel_K_eps(-0.7, 0.2));
  CHECK(kernel_K_eps(1.0, 1e-3) == doctest::Approx(kernel_K(1.0)).epsilon(1e-3));
  CHECK_THROWS_AS(kernel_K_eps(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(kernel_K_eps(1.0, 0.5), std::invalid_argument);
}

TEST_CASE("symbols") {
  CHECK(symbol_Khat(2.0) == doctest::Approx(-2.0 * std::tanh(1.0)).epsilon(1e-14));
  CHECK(symbol_Khat(0.0) == 0.0);
  CHECK(symbol_Khat(-3.0) == symbol_Khat(3.0));
  CHECK(symbol_Khat_eps(2.0, 1e-8) == doctest::Approx(symbol_Khat(2.0)).epsilon(1e-7));
  CHECK(symbol_Khat_eps(0.0, 0.1) == 0.0);
}

TEST_CASE("sampled K_eps transforms to its symbol") {
  const double eps = 0.1, dx = 1e-3;
  const int n = 20000;
  std::vector<double> k(n + 1);
  for (int i = 0; i <= n; ++i) k[i] = kernel_K_eps(i * dx, eps);
  for (double q : {0.0, 0.5, 1.0, 2.5, 5.0, 7.5, 10.0}) {
    double s = 0.5 * k[0];
    for (int i = 1; i <= n; ++i) s += (i == n ? 0.5 : 1.0) * k[i] * std::cos(q * i * dx);
    CHECK(2.0 * dx * s == doctest::Approx(symbol_Khat_eps(q, eps)).scale(1.0).epsilon(1e-4));
  }
}

TEST_CASE("Poisson kernel integrates to one") {
  for (double y : {0.1, 0.5, 0.9}) {
    CHECK(poisson_P_cdf(60.0, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(poisson_P_cdf(-60.0, y) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // Simpson on [-30, 30]
    const int n = 60000;
    const double h = 60.0 / n;
    double s = poisson_P(-30.0, y) + poisson_P(30.0, y);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * poisson_P(-30.0 + i * h, y);
    CHECK(s * h / 3.0 == doctest::Approx(1.0).epsilon(1e-8));
    // cdf derivative is P
    const double x = 0.37, d = 1e-5;
    CHECK((poisson_P_cdf(x + d, y) - poisson_P_cdf(x - d, y)) / (2 * d) == doctest::Approx(poisson_P(x, y)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(poisson_P(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_P(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson_P(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(poisson_P_cdf(1.0, 0.0), std::invalid_argument);
  CHECK(poisson_P(0.5, 0.0) == 0.0);
}

TEST_CASE("closed-form profiles") {
  CHECK(transverse_1d(0.0) == doctest::Approx(pi / 2));
  const auto [m1, m2] = transverse_1d_m(0.8);
  CHECK(m1 * m1 + m2 * m2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::atan2(m2, m1) == doctest::Approx(transverse_1d(0.8)).epsilon(1e-14));
  CHECK(small_gamma(0.0) == doctest::Approx(pi / 2));
  CHECK(small_gamma(-30.0) == doctest::Approx(pi));
  CHECK(ode_wall(0.0, 3.0) == doctest::Approx(pi / 2));
  CHECK(ode_wall(1.0, 0.25) == doctest::Approx(2.0 * std::atan(std::exp(1.0))));
  CHECK(boundary_vortex(0.0, 10.0) == doctest::Approx(pi / 2));
  CHECK(boundary_vortex(1.0, 0.5) == doctest::Approx(pi / 2 - std::atan(1.0)));
  CHECK(large_gamma_2d(0.0, 0.5) == doctest::Approx(pi / 2));
  CHECK(large_gamma_2d(0.5, 0.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(large_gamma_2d(-0.5, 1.0) == doctest::Approx(pi));
  CHECK(large_gamma_2d(0.3, 0.2) == doctest::Approx(pi - large_gamma_2d(-0.3, 0.2)));
  CHECK(large_gamma_2d_eps(0.4, 0.3, 0.0) == doctest::Approx(large_gamma_2d(0.4, 0.3)).epsilon(1e-14));
  CHECK_THROWS_AS(ode_wall(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(boundary_vortex(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("profile dispatch and names") {
  for (Profile p : {Profile::transverse_1d, Profile::small_gamma, Profile::ode_wall, Profile::boundary_vortex,
                    Profile::large_gamma_2d})
    CHECK(parse_profile(to_string(p)) == p);
  CHECK(profile_angle(Profile::ode_wall, 0.3, 0.5, 2.0) == ode_wall(0.3, 2.0));
  CHECK(profile_angle(Profile::large_gamma_2d, 0.3, 0.2) == large_gamma_2d(0.3, 0.2));
  CHECK_THROWS_AS(parse_profile("bloch"), std::invalid_argument);
}

TEST_CASE("large-gamma profile is harmonic to second order") {
  auto sup_lap = [](double h) {
    double m = 0.0;
    for (double x = 0.5; x <= 2.0 + 1e-12; x += h)
      for (double y = 0.2; y <= 0.8 + 1e-12; y += h) {
        const double lap = (large_gamma_2d(x + h, y) + large_gamma_2d(x - h, y) + large_gamma_2d(x, y + h) +
                            large_gamma_2d(x, y - h) - 4.0 * large_gamma_2d(x, y)) / (h * h);
        m = std::max(m, std::abs(lap));
      }
    return m;
  };
  const double a = sup_lap(0.02), b = sup_lap(0.01);
  CHECK(b < 2e-3);
  CHECK(std::log2(a / b) >= 1.8);
}

TEST_CASE("ode_wall solves the 1D wall equation") {
  const double gamma = 2.0;
  const Trace t = sample_trace(-5.0, 5.0, 1001, [&](double x) { return ode_wall(x, gamma); });
  const Trace r = residual_ode(t, gamma);
  CHECK(r.size() == t.size() - 2);
  CHECK(r.x0 == doctest::Approx(t.x(1)));
  double m = 0.0;
  for (double v : r.values) m = std::max(m, std::abs(v));
  CHECK(m < 1e-3);
  CHECK_THROWS_AS(residual_ode(sample_trace(0.0, 1.0, 2, [](double) { return 0.0; }), 1.0), std::invalid_argument);
}
