#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stripwall/minimize.hpp>

#include "test_util.hpp"

using namespace stripwall;
using test::pi;

TEST_CASE("parameter validation") {
  const StripGrid g = build_grid(4.0, 41, 5);
  CHECK_THROWS_AS(minimize_wall(g, {1.0, 0.0, 0}, SolveOptions{}), std::invalid_argument);
  SolveOptions bad;
  bad.grad_tol = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = SolveOptions{};
  bad.max_iters = 0;
  CHECK_THROWS_AS(minimize_wall(g, {1.0, 0.0, 1}, bad), std::invalid_argument);
  SolveOptions custom;
  custom.init = InitKind::custom;
  CHECK_THROWS_AS(minimize_wall(g, {1.0, 0.0, 1}, custom), std::invalid_argument);
}

TEST_CASE("initial fields respect the caps and the clamp") {
  const StripGrid g = build_grid(5.0, 51, 7);
  for (int k : {1, 2, -1}) {
    for (InitKind kind : {InitKind::linear_ramp, InitKind::tanh_profile}) {
      const ScalarField f = initial_field(g, {1.0, 0.0, k}, kind);
      for (int j = 0; j < g.ny; ++j) {
        CHECK(f(0, j) == k * pi);
        CHECK(f(g.nx - 1, j) == 0.0);
      }
      for (double v : f.values) {
        CHECK(v >= std::min(0.0, k * pi));
        CHECK(v <= std::max(0.0, k * pi));
      }
    }
  }
}

TEST_CASE("prolong is exact for bilinear fields") {
  const StripGrid c = build_grid(2.0, 11, 5), f = build_grid(2.0, 21, 9);
  auto bil = [](double x, double y) { return 1.0 + 2.0 * x - y + 0.5 * x * y; };
  const ScalarField p = prolong(sample_field(c, bil), f);
  CHECK(test::sup_diff(p.values, sample_field(f, bil).values) < 1e-13);
}

TEST_CASE("gamma = 1 wall: energy bound and properties") {
  const StripGrid g = build_grid(10.0, 201, 11);
  SolveOptions o;
  o.grad_tol = 1e-9;
  const SolveReport r = minimize_wall(g, {1.0, 0.0, 1}, o);
  REQUIRE(r.converged);
  CHECK(r.grad_inf <= 1e-9);
  CHECK(r.energy.total > 0.0);
  CHECK(r.energy.total <= 4.0);
  CHECK(r.properties.monotone.ok);
  CHECK(r.properties.monotone.strict_central);
  CHECK(r.properties.symmetry.y_mirror_err <= 1e-6);
  CHECK(r.properties.symmetry.x_point_err <= 1e-6);
  REQUIRE(r.properties.decay.has_value());
  CHECK(r.properties.decay->rate_left < 0.0);
  CHECK(r.properties.decay->rate_right < 0.0);
  for (std::size_t i = 1; i < r.energy_history.size(); ++i) CHECK(r.energy_history[i] <= r.energy_history[i - 1]);
}

TEST_CASE("two initializations agree after recentering") {
  const StripGrid g = build_grid(8.0, 161, 11);
  const WallParams p{1.0, 0.0, 1};
  SolveOptions o;
  o.grad_tol = 1e-9;
  o.init = InitKind::linear_ramp;
  const ScalarField a = recenter(minimize_wall(g, p, o).field, p);
  o.init = InitKind::tanh_profile;
  const ScalarField b = recenter(minimize_wall(g, p, o).field, p);
  CHECK(test::sup_diff(a.values, b.values) <= 1e-6);
}

TEST_CASE("k and -k minimizers are exact negatives") {
  const StripGrid g = build_grid(6.0, 121, 11);
  const SolveReport a = minimize_wall(g, {1.0, 0.3, 2}, SolveOptions{});
  const SolveReport b = minimize_wall(g, {1.0, 0.3, -2}, SolveOptions{});
  for (std::size_t i = 0; i < a.field.values.size(); ++i) CHECK(a.field.values[i] == -b.field.values[i]);
  CHECK(a.energy.total == b.energy.total);
}

TEST_CASE("custom objective over A_{k,M} stays inside the clamp") {
  const StripGrid g = build_grid(5.0, 51, 7);
  const WallParams p{1.0, 0.5, 2};
  double worst = 0.0;
  Objective obj = [&](std::span<const double> x, std::span<double> grad) {
    for (double v : x) worst = std::max({worst, -v, v - 2.0 * pi});
    return energy_and_grad(g, p, x, grad);
  };
  const SolveReport r = minimize_strip(g, p, SolveOptions{}, obj);
  CHECK(worst == 0.0);
  CHECK(r.iterations > 0);
}

TEST_CASE("two-level solve reaches the same minimizer") {
  const StripGrid g = build_grid(6.0, 121, 11);
  SolveOptions o;
  o.grad_tol = 1e-9;
  const SolveReport a = minimize_wall(g, {1.0, 0.0, 1}, o);
  const SolveReport b = minimize_wall_two_level(g, {1.0, 0.0, 1}, o);
  CHECK(b.converged);
  CHECK(b.energy.total == doctest::Approx(a.energy.total).epsilon(1e-10));
  CHECK_THROWS_AS(minimize_wall_two_level(build_grid(6.0, 120, 11), {1.0, 0.0, 1}, o), std::invalid_argument);
}

TEST_CASE("property checks on synthetic fields") {
  const StripGrid g = build_grid(10.0, 201, 11);
  const ScalarField wall = sample_field(g, [](double x, double) { return pi - 2.0 * std::atan(std::exp(2.0 * x)); });
  SUBCASE("monotone") {
    CHECK(check_monotone(wall, -1).ok);
    CHECK_FALSE(check_monotone(wall, 1).ok);
    ScalarField bump(wall);
    bump(150, 3) += 0.01;
    const MonotoneReport m = check_monotone(bump, -1);
    CHECK_FALSE(m.ok);
    CHECK(m.worst_violation == doctest::Approx(0.01).epsilon(0.2));
  }
  SUBCASE("symmetry") {
    const SymmetryReport s = check_symmetry(wall, 1);
    CHECK(s.y_mirror_err < 1e-15);
    CHECK(s.x_point_err < 1e-14);
    const ScalarField tilted = sample_field(g, [](double x, double y) { return pi - 2.0 * std::atan(std::exp(2.0 * x + y)); });
    CHECK(check_symmetry(tilted, 1).y_mirror_err > 0.1);
  }
  SUBCASE("decay rates of an exponential wall") {
    const DecayReport d = check_decay(wall, 1);
    CHECK(d.rate_right == doctest::Approx(-2.0).epsilon(0.05));
    CHECK(d.rate_left == doctest::Approx(-2.0).epsilon(0.05));
    const ScalarField wide = sample_field(g, [](double x, double) { return pi - 2.0 * std::atan(std::exp(0.1 * x)); });
    CHECK_THROWS_AS(check_decay(wide, 1), std::runtime_error);
  }
}

TEST_CASE("infimum estimate is non-increasing in M") {
  SolveOptions o;
  o.grad_tol = 1e-9;
  o.init = InitKind::tanh_profile;
  const std::vector<double> Ms{4.0, 8.0, 16.0};
  const InfimumTable t = infimum_estimate({1.0, 0.0, 1}, Ms, 0.1, 11, o);
  REQUIRE(t.rows.size() == 3u);
  CHECK(t.non_increasing);
  for (const auto& row : t.rows) CHECK(row.converged);
  CHECK(t.rows[2].energy <= t.rows[0].energy);
}
