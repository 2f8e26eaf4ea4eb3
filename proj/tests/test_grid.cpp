#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stripwall/grid.hpp>

#include "test_util.hpp"

using namespace stripwall;
using test::pi;

TEST_CASE("build_grid spacing and preconditions") {
  const StripGrid g = build_grid(10.0, 401, 21);
  CHECK(g.hx == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(g.hy == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(g.x(0) == -10.0);
  CHECK(g.x(400) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(g.y(20) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.size() == 401u * 21u);
  CHECK_THROWS_AS(build_grid(0.0, 11, 11), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(-1.0, 11, 11), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, 2, 11), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1.0, 11, 2), std::invalid_argument);
}

TEST_CASE("x_average is exact for fields affine in y") {
  for (int ny : {3, 4, 11, 20}) {
    const StripGrid g = build_grid(2.0, 9, ny);
    const ScalarField f = sample_field(g, [](double x, double y) { return 1.5 + x - 4.0 * y; });
    for (int i = 0; i < g.nx; ++i) CHECK(x_average(f, i) == doctest::Approx(1.5 + g.x(i) - 2.0).epsilon(1e-14));
  }
  const StripGrid g = build_grid(1.0, 5, 5);
  CHECK_THROWS_AS(x_average(ScalarField(g), 5), std::out_of_range);
}

TEST_CASE("extract_trace picks the horizontal edges") {
  const StripGrid g = build_grid(3.0, 13, 5);
  const ScalarField f = sample_field(g, [](double x, double y) { return x + 10.0 * y; });
  const Trace b = extract_trace(f, Side::bottom), t = extract_trace(f, Side::top);
  REQUIRE(b.size() == 13u);
  CHECK(b.x0 == -3.0);
  CHECK(b.spacing == g.hx);
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(b.values[i] == doctest::Approx(b.x(i)));
    CHECK(t.values[i] == doctest::Approx(b.x(i) + 10.0));
  }
}

TEST_CASE("find_center locates the k pi / 2 crossing") {
  const StripGrid g = build_grid(8.0, 161, 11);
  for (double c : {-1.3, 0.0, 0.77}) {
    const ScalarField f = sample_field(g, [&](double x, double) { return 2.0 * std::atan(std::exp(-(x - c))); });
    CHECK(find_center(f, 1) == doctest::Approx(c).epsilon(1e-3));
    const ScalarField f2 = sample_field(g, [&](double x, double) { return 4.0 * std::atan(std::exp(-(x - c))); });
    CHECK(find_center(f2, 2) == doctest::Approx(c).epsilon(1e-3));
  }
  CHECK_THROWS_AS(find_center(ScalarField(g, 0.3), 1), std::runtime_error);
}

TEST_CASE("shift_x moves profiles and clamps beyond the strip") {
  const StripGrid g = build_grid(5.0, 101, 5);
  const ScalarField f = sample_field(g, [](double x, double y) { return 2.0 * x + y; });
  const ScalarField s = shift_x(f, 0.5);  // theta(x + 0.5)
  for (int i = 0; i + 10 < g.nx; ++i) CHECK(s(i, 2) == doctest::Approx(2.0 * (g.x(i) + 0.5) + 0.5));
  CHECK(s(g.nx - 1, 0) == f(g.nx - 1, 0));
  const ScalarField z = shift_x(f, 0.0);
  CHECK(test::sup_diff(z.values, f.values) == 0.0);
}

TEST_CASE("recenter puts the crossing at x = 0 and commutes with traces") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const StripGrid g = build_grid(8.0, 161, 11);
  for (int t = 0; t < 5; ++t) {
    const double off = u(rng);
    const ScalarField f = sample_field(g, [&](double x, double y) {
      return 2.0 * std::atan(std::exp(-(x - off) * (1.0 + 0.2 * y)));
    });
    const Recentered r = recenter_with_shift(f, 1);
    CHECK(r.shift == doctest::Approx(find_center(f, 1)));
    CHECK(std::abs(find_center(r.field, 1)) < 2e-3);
    const Trace a = extract_trace(r.field, Side::top);
    const Trace b = shift_trace(extract_trace(f, Side::top), r.shift);
    CHECK(test::sup_diff(a.values, b.values) <= 1e-12);
    const ScalarField viaparams = recenter(f, WallParams{1.0, 0.0, 1});
    CHECK(test::sup_diff(viaparams.values, r.field.values) == 0.0);
  }
}

TEST_CASE("all_finite flags NaN") {
  ScalarField f(build_grid(1.0, 3, 3), 1.0);
  CHECK(f.all_finite());
  f(1, 1) = std::nan("");
  CHECK_FALSE(f.all_finite());
}
