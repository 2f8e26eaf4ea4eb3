// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <stripwall/analytic.hpp>
#include <stripwall/energy.hpp>
#include <stripwall/micro.hpp>
#include <stripwall/minimize.hpp>
#include <stripwall/nonlocal1d.hpp>
#include <stripwall/parallel.hpp>

using namespace stripwall;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool passed = false;
  std::string summary;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.summary = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.passed) ++failures;
  std::printf("[%s] %2d %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", id, title, o.summary.c_str(), s);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolveOptions tight() {
  SolveOptions o;
  o.grad_tol = 1e-9;
  o.init = InitKind::tanh_profile;
  return o;
}

ScalarField compact_wall(const StripGrid& g) {
  return sample_field(g, [](double x, double) {
    if (x <= -3.0) return pi;
    if (x >= 3.0) return 0.0;
    return 0.5 * pi * (1.0 - std::sin(pi * x / 6.0));
  });
}

}  // namespace

int main() {
  apply_thread_cap_from_env();

  criterion(1, "gradient consistency", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StripGrid g = build_grid(1.0, 33, 33);
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const WallParams p{0.25 + 3.75 * u(rng), u(rng), 1};
      const double a = 2.0 * u(rng) - 1.0, b = 4.0 * u(rng), c = 2.0 * pi * u(rng);
      ScalarField f = sample_field(g, [&](double x, double y) { return 0.5 * pi * (1.0 - std::tanh(x)) + a * std::sin(b * x + 3.0 * y + c); });
      for (double& v : f.values) v += 0.3 * (2.0 * u(rng) - 1.0);
      const ScalarField an = grad_F(f, p);
      double gmax = 0.0;
      for (double v : an.values) gmax = std::max(gmax, std::abs(v));
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double v0 = f.values[i], t = 1e-5;
        f.values[i] = v0 + t;
        const double ep = energy_and_grad(g, p, f.values, {});
        f.values[i] = v0 - t;
        const double em = energy_and_grad(g, p, f.values, {});
        f.values[i] = v0;
        worst = std::max(worst, std::abs((ep - em) / (2 * t) - an.values[i]) / std::max(std::abs(an.values[i]), 1e-3 * gmax));
      }
    }
    const double s = seconds_since(t0);
    return Outcome{worst <= 1e-6 && s < 10.0, fmt("max nodal rel err %.2e <= 1e-6, runtime %.2f s < 10 s", worst, s)};
  });

  criterion(2, "analytic energy oracle 4 sqrt(gamma)", [] {
    bool ok = true;
    std::string out;
    for (double gamma : {0.25, 1.0, 4.0}) {
      const double exact = 4.0 * std::sqrt(gamma);
      double err[3];
      int idx = 0;
      for (int nx : {401, 801, 1601}) {
        const StripGrid g = build_grid(12.0, nx, 5);
        const ScalarField f = sample_field(g, [&](double x, double) { return 2.0 * std::atan(std::exp(-2.0 * std::sqrt(gamma) * x)); });
        err[idx++] = std::abs(energy_F(f, {gamma, 0.0, 1}).total - exact) / exact;
      }
      const double order = std::log2(err[1] / err[2]);
      ok = ok && order >= 1.9 && err[2] <= 1e-3;
      out += fmt("gamma %g: order %.3f, rel err %.2e; ", gamma, order, err[2]);
    }
    return Outcome{ok, out + "need order >= 1.9, err <= 1e-3 at nx 1601"};
  });

  const StripGrid g3 = build_grid(10.0, 401, 21);
  criterion(3, "minimizer bound and properties (gamma 1, M 10)", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    SolveOptions o = tight();
    o.init = InitKind::linear_ramp;
    const SolveReport r = minimize_wall(g3, {1.0, 0.0, 1}, o);
    const double s = seconds_since(t0);
    const auto& p = r.properties;
    const bool decay_ok = p.decay && p.decay->rate_left < 0 && p.decay->rate_right < 0 && p.decay->fit_residual <= 0.1;
    const bool ok = r.converged && r.energy.total > 0.0 && r.energy.total <= 4.0 && p.monotone.ok &&
                    p.symmetry.y_mirror_err <= 1e-6 && p.symmetry.x_point_err <= 1e-6 && decay_ok && s < 120.0;
    return Outcome{ok, fmt("E %.10f in (0, 4], converged %d, monotone %d, sym %.1e/%.1e, decay %.3f/%.3f fit %.1e, %.1f s",
                           r.energy.total, r.converged, p.monotone.ok, p.symmetry.y_mirror_err, p.symmetry.x_point_err,
                           p.decay ? p.decay->rate_left : 0.0, p.decay ? p.decay->rate_right : 0.0,
                           p.decay ? p.decay->fit_residual : -1.0, s)};
  });

  criterion(4, "uniqueness up to translation", [&] {
    const WallParams p{1.0, 0.0, 1};
    SolveOptions o = tight();
    o.init = InitKind::linear_ramp;
    const ScalarField a = recenter(minimize_wall(g3, p, o).field, p);
    o.init = InitKind::tanh_profile;
    const ScalarField b = recenter(minimize_wall(g3, p, o).field, p);
    double d = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
    return Outcome{d <= 1e-6, fmt("ramp vs tanh init sup err %.2e <= 1e-6", d)};
  });

  criterion(5, "small-gamma regime (gamma 0.01)", [] {
    const WallParams p{0.01, 0.0, 1};
    const SolveReport r = minimize_wall(build_grid(100.0, 801, 11), p, tight());
    const Trace t = extract_trace(recenter(r.field, p), Side::bottom);
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (std::abs(0.1 * t.x(i)) <= 3.0) err = std::max(err, std::abs(t.values[i] - small_gamma(0.1 * t.x(i))));
    return Outcome{err <= 5e-2, fmt("trace sup err %.3e <= 5e-2 on |sqrt(gamma) x| <= 3 (M 100, hx 0.25, ny 11)", err)};
  });

  criterion(6, "large-gamma regime (gamma 100)", [] {
    const WallParams p{100.0, 0.0, 1};
    const StripGrid g = build_grid(3.0, 601, 101);
    const SolveReport r = minimize_wall(g, p, tight());
    const ScalarField c = recenter(r.field, p);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i), y = g.y(j);
        if (std::abs(x) <= 1.0 + 1e-12 && y >= 0.2 - 1e-12 && y <= 0.8 + 1e-12)
          err = std::max(err, std::abs(c(i, j) - large_gamma_2d(x, y)));
      }
    return Outcome{err <= 0.1, fmt("sup err %.3e <= 0.1 on |x| <= 1, y in [0.2, 0.8] (M 3, h 0.01; tolerance is an engineering choice)", err)};
  });

  criterion(7, "factor-two identity", [] {
    const Trace t = sample_trace(-20.0, 20.0, 4001, [](double x) { return 0.5 * pi * (1.0 - std::tanh(x)); });
    const FactorTwo f = factor_two_check(t, 1.0, build_grid(15.0, 3001, 101));
    return Outcome{f.rel_err <= 1e-3, fmt("F_2d %.8f vs 2 Fbar %.8f, rel err %.2e <= 1e-3", f.F_2d, 2 * f.Fbar, f.rel_err)};
  });

  criterion(8, "kernel/symbol pair", [] {
    const double eps = 0.1, dx = 1e-3;
    const int n = 20000;
    std::vector<double> k(n + 1);
    for (int i = 0; i <= n; ++i) k[i] = kernel_K_eps(i * dx, eps);
    double worst = 0.0;
    for (double q = 0.0; q <= 10.0 + 1e-12; q += 0.1) {
      double s = 0.5 * k[0];
      for (int i = 1; i <= n; ++i) s += (i == n ? 0.5 : 1.0) * k[i] * std::cos(q * i * dx);
      worst = std::max(worst, std::abs(2.0 * dx * s - symbol_Khat_eps(q, eps)));
    }
    const double k2 = std::abs(symbol_Khat(2.0) + 2.0 * std::tanh(1.0));
    double perr = 0.0;
    for (double y : {0.1, 0.5}) {
      const int m = 200000;
      const double h = 80.0 / m;
      double s = poisson_P(-40.0, y) + poisson_P(40.0, y);
      for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * poisson_P(-40.0 + i * h, y);
      perr = std::max(perr, std::abs(s * h / 3.0 - 1.0));
    }
    return Outcome{worst <= 1e-4 && k2 <= 1e-5 && perr <= 1e-8,
                   fmt("transform err %.2e <= 1e-4, |Khat(2) + 2 tanh 1| %.1e <= 1e-5, |int P - 1| %.1e <= 1e-8", worst, k2, perr)};
  });

  criterion(9, "Peierls-Nabarro check (gamma 10)", [] {
    const Trace bv = sample_trace(-20.0, 20.0, 4001, [](double x) { return boundary_vortex(x, 10.0); });
    auto sup = [](const Trace& r) {
      double m = 0.0;
      for (double v : r.values) m = std::max(m, std::abs(v));
      return m;
    };
    const double pl = sup(residual_eq11(bv, 10.0, KernelKind::power_law));
    const double ex = sup(residual_eq11(bv, 10.0, KernelKind::exact));
    return Outcome{pl <= 1e-2 && ex <= 5e-2, fmt("power-law residual %.3e <= 1e-2, true-K residual %.3e <= 5e-2", pl, ex)};
  });

  criterion(10, "additivity and monotone infimum (h 0)", [] {
    const std::vector<double> Ms{10.0, 20.0, 40.0};
    const InfimumTable t1 = infimum_estimate({1.0, 0.0, 1}, Ms, 0.05, 21, tight());
    const InfimumTable t2 = infimum_estimate({1.0, 0.0, 2}, Ms, 0.05, 21, tight());
    const double ratio = t2.rows.back().energy / (2.0 * t1.rows.back().energy);
    const bool ok = std::abs(ratio - 1.0) <= 0.05 && t1.non_increasing && t2.non_increasing;
    return Outcome{ok, fmt("E_k2(40) / 2 E_k1(40) = %.6f (within 5%%), k=1 column %.8f %.8f %.8f, k=2 column %.8f %.8f %.8f, non-increasing %d/%d",
                           ratio, t1.rows[0].energy, t1.rows[1].energy, t1.rows[2].energy, t2.rows[0].energy,
                           t2.rows[1].energy, t2.rows[2].energy, t1.non_increasing, t2.non_increasing)};
  });

  criterion(11, "nonlocal-term limit trend", [] {
    const StripGrid g = build_grid(5.0, 201, 21);
    const ScalarField th = compact_wall(g);
    const double target = 2.0 * boundary_m2_integral(th);
    std::vector<double> errs;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      MicroParams p;
      p.eps = eps;
      errs.push_back(std::abs(StripNonlocal(g, p).evaluate(th) / std::abs(std::log(eps)) - target));
    }
    const bool trend = errs[0] > errs[1] && errs[1] > errs[2];
    UniformCharge c;
    c.x0 = c.y0 = -4.0;
    c.nx = c.ny = 41;
    c.hx = c.hy = 0.2;
    for (int j = 0; j < 41; ++j)
      for (int i = 0; i < 41; ++i) c.values.push_back(std::exp(-std::pow(-4.0 + 0.2 * i, 2) - std::pow(-4.0 + 0.2 * j, 2)));
    const double fft = nonlocal_energy(c, 4.0), direct = nonlocal_energy_direct(c);
    const double rel = std::abs(fft - direct) / direct;
    return Outcome{trend && rel <= 1e-2, fmt("errors vs 2B = %.4f: %.4f > %.4f > %.4f; Gaussian FFT vs brute force rel %.2e <= 1e-2",
                                             target, errs[0], errs[1], errs[2], rel)};
  });

  criterion(12, "Gamma-trend of E_eps minimizers", [] {
    const auto t0 = std::chrono::steady_clock::now();
    SolveOptions o;
    o.grad_tol = 1e-7;
    const TrendTable t = gamma_trend_experiment({1.0, 0.0, 1}, {1e-1, 1e-2, 1e-3}, build_grid(10.0, 201, 21), o);
    bool ok = true;
    std::string out = fmt("E_0 %.6f; ", t.energy_0);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      out += fmt("eps %g: E %.6f gap %.4f H1 %.4f; ", r.eps, r.energy_eps, r.energy_gap, r.h1_distance);
      if (i > 0) {
        ok = ok && std::abs(r.energy_gap) < std::abs(t.rows[i - 1].energy_gap);
        ok = ok && r.h1_distance <= t.rows[i - 1].h1_distance;
      }
    }
    const double s = seconds_since(t0);
    ok = ok && s < 900.0;
    return Outcome{ok, out + fmt("%.1f s < 900 s", s)};
  });

  criterion(13, "winding wall at h 0.5, k 2", [] {
    const StripGrid g = build_grid(20.0, 801, 21);
    SolveOptions o;
    o.init = InitKind::tanh_profile;
    const SolveReport r = minimize_wall(g, {1.0, 0.5, 2}, o);
    const SolveReport r0 = minimize_wall(g, {1.0, 0.0, 2}, o);
    const auto& p = r.properties;
    const bool ok = r.converged && p.monotone.ok && p.symmetry.y_mirror_err <= 1e-6 && p.symmetry.x_point_err <= 1e-6 &&
                    r.energy.total > r0.energy.total;
    return Outcome{ok, fmt("converged %d (grad %.1e), monotone %d, sym %.1e/%.1e, E %.6f > E(h=0) %.6f", r.converged,
                           r.grad_inf, p.monotone.ok, p.symmetry.y_mirror_err, p.symmetry.x_point_err, r.energy.total,
                           r0.energy.total)};
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
