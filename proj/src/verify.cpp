#include <stripwall/verify.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <stripwall/analytic.hpp>
#include <stripwall/energy.hpp>
#include <stripwall/grid.hpp>
#include <stripwall/io.hpp>
#include <stripwall/micro.hpp>
#include <stripwall/minimize.hpp>
#include <stripwall/nonlocal1d.hpp>

namespace stripwall {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<std::string> VerifyReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.name);
  return out;
}

namespace {

constexpr double pi = std::numbers::pi;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// smooth random field: a few random Fourier modes on top of a ramp, plus
// nodal noise
ScalarField random_field(const StripGrid& g, Rng& rng, double noise) {
  double a[4], b[4], c[4];
  for (int m = 0; m < 4; ++m) {
    a[m] = uniform(rng, -1.0, 1.0);
    b[m] = uniform(rng, 0.2, 2.0);
    c[m] = uniform(rng, 0.0, 2.0 * pi);
  }
  ScalarField f = sample_field(g, [&](double x, double y) {
    double v = 0.5 * pi * (1.0 - std::tanh(x));
    for (int m = 0; m < 4; ++m) v += a[m] * std::sin(b[m] * x + (m + 1) * y + c[m]);
    return v;
  });
  for (double& v : f.values) v += noise * uniform(rng, -1.0, 1.0);
  return f;
}

WallParams random_params(Rng& rng) {
  WallParams p;
  p.gamma = uniform(rng, 0.25, 4.0);
  p.h = uniform(rng, 0.0, 1.0);
  p.k = 1;
  return p;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ScalarField reflect_x(const ScalarField& f) {
  ScalarField out(f.grid);
  const int nx = f.grid.nx;
  for (int j = 0; j < f.grid.ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = f(nx - 1 - i, j);
  return out;
}

class Suite {
 public:
  explicit Suite(const VerifyOptions& o) : opts_(o), rng_(o.seed) {}

  void run(const std::string& name, double tolerance, const std::function<double(std::string&)>& body,
           bool upper = true) {
    CheckResult r;
    r.name = name;
    r.tolerance = tolerance;
    r.at_least = !upper;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.value = body(r.detail);
      r.passed = std::isfinite(r.value) && (upper ? r.value <= tolerance : r.value >= tolerance);
    } catch (const std::exception& e) {
      r.passed = false;
      r.value = std::numeric_limits<double>::quiet_NaN();
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_.checks.push_back(std::move(r));
  }

  // gradient the suite tests against finite differences; the fault flips
  // the sign of the boundary-penalty part
  ScalarField gradient_under_test(const ScalarField& f, const WallParams& p) const {
    ScalarField g = grad_F(f, p);
    if (opts_.inject_boundary_sign_fault) {
      const ScalarField b = grad_boundary_term(f, p);
      for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] -= 2.0 * b.values[i];
    }
    return g;
  }

  VerifyReport finish() { return std::move(report_); }

  void grid_checks();
  void energy_checks();
  void minimize_checks();
  void analytic_checks();
  void nonlocal1d_checks();
  void micro_checks();
  void cli_checks();

 private:
  const VerifyOptions& opts_;
  Rng rng_;
  VerifyReport report_;
};

void Suite::grid_checks() {
  run("grid.recenter_trace_commutes", 1e-12, [&](std::string& detail) {
    const StripGrid g = build_grid(8.0, opts_.fast ? 81 : 161, 11);
    const double off = uniform(rng_, -1.5, 1.5);
    const ScalarField f = sample_field(g, [&](double x, double y) {
      return 2.0 * std::atan(std::exp(-(x - off) * (1.0 + 0.3 * y * (1.0 - y))));
    });
    const Recentered r = recenter_with_shift(f, 1);
    const Trace direct = extract_trace(r.field, Side::bottom);
    const Trace shifted = shift_trace(extract_trace(f, Side::bottom), r.shift);
    detail = "shift " + format17(r.shift);
    return sup_diff(direct.values, shifted.values);
  });

  run("grid.x_average_affine_exact", 1e-14, [&](std::string&) {
    const StripGrid g = build_grid(3.0, 7, opts_.fast ? 9 : 17);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double a = uniform(rng_, -5.0, 5.0), b = uniform(rng_, -5.0, 5.0);
      const ScalarField f = sample_field(g, [&](double, double y) { return a + b * y; });
      const double exact = a + 0.5 * b;
      for (int i = 0; i < g.nx; ++i)
        worst = std::max(worst, std::abs(x_average(f, i) - exact) / std::max(1.0, std::abs(exact)));
    }
    return worst;
  });
}

void Suite::energy_checks() {
  run("energy.gradient_consistency", 1e-6, [&](std::string& detail) {
    const int n = 33;
    const int fields = 10;
    const StripGrid g = build_grid(1.0, n, n);
    double worst = 0.0;
    for (int s = 0; s < fields; ++s) {
      const WallParams p = random_params(rng_);
      ScalarField f = random_field(g, rng_, 0.3);
      const ScalarField an = gradient_under_test(f, p);
      double gmax = 0.0;
      for (double v : an.values) gmax = std::max(gmax, std::abs(v));
      const double t = 1e-5;
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        const double v0 = f.values[i];
        f.values[i] = v0 + t;
        const double ep = energy_and_grad(g, p, f.values, {});
        f.values[i] = v0 - t;
        const double em = energy_and_grad(g, p, f.values, {});
        f.values[i] = v0;
        const double fd = (ep - em) / (2.0 * t);
        worst = std::max(worst, std::abs(fd - an.values[i]) / std::max(std::abs(an.values[i]), 1e-3 * gmax));
      }
    }
    detail = std::to_string(fields) + " fields, " + std::to_string(n) + "x" + std::to_string(n) + " nodes";
    return worst;
  });

  run("energy.directional_derivative_order", 1.8, [&](std::string& detail) {
    const StripGrid g = build_grid(2.0, 41, 21);
    double worst_order = 1e300;
    for (int s = 0; s < 5; ++s) {
      const WallParams p = random_params(rng_);
      const ScalarField f = random_field(g, rng_, 0.0);
      const ScalarField an = gradient_under_test(f, p);
      std::vector<double> d(g.size());
      for (double& v : d) v = uniform(rng_, -1.0, 1.0);
      double slope = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) slope += an.values[i] * d[i];
      auto fd = [&](double t) {
        std::vector<double> a(f.values), b(f.values);
        for (std::size_t i = 0; i < d.size(); ++i) {
          a[i] += t * d[i];
          b[i] -= t * d[i];
        }
        return (energy_and_grad(g, p, a, {}) - energy_and_grad(g, p, b, {})) / (2.0 * t);
      };
      const double e1 = std::abs(fd(0.1) - slope), e2 = std::abs(fd(0.05) - slope);
      const double order = std::log2(e1 / std::max(e2, 1e-300));
      worst_order = std::min(worst_order, order);
      if (s == 0) detail = "err(t=0.1) " + format17(e1) + ", err(t=0.05) " + format17(e2);
    }
    return worst_order;
  }, false);

  run("energy.flip_symmetry", 1e-13, [&](std::string&) {
    const StripGrid g = build_grid(4.0, 41, 11);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      WallParams p = random_params(rng_);
      p.k = 1 + s % 2;
      if (p.k % 2 != 0) p.h = 0.0;  // 1 - cos(k pi - theta) = 1 - cos(theta) needs k even
      const ScalarField f = random_field(g, rng_, 0.1);
      const double e = energy_F(f, p).total;
      ScalarField neg(f);
      for (double& v : neg.values) v = -v;
      ScalarField flip = reflect_x(f);
      for (double& v : flip.values) v = p.k * pi - v;
      worst = std::max(worst, std::abs(energy_F(neg, p).total - e) / e);
      worst = std::max(worst, std::abs(energy_F(flip, p).total - e) / e);
    }
    return worst;
  });

  run("energy.parts_nonnegative", 0.0, [&](std::string&) {
    const StripGrid g = build_grid(3.0, 25, 9);
    double most_negative = 0.0;
    for (int s = 0; s < 20; ++s) {
      WallParams p = random_params(rng_);
      ScalarField f = random_field(g, rng_, 2.0);
      for (double& v : f.values) v *= uniform(rng_, -3.0, 3.0);
      const EnergyBreakdown e = energy_F(f, p);
      for (double v : {e.dirichlet, e.zeeman, e.boundary, e.nonlocal, e.total}) most_negative = std::max(most_negative, -v);
    }
    return most_negative;
  });

  run("energy.el_residual_refines", 1.0, [&](std::string& detail) {
    const double M = opts_.fast ? 5.0 : 6.0;
    const WallParams p{1.0, 0.0, 1};
    SolveOptions o;
    o.grad_tol = 1e-9;
    o.init = InitKind::tanh_profile;
    double sup[2];
    for (int level = 0; level < 2; ++level) {
      const int ny = level == 0 ? 11 : 21;
      const int nx = static_cast<int>(std::lround(2.0 * M * (ny - 1))) + 1;
      const SolveReport r = minimize_wall(build_grid(M, nx, ny), p, o);
      const ElResidual res = el_residual(r.field, p);
      sup[level] = std::max({res.sup_bottom, res.sup_top, interior_residual_sup(res, -M + 1.0, M - 1.0, 0.0, 1.0)});
    }
    detail = "coarse " + format17(sup[0]) + ", fine " + format17(sup[1]);
    return sup[1] / sup[0];  // must shrink
  });
}

void Suite::minimize_checks() {
  const double M = opts_.fast ? 6.0 : 10.0;
  const StripGrid g = build_grid(M, opts_.fast ? 121 : 201, 11);

  run("minimize.energy_monotone", 0.0, [&](std::string& detail) {
    SolveOptions o;
    o.init = InitKind::linear_ramp;
    const SolveReport r = minimize_wall(g, {1.0, 0.3, 2}, o);
    double worst = 0.0;
    for (std::size_t i = 1; i < r.energy_history.size(); ++i)
      worst = std::max(worst, r.energy_history[i] - r.energy_history[i - 1]);
    detail = std::to_string(r.energy_history.size() - 1) + " accepted steps";
    return worst;
  });

  run("minimize.clamp_safety", 0.0, [&](std::string& detail) {
    double worst = 0.0;
    int evals = 0;
    for (int k : {1, 2, -1}) {
      const WallParams p{1.0, 0.5, k};
      const double lo = std::min(0.0, k * pi), hi = std::max(0.0, k * pi);
      Objective obj = [&](std::span<const double> x, std::span<double> grad) {
        ++evals;
        for (double v : x) worst = std::max({worst, lo - v, v - hi});
        return energy_and_grad(g, p, x, grad);
      };
      SolveOptions o;
      o.max_iters = 400;
      minimize_strip(g, p, o, obj);
    }
    detail = std::to_string(evals) + " evaluated iterates";
    return worst;
  });

  run("minimize.uniqueness_up_to_translation", 1e-6, [&](std::string&) {
    SolveOptions o;
    o.grad_tol = 1e-9;
    const WallParams p{1.0, 0.0, 1};
    o.init = InitKind::linear_ramp;
    const ScalarField a = recenter(minimize_wall(g, p, o).field, p);
    o.init = InitKind::tanh_profile;
    const ScalarField b = recenter(minimize_wall(g, p, o).field, p);
    return sup_diff(a.values, b.values);
  });

  run("minimize.flip_covariance", 0.0, [&](std::string&) {
    SolveOptions o;
    const SolveReport a = minimize_wall(g, {1.0, 0.2, 1}, o);
    const SolveReport b = minimize_wall(g, {1.0, 0.2, -1}, o);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.field.values.size(); ++i)
      worst = std::max(worst, std::abs(a.field.values[i] + b.field.values[i]));
    return worst;
  });
}

void Suite::analytic_checks() {
  run("analytic.Keps_fourier_pair", 1e-4, [&](std::string& detail) {
    const double eps = 0.1, L = 20.0, dx = 1e-3;
    const int n = static_cast<int>(std::lround(L / dx));
    std::vector<double> k(n + 1);
    for (int i = 0; i <= n; ++i) k[i] = kernel_K_eps(i * dx, eps);
    double worst = 0.0;
    for (double q = 0.0; q <= 10.0 + 1e-12; q += 0.25) {
      // even kernel: transform is the cosine sum, trapezoid on [-L, L]
      double s = 0.5 * k[0];
      for (int i = 1; i <= n; ++i) s += (i == n ? 0.5 : 1.0) * k[i] * std::cos(q * i * dx);
      worst = std::max(worst, std::abs(2.0 * dx * s - symbol_Khat_eps(q, eps)));
    }
    detail = "eps 0.1, window [-20, 20], spacing 1e-3, k in [0, 10]";
    return worst;
  });

  run("analytic.large_gamma_harmonic", 1.8, [&](std::string& detail) {
    auto sup_laplacian = [](double h) {
      double m = 0.0;
      for (double x = 0.5; x <= 2.0 + 1e-12; x += h)
        for (double y = 0.2; y <= 0.8 + 1e-12; y += h) {
          const double lap = (large_gamma_2d(x + h, y) + large_gamma_2d(x - h, y) + large_gamma_2d(x, y + h) +
                              large_gamma_2d(x, y - h) - 4.0 * large_gamma_2d(x, y)) /
                             (h * h);
          m = std::max(m, std::abs(lap));
        }
      return m;
    };
    const double a = sup_laplacian(0.02), b = sup_laplacian(0.01);
    detail = "sup 5-point Laplacian " + format17(a) + " (h=0.02), " + format17(b) + " (h=0.01)";
    if (b > 1e-2) return 0.0;
    return std::log2(a / b);
  }, false);

  run("analytic.peierls_nabarro_power_law", 1e-2, [&](std::string& detail) {
    const double gamma = 10.0, L = 20.0, h = 0.01;
    const Trace bv = sample_trace(-L, L, static_cast<std::size_t>(std::lround(2.0 * L / h)) + 1,
                                  [&](double x) { return boundary_vortex(x, gamma); });
    const Trace r = residual_eq11(bv, gamma, KernelKind::power_law);
    double m = 0.0;
    for (double v : r.values) m = std::max(m, std::abs(v));
    detail = "gamma 10, window [-20, 20], spacing 1e-2";
    return m;
  });
}

void Suite::nonlocal1d_checks() {
  const double L = 20.0;
  const double h = opts_.fast ? 0.05 : 0.02;
  const std::size_t n = static_cast<std::size_t>(std::lround(2.0 * L / h)) + 1;
  auto step = [](double x) { return 0.5 * pi * (1.0 - std::tanh(x)); };

  run("nonlocal1d.energy_nonnegative_zero_at_multiples", 0.0, [&](std::string& detail) {
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const double a = uniform(rng_, -1.0, 1.0), w = uniform(rng_, 0.5, 3.0);
      const int kl = static_cast<int>(std::lround(uniform(rng_, -2.0, 2.0)));
      const Trace t = sample_trace(-L, L, n, [&](double x) {
        const double bump = a * std::exp(-x * x) * std::sin(w * x);
        return kl * pi * 0.5 * (1.0 - std::tanh(x)) + bump;
      });
      const double e = energy_Fbar(t, uniform(rng_, 0.0, 5.0)).total;
      worst = std::max(worst, -e);
    }
    double zero = 0.0;
    for (int kc = -2; kc <= 2; ++kc) {
      const Trace c = sample_trace(-L, L, n, [&](double) { return kc * pi; });
      zero = std::max(zero, std::abs(energy_Fbar(c, 1.0).total));
    }
    const Trace off = sample_trace(-L, L, n, [](double) { return 1.0; });
    const double positive = energy_Fbar(off, 1.0).total;
    detail = "max |F| at k pi " + format17(zero) + ", F at theta = 1: " + format17(positive);
    if (zero > 1e-20 || !(positive > 0.0)) return 1.0;
    return worst;
  });

  run("nonlocal1d.residual_is_gradient", 1e-4, [&](std::string& detail) {
    double worst = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double gamma = uniform(rng_, 0.1, 5.0);
      const Trace t = sample_trace(-L, L, n, [&](double x) { return step(x) + 0.3 * std::exp(-x * x) * std::sin(3.0 * x); });
      const Trace r = residual_eq11(t, gamma);
      std::vector<double> d(n, 0.0);
      for (std::size_t i = 2; i + 2 < n; ++i) d[i] = uniform(rng_, -1.0, 1.0) * std::exp(-0.05 * t.x(i) * t.x(i));
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) slope += r.values[i] * t.spacing * d[i];
      const double tt = 1e-4;
      Trace a(t), b(t);
      for (std::size_t i = 0; i < n; ++i) {
        a.values[i] += tt * d[i];
        b.values[i] -= tt * d[i];
      }
      const double fd = (energy_Fbar(a, gamma).total - energy_Fbar(b, gamma).total) / (2.0 * tt);
      worst = std::max(worst, std::abs(fd - slope) / std::abs(fd));
      if (s == 0) detail = "fd " + format17(fd) + ", residual pairing " + format17(slope);
    }
    return worst;
  });

  run("nonlocal1d.relax_monotone", 0.0, [&](std::string& detail) {
    const Trace init = sample_trace(-L, L, static_cast<std::size_t>(std::lround(2.0 * L / 0.1)) + 1,
                                    [&](double x) { return step(0.5 * x); });
    SolveOptions o;
    o.max_iters = 2000;
    const RelaxReport r = relax_Fbar(init, 1.0, o);
    double worst = 0.0;
    for (std::size_t i = 1; i < r.energy_history.size(); ++i)
      worst = std::max(worst, r.energy_history[i] - r.energy_history[i - 1]);
    detail = std::to_string(r.iterations) + " steps, " + r.stop_reason;
    return worst;
  });

  run("nonlocal1d.trace_recovery", 1e-6, [&](std::string&) {
    const Trace t = sample_trace(-L, L, static_cast<std::size_t>(std::lround(2.0 * L / 0.01)) + 1,
                                 [&](double x) { return step(x) + 0.2 * std::exp(-x * x); });
    const StripGrid g = build_grid(10.0, opts_.fast ? 201 : 401, 11);
    const Trace bottom = extract_trace(poisson_extend(t, g), Side::bottom);
    double worst = 0.0;
    for (std::size_t i = 0; i < bottom.size(); ++i) {
      const auto idx = static_cast<std::size_t>(std::lround((bottom.x(i) - t.x0) / t.spacing));
      worst = std::max(worst, std::abs(bottom.values[i] - t.values[idx]));
    }
    return worst;
  });
}

void Suite::micro_checks() {
  run("micro.nonlocal_psd_symmetric", 1e-12, [&](std::string& detail) {
    double worst_sym = 0.0, most_negative = 0.0;
    for (int s = 0; s < 5; ++s) {
      auto charge = [&] {
        UniformCharge c;
        c.nx = 24;
        c.ny = 16;
        c.hx = 0.1;
        c.hy = 0.1;
        c.values.resize(static_cast<std::size_t>(c.nx) * c.ny);
        for (double& v : c.values) v = uniform(rng_, -1.0, 1.0);
        return c;
      };
      const UniformCharge f = charge(), g = charge();
      const double nf = nonlocal_energy(f, 4.0), ng = nonlocal_energy(g, 4.0);
      const double fg = nonlocal_bilinear(f, g, 4.0), gf = nonlocal_bilinear(g, f, 4.0);
      most_negative = std::max({most_negative, -nf, -ng});
      worst_sym = std::max(worst_sym, std::abs(fg - gf) / std::sqrt(nf * ng));
    }
    // strip evaluator on a wall field
    const StripGrid g = build_grid(5.0, 101, 21);
    const ScalarField th = sample_field(g, [](double x, double y) { return 0.5 * pi * (1.0 - std::tanh(x * (1.0 + 0.5 * y))); });
    MicroParams mp;
    mp.eps = 0.05;
    const double ns = StripNonlocal(g, mp).evaluate(th);
    most_negative = std::max(most_negative, -ns);
    detail = "min value " + format17(-most_negative) + ", polarization asymmetry " + format17(worst_sym);
    if (most_negative > 0.0) return 1.0;
    return worst_sym;
  });

  run("micro.lower_bound_calibrated", 0.0, [&](std::string& detail) {
    // smallest C with N/|ln e| >= 2(1-b) B - C/(b |ln e|) (|grad m|^2 + |m2|^2)
    const StripGrid g = build_grid(6.0, opts_.fast ? 121 : 241, 21);
    std::vector<ScalarField> fields;
    for (double w : {0.5, 1.0, 2.0})
      fields.push_back(sample_field(g, [&](double x, double) {
        if (x <= -4.0) return pi;
        if (x >= 4.0) return 0.0;
        return 0.5 * pi * (1.0 - std::tanh(x / w) / std::tanh(4.0 / w));
      }));
    fields.push_back(sample_field(g, [](double x, double y) {
      if (x <= -3.0) return pi;
      if (x >= 3.0) return 0.0;
      return 0.5 * pi * (1.0 - std::sin(pi * x / 6.0)) * (1.0 - 0.2 * y * (1.0 - y) * std::cos(pi * x / 6.0));
    }));
    double C = 0.0, min_ratio = 1e300;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      MicroParams mp;
      mp.eps = eps;
      const StripNonlocal nl(g, mp);
      const double le = std::abs(std::log(eps));
      for (const auto& f : fields) {
        const double N = nl.evaluate(f);
        const double B = boundary_m2_integral(f);
        double m2 = 0.0;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 0; i < g.nx; ++i) {
            const double s = std::sin(f(i, j));
            m2 += g.wx(i) * g.wy(j) * g.hx * g.hy * s * s;
          }
        const double norm = 2.0 * exchange_energy_m(f) + m2;
        min_ratio = std::min(min_ratio, N / le / (2.0 * B));
        for (double beta : {0.1, 0.25, 0.5, 0.75, 0.9})
          C = std::max(C, beta * le * (2.0 * (1.0 - beta) * B - N / le) / norm);
      }
    }
    report_.calibrated_C = C;
    detail = "calibrated C " + format17(C) + " over 4 fields, eps in {1e-1, 1e-2, 1e-3}, 5 betas; min N/(2B|ln eps|) " +
             format17(min_ratio);
    return std::isfinite(C) ? 0.0 : 1.0;
  });

  run("micro.exchange_identity", 1e-10, [&](std::string&) {
    const StripGrid g = build_grid(3.0, 61, 21);
    double worst = 0.0;
    for (int s = 0; s < 5; ++s) {
      const ScalarField f = random_field(g, rng_, 0.2);
      const double a = exchange_energy_m(f), b = dirichlet_energy(g, f.values);
      worst = std::max(worst, std::abs(a - b) / b);
    }
    return worst;
  });
}

void Suite::cli_checks() {
  run("cli.csv_round_trip", 0.0, [&](std::string& detail) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("stripwall_verify_" + std::to_string(opts_.seed) + "_" +
                      std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    std::filesystem::create_directories(dir);
    double mismatches = 0.0;
    try {
      const StripGrid g = build_grid(2.5, 21, 7);
      const ScalarField f = random_field(g, rng_, 1e-3);
      write_field(dir / "field.csv", f);
      const ScalarField back = read_field(dir / "field.csv");
      if (!(back.grid == f.grid)) mismatches += 1.0;
      for (std::size_t i = 0; i < f.values.size(); ++i)
        if (back.values[i] != f.values[i]) mismatches += 1.0;
      const Trace t = sample_trace(-3.0, 3.0, 31, [&](double x) { return std::atan(x) + uniform(rng_, 0.0, 1e-9); });
      write_trace(dir / "trace.csv", t);
      const Trace tb = read_trace(dir / "trace.csv");
      if (tb.size() != t.size() || tb.x0 != t.x0 || tb.spacing != t.spacing) mismatches += 1.0;
      for (std::size_t i = 0; i < std::min(t.size(), tb.size()); ++i)
        if (tb.values[i] != t.values[i]) mismatches += 1.0;
    } catch (...) {
      std::filesystem::remove_all(dir);
      throw;
    }
    std::filesystem::remove_all(dir);
    detail = "field and trace files, bitwise";
    return mismatches;
  });
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& opts) {
  Suite s(opts);
  s.grid_checks();
  s.energy_checks();
  s.minimize_checks();
  s.analytic_checks();
  s.nonlocal1d_checks();
  s.micro_checks();
  s.cli_checks();
  return s.finish();
}

nlohmann::json to_json(const VerifyReport& report, const VerifyOptions& opts) {
  nlohmann::json j;
  j["passed"] = report.all_passed();
  j["fast"] = opts.fast;
  j["seed"] = opts.seed;
  j["fault_injection"] = opts.inject_boundary_sign_fault ? "boundary-sign" : "none";
  j["calibrated_C"] = report.calibrated_C;
  j["failures"] = report.failures();
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["passed"] = c.passed;
    if (std::isfinite(c.value))
      e["value"] = c.value;
    else
      e["value"] = nullptr;
    e["tolerance"] = c.tolerance;
    e["comparison"] = c.at_least ? ">=" : "<=";
    e["detail"] = c.detail;
    e["seconds"] = c.seconds;
    checks.push_back(std::move(e));
  }
  j["checks"] = std::move(checks);
  return j;
}

void write_verify_json(const std::filesystem::path& path, const VerifyReport& report, const VerifyOptions& opts) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(report, opts).dump(2) << '\n';
}

}  // namespace stripwall
