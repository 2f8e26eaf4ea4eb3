#include <stripwall/minimize.hpp>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace stripwall {

namespace {

constexpr double pi = std::numbers::pi;

void validate_params(const WallParams& p) {
  if (p.k == 0) throw std::invalid_argument("winding class k = 0 has no wall");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(p.h >= 0.0)) throw std::invalid_argument("h must be non-negative");
}

// Diagonal of the strip metric below, full field layout (caps get 1).
std::vector<double> strip_metric_diagonal(const StripGrid& g, const WallParams& p) {
  std::vector<double> d(g.size(), 1.0);
  for (int j = 0; j < g.ny; ++j) {
    const double cx = g.wy(j) * g.hy / g.hx;
    for (int i = 1; i <= g.nx - 2; ++i) {
      const double wxi = g.wx(i);
      const double cy = wxi * g.hx / g.hy;
      double diag = 2.0 * cx;
      if (j > 0) diag += cy;
      if (j + 1 < g.ny) diag += cy;
      diag += p.h * wxi * g.wy(j) * g.hx * g.hy;
      if (j == 0 || j == g.ny - 1) diag += 2.0 * p.gamma * wxi * g.hx;
      d[g.index(i, j)] = diag;
    }
  }
  return d;
}

struct StripMetric {
  int nx = 0, ny = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

}  // namespace

void validate(const SolveOptions& opts) {
  if (opts.max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  if (!(opts.grad_tol > 0.0) || !(opts.energy_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (opts.recenter_every < 0) throw std::invalid_argument("recenter_every must be >= 0");
  if (opts.init == InitKind::custom && !opts.custom_init)
    throw std::invalid_argument("init = custom requires a field");
}

Preconditioner make_strip_preconditioner(const StripGrid& g, const WallParams& p) {
  const int nfx = g.nx - 2;
  auto col = [nfx](int i, int j) { return j * nfx + (i - 1); };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nfx) * g.ny * 5);
  for (int j = 0; j < g.ny; ++j) {
    const double cx = g.wy(j) * g.hy / g.hx;
    for (int i = 1; i <= g.nx - 2; ++i) {
      const double wxi = g.wx(i);
      const double cy = wxi * g.hx / g.hy;
      double diag = 2.0 * cx;
      if (i - 1 >= 1) trip.emplace_back(col(i, j), col(i - 1, j), -cx);
      if (i + 1 <= g.nx - 2) trip.emplace_back(col(i, j), col(i + 1, j), -cx);
      if (j > 0) {
        diag += cy;
        trip.emplace_back(col(i, j), col(i, j - 1), -cy);
      }
      if (j + 1 < g.ny) {
        diag += cy;
        trip.emplace_back(col(i, j), col(i, j + 1), -cy);
      }
      diag += p.h * wxi * g.wy(j) * g.hx * g.hy;
      if (j == 0 || j == g.ny - 1) diag += 2.0 * p.gamma * wxi * g.hx;
      trip.emplace_back(col(i, j), col(i, j), diag);
    }
  }
  const int n = nfx * g.ny;
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  auto metric = std::make_shared<StripMetric>();
  metric->nx = g.nx;
  metric->ny = g.ny;
  metric->ldlt.compute(A);
  if (metric->ldlt.info() != Eigen::Success) throw std::runtime_error("strip metric factorization failed");

  return [metric, nfx, g](std::span<const double> grad, std::span<double> z) {
    Eigen::VectorXd b(nfx * g.ny);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i <= g.nx - 2; ++i) b[j * nfx + (i - 1)] = grad[g.index(i, j)];
    const Eigen::VectorXd x = metric->ldlt.solve(b);
    for (int j = 0; j < g.ny; ++j) {
      z[g.index(0, j)] = 0.0;
      z[g.index(g.nx - 1, j)] = 0.0;
      for (int i = 1; i <= g.nx - 2; ++i) z[g.index(i, j)] = x[j * nfx + (i - 1)];
    }
  };
}

ScalarField initial_field(const StripGrid& g, const WallParams& p, InitKind kind) {
  const double M = g.half_length;
  const double top = p.k * pi;
  ScalarField f(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      double v = 0.0;
      if (kind == InitKind::tanh_profile) {
        const double a = std::clamp(2.0 * std::sqrt(p.gamma), 0.2, 4.0);
        v = 0.5 * top * (1.0 - std::tanh(a * x));
      } else {
        v = top * std::clamp((M - x) / (2.0 * M), 0.0, 1.0);
      }
      f(i, j) = v;
    }
    f(0, j) = top;
    f(g.nx - 1, j) = 0.0;
  }
  return f;
}

ScalarField prolong(const ScalarField& coarse, const StripGrid& fine) {
  const auto& c = coarse.grid;
  ScalarField out(fine);
  for (int j = 0; j < fine.ny; ++j) {
    const double ty = std::clamp(fine.y(j) / c.hy, 0.0, static_cast<double>(c.ny - 1));
    const int j0 = std::min(static_cast<int>(std::floor(ty)), c.ny - 2);
    const double fy = ty - j0;
    for (int i = 0; i < fine.nx; ++i) {
      const double tx = std::clamp((fine.x(i) - c.x(0)) / c.hx, 0.0, static_cast<double>(c.nx - 1));
      const int i0 = std::min(static_cast<int>(std::floor(tx)), c.nx - 2);
      const double fx = tx - i0;
      out(i, j) = (1 - fx) * (1 - fy) * coarse(i0, j0) + fx * (1 - fy) * coarse(i0 + 1, j0) +
                  (1 - fx) * fy * coarse(i0, j0 + 1) + fx * fy * coarse(i0 + 1, j0 + 1);
    }
  }
  return out;
}

SolveReport minimize_strip(const StripGrid& g, const WallParams& p, const SolveOptions& opts,
                           const Objective& objective) {
  validate_params(p);
  validate(opts);
  SolveReport report;
  if (p.h == 0.0 && g.half_length * std::sqrt(p.gamma) < 5.0)
    report.warnings.push_back("M*sqrt(gamma) < 5: truncation may be too small for the wall width");
  if ((p.h == 0.0 && std::abs(p.k) != 1) || (p.h > 0.0 && std::abs(p.k) != 2))
    report.warnings.push_back("k outside the minimal class: the infimum over A_k is not attained");

  const double lo = std::min(0.0, p.k * pi);
  const double hi = std::max(0.0, p.k * pi);

  ScalarField init = opts.init == InitKind::custom ? *opts.custom_init : initial_field(g, p, opts.init);
  if (!(init.grid == g)) throw std::invalid_argument("custom init lives on a different grid");
  for (int j = 0; j < g.ny; ++j) {
    init(0, j) = p.k * pi;
    init(g.nx - 1, j) = 0.0;
  }

  DescentProblem prob;
  prob.objective = objective;
  if (opts.pin_center) {
    // column-average weights at x = 0 (linear interpolation between columns)
    const double u = (0.0 - g.x(0)) / g.hx;
    const int i0 = std::clamp(static_cast<int>(std::floor(u)), 1, g.nx - 3);
    const double t = u - i0;
    prob.constraint.assign(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j) {
      prob.constraint[g.index(i0, j)] = (1.0 - t) * g.wy(j) * g.hy;
      prob.constraint[g.index(i0 + 1, j)] = t * g.wy(j) * g.hy;
    }
    const double target = 0.5 * p.k * pi;
    auto value = [&](const ScalarField& f) {
      double s = 0.0;
      for (std::size_t n = 0; n < f.values.size(); ++n) s += prob.constraint[n] * f.values[n];
      return s;
    };
    if (std::abs(value(init) - target) > 1e-12) {
      init = shift_x(init, find_center(init, p.k));
      for (int j = 0; j < g.ny; ++j) {
        init(0, j) = p.k * pi;
        init(g.nx - 1, j) = 0.0;
      }
      // remove the interpolation remainder on the pinned columns
      double cc = 0.0;
      for (double c : prob.constraint) cc += c * c;
      const double r = (value(init) - target) / cc;
      for (std::size_t n = 0; n < init.values.size(); ++n) init.values[n] -= r * prob.constraint[n];
    }
  }
  if (opts.precondition) {
    prob.precondition = make_strip_preconditioner(g, p);
    prob.metric_diagonal = strip_metric_diagonal(g, p);
  }
  prob.project = [lo, hi](std::span<double> x) {
    for (double& v : x) v = std::clamp(v, lo, hi);
  };
  prob.held.assign(g.size(), 0);
  for (int j = 0; j < g.ny; ++j) {
    prob.held[g.index(0, j)] = 1;
    prob.held[g.index(g.nx - 1, j)] = 1;
  }

  DescentOptions dopt;
  dopt.max_iters = opts.max_iters;
  dopt.grad_tol = opts.grad_tol;
  dopt.energy_tol = opts.energy_tol;
  dopt.method = opts.method;
  if (opts.recenter_every > 0) {
    dopt.on_iteration = [&, every = opts.recenter_every](int it, std::vector<double>& x) {
      if (it % every != 0) return false;
      ScalarField f(g);
      f.values = x;
      double shift = 0.0;
      try {
        shift = find_center(f, p.k);
      } catch (const std::runtime_error&) {
        return false;
      }
      if (std::abs(shift) < 1e-3 * g.hx) return false;
      ScalarField s = shift_x(f, shift);
      for (int j = 0; j < g.ny; ++j) {
        s(0, j) = p.k * pi;
        s(g.nx - 1, j) = 0.0;
      }
      x = std::move(s.values);
      return true;
    };
  }

  DescentResult res = descend(prob, std::move(init.values), dopt);
  report.field = ScalarField(g);
  report.field.values = std::move(res.x);
  report.iterations = res.iterations;
  report.converged = res.converged;
  report.grad_inf = res.grad_inf;
  report.stop_reason = to_string(res.stop);
  report.energy_history = std::move(res.energy_history);
  report.properties = property_report(report.field, p.k);
  return report;
}

SolveReport minimize_wall(const StripGrid& g, const WallParams& p, const SolveOptions& opts) {
  SolveReport report = minimize_strip(g, p, opts, [&](std::span<const double> x, std::span<double> grad) {
    return energy_and_grad(g, p, x, grad);
  });
  report.energy = energy_F(report.field, p);
  return report;
}

SolveReport minimize_wall_two_level(const StripGrid& g, const WallParams& p, const SolveOptions& opts) {
  if (g.nx % 2 == 0 || g.ny % 2 == 0)
    throw std::invalid_argument("two-level continuation needs odd node counts");
  const StripGrid coarse = build_grid(g.half_length, (g.nx + 1) / 2, std::max(3, (g.ny + 1) / 2));
  SolveOptions copt = opts;
  SolveReport c = minimize_wall(coarse, p, copt);
  SolveOptions fopt = opts;
  fopt.init = InitKind::custom;
  fopt.custom_init = prolong(c.field, g);
  SolveReport f = minimize_wall(g, p, fopt);
  f.iterations += c.iterations;
  return f;
}

MonotoneReport check_monotone(const ScalarField& field, int sign) {
  constexpr double tol = 1e-12;
  const auto& g = field.grid;
  const double s = sign < 0 ? -1.0 : 1.0;
  MonotoneReport r;
  r.ok = true;
  r.strict_central = true;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double d = s * (field(i + 1, j) - field(i, j));  // should be >= 0
      if (-d > r.worst_violation) r.worst_violation = -d;
      if (d < -tol) r.ok = false;
      const double xm = 0.5 * (g.x(i) + g.x(i + 1));
      if (std::abs(xm) <= 0.5 * g.half_length && !(d > 0.0)) r.strict_central = false;
    }
  }
  return r;
}

SymmetryReport check_symmetry(const ScalarField& field, int k) {
  const auto& g = field.grid;
  SymmetryReport r;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = field(i, j);
      r.y_mirror_err = std::max(r.y_mirror_err, std::abs(t - field(i, g.ny - 1 - j)));
      r.x_point_err = std::max(r.x_point_err, std::abs(t - (k * pi - field(g.nx - 1 - i, j))));
    }
  }
  return r;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double rms = 0.0;
};

LineFit fit_log(const std::vector<double>& xs, const std::vector<double>& vs) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (vs[i] > 1e-14) {
      lx.push_back(xs[i]);
      ly.push_back(std::log(vs[i]));
    }
  }
  if (lx.size() < 3) throw std::runtime_error("truncation too small: tail has fewer than 3 resolvable samples");
  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (my + f.slope * (lx[i] - mx));
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

DecayReport check_decay(const ScalarField& field, int k) {
  const auto& g = field.grid;
  const double M = g.half_length;
  std::vector<double> xr, vr, xl, vl;
  // the held caps bend the tail into sinh(b (M - |x|)); skip that layer
  const double layer = std::min(1.0, 0.125 * M);
  for (int i = 1; i + 1 < g.nx; ++i) {
    const double x = g.x(i);
    if (std::abs(x) > M - layer + 1e-12) continue;
    if (x >= 0.5 * M - 1e-12) {
      double m = 0.0;
      for (int j = 0; j < g.ny; ++j) m = std::max(m, std::abs(field(i, j)));
      xr.push_back(x);
      vr.push_back(m);
    } else if (x <= -0.5 * M + 1e-12) {
      double m = 0.0;
      for (int j = 0; j < g.ny; ++j) m = std::max(m, std::abs(k * pi - field(i, j)));
      xl.push_back(-x);
      vl.push_back(m);
    }
  }
  auto too_large = [](const std::vector<double>& v) {
    return std::any_of(v.begin(), v.end(), [](double a) { return a >= pi / 4; });
  };
  if (xr.empty() || xl.empty() || too_large(vr) || too_large(vl))
    throw std::runtime_error("truncation too small: tails are not below pi/4 on the outer quarters");
  const LineFit right = fit_log(xr, vr);
  const LineFit left = fit_log(xl, vl);
  DecayReport r;
  r.rate_right = right.slope;
  r.rate_left = left.slope;
  r.fit_residual = std::max(right.rms, left.rms);
  return r;
}

PropertyReport property_report(const ScalarField& field, int k) {
  PropertyReport r;
  r.monotone = check_monotone(field, k > 0 ? -1 : 1);
  r.symmetry = check_symmetry(field, k);
  try {
    r.decay = check_decay(field, k);
  } catch (const std::runtime_error& e) {
    r.decay_error = e.what();
  }
  return r;
}

InfimumTable infimum_estimate(const WallParams& p, std::span<const double> M_list, double hx, int ny,
                              const SolveOptions& opts) {
  std::vector<double> Ms(M_list.begin(), M_list.end());
  std::sort(Ms.begin(), Ms.end());
  InfimumTable table;
  std::optional<ScalarField> prev;
  for (double M : Ms) {
    const double cells = 2.0 * M / hx;
    const int nx = static_cast<int>(std::lround(cells)) + 1;
    if (std::abs(cells - std::round(cells)) > 1e-9)
      throw std::invalid_argument("infimum_estimate: 2M/hx must be an integer for nested grids");
    const StripGrid g = build_grid(M, nx, ny);
    SolveOptions o = opts;
    if (prev) {
      // embed the smaller-M minimizer (constant outside its window)
      ScalarField init(g);
      const int off = (g.nx - prev->grid.nx) / 2;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const int ic = i - off;
          init(i, j) = ic < 0 ? p.k * pi : ic >= prev->grid.nx ? 0.0 : (*prev)(ic, j);
        }
      o.init = InitKind::custom;
      o.custom_init = std::move(init);
    }
    SolveReport r = minimize_wall(g, p, o);
    table.rows.push_back({M, r.energy.total, r.converged});
    prev = std::move(r.field);
  }
  table.non_increasing = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i].energy > table.rows[i - 1].energy + 1e-8) table.non_increasing = false;
  return table;
}

}  // namespace stripwall
