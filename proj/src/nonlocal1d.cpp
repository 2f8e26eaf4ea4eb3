#include <stripwall/nonlocal1d.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <stripwall/analytic.hpp>
#include <stripwall/optimizer.hpp>
#include <stripwall/parallel.hpp>

#include "fft.hpp"

namespace stripwall {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double flat_slope_tol = 1e-2;
constexpr double multiple_tol = 1e-2;

double nearest_multiple(double v) { return pi * std::round(v / pi); }

// sum_{m >= z} 1/m^2 for integer z >= 1000 (trigamma asymptotics)
double inverse_square_tail(double z) {
  const double z2 = z * z;
  return 1.0 / z + 1.0 / (2.0 * z2) + 1.0 / (6.0 * z2 * z) - 1.0 / (30.0 * z2 * z2 * z) +
         1.0 / (42.0 * z2 * z2 * z2 * z);
}

// Lattice weights w[m] = h K(m h), tail sums S[m] = sum_{m' >= m} w[m'] and
// the tail-tail moment sum_{d >= n+1} (d - n) w[d].
struct LatticeKernel {
  std::vector<double> w;  // m = 0..n-1, w[0] unused
  std::vector<double> S;  // m = 0..n+1, S[0] unused
  double tail_tail = std::numeric_limits<double>::quiet_NaN();
};

LatticeKernel build_kernel(int n, double h, KernelKind kind) {
  LatticeKernel k;
  k.w.assign(n, 0.0);
  k.S.assign(n + 2, 0.0);
  if (kind == KernelKind::exact) {
    // K(x) ~ 2 pi exp(-pi x); 40 units past the window it is far below rounding
    const int m_max = n + 1 + static_cast<int>(std::ceil(40.0 / h));
    std::vector<double> all(m_max + 1, 0.0);
    for (int m = 1; m <= m_max; ++m) all[m] = h * kernel_K(m * h);
    double s = 0.0;
    double tt = 0.0;
    std::vector<double> S_all(m_max + 2, 0.0);
    for (int m = m_max; m >= 1; --m) {
      s += all[m];
      S_all[m] = s;
    }
    for (int d = m_max; d >= n + 1; --d) tt += (d - n) * all[d];
    for (int m = 1; m < n; ++m) k.w[m] = all[m];
    for (int m = 1; m <= n + 1; ++m) k.S[m] = S_all[m];
    k.tail_tail = tt;
  } else {
    const double c = 1.0 / (pi * h);
    for (int m = 1; m < n; ++m) k.w[m] = c / (static_cast<double>(m) * m);
    const int N = std::max(n + 2, 1000);
    double s = inverse_square_tail(N);
    for (int m = N - 1; m >= 1; --m) {
      s += 1.0 / (static_cast<double>(m) * m);
      if (m <= n + 1) k.S[m] = c * s;
    }
  }
  return k;
}

struct Evaluation {
  double nonlocal = 0.0;
  double penalty = 0.0;
  std::vector<double> residual;
};

// Residual of Eq. 11 at every sample and (optionally) the energy parts.
Evaluation evaluate(const std::vector<double>& t, double h, double gamma, const TailInfo& tails,
                    const LatticeKernel& k, bool energy) {
  const int n = static_cast<int>(t.size());
  Evaluation ev;
  ev.residual.assign(n, 0.0);
  std::vector<double> e_pair(n, 0.0), e_tail(n, 0.0), e_pen(n, 0.0);
  const double diag = 1.0 / (2.0 * pi * h);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const double ti = t[i];
    double r = 0.0;
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = ti - t[j];
      const double wd = k.w[std::abs(i - j)] * d;
      r += wd;
      e += wd * d;
    }
    const double dl = ti - tails.left;
    const double dr = ti - tails.right;
    r += dr * k.S[n - i] + dl * k.S[i + 1];
    const double prev = i > 0 ? t[i - 1] : tails.left;
    const double next = i + 1 < n ? t[i + 1] : tails.right;
    r += diag * (2.0 * ti - prev - next);
    r += gamma * std::sin(2.0 * ti);
    ev.residual[i] = r;
    if (energy) {
      e_pair[i] = e;
      e_tail[i] = dr * dr * k.S[n - i] + dl * dl * k.S[i + 1];
      const double s = std::sin(ti);
      e_pen[i] = s * s;
    }
  }
  if (energy) {
    std::vector<double> edges(n + 1);
    for (int i = 0; i <= n; ++i) {
      const double a = i > 0 ? t[i - 1] : tails.left;
      const double b = i < n ? t[i] : tails.right;
      edges[i] = (b - a) * (b - a);
    }
    const double jump = tails.right - tails.left;
    ev.nonlocal = 0.25 * h * pairwise_sum(e_pair) + 0.5 * h * pairwise_sum(e_tail) +
                  0.5 * h * jump * jump * k.tail_tail + pairwise_sum(edges) / (4.0 * pi);
    ev.penalty = gamma * h * pairwise_sum(e_pen);
  }
  return ev;
}

void check_trace(const Trace& t) {
  if (t.size() < 3) throw std::invalid_argument("trace needs at least 3 samples");
  if (!(t.spacing > 0.0)) throw std::invalid_argument("trace spacing must be positive");
  for (double v : t.values)
    if (!std::isfinite(v)) throw std::invalid_argument("trace has non-finite samples");
}

}  // namespace

TailInfo check_tails(const Trace& trace) {
  check_trace(trace);
  const std::size_t n = trace.size();
  const double sl = std::abs(trace.values[1] - trace.values[0]) / trace.spacing;
  const double sr = std::abs(trace.values[n - 1] - trace.values[n - 2]) / trace.spacing;
  if (sl > flat_slope_tol || sr > flat_slope_tol)
    throw std::invalid_argument("non-flat tails: end slopes " + std::to_string(sl) + ", " + std::to_string(sr));
  TailInfo info;
  info.left = trace.values.front();
  info.right = trace.values.back();
  info.multiples_of_pi = std::abs(info.left - nearest_multiple(info.left)) <= multiple_tol &&
                         std::abs(info.right - nearest_multiple(info.right)) <= multiple_tol;
  return info;
}

EnergyBreakdown energy_Fbar(const Trace& trace, double gamma, std::vector<std::string>* warnings) {
  std::vector<double> grad;
  EnergyBreakdown parts;
  energy_and_grad_Fbar(trace, gamma, grad, &parts);
  const TailInfo tails = check_tails(trace);
  if (!tails.multiples_of_pi && warnings)
    warnings->push_back("tails are not multiples of pi; penalty counted on the sampled window only");
  return parts;
}

double energy_and_grad_Fbar(const Trace& trace, double gamma, std::vector<double>& grad, EnergyBreakdown* parts) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  const TailInfo tails = check_tails(trace);
  const int n = static_cast<int>(trace.size());
  const double h = trace.spacing;
  const LatticeKernel k = build_kernel(n, h, KernelKind::exact);
  Evaluation ev = evaluate(trace.values, h, gamma, tails, k, true);
  grad.resize(n);
  for (int i = 0; i < n; ++i) grad[i] = h * ev.residual[i];
  EnergyBreakdown e;
  e.nonlocal = ev.nonlocal;
  e.boundary = ev.penalty;
  e.total = e.nonlocal + e.boundary;
  if (parts) *parts = e;
  return e.total;
}

Trace residual_eq11(const Trace& trace, double gamma, KernelKind kernel) {
  const TailInfo tails = check_tails(trace);
  const int n = static_cast<int>(trace.size());
  const LatticeKernel k = build_kernel(n, trace.spacing, kernel);
  Evaluation ev = evaluate(trace.values, trace.spacing, gamma, tails, k, false);
  Trace out;
  out.x0 = trace.x0;
  out.spacing = trace.spacing;
  out.values = std::move(ev.residual);
  return out;
}

namespace {

struct Reference {
  double left = 0.0, right = 0.0, center = 0.0, eps = 0.25;
  bool constant = true;
  double operator()(double x, double y) const {
    if (constant) return left;
    return right + (left - right) * large_gamma_2d_eps(x - center, y, eps) / pi;
  }
};

// Closed-form harmonic wall matching the tails; the step version (eps = 0) is
// used when the trace itself jumps by more than half its total variation in
// a single cell.
Reference make_reference(const Trace& t) {
  Reference ref;
  ref.left = t.values.front();
  ref.right = t.values.back();
  const double jump = ref.left - ref.right;
  if (std::abs(jump) < 1e-14) return ref;
  ref.constant = false;
  std::size_t worst = 0;
  double worst_d = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double d = std::abs(t.values[i + 1] - t.values[i]);
    if (d > worst_d) {
      worst_d = d;
      worst = i;
    }
  }
  if (worst_d >= 0.5 * std::abs(jump)) {
    ref.eps = 0.0;
    ref.center = t.x(worst) + 0.5 * t.spacing;
    return ref;
  }
  const double mid = 0.5 * (ref.left + ref.right);
  ref.center = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double a = t.values[i] - mid, b = t.values[i + 1] - mid;
    if (a == 0.0) {
      ref.center = t.x(i);
      break;
    }
    if ((a < 0.0) != (b < 0.0)) {
      ref.center = t.x(i) + a / (a - b) * t.spacing;
      break;
    }
  }
  return ref;
}

void check_margin(const Trace& trace, const StripGrid& g) {
  const double M = g.half_length;
  if (trace.x0 > -M - 5.0 + 1e-9 * trace.spacing || trace.x_last() < M + 5.0 - 1e-9 * trace.spacing)
    throw std::invalid_argument("poisson_extend: trace window must cover [-M-5, M+5] (insufficient margin)");
}

}  // namespace

ScalarField poisson_extend(const Trace& trace, const StripGrid& g) {
  check_trace(trace);
  check_margin(trace, g);
  const double ratio = g.hx / trace.spacing;
  const int r = static_cast<int>(std::lround(ratio));
  if (r < 1 || std::abs(ratio - r) > 1e-9 * ratio)
    throw std::invalid_argument("poisson_extend: hx must be an integer multiple of the trace spacing");
  const double off = (g.x(0) - trace.x0) / trace.spacing;
  const int off_int = static_cast<int>(std::floor(off + 1e-9));
  const double delta = std::max(0.0, off - off_int);  // fractional shift in samples

  const Reference ref = make_reference(trace);
  const int n = static_cast<int>(trace.size());
  const int N = detail::good_fft_size(2 * n);
  std::vector<double> rho(N, 0.0);
  for (int i = 0; i < n; ++i) rho[i] = trace.values[i] - ref(trace.x(i), 0.0);

  detail::RealFft fft(N);
  const auto spec = fft.forward(rho);
  const double L = N * trace.spacing;
  ScalarField out(g);
  std::vector<std::complex<double>> row(spec.size());
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    for (std::size_t q = 0; q < spec.size(); ++q) {
      const double k = 2.0 * pi * static_cast<double>(q) / L;
      // cosh(k(1/2 - y)) / cosh(k/2), overflow-free
      const double m = std::exp(-k * y) * (1.0 + std::exp(-k * (1.0 - 2.0 * y))) / (1.0 + std::exp(-k));
      std::complex<double> v = spec[q] * (m / N);
      if (delta > 0.0) v *= std::polar(1.0, k * delta * trace.spacing);
      row[q] = v;
    }
    // Nyquist bin must stay real for the shift to be a real operation
    if (N % 2 == 0 && delta > 0.0) row.back() = std::complex<double>(row.back().real(), 0.0);
    const auto vals = fft.inverse(row);
    for (int i = 0; i < g.nx; ++i) out(i, j) = vals[off_int + i * r] + ref(g.x(i), y);
  }
  return out;
}

ScalarField poisson_extend_quadrature(const Trace& trace, const StripGrid& g) {
  check_trace(trace);
  const TailInfo tails{trace.values.front(), trace.values.back(), false};
  const int n = static_cast<int>(trace.size());
  const double hs = trace.spacing;
  const double a = trace.x0 - 0.5 * hs;
  const double b = trace.x_last() + 0.5 * hs;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    if (j == 0 || j == g.ny - 1) {
      for (int i = 0; i < g.nx; ++i) {
        const double s = (g.x(i) - trace.x0) / hs;
        const long idx = std::clamp(std::lround(s), 0L, static_cast<long>(n - 1));
        out(i, j) = trace.values[idx];
      }
      continue;
    }
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i);
      std::vector<double> parts(n + 2);
      parts[n] = tails.left * (1.0 - poisson_P_cdf(x - a, y));
      parts[n + 1] = tails.right * poisson_P_cdf(x - b, y);
      for (int c = 0; c < n; ++c) {
        const double xc = trace.x(c);
        parts[c] = trace.values[c] * (poisson_P_cdf(x - xc + 0.5 * hs, y) - poisson_P_cdf(x - xc - 0.5 * hs, y));
      }
      out(i, j) = pairwise_sum(parts);
    }
  }
  return out;
}

FactorTwo factor_two_check(const Trace& trace, double gamma, const StripGrid& grid) {
  const ScalarField ext = poisson_extend(trace, grid);
  WallParams p;
  p.gamma = gamma;
  p.h = 0.0;
  FactorTwo r;
  r.F_2d = energy_F(ext, p).total;
  r.Fbar = energy_Fbar(trace, gamma).total;
  const double ref = 2.0 * r.Fbar;
  r.rel_err = (r.F_2d == 0.0 && ref == 0.0) ? 0.0 : std::abs(r.F_2d - ref) / std::max(std::abs(ref), 1e-300);
  return r;
}

RelaxReport relax_Fbar(const Trace& init, double gamma, const SolveOptions& opts) {
  validate(opts);
  if (!(gamma > 0.0)) throw std::invalid_argument("relax_Fbar: gamma must be positive");
  check_trace(init);
  const int n = static_cast<int>(init.size());
  const double h = init.spacing;

  const double left = nearest_multiple(init.values.front());
  const double right = nearest_multiple(init.values.back());
  if (std::abs(init.values.front() - left) > 0.1 || std::abs(init.values.back() - right) > 0.1 ||
      std::abs(std::abs(left - right) - pi) > 1e-9)
    throw std::invalid_argument("relax_Fbar: init tails must sit at 0 and pi (one wall)");
  int pin = -1;
  for (int i = 0; i < n; ++i)
    if (std::abs(init.x(i)) <= 1e-9 * h) pin = i;
  if (pin <= 0 || pin >= n - 1) throw std::invalid_argument("relax_Fbar: init needs an interior sample at x = 0");

  std::vector<double> x0 = init.values;
  x0.front() = left;
  x0.back() = right;
  x0[pin] = 0.5 * (left + right);
  const double lo = std::min(left, right), hi = std::max(left, right);

  const TailInfo tails{left, right, true};
  const LatticeKernel k = build_kernel(n, h, KernelKind::exact);

  // circulant model of the Hessian on a padded periodic lattice
  const int N = detail::good_fft_size(2 * n);
  std::vector<double> stencil(N, 0.0);
  const double diag = 1.0 / (2.0 * pi * h);
  double center = 2.0 * gamma + 2.0 * diag;
  for (int m = 1; m < n; ++m) {
    stencil[m] -= k.w[m];
    stencil[N - m] -= k.w[m];
    center += 2.0 * k.w[m];
  }
  stencil[1] -= diag;
  stencil[N - 1] -= diag;
  stencil[0] = center;
  auto fft = std::make_shared<detail::RealFft>(N);
  auto symbol = std::make_shared<std::vector<double>>();
  {
    const auto s = fft->forward(stencil);
    symbol->resize(s.size());
    for (std::size_t q = 0; q < s.size(); ++q) (*symbol)[q] = std::max(s[q].real(), 2.0 * gamma) * h;
  }

  DescentProblem prob;
  prob.objective = [&](std::span<const double> x, std::span<double> grad) {
    std::vector<double> t(x.begin(), x.end());
    Evaluation ev = evaluate(t, h, gamma, tails, k, true);
    for (int i = 0; i < n; ++i) grad[i] = h * ev.residual[i];
    return ev.nonlocal + ev.penalty;
  };
  prob.precondition = [fft, symbol, n, N](std::span<const double> g, std::span<double> z) {
    std::vector<double> buf(N, 0.0);
    std::copy(g.begin(), g.end(), buf.begin());
    auto s = fft->forward(buf);
    for (std::size_t q = 0; q < s.size(); ++q) s[q] /= (*symbol)[q] * N;
    const auto v = fft->inverse(s);
    std::copy(v.begin(), v.begin() + n, z.begin());
  };
  prob.project = [lo, hi](std::span<double> x) {
    for (double& v : x) v = std::clamp(v, lo, hi);
  };
  prob.held.assign(n, 0);
  prob.held.front() = prob.held.back() = prob.held[pin] = 1;

  DescentOptions dopt;
  dopt.max_iters = opts.max_iters;
  dopt.grad_tol = opts.grad_tol * h;
  dopt.energy_tol = opts.energy_tol;
  dopt.method = opts.method;

  RelaxReport rep;
  {
    std::vector<double> g(n);
    rep.initial_energy = prob.objective(x0, g);
  }
  DescentResult res = descend(prob, std::move(x0), dopt);
  rep.trace.x0 = init.x0;
  rep.trace.spacing = h;
  rep.trace.values = std::move(res.x);
  rep.iterations = res.iterations;
  rep.stop_reason = to_string(res.stop);
  rep.energy_history = std::move(res.energy_history);
  Evaluation ev = evaluate(rep.trace.values, h, gamma, tails, k, true);
  rep.energy.nonlocal = ev.nonlocal;
  rep.energy.boundary = ev.penalty;
  rep.energy.total = ev.nonlocal + ev.penalty;
  for (int i = 0; i < n; ++i)
    if (!prob.held[i]) rep.residual_sup = std::max(rep.residual_sup, std::abs(ev.residual[i]));
  rep.converged = rep.residual_sup <= opts.grad_tol;
  return rep;
}

}  // namespace stripwall
