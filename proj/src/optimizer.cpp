#include <stripwall/optimizer.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace stripwall {

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::energy_stall: return "energy_stall";
    case StopReason::max_iters: return "max_iters";
    case StopReason::line_search: return "line_search";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

class Engine {
 public:
  Engine(const DescentProblem& p, const DescentOptions& o, std::size_t n) : p_(p), o_(o), n_(n) {}

  void mask_held(std::span<double> v) const {
    if (!p_.held.empty())
      for (std::size_t i = 0; i < n_; ++i)
        if (p_.held[i]) v[i] = 0.0;
  }

  void mask(std::span<double> v) const {
    mask_held(v);
    if (!active_.empty())
      for (std::size_t i = 0; i < n_; ++i)
        if (active_[i]) v[i] = 0.0;
  }

  void clear_active() { active_.clear(); }

  // Entries pinned by the projection: x sits on the bound and -g points out.
  // active_: 1 = on a bound with -g pointing out (frozen), 2 = on a bound
  // with -g pointing in (diagonal step, decoupled from the full metric).
  void update_active(std::span<const double> x, std::span<const double> g) {
    active_.clear();
    if (!p_.project) return;
    std::vector<double> out(n_), in(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      out[i] = x[i] - g[i];
      in[i] = x[i] + g[i];
    }
    p_.project(out);
    p_.project(in);
    active_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (g[i] == 0.0) continue;
      if (out[i] == x[i])
        active_[i] = 1;
      else if (in[i] == x[i])
        active_[i] = 2;
    }
  }

  void diagonal_steps(std::span<const double> g, std::span<double> d) const {
    if (active_.empty()) return;
    for (std::size_t i = 0; i < n_; ++i)
      if (active_[i] == 2 && (p_.held.empty() || !p_.held[i]))
        d[i] = -g[i] / (p_.metric_diagonal.empty() ? 1.0 : p_.metric_diagonal[i]);
  }

  void precondition(std::span<const double> g, std::span<double> z) const {
    if (p_.precondition) {
      p_.precondition(g, z);
    } else {
      std::copy(g.begin(), g.end(), z.begin());
    }
    mask(z);
  }

  void project(std::span<double> x) const {
    if (p_.project) p_.project(x);
  }

  double evaluate(std::span<const double> x, std::span<double> g) const {
    const double e = p_.objective(x, g);
    mask_held(g);
    return e;
  }

  // g minus its component along the constraint normal (free entries only)
  std::vector<double> tangent(std::span<const double> g) const {
    std::vector<double> r(g.begin(), g.end());
    if (p_.constraint.empty()) return r;
    std::vector<double> c(p_.constraint);
    mask_held(c);
    const double cc = dot(c, c);
    if (cc > 0.0) {
      const double a = dot(c, r) / cc;
      for (std::size_t i = 0; i < n_; ++i) r[i] -= a * c[i];
    }
    return r;
  }

  // d <- d - (c.d)/(c.Pc) Pc so that c . d = 0
  void constrain(std::span<double> d) const {
    if (p_.constraint.empty()) return;
    std::vector<double> c(p_.constraint), pc(n_);
    mask(c);
    precondition(c, pc);
    const double cpc = dot(c, pc);
    if (!(cpc > 0.0)) return;
    const double a = dot(p_.constraint, d) / cpc;
    for (std::size_t i = 0; i < n_; ++i) d[i] -= a * pc[i];
  }

  // || x - P(x - g) ||_inf over free entries
  double projected_grad_inf(std::span<const double> x, std::span<const double> graw) const {
    const std::vector<double> g = tangent(graw);
    std::vector<double> t(n_);
    for (std::size_t i = 0; i < n_; ++i) t[i] = x[i] - g[i];
    project(t);
    double m = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!p_.held.empty() && p_.held[i]) continue;
      m = std::max(m, std::abs(x[i] - t[i]));
    }
    return m;
  }

  void lbfgs_direction(std::span<const double> g, std::span<double> d, const std::deque<Pair>& all) const {
    const std::deque<Pair>& mem = all;
    std::vector<double> q(g.begin(), g.end());
    std::vector<double> alpha(mem.size());
    for (std::size_t k = mem.size(); k-- > 0;) {
      alpha[k] = mem[k].rho * dot(mem[k].s, q);
      for (std::size_t i = 0; i < n_; ++i) q[i] -= alpha[k] * mem[k].y[i];
    }
    std::vector<double> r(n_);
    precondition(q, r);
    if (!mem.empty()) {
      const auto& last = mem.back();
      std::vector<double> py(n_);
      precondition(last.y, py);
      const double yPy = dot(last.y, py);
      if (yPy > 0.0) {
        const double scale = 1.0 / (last.rho * yPy);
        for (double& v : r) v *= scale;
      }
    }
    for (std::size_t k = 0; k < mem.size(); ++k) {
      const double beta = mem[k].rho * dot(mem[k].y, r);
      for (std::size_t i = 0; i < n_; ++i) r[i] += mem[k].s[i] * (alpha[k] - beta);
    }
    for (std::size_t i = 0; i < n_; ++i) d[i] = -r[i];
    mask(d);
  }

 private:
  const DescentProblem& p_;
  const DescentOptions& o_;
  std::size_t n_;
  std::vector<char> active_;
};

}  // namespace

DescentResult descend(const DescentProblem& problem, std::vector<double> x, const DescentOptions& opts) {
  if (!problem.objective) throw std::invalid_argument("descend: objective is required");
  if (opts.max_iters <= 0 || !(opts.grad_tol > 0.0) || !(opts.energy_tol >= 0.0))
    throw std::invalid_argument("descend: max_iters and tolerances must be positive");
  const std::size_t n = x.size();
  Engine eng(problem, opts, n);
  eng.project(x);

  std::vector<double> g(n), d(n), xt(n), gt(n);
  double e = eng.evaluate(x, g);
  DescentResult res;
  res.energy_history.push_back(e);

  std::deque<Pair> memory;
  bool use_lbfgs = opts.method == DescentMethod::lbfgs;
  double alpha_prev = 1.0;

  for (int it = 0;; ++it) {
    res.grad_inf = eng.projected_grad_inf(x, g);
    if (res.grad_inf <= opts.grad_tol) {
      res.stop = StopReason::grad_tol;
      break;
    }
    const auto& hist = res.energy_history;
    if (static_cast<int>(hist.size()) > opts.stall_window) {
      const double old = hist[hist.size() - 1 - opts.stall_window];
      const double rel = std::abs(old - e) / std::max(std::abs(e), 1e-300);
      if (rel <= opts.energy_tol) {
        res.stop = StopReason::energy_stall;
        break;
      }
    }
    if (it >= opts.max_iters) {
      res.stop = StopReason::max_iters;
      break;
    }

    // attempt 0: quasi-Newton (or plain preconditioned) direction; 1: plain
    // preconditioned. Entries on a bound with an inward gradient take a
    // diagonal step in both.
    // quasi-Newton model lives on the constraint tangent: gradient and y
    // pairs have their component along c removed
    eng.update_active(x, g);
    std::vector<double> gf = eng.tangent(g);
    eng.mask(gf);
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1 && !use_lbfgs) continue;
      const bool quasi_newton = use_lbfgs && attempt == 0 && !memory.empty();
      if (quasi_newton) {
        eng.lbfgs_direction(gf, d, memory);
      } else {
        eng.precondition(gf, d);
        for (double& v : d) v = -v;
      }
      eng.diagonal_steps(g, d);
      eng.constrain(d);
      if (dot(g, d) >= 0.0) {
        memory.clear();
        continue;
      }
      double alpha = quasi_newton ? 1.0 : std::min(1.0, 2.0 * alpha_prev);
      if (!quasi_newton && use_lbfgs) alpha = 1.0;
      for (int b = 0; b <= opts.max_backtracks; ++b, alpha *= opts.backtrack) {
        for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + alpha * d[i];
        eng.project(xt);
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += g[i] * (xt[i] - x[i]);
        if (slope >= 0.0) continue;
        const double et = eng.evaluate(xt, gt);
        if (et <= e + opts.armijo * slope) {
          if (et > e) throw std::logic_error("descend: accepted step increased the objective");
          if (use_lbfgs) {
            Pair pr;
            pr.s.resize(n);
            pr.y.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
              pr.s[i] = xt[i] - x[i];
              pr.y[i] = gt[i] - g[i];
            }
            pr.y = eng.tangent(pr.y);
            const double sy = dot(pr.s, pr.y);
            if (sy > 1e-14 * std::sqrt(dot(pr.s, pr.s) * dot(pr.y, pr.y))) {
              pr.rho = 1.0 / sy;
              memory.push_back(std::move(pr));
              if (static_cast<int>(memory.size()) > opts.lbfgs_memory) memory.pop_front();
            }
          }
          alpha_prev = alpha;
          x.swap(xt);
          g.swap(gt);
          e = et;
          accepted = true;
          break;
        }
      }
      if (!accepted) memory.clear();
    }
    eng.clear_active();
    if (!accepted) {
      res.stop = StopReason::line_search;
      break;
    }
    res.iterations = it + 1;
    res.energy_history.push_back(e);
    if (opts.on_iteration && opts.on_iteration(res.iterations, x)) {
      eng.project(x);
      e = eng.evaluate(x, g);
      memory.clear();
    }
  }
  res.grad_inf = eng.projected_grad_inf(x, g);
  res.converged = res.grad_inf <= opts.grad_tol;
  res.energy = e;
  res.x = std::move(x);
  return res;
}

}  // namespace stripwall
