#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <stripwall/analytic.hpp>
#include <stripwall/io.hpp>
#include <stripwall/micro.hpp>
#include <stripwall/minimize.hpp>
#include <stripwall/parallel.hpp>
#include <stripwall/verify.hpp>

using namespace stripwall;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_not_converged = 2;
constexpr int exit_verify_failed = 3;

struct BaseArgs {
  double gamma = 1.0;
  double h = 0.0;
  int k = 1;
  double M = 10.0;
  int nx = 401;
  int ny = 21;
  double tol = SolveOptions{}.grad_tol;
  int max_iters = SolveOptions{}.max_iters;
  std::string init = "ramp";
};

void add_base(CLI::App* cmd, BaseArgs& a, bool required) {
  auto opt = [&](CLI::Option* o) {
    if (required) o->required();
    return o;
  };
  opt(cmd->add_option("--gamma", a.gamma, "boundary anisotropy strength (> 0)"));
  opt(cmd->add_option("--h", a.h, "applied field (>= 0)"));
  opt(cmd->add_option("--k", a.k, "winding class, theta(-inf) = k pi (nonzero)"));
  opt(cmd->add_option("--M", a.M, "half length of the truncated strip"));
  opt(cmd->add_option("--nx", a.nx, "nodes along x (>= 3)"));
  opt(cmd->add_option("--ny", a.ny, "nodes across the strip (>= 3)"));
  cmd->add_option("--tol", a.tol, "sup-norm projected-gradient tolerance");
  cmd->add_option("--max-iters", a.max_iters, "iteration cap");
  cmd->add_option("--init", a.init, "initial field")->check(CLI::IsMember({"ramp", "tanh"}));
}

WallParams wall_params(const BaseArgs& a) {
  if (a.k == 0) throw std::invalid_argument("--k must be nonzero");
  if (!(a.gamma > 0.0) || !std::isfinite(a.gamma)) throw std::invalid_argument("--gamma must be positive");
  if (!(a.h >= 0.0) || !std::isfinite(a.h)) throw std::invalid_argument("--h must be non-negative");
  return {a.gamma, a.h, a.k};
}

SolveOptions solve_options(const BaseArgs& a) {
  SolveOptions o;
  o.grad_tol = a.tol;
  o.max_iters = a.max_iters;
  o.init = a.init == "tanh" ? InitKind::tanh_profile : InitKind::linear_ramp;
  validate(o);
  return o;
}

void print_energy(const EnergyBreakdown& e) {
  std::printf("energy total %s\n  dirichlet %s\n  zeeman %s\n  boundary %s\n", format17(e.total).c_str(),
              format17(e.dirichlet).c_str(), format17(e.zeeman).c_str(), format17(e.boundary).c_str());
}

nlohmann::json properties_json(const PropertyReport& p) {
  nlohmann::json j;
  j["monotone"] = p.monotone.ok;
  j["monotone_worst_violation"] = p.monotone.worst_violation;
  j["y_mirror_err"] = p.symmetry.y_mirror_err;
  j["x_point_err"] = p.symmetry.x_point_err;
  if (p.decay) {
    j["decay_rate_left"] = p.decay->rate_left;
    j["decay_rate_right"] = p.decay->rate_right;
    j["decay_fit_residual"] = p.decay->fit_residual;
  } else {
    j["decay_error"] = p.decay_error;
  }
  return j;
}

int cmd_solve(const BaseArgs& a, const fs::path& out) {
  const WallParams p = wall_params(a);
  const StripGrid g = build_grid(a.M, a.nx, a.ny);
  const SolveOptions o = solve_options(a);
  const SolveReport r = minimize_wall(g, p, o);

  fs::create_directories(out);
  write_field(out / "profile.csv", r.field);
  write_trace(out / "trace_bottom.csv", extract_trace(r.field, Side::bottom));
  nlohmann::json j;
  j["params"] = {{"gamma", p.gamma}, {"h", p.h}, {"k", p.k}};
  j["grid"] = {{"M", g.half_length}, {"nx", g.nx}, {"ny", g.ny}};
  j["energy"] = to_json(r.energy);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["grad_inf"] = r.grad_inf;
  j["grad_tol"] = o.grad_tol;
  j["stop_reason"] = r.stop_reason;
  j["properties"] = properties_json(r.properties);
  j["warnings"] = r.warnings;
  std::ofstream(out / "report.json") << j.dump(2) << '\n';

  print_energy(r.energy);
  std::printf("iterations %d, grad_inf %s, stop %s\n", r.iterations, format17(r.grad_inf).c_str(),
              r.stop_reason.c_str());
  for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
  if (!r.converged) {
    std::fprintf(stderr, "not converged (%s)\n", r.stop_reason.c_str());
    return exit_not_converged;
  }
  return exit_ok;
}

// sup distance of the minimizer to the analytic profile of its regime:
// gamma <= 1 the small-gamma trace, gamma > 1 the large-gamma 2D field
std::pair<std::string, double> analytic_distance(const SolveReport& r, const WallParams& p) {
  const ScalarField c = recenter(r.field, p);
  const StripGrid& g = c.grid;
  double d = 0.0;
  if (p.gamma <= 1.0) {
    const double s = std::sqrt(p.gamma);
    const Trace t = extract_trace(c, Side::bottom);
    for (std::size_t i = 0; i < t.size(); ++i)
      if (std::abs(s * t.x(i)) <= 3.0) d = std::max(d, std::abs(t.values[i] - p.k * small_gamma(s * t.x(i))));
    return {"small_gamma", d};
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      if (std::abs(x) <= 1.0 + 1e-12 && y >= 0.2 - 1e-12 && y <= 0.8 + 1e-12)
        d = std::max(d, std::abs(c(i, j) - p.k * large_gamma_2d(x, y)));
    }
  return {"large_gamma_2d", d};
}

int cmd_sweep(const BaseArgs& a, const std::string& param, const std::vector<double>& values, const fs::path& out) {
  if (values.empty()) throw std::invalid_argument("--values must list at least one value");
  const WallParams base = wall_params(a);
  const SolveOptions o = solve_options(a);
  const StripGrid g0 = build_grid(a.M, a.nx, a.ny);
  bool all_converged = true;
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());

  if (param == "eps") {
    const TrendTable t = gamma_trend_experiment(base, values, g0, o);
    write_trend_csv(out, t);
    std::printf("E_0 %s (converged %d)\n", format17(t.energy_0).c_str(), t.converged_0);
    std::printf("eps,energy_eps,energy_gap,h1_distance,converged\n");
    for (const auto& r : t.rows) {
      std::printf("%s,%s,%s,%s,%d\n", format17(r.eps).c_str(), format17(r.energy_eps).c_str(),
                  format17(r.energy_gap).c_str(), format17(r.h1_distance).c_str(), r.converged);
      all_converged = all_converged && r.converged;
    }
    all_converged = all_converged && t.converged_0;
    return all_converged ? exit_ok : exit_not_converged;
  }

  std::ofstream csv(out);
  if (!csv) throw std::runtime_error("cannot write " + out.string());
  const std::string header =
      param + ",energy,converged,iterations,monotone,y_mirror_err,x_point_err,decay_left,decay_right,profile,analytic_distance";
  csv << header << '\n';
  std::printf("%s\n", header.c_str());
  for (double v : values) {
    WallParams p = base;
    StripGrid g = g0;
    if (param == "gamma") {
      p.gamma = v;
      wall_params({v, p.h, p.k});
    } else {
      const double hx = g0.hx;  // fixed spacing so the truncations are nested
      const int nx = static_cast<int>(std::lround(2.0 * v / hx)) + 1;
      g = build_grid(v, nx, a.ny);
    }
    const SolveReport r = minimize_wall(g, p, o);
    all_converged = all_converged && r.converged;
    const auto& pr = r.properties;
    std::string profile;
    double dist = std::nan("");
    if (param == "gamma") std::tie(profile, dist) = analytic_distance(r, p);
    std::string row = format17(v) + "," + format17(r.energy.total) + "," + (r.converged ? "1" : "0") + "," +
                      std::to_string(r.iterations) + "," + (pr.monotone.ok ? "1" : "0") + "," +
                      format17(pr.symmetry.y_mirror_err) + "," + format17(pr.symmetry.x_point_err) + "," +
                      (pr.decay ? format17(pr.decay->rate_left) : "") + "," +
                      (pr.decay ? format17(pr.decay->rate_right) : "") + "," + profile + "," +
                      (profile.empty() ? "" : format17(dist));
    csv << row << '\n';
    std::printf("%s\n", row.c_str());
  }
  return all_converged ? exit_ok : exit_not_converged;
}

int cmd_verify(const VerifyOptions& vo, const fs::path& report_path) {
  const VerifyReport r = run_verify(vo);
  for (const auto& c : r.checks)
    std::printf("%s %-48s value %-24s %s %-10s (%.2fs)%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                format17(c.value).c_str(), c.at_least ? ">=" : "<=", format17(c.tolerance).c_str(), c.seconds,
                c.detail.empty() ? "" : "  ", c.detail.c_str());
  if (!report_path.parent_path().empty()) fs::create_directories(report_path.parent_path());
  write_verify_json(report_path, r, vo);
  if (!r.all_passed()) {
    std::fprintf(stderr, "verification failed:");
    for (const auto& n : r.failures()) std::fprintf(stderr, " %s", n.c_str());
    std::fprintf(stderr, "\n");
    return exit_verify_failed;
  }
  std::printf("all %zu checks passed\n", r.checks.size());
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain walls in a thin ferromagnetic strip: solve, sweep, verify"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help message and exit");  // -h would clash with --h

  BaseArgs solve_args;
  std::string solve_out = "solve_out";
  auto* solve = app.add_subcommand("solve", "minimize F over the truncated class A_{k,M}");
  add_base(solve, solve_args, true);
  solve->add_option("--out", solve_out, "output directory (profile.csv, report.json)");

  BaseArgs sweep_args;
  std::string sweep_param, sweep_out = "sweep.csv";
  std::vector<double> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "one solve per value of a parameter, CSV table");
  add_base(sweep, sweep_args, false);
  sweep->add_option("--param", sweep_param, "swept parameter")->required()->check(CLI::IsMember({"gamma", "eps", "M"}));
  sweep->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "CSV path");

  VerifyOptions vo;
  std::string report = "verify_report.json", fault = "none";
  auto* verify = app.add_subcommand("verify", "run the invariant suite; exit 3 on any failure");
  verify->add_flag("--fast", vo.fast, "reduced grids");
  verify->add_option("--seed", vo.seed, "seed for random fields")->capture_default_str();
  verify->add_option("--report", report, "JSON report path");
  verify->add_option("--inject-fault", fault, "test-harness mutation")->check(CLI::IsMember({"none", "boundary-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n\n", e.what());
    const auto picked = app.get_subcommands();
    std::fprintf(stderr, "%s", (picked.empty() ? app.help() : picked.front()->help()).c_str());
    return exit_usage;
  }

  try {
    apply_thread_cap_from_env();
    if (*solve) return cmd_solve(solve_args, solve_out);
    if (*sweep) {
      if (sweep_values.empty()) throw std::invalid_argument("--values must list at least one value");
      return cmd_sweep(sweep_args, sweep_param, sweep_values, sweep_out);
    }
    vo.inject_boundary_sign_fault = fault == "boundary-sign";
    return cmd_verify(vo, report);
  } catch (const std::invalid_argument& e) {
    const auto picked = app.get_subcommands();
    std::fprintf(stderr, "error: %s\n\n%s", e.what(), (picked.empty() ? app.help() : picked.front()->help()).c_str());
    return exit_usage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  }
}
