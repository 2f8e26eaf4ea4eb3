#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <stripwall/energy.hpp>
#include <stripwall/grid.hpp>
#include <stripwall/optimizer.hpp>

namespace stripwall {

enum class InitKind { linear_ramp, tanh_profile, custom };

struct SolveOptions {
  int max_iters = 20000;
  double grad_tol = 1e-7;  // nodal gradient; ~sqrt(ulp(E) * metric) is the floating-point floor
  double energy_tol = 1e-12;
  InitKind init = InitKind::linear_ramp;
  std::optional<ScalarField> custom_init;  // used when init == custom
  int recenter_every = 0;                  // 0 disables in-loop recentering
  DescentMethod method = DescentMethod::lbfgs;  // preconditioned by the strip metric
  bool precondition = true;  // discrete H^1 metric (initial L-BFGS scaling)
  // Keep the x-average of theta at x = 0 equal to k pi / 2 (translation
  // normalization); the init is recentered first.
  bool pin_center = true;
};

// Throws std::invalid_argument on non-positive tolerances or iteration caps.
void validate(const SolveOptions& opts);

struct MonotoneReport {
  bool ok = false;
  double worst_violation = 0.0;  // largest difference of the wrong sign (0 if none)
  bool strict_central = false;   // strictly monotone on the central half |x| <= M/2
};

struct SymmetryReport {
  double y_mirror_err = 0.0;  // sup |theta(x,y) - theta(x,1-y)|
  double x_point_err = 0.0;   // sup |theta(x,y) - (k pi - theta(-x,y))|
};

struct DecayReport {
  double rate_right = 0.0;  // fitted exponent of max_y |theta| for x -> +M
  double rate_left = 0.0;   // fitted exponent of max_y |k pi - theta| for x -> -M, in |x|
  double fit_residual = 0.0;
};

struct PropertyReport {
  MonotoneReport monotone;
  SymmetryReport symmetry;
  std::optional<DecayReport> decay;
  std::string decay_error;  // set when the decay fit was not possible
};

struct SolveReport {
  ScalarField field;  // raw minimizer in A_{k,M} (caps held)
  EnergyBreakdown energy;
  int iterations = 0;
  bool converged = false;  // implies grad_inf <= grad_tol
  double grad_inf = 0.0;
  std::string stop_reason;
  PropertyReport properties;
  std::vector<std::string> warnings;
  std::vector<double> energy_history;  // objective after each accepted step
};

// Preconditioned descent (L-BFGS by default) with Armijo backtracking on F over the truncated class
// A_{k,M}: columns i = 0 and i = nx-1 are held at k*pi and 0, every iterate is
// clamped into [min(0,k pi), max(0,k pi)].
// Throws std::invalid_argument for k = 0 or invalid parameters.
SolveReport minimize_wall(const StripGrid& grid, const WallParams& params, const SolveOptions& opts);

// Same driver for any objective over A_{k,M} (value + full gradient); the
// report's energy breakdown is left for the caller to fill.
SolveReport minimize_strip(const StripGrid& grid, const WallParams& params, const SolveOptions& opts,
                           const Objective& objective);

// Coarse solve on every other node, bilinear prolongation, fine solve.
// Requires odd nx and ny.
SolveReport minimize_wall_two_level(const StripGrid& grid, const WallParams& params, const SolveOptions& opts);

ScalarField initial_field(const StripGrid& grid, const WallParams& params, InitKind kind);

// Bilinear interpolation of a field onto another strip grid (same M).
ScalarField prolong(const ScalarField& coarse, const StripGrid& fine);

// SPD metric for the strip solvers: Hessian of the Dirichlet form plus
// 2 gamma boundary mass and h bulk mass, restricted to the free columns
// 1..nx-2 and factored once (sparse LDL^T).
Preconditioner make_strip_preconditioner(const StripGrid& grid, const WallParams& params);

// sign = -1 checks that theta is non-increasing in x (tolerance 1e-12).
MonotoneReport check_monotone(const ScalarField& field, int sign);
SymmetryReport check_symmetry(const ScalarField& field, int k);
// Throws std::runtime_error("truncation too small") if the tails are not
// below pi/4 over the fit windows (outer quarter of the grid on each side).
DecayReport check_decay(const ScalarField& field, int k);

PropertyReport property_report(const ScalarField& field, int k);

struct InfimumRow {
  double M = 0.0;
  double energy = 0.0;
  bool converged = false;
};

struct InfimumTable {
  std::vector<InfimumRow> rows;
  bool non_increasing = false;  // within 1e-8
};

// Minimized truncated energies for each M at fixed spacing hx (nx = 2M/hx + 1)
// and ny nodes across the strip; nested grids make F(theta_M) comparable.
InfimumTable infimum_estimate(const WallParams& params, std::span<const double> M_list, double hx, int ny,
                              const SolveOptions& opts);

}  // namespace stripwall
