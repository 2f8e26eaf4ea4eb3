#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <vector>

#include <stripwall/energy.hpp>
#include <stripwall/grid.hpp>
#include <stripwall/minimize.hpp>

namespace stripwall {

enum class EtaProfile {
  smoothstep,  // t^2 (3 - 2t) on [0, 1], default
  linear_c1,   // t (2 - t) on [0, 1]
};

struct MicroParams {
  double eps = 0.1;  // in (0, 1/2)
  EtaProfile eta = EtaProfile::smoothstep;
  double pad_factor = 4.0;  // transform length / support length, >= 2
};

// Throws std::invalid_argument for eps outside (0, 1/2) or pad_factor < 2.
void validate(const MicroParams& p);

// Cutoff profile eta(t) (clamped to 1 for t >= 1) and its derivative.
double eta(double t, EtaProfile profile);
double eta_prime(double t, EtaProfile profile);

// eta_eps(y) = eta(min(y, 1 - y) / eps) and d/dy of it.
double eta_eps(double y, const MicroParams& p);
double eta_eps_prime(double y, const MicroParams& p);

// Nodewise div(eta_eps m), m = (cos theta, sin theta): centered differences for
// d_x m1 (caps extended as constants), centered / second-order one-sided d_y m2,
// exact eta_eps'. Returned on the field's own grid; outside it the divergence
// vanishes. Throws std::invalid_argument if either cap column is not constant
// at a multiple of pi.
ScalarField div_eta_m(const ScalarField& theta, const MicroParams& p);

// A charge density sampled at the nodes of a uniform box
// [x0, x0 + (nx-1) hx] x [y0, y0 + (ny-1) hy], row-major by y then x.
struct UniformCharge {
  double x0 = 0.0, y0 = 0.0, hx = 1.0, hy = 1.0;
  int nx = 0, ny = 0;
  std::vector<double> values;
};

UniformCharge as_charge(const ScalarField& div);

// N(f) = int |F f|^2 / (2 pi |k|) d^2k = int int f(r) f(r') / |r - r'|
// by 2D FFT on the box zero-padded by pad_factor in each direction; the weight
// is replaced by its exact cell average on the cells next to k = 0.
// Throws std::invalid_argument if pad_factor < 2 (the support would touch the
// periodic pad boundary).
double nonlocal_energy(const UniformCharge& f, double pad_factor);
double nonlocal_energy(const ScalarField& div, const MicroParams& p);
// Polarization of the same quadratic form.
double nonlocal_bilinear(const UniformCharge& f, const UniformCharge& g, double pad_factor);

// Brute-force real-space double sum of f f' / |r - r'| with the exact
// self-cell integral; O(n^2), for small oracle grids only.
double nonlocal_energy_direct(const UniformCharge& f);

// Layered evaluator of N(div(eta_eps m)) for fields on a strip grid: FFT in x,
// graded cells in y (resolving the eps layers) with the exact y-kernel
// K_0(|k1| |y - y'|) / pi integrated over cell pairs.
class StripNonlocal {
 public:
  StripNonlocal(const StripGrid& grid, const MicroParams& p);
  ~StripNonlocal();
  StripNonlocal(const StripNonlocal&) = delete;
  StripNonlocal& operator=(const StripNonlocal&) = delete;

  // Returns N; fills grad (d N / d theta, same layout as the field) if non-empty.
  double evaluate(std::span<const double> theta, std::span<double> grad) const;
  double evaluate(const ScalarField& theta) const;

  const std::vector<double>& cell_edges() const;
  const StripGrid& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// int m2^2(x, 0) dx + int m2^2(x, 1) dx (trapezoid).
double boundary_m2_integral(const ScalarField& theta);

// 1/2 sum over edges of |grad m|^2 with grad m = (-sin, cos)(theta_bar) grad theta.
double exchange_energy_m(const ScalarField& theta);

// E_eps = exchange + gamma / (2 |ln eps|) N + Zeeman (boundary = 0).
EnergyBreakdown energy_Eeps(const ScalarField& theta, const WallParams& params, const MicroParams& p);
// E_0 is F written in m; same code path.
EnergyBreakdown energy_E0(const ScalarField& theta, const WallParams& params);

// Minimizes E_eps over A_{k,M} with the machinery of minimize_wall.
SolveReport minimize_Eeps(const StripGrid& grid, const WallParams& params, const MicroParams& p,
                          const SolveOptions& opts);

struct TrendRow {
  double eps = 0.0;
  double energy_eps = 0.0;
  double energy_gap = 0.0;   // energy_eps - min F
  double h1_distance = 0.0;  // |grad(theta_eps - theta_0)|_{L2} after recentering
  bool converged = false;
};

struct TrendTable {
  double energy_0 = 0.0;
  bool converged_0 = false;
  std::vector<TrendRow> rows;
};

// Minimizes F once and E_eps for each eps (warm-started from the F minimizer).
// Throws std::invalid_argument for an empty list or one that is not strictly
// decreasing inside (0, 1/2).
TrendTable gamma_trend_experiment(const WallParams& params, const std::vector<double>& eps_list,
                                  const StripGrid& grid, const SolveOptions& opts,
                                  EtaProfile eta = EtaProfile::smoothstep, double pad_factor = 4.0);

// CSV eps,energy_eps,energy_gap,h1_distance
void write_trend_csv(const std::filesystem::path& path, const TrendTable& table);

}  // namespace stripwall
