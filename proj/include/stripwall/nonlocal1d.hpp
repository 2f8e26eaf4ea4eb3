#pragma once

#include <string>
#include <vector>

#include <stripwall/energy.hpp>
#include <stripwall/grid.hpp>
#include <stripwall/minimize.hpp>

namespace stripwall {

enum class KernelKind {
  exact,      // K(x) = pi cosh(pi x) / sinh^2(pi x)
  power_law,  // 1/(pi x^2), the large-gamma approximation
};

// Constant values used beyond the sampled window (the end samples).
struct TailInfo {
  double left = 0.0;
  double right = 0.0;
  bool multiples_of_pi = false;  // both within 1e-2 of a multiple of pi
};

// Throws std::invalid_argument("non-flat tails") if the slope over the first
// or last cell exceeds 1e-2, and for traces with fewer than 3 samples.
TailInfo check_tails(const Trace& trace);

// Discrete F-bar = 1/4 int int K (theta - theta')^2 + gamma int sin^2 theta on
// the lattice x0 + i*spacing, i in Z, with the window extended by its end
// values. Nonlocal part goes to `nonlocal`, the penalty to `boundary`.
// Appends a warning when the tails are not multiples of pi (the penalty is
// then only counted on the window).
EnergyBreakdown energy_Fbar(const Trace& trace, double gamma, std::vector<std::string>* warnings = nullptr);

// Pointwise residual
//   1/2 int (2 t(x) - t(x - xi) - t(x + xi)) K(xi) dxi + gamma sin 2t(x)
// on the same lattice; equals grad(energy_Fbar) / spacing at every sample
// whose perturbation leaves the tails unchanged.
Trace residual_eq11(const Trace& trace, double gamma, KernelKind kernel = KernelKind::exact);

// Energy and gradient with respect to the samples (tails held fixed).
double energy_and_grad_Fbar(const Trace& trace, double gamma, std::vector<double>& grad,
                            EnergyBreakdown* parts = nullptr);

// Harmonic extension of the trace into the strip (Neumann-symmetric about
// y = 1/2). The trace minus a closed-form harmonic reference wall is extended
// with the multiplier cosh(k(1/2 - y)) / cosh(k/2) on a zero-padded FFT grid.
// Requires the trace window to cover [-M - 5, M + 5] and hx to be an integer
// multiple of the trace spacing; throws std::invalid_argument otherwise.
ScalarField poisson_extend(const Trace& trace, const StripGrid& grid);

// Independent route: cellwise exact integrals of the Poisson kernel against
// the piecewise-constant trace (plus the constant tails). Valid for 0 < y < 1;
// rows y = 0 and y = 1 are copied from the samples.
ScalarField poisson_extend_quadrature(const Trace& trace, const StripGrid& grid);

struct FactorTwo {
  double F_2d = 0.0;
  double Fbar = 0.0;
  double rel_err = 0.0;
};

// energy_F (h = 0) of poisson_extend(trace) against 2 * energy_Fbar(trace).
FactorTwo factor_two_check(const Trace& trace, double gamma, const StripGrid& grid);

struct RelaxReport {
  Trace trace;
  EnergyBreakdown energy;
  double initial_energy = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual_sup = 0.0;  // Eq. 11 residual over the free samples
  std::string stop_reason;
  std::vector<double> energy_history;
};

// Preconditioned descent on the discrete F-bar with theta(0) = pi/2 pinned
// and the end samples held at their multiples of pi. opts.grad_tol bounds the
// sup norm of the residual on free samples.
// Throws std::invalid_argument when the init has no sample at x = 0 or its
// tails are not 0 and pi (up to 0.1).
RelaxReport relax_Fbar(const Trace& init, double gamma, const SolveOptions& opts);

}  // namespace stripwall
