#pragma once

#include <span>

#include <stripwall/grid.hpp>

namespace stripwall {

struct EnergyBreakdown {
  double dirichlet = 0.0;
  double zeeman = 0.0;
  double boundary = 0.0;
  double nonlocal = 0.0;
  double total = 0.0;
};

// Discrete thin-film energy
//   F = 1/2 int |grad theta|^2 + h int (1 - cos theta) + gamma int_{edges} sin^2 theta.
// The Dirichlet term sums squared edge differences (x-edges weighted by the
// y trapezoid weights and vice versa), so its gradient is the 5-point
// Laplacian with natural (Neumann) closure on the horizontal edges.
EnergyBreakdown energy_F(const ScalarField& field, const WallParams& params);

// Exact gradient of energy_F with respect to every nodal value.
ScalarField grad_F(const ScalarField& field, const WallParams& params);

// Boundary-penalty contribution to grad_F alone (gamma w_i hx sin 2 theta on
// the two horizontal edges, zero elsewhere).
ScalarField grad_boundary_term(const ScalarField& field, const WallParams& params);

// Raw-buffer form used by the solvers: returns the total and fills grad
// (same layout as ScalarField::values) when grad is non-empty.
double energy_and_grad(const StripGrid& grid, const WallParams& params, std::span<const double> theta,
                       std::span<double> grad, EnergyBreakdown* parts = nullptr);

// 1/2 sum of squared edge differences; the discrete H^1 seminorm squared / 2.
double dirichlet_energy(const StripGrid& grid, std::span<const double> theta);

struct ElResidual {
  ScalarField interior;  // Delta_h theta - h sin theta; zero on boundary nodes
  Trace boundary_bottom; // d_nu theta + gamma sin 2 theta at y = 0
  Trace boundary_top;    // same at y = 1
  double sup_interior = 0.0;
  double sup_bottom = 0.0;
  double sup_top = 0.0;
};

// Strong-form residual of Delta theta = h sin theta, d_nu theta = -gamma sin 2 theta.
// The normal derivative uses the second-order one-sided stencil.
ElResidual el_residual(const ScalarField& field, const WallParams& params);

// Sup norm of the interior residual restricted to nodes with
// x in [x_lo, x_hi] and y in [y_lo, y_hi].
double interior_residual_sup(const ElResidual& r, double x_lo, double x_hi, double y_lo, double y_hi);

}  // namespace stripwall
