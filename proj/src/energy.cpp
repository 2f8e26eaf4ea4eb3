#include <stripwall/energy.hpp>

#include <cmath>
#include <vector>

#include <stripwall/parallel.hpp>

namespace stripwall {

namespace {

struct RowSums {
  double dirichlet = 0.0;
  double zeeman = 0.0;
  double boundary = 0.0;
};

// Row j owns its x-edges and the y-edges to row j+1.
RowSums row_energy(const StripGrid& g, const WallParams& p, std::span<const double> th, int j,
                   std::vector<double>& buf) {
  RowSums r;
  const double wyj = g.wy(j);
  const auto at = [&](int i, int jj) { return th[g.index(i, jj)]; };

  buf.assign(g.nx, 0.0);
  for (int i = 0; i + 1 < g.nx; ++i) {
    const double d = at(i + 1, j) - at(i, j);
    buf[i] = 0.5 * wyj * g.hy * d * d / g.hx;
  }
  if (j + 1 < g.ny) {
    for (int i = 0; i < g.nx; ++i) {
      const double d = at(i, j + 1) - at(i, j);
      buf[i] += 0.5 * g.wx(i) * g.hx * d * d / g.hy;
    }
  }
  r.dirichlet = pairwise_sum(buf);

  if (p.h != 0.0) {
    for (int i = 0; i < g.nx; ++i) {
      const double s = std::sin(0.5 * at(i, j));
      buf[i] = g.wx(i) * 2.0 * s * s;
    }
    r.zeeman = p.h * wyj * g.hx * g.hy * pairwise_sum(std::span<const double>(buf.data(), g.nx));
  }

  if (j == 0 || j == g.ny - 1) {
    for (int i = 0; i < g.nx; ++i) {
      const double s = std::sin(at(i, j));
      buf[i] = g.wx(i) * s * s;
    }
    r.boundary = p.gamma * g.hx * pairwise_sum(std::span<const double>(buf.data(), g.nx));
  }
  return r;
}

void row_gradient(const StripGrid& g, const WallParams& p, std::span<const double> th, int j,
                  std::span<double> grad) {
  const auto at = [&](int i, int jj) { return th[g.index(i, jj)]; };
  const double wyj = g.wy(j);
  const double cx = wyj * g.hy / g.hx;
  const double cy = g.hx / g.hy;
  const bool edge = (j == 0 || j == g.ny - 1);
  for (int i = 0; i < g.nx; ++i) {
    const double t = at(i, j);
    double v = 0.0;
    if (i > 0) v += cx * (t - at(i - 1, j));
    if (i + 1 < g.nx) v += cx * (t - at(i + 1, j));
    const double wxi = g.wx(i);
    if (j > 0) v += wxi * cy * (t - at(i, j - 1));
    if (j + 1 < g.ny) v += wxi * cy * (t - at(i, j + 1));
    if (p.h != 0.0) v += p.h * wxi * wyj * g.hx * g.hy * std::sin(t);
    if (edge) v += p.gamma * wxi * g.hx * std::sin(2.0 * t);
    grad[g.index(i, j)] = v;
  }
}

}  // namespace

double energy_and_grad(const StripGrid& g, const WallParams& p, std::span<const double> theta,
                       std::span<double> grad, EnergyBreakdown* parts) {
  std::vector<double> dir(g.ny), zee(g.ny), bnd(g.ny);
#pragma omp parallel
  {
    std::vector<double> buf;
#pragma omp for schedule(static)
    for (int j = 0; j < g.ny; ++j) {
      const RowSums r = row_energy(g, p, theta, j, buf);
      dir[j] = r.dirichlet;
      zee[j] = r.zeeman;
      bnd[j] = r.boundary;
      if (!grad.empty()) row_gradient(g, p, theta, j, grad);
    }
  }
  EnergyBreakdown e;
  e.dirichlet = pairwise_sum(dir);
  e.zeeman = pairwise_sum(zee);
  e.boundary = pairwise_sum(bnd);
  e.nonlocal = 0.0;
  e.total = e.dirichlet + e.zeeman + e.boundary;
  if (parts) *parts = e;
  return e.total;
}

EnergyBreakdown energy_F(const ScalarField& field, const WallParams& params) {
  EnergyBreakdown e;
  energy_and_grad(field.grid, params, field.values, {}, &e);
  return e;
}

ScalarField grad_F(const ScalarField& field, const WallParams& params) {
  ScalarField g(field.grid);
  energy_and_grad(field.grid, params, field.values, g.values);
  return g;
}

ScalarField grad_boundary_term(const ScalarField& field, const WallParams& params) {
  const auto& g = field.grid;
  ScalarField out(g);
  for (int j : {0, g.ny - 1})
    for (int i = 0; i < g.nx; ++i) out(i, j) = params.gamma * g.wx(i) * g.hx * std::sin(2.0 * field(i, j));
  return out;
}

double dirichlet_energy(const StripGrid& g, std::span<const double> theta) {
  WallParams none{0.0, 0.0, 1};
  EnergyBreakdown e;
  energy_and_grad(g, none, theta, {}, &e);
  return e.dirichlet;
}

ElResidual el_residual(const ScalarField& field, const WallParams& p) {
  const auto& g = field.grid;
  ElResidual r;
  r.interior = ScalarField(g);
  const double ihx2 = 1.0 / (g.hx * g.hx);
  const double ihy2 = 1.0 / (g.hy * g.hy);
  for (int j = 1; j + 1 < g.ny; ++j) {
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double t = field(i, j);
      const double lap = (field(i + 1, j) - 2.0 * t + field(i - 1, j)) * ihx2 +
                         (field(i, j + 1) - 2.0 * t + field(i, j - 1)) * ihy2;
      const double v = lap - p.h * std::sin(t);
      r.interior(i, j) = v;
      r.sup_interior = std::max(r.sup_interior, std::abs(v));
    }
  }

  r.boundary_bottom.x0 = r.boundary_top.x0 = g.x(0);
  r.boundary_bottom.spacing = r.boundary_top.spacing = g.hx;
  r.boundary_bottom.values.resize(g.nx);
  r.boundary_top.values.resize(g.nx);
  const int n = g.ny - 1;
  for (int i = 0; i < g.nx; ++i) {
    // outward normal is -y at the bottom, +y at the top
    const double dn_bot = -(-3.0 * field(i, 0) + 4.0 * field(i, 1) - field(i, 2)) / (2.0 * g.hy);
    const double dn_top = (3.0 * field(i, n) - 4.0 * field(i, n - 1) + field(i, n - 2)) / (2.0 * g.hy);
    const double vb = dn_bot + p.gamma * std::sin(2.0 * field(i, 0));
    const double vt = dn_top + p.gamma * std::sin(2.0 * field(i, n));
    r.boundary_bottom.values[i] = vb;
    r.boundary_top.values[i] = vt;
    r.sup_bottom = std::max(r.sup_bottom, std::abs(vb));
    r.sup_top = std::max(r.sup_top, std::abs(vt));
  }
  return r;
}

double interior_residual_sup(const ElResidual& r, double x_lo, double x_hi, double y_lo, double y_hi) {
  const auto& g = r.interior.grid;
  double s = 0.0;
  for (int j = 1; j + 1 < g.ny; ++j) {
    const double y = g.y(j);
    if (y < y_lo - 1e-12 || y > y_hi + 1e-12) continue;
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double x = g.x(i);
      if (x < x_lo - 1e-12 || x > x_hi + 1e-12) continue;
      s = std::max(s, std::abs(r.interior(i, j)));
    }
  }
  return s;
}

}  // namespace stripwall
