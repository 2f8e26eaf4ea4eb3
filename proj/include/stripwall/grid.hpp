#pragma once

#include <cstddef>
#include <vector>

namespace stripwall {

// Node-centered uniform discretization of the truncated strip
// (-M, M) x (0, 1). Node (i, j) sits at (-M + i*hx, j*hy).
struct StripGrid {
  double half_length = 1.0;  // M
  int nx = 3;
  int ny = 3;
  double hx = 1.0;
  double hy = 0.5;

  double x(int i) const { return -half_length + i * hx; }
  double y(int j) const { return j * hy; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  // Trapezoid weights (1/2 at the ends, 1 elsewhere).
  double wx(int i) const { return (i == 0 || i == nx - 1) ? 0.5 : 1.0; }
  double wy(int j) const { return (j == 0 || j == ny - 1) ? 0.5 : 1.0; }
};

bool operator==(const StripGrid& a, const StripGrid& b);

// Throws std::invalid_argument for M <= 0 or node counts < 3.
StripGrid build_grid(double M, int nx, int ny);

// Lifted phase theta sampled on the grid nodes, row-major by y then x.
struct ScalarField {
  StripGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const StripGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator()(int i, int j) { return values[grid.index(i, j)]; }
  double operator()(int i, int j) const { return values[grid.index(i, j)]; }

  bool all_finite() const;
};

template <typename F>
ScalarField sample_field(const StripGrid& g, F&& f) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.x(i), g.y(j));
  return out;
}

// Uniformly sampled boundary/1D profile.
struct Trace {
  double x0 = 0.0;
  double spacing = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return x0 + static_cast<double>(i) * spacing; }
  double x_last() const { return x(values.size() - 1); }
  std::vector<double> xs() const;
};

// Samples f on n points spanning [a, b]; n >= 2.
template <typename F>
Trace sample_trace(double a, double b, std::size_t n, F&& f) {
  Trace t;
  t.x0 = a;
  t.spacing = (b - a) / static_cast<double>(n - 1);
  t.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.values[i] = f(t.x(i));
  return t;
}

struct WallParams {
  double gamma = 1.0;
  double h = 0.0;
  int k = 1;
};

enum class Side { bottom, top };

Trace extract_trace(const ScalarField& field, Side side);

// Trapezoid quadrature of column i over y in [0, 1].
double x_average(const ScalarField& field, int i);

// Position x_c of the first crossing (scanning from x = -M) of the column
// averages through k*pi/2, by linear interpolation between columns.
// Throws std::runtime_error("not a wall-like configuration") when no
// crossing exists.
double find_center(const ScalarField& field, int k);

// theta_new(x, y) = theta(x + shift, y), linear interpolation in x; samples
// beyond the strip take the end-column values.
ScalarField shift_x(const ScalarField& field, double shift);
Trace shift_trace(const Trace& trace, double shift);

struct Recentered {
  ScalarField field;
  double shift = 0.0;
};

Recentered recenter_with_shift(const ScalarField& field, int k);
ScalarField recenter(const ScalarField& field, const WallParams& params);

}  // namespace stripwall
