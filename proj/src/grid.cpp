#include <stripwall/grid.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stripwall {

bool operator==(const StripGrid& a, const StripGrid& b) {
  return a.half_length == b.half_length && a.nx == b.nx && a.ny == b.ny;
}

StripGrid build_grid(double M, int nx, int ny) {
  if (!(M > 0.0) || !std::isfinite(M))
    throw std::invalid_argument("build_grid: half-length M must be positive, got " + std::to_string(M));
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("build_grid: node counts must be >= 3");
  StripGrid g;
  g.half_length = M;
  g.nx = nx;
  g.ny = ny;
  g.hx = 2.0 * M / (nx - 1);
  g.hy = 1.0 / (ny - 1);
  return g;
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

std::vector<double> Trace::xs() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
  return out;
}

Trace extract_trace(const ScalarField& field, Side side) {
  const auto& g = field.grid;
  const int j = side == Side::bottom ? 0 : g.ny - 1;
  Trace t;
  t.x0 = g.x(0);
  t.spacing = g.hx;
  t.values.resize(g.nx);
  for (int i = 0; i < g.nx; ++i) t.values[i] = field(i, j);
  return t;
}

double x_average(const ScalarField& field, int i) {
  const auto& g = field.grid;
  if (i < 0 || i >= g.nx)
    throw std::out_of_range("x_average: column index " + std::to_string(i) + " out of range");
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j) s += g.wy(j) * field(i, j);
  return s * g.hy;
}

double find_center(const ScalarField& field, int k) {
  const auto& g = field.grid;
  const double target = k * std::numbers::pi / 2.0;
  double prev = x_average(field, 0) - target;
  if (prev == 0.0) return g.x(0);
  for (int i = 1; i < g.nx; ++i) {
    const double cur = x_average(field, i) - target;
    if (cur == 0.0) return g.x(i);
    if ((prev < 0.0) != (cur < 0.0)) {
      const double t = prev / (prev - cur);
      return g.x(i - 1) + t * g.hx;
    }
    prev = cur;
  }
  throw std::runtime_error("not a wall-like configuration: column averages never cross k*pi/2");
}

namespace {

// Linear interpolation of samples at fractional index t, clamped to the ends.
template <typename Get>
double interp_index(double t, int n, Get&& get) {
  if (t <= 0.0) return get(0);
  if (t >= n - 1) return get(n - 1);
  const double fl = std::floor(t);
  const int l = static_cast<int>(fl);
  const double frac = t - fl;
  if (frac == 0.0) return get(l);
  return (1.0 - frac) * get(l) + frac * get(l + 1);
}

}  // namespace

ScalarField shift_x(const ScalarField& field, double shift) {
  const auto& g = field.grid;
  ScalarField out(g);
  const double di = shift / g.hx;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = interp_index(i + di, g.nx, [&](int l) { return field(l, j); });
  return out;
}

Trace shift_trace(const Trace& trace, double shift) {
  Trace out = trace;
  const double di = shift / trace.spacing;
  const int n = static_cast<int>(trace.size());
  for (int i = 0; i < n; ++i)
    out.values[i] = interp_index(i + di, n, [&](int l) { return trace.values[l]; });
  return out;
}

Recentered recenter_with_shift(const ScalarField& field, int k) {
  const double xc = find_center(field, k);
  return {shift_x(field, xc), xc};
}

ScalarField recenter(const ScalarField& field, const WallParams& params) {
  return recenter_with_shift(field, params.k).field;
}

}  // namespace stripwall
