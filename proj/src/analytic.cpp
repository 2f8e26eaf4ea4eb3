#include <stripwall/analytic.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stripwall {

namespace {

constexpr double pi = std::numbers::pi;

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2), got " + std::to_string(eps));
}

}  // namespace

double kernel_K(double x) {
  if (x == 0.0) throw std::invalid_argument("kernel_K: singular at x = 0");
  // written in u = exp(-pi|x|) so large |x| does not overflow
  const double ax = std::abs(x);
  const double u = std::exp(-pi * ax);
  const double one_minus_u2 = -std::expm1(-2.0 * pi * ax);
  return 2.0 * pi * u * (1.0 + u * u) / (one_minus_u2 * one_minus_u2);
}

double kernel_K_eps(double x, double eps) {
  check_eps(eps);
  const double ax = std::abs(x);
  const double u = std::exp(-pi * ax);
  const double a = -std::expm1(-2.0 * pi * ax);  // 1 - u^2
  const double s = std::sin(pi * eps);
  const double b = 4.0 * s * s * u * u;  // 2 (1 - cos 2 pi eps) u^2
  const double den = a * a + b;
  return 2.0 * pi * std::cos(pi * eps) * (1.0 + u * u) * u * (a * a - b) / (den * den);
}

double kernel_power_law(double x) {
  if (x == 0.0) throw std::invalid_argument("kernel_power_law: singular at x = 0");
  return 1.0 / (pi * x * x);
}

double symbol_Khat(double k) { return -k * std::tanh(0.5 * k); }

double symbol_Khat_eps(double k, double eps) {
  check_eps(eps);
  const double ak = std::abs(k);
  // -|k| sinh(|k|(1/2 - eps)) / cosh(|k|/2)
  return -ak * std::exp(-ak * eps) * -std::expm1(-ak * (1.0 - 2.0 * eps)) / (1.0 + std::exp(-ak));
}

double poisson_P(double x, double y) {
  if (!(y >= 0.0 && y <= 1.0)) throw std::invalid_argument("poisson_P: y must lie in [0, 1]");
  if (x == 0.0 && (y == 0.0 || y == 1.0)) throw std::invalid_argument("poisson_P: pole at a boundary origin");
  const double ax = std::abs(x);
  const double u = std::exp(-pi * ax);
  const double a = -std::expm1(-2.0 * pi * ax);
  const double s = std::sin(pi * y);
  return 2.0 * s * (1.0 + u * u) * u / (a * a + 4.0 * s * s * u * u);
}

double poisson_P_cdf(double x, double y) {
  if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("poisson_P_cdf: y must lie in (0, 1)");
  return 0.5 + std::atan2(std::sinh(pi * x), std::sin(pi * y)) / pi;
}

Profile parse_profile(std::string_view name) {
  if (name == "transverse_1d") return Profile::transverse_1d;
  if (name == "small_gamma") return Profile::small_gamma;
  if (name == "ode_wall") return Profile::ode_wall;
  if (name == "boundary_vortex") return Profile::boundary_vortex;
  if (name == "large_gamma_2d") return Profile::large_gamma_2d;
  throw std::invalid_argument("unknown profile '" + std::string(name) + "'");
}

std::string_view to_string(Profile p) {
  switch (p) {
    case Profile::transverse_1d: return "transverse_1d";
    case Profile::small_gamma: return "small_gamma";
    case Profile::ode_wall: return "ode_wall";
    case Profile::boundary_vortex: return "boundary_vortex";
    case Profile::large_gamma_2d: return "large_gamma_2d";
  }
  return "unknown";
}

std::pair<double, double> transverse_1d_m(double x) {
  const double s = x / std::numbers::sqrt2;
  return {std::tanh(s), 1.0 / std::cosh(s)};
}

double transverse_1d(double x) { return 2.0 * std::atan(std::exp(-x / std::numbers::sqrt2)); }

double small_gamma(double x) { return pi - 2.0 * std::atan(std::exp(2.0 * x)); }

double ode_wall(double x, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("ode_wall: gamma must be positive");
  return 2.0 * std::atan(std::exp(2.0 * std::sqrt(gamma) * x));
}

double boundary_vortex(double x, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("boundary_vortex: gamma must be positive");
  return 0.5 * pi - std::atan(2.0 * gamma * x);
}

double large_gamma_2d(double x, double y) {
  // atan2 keeps the y = 0, 1 limits (pi for x < 0, 0 for x > 0)
  return 0.5 * pi - std::atan2(std::sinh(pi * x), std::sin(pi * y));
}

double large_gamma_2d_eps(double x, double y, double eps) {
  if (!(eps >= 0.0 && eps < 0.5)) throw std::invalid_argument("large_gamma_2d_eps: eps must lie in [0, 1/2)");
  const double c = 1.0 - 2.0 * eps;
  return 0.5 * pi - std::atan2(std::sinh(pi * c * x), std::sin(pi * (c * y + eps)));
}

double profile_angle(Profile p, double x, double y, double gamma) {
  switch (p) {
    case Profile::transverse_1d: return transverse_1d(x);
    case Profile::small_gamma: return small_gamma(x);
    case Profile::ode_wall: return ode_wall(x, gamma);
    case Profile::boundary_vortex: return boundary_vortex(x, gamma);
    case Profile::large_gamma_2d: return large_gamma_2d(x, y);
  }
  throw std::invalid_argument("unknown profile");
}

Trace residual_ode(const Trace& trace, double gamma) {
  if (trace.size() < 3) throw std::invalid_argument("residual_ode: need at least 3 samples");
  const double h2 = trace.spacing * trace.spacing;
  Trace r;
  r.x0 = trace.x(1);
  r.spacing = trace.spacing;
  r.values.resize(trace.size() - 2);
  for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
    const double t = trace.values[i];
    r.values[i - 1] = (trace.values[i + 1] - 2.0 * t + trace.values[i - 1]) / h2 - 2.0 * gamma * std::sin(2.0 * t);
  }
  return r;
}

}  // namespace stripwall
