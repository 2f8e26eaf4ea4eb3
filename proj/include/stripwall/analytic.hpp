#pragma once

#include <string_view>
#include <utility>

#include <stripwall/grid.hpp>

namespace stripwall {

// Strip Dirichlet-to-Neumann kernel pi cosh(pi x) / sinh^2(pi x).
// Throws std::invalid_argument at x = 0.
double kernel_K(double x);

// Regularized kernel at depth eps in (0, 1/2); finite (and negative) at x = 0.
double kernel_K_eps(double x, double eps);

// Peierls-Nabarro approximation 1/(pi x^2) of K near the origin.
double kernel_power_law(double x);

// Fourier symbols: -k tanh(k/2) and k (sinh(k eps) - tanh(k/2) cosh(k eps)).
double symbol_Khat(double k);
double symbol_Khat_eps(double k, double eps);

// Neumann Poisson kernel of the half strip, mirrored to y in [0, 1]:
//   P(x, y) = 2 cosh(pi x) sin(pi y) / (cosh(2 pi x) - cos(2 pi y)).
// Throws std::invalid_argument at the poles (0, 0), (0, 1) and for y outside [0, 1].
double poisson_P(double x, double y);

// Closed-form integral of P(., y) over (-inf, x]; y in (0, 1).
double poisson_P_cdf(double x, double y);

enum class Profile { transverse_1d, small_gamma, ode_wall, boundary_vortex, large_gamma_2d };

// Throws std::invalid_argument for an unknown name.
Profile parse_profile(std::string_view name);
std::string_view to_string(Profile p);

// Angle form of each profile. gamma is ignored where it does not enter, y
// is used only by large_gamma_2d.
double profile_angle(Profile p, double x, double y = 0.5, double gamma = 1.0);

// m = (tanh(x/sqrt2), sech(x/sqrt2)); angle 2 arctan(exp(-x/sqrt2)).
std::pair<double, double> transverse_1d_m(double x);
double transverse_1d(double x);
// pi - 2 arctan(exp(2x))
double small_gamma(double x);
// 2 arctan(exp(2 sqrt(gamma) x)); decreasing variant via x -> -x
double ode_wall(double x, double gamma);
// pi/2 - arctan(2 gamma x)
double boundary_vortex(double x, double gamma);
// pi/2 - arctan(sinh(pi x) / sin(pi y)), continuous up to y = 0, 1 for x != 0
double large_gamma_2d(double x, double y);
// Smoothed variant: pi/2 - arctan(sinh(pi(1-2eps)x) / sin(pi((1-2eps)y + eps))),
// harmonic, even about y = 1/2, smooth trace for eps > 0.
double large_gamma_2d_eps(double x, double y, double eps);

// Centered second difference minus 2 gamma sin(2 theta) at interior samples
// (the returned trace starts one spacing after the input).
Trace residual_ode(const Trace& trace, double gamma);

}  // namespace stripwall
