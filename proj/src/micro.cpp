#include <stripwall/micro.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <stripwall/io.hpp>
#include <stripwall/optimizer.hpp>
#include <stripwall/parallel.hpp>

#include "fft.hpp"

namespace stripwall {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double euler_gamma = std::numbers::egamma;

struct Gauss {
  std::vector<double> x, w;  // on [-1, 1]
};

Gauss gauss_legendre(int n) {
  Gauss g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.x[i] = z;
    g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

const Gauss& gl(int n) {
  static const Gauss g3 = gauss_legendre(3), g4 = gauss_legendre(4), g8 = gauss_legendre(8),
                     g16 = gauss_legendre(16);
  switch (n) {
    case 3: return g3;
    case 4: return g4;
    case 8: return g8;
    default: return g16;
  }
}

double bessel_k0(double z) { return std::cyl_bessel_k(0.0, z); }
double bessel_k1(double z) { return std::cyl_bessel_k(1.0, z); }

// T(z) = int_z^inf K0 on [2, 60] (cubic Hermite table, T' = -K0).
class K0TailTable {
 public:
  K0TailTable() {
    const int n = static_cast<int>(std::lround((zmax - zmin) / step));
    t_.assign(n + 1, 0.0);
    d_.assign(n + 1, 0.0);
    const Gauss& g = gl(8);
    double acc = 0.0;
    for (int i = n; i >= 0; --i) {
      const double z = zmin + i * step;
      d_[i] = -bessel_k0(z);
      t_[i] = acc;
      if (i > 0) {
        const double a = z - step;
        double s = 0.0;
        for (int q = 0; q < 8; ++q) s += g.w[q] * bessel_k0(a + 0.5 * step * (g.x[q] + 1.0));
        acc += 0.5 * step * s;
      }
    }
  }
  double operator()(double z) const {
    if (z >= zmax) return 0.0;
    const double u = (z - zmin) / step;
    const int i = std::clamp(static_cast<int>(u), 0, static_cast<int>(t_.size()) - 2);
    const double s = u - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * t_[i] + h10 * step * d_[i] + h01 * t_[i + 1] + h11 * step * d_[i + 1];
  }
  static constexpr double zmin = 2.0, zmax = 60.0, step = 0.01;

 private:
  std::vector<double> t_, d_;
};

const K0TailTable& k0_tail() {
  static const K0TailTable table;
  return table;
}

// Psi(Z) = int_0^Z (Z - u) K0(u) du, so that d^2/ds^2 Psi(kappa|s|)/kappa^2 = K0(kappa|s|).
double psi_k0(double Z) {
  if (Z <= 0.0) return 0.0;
  if (Z <= 2.0) {
    const double lnz = std::log(Z);
    double c = 1.0;  // (1/4)^m / (m!)^2
    double Hm = 0.0;
    double zp = Z * Z;
    double s = 0.0;
    for (int m = 0; m < 30; ++m) {
      if (m > 0) {
        c /= 4.0 * m * m;
        Hm += 1.0 / m;
        zp *= Z * Z;
      }
      const double n1 = 2.0 * m + 1.0, n2 = 2.0 * m + 2.0;
      const double term = c * zp * ((std::numbers::ln2 - euler_gamma + Hm - lnz) / (n1 * n2) + 1.0 / (n1 * n1) -
                                    1.0 / (n2 * n2));
      s += term;
      if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    return s;
  }
  const double ki = 0.5 * pi - k0_tail()(Z);
  const double zk1 = Z < 700.0 ? Z * bessel_k1(Z) : 0.0;
  return Z * ki + zk1 - 1.0;
}

// F(x, y) = int_0^x int_0^y dk1 dk2 / |k|, odd in each argument.
double inv_norm_primitive(double x, double y) {
  const double ax = std::abs(x), ay = std::abs(y);
  if (ax == 0.0 || ay == 0.0) return 0.0;
  const double v = ax * std::asinh(ay / ax) + ay * std::asinh(ax / ay);
  return ((x < 0) != (y < 0)) ? -v : v;
}

// Mean of 1/(2 pi |k|) over [k1 - a, k1 + a] x [k2 - b, k2 + b].
double cell_average_weight(double k1, double k2, double a, double b) {
  const double I = inv_norm_primitive(k1 + a, k2 + b) - inv_norm_primitive(k1 - a, k2 + b) -
                   inv_norm_primitive(k1 + a, k2 - b) + inv_norm_primitive(k1 - a, k2 - b);
  return I / (4.0 * a * b) / (2.0 * pi);
}

bool is_multiple_of_pi(double v) { return std::abs(std::sin(v)) <= 1e-12; }

void check_caps(const ScalarField& theta) {
  const auto& g = theta.grid;
  for (int i : {0, g.nx - 1}) {
    const double c = theta(i, 0);
    for (int j = 0; j < g.ny; ++j)
      if (theta(i, j) != c || !is_multiple_of_pi(theta(i, j)))
        throw std::invalid_argument(
            "non-constant tails: cap columns must be constant multiples of pi so that div(eta m) has compact "
            "support");
  }
}

}  // namespace

void validate(const MicroParams& p) {
  if (!(p.eps > 0.0 && p.eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
  if (!(p.pad_factor >= 2.0)) throw std::invalid_argument("pad_factor must be >= 2");
}

double eta(double t, EtaProfile profile) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return profile == EtaProfile::smoothstep ? t * t * (3.0 - 2.0 * t) : t * (2.0 - t);
}

double eta_prime(double t, EtaProfile profile) {
  if (t <= 0.0 || t >= 1.0) return profile == EtaProfile::linear_c1 && t == 0.0 ? 2.0 : 0.0;
  return profile == EtaProfile::smoothstep ? 6.0 * t * (1.0 - t) : 2.0 * (1.0 - t);
}

double eta_eps(double y, const MicroParams& p) { return eta(std::min(y, 1.0 - y) / p.eps, p.eta); }

double eta_eps_prime(double y, const MicroParams& p) {
  const double d = std::min(y, 1.0 - y);
  const double s = y <= 0.5 ? 1.0 : -1.0;
  return s * eta_prime(d / p.eps, p.eta) / p.eps;
}

ScalarField div_eta_m(const ScalarField& theta, const MicroParams& p) {
  validate(p);
  check_caps(theta);
  const auto& g = theta.grid;
  ScalarField out(g);
  auto m1 = [&](int i, int j) { return std::cos(theta(std::clamp(i, 0, g.nx - 1), j)); };
  auto m2 = [&](int i, int j) { return std::sin(theta(i, j)); };
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.y(j);
    const double e = eta_eps(y, p), ep = eta_eps_prime(y, p);
    for (int i = 0; i < g.nx; ++i) {
      const double dx = (m1(i + 1, j) - m1(i - 1, j)) / (2.0 * g.hx);
      double dy;
      if (j == 0)
        dy = (-3.0 * m2(i, 0) + 4.0 * m2(i, 1) - m2(i, 2)) / (2.0 * g.hy);
      else if (j == g.ny - 1)
        dy = (3.0 * m2(i, j) - 4.0 * m2(i, j - 1) + m2(i, j - 2)) / (2.0 * g.hy);
      else
        dy = (m2(i, j + 1) - m2(i, j - 1)) / (2.0 * g.hy);
      out(i, j) = e * dx + e * dy + ep * m2(i, j);
    }
  }
  return out;
}

UniformCharge as_charge(const ScalarField& div) {
  UniformCharge c;
  c.x0 = div.grid.x(0);
  c.y0 = 0.0;
  c.hx = div.grid.hx;
  c.hy = div.grid.hy;
  c.nx = div.grid.nx;
  c.ny = div.grid.ny;
  c.values = div.values;
  return c;
}

namespace {

struct Spectrum2 {
  std::vector<std::complex<double>> F;
  int Nx = 0, Ny = 0;
  double dk1 = 0.0, dk2 = 0.0;
};

Spectrum2 spectrum(const UniformCharge& f, double pad) {
  if (!(pad >= 2.0))
    throw std::invalid_argument("nonlocal_energy: pad_factor < 2 lets the support touch the pad boundary");
  if (f.nx < 1 || f.ny < 1 || f.values.size() != static_cast<std::size_t>(f.nx) * f.ny)
    throw std::invalid_argument("nonlocal_energy: malformed charge array");
  Spectrum2 s;
  s.Nx = detail::good_fft_size(static_cast<int>(std::ceil(pad * f.nx)));
  s.Ny = detail::good_fft_size(static_cast<int>(std::ceil(pad * f.ny)));
  std::vector<double> buf(static_cast<std::size_t>(s.Nx) * s.Ny, 0.0);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) buf[static_cast<std::size_t>(j) * s.Nx + i] = f.values[j * f.nx + i];
  detail::RealFft2 fft(s.Ny, s.Nx);
  s.F = fft.forward(buf);
  const double area = f.hx * f.hy;
  for (auto& v : s.F) v *= area;
  s.dk1 = 2.0 * pi / (s.Nx * f.hx);
  s.dk2 = 2.0 * pi / (s.Ny * f.hy);
  return s;
}

double spectral_form(const Spectrum2& a, const Spectrum2& b) {
  const int b1 = a.Nx / 2 + 1;
  std::vector<double> rows(a.Ny, 0.0);
  for (int q2 = 0; q2 < a.Ny; ++q2) {
    const int s2 = q2 <= a.Ny / 2 ? q2 : q2 - a.Ny;
    const double k2 = s2 * a.dk2;
    double acc = 0.0;
    for (int q1 = 0; q1 < b1; ++q1) {
      const double k1 = q1 * a.dk1;
      const double mult = (q1 == 0 || (a.Nx % 2 == 0 && q1 == a.Nx / 2)) ? 1.0 : 2.0;
      double w;
      if (q1 <= 8 && std::abs(s2) <= 8)
        w = cell_average_weight(k1, k2, 0.5 * a.dk1, 0.5 * a.dk2);
      else
        w = 1.0 / (2.0 * pi * std::hypot(k1, k2));
      const std::size_t idx = static_cast<std::size_t>(q2) * b1 + q1;
      acc += mult * w * (a.F[idx] * std::conj(b.F[idx])).real();
    }
    rows[q2] = acc;
  }
  return pairwise_sum(rows) * a.dk1 * a.dk2;
}

}  // namespace

double nonlocal_energy(const UniformCharge& f, double pad_factor) {
  const Spectrum2 s = spectrum(f, pad_factor);
  return spectral_form(s, s);
}

double nonlocal_energy(const ScalarField& div, const MicroParams& p) {
  validate(p);
  return nonlocal_energy(as_charge(div), p.pad_factor);
}

double nonlocal_bilinear(const UniformCharge& f, const UniformCharge& g, double pad_factor) {
  if (f.nx != g.nx || f.ny != g.ny || f.hx != g.hx || f.hy != g.hy)
    throw std::invalid_argument("nonlocal_bilinear: charges must share a box");
  return spectral_form(spectrum(f, pad_factor), spectrum(g, pad_factor));
}

namespace {

// J(d) = int over two unit squares offset by d of 1/|r - r'|
//      = int_{[-1,1]^2} (1 - |u|)(1 - |v|) / |d + (u, v)|.
// Quadrant by quadrant: the singular point -d is either a quadrant corner
// (Duffy split into two triangles) or at distance >= 1 (plain product rule).
double unit_pair_integral(int d1, int d2) {
  const Gauss& q = gl(16);
  double total = 0.0;
  for (int su : {-1, 1})
    for (int sv : {-1, 1}) {
      // quadrant u in [0, su], v in [0, sv]; weight (1 - |u|)(1 - |v|)
      const int cu = -d1, cv = -d2;  // singular point
      const bool corner = (cu == 0 || cu == su) && (cv == 0 || cv == sv);
      if (!corner) {
        double s = 0.0;
        for (int a = 0; a < 16; ++a) {
          const double t = 0.5 * (q.x[a] + 1.0), u = su * t;
          for (int b = 0; b < 16; ++b) {
            const double w = 0.5 * (q.x[b] + 1.0), v = sv * w;
            s += 0.25 * q.w[a] * q.w[b] * (1.0 - t) * (1.0 - w) / std::hypot(d1 + u, d2 + v);
          }
        }
        total += s;
        continue;
      }
      // local coordinates from the singular corner: u = cu + su' s, v = cv + sv' t
      const double du = cu == 0 ? su : -su, dv = cv == 0 ? sv : -sv;
      double s = 0.0;
      for (int tri = 0; tri < 2; ++tri)
        for (int a = 0; a < 16; ++a) {
          const double rho = 0.5 * (q.x[a] + 1.0);
          for (int b = 0; b < 16; ++b) {
            const double tau = 0.5 * (q.x[b] + 1.0);
            const double ls = tri == 0 ? rho : rho * tau, lt = tri == 0 ? rho * tau : rho;
            const double u = cu + du * ls, v = cv + dv * lt;
            const double wt = (1.0 - std::abs(u)) * (1.0 - std::abs(v));
            // 1/r * jacobian rho = 1 / sqrt(1 + tau^2)
            s += 0.25 * q.w[a] * q.w[b] * wt / std::sqrt(1.0 + tau * tau);
          }
        }
      total += s;
    }
  return total;
}

constexpr int near_range = 3;

const std::vector<double>& near_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t((near_range + 1) * (near_range + 1));
    for (int a = 0; a <= near_range; ++a)
      for (int b = 0; b <= near_range; ++b) t[a * (near_range + 1) + b] = unit_pair_integral(a, b);
    // closed form for the self pair
    t[0] = 4.0 * std::log(1.0 + std::numbers::sqrt2) - 4.0 / 3.0 * (std::numbers::sqrt2 - 1.0);
    return t;
  }();
  return table;
}

}  // namespace

double nonlocal_energy_direct(const UniformCharge& f) {
  if (std::abs(f.hx - f.hy) > 1e-12 * f.hx)
    throw std::invalid_argument("nonlocal_energy_direct: square cells required");
  const double h = f.hx;
  const auto& near = near_table();
  const int n = f.nx * f.ny;
  std::vector<double> part(n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (int p = 0; p < n; ++p) {
    const double fp = f.values[p];
    if (fp == 0.0) continue;
    const int ip = p % f.nx, jp = p / f.nx;
    double acc = 0.0;
    for (int q = 0; q < n; ++q) {
      const double fq = f.values[q];
      if (fq == 0.0) continue;
      const int di = std::abs(q % f.nx - ip), dj = std::abs(q / f.nx - jp);
      if (di <= near_range && dj <= near_range)
        acc += fq * near[di * (near_range + 1) + dj];
      else
        acc += fq / std::hypot(static_cast<double>(di), static_cast<double>(dj));
    }
    part[p] = fp * acc * h * h * h;
  }
  return pairwise_sum(part);
}

// ---------------------------------------------------------------------------

struct StripNonlocal::Impl {
  StripGrid g;
  MicroParams p;
  std::vector<double> edges;  // cell boundaries in y
  struct Cell {
    double c0, c1;
    int J;                   // node interval [y_J, y_{J+1}] containing the cell
    double a_lo, a_hi;       // d_y(eta m2) cell-average weights on m2(J), m2(J+1)
    double alpha, beta;      // eta-weighted interpolation weights for d_x m1
  };
  std::vector<Cell> cells;
  int Nx = 0;
  int bins = 0;
  double dk = 0.0;
  std::vector<std::vector<double>> kernel;  // per bin, nc x nc symmetric
  std::unique_ptr<detail::RealFft> fft;

  void build_cells() {
    const double eps = p.eps;
    std::vector<double> pts;
    for (int j = 0; j < g.ny; ++j) pts.push_back(g.y(j));
    for (int i = 0; i <= 8; ++i) {
      pts.push_back(eps * i / 8.0);
      pts.push_back(1.0 - eps * i / 8.0);
    }
    for (double y = eps * 1.5; y < 0.5 && y * 0.5 / 1.5 < 0.5 * g.hy; y *= 1.5) {
      pts.push_back(y);
      pts.push_back(1.0 - y);
    }
    std::sort(pts.begin(), pts.end());
    edges.clear();
    for (double v : pts) {
      v = std::clamp(v, 0.0, 1.0);
      if (edges.empty() || v - edges.back() > 1e-12) edges.push_back(v);
    }
    edges.back() = 1.0;
    const Gauss& q = gl(4);
    for (std::size_t a = 0; a + 1 < edges.size(); ++a) {
      Cell c;
      c.c0 = edges[a];
      c.c1 = edges[a + 1];
      const double mid = 0.5 * (c.c0 + c.c1);
      c.J = std::clamp(static_cast<int>(std::floor(mid / g.hy)), 0, g.ny - 2);
      const double yJ = g.y(c.J);
      auto t = [&](double y) { return (y - yJ) / g.hy; };
      const double d = c.c1 - c.c0;
      const double e0 = eta_eps(c.c0, p), e1 = eta_eps(c.c1, p);
      c.a_lo = (e1 * (1.0 - t(c.c1)) - e0 * (1.0 - t(c.c0))) / d;
      c.a_hi = (e1 * t(c.c1) - e0 * t(c.c0)) / d;
      double al = 0.0, be = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double y = mid + 0.5 * d * q.x[k];
        const double e = eta_eps(y, p);
        al += 0.5 * q.w[k] * e * (1.0 - t(y));
        be += 0.5 * q.w[k] * e * t(y);
      }
      c.alpha = al;
      c.beta = be;
      cells.push_back(c);
    }
  }

  // (1/pi) int_a int_b K0(kappa |y - y'|) dy dy'
  double pair_integral(const Cell& a, const Cell& b, double kappa) const {
    const double gap = std::max(0.0, std::max(a.c0, b.c0) - std::min(a.c1, b.c1));
    if (kappa * gap > 50.0) return 0.0;
    const double da = a.c1 - a.c0, db = b.c1 - b.c0;
    if (gap >= 4.0 * std::max(da, db)) {
      const Gauss& q = gl(3);
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double ya = 0.5 * (a.c0 + a.c1) + 0.5 * da * q.x[i];
        for (int j = 0; j < 3; ++j) {
          const double yb = 0.5 * (b.c0 + b.c1) + 0.5 * db * q.x[j];
          s += q.w[i] * q.w[j] * bessel_k0(kappa * std::abs(ya - yb));
        }
      }
      return s * 0.25 * da * db / pi;
    }
    const double v = psi_k0(kappa * std::abs(a.c1 - b.c0)) - psi_k0(kappa * std::abs(a.c1 - b.c1)) -
                     psi_k0(kappa * std::abs(a.c0 - b.c0)) + psi_k0(kappa * std::abs(a.c0 - b.c1));
    return v / (pi * kappa * kappa);
  }

  // Mean of the pair integrals over the frequency cell of bin q.
  std::vector<double> bin_kernel(int q) const {
    const int nc = static_cast<int>(cells.size());
    std::vector<double> K(static_cast<std::size_t>(nc) * nc, 0.0);
    std::vector<std::pair<double, double>> nodes;  // (kappa, weight), weights sum to 1
    const double half = 0.5 * dk;
    if (q == 0) {
      // kappa = half t^3 takes the log singularity at kappa = 0
      const Gauss& gq = gl(16);
      for (int i = 0; i < 16; ++i) {
        const double t = 0.5 * (gq.x[i] + 1.0);
        nodes.emplace_back(half * t * t * t, 0.5 * gq.w[i] * 3.0 * t * t);
      }
    } else if (q <= 3) {
      const Gauss& gq = gl(8);
      for (int i = 0; i < 8; ++i) nodes.emplace_back(q * dk + half * gq.x[i], 0.5 * gq.w[i]);
    } else {
      nodes.emplace_back(q * dk, 1.0);
    }
    for (int a = 0; a < nc; ++a)
      for (int b = a; b < nc; ++b) {
        double s = 0.0;
        for (const auto& [kappa, w] : nodes) s += w * pair_integral(cells[a], cells[b], kappa);
        K[static_cast<std::size_t>(a) * nc + b] = s;
        K[static_cast<std::size_t>(b) * nc + a] = s;
      }
    return K;
  }
};

StripNonlocal::StripNonlocal(const StripGrid& grid, const MicroParams& p) : impl_(std::make_unique<Impl>()) {
  validate(p);
  impl_->g = grid;
  impl_->p = p;
  impl_->build_cells();
  impl_->Nx = detail::good_fft_size(static_cast<int>(std::ceil(p.pad_factor * grid.nx)));
  impl_->bins = impl_->Nx / 2 + 1;
  impl_->dk = 2.0 * pi / (impl_->Nx * grid.hx);
  impl_->fft = std::make_unique<detail::RealFft>(impl_->Nx);
  impl_->kernel.resize(impl_->bins);
  const int bins = impl_->bins;
  Impl* im = impl_.get();
#pragma omp parallel for schedule(dynamic, 4)
  for (int q = 0; q < bins; ++q) im->kernel[q] = im->bin_kernel(q);
}

StripNonlocal::~StripNonlocal() = default;

const std::vector<double>& StripNonlocal::cell_edges() const { return impl_->edges; }
const StripGrid& StripNonlocal::grid() const { return impl_->g; }

double StripNonlocal::evaluate(const ScalarField& theta) const {
  if (!(theta.grid == impl_->g)) throw std::invalid_argument("StripNonlocal: field on a different grid");
  return evaluate(theta.values, {});
}

double StripNonlocal::evaluate(std::span<const double> theta, std::span<double> grad) const {
  const Impl& im = *impl_;
  const StripGrid& g = im.g;
  const int nx = g.nx, ny = g.ny, nc = static_cast<int>(im.cells.size());
  const int bins = im.bins;
  std::vector<double> m1(g.size()), m2(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    m1[k] = std::cos(theta[k]);
    m2[k] = std::sin(theta[k]);
  }
  // D(j, J) = centered d_x m1, caps extended as constants
  std::vector<double> D(g.size());
  for (int J = 0; J < ny; ++J)
    for (int j = 0; j < nx; ++j) {
      const double r = m1[g.index(std::min(j + 1, nx - 1), J)];
      const double l = m1[g.index(std::max(j - 1, 0), J)];
      D[g.index(j, J)] = (r - l) / (2.0 * g.hx);
    }
  // spectra per cell, stored [bin][cell]
  std::vector<std::complex<double>> F(static_cast<std::size_t>(bins) * nc);
  std::vector<double> buf(im.Nx, 0.0);
  for (int a = 0; a < nc; ++a) {
    const auto& c = im.cells[a];
    std::fill(buf.begin(), buf.end(), 0.0);
    for (int j = 0; j < nx; ++j) {
      const std::size_t lo = g.index(j, c.J), hi = g.index(j, c.J + 1);
      buf[j] = c.a_lo * m2[lo] + c.a_hi * m2[hi] + c.alpha * D[lo] + c.beta * D[hi];
    }
    const auto s = im.fft->forward(buf);
    for (int q = 0; q < bins; ++q) F[static_cast<std::size_t>(q) * nc + a] = s[q] * g.hx;
  }
  std::vector<std::complex<double>> U(F.size());
  std::vector<double> per_bin(bins, 0.0);
#pragma omp parallel for schedule(static)
  for (int q = 0; q < bins; ++q) {
    const double* K = im.kernel[q].data();
    const std::complex<double>* f = &F[static_cast<std::size_t>(q) * nc];
    std::complex<double>* u = &U[static_cast<std::size_t>(q) * nc];
    double acc = 0.0;
    for (int a = 0; a < nc; ++a) {
      std::complex<double> s = 0.0;
      for (int b = 0; b < nc; ++b) s += K[static_cast<std::size_t>(a) * nc + b] * f[b];
      u[a] = s;
      acc += (std::conj(f[a]) * s).real();
    }
    const double mult = (q == 0 || (im.Nx % 2 == 0 && q == im.Nx / 2)) ? 1.0 : 2.0;
    per_bin[q] = mult * acc;
  }
  const double N = im.dk * pairwise_sum(per_bin);
  if (grad.empty()) return N;

  std::vector<double> gm1(g.size(), 0.0), gm2(g.size(), 0.0), gD(g.size(), 0.0);
  std::vector<std::complex<double>> spec(bins);
  for (int a = 0; a < nc; ++a) {
    const auto& c = im.cells[a];
    for (int q = 0; q < bins; ++q) spec[q] = U[static_cast<std::size_t>(q) * nc + a];
    const auto v = im.fft->inverse(spec);
    const double scale = 2.0 * im.dk * g.hx;
    for (int j = 0; j < nx; ++j) {
      const double G = scale * v[j];
      const std::size_t lo = g.index(j, c.J), hi = g.index(j, c.J + 1);
      gm2[lo] += G * c.a_lo;
      gm2[hi] += G * c.a_hi;
      gD[lo] += G * c.alpha;
      gD[hi] += G * c.beta;
    }
  }
  for (int J = 0; J < ny; ++J)
    for (int j = 0; j < nx; ++j) {
      const double e = gD[g.index(j, J)] / (2.0 * g.hx);
      gm1[g.index(std::min(j + 1, nx - 1), J)] += e;
      gm1[g.index(std::max(j - 1, 0), J)] -= e;
    }
  for (std::size_t k = 0; k < g.size(); ++k) grad[k] = -m2[k] * gm1[k] + m1[k] * gm2[k];
  return N;
}

// ---------------------------------------------------------------------------

double boundary_m2_integral(const ScalarField& theta) {
  const auto& g = theta.grid;
  std::vector<double> v(2 * g.nx);
  for (int i = 0; i < g.nx; ++i) {
    const double b = std::sin(theta(i, 0)), t = std::sin(theta(i, g.ny - 1));
    v[i] = g.wx(i) * b * b * g.hx;
    v[g.nx + i] = g.wx(i) * t * t * g.hx;
  }
  return pairwise_sum(v);
}

double exchange_energy_m(const ScalarField& theta) {
  const auto& g = theta.grid;
  std::vector<double> rows(g.ny, 0.0);
  auto edge = [](double a, double b) {
    const double tb = 0.5 * (a + b), d = b - a;
    const double g1 = -std::sin(tb) * d, g2 = std::cos(tb) * d;
    return g1 * g1 + g2 * g2;
  };
  for (int j = 0; j < g.ny; ++j) {
    double s = 0.0;
    for (int i = 0; i + 1 < g.nx; ++i) s += g.wy(j) * g.hy / g.hx * edge(theta(i, j), theta(i + 1, j));
    if (j + 1 < g.ny)
      for (int i = 0; i < g.nx; ++i) s += g.wx(i) * g.hx / g.hy * edge(theta(i, j), theta(i, j + 1));
    rows[j] = s;
  }
  return 0.5 * pairwise_sum(rows);
}

namespace {

double log_scale(const WallParams& params, const MicroParams& p) {
  return params.gamma / (2.0 * std::abs(std::log(p.eps)));
}

}  // namespace

EnergyBreakdown energy_Eeps(const ScalarField& theta, const WallParams& params, const MicroParams& p) {
  validate(p);
  check_caps(theta);
  WallParams local = params;
  local.gamma = 0.0;
  EnergyBreakdown e = energy_F(theta, local);
  const StripNonlocal nl(theta.grid, p);
  e.boundary = 0.0;
  e.nonlocal = log_scale(params, p) * nl.evaluate(theta);
  e.total = e.dirichlet + e.zeeman + e.nonlocal;
  return e;
}

EnergyBreakdown energy_E0(const ScalarField& theta, const WallParams& params) { return energy_F(theta, params); }

SolveReport minimize_Eeps(const StripGrid& g, const WallParams& params, const MicroParams& p,
                          const SolveOptions& opts) {
  validate(p);
  auto nl = std::make_shared<StripNonlocal>(g, p);
  const double scale = log_scale(params, p);
  WallParams local = params;
  local.gamma = 0.0;
  SolveReport r = minimize_strip(g, params, opts, [nl, scale, local, &g](std::span<const double> x,
                                                                         std::span<double> grad) {
    std::vector<double> gn(x.size());
    const double e = energy_and_grad(g, local, x, grad);
    const double n = nl->evaluate(x, gn);
    for (std::size_t k = 0; k < x.size(); ++k) grad[k] += scale * gn[k];
    return e + scale * n;
  });
  EnergyBreakdown e = energy_F(r.field, local);
  e.boundary = 0.0;
  e.nonlocal = scale * nl->evaluate(r.field);
  e.total = e.dirichlet + e.zeeman + e.nonlocal;
  r.energy = e;
  return r;
}

TrendTable gamma_trend_experiment(const WallParams& params, const std::vector<double>& eps_list,
                                  const StripGrid& grid, const SolveOptions& opts, EtaProfile eta_profile,
                                  double pad_factor) {
  if (eps_list.empty()) throw std::invalid_argument("gamma_trend_experiment: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0 && eps_list[i] < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("gamma_trend_experiment: eps list must be strictly decreasing");
  }
  TrendTable table;
  const SolveReport base = minimize_wall(grid, params, opts);
  table.energy_0 = base.energy.total;
  table.converged_0 = base.converged;
  const ScalarField base_c = recenter_with_shift(base.field, params.k).field;
  for (double eps : eps_list) {
    MicroParams mp;
    mp.eps = eps;
    mp.eta = eta_profile;
    mp.pad_factor = pad_factor;
    SolveOptions o = opts;
    o.init = InitKind::custom;
    o.custom_init = base.field;
    const SolveReport r = minimize_Eeps(grid, params, mp, o);
    TrendRow row;
    row.eps = eps;
    row.energy_eps = r.energy.total;
    row.energy_gap = r.energy.total - table.energy_0;
    row.converged = r.converged;
    const ScalarField rc = recenter_with_shift(r.field, params.k).field;
    std::vector<double> diff(grid.size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = rc.values[k] - base_c.values[k];
    row.h1_distance = std::sqrt(2.0 * dirichlet_energy(grid, diff));
    table.rows.push_back(row);
  }
  return table;
}

void write_trend_csv(const std::filesystem::path& path, const TrendTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "eps,energy_eps,energy_gap,h1_distance\n";
  for (const auto& r : table.rows)
    out << format17(r.eps) << ',' << format17(r.energy_eps) << ',' << format17(r.energy_gap) << ','
        << format17(r.h1_distance) << '\n';
}

}  // namespace stripwall
