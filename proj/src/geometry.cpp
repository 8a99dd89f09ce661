#include "hnet/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace hnet {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

SphericalPoint::SphericalPoint(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw std::invalid_argument("colatitude outside [0, pi]: " + std::to_string(theta));
  }
  if (!std::isfinite(phi)) throw std::invalid_argument("non-finite longitude");
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  if (phi >= kTwoPi) phi = 0.0;
  theta_ = theta;
  phi_ = phi;
}

Vec3 unit_vector(const SphericalPoint& p) {
  const double st = std::sin(p.theta());
  return {st * std::cos(p.phi()), st * std::sin(p.phi()), std::cos(p.theta())};
}

SphericalPoint to_spherical(Vec3 v) {
  const double r = norm(v);
  if (r == 0.0) throw std::invalid_argument("zero vector has no direction");
  const double theta = std::acos(std::clamp(v.z / r, -1.0, 1.0));
  const double phi = std::atan2(v.y, v.x);
  return {theta, phi};
}

Vec3 random_unit(Rng& rng) {
  for (;;) {
    const Vec3 g{rng.normal(), rng.normal(), rng.normal()};
    const double n = norm(g);
    if (n > 1e-300) return (1.0 / n) * g;
  }
}

Vec3 apply_rotation(const Mat3& r, Vec3 v) {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r[k][i] * r[k][j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-12) {
        throw std::invalid_argument("matrix is not orthogonal");
      }
    }
  }
  const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                     r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                     r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
  if (det < 0.0) throw std::invalid_argument("matrix is a reflection, not a rotation");
  return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z,
          r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
          r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
}

Mat3 rotation_about_axis(Vec3 axis, double angle) {
  const Vec3 u = (1.0 / norm(axis)) * axis;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{{t * u.x * u.x + c, t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y},
           {t * u.x * u.y + s * u.z, t * u.y * u.y + c, t * u.y * u.z - s * u.x},
           {t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c}}};
}

Mat3 random_rotation(Rng& rng) {
  // Haar measure: third column uniform on S^2, first column uniform on the
  // circle orthogonal to it.
  const Vec3 e3 = random_unit(rng);
  const Vec3 helper = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(helper, e3);
  e1 = (1.0 / norm(e1)) * e1;
  const Vec3 e2 = cross(e3, e1);
  const double a = rng.uniform(0.0, kTwoPi);
  const Vec3 f1 = std::cos(a) * e1 + std::sin(a) * e2;
  const Vec3 f2 = cross(e3, f1);
  return {{{f1.x, f2.x, e3.x}, {f1.y, f2.y, e3.y}, {f1.z, f2.z, e3.z}}};
}

double legendre_p(int n, double x) {
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

GaussLegendreGrid::GaussLegendreGrid(int bandlimit) : bandlimit_(bandlimit) {
  if (bandlimit < 0) throw std::invalid_argument("bandlimit must be non-negative");
  const int n = bandlimit + 1;
  cos_theta_.resize(n);
  weights_.resize(n);
  // P_n(x) and P_{n-1}(x) by the three-term recurrence.
  const auto legendre_pair = [n](double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, p0};
  };
  // Newton iteration on P_n from the asymptotic guess; roots are symmetric so
  // only the northern half is solved.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pnm1] = legendre_pair(x);
      const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    if (n % 2 == 1 && i == n / 2) x = 0.0;
    const auto [pn, pnm1] = legendre_pair(x);
    const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    cos_theta_[i] = x;
    cos_theta_[n - 1 - i] = -x;
    weights_[i] = w;
    weights_[n - 1 - i] = w;
  }
  sin_theta_.resize(n);
  theta_.resize(n);
  for (int j = 0; j < n; ++j) {
    theta_[j] = std::acos(cos_theta_[j]);
    sin_theta_[j] = std::sqrt((1.0 - cos_theta_[j]) * (1.0 + cos_theta_[j]));
  }
}

double GaussLegendreGrid::phi_step() const { return kTwoPi / static_cast<double>(n_phi()); }

double GaussLegendreGrid::phi(std::size_t k) const { return phi_step() * static_cast<double>(k); }

SphericalPoint GaussLegendreGrid::point(std::size_t j, std::size_t k) const {
  return {theta_[j], phi(k)};
}

GaussLegendreGrid gl_grid(int bandlimit) { return GaussLegendreGrid(bandlimit); }

void write_grid_csv(const GaussLegendreGrid& grid, std::ostream& os) {
  os << "# format_version: 1\n";
  os << "theta,phi,weight\n";
  char buf[128];
  for (std::size_t j = 0; j < grid.n_theta(); ++j) {
    for (std::size_t k = 0; k < grid.n_phi(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", grid.theta(j), grid.phi(k),
                    grid.node_weight(j));
      os << buf;
    }
  }
}

}  // namespace hnet
