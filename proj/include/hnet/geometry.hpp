#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hnet/rng.hpp"

namespace hnet {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Colatitude theta in [0, pi], longitude phi in [0, 2pi).
class SphericalPoint {
public:
  SphericalPoint() = default;
  /// Throws std::invalid_argument if theta is outside [0, pi]; phi is reduced mod 2pi.
  SphericalPoint(double theta, double phi);

  double theta() const { return theta_; }
  double phi() const { return phi_; }

private:
  double theta_ = 0.0;
  double phi_ = 0.0;
};

Vec3 unit_vector(const SphericalPoint& p);

/// Inverse chart; the pole maps to phi = 0.
SphericalPoint to_spherical(Vec3 v);

/// Uniform direction on the unit sphere.
Vec3 random_unit(Rng& rng);

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Rotates v by R. Throws std::invalid_argument unless R is a proper rotation
/// (R^T R = I within 1e-12 and det R = +1).
Vec3 apply_rotation(const Mat3& r, Vec3 v);

Mat3 rotation_about_axis(Vec3 axis, double angle);

/// Haar-distributed rotation matrix.
Mat3 random_rotation(Rng& rng);

// Gauss-Legendre product grid: L+1 colatitude rings at the roots of
// P_{L+1}(cos theta), 2L+1 equispaced longitudes starting at phi = 0.
// Rings are ordered north to south (theta ascending).
class GaussLegendreGrid {
public:
  explicit GaussLegendreGrid(int bandlimit);

  int bandlimit() const { return bandlimit_; }
  std::size_t n_theta() const { return cos_theta_.size(); }
  std::size_t n_phi() const { return static_cast<std::size_t>(2 * bandlimit_ + 1); }
  std::size_t size() const { return n_theta() * n_phi(); }

  double theta(std::size_t j) const { return theta_[j]; }
  double cos_theta(std::size_t j) const { return cos_theta_[j]; }
  double sin_theta(std::size_t j) const { return sin_theta_[j]; }
  /// Gauss weight in d(cos theta); sums to 2.
  double weight(std::size_t j) const { return weights_[j]; }
  double phi(std::size_t k) const;
  double phi_step() const;

  /// Full sphere-measure weight of node (j, k).
  double node_weight(std::size_t j) const { return weights_[j] * phi_step(); }

  std::size_t index(std::size_t j, std::size_t k) const { return j * n_phi() + k; }
  SphericalPoint point(std::size_t j, std::size_t k) const;
  SphericalPoint point(std::size_t flat) const { return point(flat / n_phi(), flat % n_phi()); }

  const std::vector<double>& cos_thetas() const { return cos_theta_; }
  const std::vector<double>& weights() const { return weights_; }

  friend bool operator==(const GaussLegendreGrid& a, const GaussLegendreGrid& b) {
    return a.bandlimit_ == b.bandlimit_;
  }

private:
  int bandlimit_;
  std::vector<double> cos_theta_;
  std::vector<double> sin_theta_;
  std::vector<double> theta_;
  std::vector<double> weights_;
};

GaussLegendreGrid gl_grid(int bandlimit);

/// Legendre polynomial P_n(x) by the three-term recurrence.
double legendre_p(int n, double x);

/// CSV `theta,phi,weight`, row-major over (j, k).
void write_grid_csv(const GaussLegendreGrid& grid, std::ostream& os);

}  // namespace hnet
