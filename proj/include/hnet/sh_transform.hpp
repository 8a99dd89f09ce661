#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "hnet/geometry.hpp"
#include "hnet/rng.hpp"

namespace hnet {

using Complex = std::complex<double>;

// Complex spherical-harmonic coefficients c_lm for 0 <= l <= L, |m| <= l,
// packed at l*l + l + m.
class SHCoeffs {
public:
  SHCoeffs() = default;
  explicit SHCoeffs(int bandlimit);

  int bandlimit() const { return bandlimit_; }
  std::size_t size() const { return data_.size(); }

  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l * l + l + m);
  }

  Complex& operator()(int l, int m) { return data_[index(l, m)]; }
  const Complex& operator()(int l, int m) const { return data_[index(l, m)]; }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  /// Sum of |c_lm|^2 over all entries.
  double energy() const;

  /// Largest deviation from c_{l,-m} = (-1)^m conj(c_lm); zero for real fields.
  double reality_defect() const;

  /// Copy truncated or zero-padded to a new bandlimit.
  SHCoeffs resized(int bandlimit) const;

private:
  int bandlimit_ = -1;
  std::vector<Complex> data_;
};

// Complex samples on a Gauss-Legendre grid, row-major over (ring, longitude).
struct GridField {
  GaussLegendreGrid grid{0};
  std::vector<Complex> values;

  GridField() : values(1) {}
  explicit GridField(GaussLegendreGrid g) : grid(std::move(g)), values(grid.size()) {}

  static GridField sample(const GaussLegendreGrid& grid,
                          const std::function<Complex(const SphericalPoint&)>& f);
  static GridField from_real(const GaussLegendreGrid& grid, const std::vector<double>& values);

  std::vector<double> real_values() const;
};

// Fully normalized associated Legendre functions with the Condon-Shortley
// phase, so that Y_lm = P_lm(cos theta) e^{i m phi} for m >= 0. Built from
// the sectoral seed and the two-term recurrence in l; no factorials appear,
// which keeps the table finite well past l = 600.
class NormalizedLegendre {
public:
  explicit NormalizedLegendre(int lmax);

  int lmax() const { return lmax_; }

  static std::size_t index(int l, int m) {
    return static_cast<std::size_t>(l * (l + 1) / 2 + m);
  }
  std::size_t table_size() const { return index(lmax_, lmax_) + 1; }

  /// Fills out[index(l, m)] for 0 <= m <= l <= lmax at (cos theta, sin theta).
  template <class T>
  void evaluate(const T& x, const T& s, std::vector<T>& out) const;

private:
  int lmax_;
  std::vector<double> sectoral_;  // -sqrt((2m+1)/(2m))
  std::vector<double> a_;         // sqrt((4l^2-1)/(l^2-m^2))
  std::vector<double> b_;         // sqrt(((l-1)^2-m^2)/(4(l-1)^2-1))
};

template <class T>
void NormalizedLegendre::evaluate(const T& x, const T& s, std::vector<T>& out) const {
  out.assign(table_size(), T(0.0));
  T pmm(0.5 / std::sqrt(std::numbers::pi));
  for (int m = 0; m <= lmax_; ++m) {
    if (m > 0) pmm = sectoral_[m] * (s * pmm);
    out[index(m, m)] = pmm;
    if (m == lmax_) break;
    T p1 = std::sqrt(2.0 * m + 3.0) * (x * pmm);
    out[index(m + 1, m)] = p1;
    T p0 = pmm;
    for (int l = m + 2; l <= lmax_; ++l) {
      const std::size_t i = index(l, m);
      T p2 = a_[i] * (x * p1 - b_[i] * p0);
      out[i] = p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

/// Orthonormal complex Y_lm with Condon-Shortley phase. Throws
/// std::invalid_argument if l < 0 or |m| > l.
Complex eval_ylm(int l, int m, const SphericalPoint& p);

/// Quadrature analysis of a grid field up to degree L. Throws
/// std::invalid_argument if L exceeds the grid's bandlimit.
SHCoeffs sht_forward(const GridField& f, int bandlimit);

/// Synthesis of the expansion at every node of the grid.
GridField sht_inverse(const SHCoeffs& c, const GaussLegendreGrid& grid);

/// Synthesis at a single point.
Complex sh_synthesize(const SHCoeffs& c, const SphericalPoint& p);

/// S(l) = (2l+1)^{-1} sum_m |c_lm|^2.
std::vector<double> power_spectrum(const SHCoeffs& c);

/// sum_m |c_lm|^2 per degree.
std::vector<double> degree_energy(const SHCoeffs& c);

/// Multiplies c_lm by -l(l+1).
SHCoeffs laplacian_spectral(const SHCoeffs& c);

/// Fraction of the total energy above degree cutoff; 0 for a zero field.
double out_of_band_energy(const SHCoeffs& c, int cutoff);

/// Real-field coefficients up to degree L: c_l0 ~ N(0, s_l^2), c_lm for m > 0
/// complex Gaussian with total variance s_l^2, c_{l,-m} = (-1)^m conj(c_lm),
/// where s_l^2 = (1 + l)^(-p).
SHCoeffs random_real_coeffs(int bandlimit, double p, Rng& rng);

}  // namespace hnet
