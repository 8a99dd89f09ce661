#include "hnet/sh_transform.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hnet {

SHCoeffs::SHCoeffs(int bandlimit)
    : bandlimit_(bandlimit),
      data_(static_cast<std::size_t>((bandlimit + 1) * (bandlimit + 1))) {
  if (bandlimit < 0) throw std::invalid_argument("bandlimit must be non-negative");
}

double SHCoeffs::energy() const {
  double e = 0.0;
  for (const Complex& c : data_) e += std::norm(c);
  return e;
}

double SHCoeffs::reality_defect() const {
  double worst = 0.0;
  for (int l = 0; l <= bandlimit_; ++l) {
    for (int m = 0; m <= l; ++m) {
      const Complex expected = (m % 2 == 0 ? 1.0 : -1.0) * std::conj((*this)(l, m));
      worst = std::max(worst, std::abs((*this)(l, -m) - expected));
    }
  }
  return worst;
}

SHCoeffs SHCoeffs::resized(int bandlimit) const {
  SHCoeffs out(bandlimit);
  const int lmax = std::min(bandlimit, bandlimit_);
  for (int l = 0; l <= lmax; ++l)
    for (int m = -l; m <= l; ++m) out(l, m) = (*this)(l, m);
  return out;
}

GridField GridField::sample(const GaussLegendreGrid& grid,
                            const std::function<Complex(const SphericalPoint&)>& f) {
  GridField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = f(grid.point(i));
  return out;
}

GridField GridField::from_real(const GaussLegendreGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("field has " + std::to_string(values.size()) +
                                " values, grid expects " + std::to_string(grid.size()));
  }
  GridField out(grid);
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = values[i];
  return out;
}

std::vector<double> GridField::real_values() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i].real();
  return out;
}

NormalizedLegendre::NormalizedLegendre(int lmax) : lmax_(lmax) {
  if (lmax < 0) throw std::invalid_argument("lmax must be non-negative");
  sectoral_.resize(static_cast<std::size_t>(lmax) + 1);
  for (int m = 1; m <= lmax; ++m) sectoral_[m] = -std::sqrt((2.0 * m + 1.0) / (2.0 * m));
  a_.assign(table_size(), 0.0);
  b_.assign(table_size(), 0.0);
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = static_cast<double>(l) * l, m2 = static_cast<double>(m) * m;
      const double lm1 = l - 1.0;
      a_[index(l, m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      b_[index(l, m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
    }
  }
}

Complex eval_ylm(int l, int m, const SphericalPoint& p) {
  if (l < 0 || std::abs(m) > l) {
    throw std::invalid_argument("invalid harmonic (l=" + std::to_string(l) +
                                ", m=" + std::to_string(m) + ")");
  }
  const int am = std::abs(m);
  const double x = std::cos(p.theta()), s = std::sin(p.theta());
  // Single-order recurrence; avoids building the full table.
  double pmm = 0.5 / std::sqrt(std::numbers::pi);
  for (int k = 1; k <= am; ++k) pmm *= -std::sqrt((2.0 * k + 1.0) / (2.0 * k)) * s;
  double plm = pmm;
  if (l > am) {
    double p0 = pmm;
    double p1 = std::sqrt(2.0 * am + 3.0) * x * pmm;
    for (int k = am + 2; k <= l; ++k) {
      const double k2 = static_cast<double>(k) * k, m2 = static_cast<double>(am) * am;
      const double km1 = k - 1.0;
      const double a = std::sqrt((4.0 * k2 - 1.0) / (k2 - m2));
      const double b = std::sqrt((km1 * km1 - m2) / (4.0 * km1 * km1 - 1.0));
      const double p2 = a * (x * p1 - b * p0);
      p0 = p1;
      p1 = p2;
    }
    plm = p1;
  }
  const double sign = (m < 0 && am % 2 == 1) ? -1.0 : 1.0;
  return sign * plm * std::polar(1.0, m * p.phi());
}

namespace {

// e^{2 pi i q / n} for q in [0, n).
std::vector<Complex> roots_of_unity(std::size_t n) {
  std::vector<Complex> out(n);
  for (std::size_t q = 0; q < n; ++q) {
    out[q] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(q) /
                                 static_cast<double>(n));
  }
  return out;
}

std::size_t cyclic(long long m, std::size_t k, std::size_t n) {
  const long long nn = static_cast<long long>(n);
  long long q = (m * static_cast<long long>(k)) % nn;
  if (q < 0) q += nn;
  return static_cast<std::size_t>(q);
}

}  // namespace

SHCoeffs sht_forward(const GridField& f, int bandlimit) {
  const GaussLegendreGrid& grid = f.grid;
  if (bandlimit > grid.bandlimit()) {
    throw std::invalid_argument("transform bandlimit " + std::to_string(bandlimit) +
                                " exceeds grid bandlimit " + std::to_string(grid.bandlimit()));
  }
  if (f.values.size() != grid.size()) throw std::invalid_argument("field/grid size mismatch");
  const int L = bandlimit;
  const std::size_t nphi = grid.n_phi();
  const auto unity = roots_of_unity(nphi);
  const NormalizedLegendre legendre(L);
  std::vector<double> plm;
  std::vector<Complex> fourier(static_cast<std::size_t>(2 * L + 1));
  SHCoeffs out(L);

  for (std::size_t j = 0; j < grid.n_theta(); ++j) {
    const Complex* row = f.values.data() + j * nphi;
    for (int m = -L; m <= L; ++m) {
      Complex acc = 0.0;
      for (std::size_t k = 0; k < nphi; ++k) acc += row[k] * std::conj(unity[cyclic(m, k, nphi)]);
      fourier[m + L] = acc;
    }
    legendre.evaluate(grid.cos_theta(j), grid.sin_theta(j), plm);
    const double w = grid.node_weight(j);
    for (int l = 0; l <= L; ++l) {
      for (int m = -l; m <= l; ++m) {
        const int am = std::abs(m);
        const double sign = (m < 0 && am % 2 == 1) ? -1.0 : 1.0;
        out(l, m) += (w * sign * plm[NormalizedLegendre::index(l, am)]) * fourier[m + L];
      }
    }
  }
  return out;
}

GridField sht_inverse(const SHCoeffs& c, const GaussLegendreGrid& grid) {
  const int L = c.bandlimit();
  const std::size_t nphi = grid.n_phi();
  const auto unity = roots_of_unity(nphi);
  const NormalizedLegendre legendre(L);
  std::vector<double> plm;
  std::vector<Complex> coeff_m(static_cast<std::size_t>(2 * L + 1));
  GridField out(grid);

  for (std::size_t j = 0; j < grid.n_theta(); ++j) {
    legendre.evaluate(grid.cos_theta(j), grid.sin_theta(j), plm);
    for (int m = -L; m <= L; ++m) {
      const int am = std::abs(m);
      const double sign = (m < 0 && am % 2 == 1) ? -1.0 : 1.0;
      Complex acc = 0.0;
      for (int l = am; l <= L; ++l) acc += c(l, m) * plm[NormalizedLegendre::index(l, am)];
      coeff_m[m + L] = sign * acc;
    }
    Complex* row = out.values.data() + j * nphi;
    for (std::size_t k = 0; k < nphi; ++k) {
      Complex acc = 0.0;
      for (int m = -L; m <= L; ++m) acc += coeff_m[m + L] * unity[cyclic(m, k, nphi)];
      row[k] = acc;
    }
  }
  return out;
}

Complex sh_synthesize(const SHCoeffs& c, const SphericalPoint& p) {
  const int L = c.bandlimit();
  const NormalizedLegendre legendre(L);
  std::vector<double> plm;
  legendre.evaluate(std::cos(p.theta()), std::sin(p.theta()), plm);
  Complex acc = 0.0;
  for (int l = 0; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int am = std::abs(m);
      const double sign = (m < 0 && am % 2 == 1) ? -1.0 : 1.0;
      acc += c(l, m) * (sign * plm[NormalizedLegendre::index(l, am)]) *
             std::polar(1.0, m * p.phi());
    }
  }
  return acc;
}

std::vector<double> degree_energy(const SHCoeffs& c) {
  std::vector<double> out(static_cast<std::size_t>(c.bandlimit() + 1), 0.0);
  for (int l = 0; l <= c.bandlimit(); ++l)
    for (int m = -l; m <= l; ++m) out[l] += std::norm(c(l, m));
  return out;
}

std::vector<double> power_spectrum(const SHCoeffs& c) {
  auto out = degree_energy(c);
  for (std::size_t l = 0; l < out.size(); ++l) out[l] /= 2.0 * static_cast<double>(l) + 1.0;
  return out;
}

SHCoeffs laplacian_spectral(const SHCoeffs& c) {
  SHCoeffs out = c;
  for (int l = 0; l <= c.bandlimit(); ++l)
    for (int m = -l; m <= l; ++m) out(l, m) *= -static_cast<double>(l) * (l + 1.0);
  return out;
}

double out_of_band_energy(const SHCoeffs& c, int cutoff) {
  const auto per_degree = degree_energy(c);
  double total = 0.0, above = 0.0;
  for (std::size_t l = 0; l < per_degree.size(); ++l) {
    total += per_degree[l];
    if (static_cast<int>(l) > cutoff) above += per_degree[l];
  }
  return total > 0.0 ? above / total : 0.0;
}

SHCoeffs random_real_coeffs(int bandlimit, double p, Rng& rng) {
  if (bandlimit < 0) throw std::invalid_argument("bandlimit must be >= 0");
  SHCoeffs c(bandlimit);
  for (int l = 0; l <= bandlimit; ++l) {
    const double sd = std::pow(1.0 + l, -0.5 * p);
    c(l, 0) = sd * rng.normal();
    for (int m = 1; m <= l; ++m) {
      const double re = rng.normal(), im = rng.normal();
      const Complex z = sd * Complex(re, im) / std::sqrt(2.0);
      c(l, m) = z;
      c(l, -m) = (m % 2 ? -1.0 : 1.0) * std::conj(z);
    }
  }
  return c;
}

}  // namespace hnet
