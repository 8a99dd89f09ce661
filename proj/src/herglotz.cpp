#include "hnet/herglotz.hpp"

#include <cmath>
#include <numbers>

namespace hnet {

MagnitudeOverflow::MagnitudeOverflow(std::size_t neuron, double exponent)
    : std::runtime_error("Herglotz neuron " + std::to_string(neuron) +
                         " exponent real part " + std::to_string(exponent) + " exceeds " +
                         std::to_string(kAtomExponentLimit)),
      neuron_(neuron) {}

HerglotzVector HerglotzVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize a zero Herglotz vector");
  return {(1.0 / n) * re, (1.0 / n) * im};
}

double herglotz_defect(const HerglotzVector& a) {
  const Complex aa{dot(a.re, a.re) - dot(a.im, a.im), 2.0 * dot(a.re, a.im)};
  return std::abs(aa);
}

HerglotzVector sample_herglotz(Rng& rng) {
  const Vec3 u = random_unit(rng);
  const Vec3 helper = std::abs(u.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = cross(helper, u);
  e1 = (1.0 / norm(e1)) * e1;
  const Vec3 e2 = cross(u, e1);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const Vec3 v = std::cos(angle) * e1 + std::sin(angle) * e2;
  return {0.5 * u, 0.5 * v};
}

Complex atom_eval(const HerglotzNeuron& n, double omega0, Vec3 x, std::size_t index) {
  const Complex z = omega0 * (n.w * n.a.project(x) + n.b);
  if (z.real() > kAtomExponentLimit) throw MagnitudeOverflow(index, z.real());
  return std::exp(z);
}

SHCoeffs monomial_coeffs(const HerglotzVector& a, int degree, int work_bandlimit) {
  if (degree < 0 || work_bandlimit < degree) {
    throw std::invalid_argument("monomial degree must lie in [0, work bandlimit]");
  }
  const HerglotzVector unit = a.normalized();
  const auto grid = gl_grid(work_bandlimit);
  const auto field = GridField::sample(grid, [&](const SphericalPoint& p) {
    const Complex t = unit.project(unit_vector(p));
    Complex acc = 1.0;
    for (int k = 0; k < degree; ++k) acc *= t;
    return acc;
  });
  return sht_forward(field, work_bandlimit);
}

SHCoeffs atom_coeffs(const HerglotzNeuron& n, double omega0, int work_bandlimit) {
  const auto grid = gl_grid(work_bandlimit);
  const auto field = GridField::sample(
      grid, [&](const SphericalPoint& p) { return atom_eval(n, omega0, unit_vector(p)); });
  return sht_forward(field, work_bandlimit);
}

std::vector<double> atom_spectrum_by_degree(const HerglotzNeuron& n, double omega0, int lmax) {
  std::vector<double> out(static_cast<std::size_t>(lmax + 1), 0.0);
  const double scale = omega0 * std::abs(n.w) * n.a.norm();
  const double bias_gain = 2.0 * omega0 * n.b.real();
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0 && scale == 0.0) break;
    const auto c = monomial_coeffs(n.a, l, l);
    double e = 0.0;
    for (int m = -l; m <= l; ++m) e += std::norm(c(l, m));
    if (e == 0.0) continue;
    const double log_s = (l > 0 ? 2.0 * l * std::log(scale) : 0.0) - 2.0 * std::lgamma(l + 1.0) +
                         std::log(e / (2.0 * l + 1.0)) + bias_gain;
    out[l] = std::exp(log_s);
  }
  return out;
}

double spectrum_bound(int degree, double omega0, double w_mag, double a_norm) {
  if (degree < 1) throw std::invalid_argument("spectrum bound needs degree >= 1");
  const double prod = omega0 * w_mag * a_norm;
  const double c = 4.0 * std::numbers::pi / std::exp(2.0);
  if (prod == 0.0) return 0.0;
  const double log_base = std::log(std::numbers::e * prod / degree);
  return c * std::exp(2.0 * degree * log_base);
}

}  // namespace hnet
