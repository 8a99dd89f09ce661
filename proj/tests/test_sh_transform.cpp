#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hnet/sh_transform.hpp"
#include "oracles.hpp"

using namespace hnet;
using std::numbers::pi;

namespace {

SHCoeffs random_coeffs(int L, Rng& rng) {
  SHCoeffs c(L);
  for (auto& v : c.data()) v = {rng.normal(), rng.normal()};
  return c;
}

double rel_diff(const SHCoeffs& a, const SHCoeffs& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.data()[i] - b.data()[i]);
    den += std::norm(b.data()[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("eval_ylm low-degree values") {
  CHECK(std::abs(eval_ylm(0, 0, {1.1, 2.0}) - Complex(1.0 / std::sqrt(4 * pi))) < 1e-15);
  CHECK(std::abs(eval_ylm(1, 0, {0.0, 0.0}) - Complex(std::sqrt(3.0 / (4 * pi)))) < 1e-15);
  // Condon-Shortley: Y_11 = -sqrt(3/8pi) sin(theta) e^{i phi}
  const Complex y11 = eval_ylm(1, 1, {pi / 2, 0.0});
  CHECK(y11.real() == doctest::Approx(-std::sqrt(3.0 / (8 * pi))).epsilon(1e-14));
  CHECK_THROWS_AS(eval_ylm(2, 3, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(eval_ylm(-1, 0, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("eval_ylm matches the explicit-derivative oracle") {
  Rng rng(2);
  for (int l = 0; l <= 10; ++l) {
    for (int m = -l; m <= l; ++m) {
      for (int k = 0; k < 3; ++k) {
        const double th = rng.uniform(0.0, pi), ph = rng.uniform(0.0, 2 * pi);
        const Complex ref = oracle::ylm(l, m, th, ph);
        CHECK(std::abs(eval_ylm(l, m, {th, ph}) - ref) < 1e-12);
      }
    }
  }
}

TEST_CASE("sectoral harmonic at high degree stays finite") {
  const int l = 300;
  const double log_mag = -l * std::log(2.0) - std::lgamma(l + 1.0) +
                         0.5 * (std::lgamma(2.0 * l + 2.0) - std::log(4 * pi));
  const Complex y = eval_ylm(l, l, {pi / 2, 0.0});
  REQUIRE(std::isfinite(y.real()));
  CHECK(y.real() == doctest::Approx(std::exp(log_mag)).epsilon(1e-10));
  CHECK(std::abs(y.imag()) < 1e-12 * std::abs(y.real()));
}

TEST_CASE("inner products on a Gauss-Legendre grid") {
  const GaussLegendreGrid g = gl_grid(4);
  Complex ip = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Complex y = eval_ylm(2, 1, g.point(i));
    ip += g.node_weight(i / g.n_phi()) * std::norm(y);
  }
  CHECK(std::abs(ip - 1.0) < 1e-14);

  const GaussLegendreGrid g8 = gl_grid(8);
  double worst = 0.0;
  for (int l1 = 0; l1 <= 8; ++l1)
    for (int m1 = -l1; m1 <= l1; ++m1)
      for (int l2 = 0; l2 <= 8; ++l2)
        for (int m2 = -l2; m2 <= l2; ++m2) {
          Complex s = 0.0;
          for (std::size_t i = 0; i < g8.size(); ++i) {
            s += g8.node_weight(i / g8.n_phi()) * eval_ylm(l1, m1, g8.point(i)) *
                 std::conj(eval_ylm(l2, m2, g8.point(i)));
          }
          const double expect = (l1 == l2 && m1 == m2) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(s - expect));
        }
  CHECK(worst < 1e-13);
}

TEST_CASE("single harmonic round trip") {
  const GaussLegendreGrid g = gl_grid(3);
  const GridField f = GridField::sample(g, [](const SphericalPoint& p) { return eval_ylm(3, -2, p); });
  const SHCoeffs c = sht_forward(f, 3);
  for (int l = 0; l <= 3; ++l)
    for (int m = -l; m <= l; ++m) {
      const Complex expect = (l == 3 && m == -2) ? 1.0 : 0.0;
      CHECK(std::abs(c(l, m) - expect) < 1e-14);
    }
}

TEST_CASE("round trip of random bandlimited fields") {
  Rng rng(17);
  for (int L : {4, 16, 64}) {
    const SHCoeffs c = random_coeffs(L, rng);
    const GridField f = sht_inverse(c, gl_grid(L));
    CHECK(rel_diff(sht_forward(f, L), c) < 1e-10);
  }
}

TEST_CASE("sht_forward argument checks") {
  GridField f(gl_grid(4));
  CHECK_THROWS_AS(sht_forward(f, 5), std::invalid_argument);
  f.values.pop_back();
  CHECK_THROWS_AS(sht_forward(f, 4), std::invalid_argument);
}

TEST_CASE("synthesis at a point agrees with grid synthesis") {
  Rng rng(3);
  const SHCoeffs c = random_coeffs(6, rng);
  const GridField f = sht_inverse(c, gl_grid(9));
  for (std::size_t i = 0; i < f.values.size(); i += 7) {
    CHECK(std::abs(sh_synthesize(c, f.grid.point(i)) - f.values[i]) < 1e-12);
  }
}

TEST_CASE("real fields have conjugate-symmetric coefficients") {
  Rng rng(4);
  const GaussLegendreGrid g = gl_grid(12);
  std::vector<double> vals(g.size());
  const SHCoeffs src = random_real_coeffs(12, 1.0, rng);
  CHECK(src.reality_defect() < 1e-15);
  const GridField f = sht_inverse(src, g);
  double imag = 0.0;
  for (const auto& v : f.values) imag = std::max(imag, std::abs(v.imag()));
  CHECK(imag < 1e-12);
  const SHCoeffs c = sht_forward(GridField::from_real(g, f.real_values()), 12);
  CHECK(c.reality_defect() < 1e-12);
}

TEST_CASE("power spectrum, degree energy and laplacian") {
  SHCoeffs c(2);
  c(0, 0) = 2.0;
  c(1, -1) = {0.0, 1.0};
  c(1, 1) = {0.0, 1.0};
  c(2, 0) = 3.0;
  const auto s = power_spectrum(c);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == doctest::Approx(4.0));
  CHECK(s[1] == doctest::Approx(2.0 / 3.0));
  CHECK(s[2] == doctest::Approx(9.0 / 5.0));
  const auto e = degree_energy(c);
  CHECK(e[1] == doctest::Approx(2.0));
  CHECK(c.energy() == doctest::Approx(15.0));

  const SHCoeffs lap = laplacian_spectral(c);
  CHECK(lap(0, 0) == Complex(0.0));
  CHECK(lap(1, 1) == Complex(0.0, -2.0));
  CHECK(lap(2, 0) == Complex(-18.0));

  CHECK(out_of_band_energy(c, 1) == doctest::Approx(9.0 / 15.0));
  CHECK(out_of_band_energy(c, 2) == 0.0);
  CHECK(out_of_band_energy(SHCoeffs(3), 0) == 0.0);
}

TEST_CASE("resized pads and truncates") {
  SHCoeffs c(2);
  c(2, -1) = 5.0;
  c(1, 0) = 1.0;
  const SHCoeffs up = c.resized(4);
  CHECK(up.bandlimit() == 4);
  CHECK(up(2, -1) == Complex(5.0));
  CHECK(up(4, 4) == Complex(0.0));
  const SHCoeffs down = c.resized(1);
  CHECK(down.size() == 4);
  CHECK(down(1, 0) == Complex(1.0));
}

TEST_CASE("random_real_coeffs follows the requested spectrum") {
  // Per-degree energy has expectation (2l+1)(1+l)^(-p); average over seeds.
  const int L = 6, seeds = 400;
  const double p = 2.0;
  std::vector<double> mean(L + 1, 0.0);
  for (int s = 0; s < seeds; ++s) {
    Rng rng(1000 + s);
    const auto e = degree_energy(random_real_coeffs(L, p, rng));
    for (int l = 0; l <= L; ++l) mean[l] += e[l] / seeds;
  }
  for (int l = 0; l <= L; ++l) {
    const double expect = (2.0 * l + 1.0) * std::pow(1.0 + l, -p);
    // Energy at degree l is a scaled chi-square with 2l+1 dof.
    const double sd = expect * std::sqrt(2.0 / (2.0 * l + 1.0) / seeds);
    CHECK(std::abs(mean[l] - expect) < 4 * sd);
  }
}

TEST_CASE("synthesis of trivial expansions") {
  const GaussLegendreGrid g = gl_grid(5);
  const GridField zero = sht_inverse(SHCoeffs(5), g);
  for (const auto& v : zero.values) CHECK(v == Complex(0.0));
  SHCoeffs c(5);
  c(0, 0) = std::sqrt(4 * pi);
  for (const auto& v : sht_inverse(c, g).values) CHECK(std::abs(v - 1.0) < 1e-14);
  const SHCoeffs back = sht_forward(GridField::from_real(g, std::vector<double>(g.size(), 1.0)), 5);
  CHECK(std::abs(back(0, 0) - std::sqrt(4 * pi)) < 1e-13);
  CHECK(oracle::energy_except(back, {{0, 0}}) < 1e-24);
  CHECK(power_spectrum(c)[0] == doctest::Approx(4 * pi));
}

TEST_CASE("spectral bookkeeping on random coefficients") {
  Rng rng(8);
  const SHCoeffs c = random_coeffs(10, rng);
  const auto s = power_spectrum(c);
  double parseval = 0.0;
  for (int l = 0; l <= 10; ++l) parseval += (2 * l + 1) * s[l];
  CHECK(parseval == doctest::Approx(c.energy()).epsilon(1e-14));

  const SHCoeffs twice = laplacian_spectral(laplacian_spectral(c));
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m) {
      const double f = double(l) * l * (l + 1) * (l + 1);
      CHECK(std::abs(twice(l, m) - f * c(l, m)) < 1e-12 * (1 + f));
    }

  double above = 0.0, total = 0.0;
  for (int l = 0; l <= 10; ++l)
    for (int m = -l; m <= l; ++m) {
      total += std::norm(c(l, m));
      if (l > 5) above += std::norm(c(l, m));
    }
  CHECK(out_of_band_energy(c, 5) == doctest::Approx(above / total).epsilon(1e-14));
  CHECK(out_of_band_energy(c, 10) == 0.0);

  SHCoeffs single(5);
  single(5, 0) = 1.0;
  CHECK(out_of_band_energy(single, 4) == 1.0);
}

TEST_CASE("coefficient index is a bijection") {
  const int L = 9;
  std::vector<int> hits((L + 1) * (L + 1), 0);
  for (int l = 0; l <= L; ++l)
    for (int m = -l; m <= l; ++m) ++hits[SHCoeffs::index(l, m)];
  for (int h : hits) CHECK(h == 1);
}
