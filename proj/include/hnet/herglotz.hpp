#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include "hnet/geometry.hpp"
#include "hnet/rng.hpp"
#include "hnet/sh_transform.hpp"

namespace hnet {

// Complex 3-vector a = a_re + i a_im. Herglotz vectors satisfy a^T a = 0
// (unconjugated), i.e. |a_re| = |a_im| and a_re . a_im = 0.
struct HerglotzVector {
  Vec3 re;
  Vec3 im;

  /// a^T x for real x.
  Complex project(Vec3 x) const { return {dot(re, x), dot(im, x)}; }
  /// Hermitian norm sqrt(|a_re|^2 + |a_im|^2).
  double norm() const { return std::sqrt(dot(re, re) + dot(im, im)); }
  HerglotzVector normalized() const;
};

// One positional-encoding neuron exp(omega0 (w a^T x + b)); a is fixed, w and b
// are trainable.
struct HerglotzNeuron {
  HerglotzVector a;
  Complex w{1.0, 0.0};
  Complex b{0.0, 0.0};
};

class MagnitudeOverflow : public std::runtime_error {
public:
  MagnitudeOverflow(std::size_t neuron, double exponent);
  std::size_t neuron() const { return neuron_; }

private:
  std::size_t neuron_;
};

/// Largest real exponent accepted by atom_eval.
inline constexpr double kAtomExponentLimit = 60.0;

/// |a^T a|; zero exactly for Herglotz vectors.
double herglotz_defect(const HerglotzVector& a);

/// Random Herglotz vector with |a_re| = |a_im| = 1/2: 2 a_re uniform on S^2,
/// 2 a_im uniform on the unit circle orthogonal to it.
HerglotzVector sample_herglotz(Rng& rng);

/// exp(omega0 (w a^T x + b)). Throws MagnitudeOverflow (carrying `index`)
/// when the real part of the exponent exceeds kAtomExponentLimit.
Complex atom_eval(const HerglotzNeuron& n, double omega0, Vec3 x, std::size_t index = 0);

/// SH coefficients of x -> (a^T x)^degree with a rescaled to unit norm,
/// sampled on gl_grid(work_bandlimit).
SHCoeffs monomial_coeffs(const HerglotzVector& a, int degree, int work_bandlimit);

/// SH coefficients of the atom exp(omega0 (w a^T x + b)) by direct transform
/// on gl_grid(work_bandlimit). Round-off limits the dynamic range to roughly
/// 1e-16 of the atom's peak magnitude.
SHCoeffs atom_coeffs(const HerglotzNeuron& n, double omega0, int work_bandlimit);

/// Per-degree spectrum of a bias-free atom assembled from its Taylor terms:
/// the degree-l component of exp(omega0 w a^T x) is (omega0 w)^l / l! (a^T x)^l,
/// each monomial measured by its own transform. Stays accurate far below
/// the round-off floor of atom_coeffs.
std::vector<double> atom_spectrum_by_degree(const HerglotzNeuron& n, double omega0, int lmax);

/// (4 pi / e^2) (e omega0 |w| |a| / l)^{2l}, evaluated in log space.
double spectrum_bound(int degree, double omega0, double w_mag, double a_norm);

}  // namespace hnet
