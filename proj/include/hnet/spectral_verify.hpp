#pragma once

#include <cstdint>
#include <vector>

#include "hnet/herglotz.hpp"
#include "hnet/network.hpp"
#include "hnet/rng.hpp"
#include "hnet/sh_transform.hpp"

namespace hnet {

/// beta_l = scale^l / l! for 0 <= l <= l0.
std::vector<Complex> truncated_exp_coeffs(int l0, Complex scale);

/// |scale|^(l0+1) / (l0+1)! * e^|scale|, an upper bound on the dropped tail.
double exp_tail_bound(int l0, double scale_mag);

/// Herglotz features with each atom replaced by e^{omega0 b} times the
/// degree-l0 Taylor polynomial of exp(omega0 w a^T x). Same layout as pe_eval.
std::vector<double> truncated_herglotz_features(const PositionalEncoding& pe, int l0,
                                                const SphericalPoint& p);

/// Network output with the truncated Herglotz features.
double forward_truncated(const Network& net, int l0, const SphericalPoint& p);

/// Analytic bound on |forward - forward_truncated| from the per-atom tails
/// propagated through the layers' Lipschitz constants.
double truncation_forward_bound(const Network& net, int l0);

/// Largest out-of-band relative energy (above l0) over the first hidden
/// layer's pre-activations. SphHarm encodings use their own l0; Herglotz
/// encodings are truncated at `l0` first.
double verify_poly_encoding(const Network& net, int l0, int work_bandlimit);

/// Random verification network: SphHarm PE at l0, q - 1 hidden layers of
/// `width` units with a random degree-k polynomial activation, linear
/// readout. Weights and biases Uniform(-1, 1) * 2 / sqrt(fan_in), which keeps
/// pre-activations of order one so the top degree stays above round-off.
Network random_poly_network(int l0, int k, int q, Rng& rng, int width = 8);

struct BandlimitReport {
  int l0 = 0;
  int k = 0;
  int q = 0;
  int bound = 0;
  int l_work = 0;
  std::uint64_t seed = 0;
  double off_band_energy = 0.0;     // relative energy above bound
  double top_degree_energy = 0.0;   // relative energy at degree == bound
  int max_degree = 0;               // highest degree above kOccupiedThreshold
};

/// Relative degree energy counted as occupied.
inline constexpr double kOccupiedThreshold = 1e-20;

/// K^(Q-1) L0.
int theorem1_bound(int l0, int k, int q);

/// Samples a random polynomial network on gl_grid(2 bound + 8) and measures
/// its spectrum against the bound. Throws std::invalid_argument for
/// l0 < 0, k < 1 or q < 1.
BandlimitReport verify_theorem1(int l0, int k, int q, std::uint64_t seed);

/// Coefficients of f g sampled on gl_grid(work_bandlimit).
SHCoeffs product_coeffs(const SHCoeffs& f, const SHCoeffs& g, int work_bandlimit);

/// Out-of-band relative energy above la + lb of the product of two random
/// real fields with bandlimits la and lb.
double verify_product_rule(int la, int lb, Rng& rng);

struct Lemma1Report {
  int lmax = 0;
  int seeds = 0;
  std::uint64_t seed = 0;
  double max_off_degree = 0.0;    // relative energy outside degree l
  double max_energy_ratio = 0.0;  // sum_m |c_lm|^2 / (4 pi (2l + 1))
};

/// Monomials (a^T x)^l, l = 0..lmax, for `seeds` unit-norm Herglotz vectors.
Lemma1Report verify_lemma1(int lmax, int seeds, std::uint64_t seed);

struct SpectrumReport {
  double omega0 = 0.0;
  double w_mag = 0.0;
  double a_norm = 0.0;
  std::vector<double> measured;  // S(l), l = 0..lmax
  std::vector<double> bound;     // bound(l), l >= 1; bound[0] unused
  double max_ratio = 0.0;        // max over l >= 1 of measured / bound
  int peak_degree = 0;           // argmax of measured
  double predicted_peak = 0.0;   // e omega0 |w| |a|
  double direct_check = 0.0;     // largest relative mismatch with the direct transform
};

/// Spectrum of one bias-free atom with a unit-norm Herglotz vector and real
/// w = w_mag, compared with the bound for l = 1..lmax.
SpectrumReport verify_spectrum(double omega0, double w_mag, int lmax, std::uint64_t seed);

struct InitReport {
  std::size_t neurons = 0;
  double max_defect = 0.0;    // |a^T a|
  double max_norm_gap = 0.0;  // max | |a_re| - 1/2 |, | |a_im| - 1/2 |
  double max_w = 0.0;         // max |w|
  double max_b = 0.0;         // max |b|
};

/// Checks a freshly initialized HNET encoding.
InitReport verify_init(const Network& net);

}  // namespace hnet
