#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "hnet/dual.hpp"
#include "hnet/geometry.hpp"
#include "hnet/herglotz.hpp"
#include "hnet/rng.hpp"
#include "hnet/sh_transform.hpp"

namespace hnet {

/// A non-finite value or overflow surfaced during evaluation or training.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class EncodingKind { Sine, Herglotz, SphHarm };

std::string to_string(EncodingKind kind);
EncodingKind encoding_from_string(const std::string& name);

// First network stage.
//   Sine:     n features sin(omega0 (f_i . (theta, phi)) + b_i)
//   Herglotz: 2n features, real parts then imaginary parts of the n atoms
//   SphHarm:  (l0+1)^2 real harmonics, enumerated by degree; within a degree
//             Y_l0 first, then (sqrt2 Re Y_lm, sqrt2 Im Y_lm) for m = 1..l
struct PositionalEncoding {
  EncodingKind kind = EncodingKind::SphHarm;
  double omega0 = 1.0;
  std::vector<std::array<double, 2>> sine_freq;
  std::vector<double> sine_bias;
  std::vector<HerglotzNeuron> herglotz;
  int l0 = 0;

  std::size_t width() const;
  std::size_t trainable_count() const;
};

struct Activation {
  enum class Kind { Sine, Polynomial, Identity };
  Kind kind = Kind::Sine;
  double frequency = 1.0;     // sin(frequency * z)
  std::vector<double> alpha;  // sum_k alpha_k z^k

  static Activation sine(double frequency = 1.0) { return {Kind::Sine, frequency, {}}; }
  static Activation polynomial(std::vector<double> coeffs);
  static Activation identity() { return {Kind::Identity, 1.0, {}}; }

  template <class T>
  T apply(const T& z) const;
  double derivative(double z) const;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
  Activation activation = Activation::identity();

  DenseLayer() = default;
  DenseLayer(int in, int out, Activation act)
      : weight(Eigen::MatrixXd::Zero(out, in)), bias(Eigen::VectorXd::Zero(out)),
        activation(std::move(act)) {}

  int in() const { return static_cast<int>(weight.cols()); }
  int out() const { return static_cast<int>(weight.rows()); }
};

// f(x) = readout(hidden_{Q-1}( ... hidden_1(pe(x)))) with a scalar output.
struct Network {
  PositionalEncoding pe;
  std::vector<DenseLayer> hidden;
  DenseLayer readout;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument if layer widths do not chain.
  void check_dimensions() const;
};

struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Trainable blocks in flattening order: pe.*, hidden[q].W, hidden[q].b,
/// readout.W, readout.b. Matrices are row-major.
std::vector<ParamBlock> param_blocks(const Network& net);
std::size_t param_count(const Network& net);
std::vector<double> get_params(const Network& net);
void set_params(Network& net, std::span<const double> params);

enum class ModelKind { Hnet, Siren, SphSiren };
ModelKind model_from_string(const std::string& name);
std::string to_string(ModelKind kind);

// Architecture as exposed on the command line: `pe_size` is the neuron count
// for hnet/siren and the order cap l0 for sphsiren; omega0 is the PE scale for
// hnet/siren and the first hidden activation frequency for sphsiren.
struct ModelConfig {
  ModelKind kind = ModelKind::Hnet;
  int pe_size = 50;
  std::vector<int> hidden{100, 100, 100};
  double omega0 = 10.0;
};

/// Zero-initialized network of the requested shape.
Network make_network(const ModelConfig& cfg);

/// SIREN initialization. The first trainable affine map (the sine PE rows, or
/// the first hidden layer after a Herglotz/SH encoding) draws U(-1/fan_in,
/// 1/fan_in); later layers draw U(-sqrt(6/fan_in)/omega0, sqrt(6/fan_in)/omega0);
/// biases draw U(-1/sqrt(fan_in), 1/sqrt(fan_in)). Herglotz neurons get
/// directions from sample_herglotz, w uniform on the unit disk and b = 0.
Network init_siren(Network net, Rng& rng, double omega0);

/// make_network + init_siren seeded from `seed`.
Network build_network(const ModelConfig& cfg, std::uint64_t seed);

std::vector<double> pe_eval(const PositionalEncoding& pe, const SphericalPoint& p);

double forward(const Network& net, const SphericalPoint& p);

/// forward on every node of a grid.
std::vector<double> forward_grid(const Network& net, const GaussLegendreGrid& grid,
                                 int threads = 1);

// ---------------------------------------------------------------------------
// Generic evaluation. T is the spatial scalar (double or DualScalar2 seeded
// on theta/phi). When `tangent` is given, every parameter p is lifted to
// DualScalar2(p, tangent_p) so slot 0 of the output carries the directional
// derivative along the tangent's parameters.

namespace detail {

template <class T>
void check_finite(const T& v, const char* where, std::size_t index) {
  if (!std::isfinite(value_of(v))) {
    throw NumericError(std::string("non-finite value in ") + where + " (unit " +
                       std::to_string(index) + ")");
  }
}

template <class T>
void encode(const PositionalEncoding& pe, const PositionalEncoding* tangent, const T& theta,
            const T& phi, std::vector<T>& out) {
  using std::cos;
  using std::exp;
  using std::sin;
  const auto lift = [&](double v, double dv) -> T {
    if (tangent == nullptr) return T(v);
    if constexpr (std::is_same_v<T, DualScalar2>) {
      return T(v, dv, 0.0);
    } else {
      throw std::logic_error("tangent evaluation needs DualScalar2");
    }
  };
  out.clear();
  switch (pe.kind) {
    case EncodingKind::Sine: {
      out.reserve(pe.sine_bias.size());
      for (std::size_t i = 0; i < pe.sine_bias.size(); ++i) {
        const T f0 = lift(pe.sine_freq[i][0], tangent ? tangent->sine_freq[i][0] : 0.0);
        const T f1 = lift(pe.sine_freq[i][1], tangent ? tangent->sine_freq[i][1] : 0.0);
        const T b = lift(pe.sine_bias[i], tangent ? tangent->sine_bias[i] : 0.0);
        out.push_back(sin(pe.omega0 * (f0 * theta + f1 * phi) + b));
      }
      break;
    }
    case EncodingKind::Herglotz: {
      const std::size_t n = pe.herglotz.size();
      out.resize(2 * n);
      const T st = sin(theta);
      const T x = st * cos(phi), y = st * sin(phi), z = cos(theta);
      for (std::size_t i = 0; i < n; ++i) {
        const HerglotzNeuron& h = pe.herglotz[i];
        const HerglotzNeuron* dh = tangent ? &tangent->herglotz[i] : nullptr;
        const T pr = h.a.re.x * x + h.a.re.y * y + h.a.re.z * z;
        const T pi = h.a.im.x * x + h.a.im.y * y + h.a.im.z * z;
        const T wr = lift(h.w.real(), dh ? dh->w.real() : 0.0);
        const T wi = lift(h.w.imag(), dh ? dh->w.imag() : 0.0);
        const T br = lift(h.b.real(), dh ? dh->b.real() : 0.0);
        const T bi = lift(h.b.imag(), dh ? dh->b.imag() : 0.0);
        const T zr = pe.omega0 * (wr * pr - wi * pi + br);
        const T zi = pe.omega0 * (wr * pi + wi * pr + bi);
        if (value_of(zr) > kAtomExponentLimit) throw MagnitudeOverflow(i, value_of(zr));
        const T mag = exp(zr);
        out[i] = mag * cos(zi);
        out[n + i] = mag * sin(zi);
      }
      break;
    }
    case EncodingKind::SphHarm: {
      const NormalizedLegendre legendre(pe.l0);
      std::vector<T> plm;
      legendre.evaluate(cos(theta), sin(theta), plm);
      out.reserve(pe.width());
      const double root2 = std::sqrt(2.0);
      for (int l = 0; l <= pe.l0; ++l) {
        out.push_back(plm[NormalizedLegendre::index(l, 0)]);
        for (int m = 1; m <= l; ++m) {
          const T scaled = root2 * plm[NormalizedLegendre::index(l, m)];
          out.push_back(scaled * cos(static_cast<double>(m) * phi));
          out.push_back(scaled * sin(static_cast<double>(m) * phi));
        }
      }
      break;
    }
  }
}

template <class T>
void dense(const DenseLayer& layer, const DenseLayer* tangent, const std::vector<T>& in,
           std::vector<T>& out, bool activate) {
  const int rows = layer.out(), cols = layer.in();
  out.assign(static_cast<std::size_t>(rows), T(0.0));
  for (int o = 0; o < rows; ++o) {
    T acc(layer.bias(o));
    if (tangent != nullptr) {
      if constexpr (std::is_same_v<T, DualScalar2>) {
        acc.d0 = tangent->bias(o);
        for (int i = 0; i < cols; ++i) {
          acc += T(layer.weight(o, i), tangent->weight(o, i), 0.0) * in[i];
        }
      }
    } else {
      for (int i = 0; i < cols; ++i) acc += in[i] * layer.weight(o, i);
    }
    out[o] = activate ? layer.activation.apply(acc) : acc;
  }
}

}  // namespace detail

template <class T>
T evaluate(const Network& net, const T& theta, const T& phi, const Network* tangent = nullptr) {
  std::vector<T> a, b;
  detail::encode(net.pe, tangent ? &tangent->pe : nullptr, theta, phi, a);
  for (std::size_t i = 0; i < a.size(); ++i) detail::check_finite(a[i], "positional encoding", i);
  for (std::size_t q = 0; q < net.hidden.size(); ++q) {
    detail::dense(net.hidden[q], tangent ? &tangent->hidden[q] : nullptr, a, b, true);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!std::isfinite(value_of(b[i]))) {
        throw NumericError("non-finite value in hidden layer " + std::to_string(q + 1));
      }
    }
    std::swap(a, b);
  }
  detail::dense(net.readout, tangent ? &tangent->readout : nullptr, a, b,
                net.readout.activation.kind != Activation::Kind::Identity);
  detail::check_finite(b[0], "readout", 0);
  return b[0];
}

template <class T>
T Activation::apply(const T& z) const {
  using std::sin;
  switch (kind) {
    case Kind::Sine:
      return sin(frequency * z);
    case Kind::Polynomial: {
      T acc(alpha.back());
      for (std::size_t k = alpha.size() - 1; k-- > 0;) acc = acc * z + alpha[k];
      return acc;
    }
    case Kind::Identity:
      break;
  }
  return z;
}

}  // namespace hnet
