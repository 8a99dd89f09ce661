#include "hnet/network.hpp"

#include "hnet/parallel.hpp"

#include <numbers>

namespace hnet {

std::string to_string(EncodingKind kind) {
  switch (kind) {
    case EncodingKind::Sine:
      return "sine";
    case EncodingKind::Herglotz:
      return "herglotz";
    case EncodingKind::SphHarm:
      return "sphharm";
  }
  return "unknown";
}

EncodingKind encoding_from_string(const std::string& name) {
  if (name == "sine") return EncodingKind::Sine;
  if (name == "herglotz") return EncodingKind::Herglotz;
  if (name == "sphharm") return EncodingKind::SphHarm;
  throw std::invalid_argument("unknown positional encoding '" + name + "'");
}

std::size_t PositionalEncoding::width() const {
  switch (kind) {
    case EncodingKind::Sine:
      return sine_bias.size();
    case EncodingKind::Herglotz:
      return 2 * herglotz.size();
    case EncodingKind::SphHarm:
      return static_cast<std::size_t>((l0 + 1) * (l0 + 1));
  }
  return 0;
}

std::size_t PositionalEncoding::trainable_count() const {
  switch (kind) {
    case EncodingKind::Sine:
      return 3 * sine_bias.size();
    case EncodingKind::Herglotz:
      return 4 * herglotz.size();
    case EncodingKind::SphHarm:
      return 0;
  }
  return 0;
}

Activation Activation::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty() || coeffs.back() == 0.0) {
    throw std::invalid_argument("polynomial activation needs a nonzero leading coefficient");
  }
  return {Kind::Polynomial, 1.0, std::move(coeffs)};
}

double Activation::derivative(double z) const {
  switch (kind) {
    case Kind::Sine:
      return frequency * std::cos(frequency * z);
    case Kind::Polynomial: {
      double acc = 0.0;
      for (std::size_t k = alpha.size() - 1; k >= 1; --k) acc = acc * z + k * alpha[k];
      return acc;
    }
    case Kind::Identity:
      break;
  }
  return 1.0;
}

void Network::check_dimensions() const {
  std::size_t width = pe.width();
  for (std::size_t q = 0; q < hidden.size(); ++q) {
    if (static_cast<std::size_t>(hidden[q].in()) != width) {
      throw std::invalid_argument("hidden layer " + std::to_string(q + 1) + " expects " +
                                  std::to_string(hidden[q].in()) + " inputs, got " +
                                  std::to_string(width));
    }
    width = static_cast<std::size_t>(hidden[q].out());
  }
  if (static_cast<std::size_t>(readout.in()) != width || readout.out() != 1) {
    throw std::invalid_argument("readout must map " + std::to_string(width) + " features to 1");
  }
}

std::vector<ParamBlock> param_blocks(const Network& net) {
  std::vector<ParamBlock> blocks;
  std::size_t offset = 0;
  const auto add = [&](std::string name, std::size_t size) {
    blocks.push_back({std::move(name), offset, size});
    offset += size;
  };
  switch (net.pe.kind) {
    case EncodingKind::Sine:
      add("pe.freq", 2 * net.pe.sine_bias.size());
      add("pe.bias", net.pe.sine_bias.size());
      break;
    case EncodingKind::Herglotz:
      add("pe.w", 2 * net.pe.herglotz.size());
      add("pe.b", 2 * net.pe.herglotz.size());
      break;
    case EncodingKind::SphHarm:
      break;
  }
  for (std::size_t q = 0; q < net.hidden.size(); ++q) {
    const auto& layer = net.hidden[q];
    add("hidden[" + std::to_string(q) + "].W", static_cast<std::size_t>(layer.weight.size()));
    add("hidden[" + std::to_string(q) + "].b", static_cast<std::size_t>(layer.bias.size()));
  }
  add("readout.W", static_cast<std::size_t>(net.readout.weight.size()));
  add("readout.b", static_cast<std::size_t>(net.readout.bias.size()));
  return blocks;
}

std::size_t param_count(const Network& net) {
  std::size_t n = net.pe.trainable_count();
  for (const auto& layer : net.hidden) n += layer.weight.size() + layer.bias.size();
  n += net.readout.weight.size() + net.readout.bias.size();
  return n;
}

namespace {

// std::complex is layout-compatible with double[2].
double* complex_parts(Complex& c) { return reinterpret_cast<double*>(&c); }
const double* complex_parts(const Complex& c) { return reinterpret_cast<const double*>(&c); }

// Visits every trainable scalar in flattening order.
template <class NetT, class Fn>
void for_each_param(NetT& net, Fn&& fn) {
  auto& pe = net.pe;
  switch (pe.kind) {
    case EncodingKind::Sine:
      for (auto& f : pe.sine_freq) {
        fn(f[0]);
        fn(f[1]);
      }
      for (auto& b : pe.sine_bias) fn(b);
      break;
    case EncodingKind::Herglotz:
      for (auto& h : pe.herglotz) {
        auto* w = complex_parts(h.w);
        fn(w[0]);
        fn(w[1]);
      }
      for (auto& h : pe.herglotz) {
        auto* b = complex_parts(h.b);
        fn(b[0]);
        fn(b[1]);
      }
      break;
    case EncodingKind::SphHarm:
      break;
  }
  const auto layer_params = [&](auto& layer) {
    for (int o = 0; o < layer.weight.rows(); ++o)
      for (int i = 0; i < layer.weight.cols(); ++i) fn(layer.weight(o, i));
    for (int o = 0; o < layer.bias.size(); ++o) fn(layer.bias(o));
  };
  for (auto& layer : net.hidden) layer_params(layer);
  layer_params(net.readout);
}

}  // namespace

std::vector<double> get_params(const Network& net) {
  std::vector<double> out;
  out.reserve(param_count(net));
  for_each_param(net, [&](const double& v) { out.push_back(v); });
  return out;
}

void set_params(Network& net, std::span<const double> params) {
  if (params.size() != param_count(net)) {
    throw std::invalid_argument("parameter vector has " + std::to_string(params.size()) +
                                " entries, network has " + std::to_string(param_count(net)));
  }
  std::size_t i = 0;
  for_each_param(net, [&](double& v) { v = params[i++]; });
}

ModelKind model_from_string(const std::string& name) {
  if (name == "hnet") return ModelKind::Hnet;
  if (name == "siren") return ModelKind::Siren;
  if (name == "sphsiren") return ModelKind::SphSiren;
  throw std::invalid_argument("unknown model '" + name + "' (expected hnet, siren or sphsiren)");
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Hnet:
      return "hnet";
    case ModelKind::Siren:
      return "siren";
    case ModelKind::SphSiren:
      return "sphsiren";
  }
  return "unknown";
}

Network make_network(const ModelConfig& cfg) {
  if (cfg.pe_size < 0) throw std::invalid_argument("positional encoding size must be >= 0");
  Network net;
  switch (cfg.kind) {
    case ModelKind::Hnet:
      net.pe.kind = EncodingKind::Herglotz;
      net.pe.omega0 = cfg.omega0;
      net.pe.herglotz.resize(static_cast<std::size_t>(cfg.pe_size));
      break;
    case ModelKind::Siren:
      net.pe.kind = EncodingKind::Sine;
      net.pe.omega0 = cfg.omega0;
      net.pe.sine_freq.assign(static_cast<std::size_t>(cfg.pe_size), {0.0, 0.0});
      net.pe.sine_bias.assign(static_cast<std::size_t>(cfg.pe_size), 0.0);
      break;
    case ModelKind::SphSiren:
      net.pe.kind = EncodingKind::SphHarm;
      net.pe.omega0 = 1.0;
      net.pe.l0 = cfg.pe_size;
      break;
  }
  int width = static_cast<int>(net.pe.width());
  for (std::size_t q = 0; q < cfg.hidden.size(); ++q) {
    if (cfg.hidden[q] <= 0) throw std::invalid_argument("hidden widths must be positive");
    const double freq = (cfg.kind == ModelKind::SphSiren && q == 0) ? cfg.omega0 : 1.0;
    net.hidden.emplace_back(width, cfg.hidden[q], Activation::sine(freq));
    width = cfg.hidden[q];
  }
  net.readout = DenseLayer(width, 1, Activation::identity());
  return net;
}

Network init_siren(Network net, Rng& rng, double omega0) {
  bool first_affine = true;
  const auto fill_layer = [&](DenseLayer& layer) {
    const double fan_in = layer.in();
    const double bound = first_affine ? 1.0 / fan_in : std::sqrt(6.0 / fan_in) / omega0;
    first_affine = false;
    for (int o = 0; o < layer.out(); ++o)
      for (int i = 0; i < layer.in(); ++i) layer.weight(o, i) = rng.uniform(-bound, bound);
    const double bias_bound = 1.0 / std::sqrt(fan_in);
    for (int o = 0; o < layer.out(); ++o) layer.bias(o) = rng.uniform(-bias_bound, bias_bound);
  };

  switch (net.pe.kind) {
    case EncodingKind::Sine: {
      // Chart (theta, phi): fan_in = 2. Biases absorb the omega0 scale that
      // multiplies them in the reference SIREN layer.
      const double bound = 1.0 / 2.0;
      const double bias_bound = net.pe.omega0 / std::sqrt(2.0);
      for (auto& f : net.pe.sine_freq) {
        f[0] = rng.uniform(-bound, bound);
        f[1] = rng.uniform(-bound, bound);
      }
      for (auto& b : net.pe.sine_bias) b = rng.uniform(-bias_bound, bias_bound);
      first_affine = false;
      break;
    }
    case EncodingKind::Herglotz:
      for (auto& h : net.pe.herglotz) {
        h.a = sample_herglotz(rng);
        const double r = std::sqrt(rng.uniform());
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        h.w = std::polar(r, angle);
        h.b = 0.0;
      }
      break;
    case EncodingKind::SphHarm:
      break;
  }
  for (auto& layer : net.hidden) fill_layer(layer);
  fill_layer(net.readout);
  return net;
}

Network build_network(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Network net = init_siren(make_network(cfg), rng, cfg.omega0);
  net.seed = seed;
  return net;
}

std::vector<double> pe_eval(const PositionalEncoding& pe, const SphericalPoint& p) {
  std::vector<double> out;
  detail::encode<double>(pe, nullptr, p.theta(), p.phi(), out);
  return out;
}

double forward(const Network& net, const SphericalPoint& p) {
  return evaluate<double>(net, p.theta(), p.phi());
}

std::vector<double> forward_grid(const Network& net, const GaussLegendreGrid& grid, int threads) {
  std::vector<double> out(grid.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = forward(net, grid.point(i)); });
  return out;
}

}  // namespace hnet
