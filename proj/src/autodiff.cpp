#include "hnet/autodiff.hpp"

#include "hnet/parallel.hpp"

#include <cmath>
#include <string>

namespace hnet {

namespace {

const DenseLayer& layer_at(const Network& net, int layer) {
  return layer < 0 ? net.readout : net.hidden[static_cast<std::size_t>(layer)];
}

Eigen::MatrixXd affine(const DenseLayer& layer, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = layer.weight * x;
  z.colwise() += layer.bias;
  return z;
}

Eigen::MatrixXd activate(const Activation& act, const Eigen::MatrixXd& z) {
  return z.unaryExpr([&](double v) { return act.apply(v); });
}

}  // namespace

Tape Tape::record(const Network& net, std::span<const SphericalPoint> points) {
  Tape tape;
  tape.points_.assign(points.begin(), points.end());
  const auto batch = static_cast<Eigen::Index>(points.size());
  const auto width = static_cast<Eigen::Index>(net.pe.width());

  Eigen::MatrixXd features(width, batch);
  std::vector<double> f;
  for (Eigen::Index s = 0; s < batch; ++s) {
    detail::encode<double>(net.pe, nullptr, points[s].theta(), points[s].phi(), f);
    for (Eigen::Index i = 0; i < width; ++i) {
      if (!std::isfinite(f[i])) {
        throw NumericError("non-finite value in positional encoding (unit " + std::to_string(i) +
                           ")");
      }
      features(i, s) = f[i];
    }
  }
  if (net.pe.kind == EncodingKind::Herglotz) {
    const auto n = static_cast<Eigen::Index>(net.pe.herglotz.size());
    tape.projections_.resize(n, batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
      const Vec3 x = unit_vector(points[s]);
      for (Eigen::Index i = 0; i < n; ++i) tape.projections_(i, s) = net.pe.herglotz[i].a.project(x);
    }
  }
  tape.nodes_.push_back({Op::Encode, -1, std::move(features)});

  for (std::size_t q = 0; q < net.hidden.size(); ++q) {
    const auto& layer = net.hidden[q];
    Eigen::MatrixXd z = affine(layer, tape.nodes_.back().value);
    Eigen::MatrixXd a = activate(layer.activation, z);
    if (!a.allFinite()) throw NumericError("non-finite value in hidden layer " + std::to_string(q + 1));
    tape.nodes_.push_back({Op::Affine, static_cast<int>(q), std::move(z)});
    tape.nodes_.push_back({Op::Activate, static_cast<int>(q), std::move(a)});
  }
  Eigen::MatrixXd y = affine(net.readout, tape.nodes_.back().value);
  if (!y.allFinite()) throw NumericError("non-finite value in readout");
  tape.nodes_.push_back({Op::Affine, -1, std::move(y)});
  return tape;
}

Eigen::MatrixXd Tape::replay(const Network& net) const {
  Eigen::MatrixXd current = nodes_.front().value;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    const DenseLayer& layer = layer_at(net, node.layer);
    current = node.op == Op::Affine ? affine(layer, current) : activate(layer.activation, current);
  }
  return current;
}

std::vector<double> Tape::backward(const Network& net, const Eigen::MatrixXd& seed) const {
  const auto blocks = param_blocks(net);
  std::vector<double> grad(param_count(net), 0.0);
  // Hidden/readout blocks follow the PE blocks as (W, b) pairs.
  const std::size_t pe_blocks = blocks.size() - 2 * (net.hidden.size() + 1);
  const auto write_layer = [&](int layer, const Eigen::MatrixXd& gw, const Eigen::VectorXd& gb) {
    const std::size_t q = layer < 0 ? net.hidden.size() : static_cast<std::size_t>(layer);
    const ParamBlock& wb = blocks[pe_blocks + 2 * q];
    const ParamBlock& bb = blocks[pe_blocks + 2 * q + 1];
    std::size_t k = wb.offset;
    for (Eigen::Index o = 0; o < gw.rows(); ++o)
      for (Eigen::Index i = 0; i < gw.cols(); ++i) grad[k++] = gw(o, i);
    for (Eigen::Index o = 0; o < gb.size(); ++o) grad[bb.offset + o] = gb(o);
  };

  Eigen::MatrixXd upstream = seed;
  for (std::size_t idx = nodes_.size() - 1; idx >= 1; --idx) {
    const Node& node = nodes_[idx];
    const DenseLayer& layer = layer_at(net, node.layer);
    if (node.op == Op::Activate) {
      const Eigen::MatrixXd& z = nodes_[idx - 1].value;
      upstream = upstream.cwiseProduct(
          z.unaryExpr([&](double v) { return layer.activation.derivative(v); }));
    } else {
      const Eigen::MatrixXd& input = nodes_[idx - 1].value;
      const Eigen::MatrixXd gw = upstream * input.transpose();
      const Eigen::VectorXd gb = upstream.rowwise().sum();
      write_layer(node.layer, gw, gb);
      upstream = layer.weight.transpose() * upstream;
    }
  }

  // upstream now holds d/d(features).
  const auto batch = static_cast<Eigen::Index>(points_.size());
  const double omega0 = net.pe.omega0;
  if (net.pe.kind == EncodingKind::Herglotz) {
    const Eigen::MatrixXd& feat = nodes_.front().value;
    const auto n = static_cast<Eigen::Index>(net.pe.herglotz.size());
    const std::size_t w_off = blocks[0].offset, b_off = blocks[1].offset;
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex gw = 0.0, gb = 0.0;  // accumulate conj(g) dpsi
      for (Eigen::Index s = 0; s < batch; ++s) {
        const Complex psi{feat(i, s), feat(n + i, s)};
        const Complex g{upstream(i, s), upstream(n + i, s)};
        const Complex dpsi_db = omega0 * psi;
        gw += std::conj(g) * (dpsi_db * projections_(i, s));
        gb += std::conj(g) * dpsi_db;
      }
      grad[w_off + 2 * i] = gw.real();
      grad[w_off + 2 * i + 1] = -gw.imag();
      grad[b_off + 2 * i] = gb.real();
      grad[b_off + 2 * i + 1] = -gb.imag();
    }
  } else if (net.pe.kind == EncodingKind::Sine) {
    const std::size_t f_off = blocks[0].offset, b_off = blocks[1].offset;
    const auto n = static_cast<Eigen::Index>(net.pe.sine_bias.size());
    for (Eigen::Index i = 0; i < n; ++i) {
      double g0 = 0.0, g1 = 0.0, gb = 0.0;
      const auto& f = net.pe.sine_freq[i];
      for (Eigen::Index s = 0; s < batch; ++s) {
        const double th = points_[s].theta(), ph = points_[s].phi();
        const double c = std::cos(omega0 * (f[0] * th + f[1] * ph) + net.pe.sine_bias[i]);
        const double g = upstream(i, s) * c;
        g0 += g * omega0 * th;
        g1 += g * omega0 * ph;
        gb += g;
      }
      grad[f_off + 2 * i] = g0;
      grad[f_off + 2 * i + 1] = g1;
      grad[b_off + i] = gb;
    }
  }
  return grad;
}

GradResult grad_params(const Network& net, std::span<const Sample> batch) {
  if (batch.empty()) throw std::invalid_argument("gradient needs a nonempty batch");
  std::vector<SphericalPoint> points;
  points.reserve(batch.size());
  for (const auto& s : batch) points.push_back(s.point);
  const Tape tape = Tape::record(net, points);
  const Eigen::MatrixXd& y = tape.output();
  const double inv_n = 1.0 / static_cast<double>(batch.size());

  Eigen::MatrixXd seed(1, y.cols());
  double loss = 0.0;
  for (Eigen::Index s = 0; s < y.cols(); ++s) {
    const double r = y(0, s) - batch[s].target;
    loss += r * r;
    seed(0, s) = 2.0 * r * inv_n;
  }
  GradResult out{loss * inv_n, tape.backward(net, seed)};
  for (const auto& block : param_blocks(net)) {
    for (std::size_t k = block.offset; k < block.offset + block.size; ++k) {
      if (!std::isfinite(out.grad[k])) {
        throw NumericError("non-finite gradient in parameter block " + block.name);
      }
    }
  }
  return out;
}

std::vector<double> predict(const Network& net, std::span<const SphericalPoint> points) {
  const Tape tape = Tape::record(net, points);
  const Eigen::MatrixXd& y = tape.output();
  return {y.data(), y.data() + y.size()};
}

double spherical_laplacian(const Network& net, const SphericalPoint& p) {
  const double theta = p.theta();
  if (theta < kPoleExclusion || theta > std::numbers::pi - kPoleExclusion) {
    throw std::domain_error("spherical Laplacian undefined in the chart within " +
                            std::to_string(kPoleExclusion) + " rad of a pole (theta=" +
                            std::to_string(theta) + ")");
  }
  const auto th = DualScalar2::variable(theta, 0);
  const auto ph = DualScalar2::variable(p.phi(), 1);
  const DualScalar2 f = evaluate<DualScalar2>(net, th, ph);
  const double s = std::sin(theta);
  return f.h00 + (std::cos(theta) / s) * f.d0 + f.h11 / (s * s);
}

std::vector<double> laplacian_grid(const Network& net, const GaussLegendreGrid& grid,
                                   int threads) {
  std::vector<double> out(grid.size());
  parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = spherical_laplacian(net, grid.point(i)); });
  return out;
}

double directional_derivative(const Network& net, const SphericalPoint& p,
                              std::span<const double> direction) {
  Network tangent = net;
  set_params(tangent, direction);
  const DualScalar2 f =
      evaluate<DualScalar2>(net, DualScalar2(p.theta()), DualScalar2(p.phi()), &tangent);
  return f.d0;
}

}  // namespace hnet
