#include "hnet/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hnet/parallel.hpp"

namespace hnet {

void TrainConfig::validate() const {
  if (epochs <= 0 || batch_size <= 0 || !(learning_rate > 0.0) || !(epsilon > 0.0) ||
      !(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("training settings must be positive (betas in (0,1))");
  }
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  if (!(cfg.final_learning_rate > 0.0) || cfg.epochs <= 1) return cfg.learning_rate;
  const double t = static_cast<double>(epoch) / static_cast<double>(cfg.epochs - 1);
  return cfg.learning_rate * std::pow(cfg.final_learning_rate / cfg.learning_rate, t);
}

Standardizer standardize_fit(std::span<const double> targets) {
  if (targets.size() < 2) throw std::invalid_argument("standardization needs at least 2 samples");
  const double n = static_cast<double>(targets.size());
  double mean = 0.0;
  for (double t : targets) mean += t;
  mean /= n;
  double var = 0.0;
  for (double t : targets) var += (t - mean) * (t - mean);
  var /= n;
  if (!(var > 0.0)) throw std::invalid_argument("cannot standardize constant targets");
  return {mean, std::sqrt(var)};
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const TrainConfig& cfg) {
  if (params.size() != grads.size()) throw std::invalid_argument("parameter/gradient size mismatch");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

FitResult fit(Network net, const GridField& dataset, const TrainConfig& cfg) {
  cfg.validate();
  net.check_dimensions();
  const GaussLegendreGrid& grid = dataset.grid;
  const std::vector<double> raw = dataset.real_values();
  double scale = 0.0;
  for (const auto& v : dataset.values) scale = std::max(scale, std::abs(v));
  for (const auto& v : dataset.values) {
    if (std::abs(v.imag()) > 1e-12 * std::max(scale, 1.0)) {
      throw std::invalid_argument("training targets must be real-valued");
    }
  }

  FitResult result{std::move(net), standardize_fit(raw), {}};
  std::vector<Sample> samples(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    samples[i] = {grid.point(i), result.standardizer.transform(raw[i])};
  }

  Rng shuffler(cfg.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> params = get_params(result.net);
  AdamState adam;
  std::vector<Sample> batch;
  result.loss_history.reserve(static_cast<std::size_t>(cfg.epochs));

  TrainConfig step_cfg = cfg;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    step_cfg.learning_rate = learning_rate_at(cfg, epoch);
    if (cfg.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffler.below(i)]);
      }
    }
    double epoch_loss = 0.0;
    std::size_t b = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++b) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(samples[order[i]]);
      GradResult g;
      try {
        g = grad_params(result.net, batch);
      } catch (const std::exception& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) +
                           ": " + e.what());
      }
      epoch_loss += g.loss * static_cast<double>(stop - start);
      adam_step(params, g.grad, adam, step_cfg);
      set_params(result.net, params);
    }
    result.loss_history.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

double snr_db(const GridField& pred, const GridField& truth) {
  if (!(pred.grid == truth.grid) || pred.values.size() != truth.values.size()) {
    throw std::invalid_argument("SNR needs fields on the same grid");
  }
  const GaussLegendreGrid& grid = truth.grid;
  double signal = 0.0, error = 0.0;
  for (std::size_t j = 0; j < grid.n_theta(); ++j) {
    const double w = grid.node_weight(j);
    for (std::size_t k = 0; k < grid.n_phi(); ++k) {
      const std::size_t i = grid.index(j, k);
      signal += w * std::norm(truth.values[i]);
      error += w * std::norm(pred.values[i] - truth.values[i]);
    }
  }
  if (!(signal > 0.0)) throw std::invalid_argument("SNR undefined for a zero-energy reference");
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

GridField predict_field(const Network& net, const Standardizer& st, const GaussLegendreGrid& grid,
                        int threads) {
  constexpr std::size_t kChunk = 4096;
  GridField out(grid);
  const std::size_t chunks = (grid.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t begin = c * kChunk, end = std::min(grid.size(), begin + kChunk);
    std::vector<SphericalPoint> points;
    points.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) points.push_back(grid.point(i));
    const auto y = predict(net, points);
    for (std::size_t i = begin; i < end; ++i) out.values[i] = st.untransform(y[i - begin]);
  });
  return out;
}

GridField laplacian_field(const Network& net, const Standardizer& st,
                          const GaussLegendreGrid& grid, int threads) {
  const auto lap = laplacian_grid(net, grid, threads);
  GridField out(grid);
  for (std::size_t i = 0; i < lap.size(); ++i) out.values[i] = st.stddev * lap[i];
  return out;
}

double polar_band_error(const GridField& pred, const GridField& truth, double band) {
  if (!(pred.grid == truth.grid)) throw std::invalid_argument("fields on different grids");
  const GaussLegendreGrid& grid = truth.grid;
  const double lo = band * std::numbers::pi, hi = (1.0 - band) * std::numbers::pi;
  double err = 0.0;
  for (std::size_t j = 0; j < grid.n_theta(); ++j) {
    if (grid.theta(j) >= lo && grid.theta(j) <= hi) continue;
    const double w = grid.node_weight(j);
    for (std::size_t k = 0; k < grid.n_phi(); ++k) {
      const std::size_t i = grid.index(j, k);
      err += w * std::norm(pred.values[i] - truth.values[i]);
    }
  }
  return err;
}

}  // namespace hnet
