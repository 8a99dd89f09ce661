#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hnet/autodiff.hpp"
#include "hnet/network.hpp"
#include "hnet/sh_transform.hpp"

namespace hnet {

struct TrainConfig {
  int epochs = 2000;
  int batch_size = 2048;
  double learning_rate = 1e-3;
  // Exponential decay from learning_rate to this value over the run; <= 0 keeps it constant.
  double final_learning_rate = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
  bool shuffle = true;

  /// Throws std::invalid_argument on non-positive settings.
  void validate() const;
};

// Affine map to zero mean, unit population standard deviation.
struct Standardizer {
  double mean = 0.0;
  double stddev = 1.0;

  double transform(double y) const { return (y - mean) / stddev; }
  double untransform(double z) const { return z * stddev + mean; }
};

/// Throws std::invalid_argument for fewer than two samples or constant targets.
Standardizer standardize_fit(std::span<const double> targets);

/// Step size used during the given epoch.
double learning_rate_at(const TrainConfig& cfg, int epoch);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long step = 0;
};

/// One bias-corrected Adam update of params in place.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               const TrainConfig& cfg);

struct FitResult {
  Network net;
  Standardizer standardizer;
  std::vector<double> loss_history;  // mean standardized MSE per epoch
};

/// Minibatch Adam on the MSE of standardized real targets. Errors from the
/// gradient are rethrown as NumericError with epoch/batch context.
FitResult fit(Network net, const GridField& dataset, const TrainConfig& cfg);

/// SNR cap returned for an exact match.
inline constexpr double kSnrCapDb = 300.0;

/// 10 log10(sum w truth^2 / sum w (pred - truth)^2) with quadrature weights.
/// Throws std::invalid_argument for mismatched grids or zero-energy truth.
double snr_db(const GridField& pred, const GridField& truth);

/// Model predictions on the grid in original units.
GridField predict_field(const Network& net, const Standardizer& st, const GaussLegendreGrid& grid,
                        int threads = 1);

/// Autodiff Laplacian of the de-standardized model on the grid.
GridField laplacian_field(const Network& net, const Standardizer& st,
                          const GaussLegendreGrid& grid, int threads = 1);

/// Quadrature-weighted squared error restricted to rings with theta below
/// band*pi or above (1-band)*pi.
double polar_band_error(const GridField& pred, const GridField& truth, double band = 0.1);

}  // namespace hnet
