#pragma once

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <vector>

#include "hnet/network.hpp"

namespace hnet {

struct Sample {
  SphericalPoint point;
  double target = 0.0;
};

// Reverse-mode record of one batched forward pass. Each node holds the
// output of one stage (features x batch); the backward sweep applies the
// stage's vector-Jacobian product in reverse order.
class Tape {
public:
  enum class Op { Encode, Affine, Activate };

  struct Node {
    Op op;
    int layer;  // hidden index, or -1 for the readout
    Eigen::MatrixXd value;
  };

  static Tape record(const Network& net, std::span<const SphericalPoint> points);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t batch_size() const { return points_.size(); }

  /// Network output, 1 x batch.
  const Eigen::MatrixXd& output() const { return nodes_.back().value; }

  /// Re-runs the recorded stages from the stored encoding.
  Eigen::MatrixXd replay(const Network& net) const;

  /// Gradient of sum_s seed(s) * output(s) with respect to every trainable
  /// parameter, in get_params order.
  std::vector<double> backward(const Network& net, const Eigen::MatrixXd& seed) const;

private:
  std::vector<SphericalPoint> points_;
  std::vector<Node> nodes_;
  Eigen::MatrixXcd projections_;  // a_i^T x_s for Herglotz encodings
};

struct GradResult {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Mean squared error over the batch and its exact gradient. Throws
/// std::invalid_argument for an empty batch and NumericError naming the
/// parameter block when a gradient entry is not finite.
GradResult grad_params(const Network& net, std::span<const Sample> batch);

/// Batched forward values (same arithmetic as training).
std::vector<double> predict(const Network& net, std::span<const SphericalPoint> points);

/// Minimum distance from either pole accepted by spherical_laplacian.
inline constexpr double kPoleExclusion = 1e-6;

/// Laplace-Beltrami operator of the network output at p via the chart formula
/// f_tt + cot(t) f_t + f_pp / sin^2(t), with second derivatives propagated by
/// DualScalar2 through the whole forward pass. Throws std::domain_error within
/// kPoleExclusion of a pole.
double spherical_laplacian(const Network& net, const SphericalPoint& p);

std::vector<double> laplacian_grid(const Network& net, const GaussLegendreGrid& grid,
                                   int threads = 1);

/// Forward-mode derivative of the output along a parameter-space direction.
double directional_derivative(const Network& net, const SphericalPoint& p,
                              std::span<const double> direction);

}  // namespace hnet
