#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cstddef>

#include "slicewb/rng.hpp"

namespace slicewb::gp {

/// Matern covariance with anisotropic length scales plus the Gaussian
/// observation noise variance added to the Gram diagonal.
struct KernelParams {
  Eigen::VectorXd length_scales;
  double signal_var = 1.0;
  double nu = 2.5;  // 0.5, 1.5 or 2.5
  double noise_var = 1e-6;
};

double matern(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& params);

struct Prediction {
  double mu = 0.0;
  double sigma = 0.0;
};

/// How targets are shifted and scaled before fitting. The zero prior mean
/// then sits at the shift: the sample mean, or the lowest target for a
/// pessimistic prior. Both scale by the standard deviation about the mean.
enum class Centering { None, Mean, Min };

/// Exact GP regression with zero prior mean over the transformed targets;
/// predictions are reported in target units.
class GpModel {
 public:
  /// Unfitted model: predict() returns the prior (0, sqrt(signal_var)).
  explicit GpModel(KernelParams params);

  /// `inputs` holds one training point per row. Throws Factorization when the
  /// Gram matrix stays indefinite after jitter escalation up to 1e-4.
  static GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     KernelParams params, Centering centering = Centering::Mean);

  Prediction predict(const Eigen::VectorXd& query) const;

  /// Log marginal likelihood of the transformed targets.
  double log_marginal_likelihood() const { return lml_; }

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  bool empty() const { return inputs_.rows() == 0; }
  const KernelParams& params() const { return params_; }
  double jitter() const { return jitter_; }
  double prior_variance() const { return y_scale_ * y_scale_ * params_.signal_var; }
  /// Standard deviation used to scale the targets (1 for Centering::None).
  double target_scale() const { return y_scale_; }
  double prior_mean() const { return y_mean_; }

 private:
  KernelParams params_;
  Eigen::MatrixXd inputs_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double jitter_ = 0.0;
  double lml_ = 0.0;
};

struct HyperBounds {
  Eigen::VectorXd length_lo;
  Eigen::VectorXd length_hi;
  double signal_lo = 0.05;
  double signal_hi = 20.0;
  double noise_lo = 1e-6;
  double noise_hi = 1.0;
};

/// Length-scale bounds [0.05, 20] x span per dimension (flat spans count as 1).
HyperBounds bounds_from_spans(const Eigen::VectorXd& spans);

/// bounds_from_spans over the per-dimension span of the inputs.
HyperBounds default_bounds(const Eigen::MatrixXd& inputs);

/// Length scales at half the span of each input dimension (1 for flat ones).
Eigen::VectorXd half_span_lengths(const Eigen::MatrixXd& inputs);

/// Maximizes the log marginal likelihood over log length scales, log signal
/// variance and log noise variance with Nelder-Mead, restarted from `start`
/// and from `restarts` random points inside the bounds.
KernelParams optimize_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                      const KernelParams& start, const HyperBounds& bounds, Rng& rng,
                                      int restarts = 3, Centering centering = Centering::Mean);

}  // namespace slicewb::gp
