#include "slicewb/gp.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "slicewb/error.hpp"

namespace slicewb::gp {

double matern(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const KernelParams& params) {
  const double r = ((a - b).array() / params.length_scales.array()).matrix().norm();
  if (params.nu == 0.5) return params.signal_var * std::exp(-r);
  if (params.nu == 1.5) {
    const double t = std::sqrt(3.0) * r;
    return params.signal_var * (1.0 + t) * std::exp(-t);
  }
  const double t = std::sqrt(5.0) * r;
  return params.signal_var * (1.0 + t + t * t / 3.0) * std::exp(-t);
}

GpModel::GpModel(KernelParams params) : params_(std::move(params)) {}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                     KernelParams params, Centering centering) {
  const Eigen::Index n = inputs.rows();
  if (n == 0 || targets.size() != n) {
    throw Error(ErrorKind::Validation, "fit needs at least one experience and one target per input");
  }
  if (!inputs.allFinite() || !targets.allFinite()) {
    throw Error(ErrorKind::Validation, "non-finite training data");
  }

  GpModel model(std::move(params));
  model.inputs_ = inputs;
  if (centering != Centering::None) {
    const double mean = targets.mean();
    const double var = (targets.array() - mean).square().mean();
    model.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
    model.y_mean_ = centering == Centering::Min ? targets.minCoeff() : mean;
  }
  const Eigen::VectorXd y = (targets.array() - model.y_mean_) / model.y_scale_;

  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = matern(inputs.row(i), inputs.row(j), model.params_);
    }
  }
  gram.diagonal().array() += model.params_.noise_var;

  double jitter = 0.0;
  for (;;) {
    Eigen::MatrixXd k = gram;
    k.diagonal().array() += jitter;
    model.llt_.compute(k);
    if (model.llt_.info() == Eigen::Success) break;
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-4 * (1.0 + 1e-9)) {
      throw Error(ErrorKind::Factorization, "Gram matrix not positive definite after jitter 1e-4");
    }
  }
  model.jitter_ = jitter;
  model.alpha_ = model.llt_.solve(y);

  const Eigen::MatrixXd& l = model.llt_.matrixLLT();
  model.lml_ = -0.5 * y.dot(model.alpha_) - l.diagonal().array().log().sum() -
               0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return model;
}

Prediction GpModel::predict(const Eigen::VectorXd& query) const {
  if (empty()) return {0.0, std::sqrt(params_.signal_var)};

  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd kstar(n);
  for (Eigen::Index i = 0; i < n; ++i) kstar(i) = matern(inputs_.row(i), query, params_);

  const double mu = kstar.dot(alpha_);
  const Eigen::VectorXd v = llt_.matrixL().solve(kstar);
  const double var = std::max(0.0, params_.signal_var - v.squaredNorm());
  return {y_mean_ + y_scale_ * mu, y_scale_ * std::sqrt(var)};
}

Eigen::VectorXd half_span_lengths(const Eigen::MatrixXd& inputs) {
  Eigen::VectorXd out(inputs.cols());
  for (Eigen::Index d = 0; d < inputs.cols(); ++d) {
    const double span = inputs.col(d).maxCoeff() - inputs.col(d).minCoeff();
    out(d) = span > 1e-12 ? 0.5 * span : 1.0;
  }
  return out;
}

HyperBounds bounds_from_spans(const Eigen::VectorXd& spans) {
  HyperBounds b;
  b.length_lo.resize(spans.size());
  b.length_hi.resize(spans.size());
  for (Eigen::Index d = 0; d < spans.size(); ++d) {
    const double span = spans(d) > 1e-12 ? spans(d) : 1.0;
    b.length_lo(d) = 0.05 * span;
    b.length_hi(d) = 20.0 * span;
  }
  return b;
}

HyperBounds default_bounds(const Eigen::MatrixXd& inputs) {
  return bounds_from_spans(inputs.colwise().maxCoeff() - inputs.colwise().minCoeff());
}

namespace {

struct Problem {
  const Eigen::MatrixXd* inputs;
  const Eigen::VectorXd* targets;
  const KernelParams* base;
  const HyperBounds* bounds;
  Centering centering;
};

// theta = [log l_1 .. log l_d, log signal_var, log noise_var], clamped to bounds.
KernelParams unpack(const Eigen::VectorXd& theta, const Problem& p) {
  KernelParams k = *p.base;
  const Eigen::Index d = p.inputs->cols();
  k.length_scales.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    k.length_scales(i) =
        std::clamp(std::exp(theta(i)), p.bounds->length_lo(i), p.bounds->length_hi(i));
  }
  k.signal_var = std::clamp(std::exp(theta(d)), p.bounds->signal_lo, p.bounds->signal_hi);
  k.noise_var = std::clamp(std::exp(theta(d + 1)), p.bounds->noise_lo, p.bounds->noise_hi);
  return k;
}

double negative_lml(const Eigen::VectorXd& theta, const Problem& p) {
  try {
    return -GpModel::fit(*p.inputs, *p.targets, unpack(theta, p), p.centering)
                .log_marginal_likelihood();
  } catch (const Error&) {
    return std::numeric_limits<double>::max();
  }
}

double gsl_objective(const gsl_vector* v, void* data) {
  const auto& p = *static_cast<const Problem*>(data);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(v->size));
  for (std::size_t i = 0; i < v->size; ++i) theta(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
  return negative_lml(theta, p);
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

Eigen::VectorXd nelder_mead(const Eigen::VectorXd& start, Problem& problem, double& best_value) {
  const auto dim = static_cast<std::size_t>(start.size());
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(dim));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    gsl_vector_set(x.get(), i, start(static_cast<Eigen::Index>(i)));
    gsl_vector_set(step.get(), i, 0.5);
  }
  gsl_multimin_function fn{&gsl_objective, dim, &problem};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> nm(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim));
  gsl_multimin_fminimizer_set(nm.get(), &fn, x.get(), step.get());

  for (int iter = 0; iter < 200; ++iter) {
    if (gsl_multimin_fminimizer_iterate(nm.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(nm.get()), 1e-3) == GSL_SUCCESS) break;
  }
  Eigen::VectorXd out(start.size());
  for (std::size_t i = 0; i < dim; ++i) {
    out(static_cast<Eigen::Index>(i)) = gsl_vector_get(nm->x, i);
  }
  best_value = nm->fval;
  return out;
}

}  // namespace

KernelParams optimize_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                                      const KernelParams& start, const HyperBounds& bounds, Rng& rng,
                                      int restarts, Centering centering) {
  static const bool handler_off = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)handler_off;

  Problem problem{&inputs, &targets, &start, &bounds, centering};
  const Eigen::Index d = inputs.cols();

  Eigen::VectorXd theta0(d + 2);
  for (Eigen::Index i = 0; i < d; ++i) {
    theta0(i) = std::log(std::clamp(start.length_scales(i), bounds.length_lo(i), bounds.length_hi(i)));
  }
  theta0(d) = std::log(std::clamp(start.signal_var, bounds.signal_lo, bounds.signal_hi));
  theta0(d + 1) = std::log(std::clamp(start.noise_var, bounds.noise_lo, bounds.noise_hi));

  std::vector<Eigen::VectorXd> starts{theta0};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd t(d + 2);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double lo = std::log(bounds.length_lo(i)), hi = std::log(bounds.length_hi(i));
      t(i) = lo + (hi - lo) * u(rng);
    }
    t(d) = std::log(bounds.signal_lo) + (std::log(bounds.signal_hi) - std::log(bounds.signal_lo)) * u(rng);
    t(d + 1) = std::log(bounds.noise_lo) + (std::log(bounds.noise_hi) - std::log(bounds.noise_lo)) * u(rng);
    starts.push_back(t);
  }

  double best = negative_lml(theta0, problem);
  Eigen::VectorXd best_theta = theta0;
  for (const auto& s : starts) {
    double value = 0.0;
    Eigen::VectorXd theta = nelder_mead(s, problem, value);
    if (value < best) {
      best = value;
      best_theta = theta;
    }
  }
  return unpack(best_theta, problem);
}

}  // namespace slicewb::gp
