#include "slicewb/bo_core.hpp"

#include <algorithm>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicewb {

BoCore::BoCore(BoSettings settings, std::uint64_t seed, std::string_view stream)
    : settings_(settings),
      model_rng_(make_stream(seed, std::string(stream) + "/model")),
      hedge_rng_(make_stream(seed, std::string(stream) + "/hedge")),
      hedge_(kPortfolioSize, settings.hedge_eta) {}

void BoCore::refit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
                   const Eigen::VectorXd& spans) {
  if (!kernel_ || kernel_->length_scales.size() != inputs.cols()) {
    gp::KernelParams k;
    k.length_scales = 0.5 * spans;
    for (auto& l : k.length_scales) {
      if (l <= 1e-12) l = 1.0;
    }
    k.signal_var = 1.0;
    k.nu = settings_.nu;
    k.noise_var = settings_.noise_var;
    kernel_ = k;
  }
  if (inputs.rows() >= 3 && settings_.refit_every > 0 && refits_ % settings_.refit_every == 0) {
    kernel_ = gp::optimize_hyperparameters(inputs, targets, *kernel_, gp::bounds_from_spans(spans),
                                           model_rng_, settings_.restarts, settings_.centering);
  }
  ++refits_;
  model_ = gp::GpModel::fit(inputs, targets, *kernel_, settings_.centering);

  if (pending_) {
    std::array<double, kPortfolioSize> rewards{};
    for (std::size_t k = 0; k < kPortfolioSize; ++k) {
      // Dividing by the candidates' spread of mean objectives keeps the bandit
      // temperature independent of the objective's units.
      const double mu = model_->predict(pending_->inputs[k]).mu;
      const double objective = pending_->offsets[k] + (pending_->link ? pending_->link(mu) : mu);
      rewards[k] = -objective / pending_->reward_scale;
    }
    hedge_ = hedge_update(std::move(hedge_), rewards);
    pending_.reset();
  }
}

gp::Prediction BoCore::predict(const Eigen::VectorXd& query) const {
  if (!model_) throw std::logic_error("BoCore::predict before refit");
  return model_->predict(query);
}

double BoCore::min_mean_objective(const Eigen::MatrixXd& candidates, std::span<const double> offsets,
                                  const Link& link) const {
  if (!model_) throw std::logic_error("BoCore::min_mean_objective before refit");
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    const double mu = model_->predict(candidates.row(i)).mu;
    lowest = std::min(lowest, offsets[static_cast<std::size_t>(i)] + (link ? link(mu) : mu));
  }
  return lowest;
}

BoCore::Proposal BoCore::propose(const Eigen::MatrixXd& candidates, std::span<const double> offsets,
                                 double best, const Link& link, double reward_scale) {
  if (!model_) throw std::logic_error("BoCore::propose before refit");
  if (candidates.rows() == 0 || offsets.size() != static_cast<std::size_t>(candidates.rows())) {
    throw std::invalid_argument("propose needs one offset per candidate");
  }

  Proposal p;
  std::array<double, kPortfolioSize> top{};
  double lo_mean = std::numeric_limits<double>::infinity(), hi_mean = -lo_mean;
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    const auto pred = model_->predict(candidates.row(i));
    const double offset = offsets[static_cast<std::size_t>(i)];
    const double mean_objective = offset + (link ? link(pred.mu) : pred.mu);
    lo_mean = std::min(lo_mean, mean_objective);
    hi_mean = std::max(hi_mean, mean_objective);
    std::array<double, kPortfolioSize> score{};
    if (link) {
      score = {linked_expected_improvement(link, offset, pred.mu, pred.sigma, best),
               linked_probability_of_improvement(link, offset, pred.mu, pred.sigma, best),
               -linked_lower_confidence_bound(link, offset, pred.mu, pred.sigma, settings_.lcb_kappa)};
    } else {
      const double mu = pred.mu + offset;
      score = {expected_improvement(mu, pred.sigma, best), probability_of_improvement(mu, pred.sigma, best),
               -lower_confidence_bound(mu, pred.sigma, settings_.lcb_kappa)};
    }
    for (std::size_t k = 0; k < kPortfolioSize; ++k) {
      if (i == 0 || score[k] > top[k]) {
        top[k] = score[k];
        p.nominees[k] = static_cast<std::size_t>(i);
      }
    }
  }

  p.arm = hedge_select(hedge_, hedge_rng_);
  p.chosen = p.nominees[p.arm];

  Pending pending;
  for (std::size_t k = 0; k < kPortfolioSize; ++k) {
    pending.inputs[k] = candidates.row(static_cast<Eigen::Index>(p.nominees[k]));
    pending.offsets[k] = offsets[p.nominees[k]];
  }
  pending.link = link;
  pending.reward_scale = reward_scale > 0.0 ? reward_scale : std::max(hi_mean - lo_mean, 1e-12);
  pending_ = std::move(pending);
  return p;
}

namespace {

constexpr double kTail = 12.0;  // standard deviations covered by the integrals

// Standardized threshold above which offset + link(mu + sigma u) < best. The
// objective is nonincreasing in f, so improvement holds on one half-line.
// Returns -kTail when every point improves and +kTail when none does.
double improvement_threshold(const BoCore::Link& link, double offset, double mu, double sigma, double best) {
  auto improves = [&](double u) { return offset + link(mu + sigma * u) < best; };
  double lo = -kTail, hi = kTail;
  if (improves(lo)) return lo;
  if (!improves(hi)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (improves(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct Integrand {
  const BoCore::Link* link;
  double offset, mu, sigma, best;
};

double ei_integrand(double u, void* data) {
  const auto& p = *static_cast<const Integrand*>(data);
  return std::max(0.0, p.best - p.offset - (*p.link)(p.mu + p.sigma * u)) * normal_pdf(u);
}

struct CquadDeleter {
  void operator()(gsl_integration_cquad_workspace* w) const { gsl_integration_cquad_workspace_free(w); }
};

}  // namespace

double linked_expected_improvement(const BoCore::Link& link, double offset, double mu, double sigma,
                                   double best) {
  if (sigma <= 0.0) return std::max(0.0, best - offset - link(mu));
  const double from = improvement_threshold(link, offset, mu, sigma, best);
  if (from >= kTail) return 0.0;
  // Doubly adaptive quadrature copes with the jump of the penalty at zero margin.
  thread_local std::unique_ptr<gsl_integration_cquad_workspace, CquadDeleter> workspace(
      gsl_integration_cquad_workspace_alloc(100));
  Integrand params{&link, offset, mu, sigma, best};
  gsl_function fn{&ei_integrand, &params};
  double result = 0.0, abserr = 0.0;
  std::size_t evals = 0;
  gsl_integration_cquad(&fn, from, kTail, 1e-12, 1e-9, workspace.get(), &result, &abserr, &evals);
  return std::max(0.0, result);
}

double linked_probability_of_improvement(const BoCore::Link& link, double offset, double mu, double sigma,
                                         double best) {
  if (sigma <= 0.0) return offset + link(mu) < best ? 1.0 : 0.0;
  const double from = improvement_threshold(link, offset, mu, sigma, best);
  if (from <= -kTail) return 1.0;
  if (from >= kTail) return 0.0;
  return normal_cdf(-from);
}

double linked_lower_confidence_bound(const BoCore::Link& link, double offset, double mu, double sigma,
                                     double kappa) {
  return offset + link(mu + kappa * sigma);
}

double radical_inverse(std::uint64_t k, unsigned base) {
  double inv = 1.0 / base, f = inv, out = 0.0;
  while (k > 0) {
    out += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return out;
}

}  // namespace slicewb
