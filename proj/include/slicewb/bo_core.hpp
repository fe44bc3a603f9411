#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>

#include "slicewb/acquisition.hpp"
#include "slicewb/gp.hpp"
#include "slicewb/rng.hpp"

namespace slicewb {

struct BoSettings {
  std::size_t buffer_capacity = 40;
  double priority_decay = 0.95;
  std::size_t subsample = 30;  // experiences drawn per GP refit
  int n_init = 3;              // cold-start design points
  int refit_every = 5;         // hyperparameter search cadence, in refits
  int restarts = 3;
  double nu = 2.5;
  double noise_var = 1e-4;     // initial noise variance (standardized units)
  gp::Centering centering = gp::Centering::Mean;
  double hedge_eta = 1.0;
  double lcb_kappa = 1.96;
};

/// Surrogate plus acquisition portfolio shared by the per-slice agents and
/// the joint-space baseline. Candidates are rows of a feature matrix; the
/// caller may add a known closed-form term (`offsets`) to the modelled
/// objective at each candidate.
class BoCore {
 public:
  struct Proposal {
    std::size_t chosen = 0;
    std::array<std::size_t, kPortfolioSize> nominees{};
    std::size_t arm = 0;
  };

  BoCore(BoSettings settings, std::uint64_t seed, std::string_view stream);

  /// Refits the GP on (inputs, targets). Every `refit_every`-th refit also
  /// re-runs the marginal-likelihood search, using `spans` to bound the
  /// length scales. Settles any pending hedge rewards against the new model.
  void refit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& targets,
             const Eigen::VectorXd& spans);

  bool fitted() const { return model_.has_value(); }
  const gp::GpModel& model() const { return *model_; }
  gp::Prediction predict(const Eigen::VectorXd& query) const;

  /// Maps the modelled value f to the objective: objective = offset + link(f).
  /// An empty link is the identity; a non-empty one must be nonincreasing.
  using Link = std::function<double(double)>;

  /// Every acquisition nominates its best candidate (first index wins ties),
  /// then the hedge picks one nominee. Requires a fitted model. Hedge rewards
  /// are the negated objective at the posterior mean divided by
  /// `reward_scale`; when that is <= 0, the spread (max - min) of the mean
  /// objective over the candidates is used.
  Proposal propose(const Eigen::MatrixXd& candidates, std::span<const double> offsets, double best,
                   const Link& link = {}, double reward_scale = 0.0);

  /// Lowest posterior-mean objective over the candidates; the incumbent for
  /// callers whose context moves between rounds.
  double min_mean_objective(const Eigen::MatrixXd& candidates, std::span<const double> offsets,
                            const Link& link = {}) const;

  const HedgeState& hedge() const { return hedge_; }
  const BoSettings& settings() const { return settings_; }
  Rng& model_rng() { return model_rng_; }
  int refits() const { return refits_; }

 private:
  struct Pending {
    std::array<Eigen::VectorXd, kPortfolioSize> inputs;
    std::array<double, kPortfolioSize> offsets{};
    Link link;
    double reward_scale = 0.0;
  };

  BoSettings settings_;
  Rng model_rng_;
  Rng hedge_rng_;
  HedgeState hedge_;
  std::optional<gp::GpModel> model_;
  std::optional<gp::KernelParams> kernel_;
  std::optional<Pending> pending_;
  int refits_ = 0;
};

/// Acquisition scores of offset + link(f) for f ~ N(mu, sigma^2), with link
/// nonincreasing. LCB is exact through the upper quantile of f, PI through
/// the threshold where the objective crosses `best`, and EI integrates the
/// improvement above that threshold with adaptive quadrature.
double linked_expected_improvement(const BoCore::Link& link, double offset, double mu, double sigma,
                                   double best);
double linked_probability_of_improvement(const BoCore::Link& link, double offset, double mu, double sigma,
                                         double best);
double linked_lower_confidence_bound(const BoCore::Link& link, double offset, double mu, double sigma,
                                     double kappa);

/// k-th point (k >= 1) of the radical-inverse sequence in `base`.
double radical_inverse(std::uint64_t k, unsigned base);

}  // namespace slicewb
