#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slicewb/rng.hpp"

namespace slicewb {

double normal_pdf(double x);
double normal_cdf(double x);

// Acquisition functions for minimization; `best` is the incumbent value.
double expected_improvement(double mu, double sigma, double best);
double probability_of_improvement(double mu, double sigma, double best);
double lower_confidence_bound(double mu, double sigma, double kappa);

enum class Acquisition { EI = 0, PI = 1, LCB = 2 };
inline constexpr std::size_t kPortfolioSize = 3;

/// Exponential-weights portfolio over acquisition functions (gp_hedge).
struct HedgeState {
  std::vector<double> gains;
  double eta = 1.0;

  HedgeState() = default;
  HedgeState(std::size_t arms, double eta_) : gains(arms, 0.0), eta(eta_) {}

  /// softmax(eta * gains), shifted by the max gain before exponentiation.
  std::vector<double> probabilities() const;
};

/// Draws an arm with probability softmax(eta * gains).
std::size_t hedge_select(const HedgeState& state, Rng& rng);

/// Full-information update: every arm's gain grows by its reward.
HedgeState hedge_update(HedgeState state, std::span<const double> rewards);

}  // namespace slicewb
