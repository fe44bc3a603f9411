#include "slicewb/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slicewb {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double expected_improvement(double mu, double sigma, double best) {
  const double gap = best - mu;
  if (sigma <= 0.0) return std::max(gap, 0.0);
  const double d = gap / sigma;
  return std::max(0.0, gap * normal_cdf(d) + sigma * normal_pdf(d));
}

double probability_of_improvement(double mu, double sigma, double best) {
  if (sigma <= 0.0) return mu < best ? 1.0 : 0.0;
  return normal_cdf((best - mu) / sigma);
}

double lower_confidence_bound(double mu, double sigma, double kappa) { return mu - kappa * sigma; }

std::vector<double> HedgeState::probabilities() const {
  std::vector<double> p(gains.size());
  if (gains.empty()) return p;
  const double top = *std::max_element(gains.begin(), gains.end());
  double total = 0.0;
  for (std::size_t k = 0; k < gains.size(); ++k) {
    p[k] = std::exp(eta * (gains[k] - top));
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

std::size_t hedge_select(const HedgeState& state, Rng& rng) {
  if (state.gains.empty()) throw std::invalid_argument("hedge needs at least one arm");
  const auto p = state.probabilities();
  double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    r -= p[k];
    if (r < 0.0) return k;
  }
  return p.size() - 1;
}

HedgeState hedge_update(HedgeState state, std::span<const double> rewards) {
  if (rewards.size() != state.gains.size()) {
    throw std::invalid_argument("hedge_update needs one reward per arm");
  }
  for (std::size_t k = 0; k < rewards.size(); ++k) state.gains[k] += rewards[k];
  return state;
}

}  // namespace slicewb
