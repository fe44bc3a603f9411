#pragma once

#include <cstddef>
#include <deque>
#include <random>
#include <stdexcept>
#include <vector>

#include "slicewb/rng.hpp"

namespace slicewb {

/// Fixed-size prioritized replay buffer. A new entry enters with the maximal
/// priority; every push first ages the retained entries by `decay`, so an
/// entry pushed k pushes ago carries decay^k * max_priority. When full, the
/// oldest entry is evicted.
template <class T>
class ReplayBuffer {
 public:
  struct Entry {
    T value;
    long stamp = 0;  // insertion order
    double priority = 1.0;
  };

  explicit ReplayBuffer(std::size_t capacity, double decay = 0.95, double max_priority = 1.0)
      : capacity_(capacity), decay_(decay), max_priority_(max_priority) {
    if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be >= 1");
    if (!(decay_ > 0.0 && decay_ <= 1.0)) throw std::invalid_argument("decay must be in (0, 1]");
  }

  void push(T value) {
    for (auto& e : entries_) e.priority *= decay_;
    entries_.push_back({std::move(value), next_stamp_++, max_priority_});
    if (entries_.size() > capacity_) entries_.pop_front();
  }

  /// Removes every entry matching `pred`; returns how many were removed.
  template <class Pred>
  std::size_t erase_if(Pred pred) {
    return std::erase_if(entries_, [&](const Entry& e) { return pred(e.value); });
  }

  /// min(n, size) distinct entries drawn without replacement, each draw with
  /// probability proportional to priority among the remaining entries.
  /// Returned in buffer order (oldest first).
  std::vector<const Entry*> sample(std::size_t n, Rng& rng) const {
    std::vector<const Entry*> out;
    if (n >= entries_.size()) {
      for (const auto& e : entries_) out.push_back(&e);
      return out;
    }
    std::vector<double> weights;
    weights.reserve(entries_.size());
    for (const auto& e : entries_) weights.push_back(e.priority);
    std::vector<bool> taken(entries_.size(), false);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      double total = 0.0;
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!taken[i]) total += weights[i];
      }
      double r = u(rng) * total;
      std::size_t pick = weights.size();
      for (std::size_t i = 0; i < weights.size(); ++i) {
        if (taken[i]) continue;
        pick = i;
        r -= weights[i];
        if (r < 0.0) break;
      }
      taken[pick] = true;
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (taken[i]) out.push_back(&entries_[i]);
    }
    return out;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<Entry>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  double decay_;
  double max_priority_;
  long next_stamp_ = 0;
  std::deque<Entry> entries_;
};

}  // namespace slicewb
