#pragma once

#include <span>
#include <vector>

#include "causal/plasticity.hpp"

namespace causal {

struct Interval {
  Step start;
  Step end;  // exclusive
  Step length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Sorted, disjoint, non-adjacent half-open step intervals.
class IntervalSet {
 public:
  IntervalSet() = default;
  // Normalizes: drops empty intervals, merges overlapping and adjacent ones.
  explicit IntervalSet(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  Step measure() const;
  bool contains(Step t) const;

  IntervalSet clipped(Step lo, Step hi) const;
  Step intersection_measure(const IntervalSet& other) const;
  Step symmetric_difference_measure(const IntervalSet& other) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

// Union of [T_i - T_P, T_i), clipped at step 0.
IntervalSet target_periods(std::span<const Step> reward_steps, Step t_p);

// Union of [T*, min(T* + T_P, first reward >= T*)) over firings T*.
IntervalSet prediction_periods(std::span<const Step> fire_steps,
                               std::span<const Step> reward_steps, Step t_p);

// R = 1 - |targets xor predictions| / |targets|. Throws UndefinedMetricError
// when the targets are empty.
double r_metric(const IntervalSet& targets, const IntervalSet& predictions);

// R restricted to [window_start, window_end): rewards and firings outside the
// window are dropped and both period sets are clipped to it.
double windowed_r(std::span<const Step> fire_steps, std::span<const Step> reward_steps,
                  Step t_p, Step window_start, Step window_end);

}  // namespace causal
