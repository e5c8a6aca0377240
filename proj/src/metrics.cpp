#include "causal/metrics.hpp"

#include <algorithm>

#include "causal/errors.hpp"

namespace causal {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return iv.end <= iv.start; });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (const Interval& iv : intervals) {
    if (!intervals_.empty() && iv.start <= intervals_.back().end) {
      intervals_.back().end = std::max(intervals_.back().end, iv.end);
    } else {
      intervals_.push_back(iv);
    }
  }
}

Step IntervalSet::measure() const {
  Step total = 0;
  for (const Interval& iv : intervals_) total += iv.length();
  return total;
}

bool IntervalSet::contains(Step t) const {
  const auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                                   [](Step v, const Interval& iv) { return v < iv.start; });
  return it != intervals_.begin() && t < std::prev(it)->end;
}

IntervalSet IntervalSet::clipped(Step lo, Step hi) const {
  std::vector<Interval> out;
  for (const Interval& iv : intervals_) {
    out.push_back({std::max(iv.start, lo), std::min(iv.end, hi)});
  }
  return IntervalSet(std::move(out));
}

Step IntervalSet::intersection_measure(const IntervalSet& other) const {
  Step total = 0;
  auto a = intervals_.begin();
  auto b = other.intervals_.begin();
  while (a != intervals_.end() && b != other.intervals_.end()) {
    const Step lo = std::max(a->start, b->start);
    const Step hi = std::min(a->end, b->end);
    if (lo < hi) total += hi - lo;
    if (a->end < b->end) ++a; else ++b;
  }
  return total;
}

Step IntervalSet::symmetric_difference_measure(const IntervalSet& other) const {
  return measure() + other.measure() - 2 * intersection_measure(other);
}

IntervalSet target_periods(std::span<const Step> reward_steps, Step t_p) {
  std::vector<Interval> out;
  out.reserve(reward_steps.size());
  for (const Step r : reward_steps) out.push_back({std::max<Step>(r - t_p, 0), r});
  return IntervalSet(std::move(out));
}

IntervalSet prediction_periods(std::span<const Step> fire_steps,
                               std::span<const Step> reward_steps, Step t_p) {
  std::vector<Interval> out;
  out.reserve(fire_steps.size());
  auto next = reward_steps.begin();
  for (const Step f : fire_steps) {
    next = std::lower_bound(next, reward_steps.end(), f);
    Step end = f + t_p;
    if (next != reward_steps.end()) end = std::min(end, *next);
    out.push_back({f, end});
  }
  return IntervalSet(std::move(out));
}

double r_metric(const IntervalSet& targets, const IntervalSet& predictions) {
  const Step t_tar = targets.measure();
  if (t_tar == 0) throw UndefinedMetricError("R is undefined without target periods");
  const Step t_err = targets.symmetric_difference_measure(predictions);
  return 1.0 - static_cast<double>(t_err) / static_cast<double>(t_tar);
}

double windowed_r(std::span<const Step> fire_steps, std::span<const Step> reward_steps,
                  Step t_p, Step window_start, Step window_end) {
  const auto in_window = [&](std::span<const Step> steps) {
    const auto lo = std::lower_bound(steps.begin(), steps.end(), window_start);
    const auto hi = std::lower_bound(lo, steps.end(), window_end);
    return std::span<const Step>(lo, hi);
  };
  const auto fires = in_window(fire_steps);
  const auto rewards = in_window(reward_steps);
  const auto targets = target_periods(rewards, t_p).clipped(window_start, window_end);
  const auto predictions =
      prediction_periods(fires, rewards, t_p).clipped(window_start, window_end);
  return r_metric(targets, predictions);
}

}  // namespace causal
