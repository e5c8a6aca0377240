#include "causal/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "causal/errors.hpp"
#include "causal/kv_config.hpp"
#include "causal/metrics.hpp"
#include "causal/random.hpp"

namespace causal {

EpisodeRecord record_pong(const PongRecordOptions& options) {
  if (options.duration_steps <= 0) throw ConfigError("duration must be positive");
  options.layout.validate();
  options.racket.validate();
  Rng env_rng(derive_seed(options.seed, 1));
  ChaoticPolicy policy(derive_seed(options.seed, 2), options.racket.policy_period);
  SpikeClock clock(options.clock, derive_seed(options.seed, 3));

  EpisodeRecord record(RecordHeader{1, 1, static_cast<std::uint32_t>(kPongChannels), options.seed});
  WorldState world = initial_world(env_rng);
  for (Step t = 0; t < options.duration_steps; ++t) {
    const auto result = env_step(world, policy.action(t), env_rng, options.racket);
    world = result.state;
    record.append_frame(encode(world, options.layout, clock));
    if (result.event) record.add_event(*result.event);
  }
  return record;
}

void SyntheticConfig::validate() const {
  if (channels == 0 || channels > 65536) throw ConfigError("synthetic: bad channel count");
  if (causes.empty()) throw ConfigError("synthetic: cause set is empty");
  auto sorted = causes;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("synthetic: duplicate cause channel");
  }
  if (sorted.back() >= channels) throw ConfigError("synthetic: cause channel out of range");
  if (lag < 1) throw ConfigError("synthetic: lag must be >= 1");
  if (!(cause_rate_hz > 0.0)) throw ConfigError("synthetic: cause rate must be positive");
  if (min_cause_gap <= lag) throw ConfigError("synthetic: min_cause_gap must exceed the lag");
  if (1000.0 / cause_rate_hz < static_cast<double>(min_cause_gap)) {
    throw ConfigError("synthetic: mean cause interval is shorter than min_cause_gap");
  }
  if (!(noise_rate_hz >= 0.0 && noise_rate_hz <= 1000.0)) {
    throw ConfigError("synthetic: noise rate must be in [0, 1000] Hz");
  }
  if (duration_steps <= 0) throw ConfigError("synthetic: duration must be positive");
}

EpisodeRecord make_synthetic(const SyntheticConfig& config) {
  config.validate();
  Rng cause_rng(derive_seed(config.seed, 11));
  Rng noise_rng(derive_seed(config.seed, 12));

  auto causes = config.causes;
  std::sort(causes.begin(), causes.end());
  std::vector<bool> is_cause(config.channels, false);
  for (const Channel c : causes) is_cause[c] = true;

  const double extra_gap = 1000.0 / config.cause_rate_hz - static_cast<double>(config.min_cause_gap);
  const auto next_gap = [&] {
    const double u = uniform01(cause_rng);
    return config.min_cause_gap + static_cast<Step>(std::floor(-std::log1p(-u) * extra_gap));
  };

  EpisodeRecord record(
      RecordHeader{1, 1, static_cast<std::uint32_t>(config.channels), config.seed});
  const double p_noise = config.noise_rate_hz / 1000.0;
  Step next_cause = next_gap();
  std::vector<Step> pending_rewards;
  std::vector<Channel> frame;
  for (Step t = 0; t < config.duration_steps; ++t) {
    const bool cause_now = t == next_cause;
    if (cause_now) {
      pending_rewards.push_back(t + config.lag);
      next_cause = t + next_gap();
    }
    frame.clear();
    for (std::size_t c = 0; c < config.channels; ++c) {
      if (is_cause[c]) {
        if (cause_now) frame.push_back(static_cast<Channel>(c));
      } else if (uniform01(noise_rng) < p_noise) {
        frame.push_back(static_cast<Channel>(c));
      }
    }
    record.append_frame(frame);
    if (!pending_rewards.empty() && pending_rewards.front() == t) {
      record.add_event({EventKind::Reward, t});
      pending_rewards.erase(pending_rewards.begin());
    }
  }
  return record;
}

std::vector<Step> synthetic_cause_steps(const EpisodeRecord& record, const SyntheticConfig& config) {
  std::vector<Step> out;
  for (Step t = 0; t < record.duration(); ++t) {
    const auto frame = record.frame(t);
    const bool all = std::all_of(config.causes.begin(), config.causes.end(), [&](Channel c) {
      return std::binary_search(frame.begin(), frame.end(), c);
    });
    if (all) out.push_back(t);
  }
  return out;
}

RunReport replay(Detector& detector, const EpisodeRecord& record, Step from, Step to,
                 const ReplayOptions& options) {
  if (detector.channels() != record.channels()) {
    throw ConfigError("detector has " + std::to_string(detector.channels()) +
                      " synapses but the record has " + std::to_string(record.channels()) +
                      " channels");
  }
  if (from < 0 || to > record.duration() || from > to) throw ConfigError("replay range out of bounds");
  if (options.series_window <= 0) throw ConfigError("series window must be positive");

  RunReport report;
  const auto& events = record.events();
  auto ev = std::lower_bound(events.begin(), events.end(), from,
                             [](const EnvEvent& e, Step t) { return e.step < t; });
  std::uint64_t window_fires = 0;
  double window_dw_start = detector.state().abs_weight_change;
  Step window_start = from;

  const auto flush = [&](Step end) {
    const double seconds = static_cast<double>(end - window_start) / kStepsPerSecond;
    SeriesPoint p;
    p.start_s = static_cast<double>(window_start) / kStepsPerSecond;
    p.firing_hz = seconds > 0 ? static_cast<double>(window_fires) / seconds : 0.0;
    p.stability = detector.stability();
    p.sum_abs_dw = detector.state().abs_weight_change - window_dw_start;
    report.series.push_back(p);
    window_fires = 0;
    window_dw_start = detector.state().abs_weight_change;
    window_start = end;
  };

  for (Step t = from; t < to; ++t) {
    if (options.freeze_from && t == std::max(*options.freeze_from, from)) {
      detector.set_plasticity_enabled(false);
    }
    while (ev != events.end() && ev->step < t) ++ev;
    const bool reward = ev != events.end() && ev->step == t && ev->kind == EventKind::Reward;
    if (reward) ++report.reward_count;
    if (detector.tick(record.frame(t), reward)) {
      report.fire_steps.push_back(t);
      ++window_fires;
    }
    if (t + 1 - window_start == options.series_window) flush(t + 1);
  }
  if (window_start < to) flush(to);
  return report;
}

void score_window(RunReport& report, const EpisodeRecord& record, Step t_p, Step start, Step end) {
  report.eval_start = start;
  report.eval_end = end;
  const auto rewards = record.reward_steps();
  try {
    report.r = windowed_r(report.fire_steps, rewards, t_p, start, end);
  } catch (const UndefinedMetricError&) {
    report.r.reset();
  }
}

double evaluate_frozen(const Detector& detector, const EpisodeRecord& record, Step start, Step end) {
  if (detector.channels() != record.channels()) {
    throw ConfigError("snapshot has " + std::to_string(detector.channels()) +
                      " synapses but the record has " + std::to_string(record.channels()) +
                      " channels");
  }
  if (start < 0 || end > record.duration() || start >= end) {
    throw ConfigError("evaluation window out of bounds");
  }
  std::vector<Step> fires;
  for (Step t = start; t < end; ++t) {
    if (detector.integrate(record.frame(t))) fires.push_back(t);
  }
  const auto rewards = record.reward_steps();
  return windowed_r(fires, rewards, detector.config().t_p, start, end);
}

void write_series_csv(std::ostream& out, const RunReport& report) {
  out << "start_s,firing_hz,stability,sum_abs_dw\n";
  for (const auto& p : report.series) {
    out << format_double(p.start_s) << ',' << format_double(p.firing_hz) << ','
        << format_double(p.stability) << ',' << format_double(p.sum_abs_dw) << '\n';
  }
}

void write_resources_csv(std::ostream& out, const Detector& detector) {
  out << "section,index,channel,resource,weight\n";
  const bool pong = detector.channels() == kPongChannels;
  for (std::size_t c = 0; c < detector.channels(); ++c) {
    const auto [section, index] =
        pong ? describe_channel(c) : std::pair<std::string, std::size_t>{"channel", c};
    out << section << ',' << index << ',' << c << ',' << format_double(detector.resource(c)) << ','
        << format_double(detector.weight(c)) << '\n';
  }
}

}  // namespace causal
