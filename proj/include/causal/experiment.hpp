#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "causal/encoder.hpp"
#include "causal/neuron.hpp"
#include "causal/record.hpp"

namespace causal {

inline constexpr Step kStepsPerSecond = 1000;

struct PongRecordOptions {
  Step duration_steps = 2000 * kStepsPerSecond;
  std::uint64_t seed = 1;
  EncoderLayout layout = EncoderLayout::calibrated_default();
  ClockMode clock = ClockMode::Shared;
  RacketDynamics racket;
};

// Chaotic-racket pong run encoded into 133-channel spike frames.
EpisodeRecord record_pong(const PongRecordOptions& options);

// Ground-truth causal stream: the cause channels fire together at rare random
// steps and a reward follows exactly `lag` steps later; every other channel
// spikes independently at `noise_rate_hz`.
struct SyntheticConfig {
  std::size_t channels = 20;
  std::vector<Channel> causes{0, 1, 2};
  Step lag = 100;
  double cause_rate_hz = 0.5;     // mean rate of cause activations
  Step min_cause_gap = 1000;      // keeps target events rare
  double noise_rate_hz = 2.0;     // per non-cause channel
  Step duration_steps = 300 * kStepsPerSecond;
  std::uint64_t seed = 1;

  void validate() const;
};

EpisodeRecord make_synthetic(const SyntheticConfig& config);
// Steps at which the cause channels fired together.
std::vector<Step> synthetic_cause_steps(const EpisodeRecord& record, const SyntheticConfig& config);

struct ReplayOptions {
  Step series_window = 10 * kStepsPerSecond;
  // Plasticity is disabled from this step on (inclusive).
  std::optional<Step> freeze_from;
};

struct SeriesPoint {
  double start_s = 0.0;
  double firing_hz = 0.0;
  double stability = 0.0;  // at the end of the window
  double sum_abs_dw = 0.0;
};

struct RunReport {
  std::vector<Step> fire_steps;  // record steps at which the detector fired
  std::vector<SeriesPoint> series;
  std::uint64_t reward_count = 0;
  std::optional<double> r;       // over the evaluation window, when defined
  Step eval_start = 0;
  Step eval_end = 0;
};

// Replays record steps [from, to) through the detector.
RunReport replay(Detector& detector, const EpisodeRecord& record, Step from, Step to,
                 const ReplayOptions& options = {});

// Fills report.r for [start, end) using the record's rewards.
void score_window(RunReport& report, const EpisodeRecord& record, Step t_p, Step start, Step end);

// Frozen-plasticity evaluation of a trained detector over record steps
// [start, end); the detector itself is left untouched.
double evaluate_frozen(const Detector& detector, const EpisodeRecord& record, Step start, Step end);

void write_series_csv(std::ostream& out, const RunReport& report);
// One row per synapse, grouped by encoder section for 133-channel detectors.
void write_resources_csv(std::ostream& out, const Detector& detector);

}  // namespace causal
