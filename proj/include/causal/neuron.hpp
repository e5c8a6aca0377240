#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "causal/plasticity.hpp"

namespace causal {

using Channel = std::uint16_t;

struct SynapseState {
  double resource = 0.0;
  std::optional<Step> last_presyn_spike_step;
  bool depressed_in_current_tss = false;
  // Earliest presynaptic spike after the latest postsynaptic spike of the
  // open TSS; committed only if the TSS is extended.
  std::optional<Step> pending_depression_step;
};

// Closed interval of postsynaptic spike steps forming one tight spike sequence.
struct TssSegment {
  Step first = 0;
  Step last = 0;
  friend bool operator==(const TssSegment&, const TssSegment&) = default;
};

// Offline reference: maximal runs of spikes whose neighbouring gaps are
// <= isi_max. Input must be strictly increasing.
std::vector<TssSegment> tss_segments(std::span<const Step> post_spike_steps,
                                     Step isi_max);

// Online TSS segmentation. A TSS is known to have ended only once isi_max
// silent steps have elapsed after its last spike.
class TssTracker {
 public:
  enum class Phase { Inactive, Active };

  explicit TssTracker(Step isi_max = 1) : isi_max_(isi_max) {}

  // Closes the open TSS if `step` lies beyond its silence horizon.
  std::optional<TssSegment> advance_to(Step step);
  // Registers a postsynaptic spike; returns true when it opens a new TSS.
  // advance_to(step) must have been called first.
  bool on_post_spike(Step step);
  // Closes whatever is open (end of input).
  std::optional<TssSegment> finish();

  Phase phase() const { return phase_; }
  bool active() const { return phase_ == Phase::Active; }
  std::optional<Step> onset_step() const { return onset_; }
  std::optional<Step> last_post_spike_step() const { return last_post_; }
  // Onset of the ongoing or most recently completed TSS.
  std::optional<Step> most_recent_onset() const { return recent_onset_; }
  Step isi_max() const { return isi_max_; }

 private:
  friend class SnapshotCodec;

  Step isi_max_;
  Phase phase_ = Phase::Inactive;
  std::optional<Step> onset_;
  std::optional<Step> last_post_;
  std::optional<Step> recent_onset_;
};

// Dense per-step input: one bit per plastic synapse plus the dopamine line.
struct InputFrame {
  std::vector<bool> spikes;
  bool dopamine = false;
};

struct DetectorState {
  std::vector<SynapseState> synapses;
  double stability = 0.0;
  TssTracker tss;
  Step current_step = 0;

  // Bookkeeping for reports and invariant checks.
  std::uint64_t tss_count = 0;
  std::uint64_t fire_count = 0;
  double abs_weight_change = 0.0;  // running sum of |dw| over all plasticity acts
};

// Single binary neuron with anti-Hebbian and dopamine-gated plasticity.
//
// Per step, in order: presynaptic spikes are recorded; the neuron fires iff
// the summed weights of spiking synapses exceed H; TSS bookkeeping applies
// anti-Hebbian depression (once per synapse per TSS); a dopamine spike
// potentiates every synapse that spiked within [t - T_P, t] and adjusts
// stability; a TSS onset decrements stability by d_s. All magnitudes use
// the stability at the start of the step.
class Detector {
 public:
  // All weights start at zero.
  Detector(std::size_t channels, const PlasticityConfig& cfg);
  Detector(const PlasticityConfig& cfg, DetectorState state);

  bool integrate(std::span<const Channel> active) const;
  bool integrate(const InputFrame& frame) const;

  bool tick(std::span<const Channel> active, bool dopamine);
  bool tick(const InputFrame& frame);

  // Frozen detectors keep firing and tracking TSS but never change resources
  // or stability.
  void set_plasticity_enabled(bool enabled) { plastic_ = enabled; }
  bool plasticity_enabled() const { return plastic_; }

  std::size_t channels() const { return state_.synapses.size(); }
  double weight(std::size_t i) const;
  double resource(std::size_t i) const { return state_.synapses.at(i).resource; }
  double stability() const { return state_.stability; }
  Step current_step() const { return state_.current_step; }
  const DetectorState& state() const { return state_; }
  const PlasticityConfig& config() const { return cfg_; }

  void reset_weight_change_accumulator() { state_.abs_weight_change = 0.0; }

 private:
  void check_frame(std::span<const Channel> active) const;
  void close_tss();
  void depress(std::size_t i, double amount);
  void adjust_resource(std::size_t i, double delta);
  double apply_dopamine(double amount);

  PlasticityConfig cfg_;
  DetectorState state_;
  bool plastic_ = true;
  std::vector<std::uint32_t> pending_;
  std::vector<std::uint32_t> depressed_;
};

}  // namespace causal
