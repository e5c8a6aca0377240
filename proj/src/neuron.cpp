#include "causal/neuron.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "causal/errors.hpp"

namespace causal {

std::vector<TssSegment> tss_segments(std::span<const Step> post_spike_steps,
                                     Step isi_max) {
  std::vector<TssSegment> out;
  for (const Step t : post_spike_steps) {
    if (!out.empty() && t - out.back().last <= isi_max) {
      out.back().last = t;
    } else {
      out.push_back({t, t});
    }
  }
  return out;
}

std::optional<TssSegment> TssTracker::advance_to(Step step) {
  if (phase_ == Phase::Active && step - *last_post_ > isi_max_) {
    return finish();
  }
  return std::nullopt;
}

bool TssTracker::on_post_spike(Step step) {
  last_post_ = step;
  if (phase_ == Phase::Active) return false;
  phase_ = Phase::Active;
  onset_ = step;
  recent_onset_ = step;
  return true;
}

std::optional<TssSegment> TssTracker::finish() {
  if (phase_ != Phase::Active) return std::nullopt;
  phase_ = Phase::Inactive;
  TssSegment seg{*onset_, *last_post_};
  onset_.reset();
  return seg;
}

namespace {

std::vector<Channel> to_sparse(const InputFrame& frame) {
  std::vector<Channel> active;
  for (std::size_t i = 0; i < frame.spikes.size(); ++i) {
    if (frame.spikes[i]) active.push_back(static_cast<Channel>(i));
  }
  return active;
}

}  // namespace

Detector::Detector(std::size_t channels, const PlasticityConfig& cfg)
    : cfg_(cfg) {
  cfg_.validate();
  const double w0 = resource_for_weight(0.0, cfg_);
  state_.synapses.assign(channels, SynapseState{w0, std::nullopt, false, std::nullopt});
  state_.tss = TssTracker(cfg_.isi_max());
}

Detector::Detector(const PlasticityConfig& cfg, DetectorState state)
    : cfg_(cfg), state_(std::move(state)) {
  cfg_.validate();
  if (state_.tss.isi_max() != cfg_.isi_max()) {
    throw ConfigError("snapshot ISI_max does not match T_P");
  }
  for (std::size_t i = 0; i < state_.synapses.size(); ++i) {
    const auto& syn = state_.synapses[i];
    if (syn.pending_depression_step) pending_.push_back(static_cast<std::uint32_t>(i));
    if (syn.depressed_in_current_tss) depressed_.push_back(static_cast<std::uint32_t>(i));
  }
}

double Detector::weight(std::size_t i) const {
  return weight_of(state_.synapses.at(i).resource, cfg_);
}

void Detector::check_frame(std::span<const Channel> active) const {
  const std::size_t n = state_.synapses.size();
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k] >= n) {
      throw StructuralError("spike on channel " + std::to_string(active[k]) +
                            " but detector has " + std::to_string(n) + " synapses");
    }
    if (k > 0 && active[k] <= active[k - 1]) {
      throw StructuralError("active channels must be strictly increasing");
    }
  }
}

bool Detector::integrate(std::span<const Channel> active) const {
  check_frame(active);
  double sum = 0.0;
  for (const Channel c : active) sum += weight_of(state_.synapses[c].resource, cfg_);
  return sum > cfg_.threshold;
}

bool Detector::integrate(const InputFrame& frame) const {
  if (frame.spikes.size() != state_.synapses.size()) {
    throw StructuralError("frame has " + std::to_string(frame.spikes.size()) +
                          " channels, detector has " +
                          std::to_string(state_.synapses.size()));
  }
  const auto active = to_sparse(frame);
  return integrate(std::span<const Channel>(active));
}

bool Detector::tick(const InputFrame& frame) {
  if (frame.spikes.size() != state_.synapses.size()) {
    throw StructuralError("frame has " + std::to_string(frame.spikes.size()) +
                          " channels, detector has " +
                          std::to_string(state_.synapses.size()));
  }
  const auto active = to_sparse(frame);
  return tick(std::span<const Channel>(active), frame.dopamine);
}

void Detector::adjust_resource(std::size_t i, double delta) {
  auto& syn = state_.synapses[i];
  const double before = weight_of(syn.resource, cfg_);
  syn.resource += delta;
  state_.abs_weight_change += std::abs(weight_of(syn.resource, cfg_) - before);
}

void Detector::depress(std::size_t i, double amount) {
  auto& syn = state_.synapses[i];
  syn.pending_depression_step.reset();
  if (syn.depressed_in_current_tss) return;
  syn.depressed_in_current_tss = true;
  depressed_.push_back(static_cast<std::uint32_t>(i));
  if (amount != 0.0) adjust_resource(i, -amount);
}

void Detector::close_tss() {
  for (const auto i : depressed_) state_.synapses[i].depressed_in_current_tss = false;
  for (const auto i : pending_) state_.synapses[i].pending_depression_step.reset();
  depressed_.clear();
  pending_.clear();
}

double Detector::apply_dopamine(double amount) {
  const Step t = state_.current_step;
  if (amount != 0.0) {
    for (std::size_t i = 0; i < state_.synapses.size(); ++i) {
      const auto& last = state_.synapses[i].last_presyn_spike_step;
      if (last && *last >= t - cfg_.t_p) adjust_resource(i, amount);
    }
  }
  const auto onset = state_.tss.most_recent_onset();
  if (!onset) return -cfg_.d_s;
  const double isi = static_cast<double>(cfg_.isi_max());
  const double t_tss = static_cast<double>(t - *onset);
  return cfg_.d_s * std::max(2.0 - std::abs(t_tss - isi) / isi, -1.0);
}

bool Detector::tick(std::span<const Channel> active, bool dopamine) {
  const Step t = state_.current_step;
  const bool fired = integrate(active);

  for (const Channel c : active) state_.synapses[c].last_presyn_spike_step = t;

  const PlasticityRates rates =
      plastic_ ? effective_rates(state_.stability, cfg_) : PlasticityRates{0.0, 0.0};
  double stability_delta = 0.0;

  if (state_.tss.advance_to(t)) close_tss();
  if (fired) {
    ++state_.fire_count;
    if (state_.tss.on_post_spike(t)) {
      ++state_.tss_count;
      stability_delta -= cfg_.d_s;
    } else {
      for (const auto i : pending_) depress(i, rates.d_H);
      pending_.clear();
    }
    for (const Channel c : active) depress(c, rates.d_H);
  } else if (state_.tss.active()) {
    for (const Channel c : active) {
      auto& syn = state_.synapses[c];
      if (!syn.depressed_in_current_tss && !syn.pending_depression_step) {
        syn.pending_depression_step = t;
        pending_.push_back(c);
      }
    }
  }

  if (dopamine) stability_delta += apply_dopamine(rates.d_D);

  if (plastic_) state_.stability += stability_delta;
  ++state_.current_step;
  return fired;
}

}  // namespace causal
