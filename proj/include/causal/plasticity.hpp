#pragma once

#include <cstdint>

namespace causal {

using Step = std::int64_t;

// Constants of the synaptic-resource model. Anti-Hebbian and dopamine
// magnitudes share one stored value; both names are exposed.
struct PlasticityConfig {
  double d_bar = 0.056;   // max resource change per plasticity act
  double w_min = -0.017;  // weight at W <= 0
  double w_max = 0.48;    // supremum of the weight
  double d_s = 0.23;      // stability change unit
  Step t_p = 100;         // target window and ISI_max, in steps
  double threshold = 1.0;

  double d_H_bar() const { return d_bar; }
  double d_D_bar() const { return d_bar; }
  Step isi_max() const { return t_p; }

  // Throws ConfigError when an invariant does not hold.
  void validate() const;
};

struct PlasticityRates {
  double d_H;
  double d_D;
};

// w = w_min + (w_max - w_min) * W+ / (w_max - w_min + W+), W+ = max(W, 0).
double weight_of(double resource, const PlasticityConfig& cfg);

// Inverse of weight_of on [w_min, w_max). Throws DomainError otherwise.
double resource_for_weight(double target_weight, const PlasticityConfig& cfg);

// d = d_bar * min(2^-s, 1).
PlasticityRates effective_rates(double stability, const PlasticityConfig& cfg);

}  // namespace causal
