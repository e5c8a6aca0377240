#include "causal/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "causal/errors.hpp"

namespace causal {

void PlasticityConfig::validate() const {
  if (!(w_min < 0.0 && w_max > 0.0)) {
    throw ConfigError("w_min must be negative and w_max positive");
  }
  if (!(d_bar > 0.0) || !std::isfinite(d_bar)) {
    throw ConfigError("d_H_bar must be positive");
  }
  if (!(d_s > 0.0) || !std::isfinite(d_s)) {
    throw ConfigError("d_s must be positive");
  }
  if (t_p < 1) throw ConfigError("T_P must be at least 1 step");
  if (threshold != 1.0) throw ConfigError("threshold H is fixed at 1");
}

double weight_of(double resource, const PlasticityConfig& cfg) {
  const double span = cfg.w_max - cfg.w_min;
  const double w_plus = std::max(resource, 0.0);
  // Rounding can land on w_max for huge W; the bound is open.
  const double below = std::nextafter(cfg.w_max, cfg.w_min);
  if (std::isinf(w_plus)) return below;
  return std::min(cfg.w_min + span * w_plus / (span + w_plus), below);
}

double resource_for_weight(double target_weight, const PlasticityConfig& cfg) {
  if (!(target_weight >= cfg.w_min && target_weight < cfg.w_max)) {
    throw DomainError("target weight " + std::to_string(target_weight) +
                      " outside [w_min, w_max)");
  }
  const double span = cfg.w_max - cfg.w_min;
  const double excess = target_weight - cfg.w_min;
  return span * excess / (cfg.w_max - target_weight);
}

PlasticityRates effective_rates(double stability, const PlasticityConfig& cfg) {
  if (!(stability > 0.0)) return {cfg.d_H_bar(), cfg.d_D_bar()};
  // Integer part through ldexp so each whole unit halves the rates exactly.
  const double whole = std::floor(stability);
  const double scale = std::ldexp(std::exp2(whole - stability), -static_cast<int>(std::min(whole, 4096.0)));
  return {cfg.d_H_bar() * scale, cfg.d_D_bar() * scale};
}

}  // namespace causal
