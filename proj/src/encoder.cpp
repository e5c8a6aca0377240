#include "causal/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "causal/errors.hpp"
#include "causal/kv_config.hpp"

namespace causal {
namespace {

constexpr const char* kLayoutFormat = "causal-encoder-layout";
constexpr std::int64_t kLayoutVersion = 1;

#include "encoder_defaults.inc"

std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string sections_string() {
  std::string out;
  for (const auto& s : kSections) {
    if (!out.empty()) out += ", ";
    out += std::string(s.name) + ":" + std::to_string(s.offset) + ":" + std::to_string(s.width);
  }
  return out;
}

}  // namespace

EncoderLayout EncoderLayout::calibrated_default() {
  EncoderLayout layout;
  layout.vx_bounds = kDefaultVxBounds;
  layout.vy_bounds = kDefaultVyBounds;
  return layout;
}

void EncoderLayout::validate() const {
  for (const auto* bounds : {&vx_bounds, &vy_bounds}) {
    for (std::size_t i = 0; i < bounds->size(); ++i) {
      if (!std::isfinite((*bounds)[i])) throw ConfigError("velocity bound is not finite");
      if (i > 0 && !((*bounds)[i] > (*bounds)[i - 1])) {
        throw ConfigError("velocity bounds must be strictly increasing");
      }
    }
  }
}

SpikeClock::SpikeClock(ClockMode mode, std::uint64_t seed, int rate_hz)
    : mode_(mode), rate_hz_(rate_hz), rng_(seed) {
  if (rate_hz <= 0 || rate_hz > 1000) throw ConfigError("spike rate must be in (0, 1000] Hz");
}

bool SpikeClock::shared_tick(Step step) const {
  const Step r = rate_hz_;
  return (r * (step + 1)) / 1000 != (r * step) / 1000;
}

std::vector<Channel> SpikeClock::gate(std::vector<Channel> active) {
  const Step t = step_++;
  if (mode_ == ClockMode::Shared) {
    if (!shared_tick(t)) active.clear();
    return active;
  }
  std::erase_if(active, [&](Channel) { return uniform01(rng_) * 1000.0 >= rate_hz_; });
  return active;
}

std::size_t bin_index(double value, std::size_t n_bins, double lo, double hi) {
  if (!std::isfinite(value)) throw DomainError("bin_index: value is not finite");
  if (!(lo < hi)) throw DomainError("bin_index: empty range");
  const double pos = std::floor(static_cast<double>(n_bins) * (value - lo) / (hi - lo));
  if (pos < 0.0) return 0;
  return std::min(static_cast<std::size_t>(pos), n_bins - 1);
}

std::size_t bound_bin(double value, std::span<const double> bounds) {
  return static_cast<std::size_t>(std::upper_bound(bounds.begin(), bounds.end(), value) -
                                  bounds.begin());
}

int close_zone_cell(const WorldState& s) {
  const double left = -arena::kHalfSize;
  const double bottom = s.racket_y - kCloseFieldSize / 2.0;
  if (s.ball_x < left || s.ball_x > left + kCloseFieldSize) return -1;
  if (s.ball_y < bottom || s.ball_y > bottom + kCloseFieldSize) return -1;
  const auto col = std::min<int>(static_cast<int>((s.ball_x - left) / kCloseCellSize), 4);
  const auto row = std::min<int>(static_cast<int>((s.ball_y - bottom) / kCloseCellSize), 4);
  return row * 5 + col;
}

std::vector<Channel> active_channels(const WorldState& s, const EncoderLayout& layout) {
  constexpr double lo = -arena::kHalfSize;
  constexpr double hi = arena::kHalfSize;
  std::vector<Channel> out;
  out.reserve(6);
  const auto push = [&](std::size_t section, std::size_t index) {
    out.push_back(static_cast<Channel>(kSections[section].offset + index));
  };
  push(0, bin_index(s.ball_x, 30, lo, hi));
  push(1, bin_index(s.ball_y, 30, lo, hi));
  push(2, bound_bin(s.ball_vx, layout.vx_bounds));
  push(3, bound_bin(s.ball_vy, layout.vy_bounds));
  push(4, bin_index(s.racket_y, 30, lo, hi));
  if (const int cell = close_zone_cell(s); cell >= 0) push(5, static_cast<std::size_t>(cell));
  return out;
}

std::vector<Channel> encode(const WorldState& state, const EncoderLayout& layout,
                            SpikeClock& clock) {
  return clock.gate(active_channels(state, layout));
}

std::array<double, kVelocityBins - 1> velocity_bins(std::vector<double> samples) {
  if (samples.size() < 10000) {
    throw CalibrationError("velocity calibration needs at least 10^4 samples");
  }
  std::sort(samples.begin(), samples.end());
  std::array<double, kVelocityBins - 1> bounds{};
  const std::size_t n = samples.size();
  for (std::size_t k = 1; k < kVelocityBins; ++k) {
    bounds[k - 1] = samples[k * n / kVelocityBins];
  }
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (!(bounds[i] > bounds[i - 1])) {
      throw CalibrationError("degenerate velocity samples: quantiles coincide");
    }
  }
  return bounds;
}

VelocitySamples sample_velocities(std::uint64_t seed, Step steps, const RacketDynamics& racket) {
  racket.validate();
  Rng env_rng(derive_seed(seed, 1));
  ChaoticPolicy policy(derive_seed(seed, 2), racket.policy_period);
  WorldState world = initial_world(env_rng);
  VelocitySamples out;
  out.vx.reserve(static_cast<std::size_t>(steps));
  out.vy.reserve(static_cast<std::size_t>(steps));
  for (Step t = 0; t < steps; ++t) {
    world = env_step(world, policy.action(t), env_rng, racket).state;
    out.vx.push_back(world.ball_vx);
    out.vy.push_back(world.ball_vy);
  }
  return out;
}

EncoderLayout calibrate_layout(std::uint64_t seed, Step steps, const RacketDynamics& racket) {
  auto samples = sample_velocities(seed, steps, racket);
  EncoderLayout layout;
  layout.vx_bounds = velocity_bins(std::move(samples.vx));
  layout.vy_bounds = velocity_bins(std::move(samples.vy));
  return layout;
}

void write_layout(std::ostream& out, const EncoderLayout& layout) {
  KeyValueConfig kv;
  kv.set("format", std::string(kLayoutFormat));
  kv.set("version", kLayoutVersion);
  kv.set("channels", static_cast<std::int64_t>(kPongChannels));
  kv.set("sections", sections_string());
  kv.set("vx_bounds", join(layout.vx_bounds));
  kv.set("vy_bounds", join(layout.vy_bounds));
  out << "# Spike encoder layout for the pong task.\n";
  kv.write(out);
}

EncoderLayout read_layout(std::istream& in) {
  const auto kv = KeyValueConfig::parse(in, "encoder layout");
  kv.reject_unknown({"format", "version", "channels", "sections", "vx_bounds", "vy_bounds"});
  if (kv.get("format") != kLayoutFormat) throw ConfigError("not an encoder layout file");
  if (kv.get_int("version", 0) != kLayoutVersion) throw ConfigError("unsupported layout version");
  if (kv.get_int("channels", 0) != static_cast<std::int64_t>(kPongChannels)) {
    throw ConfigError("layout channel count must be 133");
  }
  if (kv.get("sections") != sections_string()) throw ConfigError("layout sections differ");
  EncoderLayout layout;
  const auto vx = kv.get_doubles("vx_bounds");
  const auto vy = kv.get_doubles("vy_bounds");
  if (vx.size() != layout.vx_bounds.size() || vy.size() != layout.vy_bounds.size()) {
    throw ConfigError("layout needs 8 boundaries per velocity section");
  }
  std::copy(vx.begin(), vx.end(), layout.vx_bounds.begin());
  std::copy(vy.begin(), vy.end(), layout.vy_bounds.begin());
  layout.validate();
  return layout;
}

void save_layout(const std::filesystem::path& path, const EncoderLayout& layout) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_layout(out, layout);
  if (!out) throw IoError("failed writing " + path.string());
}

EncoderLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_layout(in);
}

std::pair<std::string, std::size_t> describe_channel(std::size_t channel) {
  for (const auto& s : kSections) {
    if (channel >= s.offset && channel < s.offset + s.width) return {s.name, channel - s.offset};
  }
  return {"channel", channel};
}

}  // namespace causal
