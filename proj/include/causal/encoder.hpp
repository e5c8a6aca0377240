#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "causal/neuron.hpp"
#include "causal/pong.hpp"
#include "causal/random.hpp"

namespace causal {

// One-hot rate code of the pong world, 133 channels:
//
//   offset  width  section
//        0     30  ball_x   (equal bins over [-5, 5])
//       30     30  ball_y   (equal bins over [-5, 5])
//       60      9  ball_vx  (equiprobable bins, calibrated)
//       69      9  ball_vy  (equiprobable bins, calibrated)
//       78     30  racket_y (equal bins over [-5, 5])
//      108     25  close zone: 5x5 grid of 0.6 cm cells covering the 3x3 cm
//                  field whose left-border midpoint is the racket centre;
//                  index = 5 * row + col, row 0 at the bottom, col 0 at x = -5
struct EncoderSection {
  const char* name;
  std::size_t offset;
  std::size_t width;
};

inline constexpr std::array<EncoderSection, 6> kSections{{
    {"ball_x", 0, 30},
    {"ball_y", 30, 30},
    {"ball_vx", 60, 9},
    {"ball_vy", 69, 9},
    {"racket_y", 78, 30},
    {"close_zone", 108, 25},
}};
inline constexpr std::size_t kPongChannels = 133;
inline constexpr std::size_t kVelocityBins = 9;
inline constexpr double kCloseFieldSize = 3.0;
inline constexpr double kCloseCellSize = kCloseFieldSize / 5.0;

struct EncoderLayout {
  std::array<double, kVelocityBins - 1> vx_bounds{};
  std::array<double, kVelocityBins - 1> vy_bounds{};

  // Boundaries shipped in data/encoder_layout.txt (seeded calibration run).
  static EncoderLayout calibrated_default();
  void validate() const;
};

enum class ClockMode { Shared, Bernoulli };

// Gates active channels into spikes at `rate_hz` on the 1 ms grid. The shared
// mode spikes every active channel together whenever floor(t * rate / 1000)
// increments (a 3-4-3 step pattern at 300 Hz). Bernoulli mode draws an
// independent spike per active channel with probability rate / 1000.
class SpikeClock {
 public:
  explicit SpikeClock(ClockMode mode = ClockMode::Shared, std::uint64_t seed = 0,
                      int rate_hz = 300);

  // Spikes of `active` for the next step; advances the phase by one step.
  std::vector<Channel> gate(std::vector<Channel> active);

  bool shared_tick(Step step) const;
  Step steps_elapsed() const { return step_; }
  ClockMode mode() const { return mode_; }
  int rate_hz() const { return rate_hz_; }

 private:
  ClockMode mode_;
  int rate_hz_;
  Rng rng_;
  Step step_ = 0;
};

// floor(n * (value - lo) / (hi - lo)) clamped to [0, n - 1].
std::size_t bin_index(double value, std::size_t n_bins, double lo, double hi);

// Index of the interval of `bounds` holding value (0 .. bounds.size()).
std::size_t bound_bin(double value, std::span<const double> bounds);

// Channels active for this world state before clock gating, ascending.
std::vector<Channel> active_channels(const WorldState& state, const EncoderLayout& layout);

// Close-zone cell (0..24) holding the ball, or -1 when outside the field.
int close_zone_cell(const WorldState& state);

// Spike frame for the clock's next step: active channels gated by the clock.
std::vector<Channel> encode(const WorldState& state, const EncoderLayout& layout,
                            SpikeClock& clock);

// Eight boundaries at the 1/9 .. 8/9 empirical quantiles.
std::array<double, kVelocityBins - 1> velocity_bins(std::vector<double> samples);

// Per-step velocity samples from a seeded chaotic-racket run.
struct VelocitySamples {
  std::vector<double> vx;
  std::vector<double> vy;
};
VelocitySamples sample_velocities(std::uint64_t seed, Step steps,
                                  const RacketDynamics& racket = {});
EncoderLayout calibrate_layout(std::uint64_t seed, Step steps, const RacketDynamics& racket = {});

void write_layout(std::ostream& out, const EncoderLayout& layout);
EncoderLayout read_layout(std::istream& in);
void save_layout(const std::filesystem::path& path, const EncoderLayout& layout);
EncoderLayout load_layout(const std::filesystem::path& path);

// Section name and in-section index for a pong channel.
std::pair<std::string, std::size_t> describe_channel(std::size_t channel);

}  // namespace causal
