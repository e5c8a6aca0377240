#pragma once

#include <cstdint>
#include <optional>

#include "causal/plasticity.hpp"
#include "causal/random.hpp"

namespace causal {

// Three-walled 10x10 cm arena centred on the origin; the racket slides along
// the open left border. One step is 1 ms.
namespace arena {
inline constexpr double kHalfSize = 5.0;           // cm
inline constexpr double kRacketHalfHeight = 0.9;   // cm
inline constexpr double kRacketTravel = kHalfSize - kRacketHalfHeight;
inline constexpr double kStepSeconds = 1e-3;
inline constexpr double kMinSpeed = 10.0;          // cm/s
inline constexpr double kMaxSpeed = 33.3;          // cm/s
inline constexpr double kMinHorizontalSpeed = 10.0;
}  // namespace arena

// Racket kinematics under the chaotic policy.
struct RacketDynamics {
  double speed = 20.0;      // cm/s
  Step policy_period = 100; // steps between action draws
  void validate() const;
};

struct WorldState {
  double ball_x = 0.0;
  double ball_y = 0.0;
  double ball_vx = arena::kMinSpeed;
  double ball_vy = 0.0;
  double racket_y = 0.0;
  Step step = 0;
};

struct BallState {
  double x;
  double y;
  double vx;
  double vy;
};

enum class RacketAction { Up, Down, Hold };

enum class EventKind : std::uint8_t { Reward = 1, Punishment = 2 };

struct EnvEvent {
  EventKind kind;
  Step step;
  friend bool operator==(const EnvEvent&, const EnvEvent&) = default;
};

struct StepResult {
  WorldState state;
  std::optional<EnvEvent> event;
};

// Ball on the middle vertical line, uniform height, speed uniform in
// [10, 33.3] cm/s and a uniformly random direction with |vx| >= 10 cm/s.
BallState reset_ball(Rng& rng);

// Random initial world: racket uniform over its travel, ball from reset_ball.
WorldState initial_world(Rng& rng);

// Advances the world by one step. Top, bottom and right walls reflect
// elastically. Crossing the left border is a Reward when the racket covers
// the ball (the ball bounces back) and a Punishment otherwise (the ball is
// re-served through reset_ball). The event carries the step being advanced.
StepResult env_step(const WorldState& state, RacketAction action, Rng& rng,
                    const RacketDynamics& dynamics = {});

// Piecewise-constant random racket control: a fresh uniform action every
// `period` steps, held in between.
class ChaoticPolicy {
 public:
  explicit ChaoticPolicy(std::uint64_t seed, Step period = RacketDynamics{}.policy_period)
      : rng_(seed), period_(period) {}
  RacketAction action(Step step);

 private:
  Rng rng_;
  Step period_;
  RacketAction current_ = RacketAction::Hold;
};

RacketAction chaotic_policy(Rng& rng, Step step, RacketAction current,
                            Step period = RacketDynamics{}.policy_period);

}  // namespace causal
