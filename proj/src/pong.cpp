#include "causal/pong.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "causal/errors.hpp"

namespace causal {

using namespace arena;

BallState reset_ball(Rng& rng) {
  BallState b{};
  b.x = 0.0;
  do {
    b.y = uniform(rng, -kHalfSize, kHalfSize);
  } while (b.y == -kHalfSize);
  const double speed = uniform(rng, kMinSpeed, kMaxSpeed);
  // Rejection keeps the direction uniform on the admissible arcs.
  for (;;) {
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    b.vx = speed * std::cos(angle);
    b.vy = speed * std::sin(angle);
    if (std::abs(b.vx) >= kMinHorizontalSpeed) break;
  }
  return b;
}

WorldState initial_world(Rng& rng) {
  WorldState w;
  w.racket_y = uniform(rng, -kRacketTravel, kRacketTravel);
  const BallState b = reset_ball(rng);
  w.ball_x = b.x;
  w.ball_y = b.y;
  w.ball_vx = b.vx;
  w.ball_vy = b.vy;
  return w;
}

void RacketDynamics::validate() const {
  if (!(speed >= 0.0 && std::isfinite(speed))) throw ConfigError("racket speed must be >= 0");
  if (policy_period < 1) throw ConfigError("policy period must be >= 1 step");
}

StepResult env_step(const WorldState& state, RacketAction action, Rng& rng,
                    const RacketDynamics& dynamics) {
  StepResult r{state, std::nullopt};
  WorldState& w = r.state;

  const double dy = dynamics.speed * kStepSeconds;
  if (action == RacketAction::Up) w.racket_y += dy;
  if (action == RacketAction::Down) w.racket_y -= dy;
  w.racket_y = std::clamp(w.racket_y, -kRacketTravel, kRacketTravel);

  w.ball_x += w.ball_vx * kStepSeconds;
  w.ball_y += w.ball_vy * kStepSeconds;

  if (w.ball_y > kHalfSize) {
    w.ball_y = 2.0 * kHalfSize - w.ball_y;
    w.ball_vy = -w.ball_vy;
  } else if (w.ball_y < -kHalfSize) {
    w.ball_y = -2.0 * kHalfSize - w.ball_y;
    w.ball_vy = -w.ball_vy;
  }
  if (w.ball_x > kHalfSize) {
    w.ball_x = 2.0 * kHalfSize - w.ball_x;
    w.ball_vx = -w.ball_vx;
  } else if (w.ball_x <= -kHalfSize) {
    // y has already been reflected, so a corner crossing is judged at the
    // ball's in-arena height.
    if (std::abs(w.ball_y - w.racket_y) <= kRacketHalfHeight) {
      w.ball_x = -2.0 * kHalfSize - w.ball_x;
      w.ball_vx = -w.ball_vx;
      r.event = EnvEvent{EventKind::Reward, state.step};
    } else {
      r.event = EnvEvent{EventKind::Punishment, state.step};
      const BallState b = reset_ball(rng);
      w.ball_x = b.x;
      w.ball_y = b.y;
      w.ball_vx = b.vx;
      w.ball_vy = b.vy;
    }
  }
  ++w.step;
  return r;
}

RacketAction chaotic_policy(Rng& rng, Step step, RacketAction current, Step period) {
  if (step % period != 0) return current;
  switch (uniform_index(rng, 3)) {
    case 0: return RacketAction::Up;
    case 1: return RacketAction::Down;
    default: return RacketAction::Hold;
  }
}

RacketAction ChaoticPolicy::action(Step step) {
  current_ = chaotic_policy(rng_, step, current_, period_);
  return current_;
}

}  // namespace causal
