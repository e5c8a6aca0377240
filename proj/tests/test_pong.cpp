#include <doctest.h>

#include <array>
#include <cmath>

#include "causal/pong.hpp"

using namespace causal;

namespace {

double speed(const WorldState& w) { return std::hypot(w.ball_vx, w.ball_vy); }

}  // namespace

TEST_CASE("top wall reflects elastically") {
  Rng rng(1);
  WorldState w;
  w.ball_x = 0.0;
  w.ball_y = 4.99;
  w.ball_vx = 15.0;
  w.ball_vy = 20.0;
  const auto r = env_step(w, RacketAction::Hold, rng);
  CHECK(r.state.ball_vy == -20.0);
  CHECK(r.state.ball_y == doctest::Approx(4.99).epsilon(1e-12));  // 5 - (5.01 - 5)
  CHECK(r.state.ball_y <= 5.0);
  CHECK_FALSE(r.event);
}

TEST_CASE("bottom and right walls reflect") {
  Rng rng(1);
  WorldState w;
  w.ball_x = 4.995;
  w.ball_y = -4.995;
  w.ball_vx = 20.0;
  w.ball_vy = -20.0;
  const auto r = env_step(w, RacketAction::Hold, rng);
  CHECK(r.state.ball_vx == -20.0);
  CHECK(r.state.ball_vy == 20.0);
  CHECK(r.state.ball_x <= 5.0);
  CHECK(r.state.ball_y >= -5.0);
}

TEST_CASE("racket hit bounces the ball and rewards") {
  Rng rng(1);
  WorldState w;
  w.ball_x = -4.99;
  w.ball_y = 1.0;
  w.ball_vx = -20.0;
  w.ball_vy = 3.0;
  w.racket_y = 1.5;
  w.step = 77;
  const auto r = env_step(w, RacketAction::Hold, rng);
  REQUIRE(r.event);
  CHECK(r.event->kind == EventKind::Reward);
  CHECK(r.event->step == 77);
  CHECK(r.state.ball_vx == 20.0);
  CHECK(r.state.ball_x >= -5.0);
  CHECK(r.state.step == 78);
}

TEST_CASE("miss punishes and re-serves from the middle line") {
  Rng rng(1);
  WorldState w;
  w.ball_x = -4.99;
  w.ball_y = -3.0;
  w.ball_vx = -20.0;
  w.ball_vy = 0.0;
  w.racket_y = 2.0;
  const auto r = env_step(w, RacketAction::Hold, rng);
  REQUIRE(r.event);
  CHECK(r.event->kind == EventKind::Punishment);
  CHECK(r.state.ball_x == 0.0);
  CHECK(speed(r.state) >= 10.0);
  CHECK(speed(r.state) <= 33.3);
  CHECK(std::abs(r.state.ball_vx) >= 10.0);
}

TEST_CASE("racket edge counts as a hit") {
  Rng rng(1);
  WorldState w;
  w.ball_x = -4.99;
  w.ball_y = 1.0;
  w.ball_vx = -20.0;
  w.racket_y = 1.0 + 0.9 - 1e-9;
  const auto r = env_step(w, RacketAction::Hold, rng);
  REQUIRE(r.event);
  CHECK(r.event->kind == EventKind::Reward);
}

TEST_CASE("racket moves at 20 cm/s and stays inside the arena") {
  Rng rng(1);
  WorldState w;
  w.racket_y = 0.0;
  auto r = env_step(w, RacketAction::Up, rng);
  CHECK(r.state.racket_y == doctest::Approx(0.02).epsilon(1e-12));
  r = env_step(r.state, RacketAction::Down, rng);
  CHECK(std::abs(r.state.racket_y) < 1e-12);
  w.racket_y = 4.1;
  CHECK(env_step(w, RacketAction::Up, rng).state.racket_y == 4.1);
  w.racket_y = -4.1;
  CHECK(env_step(w, RacketAction::Down, rng).state.racket_y == -4.1);
}

TEST_CASE("reset_ball satisfies the serve constraints") {
  Rng rng(123);
  double min_vx = 1e9, max_speed = 0.0, min_speed = 1e9;
  int left = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto b = reset_ball(rng);
    CHECK(b.x == 0.0);
    CHECK(b.y > -5.0);
    CHECK(b.y < 5.0);
    min_vx = std::min(min_vx, std::abs(b.vx));
    const double s = std::hypot(b.vx, b.vy);
    max_speed = std::max(max_speed, s);
    min_speed = std::min(min_speed, s);
    if (b.vx < 0) ++left;
  }
  CHECK(min_vx >= 10.0);
  CHECK(max_speed <= 33.3 + 1e-12);
  CHECK(min_speed >= 10.0 - 1e-12);
  CHECK(left > 4700);
  CHECK(left < 5300);
}

TEST_CASE("reset_ball is reproducible for a seed") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    const auto x = reset_ball(a);
    const auto y = reset_ball(b);
    CHECK(x.y == y.y);
    CHECK(x.vx == y.vx);
    CHECK(x.vy == y.vy);
  }
}

TEST_CASE("chaotic policy changes action only on period boundaries") {
  ChaoticPolicy policy(5);
  RacketAction prev = policy.action(0);
  for (Step t = 1; t < 100000; ++t) {
    const auto a = policy.action(t);
    if (t % 100 != 0) CHECK(a == prev);
    prev = a;
  }
}

TEST_CASE("chaotic policy draws are uniform (chi-square)") {
  Rng rng(77);
  std::array<int, 3> counts{};
  RacketAction current = RacketAction::Hold;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    current = chaotic_policy(rng, 0, current);
    ++counts[static_cast<int>(current)];
  }
  double chi2 = 0.0;
  const double expected = draws / 3.0;
  for (const int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 13.82);  // 2 degrees of freedom, p = 0.001
}

TEST_CASE("long run invariants and reproducibility") {
  const auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    ChaoticPolicy policy(seed + 1);
    WorldState w = initial_world(rng);
    std::vector<EnvEvent> events;
    double s0 = speed(w);
    bool ok = true;
    for (Step t = 0; t < 300000; ++t) {
      const auto r = env_step(w, policy.action(t), rng);
      if (r.event) {
        events.push_back(*r.event);
        if (r.event->kind == EventKind::Punishment) s0 = speed(r.state);
      }
      w = r.state;
      ok = ok && std::abs(w.ball_x) <= 5.0 && std::abs(w.ball_y) <= 5.0;
      ok = ok && std::abs(w.racket_y) <= 4.1;
      ok = ok && std::abs(speed(w) - s0) < 1e-9;
    }
    CHECK(ok);
    return events;
  };
  const auto a = run(4);
  CHECK(a == run(4));
  CHECK(a != run(5));
  CHECK_FALSE(a.empty());
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].step > a[i - 1].step);
}
