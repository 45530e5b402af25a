#include <cmath>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"

using namespace hyrl;

namespace {

struct ConstPolicy : Policy {
  explicit ConstPolicy(double u) : u_(u) {}
  std::string kind() const override { return "const"; }
  double act(const Vec2&) const override { return u_; }
  nlohmann::json to_json() const override { return {}; }
  std::unique_ptr<Policy> clone() const override { return std::make_unique<ConstPolicy>(u_); }
  double u_;
};

}  // namespace

TEST_CASE("circle euler step tracks the exact rotation to 1e-3 per step") {
  UnitCircleEnv env;
  for (double u : {-1.0, -0.4, 0.3, 1.0}) {
    for (double theta = 0.0; theta < kTwoPi; theta += 0.37) {
      Vec2 s = unit_from_angle(theta);
      Vec2 stepped = env.step(s, u).state;
      Vec2 exact = rotate(s, u * env.dt());
      CHECK(distance(stepped, exact) <= 1e-3);
      CHECK(stepped.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("circle reward is the negative normalized angle error") {
  UnitCircleEnv env;
  StepResult at_goal = env.step({1.0, 0.0}, 0.0);
  CHECK(at_goal.reward == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(at_goal.terminated);
  CHECK(at_goal.cause == TerminationCause::reached);

  StepResult opposite = env.step({-1.0, 0.0}, 0.0);
  CHECK(opposite.reward == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK_FALSE(opposite.terminated);

  StepResult quarter = env.step({0.0, 1.0}, 0.0);
  CHECK(quarter.reward == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("circle terminates inside the setpoint chord tolerance") {
  UnitCircleEnv env;
  StepResult near = env.step(unit_from_angle(0.05), 0.0);
  CHECK(near.terminated);
  CHECK(near.cause == TerminationCause::reached);
  StepResult far = env.step(unit_from_angle(0.3), 0.0);
  CHECK_FALSE(far.terminated);
}

TEST_CASE("circle observation rotates the state by the clamped noise") {
  UnitCircleEnv env;
  Vec2 obs = env.observe({1.0, 0.0}, 0.05);
  CHECK(angle_of(obs) == doctest::Approx(0.05).epsilon(1e-12));
  // clamped to the bound
  Vec2 big = env.observe({1.0, 0.0}, 5.0);
  CHECK(angle_of(big) == doctest::Approx(env.noise_bound()).epsilon(1e-12));
}

TEST_CASE("circle action clamp and action_toward directions") {
  UnitCircleEnv env;
  CHECK(env.clamp_action(3.0) == 1.0);
  CHECK(env.clamp_action(-3.0) == -1.0);
  CHECK(env.action_toward(unit_from_angle(1.0), unit_from_angle(1.5)) == 1.0);
  CHECK(env.action_toward(unit_from_angle(1.5), unit_from_angle(1.0)) == -1.0);
  // the short way across the cut
  CHECK(env.action_toward(unit_from_angle(6.2), unit_from_angle(0.1)) == 1.0);
}

TEST_CASE("circle rollout classing keys on committed net rotation") {
  UnitCircleEnv env;
  Rollout cw, ccw, parked;
  for (int k = 0; k <= 8; ++k) {
    cw.states.push_back(unit_from_angle(3.0 - 0.1 * k));
    ccw.states.push_back(unit_from_angle(3.0 + 0.1 * k));
    parked.states.push_back(unit_from_angle(3.0 + 0.02 * (k % 2)));
  }
  CHECK(env.classify_rollout(cw) == 0);
  CHECK(env.classify_rollout(ccw) == 1);
  CHECK(env.classify_rollout(parked) == -1);
}

TEST_CASE("obstacle step advances x at unit speed and steers y") {
  ObstacleEnv env;
  StepResult r = env.step({0.0, 0.0}, 1.0);
  CHECK(r.state.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.state.y == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_FALSE(r.terminated);
  CHECK(r.reward == doctest::Approx(-distance(r.state, {3.0, 0.0}) / 3.3541019662496847));

  // y saturates at the box walls
  StepResult wall = env.step({0.0, 1.48}, 1.0);
  CHECK(wall.state.y == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("obstacle actions snap to the discrete set") {
  ObstacleEnv env;
  CHECK(env.clamp_action(0.3) == 0.5);
  CHECK(env.clamp_action(0.2) == 0.0);
  CHECK(env.clamp_action(-0.7) == -0.5);
  CHECK(env.clamp_action(4.0) == 1.0);
  CHECK(env.clamp_action(-0.1) == 0.0);  // snaps to plain zero, not -0
}

TEST_CASE("obstacle crash ends the episode with the crash penalty") {
  ObstacleEnv env;
  StepResult r = env.step({0.75, 0.0}, 0.0);
  CHECK(r.terminated);
  CHECK(r.cause == TerminationCause::crashed);
  CHECK(r.reward < -10.0);
  CHECK(env.inside_obstacle(r.state));
}

TEST_CASE("obstacle exit at x=3 splits into reached and missed") {
  ObstacleEnv env;
  StepResult hit = env.step({2.95, 0.02}, 0.0);
  CHECK(hit.terminated);
  CHECK(hit.cause == TerminationCause::reached);

  StepResult miss = env.step({2.95, 0.5}, 0.0);
  CHECK(miss.terminated);
  CHECK(miss.cause == TerminationCause::left_domain);
  CHECK(miss.reward < -5.0);
}

TEST_CASE("obstacle observation shifts y only") {
  ObstacleEnv env;
  Vec2 obs = env.observe({1.0, 0.2}, -0.07);
  CHECK(obs.x == 1.0);
  CHECK(obs.y == doctest::Approx(0.13).epsilon(1e-12));
  CHECK(env.observe({1.0, 0.2}, -5.0).y == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("obstacle domain excludes the blocked rectangle") {
  ObstacleEnv env;
  CHECK(env.in_domain({0.5, 0.0}));
  CHECK_FALSE(env.in_domain({1.0, 0.0}));
  CHECK_FALSE(env.in_domain({-0.1, 0.0}));
  CHECK_FALSE(env.in_domain({1.0, 2.0}));
}

TEST_CASE("obstacle probes form a ring clipped to the domain") {
  ObstacleEnv env;
  auto open_field = env.probe_states({2.0, -1.0}, 0.08);
  CHECK(open_field.size() == 8);
  for (const Vec2& p : open_field) {
    CHECK(distance(p, {2.0, -1.0}) <= 0.08 + 1e-12);
    CHECK(env.in_domain(p));
  }
  // next to the obstacle face some probes are cut away
  auto cramped = env.probe_states({0.78, 0.0}, 0.08);
  CHECK(cramped.size() < 8);
  for (const Vec2& p : cramped) CHECK(env.in_domain(p));
}

TEST_CASE("obstacle rollout classing commits past the trailing edge") {
  ObstacleEnv env;
  Rollout upper, lower, undecided, downstream;
  upper.states = {{0.0, 0.0}, {0.9, 0.4}, {1.35, 0.4}};
  lower.states = {{0.0, 0.0}, {0.9, -0.4}, {1.35, -0.4}};
  undecided.states = {{0.0, 0.0}, {0.5, 0.1}};
  downstream.states = {{2.0, -0.05}, {2.1, -0.05}};
  CHECK(env.classify_rollout(upper) == 0);
  CHECK(env.classify_rollout(lower) == 1);
  CHECK(env.classify_rollout(undecided) == -1);
  CHECK(env.classify_rollout(downstream) == 1);

  // crashes class by the side they hit
  Rollout crash;
  crash.states = {{0.0, 0.1}, {0.85, 0.2}};
  crash.cause = TerminationCause::crashed;
  CHECK(env.classify_rollout(crash) == 0);
}

TEST_CASE("rollout driver feeds the policy noisy observations") {
  ObstacleEnv env;
  // the policy echoes the observed y as a steering command, so the recorded
  // action exposes exactly what it saw
  struct Echo : Policy {
    std::string kind() const override { return "echo"; }
    double act(const Vec2& obs) const override { return obs.y; }
    nlohmann::json to_json() const override { return {}; }
    std::unique_ptr<Policy> clone() const override { return std::make_unique<Echo>(); }
  } echo;

  std::vector<double> noise = {0.6, -0.6};
  Rollout r = run_rollout(env, echo, {0.0, 0.0}, 2, &noise);
  REQUIRE(r.steps() == 2);
  // noise is clamped to the bound by observe(), so the policy saw y = 0.1,
  // which the step then snaps to the nearest admissible action, 0
  CHECK(r.actions[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.states[1].y == 0.0);

  Rollout clean = run_rollout(env, echo, {0.0, 0.0}, 2);
  CHECK(clean.actions[0] == 0.0);
  CHECK(clean.cause == TerminationCause::horizon);
}

TEST_CASE("environment factory knows both names and rejects others") {
  CHECK(make_env("unit_circle")->name() == "unit_circle");
  CHECK(make_env("obstacle")->name() == "obstacle");
  CHECK_THROWS(make_env("pendulum"));
}
