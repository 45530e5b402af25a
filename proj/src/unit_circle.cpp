#include <cmath>

#include "hyrl/env.hpp"
#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

Vec2 renormalize(const Vec2& v) {
  double n = v.norm();
  if (n < 1e-12) throw InvalidArgument("state collapsed to the origin");
  return {v.x / n, v.y / n};
}

}  // namespace

double UnitCircleEnv::clamp_action(double u) const {
  return clamp(u, action_low(), action_high());
}

Vec2 UnitCircleEnv::flow(const Vec2& state, double action) const {
  return {-action * state.y, action * state.x};
}

StepResult UnitCircleEnv::step(const Vec2& state, double action) const {
  double u = clamp_action(action);
  Vec2 f = flow(state, u);
  Vec2 next = renormalize({state.x + dt() * f.x, state.y + dt() * f.y});
  StepResult res;
  res.state = next;
  res.reward = -std::abs(std::atan2(next.y, next.x)) / kPi;
  if (distance(next, setpoint()) <= setpoint_tolerance()) {
    res.terminated = true;
    res.cause = TerminationCause::reached;
  }
  return res;
}

Vec2 UnitCircleEnv::step_backward(const Vec2& state, double action) const {
  double u = clamp_action(action);
  Vec2 f = flow(state, u);
  return renormalize({state.x - dt() * f.x, state.y - dt() * f.y});
}

Vec2 UnitCircleEnv::observe(const Vec2& state, double delta) const {
  return rotate(state, clamp(delta, -noise_bound(), noise_bound()));
}

bool UnitCircleEnv::in_domain(const Vec2& state) const {
  (void)state;
  return true;
}

Vec2 UnitCircleEnv::sample_initial(Rng& rng) const {
  return unit_from_angle(rng.uniform(0.0, kTwoPi));
}

std::vector<Vec2> UnitCircleEnv::probe_states(const Vec2& s, double rho) const {
  double theta = angle_of(s);
  std::vector<Vec2> out;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    out.push_back(unit_from_angle(theta + frac * rho));
    out.push_back(unit_from_angle(theta - frac * rho));
  }
  return out;
}

int UnitCircleEnv::classify_rollout(const Rollout& rollout) const {
  double net_rotation = 0.0;
  for (size_t k = 0; k + 1 < rollout.states.size(); ++k)
    net_rotation += angle_diff(angle_of(rollout.states[k + 1]), angle_of(rollout.states[k]));
  if (std::abs(net_rotation) < min_commit_rotation) return -1;
  return net_rotation < 0 ? 0 : 1;
}

double UnitCircleEnv::transversal_distance(double a, double b) const {
  return std::abs(angle_diff(a, b));
}

double UnitCircleEnv::action_toward(const Vec2& from, const Vec2& to) const {
  double d = angle_diff(angle_of(to), angle_of(from));
  return d >= 0 ? action_high() : action_low();
}

}  // namespace hyrl
