#include <cmath>

#include "hyrl/env.hpp"

namespace hyrl {

namespace {
constexpr double kRewardScale = 3.3541019662496847;  // ||(3, 1.5)||, worst in-box distance
constexpr double kEdgeSlack = 1e-9;
}  // namespace

bool ObstacleEnv::inside_obstacle(const Vec2& s) const {
  return s.x >= obs_x0 && s.x <= obs_x1 && s.y >= obs_y0 && s.y <= obs_y1;
}

double ObstacleEnv::clamp_action(double u) const {
  double snapped = std::round(clamp(u, action_low(), action_high()) * 2.0) / 2.0;
  return snapped == 0.0 ? 0.0 : snapped;  // avoid -0
}

Vec2 ObstacleEnv::flow(const Vec2& state, double action) const {
  (void)state;
  return {1.0, action};
}

StepResult ObstacleEnv::step(const Vec2& state, double action) const {
  double u = clamp_action(action);
  Vec2 next{std::min(state.x + dt(), x_max), clamp(state.y + dt() * u, y_min, y_max)};
  StepResult res;
  res.state = next;
  res.reward = -distance(next, setpoint()) / kRewardScale;
  if (inside_obstacle(next)) {
    res.reward += crash_penalty;
    res.terminated = true;
    res.cause = TerminationCause::crashed;
  } else if (next.x >= x_max - kEdgeSlack) {
    res.terminated = true;
    if (distance(next, setpoint()) <= setpoint_tolerance()) {
      res.cause = TerminationCause::reached;
    } else {
      res.reward += miss_penalty;
      res.cause = TerminationCause::left_domain;
    }
  }
  return res;
}

Vec2 ObstacleEnv::step_backward(const Vec2& state, double action) const {
  double u = clamp_action(action);
  return {state.x - dt(), state.y - dt() * u};
}

Vec2 ObstacleEnv::observe(const Vec2& state, double delta) const {
  return {state.x, state.y + clamp(delta, -noise_bound(), noise_bound())};
}

bool ObstacleEnv::in_domain(const Vec2& s) const {
  if (s.x < x_min || s.x > x_max || s.y < y_min || s.y > y_max) return false;
  return !inside_obstacle(s);
}

Vec2 ObstacleEnv::sample_initial(Rng& rng) const {
  return {0.0, rng.uniform(y_min, y_max)};
}

Grid ObstacleEnv::make_grid() const {
  Grid g = Grid::box(60, 60, x_min, x_max, y_min, y_max);
  g.has_blocked = true;
  g.bx0 = obs_x0;
  g.bx1 = obs_x1;
  g.by0 = obs_y0;
  g.by1 = obs_y1;
  return g;
}

std::vector<Vec2> ObstacleEnv::probe_states(const Vec2& s, double rho) const {
  double diag = rho / std::sqrt(2.0);
  std::vector<Vec2> all = {{s.x + rho, s.y},   {s.x - rho, s.y},   {s.x, s.y + rho},
                           {s.x, s.y - rho},   {s.x + diag, s.y + diag},
                           {s.x + diag, s.y - diag}, {s.x - diag, s.y + diag},
                           {s.x - diag, s.y - diag}};
  std::vector<Vec2> out;
  for (const Vec2& p : all)
    if (in_domain(p)) out.push_back(p);
  return out;
}

int ObstacleEnv::classify_rollout(const Rollout& rollout) const {
  for (const Vec2& s : rollout.states) {
    if (s.x >= commit_x - kEdgeSlack) {
      if (s.y > 0) return 0;
      if (s.y < 0) return 1;
      return -1;
    }
  }
  if (rollout.cause == TerminationCause::crashed && !rollout.states.empty()) {
    double y = rollout.states.back().y;
    if (y > 0) return 0;
    if (y < 0) return 1;
  }
  return -1;
}

double ObstacleEnv::action_toward(const Vec2& from, const Vec2& to) const {
  double dy = to.y - from.y;
  if (std::abs(dy) < 1e-12) return 0.0;
  return dy > 0 ? action_high() : action_low();
}

}  // namespace hyrl
