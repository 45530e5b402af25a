#include "hyrl/env.hpp"

#include <numeric>

#include "hyrl/errors.hpp"
#include "hyrl/policy.hpp"

namespace hyrl {

std::string to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::none: return "none";
    case TerminationCause::reached: return "reached";
    case TerminationCause::crashed: return "crashed";
    case TerminationCause::left_domain: return "left_domain";
    case TerminationCause::horizon: return "horizon";
  }
  return "none";
}

TerminationCause termination_cause_from_string(const std::string& name) {
  if (name == "none") return TerminationCause::none;
  if (name == "reached") return TerminationCause::reached;
  if (name == "crashed") return TerminationCause::crashed;
  if (name == "left_domain") return TerminationCause::left_domain;
  if (name == "horizon") return TerminationCause::horizon;
  throw InvalidArgument("unknown termination cause " + name);
}

double Rollout::total_reward() const {
  return std::accumulate(rewards.begin(), rewards.end(), 0.0);
}

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "unit_circle") return std::make_unique<UnitCircleEnv>();
  if (name == "obstacle") return std::make_unique<ObstacleEnv>();
  throw InvalidArgument("unknown environment " + name);
}

Rollout run_rollout(const Env& env, const Policy& policy, const Vec2& x0, int max_steps,
                    const std::vector<double>* noise) {
  Rollout r;
  Vec2 state = x0;
  r.states.push_back(state);
  r.cause = TerminationCause::horizon;
  for (int k = 0; k < max_steps; ++k) {
    double delta = 0.0;
    if (noise && k < static_cast<int>(noise->size())) delta = (*noise)[k];
    double u = policy.act(env.observe(state, delta));
    StepResult res = env.step(state, u);
    r.actions.push_back(u);
    r.rewards.push_back(res.reward);
    r.states.push_back(res.state);
    state = res.state;
    if (res.terminated) {
      r.cause = res.cause;
      break;
    }
  }
  return r;
}

}  // namespace hyrl
