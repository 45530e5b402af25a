#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

// One recorded sample of a closed-loop run in hybrid time (t, j). Flow rows
// carry the action and reward; jump rows and the final row leave them unset.
struct TrajectorySample {
  double t = 0.0;
  int j = 0;
  Vec2 xi;
  int q = -1;  // -1 for single-policy runs
  bool has_action = false;
  double u = 0.0;
  double reward = 0.0;
  std::string event;  // "", "jump", or a termination cause
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  TerminationCause cause = TerminationCause::horizon;
  int jump_count = 0;
  Vec2 final_state;
  int final_q = -1;
  double final_time = 0.0;

  double total_reward() const;
};

// Supervisor that flows the active region policy and toggles the mode when
// the measured state leaves its extended region. Flowing wins whenever the
// measurement is still inside the active region, so the overlap of the two
// regions acts as hysteresis against measurement noise. A measurement that
// falls outside the constraint set entirely (impossible for the true state)
// keeps the mode and is replaced by the nearest in-region measurement.
class HybridSystem {
 public:
  HybridSystem(const Env& env, std::shared_ptr<const Policy> pi0,
               std::shared_ptr<const Policy> pi1, Region m0ext, Region m1ext);

  const Region& flow_region(int q) const;
  const Region& jump_region(int q) const;  // grid-level closure of the complement

  // Integrates for `duration` seconds of flow time from (xi0, q0), applying
  // noise[k] to the measurement at step k (0 past the end). Throws ZenoError
  // after more than `max_jumps` mode switches.
  Trajectory solve(const Vec2& xi0, int q0, double duration,
                   const std::vector<double>& noise = {}, int max_jumps = 100) const;

 private:
  const Env& env_;
  std::shared_ptr<const Policy> pi_[2];
  Region flow_[2];
  Region jump_[2];
};

// Single-policy run recorded in the same trajectory format (q fixed at -1).
Trajectory rollout_trajectory(const Env& env, const Rollout& rollout);

// Smallest transversal distance between consecutive mode-switch states; +inf
// when the run has fewer than two jumps.
double min_jump_separation(const Env& env, const Trajectory& tr);

void save_trajectory_csv(const Trajectory& tr, const std::string& path);

}  // namespace hyrl
