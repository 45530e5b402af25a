#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

struct TrainConfig {
  double gamma = 0.99;
  double learning_rate = 0.0;  // 0 = per-algorithm default
  int batch_size = 64;
  int total_steps = 0;         // 0 = per-algorithm default
  uint64_t seed = 0;
  std::vector<int> hidden = {64, 64};
  double eval_pass_rate = 0.9;
  int eval_episodes = 20;

  // value-learning settings
  int buffer_capacity = 50000;
  int target_sync = 500;
  double eps_start = 1.0;
  double eps_end = 0.05;
  double eps_fraction = 0.5;   // anneal over this fraction of training
  int train_freq = 4;
  int learning_starts = 1000;

  // policy-gradient settings
  int rollout_steps = 2048;
  int update_epochs = 10;
  double clip_ratio = 0.2;
  double gae_lambda = 0.95;
  double vf_coef = 0.5;
  double ent_coef = 0.0;
  double max_grad_norm = 0.5;

  int defaulted_total_steps(const Env& env) const;
  double defaulted_learning_rate(const Env& env) const;
};

// Optional region restriction for retraining: episodes terminate with a
// penalty when the true state leaves the region; half the initial states are
// drawn from the focus band (the newly added states plus the shared cells).
struct RegionTask {
  Region region;
  Region ic_band;
  double exit_penalty = -30.0;
  double band_ic_fraction = 0.5;
};

struct EvalReport {
  int episodes = 0;
  int reached = 0;
  double mean_return = 0.0;
  double rate() const { return episodes == 0 ? 0.0 : static_cast<double>(reached) / episodes; }
};

// Deterministic fixed-grid evaluation initial states (exclude the split
// point and, for restricted tasks, stay inside the region at x=0 / in its arc).
std::vector<Vec2> eval_initial_states(const Env& env, const Region* region, int count);

// One closed-loop episode with the region-task termination rule applied.
Rollout run_task_episode(const Env& env, const Policy& policy, const RegionTask* task,
                         const Vec2& x0);

EvalReport evaluate_policy(const Env& env, const Policy& policy, const RegionTask* task,
                           int episodes = 20);

// Trains a policy for the environment: greedy value learning for discrete
// action sets, clipped-surrogate policy gradient for continuous ones.
// warm_start (same kind) initializes the networks. Throws TrainingFailed when
// the evaluation bar is missed.
std::unique_ptr<Policy> train_policy(const Env& env, const TrainConfig& cfg,
                                     const RegionTask* task = nullptr,
                                     const Policy* warm_start = nullptr,
                                     const std::string& metrics_csv_path = "");

}  // namespace hyrl
