#pragma once

#include <string>
#include <vector>

#include "hyrl/critical.hpp"
#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"

namespace hyrl {

struct NoiseConfig {
  std::string mode = "adversarial";  // none | uniform | adversarial
  double bound = 0.0;                // 0 = environment default
  uint64_t seed = 0;                 // uniform mode
  double margin = 0.05;              // adversarial: push past the split by this much
};

// Zeros ("none") or iid uniform draws in [-bound, bound] ("uniform").
std::vector<double> make_noise(const Env& env, const NoiseConfig& cfg, int steps);

// Worst-case measurement noise recorded against a policy: while the mode
// decision is still contestable (env.noise_engaged) the measurement is pushed
// across the estimated behavior split, to the opposite side of the true
// state, clipped to the bound; afterwards the trace is zero. The returned
// sequence covers the full duration (past termination a ghost state advanced
// with u=0 keeps the engagement window aligned) so the exact same
// measurements can be replayed against any other controller.
struct AdversarialRun {
  std::vector<double> noise;
  Rollout rollout;  // the run the noise was recorded against
};
AdversarialRun record_adversarial_noise(const Env& env, const Policy& policy, const Vec2& x0,
                                        int steps, const CriticalSet& critical,
                                        const NoiseConfig& cfg = {});

void save_noise(const std::vector<double>& noise, double bound, const std::string& path);
std::vector<double> load_noise(const std::string& path);

}  // namespace hyrl
