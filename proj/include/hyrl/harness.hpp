#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hyrl/critical.hpp"
#include "hyrl/extend.hpp"
#include "hyrl/hybrid.hpp"
#include "hyrl/noise.hpp"
#include "hyrl/rl.hpp"

namespace hyrl {

// A run is stuck when it neither terminated nor moved more than `threshold`
// over the trailing `window` seconds.
struct StuckCriterion {
  double window = 2.0;
  double threshold = 0.05;
};

enum class Outcome { reached, crashed, stuck, other };
std::string to_string(Outcome o);

Outcome classify_trajectory(const Trajectory& tr, const StuckCriterion& sc);

struct PipelineConfig {
  TrainConfig train;          // baseline policy
  TrainConfig retrain;        // per-region policies, warm-started
  CriticalConfig critical;
  ExtensionConfig extension;
  NoiseConfig noise;          // noise for the comparison runs
  StuckCriterion stuck;
  double compare_duration = 0.0;  // 0 = per-environment default
  uint64_t seed = 0;
};

// Fills the per-environment retraining defaults (shorter budget, partially
// decayed exploration) and derives the stage seeds from `seed`.
PipelineConfig default_pipeline_config(const Env& env, uint64_t seed);

// Initial states the baseline-vs-hybrid comparison runs from: around the
// split angle for the circle, around the obstacle midline at x=0 for the box.
std::vector<Vec2> compare_initial_states(const Env& env);
double default_compare_duration(const Env& env);

struct CompareCase {
  Vec2 x0;
  Outcome baseline = Outcome::other;
  Outcome hybrid_q0 = Outcome::other;
  Outcome hybrid_q1 = Outcome::other;
  double hybrid_q0_time = 0.0;  // flow time at the end of each hybrid run
  double hybrid_q1_time = 0.0;
  int jumps_q0 = 0;
  int jumps_q1 = 0;
};

// Noise-free run that must stay in its starting mode and terminate at the
// setpoint, passing the split on the mode's own side. Details go to *why.
bool sided_run_ok(const Env& env, const HybridSystem& hybrid, const Vec2& x0, int q0,
                  double duration, std::string* why = nullptr);

struct PipelineResult {
  std::shared_ptr<const Policy> baseline;
  CriticalSet critical;
  BehaviorPartition partition;
  ExtendedRegion ext0, ext1;
  double overlap_width = 0.0;
  std::shared_ptr<const Policy> pi0, pi1;  // restricted to their extended regions
  std::unique_ptr<HybridSystem> hybrid;
  std::vector<CompareCase> compare;
};

// The full procedure: train the baseline, locate the critical set, split and
// extend the regions, retrain one policy per region, assemble the switching
// loop, and compare baseline vs hybrid under recorded worst-case noise.
// Writes every artifact into output_dir. Failures carry the step number.
// resume_from skips completed steps (1 train, 2 critical, 3 partition,
// 4 extend, 5 retrain, 6 assemble, 7 compare) by loading their artifacts.
PipelineResult run_pipeline(const Env& env, const PipelineConfig& cfg,
                            const std::string& output_dir, int resume_from = 1);

}  // namespace hyrl
