#pragma once

#include <string>
#include <vector>

#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

struct CriticalConfig {
  double probe_radius = 0.0;     // 0 = per-geometry default
  double divergence_time = 4.0;  // noise-free rollout horizon per probe, seconds
};

// Evidence that one cell splits: two nearby states steered to opposite sides.
struct CellWitness {
  int cell = -1;
  Vec2 probe_class0;
  Vec2 probe_class1;
};

// The set of states where the closed loop is about to commit to one of two
// diverging behaviors, plus an estimate of the dividing boundary used to
// shape worst-case measurement noise.
struct CriticalSet {
  Region region;
  std::vector<CellWitness> witnesses;
  double theta_c = 0.0;            // angular grids: mean split angle
  std::vector<double> boundary_y;  // box grids: per-column split height

  // Transversal coordinate of the split nearest to `state`.
  double boundary_near(const Vec2& state) const;
};

// Probes every valid cell with a ring of nearby initial states, rolls each
// probe out noise-free under the policy, and marks the cell when the probes
// commit to both behaviors.
CriticalSet find_critical_set(const Env& env, const Policy& policy,
                              const CriticalConfig& cfg = {});

// The two behavior regions: each connected component of the complement,
// closed by uniting it with the critical set. Throws TopologyError unless
// the complement has exactly two components. m0 is the component on the
// low-angle side (angular) or the high-y side (box).
struct BehaviorPartition {
  Region m0;
  Region m1;
};
BehaviorPartition partition_regions(const Region& critical);

void save_critical_witnesses(const CriticalSet& set, const std::string& path);
CriticalSet load_critical_set(const std::string& region_path, const std::string& witness_path);

}  // namespace hyrl
