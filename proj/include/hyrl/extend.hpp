#pragma once

#include <vector>

#include "hyrl/env.hpp"
#include "hyrl/policy.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

struct ExtensionConfig {
  double horizon = 0.5;      // backward-in-time propagation window, seconds
  double min_overlap = 0.1;  // required overlap width between the extended regions
};

struct ExtensionWitness {
  int cell = -1;
  Vec2 seed;  // interface state whose backward trajectory painted the cell
};

struct ExtendedRegion {
  Region region;  // original region plus everything reached backward in time
  Region added;   // just the new cells
  std::vector<ExtensionWitness> witnesses;
};

// Backward-in-time closed-loop vector field -f(xi, pi(xi)).
Vec2 backward_flow(const Env& env, const Policy& policy, const Vec2& xi);

// Grows a behavior region across the critical set: integrates the closed
// loop backward in time from the interface cells (critical cells touching
// the region's own side and vice versa), keeping the policy's action inside
// the region and steering toward the region elsewhere, and collects every
// cell the trajectories visit.
ExtendedRegion extend_region(const Env& env, const Policy& policy, const Region& m_i,
                             const Region& critical, const ExtensionConfig& cfg = {});

// Width of the overlap a-and-b measured transversally: on angular grids the
// widest contiguous arc of the intersection, on box grids the minimum over
// columns of the tallest contiguous column run. When `anchor` is given, only
// runs touching anchor cells count and only anchor-occupied columns are
// measured, so side lobes of the intersection do not inflate the result.
double overlap_width(const Region& a, const Region& b, const Region* anchor = nullptr);

// overlap_width that throws InsufficientOverlap below `min_width`.
double require_overlap(const Region& a, const Region& b, const Region* anchor,
                       double min_width);

}  // namespace hyrl
