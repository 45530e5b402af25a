#include "hyrl/hybrid.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

Vec2 nearest_in(const hyrl::Region& region, const hyrl::Vec2& state) {
  const hyrl::Grid& grid = region.grid();
  hyrl::Vec2 best = state;
  double best_d = std::numeric_limits<double>::infinity();
  for (int idx : region.cells()) {
    hyrl::Vec2 c = grid.cell_center(idx);
    double d = distance(state, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

double Trajectory::total_reward() const {
  double sum = 0.0;
  for (const TrajectorySample& s : samples)
    if (s.has_action) sum += s.reward;
  return sum;
}

HybridSystem::HybridSystem(const Env& env, std::shared_ptr<const Policy> pi0,
                           std::shared_ptr<const Policy> pi1, Region m0ext, Region m1ext)
    : env_(env) {
  if (!pi0 || !pi1) throw InvalidArgument("hybrid system needs both region policies");
  Grid grid = env.make_grid();
  if (!grid.same_geometry(m0ext.grid()) || !grid.same_geometry(m1ext.grid()))
    throw InvalidArgument("region grids do not match the environment");
  Region covered = m0ext.unite(m1ext);
  if (covered.cell_count() != grid.valid_cell_count())
    throw InvalidArgument("extended regions do not cover the state space");
  pi_[0] = std::move(pi0);
  pi_[1] = std::move(pi1);
  flow_[0] = std::move(m0ext);
  flow_[1] = std::move(m1ext);
  jump_[0] = flow_[0].closed_complement();
  jump_[1] = flow_[1].closed_complement();
}

const Region& HybridSystem::flow_region(int q) const { return flow_[q]; }
const Region& HybridSystem::jump_region(int q) const { return jump_[q]; }

Trajectory HybridSystem::solve(const Vec2& xi0, int q0, double duration,
                               const std::vector<double>& noise, int max_jumps) const {
  if (q0 != 0 && q0 != 1) throw InvalidArgument("mode must be 0 or 1");
  Trajectory tr;
  Vec2 xi = xi0;
  int q = q0;
  int steps = static_cast<int>(std::lround(duration / env_.dt()));
  int k = 0;
  for (; k < steps; ++k) {
    double t = k * env_.dt();
    double delta = k < static_cast<int>(noise.size()) ? noise[k] : 0.0;
    Vec2 obs = env_.observe(xi, delta);
    if (!flow_[q].contains(obs)) {
      if (flow_[1 - q].contains(obs)) {
        q = 1 - q;
        ++tr.jump_count;
        if (tr.jump_count > max_jumps)
          throw ZenoError("more than " + std::to_string(max_jumps) + " mode switches");
        TrajectorySample jump;
        jump.t = t;
        jump.j = tr.jump_count;
        jump.xi = xi;
        jump.q = q;
        jump.event = "jump";
        tr.samples.push_back(jump);
      } else {
        // measurement maps outside the constraint set (no region claims it):
        // impossible for the true state, so keep the mode and act on the
        // nearest measurement consistent with it
        obs = nearest_in(flow_[q], obs);
      }
    }
    double u = pi_[q]->act(obs);
    StepResult res = env_.step(xi, u);
    TrajectorySample flow;
    flow.t = t;
    flow.j = tr.jump_count;
    flow.xi = xi;
    flow.q = q;
    flow.has_action = true;
    flow.u = u;
    flow.reward = res.reward;
    tr.samples.push_back(flow);
    xi = res.state;
    if (res.terminated) {
      tr.cause = res.cause;
      ++k;
      break;
    }
  }
  tr.final_state = xi;
  tr.final_q = q;
  tr.final_time = k * env_.dt();
  TrajectorySample last;
  last.t = tr.final_time;
  last.j = tr.jump_count;
  last.xi = xi;
  last.q = q;
  last.event = to_string(tr.cause);
  tr.samples.push_back(last);
  return tr;
}

Trajectory rollout_trajectory(const Env& env, const Rollout& rollout) {
  Trajectory tr;
  tr.cause = rollout.cause;
  for (size_t k = 0; k < rollout.actions.size(); ++k) {
    TrajectorySample s;
    s.t = k * env.dt();
    s.xi = rollout.states[k];
    s.has_action = true;
    s.u = rollout.actions[k];
    s.reward = rollout.rewards[k];
    tr.samples.push_back(s);
  }
  tr.final_state = rollout.states.back();
  tr.final_time = rollout.actions.size() * env.dt();
  TrajectorySample last;
  last.t = tr.final_time;
  last.xi = tr.final_state;
  last.event = to_string(tr.cause);
  tr.samples.push_back(last);
  return tr;
}

double min_jump_separation(const Env& env, const Trajectory& tr) {
  double best = std::numeric_limits<double>::infinity();
  const TrajectorySample* prev = nullptr;
  for (const TrajectorySample& s : tr.samples) {
    if (s.event != "jump") continue;
    if (prev)
      best = std::min(best, env.transversal_distance(env.transversal(prev->xi),
                                                     env.transversal(s.xi)));
    prev = &s;
  }
  return best;
}

void save_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "t,j,x,y,q,u,reward,event\n";
  for (const TrajectorySample& s : tr.samples) {
    out << format_double(s.t) << ',' << s.j << ',' << format_double(s.xi.x) << ','
        << format_double(s.xi.y) << ',' << s.q << ',';
    if (s.has_action)
      out << format_double(s.u) << ',' << format_double(s.reward);
    else
      out << ',';
    out << ',' << s.event << "\n";
  }
}

}  // namespace hyrl
