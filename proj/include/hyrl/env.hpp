#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hyrl/common.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

enum class TerminationCause { none, reached, crashed, left_domain, horizon };

std::string to_string(TerminationCause cause);
TerminationCause termination_cause_from_string(const std::string& name);

struct StepResult {
  Vec2 state;
  double reward = 0.0;
  bool terminated = false;
  TerminationCause cause = TerminationCause::none;
};

// One closed-loop trace. actions/rewards have one entry per step, states one
// more (the initial state). cause describes why the last step ended the run.
struct Rollout {
  std::vector<Vec2> states;
  std::vector<double> actions;
  std::vector<double> rewards;
  TerminationCause cause = TerminationCause::none;
  int steps() const { return static_cast<int>(actions.size()); }
  double total_reward() const;
};

// A control task on a 2d state space, stateless: step() is a pure function of
// (state, action). Geometry hooks (grid, probes, trajectory classing) let the
// region machinery stay environment-agnostic.
class Env {
 public:
  virtual ~Env() = default;

  virtual std::string name() const = 0;
  virtual double dt() const = 0;
  virtual int max_steps() const = 0;
  virtual Vec2 setpoint() const = 0;
  virtual double setpoint_tolerance() const = 0;

  virtual bool discrete_actions() const = 0;
  // discrete: the full action set; continuous: empty
  virtual std::vector<double> action_values() const = 0;
  virtual double action_low() const = 0;
  virtual double action_high() const = 0;
  virtual double clamp_action(double u) const = 0;

  virtual StepResult step(const Vec2& state, double action) const = 0;
  // Euler step of the sign-flipped dynamics, no reward bookkeeping
  virtual Vec2 step_backward(const Vec2& state, double action) const = 0;
  virtual Vec2 flow(const Vec2& state, double action) const = 0;

  // measurement model: scalar noise delta mapped into an observed state
  virtual Vec2 observe(const Vec2& state, double delta) const = 0;
  virtual double noise_bound() const = 0;
  // whether an adversary attacking the mode decision still gains anything
  // from corrupting the measurement at this state; once the decision is
  // behind the vehicle the recorded noise goes quiet
  virtual bool noise_engaged(const Vec2&) const { return true; }

  virtual bool in_domain(const Vec2& state) const = 0;
  virtual Vec2 sample_initial(Rng& rng) const = 0;

  virtual Grid make_grid() const = 0;
  // states at distance <= rho around s used to test behavioral divergence
  virtual std::vector<Vec2> probe_states(const Vec2& s, double rho) const = 0;
  // -1 undecided, 0 / 1 = which side of the split the trajectory commits to
  virtual int classify_rollout(const Rollout& rollout) const = 0;

  // scalar coordinate transversal to the behavioral split (angle / y)
  virtual double transversal(const Vec2& state) const = 0;
  virtual double transversal_distance(double a, double b) const = 0;
  // the admissible action whose forward flow moves `from` toward `to`
  virtual double action_toward(const Vec2& from, const Vec2& to) const = 0;

  // default observation normalization baked into policies at creation
  virtual Vec2 obs_offset() const = 0;
  virtual Vec2 obs_scale() const = 0;
};

// Setpoint-on-a-circle task: state on S^1, u in [-1,1] spins it, reward is
// the negative angular distance to [1,0].
class UnitCircleEnv : public Env {
 public:
  std::string name() const override { return "unit_circle"; }
  double dt() const override { return 0.1; }
  int max_steps() const override { return 200; }
  Vec2 setpoint() const override { return {1.0, 0.0}; }
  double setpoint_tolerance() const override { return 0.1; }

  bool discrete_actions() const override { return false; }
  std::vector<double> action_values() const override { return {}; }
  double action_low() const override { return -1.0; }
  double action_high() const override { return 1.0; }
  double clamp_action(double u) const override;

  StepResult step(const Vec2& state, double action) const override;
  Vec2 step_backward(const Vec2& state, double action) const override;
  Vec2 flow(const Vec2& state, double action) const override;

  Vec2 observe(const Vec2& state, double delta) const override;
  double noise_bound() const override { return 0.1; }

  bool in_domain(const Vec2& state) const override;
  Vec2 sample_initial(Rng& rng) const override;

  Grid make_grid() const override { return Grid::angular(628); }
  std::vector<Vec2> probe_states(const Vec2& s, double rho) const override;
  int classify_rollout(const Rollout& rollout) const override;

  double transversal(const Vec2& state) const override { return angle_of(state); }
  double transversal_distance(double a, double b) const override;
  double action_toward(const Vec2& from, const Vec2& to) const override;

  Vec2 obs_offset() const override { return {0.0, 0.0}; }
  Vec2 obs_scale() const override { return {1.0, 1.0}; }

  // trajectories that rotate less than this in total are treated as parked
  // (near the setpoint) rather than committed to either direction
  double min_commit_rotation = 0.5;
};

// Drive-past-an-obstacle task: x advances at unit speed, u in a discrete set
// steers y; crashing into the box or leaving through x=3 off-target is
// penalized.
class ObstacleEnv : public Env {
 public:
  std::string name() const override { return "obstacle"; }
  double dt() const override { return 0.1; }
  int max_steps() const override { return 60; }
  Vec2 setpoint() const override { return {3.0, 0.0}; }
  double setpoint_tolerance() const override { return 0.1; }

  bool discrete_actions() const override { return true; }
  std::vector<double> action_values() const override { return {-1.0, -0.5, 0.0, 0.5, 1.0}; }
  double action_low() const override { return -1.0; }
  double action_high() const override { return 1.0; }
  double clamp_action(double u) const override;

  StepResult step(const Vec2& state, double action) const override;
  Vec2 step_backward(const Vec2& state, double action) const override;
  Vec2 flow(const Vec2& state, double action) const override;

  Vec2 observe(const Vec2& state, double delta) const override;
  double noise_bound() const override { return 0.1; }
  // upstream of the leading edge the side choice is still contestable; past
  // it the vehicle is committed and corrupting measurements gains nothing
  bool noise_engaged(const Vec2& state) const override { return state.x <= obs_x0 + 1e-9; }

  bool in_domain(const Vec2& state) const override;
  Vec2 sample_initial(Rng& rng) const override;

  Grid make_grid() const override;
  std::vector<Vec2> probe_states(const Vec2& s, double rho) const override;
  int classify_rollout(const Rollout& rollout) const override;

  double transversal(const Vec2& state) const override { return state.y; }
  double transversal_distance(double a, double b) const override { return std::abs(a - b); }
  double action_toward(const Vec2& from, const Vec2& to) const override;

  Vec2 obs_offset() const override { return {1.5, 0.0}; }
  Vec2 obs_scale() const override { return {1.0 / 1.5, 1.0 / 1.5}; }

  bool inside_obstacle(const Vec2& state) const;

  double x_min = 0.0, x_max = 3.0;
  double y_min = -1.5, y_max = 1.5;
  double obs_x0 = 0.8, obs_x1 = 1.3;
  double obs_y0 = -0.25, obs_y1 = 0.25;
  double crash_penalty = -10.0;
  double miss_penalty = -5.0;
  // the x threshold past which a trajectory has committed to one side
  double commit_x = 1.3;
};

std::unique_ptr<Env> make_env(const std::string& name);

class Policy;

// deterministic closed-loop rollout; noise[k] perturbs the observation fed to
// the policy at step k (missing entries mean zero noise)
Rollout run_rollout(const Env& env, const Policy& policy, const Vec2& x0, int max_steps,
                    const std::vector<double>* noise = nullptr);

}  // namespace hyrl
