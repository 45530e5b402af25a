#include "hyrl/noise.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

double signed_transversal_diff(const Env& env, double a, double b) {
  if (env.make_grid().kind == Grid::Kind::angular) return angle_diff(a, b);
  return a - b;
}

}  // namespace

std::vector<double> make_noise(const Env& env, const NoiseConfig& cfg, int steps) {
  double eps = cfg.bound > 0.0 ? cfg.bound : env.noise_bound();
  std::vector<double> out(steps, 0.0);
  if (cfg.mode == "none") return out;
  if (cfg.mode == "uniform") {
    Rng rng(splitmix64(cfg.seed ^ 0xd6e8feb86659fd93ULL));
    for (double& d : out) d = rng.uniform(-eps, eps);
    return out;
  }
  throw InvalidArgument("make_noise handles modes none and uniform, got " + cfg.mode);
}

AdversarialRun record_adversarial_noise(const Env& env, const Policy& policy, const Vec2& x0,
                                        int steps, const CriticalSet& critical,
                                        const NoiseConfig& cfg) {
  double eps = cfg.bound > 0.0 ? cfg.bound : env.noise_bound();
  AdversarialRun run;
  run.noise.resize(steps);
  run.rollout.states.push_back(x0);
  run.rollout.cause = TerminationCause::horizon;
  Vec2 state = x0;
  bool alive = true;
  for (int k = 0; k < steps; ++k) {
    double flip = (k % 2 == 0) ? eps : -eps;
    if (!alive) {
      // the recorded run is over; keep dithering while a replay from the
      // same start could still be contesting the split, then go quiet
      run.noise[k] = env.noise_engaged(state) ? flip : 0.0;
      state = env.step(state, 0.0).state;
      continue;
    }
    if (!env.noise_engaged(state)) {
      run.noise[k] = 0.0;
      double u = policy.act(env.observe(state, 0.0));
      StepResult res = env.step(state, u);
      run.rollout.actions.push_back(u);
      run.rollout.rewards.push_back(res.reward);
      run.rollout.states.push_back(res.state);
      state = res.state;
      if (res.terminated) {
        run.rollout.cause = res.cause;
        alive = false;
      }
      continue;
    }
    double split = critical.boundary_near(state);
    double d = signed_transversal_diff(env, env.transversal(state), split);
    double delta;
    if (d == 0.0) {
      delta = flip;
    } else {
      double side = d > 0.0 ? 1.0 : -1.0;
      double target = split - side * cfg.margin;
      delta = clamp(signed_transversal_diff(env, target, env.transversal(state)), -eps, eps);
    }
    run.noise[k] = delta;
    double u = policy.act(env.observe(state, delta));
    StepResult res = env.step(state, u);
    run.rollout.actions.push_back(u);
    run.rollout.rewards.push_back(res.reward);
    run.rollout.states.push_back(res.state);
    state = res.state;
    if (res.terminated) {
      run.rollout.cause = res.cause;
      alive = false;
    }
  }
  return run;
}

void save_noise(const std::vector<double>& noise, double bound, const std::string& path) {
  nlohmann::json j;
  j["format"] = "noise";
  j["version"] = 1;
  j["bound"] = bound;
  j["values"] = noise;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << "\n";
}

std::vector<double> load_noise(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  if (j.value("format", "") != "noise" || j.value("version", 0) != 1)
    throw IoError(path + ": not a noise file");
  return j.at("values").get<std::vector<double>>();
}

}  // namespace hyrl
