#include "hyrl/rl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd normalize_obs(const Env& env, const Vec2& s) {
  Vec2 off = env.obs_offset(), sc = env.obs_scale();
  VectorXd v(2);
  v << (s.x - off.x) * sc.x, (s.y - off.y) * sc.y;
  return v;
}

Vec2 reset_state(const Env& env, const RegionTask* task, Rng& rng) {
  if (!task) return env.sample_initial(rng);
  if (!task->ic_band.empty() && rng.uniform01() < task->band_ic_fraction)
    return sample_state_in(task->ic_band, rng);
  return sample_state_in(task->region, rng);
}

StepResult step_task(const Env& env, const RegionTask* task, const Vec2& state, double u) {
  StepResult res = env.step(state, u);
  if (!res.terminated && task && !task->region.contains(res.state)) {
    res.terminated = true;
    res.cause = TerminationCause::left_domain;
    res.reward += task->exit_penalty;
  }
  return res;
}

class MetricsLog {
 public:
  MetricsLog(const std::string& path, const char* explore_name) {
    if (path.empty()) return;
    out_.open(path);
    if (!out_) throw IoError("cannot write " + path);
    out_ << "step,episodes,mean_return,loss," << explore_name << "\n";
  }
  void row(int step, int episodes, double mean_return, double loss, double explore) {
    if (!out_.is_open()) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%d,%.6f,%.6f,%.6f\n", step, episodes, mean_return,
                  loss, explore);
    out_ << buf;
  }

 private:
  std::ofstream out_;
};

class ReturnWindow {
 public:
  void push(double r) {
    returns_.push_back(r);
    if (returns_.size() > 20) returns_.pop_front();
  }
  double mean() const {
    if (returns_.empty()) return 0.0;
    double s = 0.0;
    for (double r : returns_) s += r;
    return s / static_cast<double>(returns_.size());
  }

 private:
  std::deque<double> returns_;
};

struct Transition {
  Vec2 s;
  int a = 0;
  double r = 0.0;
  Vec2 s2;
  bool terminal = false;
};

std::unique_ptr<QPolicy> train_value_policy(const Env& env, const TrainConfig& cfg,
                                            const RegionTask* task, const Policy* warm_start,
                                            const std::string& metrics_path) {
  const std::vector<double> actions = env.action_values();
  const int n_actions = static_cast<int>(actions.size());
  const int total = cfg.defaulted_total_steps(env);
  Rng rng(splitmix64(cfg.seed ^ 0x51a7e9f0c3b2d1e4ULL));

  Mlp net;
  if (warm_start) {
    const auto* qp = dynamic_cast<const QPolicy*>(warm_start);
    if (!qp) throw InvalidArgument("warm start policy kind does not match the action set");
    net = qp->net;
  } else {
    std::vector<int> dims{2};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(n_actions);
    net = make_mlp(dims, rng);
  }
  Mlp target = net;
  AdamOptimizer opt(cfg.defaulted_learning_rate(env));

  std::vector<Transition> buffer;
  buffer.reserve(std::min(cfg.buffer_capacity, total));
  size_t write_pos = 0;

  MetricsLog log(metrics_path, "epsilon");
  ReturnWindow window;
  int episodes = 0, ep_len = 0;
  double ep_return = 0.0, loss_acc = 0.0;
  int loss_count = 0;
  Vec2 state = reset_state(env, task, rng);

  const double anneal_steps = std::max(1.0, cfg.eps_fraction * total);
  for (int step = 0; step < total; ++step) {
    double eps =
        cfg.eps_start + (cfg.eps_end - cfg.eps_start) * std::min(1.0, step / anneal_steps);
    int a;
    if (rng.uniform01() < eps) {
      a = rng.uniform_int(0, n_actions - 1);
    } else {
      VectorXd q = forward(net, normalize_obs(env, state));
      a = 0;
      for (int i = 1; i < n_actions; ++i)
        if (q[i] > q[a]) a = i;
    }
    StepResult res = step_task(env, task, state, actions[a]);
    ++ep_len;
    ep_return += res.reward;
    Transition tr{state, a, res.reward, res.state, res.terminated};
    if (buffer.size() < static_cast<size_t>(cfg.buffer_capacity)) {
      buffer.push_back(tr);
    } else {
      buffer[write_pos] = tr;
      write_pos = (write_pos + 1) % buffer.size();
    }
    if (res.terminated || ep_len >= env.max_steps()) {
      window.push(ep_return);
      ++episodes;
      ep_len = 0;
      ep_return = 0.0;
      state = reset_state(env, task, rng);
    } else {
      state = res.state;
    }

    if (step >= cfg.learning_starts && step % cfg.train_freq == 0 &&
        buffer.size() >= static_cast<size_t>(cfg.batch_size)) {
      const int b = cfg.batch_size;
      MatrixXd xs(2, b), xs2(2, b);
      std::vector<const Transition*> batch(b);
      for (int j = 0; j < b; ++j) {
        batch[j] = &buffer[rng.uniform_int(0, static_cast<int>(buffer.size()) - 1)];
        xs.col(j) = normalize_obs(env, batch[j]->s);
        xs2.col(j) = normalize_obs(env, batch[j]->s2);
      }
      BatchTape tape;
      MatrixXd q = forward(net, xs, &tape);
      MatrixXd qn = forward(target, xs2);
      MatrixXd out_grad = MatrixXd::Zero(n_actions, b);
      double loss = 0.0;
      for (int j = 0; j < b; ++j) {
        double bootstrap = batch[j]->terminal ? 0.0 : qn.col(j).maxCoeff();
        double y = batch[j]->r + cfg.gamma * bootstrap;
        double e = q(batch[j]->a, j) - y;
        // Huber with unit threshold
        loss += std::abs(e) <= 1.0 ? 0.5 * e * e : std::abs(e) - 0.5;
        out_grad(batch[j]->a, j) = clamp(e, -1.0, 1.0) / b;
      }
      Gradients grads = backward(net, tape, out_grad);
      opt.apply(net, grads);
      loss_acc += loss / b;
      ++loss_count;
    }
    if (step % cfg.target_sync == 0) target = net;
    if (step % 2000 == 0 || step + 1 == total) {
      log.row(step, episodes, window.mean(), loss_count ? loss_acc / loss_count : 0.0, eps);
      loss_acc = 0.0;
      loss_count = 0;
    }
  }

  auto policy = std::make_unique<QPolicy>(std::move(net), actions);
  policy->obs_offset = env.obs_offset();
  policy->obs_scale = env.obs_scale();
  return policy;
}

struct PpoSample {
  Vec2 s;
  double a = 0.0;     // raw (pre-clamp) action
  double logp = 0.0;
  double value = 0.0;
  double reward = 0.0;
  double vnext = 0.0;  // bootstrap value; 0 on true terminal
  bool done = false;   // episode boundary (terminal or truncation)
};

std::unique_ptr<GaussianPolicy> train_gaussian_policy(const Env& env, const TrainConfig& cfg,
                                                      const RegionTask* task,
                                                      const Policy* warm_start,
                                                      const std::string& metrics_path) {
  const int total = cfg.defaulted_total_steps(env);
  Rng rng(splitmix64(cfg.seed ^ 0x9e3779b97f4a7c15ULL));

  Mlp mean_net, value_net;
  if (warm_start) {
    const auto* gp = dynamic_cast<const GaussianPolicy*>(warm_start);
    if (!gp) throw InvalidArgument("warm start policy kind does not match the action space");
    mean_net = gp->mean_net;
    value_net = gp->value_net;
  } else {
    std::vector<int> dims{2};
    dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
    dims.push_back(1);
    mean_net = make_mlp(dims, rng);
    value_net = make_mlp(dims, rng);
  }
  double log_std = 0.0;
  AdamOptimizer opt_mean(cfg.defaulted_learning_rate(env));
  AdamOptimizer opt_value(cfg.defaulted_learning_rate(env));
  double ls_m = 0.0, ls_v = 0.0;
  long ls_t = 0;

  MetricsLog log(metrics_path, "clip_fraction");
  ReturnWindow window;
  int episodes = 0, steps_done = 0, ep_len = 0;
  double ep_return = 0.0;
  Vec2 state = reset_state(env, task, rng);
  const double log2pi = std::log(2.0 * kPi);

  while (steps_done < total) {
    const int horizon = std::min(cfg.rollout_steps, total - steps_done);
    std::vector<PpoSample> buf(horizon);
    for (int t = 0; t < horizon; ++t) {
      VectorXd nv = normalize_obs(env, state);
      double mu = forward(mean_net, nv)[0];
      double sigma = std::exp(log_std);
      double a = mu + sigma * rng.normal();
      PpoSample& ps = buf[t];
      ps.s = state;
      ps.a = a;
      ps.logp = -0.5 * ((a - mu) / sigma) * ((a - mu) / sigma) - log_std - 0.5 * log2pi;
      ps.value = forward(value_net, nv)[0];
      StepResult res = step_task(env, task, state, a);
      ps.reward = res.reward;
      ++ep_len;
      ep_return += res.reward;
      bool truncated = !res.terminated && (ep_len >= env.max_steps() || t + 1 == horizon);
      ps.done = res.terminated || truncated;
      if (res.terminated) {
        ps.vnext = 0.0;
      } else if (truncated) {
        ps.vnext = forward(value_net, normalize_obs(env, res.state))[0];
      }
      if (res.terminated || ep_len >= env.max_steps()) {
        window.push(ep_return);
        ++episodes;
        ep_len = 0;
        ep_return = 0.0;
        state = reset_state(env, task, rng);
      } else {
        state = res.state;
      }
    }
    // fill continuation bootstraps, then generalized advantages
    for (int t = 0; t + 1 < horizon; ++t)
      if (!buf[t].done) buf[t].vnext = buf[t + 1].value;
    std::vector<double> adv(horizon), ret(horizon);
    double acc = 0.0;
    for (int t = horizon - 1; t >= 0; --t) {
      double delta = buf[t].reward + cfg.gamma * buf[t].vnext - buf[t].value;
      acc = delta + cfg.gamma * cfg.gae_lambda * (buf[t].done ? 0.0 : acc);
      adv[t] = acc;
      ret[t] = acc + buf[t].value;
    }

    std::vector<int> order(horizon);
    for (int i = 0; i < horizon; ++i) order[i] = i;
    double loss_acc = 0.0, clip_frac = 0.0;
    int update_count = 0;
    for (int epoch = 0; epoch < cfg.update_epochs; ++epoch) {
      for (int i = horizon - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(0, i)]);
      for (int start = 0; start + cfg.batch_size <= horizon; start += cfg.batch_size) {
        const int b = cfg.batch_size;
        MatrixXd xs(2, b);
        double adv_mean = 0.0;
        for (int j = 0; j < b; ++j) {
          xs.col(j) = normalize_obs(env, buf[order[start + j]].s);
          adv_mean += adv[order[start + j]];
        }
        adv_mean /= b;
        double adv_var = 0.0;
        for (int j = 0; j < b; ++j) {
          double d = adv[order[start + j]] - adv_mean;
          adv_var += d * d;
        }
        double adv_std = std::sqrt(adv_var / b) + 1e-8;

        BatchTape tape_m, tape_v;
        MatrixXd mu = forward(mean_net, xs, &tape_m);
        MatrixXd val = forward(value_net, xs, &tape_v);
        MatrixXd grad_mu(1, b), grad_val(1, b);
        double sigma = std::exp(log_std);
        double g_logstd = 0.0, loss_pi = 0.0, loss_v = 0.0;
        int clipped = 0;
        for (int j = 0; j < b; ++j) {
          const PpoSample& ps = buf[order[start + j]];
          double a_hat = (adv[order[start + j]] - adv_mean) / adv_std;
          double z = (ps.a - mu(0, j)) / sigma;
          double logp = -0.5 * z * z - log_std - 0.5 * log2pi;
          double ratio = std::exp(logp - ps.logp);
          double lo = 1.0 - cfg.clip_ratio, hi = 1.0 + cfg.clip_ratio;
          double surr = std::min(ratio * a_hat, clamp(ratio, lo, hi) * a_hat);
          loss_pi -= surr / b;
          bool active = (a_hat >= 0.0 && ratio <= hi) || (a_hat < 0.0 && ratio >= lo);
          if (ratio < lo || ratio > hi) ++clipped;
          double dl_dlogp = active ? -a_hat * ratio / b : 0.0;
          grad_mu(0, j) = dl_dlogp * z / sigma;  // dlogp/dmu = z/sigma
          g_logstd += dl_dlogp * (z * z - 1.0);
          double ev = val(0, j) - ret[order[start + j]];
          loss_v += 0.5 * ev * ev / b;
          grad_val(0, j) = cfg.vf_coef * ev / b;
        }
        g_logstd -= cfg.ent_coef;  // entropy bonus: dH/dlog_std = 1
        Gradients gm = backward(mean_net, tape_m, grad_mu);
        Gradients gv = backward(value_net, tape_v, grad_val);
        double norm = std::sqrt(gm.squared_norm() + gv.squared_norm() + g_logstd * g_logstd);
        if (norm > cfg.max_grad_norm && norm > 0.0) {
          double s = cfg.max_grad_norm / norm;
          gm.scale(s);
          gv.scale(s);
          g_logstd *= s;
        }
        opt_mean.apply(mean_net, gm);
        opt_value.apply(value_net, gv);
        ++ls_t;
        ls_m = 0.9 * ls_m + 0.1 * g_logstd;
        ls_v = 0.999 * ls_v + 0.001 * g_logstd * g_logstd;
        double c1 = 1.0 - std::pow(0.9, static_cast<double>(ls_t));
        double c2 = 1.0 - std::pow(0.999, static_cast<double>(ls_t));
        log_std -= opt_mean.learning_rate() * (ls_m / c1) / (std::sqrt(ls_v / c2) + 1e-8);
        log_std = clamp(log_std, -5.0, 2.0);

        loss_acc += loss_pi + cfg.vf_coef * loss_v;
        clip_frac += static_cast<double>(clipped) / b;
        ++update_count;
      }
    }
    steps_done += horizon;
    log.row(steps_done, episodes, window.mean(), update_count ? loss_acc / update_count : 0.0,
            update_count ? clip_frac / update_count : 0.0);
  }

  auto policy = std::make_unique<GaussianPolicy>(std::move(mean_net), std::move(value_net),
                                                 env.action_low(), env.action_high());
  policy->log_std = log_std;
  policy->obs_offset = env.obs_offset();
  policy->obs_scale = env.obs_scale();
  return policy;
}

}  // namespace

int TrainConfig::defaulted_total_steps(const Env& env) const {
  if (total_steps > 0) return total_steps;
  return env.discrete_actions() ? 100000 : 150000;
}

double TrainConfig::defaulted_learning_rate(const Env& env) const {
  if (learning_rate > 0) return learning_rate;
  return env.discrete_actions() ? 1e-3 : 3e-4;
}

std::vector<Vec2> eval_initial_states(const Env& env, const Region* region, int count) {
  std::vector<Vec2> out;
  Grid grid = env.make_grid();
  if (grid.kind == Grid::Kind::angular) {
    double lo = 0.0, hi = kTwoPi;
    if (region) {
      auto intervals = region->angular_intervals();
      if (intervals.empty()) throw InvalidArgument("empty region has no evaluation states");
      lo = intervals[0].first;
      hi = intervals[0].second;
      for (const auto& iv : intervals)
        if (iv.second - iv.first > hi - lo) {
          lo = iv.first;
          hi = iv.second;
        }
    }
    for (int k = 1; k <= count; ++k)
      out.push_back(unit_from_angle(lo + k * (hi - lo) / (count + 1)));
    return out;
  }
  if (!region) {
    for (int k = 1; k <= count; ++k)
      out.push_back({grid.x0, grid.y0 + k * (grid.y1 - grid.y0) / (count + 1)});
    return out;
  }
  std::vector<int> column;
  for (int iy = 0; iy < grid.ny; ++iy) {
    int idx = iy * grid.nx;
    if (region->contains_cell(idx)) column.push_back(idx);
  }
  if (column.empty()) throw InvalidArgument("region has no cells on the entry column");
  int n = static_cast<int>(column.size());
  for (int k = 0; k < std::min(count, n); ++k) {
    int pick = n <= count ? k : (k * (n - 1)) / (count - 1);
    Vec2 c = grid.cell_center(column[pick]);
    out.push_back({grid.x0, c.y});
  }
  return out;
}

Rollout run_task_episode(const Env& env, const Policy& policy, const RegionTask* task,
                         const Vec2& x0) {
  Rollout r;
  Vec2 state = x0;
  r.states.push_back(state);
  r.cause = TerminationCause::horizon;
  for (int k = 0; k < env.max_steps(); ++k) {
    double u = policy.act(state);
    StepResult res = step_task(env, task, state, u);
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

EvalReport evaluate_policy(const Env& env, const Policy& policy, const RegionTask* task,
                           int episodes) {
  EvalReport rep;
  const Region* region = task ? &task->region : nullptr;
  for (const Vec2& x0 : eval_initial_states(env, region, episodes)) {
    Rollout r = run_task_episode(env, policy, task, x0);
    ++rep.episodes;
    if (r.cause == TerminationCause::reached) ++rep.reached;
    rep.mean_return += r.total_reward();
  }
  if (rep.episodes > 0) rep.mean_return /= rep.episodes;
  return rep;
}

std::unique_ptr<Policy> train_policy(const Env& env, const TrainConfig& cfg,
                                     const RegionTask* task, const Policy* warm_start,
                                     const std::string& metrics_csv_path) {
  std::unique_ptr<Policy> policy;
  if (env.discrete_actions()) {
    policy = train_value_policy(env, cfg, task, warm_start, metrics_csv_path);
  } else {
    policy = train_gaussian_policy(env, cfg, task, warm_start, metrics_csv_path);
  }
  EvalReport rep = evaluate_policy(env, *policy, task, cfg.eval_episodes);
  if (rep.rate() < cfg.eval_pass_rate) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "trained policy reached the setpoint in %d/%d evaluation episodes "
                  "(%.0f%% required)",
                  rep.reached, rep.episodes, 100.0 * cfg.eval_pass_rate);
    throw TrainingFailed(msg, rep.rate());
  }
  return policy;
}

}  // namespace hyrl
