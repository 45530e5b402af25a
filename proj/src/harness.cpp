#include "hyrl/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

std::string ic_label(int i) { return "compare_ic" + std::to_string(i); }

nlohmann::json vec_json(const Vec2& v) { return {v.x, v.y}; }

nlohmann::json eval_json(const EvalReport& rep) {
  return {{"episodes", rep.episodes},
          {"reached", rep.reached},
          {"mean_return", rep.mean_return}};
}

}  // namespace

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::reached: return "reached";
    case Outcome::crashed: return "crashed";
    case Outcome::stuck: return "stuck";
    case Outcome::other: return "other";
  }
  throw InvalidArgument("unknown outcome");
}

Outcome classify_trajectory(const Trajectory& tr, const StuckCriterion& sc) {
  if (tr.cause == TerminationCause::reached) return Outcome::reached;
  if (tr.cause == TerminationCause::crashed) return Outcome::crashed;
  if (tr.cause == TerminationCause::horizon && !tr.samples.empty()) {
    double t0 = tr.final_time - sc.window;
    Vec2 start = tr.samples.front().xi;
    for (const TrajectorySample& s : tr.samples) {
      if (s.t <= t0 + 1e-12) start = s.xi;
    }
    if (distance(start, tr.final_state) < sc.threshold) return Outcome::stuck;
  }
  return Outcome::other;
}

PipelineConfig default_pipeline_config(const Env& env, uint64_t seed) {
  PipelineConfig cfg;
  cfg.seed = seed;
  cfg.train.seed = splitmix64(seed + 1);
  cfg.retrain = cfg.train;
  cfg.retrain.seed = splitmix64(seed + 2);
  if (env.discrete_actions()) {
    cfg.retrain.total_steps = 50000;
    cfg.retrain.eps_start = 0.3;  // warm start: resume with mostly decayed exploration
  } else {
    cfg.retrain.total_steps = 100000;
  }
  return cfg;
}

std::vector<Vec2> compare_initial_states(const Env& env) {
  if (env.make_grid().kind == Grid::Kind::angular) {
    std::vector<Vec2> out;
    for (double frac : {0.75, 0.9, 1.0, 1.1, 1.25}) out.push_back(unit_from_angle(frac * kPi));
    return out;
  }
  return {{0.0, 0.15}, {0.0, 0.055}, {0.0, 0.0}, {0.0, -0.055}, {0.0, -0.15}};
}

double default_compare_duration(const Env& env) {
  return env.make_grid().kind == Grid::Kind::angular ? 4.0 : 3.5;
}

bool sided_run_ok(const Env& env, const HybridSystem& hybrid, const Vec2& x0, int q0,
                  double duration, std::string* why) {
  Trajectory tr = hybrid.solve(x0, q0, duration);
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (tr.cause != TerminationCause::reached)
    return fail("run from mode " + std::to_string(q0) + " ended with " + to_string(tr.cause));
  if (tr.jump_count != 0)
    return fail("run from mode " + std::to_string(q0) + " switched modes " +
                std::to_string(tr.jump_count) + " times");
  Grid grid = env.make_grid();
  if (grid.kind == Grid::Kind::angular) {
    double net = 0.0;
    for (size_t i = 1; i < tr.samples.size(); ++i)
      net += angle_diff(angle_of(tr.samples[i].xi), angle_of(tr.samples[i - 1].xi));
    if ((q0 == 0 && net >= 0.0) || (q0 == 1 && net <= 0.0))
      return fail("mode " + std::to_string(q0) + " rotated the wrong way (net " +
                  format_double(net) + ")");
  } else if (grid.has_blocked) {
    for (const TrajectorySample& s : tr.samples) {
      if (s.xi.x < grid.bx0 || s.xi.x > grid.bx1) continue;
      if ((q0 == 0 && s.xi.y <= grid.by1) || (q0 == 1 && s.xi.y >= grid.by0))
        return fail("mode " + std::to_string(q0) + " did not pass the blocked box on its side");
    }
  }
  if (why) *why = "ok";
  return true;
}

PipelineResult run_pipeline(const Env& env, const PipelineConfig& cfg,
                            const std::string& output_dir, int resume_from) {
  if (resume_from < 1 || resume_from > 7)
    throw InvalidArgument("resume step must be between 1 and 7");
  std::filesystem::create_directories(output_dir);
  auto path = [&](const std::string& f) { return output_dir + "/" + f; };
  PipelineResult res;

  try {
    if (resume_from <= 1) {
      res.baseline =
          train_policy(env, cfg.train, nullptr, nullptr, path("metrics_baseline.csv"));
      save_policy(*res.baseline, path("policy.json"));
    } else {
      res.baseline = load_policy(path("policy.json"));
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(1, e.what());
  }

  try {
    if (resume_from <= 2) {
      res.critical = find_critical_set(env, *res.baseline, cfg.critical);
      if (res.critical.region.empty())
        throw TopologyError("no cell splits the closed-loop behavior");
      res.critical.region.save(path("critical.region"));
      save_critical_witnesses(res.critical, path("critical_witnesses.json"));
    } else {
      res.critical = load_critical_set(path("critical.region"), path("critical_witnesses.json"));
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(2, e.what());
  }

  try {
    if (resume_from <= 3) {
      res.partition = partition_regions(res.critical.region);
      res.partition.m0.save(path("m0.region"));
      res.partition.m1.save(path("m1.region"));
    } else {
      res.partition.m0 = Region::load(path("m0.region"));
      res.partition.m1 = Region::load(path("m1.region"));
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(3, e.what());
  }

  try {
    if (resume_from <= 4) {
      res.ext0 = extend_region(env, *res.baseline, res.partition.m0, res.critical.region,
                               cfg.extension);
      res.ext1 = extend_region(env, *res.baseline, res.partition.m1, res.critical.region,
                               cfg.extension);
      res.ext0.region.save(path("m0ext.region"));
      res.ext1.region.save(path("m1ext.region"));
    } else {
      res.ext0.region = Region::load(path("m0ext.region"));
      res.ext1.region = Region::load(path("m1ext.region"));
      res.ext0.added = res.ext0.region.difference(res.partition.m0);
      res.ext1.added = res.ext1.region.difference(res.partition.m1);
    }
    res.overlap_width = require_overlap(res.ext0.region, res.ext1.region,
                                        &res.critical.region, cfg.extension.min_overlap);
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(4, e.what());
  }

  try {
    for (int i = 0; i < 2; ++i) {
      const ExtendedRegion& ext = i == 0 ? res.ext0 : res.ext1;
      std::string tag = i == 0 ? "pi0" : "pi1";
      std::shared_ptr<const Policy>& slot = i == 0 ? res.pi0 : res.pi1;
      if (resume_from > 5) {
        slot = load_policy(path(tag + ".json"));
        continue;
      }
      RegionTask task;
      task.region = ext.region;
      task.ic_band = ext.added.unite(res.critical.region);
      TrainConfig rc = cfg.retrain;
      rc.seed = splitmix64(cfg.retrain.seed + 1 + i);
      std::shared_ptr<const Policy> net =
          train_policy(env, rc, &task, res.baseline.get(), path("metrics_" + tag + ".csv"));
      auto restricted = std::make_shared<RestrictedPolicy>(net, ext.region);
      save_policy(*restricted, path(tag + ".json"));
      slot = restricted;
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(5, e.what());
  }

  try {
    res.hybrid = std::make_unique<HybridSystem>(env, res.pi0, res.pi1, res.ext0.region,
                                                res.ext1.region);
    nlohmann::json j;
    j["format"] = "hybrid-system";
    j["version"] = 1;
    j["environment"] = env.name();
    j["regions"] = {{"m0ext", "m0ext.region"}, {"m1ext", "m1ext.region"}};
    j["policies"] = {{"pi0", "pi0.json"}, {"pi1", "pi1.json"}};
    j["overlap_width"] = res.overlap_width;
    std::ofstream out(path("hybrid.json"));
    if (!out) throw IoError("cannot write " + path("hybrid.json"));
    out << j.dump(1) << "\n";
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(6, e.what());
  }

  try {
    double duration =
        cfg.compare_duration > 0.0 ? cfg.compare_duration : default_compare_duration(env);
    int steps = static_cast<int>(std::lround(duration / env.dt()));
    std::vector<Vec2> ics = compare_initial_states(env);
    nlohmann::json cases = nlohmann::json::array();
    for (size_t i = 0; i < ics.size(); ++i) {
      AdversarialRun adv;
      if (cfg.noise.mode == "adversarial") {
        adv = record_adversarial_noise(env, *res.baseline, ics[i], steps, res.critical,
                                       cfg.noise);
      } else {
        adv.noise = make_noise(env, cfg.noise, steps);
        adv.rollout = run_rollout(env, *res.baseline, ics[i], steps, &adv.noise);
      }
      double bound = cfg.noise.bound > 0.0 ? cfg.noise.bound : env.noise_bound();
      save_noise(adv.noise, bound, path(ic_label(static_cast<int>(i)) + "_noise.json"));
      Trajectory base_tr = rollout_trajectory(env, adv.rollout);
      save_trajectory_csv(base_tr, path(ic_label(static_cast<int>(i)) + "_baseline.csv"));

      CompareCase cc;
      cc.x0 = ics[i];
      cc.baseline = classify_trajectory(base_tr, cfg.stuck);
      for (int q0 = 0; q0 < 2; ++q0) {
        Trajectory tr = res.hybrid->solve(ics[i], q0, duration, adv.noise);
        save_trajectory_csv(tr, path(ic_label(static_cast<int>(i)) + "_hybrid_q" +
                                     std::to_string(q0) + ".csv"));
        Outcome oc = classify_trajectory(tr, cfg.stuck);
        if (q0 == 0) {
          cc.hybrid_q0 = oc;
          cc.hybrid_q0_time = tr.final_time;
          cc.jumps_q0 = tr.jump_count;
        } else {
          cc.hybrid_q1 = oc;
          cc.hybrid_q1_time = tr.final_time;
          cc.jumps_q1 = tr.jump_count;
        }
      }
      res.compare.push_back(cc);
      cases.push_back({{"x0", vec_json(cc.x0)},
                       {"baseline", to_string(cc.baseline)},
                       {"hybrid_q0", to_string(cc.hybrid_q0)},
                       {"hybrid_q0_time", cc.hybrid_q0_time},
                       {"hybrid_q0_jumps", cc.jumps_q0},
                       {"hybrid_q1", to_string(cc.hybrid_q1)},
                       {"hybrid_q1_time", cc.hybrid_q1_time},
                       {"hybrid_q1_jumps", cc.jumps_q1}});
    }

    nlohmann::json sided = nlohmann::json::array();
    Grid grid = env.make_grid();
    std::vector<std::pair<Vec2, int>> sided_ics;
    if (grid.kind == Grid::Kind::angular) {
      sided_ics = {{unit_from_angle(0.9 * kPi), 0}, {unit_from_angle(1.1 * kPi), 1}};
    } else {
      sided_ics = {{{0.0, 0.055}, 0}, {{0.0, -0.055}, 1}};
    }
    for (const auto& [x0, q0] : sided_ics) {
      std::string why;
      bool ok = sided_run_ok(env, *res.hybrid, x0, q0, duration, &why);
      sided.push_back({{"x0", vec_json(x0)}, {"q0", q0}, {"ok", ok}, {"detail", why}});
    }

    nlohmann::json report;
    report["format"] = "hyrl-report";
    report["version"] = 1;
    report["environment"] = env.name();
    report["seed"] = cfg.seed;
    report["baseline_eval"] = eval_json(evaluate_policy(env, *res.baseline, nullptr));
    report["critical"] = {{"cells", res.critical.region.cell_count()},
                          {"summary", res.critical.region.summary()}};
    report["partition"] = {{"m0", res.partition.m0.summary()},
                           {"m1", res.partition.m1.summary()}};
    report["extension"] = {{"m0ext", res.ext0.region.summary()},
                           {"m1ext", res.ext1.region.summary()},
                           {"added0", res.ext0.added.cell_count()},
                           {"added1", res.ext1.added.cell_count()},
                           {"overlap_width", res.overlap_width}};
    report["compare"] = std::move(cases);
    report["sided"] = std::move(sided);
    std::ofstream out(path("report.json"));
    if (!out) throw IoError("cannot write " + path("report.json"));
    out << report.dump(1) << "\n";
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(7, e.what());
  }

  return res;
}

}  // namespace hyrl
