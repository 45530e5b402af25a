#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hyrl/config.hpp"
#include "hyrl/errors.hpp"

namespace {

using namespace hyrl;

struct CommonArgs {
  std::string config_path;
  std::string env_name;
  std::string output_dir;
  uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON configuration file");
  cmd->add_option("--env", args.env_name, "environment: unit_circle or obstacle");
  cmd->add_option("--output", args.output_dir, "artifact directory");
  cmd->add_option("--seed", args.seed, "master seed")->each([&args](const std::string&) {
    args.seed_set = true;
  });
}

AppSetup setup_from(const CommonArgs& args) {
  return configure(args.config_path, args.env_name, args.output_dir,
                   args.seed_set ? &args.seed : nullptr);
}

std::string artifact(const AppConfig& cfg, const std::string& name) {
  return cfg.output_dir + "/" + name;
}

void snapshot(const AppConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  save_config_snapshot(cfg, artifact(cfg, "config.json"));
}

void print_compare(const std::vector<CompareCase>& cases) {
  std::printf("%-22s %-10s %-22s %-22s\n", "x0", "baseline", "hybrid q0 (t, jumps)",
              "hybrid q1 (t, jumps)");
  for (const CompareCase& c : cases) {
    char x0[32], h0[32], h1[32];
    std::snprintf(x0, sizeof(x0), "(%.3f, %.3f)", c.x0.x, c.x0.y);
    std::snprintf(h0, sizeof(h0), "%s (%.1fs, %d)", to_string(c.hybrid_q0).c_str(),
                  c.hybrid_q0_time, c.jumps_q0);
    std::snprintf(h1, sizeof(h1), "%s (%.1fs, %d)", to_string(c.hybrid_q1).c_str(),
                  c.hybrid_q1_time, c.jumps_q1);
    std::printf("%-22s %-10s %-22s %-22s\n", x0, to_string(c.baseline).c_str(), h0, h1);
  }
}

int cmd_train(const CommonArgs& args) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  auto policy = train_policy(*s.env, s.config.pipeline.train, nullptr, nullptr,
                             artifact(s.config, "metrics_baseline.csv"));
  save_policy(*policy, artifact(s.config, "policy.json"));
  EvalReport rep = evaluate_policy(*s.env, *policy, nullptr);
  std::printf("baseline policy: %d/%d evaluation episodes reached the setpoint "
              "(mean return %.3f)\n",
              rep.reached, rep.episodes, rep.mean_return);
  std::printf("saved %s\n", artifact(s.config, "policy.json").c_str());
  return 0;
}

int cmd_find_critical(const CommonArgs& args) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  auto policy = load_policy(artifact(s.config, "policy.json"));
  CriticalSet critical = find_critical_set(*s.env, *policy, s.config.pipeline.critical);
  if (critical.region.empty()) throw TopologyError("no cell splits the closed-loop behavior");
  critical.region.save(artifact(s.config, "critical.region"));
  save_critical_witnesses(critical, artifact(s.config, "critical_witnesses.json"));
  BehaviorPartition part = partition_regions(critical.region);
  part.m0.save(artifact(s.config, "m0.region"));
  part.m1.save(artifact(s.config, "m1.region"));
  std::printf("critical set: %s\n", critical.region.summary().c_str());
  std::printf("m0: %s\n", part.m0.summary().c_str());
  std::printf("m1: %s\n", part.m1.summary().c_str());
  return 0;
}

int cmd_extend(const CommonArgs& args) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  auto policy = load_policy(artifact(s.config, "policy.json"));
  CriticalSet critical = load_critical_set(artifact(s.config, "critical.region"),
                                           artifact(s.config, "critical_witnesses.json"));
  Region m0 = Region::load(artifact(s.config, "m0.region"));
  Region m1 = Region::load(artifact(s.config, "m1.region"));
  ExtendedRegion e0 = extend_region(*s.env, *policy, m0, critical.region,
                                    s.config.pipeline.extension);
  ExtendedRegion e1 = extend_region(*s.env, *policy, m1, critical.region,
                                    s.config.pipeline.extension);
  double width = require_overlap(e0.region, e1.region, &critical.region,
                                 s.config.pipeline.extension.min_overlap);
  e0.region.save(artifact(s.config, "m0ext.region"));
  e1.region.save(artifact(s.config, "m1ext.region"));
  std::printf("m0ext: %s\n", e0.region.summary().c_str());
  std::printf("m1ext: %s\n", e1.region.summary().c_str());
  std::printf("overlap width across the critical set: %.4f\n", width);
  return 0;
}

int cmd_hybridize(const CommonArgs& args) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  PipelineResult res = run_pipeline(*s.env, s.config.pipeline, s.config.output_dir, 5);
  std::printf("pi0, pi1 retrained and saved under %s\n", s.config.output_dir.c_str());
  print_compare(res.compare);
  return 0;
}

int cmd_pipeline(const CommonArgs& args, int resume_from) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  PipelineResult res = run_pipeline(*s.env, s.config.pipeline, s.config.output_dir,
                                    resume_from);
  std::printf("critical set: %s\n", res.critical.region.summary().c_str());
  std::printf("m0ext: %s\n", res.ext0.region.summary().c_str());
  std::printf("m1ext: %s\n", res.ext1.region.summary().c_str());
  std::printf("overlap width across the critical set: %.4f\n", res.overlap_width);
  print_compare(res.compare);
  std::printf("artifacts written to %s\n", s.config.output_dir.c_str());
  return 0;
}

struct SimulateArgs {
  std::string controller = "hybrid";
  double theta = -1.0;
  double x = 0.0, y = 0.0;
  int q0 = 0;
  double duration = 0.0;
  std::string noise_mode = "none";
  std::string noise_file;
  std::string out_csv;
};

int cmd_simulate(const CommonArgs& args, const SimulateArgs& sim) {
  AppSetup s = setup_from(args);
  const Env& env = *s.env;
  Vec2 x0{sim.x, sim.y};
  if (sim.theta >= 0.0) x0 = unit_from_angle(sim.theta);
  double duration = sim.duration > 0.0 ? sim.duration : default_compare_duration(env);
  int steps = static_cast<int>(std::lround(duration / env.dt()));

  std::vector<double> noise;
  if (sim.noise_mode == "recorded") {
    if (sim.noise_file.empty()) throw InvalidArgument("recorded noise needs --noise-file");
    noise = load_noise(sim.noise_file);
  } else if (sim.noise_mode == "adversarial") {
    auto baseline = load_policy(artifact(s.config, "policy.json"));
    CriticalSet critical = load_critical_set(artifact(s.config, "critical.region"),
                                             artifact(s.config, "critical_witnesses.json"));
    NoiseConfig nc = s.config.pipeline.noise;
    nc.mode = "adversarial";
    noise = record_adversarial_noise(env, *baseline, x0, steps, critical, nc).noise;
  } else {
    NoiseConfig nc = s.config.pipeline.noise;
    nc.mode = sim.noise_mode;
    noise = make_noise(env, nc, steps);
  }

  Trajectory tr;
  if (sim.controller == "baseline") {
    auto policy = load_policy(artifact(s.config, "policy.json"));
    tr = rollout_trajectory(env, run_rollout(env, *policy, x0, steps, &noise));
  } else if (sim.controller == "hybrid") {
    std::shared_ptr<const Policy> pi0 = load_policy(artifact(s.config, "pi0.json"));
    std::shared_ptr<const Policy> pi1 = load_policy(artifact(s.config, "pi1.json"));
    Region m0ext = Region::load(artifact(s.config, "m0ext.region"));
    Region m1ext = Region::load(artifact(s.config, "m1ext.region"));
    HybridSystem hybrid(env, pi0, pi1, m0ext, m1ext);
    tr = hybrid.solve(x0, sim.q0, duration, noise);
  } else {
    throw InvalidArgument("controller must be hybrid or baseline");
  }

  std::string out = sim.out_csv.empty() ? artifact(s.config, "trajectory.csv") : sim.out_csv;
  std::filesystem::create_directories(s.config.output_dir);
  save_trajectory_csv(tr, out);
  Outcome oc = classify_trajectory(tr, s.config.pipeline.stuck);
  std::printf("%s run from (%.3f, %.3f): %s after %.1fs, %d mode switches\n",
              sim.controller.c_str(), x0.x, x0.y, to_string(oc).c_str(), tr.final_time,
              tr.jump_count);
  std::printf("trajectory written to %s\n", out.c_str());
  return 0;
}

int cmd_compare(const CommonArgs& args) {
  AppSetup s = setup_from(args);
  snapshot(s.config);
  PipelineResult res = run_pipeline(*s.env, s.config.pipeline, s.config.output_dir, 7);
  print_compare(res.compare);
  return 0;
}

int cmd_inspect_region(const std::string& file) {
  Region region = Region::load(file);
  std::printf("%s\n", region.summary().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid policy training and evaluation for setpoint tasks with a "
               "topological obstruction"};
  app.require_subcommand(1);

  CommonArgs train_args, critical_args, extend_args, hybridize_args, pipeline_args,
      simulate_args, compare_args;
  SimulateArgs sim;
  int resume_from = 1;
  std::string region_file;

  add_common(app.add_subcommand("train", "train the baseline policy"), train_args);
  add_common(app.add_subcommand("find-critical",
                                "locate the split cells and partition the state space"),
             critical_args);
  add_common(app.add_subcommand("extend", "grow both regions across the split"),
             extend_args);
  add_common(app.add_subcommand("hybridize",
                                "retrain one policy per region and assemble the "
                                "switching loop"),
             hybridize_args);
  CLI::App* pipeline = app.add_subcommand("pipeline", "run every step end to end");
  add_common(pipeline, pipeline_args);
  pipeline->add_option("--resume-from", resume_from,
                       "first step to run: 1 train, 2 critical, 3 partition, 4 extend, "
                       "5 retrain, 6 assemble, 7 compare")
      ->check(CLI::Range(1, 7));
  CLI::App* simulate = app.add_subcommand("simulate", "run one closed-loop episode");
  add_common(simulate, simulate_args);
  simulate->add_option("--controller", sim.controller, "hybrid or baseline");
  simulate->add_option("--theta", sim.theta, "initial angle in radians (circle)");
  simulate->add_option("--x", sim.x, "initial x");
  simulate->add_option("--y", sim.y, "initial y");
  simulate->add_option("--q0", sim.q0, "initial mode")->check(CLI::Range(0, 1));
  simulate->add_option("--duration", sim.duration, "flow time in seconds");
  simulate->add_option("--noise", sim.noise_mode, "none, uniform, adversarial, or recorded");
  simulate->add_option("--noise-file", sim.noise_file, "recorded noise file");
  simulate->add_option("--out", sim.out_csv, "trajectory CSV path");
  add_common(app.add_subcommand("compare",
                                "baseline vs hybrid under recorded worst-case noise"),
             compare_args);
  CLI::App* inspect = app.add_subcommand("inspect-region", "print a region file summary");
  inspect->add_option("file", region_file, "region file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand("train")) return cmd_train(train_args);
    if (app.got_subcommand("find-critical")) return cmd_find_critical(critical_args);
    if (app.got_subcommand("extend")) return cmd_extend(extend_args);
    if (app.got_subcommand("hybridize")) return cmd_hybridize(hybridize_args);
    if (app.got_subcommand("pipeline")) return cmd_pipeline(pipeline_args, resume_from);
    if (app.got_subcommand("simulate")) return cmd_simulate(simulate_args, sim);
    if (app.got_subcommand("compare")) return cmd_compare(compare_args);
    if (app.got_subcommand("inspect-region")) return cmd_inspect_region(region_file);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
