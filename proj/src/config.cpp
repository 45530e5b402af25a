#include "hyrl/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw InvalidArgument("unknown config key " + where + "." + key);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

const std::vector<std::string> kTrainKeys = {
    "gamma",         "learning_rate", "batch_size",   "total_steps",     "seed",
    "hidden",        "eval_pass_rate", "eval_episodes", "buffer_capacity", "target_sync",
    "eps_start",     "eps_end",       "eps_fraction", "train_freq",      "learning_starts",
    "rollout_steps", "update_epochs", "clip_ratio",   "gae_lambda",      "vf_coef",
    "ent_coef",      "max_grad_norm"};

void apply_train(const json& j, TrainConfig& cfg, const std::string& where) {
  check_keys(j, kTrainKeys, where);
  read(j, "gamma", cfg.gamma);
  read(j, "learning_rate", cfg.learning_rate);
  read(j, "batch_size", cfg.batch_size);
  read(j, "total_steps", cfg.total_steps);
  read(j, "seed", cfg.seed);
  read(j, "hidden", cfg.hidden);
  read(j, "eval_pass_rate", cfg.eval_pass_rate);
  read(j, "eval_episodes", cfg.eval_episodes);
  read(j, "buffer_capacity", cfg.buffer_capacity);
  read(j, "target_sync", cfg.target_sync);
  read(j, "eps_start", cfg.eps_start);
  read(j, "eps_end", cfg.eps_end);
  read(j, "eps_fraction", cfg.eps_fraction);
  read(j, "train_freq", cfg.train_freq);
  read(j, "learning_starts", cfg.learning_starts);
  read(j, "rollout_steps", cfg.rollout_steps);
  read(j, "update_epochs", cfg.update_epochs);
  read(j, "clip_ratio", cfg.clip_ratio);
  read(j, "gae_lambda", cfg.gae_lambda);
  read(j, "vf_coef", cfg.vf_coef);
  read(j, "ent_coef", cfg.ent_coef);
  read(j, "max_grad_norm", cfg.max_grad_norm);
}

json train_to_json(const TrainConfig& cfg) {
  return {{"gamma", cfg.gamma},
          {"learning_rate", cfg.learning_rate},
          {"batch_size", cfg.batch_size},
          {"total_steps", cfg.total_steps},
          {"seed", cfg.seed},
          {"hidden", cfg.hidden},
          {"eval_pass_rate", cfg.eval_pass_rate},
          {"eval_episodes", cfg.eval_episodes},
          {"buffer_capacity", cfg.buffer_capacity},
          {"target_sync", cfg.target_sync},
          {"eps_start", cfg.eps_start},
          {"eps_end", cfg.eps_end},
          {"eps_fraction", cfg.eps_fraction},
          {"train_freq", cfg.train_freq},
          {"learning_starts", cfg.learning_starts},
          {"rollout_steps", cfg.rollout_steps},
          {"update_epochs", cfg.update_epochs},
          {"clip_ratio", cfg.clip_ratio},
          {"gae_lambda", cfg.gae_lambda},
          {"vf_coef", cfg.vf_coef},
          {"ent_coef", cfg.ent_coef},
          {"max_grad_norm", cfg.max_grad_norm}};
}

}  // namespace

AppSetup configure(const std::string& config_path, const std::string& env_override,
                   const std::string& output_override, const uint64_t* seed_override) {
  json j = json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config file " + config_path);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidArgument(config_path + ": " + e.what());
    }
  }
  check_keys(j, {"environment", "seed", "output_dir", "train", "retrain", "critical",
                 "extend", "noise", "harness"},
             "config");

  AppSetup setup;
  AppConfig& cfg = setup.config;
  read(j, "environment", cfg.environment);
  read(j, "seed", cfg.seed);
  read(j, "output_dir", cfg.output_dir);
  if (!env_override.empty()) cfg.environment = env_override;
  if (seed_override) cfg.seed = *seed_override;
  if (!output_override.empty()) cfg.output_dir = output_override;

  setup.env = make_env(cfg.environment);
  cfg.pipeline = default_pipeline_config(*setup.env, cfg.seed);

  if (j.contains("train")) apply_train(j.at("train"), cfg.pipeline.train, "train");
  if (j.contains("retrain")) apply_train(j.at("retrain"), cfg.pipeline.retrain, "retrain");
  if (j.contains("critical")) {
    const json& c = j.at("critical");
    check_keys(c, {"probe_radius", "divergence_time"}, "critical");
    read(c, "probe_radius", cfg.pipeline.critical.probe_radius);
    read(c, "divergence_time", cfg.pipeline.critical.divergence_time);
  }
  if (j.contains("extend")) {
    const json& e = j.at("extend");
    check_keys(e, {"horizon", "min_overlap"}, "extend");
    read(e, "horizon", cfg.pipeline.extension.horizon);
    read(e, "min_overlap", cfg.pipeline.extension.min_overlap);
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    check_keys(n, {"mode", "bound", "seed", "margin"}, "noise");
    read(n, "mode", cfg.pipeline.noise.mode);
    read(n, "bound", cfg.pipeline.noise.bound);
    read(n, "seed", cfg.pipeline.noise.seed);
    read(n, "margin", cfg.pipeline.noise.margin);
    if (cfg.pipeline.noise.mode != "none" && cfg.pipeline.noise.mode != "uniform" &&
        cfg.pipeline.noise.mode != "adversarial")
      throw InvalidArgument("noise.mode must be none, uniform, or adversarial");
  }
  if (j.contains("harness")) {
    const json& h = j.at("harness");
    check_keys(h, {"stuck_window", "stuck_threshold", "compare_duration"}, "harness");
    read(h, "stuck_window", cfg.pipeline.stuck.window);
    read(h, "stuck_threshold", cfg.pipeline.stuck.threshold);
    read(h, "compare_duration", cfg.pipeline.compare_duration);
  }
  cfg.pipeline.seed = cfg.seed;
  return setup;
}

void save_config_snapshot(const AppConfig& cfg, const std::string& path) {
  json j;
  j["environment"] = cfg.environment;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["train"] = train_to_json(cfg.pipeline.train);
  j["retrain"] = train_to_json(cfg.pipeline.retrain);
  j["critical"] = {{"probe_radius", cfg.pipeline.critical.probe_radius},
                   {"divergence_time", cfg.pipeline.critical.divergence_time}};
  j["extend"] = {{"horizon", cfg.pipeline.extension.horizon},
                 {"min_overlap", cfg.pipeline.extension.min_overlap}};
  j["noise"] = {{"mode", cfg.pipeline.noise.mode},
                {"bound", cfg.pipeline.noise.bound},
                {"seed", cfg.pipeline.noise.seed},
                {"margin", cfg.pipeline.noise.margin}};
  j["harness"] = {{"stuck_window", cfg.pipeline.stuck.window},
                  {"stuck_threshold", cfg.pipeline.stuck.threshold},
                  {"compare_duration", cfg.pipeline.compare_duration}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << "\n";
}

}  // namespace hyrl
