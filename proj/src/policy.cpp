#include "hyrl/policy.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

using nlohmann::json;

Eigen::VectorXd Policy::normalize(const Vec2& obs) const {
  Eigen::VectorXd v(2);
  v << (obs.x - obs_offset.x) * obs_scale.x, (obs.y - obs_offset.y) * obs_scale.y;
  return v;
}

static json norm_to_json(const Policy& p) {
  return json{{"offset", {p.obs_offset.x, p.obs_offset.y}},
              {"scale", {p.obs_scale.x, p.obs_scale.y}}};
}

static void norm_from_json(const json& j, Policy& p) {
  p.obs_offset = {j.at("offset").at(0).get<double>(), j.at("offset").at(1).get<double>()};
  p.obs_scale = {j.at("scale").at(0).get<double>(), j.at("scale").at(1).get<double>()};
}

QPolicy::QPolicy(Mlp net_, std::vector<double> actions_)
    : net(std::move(net_)), actions(std::move(actions_)) {
  if (net.output_dim() != static_cast<int>(actions.size()))
    throw InvalidArgument("action-value net output dim does not match the action set");
}

Eigen::VectorXd QPolicy::q_values(const Vec2& obs) const {
  return forward(net, normalize(obs));
}

int QPolicy::greedy_index(const Vec2& obs) const {
  Eigen::VectorXd q = q_values(obs);
  int best = 0;
  for (int i = 1; i < q.size(); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

double QPolicy::act(const Vec2& obs) const {
  return actions[greedy_index(obs)];
}

json QPolicy::to_json() const {
  return json{{"format", "policy"},
              {"version", 1},
              {"kind", "q"},
              {"actions", actions},
              {"normalization", norm_to_json(*this)},
              {"net", hyrl::to_json(net)}};
}

std::unique_ptr<Policy> QPolicy::clone() const {
  return std::make_unique<QPolicy>(*this);
}

GaussianPolicy::GaussianPolicy(Mlp mean_net_, Mlp value_net_, double low_, double high_)
    : mean_net(std::move(mean_net_)), value_net(std::move(value_net_)), low(low_), high(high_) {
  if (mean_net.output_dim() != 1 || value_net.output_dim() != 1)
    throw InvalidArgument("gaussian policy heads must be scalar");
}

double GaussianPolicy::mean(const Vec2& obs) const {
  return forward(mean_net, normalize(obs))[0];
}

double GaussianPolicy::value(const Vec2& obs) const {
  return forward(value_net, normalize(obs))[0];
}

double GaussianPolicy::act(const Vec2& obs) const {
  return clamp(mean(obs), low, high);
}

json GaussianPolicy::to_json() const {
  return json{{"format", "policy"},
              {"version", 1},
              {"kind", "gaussian"},
              {"low", low},
              {"high", high},
              {"log_std", log_std},
              {"normalization", norm_to_json(*this)},
              {"mean_net", hyrl::to_json(mean_net)},
              {"value_net", hyrl::to_json(value_net)}};
}

std::unique_ptr<Policy> GaussianPolicy::clone() const {
  return std::make_unique<GaussianPolicy>(*this);
}

RestrictedPolicy::RestrictedPolicy(std::shared_ptr<const Policy> base, Region region)
    : base_(std::move(base)), region_(std::move(region)) {
  if (!base_) throw InvalidArgument("restricted policy needs a base policy");
  obs_offset = base_->obs_offset;
  obs_scale = base_->obs_scale;
}

double RestrictedPolicy::act(const Vec2& obs) const {
  if (!region_.contains(obs)) throw OutOfRegion("observation outside the policy's region");
  return base_->act(obs);
}

json RestrictedPolicy::to_json() const {
  return json{{"format", "policy"},
              {"version", 1},
              {"kind", "restricted"},
              {"region", region_.serialize()},
              {"base", base_->to_json()}};
}

std::unique_ptr<Policy> RestrictedPolicy::clone() const {
  return std::make_unique<RestrictedPolicy>(base_->clone(), region_);
}

std::unique_ptr<Policy> policy_from_json(const json& j) {
  if (j.value("format", "") != "policy" || j.value("version", 0) != 1)
    throw InvalidArgument("not a version-1 policy file");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "q") {
    auto p = std::make_unique<QPolicy>(mlp_from_json(j.at("net")),
                                       j.at("actions").get<std::vector<double>>());
    norm_from_json(j.at("normalization"), *p);
    return p;
  }
  if (kind == "gaussian") {
    auto p = std::make_unique<GaussianPolicy>(mlp_from_json(j.at("mean_net")),
                                              mlp_from_json(j.at("value_net")),
                                              j.at("low").get<double>(),
                                              j.at("high").get<double>());
    p->log_std = j.at("log_std").get<double>();
    norm_from_json(j.at("normalization"), *p);
    return p;
  }
  if (kind == "restricted") {
    std::shared_ptr<const Policy> base = policy_from_json(j.at("base"));
    return std::make_unique<RestrictedPolicy>(
        std::move(base), Region::deserialize(j.at("region").get<std::string>()));
  }
  throw InvalidArgument("unknown policy kind " + kind);
}

void save_policy(const Policy& policy, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << policy.to_json().dump(1) << "\n";
}

std::unique_ptr<Policy> load_policy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path + ": " + e.what());
  }
  return policy_from_json(j);
}

}  // namespace hyrl
