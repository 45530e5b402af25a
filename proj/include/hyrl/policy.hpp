#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hyrl/common.hpp"
#include "hyrl/nn.hpp"
#include "hyrl/region.hpp"

namespace hyrl {

// Maps a raw observed state to a deterministic control action. Observation
// normalization lives here so every caller can pass plain states.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string kind() const = 0;
  virtual double act(const Vec2& obs) const = 0;
  virtual nlohmann::json to_json() const = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;

  Eigen::VectorXd normalize(const Vec2& obs) const;

  Vec2 obs_offset{0.0, 0.0};
  Vec2 obs_scale{1.0, 1.0};
};

// greedy head over a learned action-value net; ties break to the lowest index
class QPolicy : public Policy {
 public:
  QPolicy() = default;
  QPolicy(Mlp net, std::vector<double> actions);

  std::string kind() const override { return "q"; }
  double act(const Vec2& obs) const override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Policy> clone() const override;

  Eigen::VectorXd q_values(const Vec2& obs) const;
  int greedy_index(const Vec2& obs) const;

  Mlp net;
  std::vector<double> actions;
};

// squashed-to-bounds Gaussian policy head; deterministic action is the
// clamped mean, sampling (training only) adds exp(log_std) noise to the mean
class GaussianPolicy : public Policy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(Mlp mean_net, Mlp value_net, double low, double high);

  std::string kind() const override { return "gaussian"; }
  double act(const Vec2& obs) const override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Policy> clone() const override;

  double mean(const Vec2& obs) const;
  double value(const Vec2& obs) const;

  Mlp mean_net;
  Mlp value_net;
  double log_std = 0.0;
  double low = -1.0;
  double high = 1.0;
};

// guards a base policy with a domain check on the observed state
class RestrictedPolicy : public Policy {
 public:
  RestrictedPolicy(std::shared_ptr<const Policy> base, Region region);

  std::string kind() const override { return "restricted"; }
  double act(const Vec2& obs) const override;
  nlohmann::json to_json() const override;
  std::unique_ptr<Policy> clone() const override;

  const Policy& base() const { return *base_; }
  const Region& region() const { return region_; }

 private:
  std::shared_ptr<const Policy> base_;
  Region region_;
};

std::unique_ptr<Policy> policy_from_json(const nlohmann::json& j);
void save_policy(const Policy& policy, const std::string& path);
std::unique_ptr<Policy> load_policy(const std::string& path);

}  // namespace hyrl
