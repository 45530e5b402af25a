#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hyrl/common.hpp"

#include <nlohmann/json_fwd.hpp>

namespace hyrl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Fully connected net with tanh hidden layers and an identity output layer.
struct Mlp {
  std::vector<int> dims;           // e.g. {2, 64, 64, 1}
  std::vector<MatrixXd> weights;   // weights[l] is dims[l+1] x dims[l]
  std::vector<VectorXd> biases;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  long parameter_count() const;
};

// Uniform fan-in init: W ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases zero.
Mlp make_mlp(const std::vector<int>& dims, Rng& rng);

// Activations recorded by a forward pass, needed for backprop.
struct Tape {
  std::vector<VectorXd> acts;  // acts[0] = input, acts.back() = output
  std::vector<VectorXd> pre;   // pre-activations per layer
};

// Evaluates the net; records activations when tape is non-null.
VectorXd forward(const Mlp& net, const VectorXd& x, Tape* tape = nullptr);

struct Gradients {
  std::vector<MatrixXd> dw;
  std::vector<VectorXd> db;

  void add(const Gradients& o);
  void scale(double s);
  bool finite() const;
  double squared_norm() const;
};

Gradients zero_gradients(const Mlp& net);

// Backprop of dLoss/dOutput through the recorded forward pass.
Gradients backward(const Mlp& net, const Tape& tape, const VectorXd& out_grad);

// Batched variants; samples are columns. backward() sums gradients over the
// batch (scale afterwards for a mean loss).
struct BatchTape {
  std::vector<MatrixXd> acts;
};

MatrixXd forward(const Mlp& net, const MatrixXd& x, BatchTape* tape = nullptr);
Gradients backward(const Mlp& net, const BatchTape& tape, const MatrixXd& out_grad);

// Adam with bias correction. apply() rejects non-finite gradients.
class AdamOptimizer {
 public:
  AdamOptimizer(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void apply(Mlp& net, const Gradients& grads);
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<MatrixXd> mw_, vw_;
  std::vector<VectorXd> mb_, vb_;
};

// Clips gradient global norm in place; returns the pre-clip norm.
double clip_grad_norm(Gradients& grads, double max_norm);

// Versioned JSON serialization. Values round-trip bit exactly.
nlohmann::json to_json(const Mlp& net);
Mlp mlp_from_json(const nlohmann::json& j);

void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

}  // namespace hyrl
