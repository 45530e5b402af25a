#include <cmath>
#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "hyrl/errors.hpp"
#include "hyrl/nn.hpp"

using namespace hyrl;

namespace {

// scalar loss 0.5 * ||f(x) - y||^2 so dL/dout = f(x) - y
double loss_at(const Mlp& net, const VectorXd& x, const VectorXd& y) {
  VectorXd out = forward(net, x);
  return 0.5 * (out - y).squaredNorm();
}

double rel_err(double a, double b) {
  double scale = std::max({1e-8, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("backprop matches finite differences") {
  Rng rng(7);
  Mlp net = make_mlp({3, 8, 6, 2}, rng);
  VectorXd x(3), y(2);
  x << 0.3, -0.7, 1.1;
  y << 0.5, -0.2;

  Tape tape;
  VectorXd out = forward(net, x, &tape);
  Gradients g = backward(net, tape, out - y);

  const double h = 1e-6;
  double worst = 0.0;
  for (int l = 0; l < net.layer_count(); ++l) {
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c) {
        double saved = net.weights[l](r, c);
        net.weights[l](r, c) = saved + h;
        double up = loss_at(net, x, y);
        net.weights[l](r, c) = saved - h;
        double down = loss_at(net, x, y);
        net.weights[l](r, c) = saved;
        worst = std::max(worst, rel_err((up - down) / (2 * h), g.dw[l](r, c)));
      }
    for (int r = 0; r < net.biases[l].size(); ++r) {
      double saved = net.biases[l](r);
      net.biases[l](r) = saved + h;
      double up = loss_at(net, x, y);
      net.biases[l](r) = saved - h;
      double down = loss_at(net, x, y);
      net.biases[l](r) = saved;
      worst = std::max(worst, rel_err((up - down) / (2 * h), g.db[l](r)));
    }
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("batched forward and backward agree with per-sample passes") {
  Rng rng(11);
  Mlp net = make_mlp({2, 16, 3}, rng);
  const int b = 5;
  MatrixXd xs(2, b), grads_out(3, b);
  for (int j = 0; j < b; ++j) {
    xs(0, j) = rng.uniform(-1, 1);
    xs(1, j) = rng.uniform(-1, 1);
    for (int r = 0; r < 3; ++r) grads_out(r, j) = rng.uniform(-1, 1);
  }

  BatchTape btape;
  MatrixXd outs = forward(net, xs, &btape);
  Gradients batched = backward(net, btape, grads_out);

  Gradients summed = zero_gradients(net);
  for (int j = 0; j < b; ++j) {
    Tape tape;
    VectorXd out = forward(net, VectorXd(xs.col(j)), &tape);
    CHECK((out - outs.col(j)).lpNorm<Eigen::Infinity>() <= 1e-12);
    summed.add(backward(net, tape, VectorXd(grads_out.col(j))));
  }
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK((batched.dw[l] - summed.dw[l]).lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((batched.db[l] - summed.db[l]).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("adam first step moves a weight by about lr in the gradient direction") {
  Rng rng(3);
  Mlp net = make_mlp({1, 1}, rng);
  net.weights[0](0, 0) = 0.25;
  Gradients g = zero_gradients(net);
  g.dw[0](0, 0) = 0.5;

  AdamOptimizer opt(1e-2);
  opt.apply(net, g);
  // bias-corrected first step is lr * g / (|g| + eps) ~= lr * sign(g)
  CHECK(net.weights[0](0, 0) == doctest::Approx(0.25 - 1e-2).epsilon(1e-6));
}

TEST_CASE("adam rejects non-finite gradients") {
  Rng rng(3);
  Mlp net = make_mlp({2, 4, 1}, rng);
  Gradients g = zero_gradients(net);
  g.dw[0](0, 0) = std::nan("");
  AdamOptimizer opt(1e-3);
  CHECK_THROWS_AS(opt.apply(net, g), DivergenceError);
}

TEST_CASE("gradient clipping rescales to the requested global norm") {
  Rng rng(5);
  Mlp net = make_mlp({2, 3, 1}, rng);
  Gradients g = zero_gradients(net);
  g.dw[0].setConstant(2.0);
  g.db[1].setConstant(-1.0);
  double before = std::sqrt(g.squared_norm());
  double reported = clip_grad_norm(g, 0.5);
  CHECK(reported == doctest::Approx(before).epsilon(1e-12));
  CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(0.5).epsilon(1e-12));

  // already small: untouched
  Gradients small = zero_gradients(net);
  small.dw[0](0, 0) = 0.1;
  clip_grad_norm(small, 0.5);
  CHECK(small.dw[0](0, 0) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("mlp json round-trip is bit exact") {
  Rng rng(13);
  Mlp net = make_mlp({2, 64, 64, 5}, rng);
  Mlp back = mlp_from_json(to_json(net));
  REQUIRE(back.dims == net.dims);
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK(back.weights[l] == net.weights[l]);
    CHECK(back.biases[l] == net.biases[l]);
  }

  auto path = (std::filesystem::temp_directory_path() / "hyrl_test_net.json").string();
  save_mlp(net, path);
  Mlp loaded = load_mlp(path);
  for (int l = 0; l < net.layer_count(); ++l) CHECK(loaded.weights[l] == net.weights[l]);
  std::filesystem::remove(path);
}

TEST_CASE("fan-in init stays inside its uniform bounds and zeroes biases") {
  Rng rng(17);
  Mlp net = make_mlp({4, 32, 2}, rng);
  double bound0 = 1.0 / std::sqrt(4.0);
  CHECK(net.weights[0].cwiseAbs().maxCoeff() <= bound0);
  CHECK(net.weights[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(32.0));
  CHECK(net.biases[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(net.parameter_count() == 4 * 32 + 32 + 32 * 2 + 2);
}
