#include "hyrl/nn.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hyrl/errors.hpp"

namespace hyrl {

using nlohmann::json;

long Mlp::parameter_count() const {
  long n = 0;
  for (int l = 0; l < layer_count(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw InvalidArgument("mlp needs at least input and output dims");
  for (int d : dims)
    if (d <= 0) throw InvalidArgument("mlp layer dims must be positive");
  Mlp net;
  net.dims = dims;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    MatrixXd w(dims[l + 1], dims[l]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-bound, bound);
    net.weights.push_back(std::move(w));
    net.biases.push_back(VectorXd::Zero(dims[l + 1]));
  }
  return net;
}

VectorXd forward(const Mlp& net, const VectorXd& x, Tape* tape) {
  if (x.size() != net.input_dim())
    throw InvalidArgument("forward: input dim " + std::to_string(x.size()) + " != " +
                          std::to_string(net.input_dim()));
  if (tape) {
    tape->acts.clear();
    tape->pre.clear();
    tape->acts.push_back(x);
  }
  VectorXd a = x;
  int last = net.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    VectorXd z = net.weights[l] * a + net.biases[l];
    if (tape) tape->pre.push_back(z);
    a = (l == last) ? z : VectorXd(z.array().tanh());
    if (tape) tape->acts.push_back(a);
  }
  return a;
}

void Gradients::add(const Gradients& o) {
  for (size_t l = 0; l < dw.size(); ++l) {
    dw[l] += o.dw[l];
    db[l] += o.db[l];
  }
}

void Gradients::scale(double s) {
  for (size_t l = 0; l < dw.size(); ++l) {
    dw[l] *= s;
    db[l] *= s;
  }
}

bool Gradients::finite() const {
  for (size_t l = 0; l < dw.size(); ++l)
    if (!dw[l].allFinite() || !db[l].allFinite()) return false;
  return true;
}

double Gradients::squared_norm() const {
  double n = 0.0;
  for (size_t l = 0; l < dw.size(); ++l) n += dw[l].squaredNorm() + db[l].squaredNorm();
  return n;
}

Gradients zero_gradients(const Mlp& net) {
  Gradients g;
  for (int l = 0; l < net.layer_count(); ++l) {
    g.dw.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.db.push_back(VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

Gradients backward(const Mlp& net, const Tape& tape, const VectorXd& out_grad) {
  int last = net.layer_count() - 1;
  if (static_cast<int>(tape.pre.size()) != last + 1)
    throw InvalidArgument("backward: no forward pass recorded for this net");
  if (out_grad.size() != net.output_dim())
    throw InvalidArgument("backward: output grad dim mismatch");
  Gradients g;
  g.dw.resize(last + 1);
  g.db.resize(last + 1);
  VectorXd delta = out_grad;  // output layer is linear
  for (int l = last; l >= 0; --l) {
    if (l != last) {
      // tanh'(z) = 1 - tanh(z)^2; acts[l+1] holds tanh(z)
      delta = delta.cwiseProduct(VectorXd(1.0 - tape.acts[l + 1].array().square()));
    }
    g.dw[l] = delta * tape.acts[l].transpose();
    g.db[l] = delta;
    if (l > 0) delta = net.weights[l].transpose() * delta;
  }
  return g;
}

MatrixXd forward(const Mlp& net, const MatrixXd& x, BatchTape* tape) {
  if (x.rows() != net.input_dim())
    throw InvalidArgument("forward: batch input dim mismatch");
  if (tape) {
    tape->acts.clear();
    tape->acts.push_back(x);
  }
  MatrixXd a = x;
  int last = net.layer_count() - 1;
  for (int l = 0; l <= last; ++l) {
    MatrixXd z = net.weights[l] * a;
    z.colwise() += net.biases[l];
    a = (l == last) ? z : MatrixXd(z.array().tanh());
    if (tape) tape->acts.push_back(a);
  }
  return a;
}

Gradients backward(const Mlp& net, const BatchTape& tape, const MatrixXd& out_grad) {
  int last = net.layer_count() - 1;
  if (static_cast<int>(tape.acts.size()) != last + 2)
    throw InvalidArgument("backward: no batch forward pass recorded for this net");
  if (out_grad.rows() != net.output_dim() || out_grad.cols() != tape.acts[0].cols())
    throw InvalidArgument("backward: batch output grad shape mismatch");
  Gradients g;
  g.dw.resize(last + 1);
  g.db.resize(last + 1);
  MatrixXd delta = out_grad;
  for (int l = last; l >= 0; --l) {
    if (l != last) delta = delta.cwiseProduct(MatrixXd(1.0 - tape.acts[l + 1].array().square()));
    g.dw[l] = delta * tape.acts[l].transpose();
    g.db[l] = delta.rowwise().sum();
    if (l > 0) delta = net.weights[l].transpose() * delta;
  }
  return g;
}

void AdamOptimizer::apply(Mlp& net, const Gradients& grads) {
  if (!grads.finite()) throw DivergenceError("non-finite gradient; update rejected");
  if (mw_.empty()) {
    for (int l = 0; l < net.layer_count(); ++l) {
      mw_.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      vw_.push_back(MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
      mb_.push_back(VectorXd::Zero(net.biases[l].size()));
      vb_.push_back(VectorXd::Zero(net.biases[l].size()));
    }
  }
  ++t_;
  double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (int l = 0; l < net.layer_count(); ++l) {
    mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.dw[l];
    vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.dw[l].array().square().matrix();
    mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.db[l];
    vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.db[l].array().square().matrix();
    net.weights[l].array() -=
        lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);
    net.biases[l].array() -=
        lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
  }
}

double clip_grad_norm(Gradients& grads, double max_norm) {
  double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) grads.scale(max_norm / norm);
  return norm;
}

json to_json(const Mlp& net) {
  json j;
  j["format"] = "mlp";
  j["version"] = 1;
  j["dims"] = net.dims;
  json layers = json::array();
  for (int l = 0; l < net.layer_count(); ++l) {
    json layer;
    std::vector<double> w(net.weights[l].size());
    // row-major export
    for (int r = 0; r < net.weights[l].rows(); ++r)
      for (int c = 0; c < net.weights[l].cols(); ++c)
        w[static_cast<size_t>(r) * net.weights[l].cols() + c] = net.weights[l](r, c);
    layer["w"] = w;
    layer["b"] = std::vector<double>(net.biases[l].data(),
                                     net.biases[l].data() + net.biases[l].size());
    layers.push_back(std::move(layer));
  }
  j["layers"] = std::move(layers);
  return j;
}

Mlp mlp_from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != "mlp")
    throw InvalidArgument("not an mlp record");
  if (j.value("version", 0) != 1) throw InvalidArgument("unsupported mlp version");
  Mlp net;
  net.dims = j.at("dims").get<std::vector<int>>();
  const json& layers = j.at("layers");
  if (layers.size() + 1 != net.dims.size()) throw InvalidArgument("mlp layer count mismatch");
  for (size_t l = 0; l < layers.size(); ++l) {
    int rows = net.dims[l + 1], cols = net.dims[l];
    auto w = layers[l].at("w").get<std::vector<double>>();
    auto b = layers[l].at("b").get<std::vector<double>>();
    if (static_cast<int>(w.size()) != rows * cols || static_cast<int>(b.size()) != rows)
      throw InvalidArgument("mlp layer size mismatch");
    MatrixXd wm(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) wm(r, c) = w[static_cast<size_t>(r) * cols + c];
    net.weights.push_back(std::move(wm));
    net.biases.push_back(Eigen::Map<VectorXd>(b.data(), rows));
  }
  return net;
}

void save_mlp(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(net).dump(2) << "\n";
}

Mlp load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  json j;
  in >> j;
  return mlp_from_json(j);
}

}  // namespace hyrl
