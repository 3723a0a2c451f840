#include "eepc/mlp.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "eepc/config_file.hpp"
#include "eepc/kernels.hpp"

namespace eepc {

namespace {

constexpr const char* kModelMagic = "eepc-mlp";
constexpr int kModelVersion = 1;

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "elu") return Activation::elu;
  if (name == "relu") return Activation::relu;
  if (name == "linear") return Activation::linear;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::elu: return "elu";
    case Activation::relu: return "relu";
    case Activation::linear: return "linear";
  }
  return "?";
}

double activate(Activation act, double z) {
  switch (act) {
    case Activation::elu: return z >= 0.0 ? z : std::expm1(z);
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::linear: return z;
  }
  return z;
}

double activate_derivative(Activation act, double z) {
  switch (act) {
    case Activation::elu: return z >= 0.0 ? 1.0 : std::exp(z);
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::linear: return 1.0;
  }
  return 1.0;
}

Architecture Architecture::paper(std::size_t links) {
  using A = Activation;
  return {links * (links + 1),
          {{128, A::elu}, {64, A::relu}, {32, A::elu}, {16, A::relu}, {8, A::elu}},
          links};
}

Architecture Architecture::small(std::size_t links) {
  return {links * (links + 1), {{16, Activation::elu}, {8, Activation::relu}}, links};
}

Architecture Architecture::wide(std::size_t links) {
  Architecture a{links * (links + 1), {}, links};
  const std::size_t widths[] = {1024, 4096, 1024, 512, 256, 128, 64, 32, 16};
  const std::size_t n = std::size(widths);
  for (std::size_t k = 0; k < n; ++k) {
    a.hidden.push_back({widths[k], k == 0 || k + 1 == n ? Activation::elu : Activation::relu});
  }
  return a;
}

Architecture Architecture::parse(const std::string& spec, std::size_t links) {
  if (spec == "paper") return paper(links);
  if (spec == "small") return small(links);
  if (spec == "wide") return wide(links);
  Architecture a{links * (links + 1), {}, links};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("layer '" + item + "' is not width:activation");
    }
    a.hidden.push_back({parse_size(item.substr(0, colon)), parse_activation(item.substr(colon + 1))});
  }
  return a;
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("Mlp: no layers");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const DenseLayer& d = layers_[k];
    if (d.inputs == 0 || d.outputs == 0 || d.weights.size() != d.inputs * d.outputs ||
        d.bias.size() != d.outputs) {
      throw std::invalid_argument("Mlp: malformed layer " + std::to_string(k));
    }
    if (k > 0 && d.inputs != layers_[k - 1].outputs) {
      throw std::invalid_argument("Mlp: layer " + std::to_string(k) + " input size mismatch");
    }
  }
  if (layers_.back().activation != Activation::linear) {
    throw std::invalid_argument("Mlp: output layer must be linear");
  }
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& d : layers_) n += d.weights.size() + d.bias.size();
  return n;
}

Mlp init_mlp(const Architecture& arch, std::uint64_t seed) {
  if (arch.inputs == 0 || arch.outputs == 0) throw std::invalid_argument("init_mlp: empty io");
  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  std::size_t fan_in = arch.inputs;
  auto make = [&](std::size_t width, Activation act) {
    DenseLayer d;
    d.inputs = fan_in;
    d.outputs = width;
    d.activation = act;
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + width));
    std::uniform_real_distribution<double> u(-limit, limit);
    d.weights.resize(fan_in * width);
    for (double& w : d.weights) w = u(rng);
    d.bias.assign(width, 0.0);
    layers.push_back(std::move(d));
    fan_in = width;
  };
  for (const LayerSpec& h : arch.hidden) make(h.width, h.activation);
  make(arch.outputs, Activation::linear);
  return Mlp(std::move(layers));
}

std::vector<double> forward_batch(const Mlp& mlp, std::span<const double> x, std::size_t batch) {
  if (x.size() != batch * mlp.inputs()) {
    throw std::invalid_argument("forward: input has wrong dimension");
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> pre;
  std::vector<double> out;
  for (const DenseLayer& d : mlp.layers()) {
    pre.resize(batch * d.outputs);
    out.resize(batch * d.outputs);
    kernels::dense_forward(d, cur, batch, pre, out, kernels::default_exec());
    cur.swap(out);
  }
  return cur;
}

std::vector<double> forward(const Mlp& mlp, std::span<const double> x) {
  return forward_batch(mlp, x, 1);
}

LossAndGrad loss_and_grad(const Mlp& mlp, std::span<const double> x, std::span<const double> y,
                          std::size_t batch) {
  if (batch == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  if (x.size() != batch * mlp.inputs() || y.size() != batch * mlp.outputs()) {
    throw std::invalid_argument("loss_and_grad: batch has wrong dimension");
  }
  const auto exec = kernels::default_exec();
  const auto& layers = mlp.layers();
  const std::size_t n = layers.size();

  // acts[k] is the input of layer k; acts[n] the network output
  std::vector<std::vector<double>> acts(n + 1);
  std::vector<std::vector<double>> pres(n);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < n; ++k) {
    pres[k].resize(batch * layers[k].outputs);
    acts[k + 1].resize(batch * layers[k].outputs);
    kernels::dense_forward(layers[k], acts[k], batch, pres[k], acts[k + 1], exec);
  }

  const std::vector<double>& yhat = acts[n];
  const double scale = 1.0 / static_cast<double>(yhat.size());
  double loss = 0.0;
  std::vector<double> delta(yhat.size());
  for (std::size_t k = 0; k < yhat.size(); ++k) {
    const double e = yhat[k] - y[k];
    loss += e * e;
    delta[k] = 2.0 * e * scale;
  }
  loss *= scale;

  LossAndGrad out{loss, {}};
  out.grad.weights.resize(n);
  out.grad.bias.resize(n);
  std::vector<double> delta_in;
  for (std::size_t k = n; k-- > 0;) {
    out.grad.weights[k].resize(layers[k].weights.size());
    out.grad.bias[k].resize(layers[k].outputs);
    delta_in.assign(k > 0 ? batch * layers[k].inputs : 0, 0.0);
    kernels::dense_backward(layers[k], acts[k], pres[k], delta, batch, out.grad.weights[k],
                            out.grad.bias[k], delta_in, exec);
    delta.swap(delta_in);
  }
  return out;
}

double mse(const Mlp& mlp, std::span<const double> x, std::span<const double> y,
           std::size_t batch) {
  const std::vector<double> yhat = forward_batch(mlp, x, batch);
  if (y.size() != yhat.size()) throw std::invalid_argument("mse: target has wrong dimension");
  double acc = 0.0;
  for (std::size_t k = 0; k < yhat.size(); ++k) {
    const double e = yhat[k] - y[k];
    acc += e * e;
  }
  return acc / static_cast<double>(yhat.size());
}

NadamState NadamState::zeros_like(const Mlp& mlp) {
  NadamState s;
  for (const DenseLayer& d : mlp.layers()) {
    s.m_weights.emplace_back(d.weights.size(), 0.0);
    s.v_weights.emplace_back(d.weights.size(), 0.0);
    s.m_bias.emplace_back(d.bias.size(), 0.0);
    s.v_bias.emplace_back(d.bias.size(), 0.0);
  }
  return s;
}

void optimizer_step(Mlp& mlp, NadamState& state, const Gradients& grad, const NadamConfig& cfg) {
  auto& layers = mlp.layers();
  if (state.m_weights.size() != layers.size() || grad.weights.size() != layers.size()) {
    throw std::invalid_argument("optimizer_step: state does not match network");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double b1 = cfg.beta1;
  const double b2 = cfg.beta2;
  const double corr1_next = 1.0 - std::pow(b1, t + 1.0);
  const double corr1 = 1.0 - std::pow(b1, t);
  const double corr2 = 1.0 - std::pow(b2, t);

  auto update = [&](std::vector<double>& param, std::vector<double>& m, std::vector<double>& v,
                    const std::vector<double>& g) {
    if (param.size() != g.size() || m.size() != g.size()) {
      throw std::invalid_argument("optimizer_step: gradient shape mismatch");
    }
    for (std::size_t k = 0; k < param.size(); ++k) {
      m[k] = b1 * m[k] + (1.0 - b1) * g[k];
      v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
      const double m_hat = b1 * m[k] / corr1_next + (1.0 - b1) * g[k] / corr1;
      const double v_hat = v[k] / corr2;
      param[k] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  };
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weights, state.m_weights[k], state.v_weights[k], grad.weights[k]);
    update(layers[k].bias, state.m_bias[k], state.v_bias[k], grad.bias[k]);
  }
}

std::string format_mlp(const Mlp& mlp) {
  std::ostringstream out;
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "layers " << mlp.layers().size() << '\n';
  for (const DenseLayer& d : mlp.layers()) {
    out << "dense " << d.inputs << ' ' << d.outputs << ' ' << to_string(d.activation) << '\n';
    for (std::size_t k = 0; k < d.weights.size(); ++k) {
      out << (k % d.inputs ? " " : "") << format_double17(d.weights[k]);
      if ((k + 1) % d.inputs == 0) out << '\n';
    }
    for (std::size_t k = 0; k < d.bias.size(); ++k) {
      out << (k ? " " : "") << format_double17(d.bias[k]);
    }
    out << '\n';
  }
  return out.str();
}

Mlp parse_mlp(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kModelMagic) {
    throw std::invalid_argument("model file: bad magic");
  }
  if (version != kModelVersion) {
    throw std::invalid_argument("model file: unsupported version " + std::to_string(version));
  }
  std::string tag;
  std::size_t n = 0;
  if (!(in >> tag >> n) || tag != "layers" || n == 0) {
    throw std::invalid_argument("model file: bad layer count");
  }
  auto read_value = [&]() {
    std::string tok;
    if (!(in >> tok)) throw std::invalid_argument("model file: truncated");
    return parse_double(tok);
  };
  std::vector<DenseLayer> layers(n);
  for (DenseLayer& d : layers) {
    std::string act;
    if (!(in >> tag >> d.inputs >> d.outputs >> act) || tag != "dense") {
      throw std::invalid_argument("model file: bad layer header");
    }
    d.activation = parse_activation(act);
    d.weights.resize(d.inputs * d.outputs);
    for (double& w : d.weights) w = read_value();
    d.bias.resize(d.outputs);
    for (double& b : d.bias) b = read_value();
  }
  return Mlp(std::move(layers));
}

void save_mlp(const std::string& path, const Mlp& mlp) { write_file_atomic(path, format_mlp(mlp)); }

Mlp load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_mlp(ss.str());
  } catch (const std::invalid_argument& e) {
    throw IoError("model '" + path + "': " + e.what());
  }
}

}  // namespace eepc
