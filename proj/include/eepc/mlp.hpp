#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eepc {

enum class Activation { elu, relu, linear };

Activation parse_activation(const std::string& name);
std::string to_string(Activation act);

double activate(Activation act, double z);
/// ELU'(0) = 1, ReLU'(0) = 0.
double activate_derivative(Activation act, double z);

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs, row-major
  std::vector<double> bias;
  Activation activation = Activation::linear;

  bool operator==(const DenseLayer&) const = default;
};

struct LayerSpec {
  std::size_t width;
  Activation activation;
};

/// Hidden layers between an input of size L(L+1) and a linear output of size L.
struct Architecture {
  std::size_t inputs = 0;
  std::vector<LayerSpec> hidden;
  std::size_t outputs = 0;

  /// 128-64-32-16-8 with ELU, ReLU, ELU, ReLU, ELU.
  static Architecture paper(std::size_t links);
  /// 16-8 with ELU, ReLU.
  static Architecture small(std::size_t links);
  /// 1024-4096-1024-512-256-128-64-32-16, ELU on first and last, ReLU elsewhere.
  static Architecture wide(std::size_t links);
  /// "paper", "small", "wide", or a list such as "64:elu,32:relu".
  static Architecture parse(const std::string& spec, std::size_t links);
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  std::size_t inputs() const { return layers_.front().inputs; }
  std::size_t outputs() const { return layers_.back().outputs; }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  bool operator==(const Mlp&) const = default;

 private:
  std::vector<DenseLayer> layers_;
};

/// Glorot-uniform weights, zero biases; deterministic in `seed`.
Mlp init_mlp(const Architecture& arch, std::uint64_t seed);

std::vector<double> forward(const Mlp& mlp, std::span<const double> x);

/// Outputs for `batch` row-major inputs.
std::vector<double> forward_batch(const Mlp& mlp, std::span<const double> x, std::size_t batch);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
};

struct LossAndGrad {
  double loss;
  Gradients grad;
};

/// Mean squared error over batch and outputs, with backpropagated gradients.
/// `x` is batch x inputs and `y` batch x outputs, both row-major.
LossAndGrad loss_and_grad(const Mlp& mlp, std::span<const double> x, std::span<const double> y,
                          std::size_t batch);

double mse(const Mlp& mlp, std::span<const double> x, std::span<const double> y,
           std::size_t batch);

struct NadamConfig {
  double learning_rate = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct NadamState {
  std::vector<std::vector<double>> m_weights, v_weights, m_bias, v_bias;
  std::uint64_t step = 0;

  static NadamState zeros_like(const Mlp& mlp);
};

/// Adam with a Nesterov look-ahead on the first moment.
void optimizer_step(Mlp& mlp, NadamState& state, const Gradients& grad, const NadamConfig& cfg);

std::string format_mlp(const Mlp& mlp);
Mlp parse_mlp(const std::string& text);
void save_mlp(const std::string& path, const Mlp& mlp);
/// Throws IoError when the file is missing or malformed.
Mlp load_mlp(const std::string& path);

}  // namespace eepc
