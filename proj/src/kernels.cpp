#include "eepc/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace eepc::kernels {

namespace {

std::atomic<Exec> g_default_exec{Exec::parallel};

// below this many multiply-adds the thread fork costs more than it saves
constexpr std::size_t kParallelWork = 1u << 15;

void check_sizes(const DenseLayer& layer, std::size_t in, std::size_t out, std::size_t batch) {
  if (in != batch * layer.inputs || out != batch * layer.outputs) {
    throw std::invalid_argument("dense kernel: buffer sizes do not match layer and batch");
  }
}

}  // namespace

Exec default_exec() { return g_default_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec exec) { g_default_exec.store(exec, std::memory_order_relaxed); }

void dense_forward(const DenseLayer& layer, std::span<const double> in, std::size_t batch,
                   std::span<double> pre, std::span<double> out, Exec exec) {
  check_sizes(layer, in.size(), out.size(), batch);
  const std::size_t ni = layer.inputs;
  const std::size_t no = layer.outputs;
  const double* w = layer.weights.data();
  const double* x = in.data();

  if (exec == Exec::serial) {
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < no; ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ni; ++i) acc += x[b * ni + i] * w[o * ni + i];
        acc += layer.bias[o];
        pre[b * no + o] = acc;
        out[b * no + o] = activate(layer.activation, acc);
      }
    }
    return;
  }

  const bool fork = batch * ni * no >= kParallelWork;
  const auto n = static_cast<std::ptrdiff_t>(batch * no);
#pragma omp parallel for schedule(static) if (fork)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const auto b = static_cast<std::size_t>(k) / no;
    const auto o = static_cast<std::size_t>(k) % no;
    const double* xr = x + b * ni;
    const double* wr = w + o * ni;
    double acc = 0.0;
    for (std::size_t i = 0; i < ni; ++i) acc += xr[i] * wr[i];
    acc += layer.bias[o];
    pre[k] = acc;
    out[k] = activate(layer.activation, acc);
  }
}

void dense_backward(const DenseLayer& layer, std::span<const double> in,
                    std::span<const double> pre, std::span<double> grad_out,
                    std::size_t batch, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_in, Exec exec) {
  check_sizes(layer, in.size(), grad_out.size(), batch);
  const std::size_t ni = layer.inputs;
  const std::size_t no = layer.outputs;
  if (grad_weights.size() != ni * no || grad_bias.size() != no ||
      (!grad_in.empty() && grad_in.size() != batch * ni)) {
    throw std::invalid_argument("dense_backward: gradient buffer sizes do not match");
  }
  const double* w = layer.weights.data();
  const double* x = in.data();
  double* dz = grad_out.data();

  if (exec == Exec::serial) {
    for (std::size_t k = 0; k < batch * no; ++k) {
      dz[k] *= activate_derivative(layer.activation, pre[k]);
    }
    for (double& g : grad_weights) g = 0.0;
    for (double& g : grad_bias) g = 0.0;
    for (double& g : grad_in) g = 0.0;
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t o = 0; o < no; ++o) {
        const double d = dz[b * no + o];
        grad_bias[o] += d;
        for (std::size_t i = 0; i < ni; ++i) grad_weights[o * ni + i] += d * x[b * ni + i];
      }
    }
    if (!grad_in.empty()) {
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t o = 0; o < no; ++o) {
          const double d = dz[b * no + o];
          for (std::size_t i = 0; i < ni; ++i) grad_in[b * ni + i] += d * w[o * ni + i];
        }
      }
    }
    return;
  }

  const bool fork = batch * ni * no >= kParallelWork;
  const auto n_out = static_cast<std::ptrdiff_t>(batch * no);
  const auto n_rows = static_cast<std::ptrdiff_t>(no);
  const auto n_batch = static_cast<std::ptrdiff_t>(batch);
#pragma omp parallel if (fork)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n_out; ++k) {
      dz[k] *= activate_derivative(layer.activation, pre[k]);
    }
    // implicit barrier: dz is final below
#pragma omp for schedule(static)
    for (std::ptrdiff_t oo = 0; oo < n_rows; ++oo) {
      const auto o = static_cast<std::size_t>(oo);
      double gb = 0.0;
      double* __restrict gw = grad_weights.data() + o * ni;
      for (std::size_t i = 0; i < ni; ++i) gw[i] = 0.0;
      for (std::size_t b = 0; b < batch; ++b) {
        const double d = dz[b * no + o];
        gb += d;
        const double* __restrict xr = x + b * ni;
        for (std::size_t i = 0; i < ni; ++i) gw[i] += d * xr[i];
      }
      grad_bias[o] = gb;
    }
    if (!grad_in.empty()) {
#pragma omp for schedule(static)
      for (std::ptrdiff_t bb = 0; bb < n_batch; ++bb) {
        const auto b = static_cast<std::size_t>(bb);
        double* __restrict gi = grad_in.data() + b * ni;
        for (std::size_t i = 0; i < ni; ++i) gi[i] = 0.0;
        for (std::size_t o = 0; o < no; ++o) {
          const double d = dz[b * no + o];
          const double* __restrict wr = w + o * ni;
          for (std::size_t i = 0; i < ni; ++i) gi[i] += d * wr[i];
        }
      }
    }
  }
}

}  // namespace eepc::kernels
