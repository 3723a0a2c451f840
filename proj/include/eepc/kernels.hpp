#pragma once

#include <cstddef>
#include <span>

#include "eepc/mlp.hpp"

// Dense-layer kernels in two flavours: a plain serial reference and an
// OpenMP version. Every output element is accumulated by a single thread in
// the same order as the reference, so both produce bit-identical results.
namespace eepc::kernels {

enum class Exec { serial, parallel };

/// pre[b, o] = sum_i in[b, i] W[o, i] + bias[o];  out = act(pre)
void dense_forward(const DenseLayer& layer, std::span<const double> in, std::size_t batch,
                   std::span<double> pre, std::span<double> out, Exec exec);

/// Given dL/d(out), overwrites `grad_out` with dL/d(pre) and fills the
/// parameter gradients and (when non-empty) dL/d(in).
void dense_backward(const DenseLayer& layer, std::span<const double> in,
                    std::span<const double> pre, std::span<double> grad_out,
                    std::size_t batch, std::span<double> grad_weights,
                    std::span<double> grad_bias, std::span<double> grad_in, Exec exec);

/// Process-wide default used by the high-level network functions.
Exec default_exec();
void set_default_exec(Exec exec);

}  // namespace eepc::kernels
