#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eepc {

/// Power allocation in watts, one entry per link.
using Allocation = std::vector<double>;

enum class Metric { wsee, gee, wpee, wmee, wsr };

Metric parse_metric(std::string_view name);
std::string_view to_string(Metric metric);

/// Immutable description of an uplink interference network.
///
/// `alpha[i]` is the effective channel-to-noise ratio of link i and
/// `beta(i, j)` the cross-interference coefficient from link j into link i
/// (i != j). Cross terms are stored row-major with the diagonal skipped, so
/// row i holds the L-1 values beta(i, 0..L-1 \ {i}).
class ProblemInstance {
 public:
  ProblemInstance(std::vector<double> alpha, std::vector<double> beta, std::vector<double> p_max,
                  std::vector<double> mu, std::vector<double> p_circuit,
                  std::vector<double> weights, double bandwidth = 1.0);

  /// Same amplifier inefficiency, circuit power and unit weights for all links.
  static ProblemInstance uniform(std::vector<double> alpha, std::vector<double> beta,
                                 double p_max, double mu, double p_circuit,
                                 double bandwidth = 1.0);

  std::size_t links() const { return alpha_.size(); }

  double alpha(std::size_t i) const { return alpha_[i]; }
  double beta(std::size_t i, std::size_t j) const { return beta_[cross_index(i, j)]; }
  double p_max(std::size_t i) const { return p_max_[i]; }
  double mu(std::size_t i) const { return mu_[i]; }
  double p_circuit(std::size_t i) const { return p_circuit_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double bandwidth() const { return bandwidth_; }

  std::span<const double> alpha() const { return alpha_; }
  std::span<const double> beta_flat() const { return beta_; }
  std::span<const double> p_max() const { return p_max_; }
  std::span<const double> mu() const { return mu_; }
  std::span<const double> p_circuit() const { return p_circuit_; }
  std::span<const double> weights() const { return weights_; }

  /// Position of beta(i, j) in the flat cross-term array.
  std::size_t cross_index(std::size_t i, std::size_t j) const {
    return i * (links() - 1) + (j < i ? j : j - 1);
  }

  /// 1 + sum_{j != i} beta(i, j) * p_j
  double interference(std::span<const double> p, std::size_t i) const;

  /// Copy with the weights replaced.
  ProblemInstance with_weights(std::vector<double> weights) const;

  /// Links reordered so that link k of the result is link order[k] of this one.
  ProblemInstance permuted(std::span<const std::size_t> order) const;

 private:
  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<double> p_max_;
  std::vector<double> mu_;
  std::vector<double> p_circuit_;
  std::vector<double> weights_;
  double bandwidth_;
};

bool is_feasible(std::span<const double> p, const ProblemInstance& inst, double slack = 0.0);

double sinr(std::span<const double> p, const ProblemInstance& inst, std::size_t i);

/// log2(1 + sinr), multiplied by the bandwidth unless `normalized`.
double rate(std::span<const double> p, const ProblemInstance& inst, std::size_t i,
            bool normalized = true);

/// rate_i / (mu_i p_i + P_c,i)
double ee_link(std::span<const double> p, const ProblemInstance& inst, std::size_t i,
               bool normalized = true);

/// Bandwidth-free objective; this is what all solvers maximize.
double objective(std::span<const double> p, const ProblemInstance& inst, Metric metric);

/// Objective with every rate in bit/s (GEE, WSEE, WMEE, WSR scale by B;
/// WPEE by B^(sum of weights)).
double reported_objective(std::span<const double> p, const ProblemInstance& inst, Metric metric);

/// Partial derivative of the normalized rate of link `j` with respect to p_k.
double rate_derivative(std::span<const double> p, const ProblemInstance& inst, std::size_t j,
                       std::size_t k);

/// Gradient of the normalized WSEE.
std::vector<double> grad_wsee(std::span<const double> p, const ProblemInstance& inst);

/// Change of variables p_i = p~_i P_i: the returned instance has unit power
/// limits, alpha~_i = alpha_i P_i, beta~_ij = beta_ij P_j, mu~_i = mu_i P_i.
ProblemInstance normalize_instance(const ProblemInstance& inst);

enum class Baseline { max_power, best_only };

Allocation baseline(const ProblemInstance& inst, Baseline kind);

}  // namespace eepc
