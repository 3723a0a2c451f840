#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eepc/model.hpp"

namespace eepc {

inline constexpr double kDefaultClip = 20.0;
inline constexpr int kDatasetVersion = 1;

/// Log-domain input vector of length L(L+1) for the instance:
/// log10 alpha~ (L), log10 beta~ row-major without diagonal (L(L-1)), log10 P (L),
/// where alpha~, beta~ are the coefficients of the unit-power normalized
/// instance and P the physical power limits. Zero cross terms clip to -clip.
std::vector<double> featurize(const ProblemInstance& inst, double clip = kDefaultClip);

/// Inverse of featurize. Amplifier inefficiency, circuit power and weights are
/// not part of the features and must be supplied.
ProblemInstance defeaturize(std::span<const double> features, std::size_t links, double mu,
                            double p_circuit, double weight = 1.0, double bandwidth = 1.0);

/// max(-clip, log10 p~) for normalized optimal powers p~ in [0, 1].
std::vector<double> label(std::span<const double> normalized_powers, double clip = kDefaultClip);

/// Number of links implied by a feature vector of length L(L+1).
std::size_t links_from_feature_count(std::size_t count);

struct DatasetSample {
  std::size_t links = 0;
  std::uint64_t channel_id = 0;
  double pmax_dbw = 0.0;
  std::vector<double> features;
  std::vector<double> label;
  /// Bandwidth-free WSEE of the labelled optimum.
  double objective = 0.0;

  bool operator==(const DatasetSample&) const = default;
};

/// Malformed dataset file: wrong header, column count, version or values.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string dataset_header(std::size_t links);
std::string format_dataset(std::span<const DatasetSample> samples, std::size_t links);
std::vector<DatasetSample> parse_dataset(const std::string& text);

/// Throws IoError on file-system failures.
void write_dataset(const std::string& path, std::span<const DatasetSample> samples,
                   std::size_t links);
std::vector<DatasetSample> read_dataset(const std::string& path);

}  // namespace eepc
