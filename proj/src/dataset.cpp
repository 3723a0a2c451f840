#include "eepc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eepc/config_file.hpp"

namespace eepc {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

double clipped_log10(double x, double clip) {
  return std::max(-clip, std::log10(x));
}

}  // namespace

std::vector<double> featurize(const ProblemInstance& inst, double clip) {
  const std::size_t l = inst.links();
  const ProblemInstance norm = normalize_instance(inst);
  std::vector<double> out;
  out.reserve(l * (l + 1));
  for (std::size_t i = 0; i < l; ++i) out.push_back(std::log10(norm.alpha(i)));
  for (double b : norm.beta_flat()) out.push_back(clipped_log10(b, clip));
  for (std::size_t i = 0; i < l; ++i) out.push_back(std::log10(inst.p_max(i)));
  for (double v : out) {
    if (!std::isfinite(v)) throw std::invalid_argument("featurize: non-finite feature");
  }
  return out;
}

std::size_t links_from_feature_count(std::size_t count) {
  std::size_t l = 1;
  while (l * (l + 1) < count) ++l;
  if (l * (l + 1) != count) {
    throw std::invalid_argument("feature count " + std::to_string(count) + " is not L(L+1)");
  }
  return l;
}

ProblemInstance defeaturize(std::span<const double> features, std::size_t links, double mu,
                            double p_circuit, double weight, double bandwidth) {
  const std::size_t l = links;
  if (features.size() != l * (l + 1)) {
    throw std::invalid_argument("defeaturize: feature vector length is not L(L+1)");
  }
  std::vector<double> p(l);
  std::vector<double> alpha(l);
  std::vector<double> beta(l * (l - 1));
  for (std::size_t i = 0; i < l; ++i) p[i] = std::pow(10.0, features[l * l + i]);
  for (std::size_t i = 0; i < l; ++i) alpha[i] = std::pow(10.0, features[i]) / p[i];
  for (std::size_t i = 0, k = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) {
      if (j == i) continue;
      beta[k] = std::pow(10.0, features[l + k]) / p[j];
      ++k;
    }
  }
  return ProblemInstance(std::move(alpha), std::move(beta), std::move(p),
                         std::vector<double>(l, mu), std::vector<double>(l, p_circuit),
                         std::vector<double>(l, weight), bandwidth);
}

std::vector<double> label(std::span<const double> normalized_powers, double clip) {
  std::vector<double> out(normalized_powers.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double p = normalized_powers[i];
    if (std::isnan(p) || p < 0.0) throw std::invalid_argument("label: power must be >= 0");
    out[i] = p > 0.0 ? clipped_log10(p, clip) : -clip;
  }
  return out;
}

std::string dataset_header(std::size_t links) {
  std::string h = "version,L,channel_id,pmax_dbw";
  for (std::size_t k = 0; k < links * (links + 1); ++k) h += ",feat_" + std::to_string(k);
  for (std::size_t k = 0; k < links; ++k) h += ",label_" + std::to_string(k);
  h += ",objective";
  return h;
}

std::string format_dataset(std::span<const DatasetSample> samples, std::size_t links) {
  std::string out = dataset_header(links);
  out += '\n';
  for (const DatasetSample& s : samples) {
    if (s.links != links || s.features.size() != links * (links + 1) || s.label.size() != links) {
      throw std::invalid_argument("format_dataset: sample dimensions do not match L");
    }
    out += std::to_string(kDatasetVersion) + ',' + std::to_string(links) + ',' +
           std::to_string(s.channel_id) + ',' + format_double17(s.pmax_dbw);
    for (double v : s.features) out += ',' + format_double17(v);
    for (double v : s.label) out += ',' + format_double17(v);
    out += ',' + format_double17(s.objective);
    out += '\n';
  }
  return out;
}

std::vector<DatasetSample> parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto cols = split_commas(line);
  std::size_t n_labels = 0;
  for (auto c : cols) n_labels += c.starts_with("label_");
  if (n_labels == 0 || line != dataset_header(n_labels)) {
    throw SchemaError("dataset: unrecognized header");
  }
  const std::size_t l = n_labels;
  const std::size_t n_feat = l * (l + 1);

  std::vector<DatasetSample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_commas(line);
    const std::string where = "dataset row " + std::to_string(row) + ": ";
    if (f.size() != cols.size()) {
      throw SchemaError(where + "expected " + std::to_string(cols.size()) + " columns, got " +
                        std::to_string(f.size()));
    }
    try {
      if (parse_u64(f[0]) != static_cast<std::uint64_t>(kDatasetVersion)) {
        throw SchemaError(where + "unsupported version " + std::string(f[0]));
      }
      DatasetSample s;
      s.links = parse_size(f[1]);
      if (s.links != l) throw SchemaError(where + "L disagrees with header");
      s.channel_id = parse_u64(f[2]);
      s.pmax_dbw = parse_double(f[3]);
      s.features.resize(n_feat);
      for (std::size_t k = 0; k < n_feat; ++k) s.features[k] = parse_double(f[4 + k]);
      s.label.resize(l);
      for (std::size_t k = 0; k < l; ++k) s.label[k] = parse_double(f[4 + n_feat + k]);
      s.objective = parse_double(f.back());
      out.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      throw SchemaError(where + e.what());
    }
  }
  return out;
}

void write_dataset(const std::string& path, std::span<const DatasetSample> samples,
                   std::size_t links) {
  write_file_atomic(path, format_dataset(samples, links));
}

std::vector<DatasetSample> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dataset(ss.str());
}

}  // namespace eepc
