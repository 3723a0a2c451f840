#include "eepc/pipeline.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eepc/sca_solver.hpp"
#include "eepc/training.hpp"

namespace eepc {

namespace {

struct Outcome {
  DatasetSample sample;
  SampleReport report;
};

Outcome solve_sample(const ProblemInstance& inst, std::uint64_t channel_id, double pmax_dbw,
                     const DatasetJob& job) {
  Outcome out;
  out.report.channel_id = channel_id;
  out.report.pmax_dbw = pmax_dbw;
  SolveLimits limits;
  limits.max_boxes = job.max_boxes;
  if (job.max_seconds > 0.0) limits.max_seconds = job.max_seconds;
  const ProblemInstance norm = normalize_instance(inst);
  const SolveResult r = solve_global(norm, Metric::wsee, job.tolerance, limits);
  out.report.seconds = r.wall_seconds;
  out.report.iterations = r.iterations;
  out.report.certified = r.certified;
  out.sample.links = inst.links();
  out.sample.channel_id = channel_id;
  out.sample.pmax_dbw = pmax_dbw;
  out.sample.features = featurize(inst, job.clip);
  out.sample.label = label(r.p, job.clip);
  out.sample.objective = r.value;
  return out;
}

}  // namespace

void DatasetJob::validate() const {
  scenario.validate();
  if (channels == 0) throw std::invalid_argument("dataset: channel count must be >= 1");
  if (pmax_dbw.empty()) throw std::invalid_argument("dataset: empty P_max grid");
  for (double v : pmax_dbw) {
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: P_max values must be finite");
  }
  if (!(mu > 0.0) || !(p_circuit > 0.0)) {
    throw std::invalid_argument("dataset: mu and circuit power must be > 0");
  }
  if (!(tolerance.epsilon > 0.0)) throw std::invalid_argument("dataset: tolerance must be > 0");
  if (!(max_seconds >= 0.0)) throw std::invalid_argument("dataset: time limit must be >= 0");
}

ChannelRealization job_channel(const DatasetJob& job, std::uint64_t id) {
  return generate_scenario(job.scenario, stream_seed(job.scenario.seed, id));
}

DatasetSample label_instance(const ProblemInstance& inst, std::uint64_t channel_id,
                             double pmax_dbw, const Tolerance& tol, double clip) {
  DatasetJob job;
  job.tolerance = tol;
  job.clip = clip;
  Outcome o = solve_sample(inst, channel_id, pmax_dbw, job);
  if (!o.report.certified) throw std::runtime_error("label_instance: solve not certified");
  return std::move(o.sample);
}

DatasetRun generate_dataset(const DatasetJob& job, std::size_t workers) {
  job.validate();
  const std::size_t grid = job.pmax_dbw.size();
  const std::size_t total = job.channels * grid;
  std::vector<Outcome> outcomes(total);
  const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(job.channels); ++c) {
    const std::uint64_t id = job.first_channel + static_cast<std::uint64_t>(c);
    std::string channel_error;
    ChannelRealization real;
    try {
      real = job_channel(job, id);
    } catch (const std::exception& e) {
      channel_error = e.what();
    }
    for (std::size_t g = 0; g < grid; ++g) {
      Outcome& o = outcomes[static_cast<std::size_t>(c) * grid + g];
      o.report.channel_id = id;
      o.report.pmax_dbw = job.pmax_dbw[g];
      if (!channel_error.empty()) {
        o.report.error = channel_error;
        continue;
      }
      try {
        const ProblemInstance inst = assemble_instance(real, job.pmax_dbw[g], job.mu,
                                                       job.p_circuit, 1.0, job.scenario.bandwidth_hz);
        o = solve_sample(inst, id, job.pmax_dbw[g], job);
      } catch (const std::exception& e) {
        o.report.error = e.what();
      }
    }
  }

  DatasetRun run;
  run.reports.reserve(total);
  for (Outcome& o : outcomes) {
    if (o.report.flagged()) ++run.flagged;
    if (o.report.error.empty()) run.samples.push_back(std::move(o.sample));
    run.reports.push_back(std::move(o.report));
  }
  return run;
}

Method parse_method(const std::string& name) {
  if (name == "optimal") return Method::optimal;
  if (name == "ann") return Method::ann;
  if (name == "sca") return Method::sca;
  if (name == "sca-os") return Method::sca_os;
  if (name == "max-power") return Method::max_power;
  if (name == "best-only") return Method::best_only;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::string to_string(Method method) {
  switch (method) {
    case Method::optimal: return "optimal";
    case Method::ann: return "ann";
    case Method::sca: return "sca";
    case Method::sca_os: return "sca-os";
    case Method::max_power: return "max-power";
    case Method::best_only: return "best-only";
  }
  return "?";
}

ChannelSweep sweep_channel(const ChannelRealization& channel, std::uint64_t channel_id,
                           std::span<const double> pmax_dbw, double mu, double p_circuit,
                           std::span<const Method> methods, const Mlp* model,
                           const Tolerance& tol) {
  if (!std::is_sorted(pmax_dbw.begin(), pmax_dbw.end())) {
    throw std::invalid_argument("sweep: P_max grid must be ascending");
  }
  const bool wants_ann = std::find(methods.begin(), methods.end(), Method::ann) != methods.end();
  if (wants_ann && model == nullptr) throw std::invalid_argument("sweep: ann requires a model");

  ChannelSweep out;
  out.channel_id = channel_id;
  out.pmax_dbw.assign(pmax_dbw.begin(), pmax_dbw.end());
  out.methods.assign(methods.begin(), methods.end());
  const auto make = [&](double dbw) {
    return assemble_instance(channel, dbw, mu, p_circuit, 1.0, 1.0);
  };
  for (Method m : methods) {
    std::vector<double> row;
    row.reserve(pmax_dbw.size());
    if (m == Method::sca || m == Method::sca_os) {
      const auto results =
          sweep(pmax_dbw, make, m == Method::sca ? SweepMode::double_init : SweepMode::one_shot);
      for (const ScaResult& r : results) row.push_back(r.result.value);
    } else {
      for (double dbw : pmax_dbw) {
        const ProblemInstance inst = make(dbw);
        switch (m) {
          case Method::optimal: {
            const SolveResult r = solve_global(normalize_instance(inst), Metric::wsee, tol);
            out.certified = out.certified && r.certified;
            row.push_back(r.value);
            break;
          }
          case Method::ann:
            row.push_back(objective(predict_powers(*model, inst), inst, Metric::wsee));
            break;
          case Method::max_power:
            row.push_back(objective(baseline(inst, Baseline::max_power), inst, Metric::wsee));
            break;
          default:
            row.push_back(objective(baseline(inst, Baseline::best_only), inst, Metric::wsee));
            break;
        }
      }
    }
    out.values.push_back(std::move(row));
  }
  return out;
}

}  // namespace eepc
