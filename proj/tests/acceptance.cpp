// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eepc/bb_solver.hpp"
#include "eepc/config_file.hpp"
#include "eepc/lambert_w.hpp"
#include "eepc/pipeline.hpp"
#include "eepc/ratio.hpp"
#include "eepc/sca_solver.hpp"
#include "eepc/training.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace eepc;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

constexpr Metric kAll[] = {Metric::wsee, Metric::gee, Metric::wpee, Metric::wmee, Metric::wsr};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double norm2(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p) s += x * x;
  return std::sqrt(s);
}

BoxGeometry random_box(std::mt19937_64& rng, const ProblemInstance& inst) {
  const std::size_t L = inst.links();
  BoxGeometry b{std::vector<double>(L), std::vector<double>(L)};
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < L; ++i) {
    double x = u(rng) * inst.p_max(i);
    double y = u(rng) * inst.p_max(i);
    if (x > y) std::swap(x, y);
    b.lower[i] = x;
    b.upper[i] = y;
  }
  return b;
}

/// Physical instance from the scenario generator at a random budget in [-30, 20] dBW.
ProblemInstance scenario_instance(std::mt19937_64& rng, std::size_t L, std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.users = L;
  std::uniform_real_distribution<double> dbw(-30.0, 20.0);
  return assemble_instance(generate_scenario(cfg, seed), dbw(rng), 4.0, 1.0, 1.0, cfg.bandwidth_hz);
}

Verdict criterion1() {
  std::mt19937_64 rng(101);
  int failures = 0;
  double worst = 1e300;
  for (std::size_t k = 0; k < 70; ++k) {
    const std::size_t L = k < 50 ? 2 : 3;
    const auto inst = normalize_instance(scenario_instance(rng, L, stream_seed(101, k)));
    const auto r = solve_global(inst, Metric::wsee, Tolerance::relative(0.01));
    const auto net = testing_support::to_net(inst);
    const auto g = oracle::grid_max(std::vector<double>(L, 0.0), std::vector<double>(L, 1.0), 200,
                                    [&](const std::vector<double>& p) { return oracle::wsee(net, p); });
    const double ratio = r.value / (g.value / 1.01);
    worst = std::min(worst, ratio);
    failures += !(r.certified && ratio >= 1.0);
  }
  return {failures == 0, fmt("70 instances, %d below oracle/1.01, min value/(oracle/1.01) = %.6f",
                             failures, worst)};
}

Verdict criterion2() {
  std::mt19937_64 rng(102);
  testing_support::RandomSpec spec;
  spec.random_weights = true;
  long validity = 0, monotone = 0, pairs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + trial % 4;
    const auto inst = testing_support::random_instance(rng, L, spec);
    const auto box = random_box(rng, inst);
    for (Metric m : kAll) {
      const auto parent = bound(box, inst, m);
      for (int k = 0; k < 1000; ++k) {
        const auto p = testing_support::random_point(rng, box.lower, box.upper);
        validity += objective(p, inst, m) > parent.value + 1e-9;
      }
      bool flat = false;
      for (std::size_t i = 0; i < L; ++i) flat = flat || !(box.upper[i] > box.lower[i]);
      if (flat) continue;
      const Split sp = bisect(box, parent.candidate);
      for (const BoxGeometry* child : {&sp.lower_part, &sp.upper_part}) {
        monotone += bound(*child, inst, m).value > parent.value + 1e-9;
        ++pairs;
      }
    }
  }
  return {validity == 0 && monotone == 0,
          fmt("200 boxes x 5 metrics x 1000 points: %ld validity and %ld of %ld parent/child "
              "violations",
              validity, monotone, pairs)};
}

Verdict criterion3() {
  const double branch = -1.0 / std::numbers::e;
  int failures = 0;
  double worst = 0.0;
  auto check = [&](double x) {
    const double w = lambert_w0(x);
    const double res = std::abs(w * std::exp(w) - x) / std::max(1.0, std::abs(x));
    worst = std::max(worst, res);
    failures += !(res <= 1e-12);
  };
  for (int k = 0; k < 5000; ++k) {
    const double d = std::pow(10.0, -9.0 + 9.0 * k / 4999.0) * (-branch);
    check(branch + std::min(d, -branch));
  }
  for (int k = 0; k < 5000; ++k) check(std::pow(10.0, -12.0 + 21.0 * k / 4999.0));
  return {failures == 0, fmt("10000 points, %d failures, worst scaled residual %.3g", failures, worst)};
}

Verdict criterion4() {
  std::mt19937_64 rng(104);
  int bad_res = 0, bad_arg = 0;
  double worst_res = 0.0, worst_arg = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double g = testing_support::log_uniform(rng, 1e-2, 1e6);
    const double mu = testing_support::log_uniform(rng, 0.1, 100.0);
    const double pc = testing_support::log_uniform(rng, 0.01, 10.0);
    const double p = ratio_stationary_point(g, mu, pc);
    const double lhs = g * (mu * p + pc) / (1.0 + g * p);
    const double res = std::abs(lhs - mu * std::log1p(g * p)) / std::max(1.0, std::abs(lhs));
    worst_res = std::max(worst_res, res);
    bad_res += !(res < 1e-8);
    const double hi = std::max(1.0, 4.0 * p);
    const double ref = oracle::golden_argmax_ld(
        [&](long double x) { return std::log2(1.0L + g * x) / (mu * x + pc); }, 0.0, hi);
    const double diff = std::abs(ratio_max(g, mu, pc, 0.0, hi).argmax - ref);
    worst_arg = std::max(worst_arg, diff);
    bad_arg += !(diff < 1e-6);
  }
  return {bad_res == 0 && bad_arg == 0,
          fmt("1000 ratios: worst stationarity residual %.3g, worst argmax gap %.3g", worst_res,
              worst_arg)};
}

Verdict criterion5() {
  std::mt19937_64 rng(105);
  int nonmono = 0, bad_res = 0, bad_l1 = 0, bad_fd = 0;
  double worst_res = 0.0, worst_l1 = 0.0, worst_fd = 0.0;
  for (std::size_t k = 0; k < 100; ++k) {
    const auto inst = normalize_instance(scenario_instance(rng, 4, stream_seed(105, k)));
    const auto r = solve_sca(inst, baseline(inst, Baseline::max_power));
    const auto& f = r.trace.objective;
    nonmono += !std::is_sorted(f.begin(), f.end());
    const double scaled = r.trace.stationarity / (1.0 + norm2(r.result.p));
    worst_res = std::max(worst_res, scaled);
    bad_res += !(scaled < 1e-4);

    // surrogate slope against the true gradient at an interior expansion point
    const auto pt = testing_support::random_point(rng, std::vector<double>(4, 0.05),
                                                  std::vector<double>(4, 0.95));
    const auto g = grad_wsee(pt, inst);
    for (std::size_t i = 0; i < 4; ++i) {
      const double h = 1e-6 * std::max(pt[i], 1e-3);
      const double fd = (surrogate(pt[i] + h, i, pt, inst) - surrogate(pt[i] - h, i, pt, inst)) / (2 * h);
      const double e = oracle::rel_err(fd, g[i], 1e-3 * (1.0 + std::abs(g[i])));
      worst_fd = std::max(worst_fd, e);
      bad_fd += !(e < 1e-5);
    }
  }
  for (std::size_t k = 0; k < 50; ++k) {
    const auto inst = normalize_instance(scenario_instance(rng, 1, stream_seed(205, k)));
    const auto s = solve_sca(inst, baseline(inst, Baseline::max_power));
    const auto b = solve_global(inst, Metric::wsee, Tolerance::relative(1e-4));
    const double gap = (b.value - s.result.value) / b.value;
    worst_l1 = std::max(worst_l1, gap);
    bad_l1 += !(gap <= 1e-4);
  }
  return {nonmono == 0 && bad_res == 0 && bad_l1 == 0 && bad_fd == 0,
          fmt("L=4: %d non-monotone traces, worst residual/(1+|p|) %.3g; L=1: worst gap to BB "
              "%.3g; surrogate FD worst rel. error %.3g",
              nonmono, worst_res, worst_l1, worst_fd)};
}

Verdict criterion6() {
  std::mt19937_64 rng(106);
  testing_support::RandomSpec spec;
  spec.random_weights = true;
  int bad = 0;
  double worst = 0.0;
  auto expect = [&](double got, double want) {
    const double e = oracle::rel_err(got, want);
    worst = std::max(worst, e);
    bad += !(e < 1e-9);
  };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + trial % 4;
    const auto inst = testing_support::random_instance(rng, L, spec);
    const auto box = random_box(rng, inst);
    const auto net = testing_support::to_net(inst);
    std::vector<double> maxima(L);
    for (std::size_t i = 0; i < L; ++i) {
      double interference = 1.0;
      for (std::size_t j = 0; j < L; ++j) {
        if (j != i) interference += net.beta[i][j] * box.lower[j];
      }
      const double gain = net.alpha[i] / interference;
      auto ee = [&](long double p) {
        return std::log2(1.0L + gain * p) / (net.mu[i] * p + net.pc[i]);
      };
      const double x = oracle::golden_argmax_ld(ee, box.lower[i], box.upper[i]);
      maxima[i] = static_cast<double>(ee(x));
    }
    double prod = 1.0, mn = 1e300;
    for (std::size_t i = 0; i < L; ++i) {
      prod *= std::pow(maxima[i], net.w[i]);
      mn = std::min(mn, net.w[i] * maxima[i]);
    }
    expect(bound(box, inst, Metric::wpee).value, prod);
    expect(bound(box, inst, Metric::wmee).value, mn);
    bad += bound(box, inst, Metric::wsr).candidate != box.upper;
    const auto p = testing_support::random_point(rng, box.lower, box.upper);
    expect(bound(BoxGeometry{p, p}, inst, Metric::gee).value, oracle::gee(net, p));
  }
  return {bad == 0, fmt("200 boxes: %d identity violations, worst rel. error %.3g", bad, worst)};
}

// -- learning experiment shared by criteria 7, 9 and 10 --------------------

struct Learning {
  DatasetRun train_run;
  std::vector<DatasetSample> val;
  std::vector<DatasetSample> test;
  std::vector<DatasetSample> hata;
  TrainResult trained;
  double gen_seconds = 0.0;
  double train_seconds = 0.0;
  std::size_t flagged = 0;
};

DatasetJob job_for(std::size_t channels, std::uint64_t first, const ScenarioConfig& scenario) {
  DatasetJob job;
  job.scenario = scenario;
  job.channels = channels;
  job.first_channel = first;
  job.pmax_dbw = parse_grid("-30:20:1");
  return job;
}

const Learning& learning() {
  static std::optional<Learning> cache;
  if (cache) return *cache;
  Learning l;
  ScenarioConfig power_law;
  power_law.users = 4;
  const auto t0 = std::chrono::steady_clock::now();
  l.train_run = generate_dataset(job_for(100, 0, power_law));
  const auto val = generate_dataset(job_for(10, 100, power_law));
  const auto test = generate_dataset(job_for(20, 110, power_law));
  ScenarioConfig hata = power_law;
  hata.pathloss = PathLossModel::hata_cost231_urban;
  hata.carrier_ghz = 1.9;
  hata.shadowing_db = 8.0;
  hata.seed = 2;
  const auto shifted = generate_dataset(job_for(20, 0, hata));
  const auto t1 = std::chrono::steady_clock::now();
  l.val = val.samples;
  l.test = test.samples;
  l.hata = shifted.samples;
  l.flagged = l.train_run.flagged + val.flagged + test.flagged + shifted.flagged;

  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch = 128;
  cfg.seed = 7;
  std::fprintf(stderr, "training on %zu samples\n", l.train_run.samples.size());
  l.trained = train(init_mlp(Architecture::paper(4), 7), l.train_run.samples, l.val, cfg,
                    [](std::size_t e, double tr, double va) {
                      if ((e + 1) % 20 == 0) std::fprintf(stderr, "epoch %zu train %.5f val %.5f\n", e + 1, tr, va);
                    });
  const auto t2 = std::chrono::steady_clock::now();
  l.gen_seconds = std::chrono::duration<double>(t1 - t0).count();
  l.train_seconds = std::chrono::duration<double>(t2 - t1).count();
  cache = std::move(l);
  return *cache;
}

/// Largest rise of the 10-epoch moving mean across any 50-epoch window.
double worst_window_rise(const std::vector<double>& loss) {
  const std::size_t smooth = 10, window = 50;
  std::vector<double> m(loss.size(), 0.0);
  for (std::size_t t = smooth - 1; t < loss.size(); ++t) {
    m[t] = std::accumulate(loss.begin() + static_cast<std::ptrdiff_t>(t + 1 - smooth),
                           loss.begin() + static_cast<std::ptrdiff_t>(t + 1), 0.0) / smooth;
  }
  double worst = 0.0;
  for (std::size_t s = smooth - 1; s + window < loss.size(); ++s) {
    worst = std::max(worst, m[s + window] / m[s]);
  }
  return worst;
}

Verdict criterion7() {
  const Learning& l = learning();
  const auto stats = evaluate(l.trained.model, l.test, 4.0, 1.0);
  const double rise = worst_window_rise(l.trained.history.val_mse);

  const auto grid = parse_grid("-30:20:1");
  std::vector<double> opt(grid.size(), 0.0), pred(grid.size(), 0.0);
  for (const auto& s : stats.samples) {
    const auto g = static_cast<std::size_t>(std::lround(l.test[s.index].pmax_dbw + 30.0));
    opt[g] += s.optimal;
    pred[g] += s.predicted;
  }
  double worst_curve = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    worst_curve = std::max(worst_curve, std::abs(pred[g] - opt[g]) / opt[g]);
  }
  const bool pass = rise <= 1.10 && stats.median < 0.1 && worst_curve <= 0.10 && l.flagged == 0;
  return {pass, fmt("median error %.4f, mean %.4f, worst curve gap %.4f, worst 50-epoch val rise "
                    "x%.3f, final val mse %.4f, %zu flagged labels, gen %.0f s, train %.0f s",
                    stats.median, stats.mean, worst_curve, rise, l.trained.history.val_mse.back(),
                    l.flagged, l.gen_seconds, l.train_seconds)};
}

Verdict criterion8() {
  const auto grid = parse_grid("-30:20:2");
  const std::vector<Method> methods{Method::optimal, Method::sca, Method::sca_os,
                                    Method::max_power, Method::best_only};
  ScenarioConfig cfg;
  int order_bad = 0;
  double bb_low = 0.0, mp_low = 0.0;
  for (std::uint64_t c = 0; c < 20; ++c) {
    const auto real = generate_scenario(cfg, stream_seed(108, c));
    const auto sw = sweep_channel(real, c, grid, 4.0, 1.0, methods);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double bb = sw.values[0][g];
      order_bad += sw.values[1][g] > bb * 1.01;
      order_bad += sw.values[2][g] > sw.values[1][g];
    }
    order_bad += !sw.certified;
    bb_low += sw.values[0][0];
    mp_low += sw.values[3][0];
  }
  const double mp_gap = (bb_low - mp_low) / bb_low;

  // one strong user, three weak ones that interfere with it
  std::mt19937_64 rng(208);
  double worst_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> alpha{testing_support::log_uniform(rng, 1e2, 1e3)};
    for (int j = 0; j < 3; ++j) alpha.push_back(testing_support::log_uniform(rng, 1e-3, 1e-2));
    std::vector<double> beta(12);
    for (auto& b : beta) b = testing_support::log_uniform(rng, 1e-2, 1.0);
    const ProblemInstance inst(alpha, beta, std::vector<double>(4, dbw_to_watts(20.0)),
                               std::vector<double>(4, 4.0), std::vector<double>(4, 1.0),
                               std::vector<double>(4, 1.0));
    const double bb = solve_global(normalize_instance(inst), Metric::wsee).value;
    const double bo = objective(baseline(inst, Baseline::best_only), inst, Metric::wsee);
    worst_gap = std::max(worst_gap, std::abs(bb - bo) / bb);
  }
  const bool pass = order_bad == 0 && mp_gap <= 0.05 && worst_gap <= 0.01;
  return {pass, fmt("20 channels: %d ordering violations; max-power gap at -30 dBW %.4f; "
                    "dominant-user best-only gap at 20 dBW %.4f",
                    order_bad, mp_gap, worst_gap)};
}

Verdict criterion9() {
  const Learning& l = learning();
  std::vector<double> t;
  for (const auto& r : l.train_run.reports) t.push_back(r.seconds);
  const double med = median(t);
  const double worst = *std::max_element(t.begin(), t.end());
  return {med < 0.5, fmt("%zu L=4 solves: median %.3g ms, max %.3g ms", t.size(), med * 1e3, worst * 1e3)};
}

Verdict criterion10() {
  const Learning& l = learning();
  const auto in = evaluate(l.trained.model, l.test, 4.0, 1.0);
  const auto out = evaluate(l.trained.model, l.hata, 4.0, 1.0);
  const double ratio = out.median / in.median;
  return {ratio < 10.0, fmt("median error %.4f in distribution, %.4f under Hata + 8 dB shadowing "
                            "(x%.2f); %zu shifted samples evaluated",
                            in.median, out.median, ratio, out.samples.size())};
}

}  // namespace

int main() {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3,
                                                       criterion4, criterion5, criterion6,
                                                       criterion7, criterion8, criterion9,
                                                       criterion10};
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s  %s  [%.1f s]\n", k + 1, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), s);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
