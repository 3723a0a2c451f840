#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eepc/bb_solver.hpp"
#include "eepc/dataset.hpp"
#include "eepc/training.hpp"
#include "test_support.hpp"

using namespace eepc;

namespace {

DatasetSample make_sample(const ProblemInstance& inst, const std::vector<double>& normalized_p) {
  DatasetSample s;
  s.links = inst.links();
  s.features = featurize(inst);
  s.label = label(normalized_p);
  std::vector<double> p(inst.links());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = normalized_p[i] * inst.p_max(i);
  s.objective = objective(p, inst, Metric::wsee);
  return s;
}

std::vector<DatasetSample> random_samples(std::mt19937_64& rng, std::size_t n, std::size_t L) {
  testing_support::RandomSpec spec;
  spec.pmax_lo = 0.01;
  spec.pmax_hi = 10.0;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<DatasetSample> out;
  for (std::size_t k = 0; k < n; ++k) {
    const auto inst = testing_support::random_instance(rng, L, spec);
    std::vector<double> p(L);
    for (auto& v : p) v = u(rng);
    out.push_back(make_sample(inst, p));
  }
  return out;
}

}  // namespace

TEST_CASE("permutation augmentation") {
  std::mt19937_64 rng(1);
  testing_support::RandomSpec spec;
  spec.pmax_lo = 0.1;
  spec.pmax_hi = 10.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t L = 2 + trial % 3;
    const auto inst = testing_support::random_instance(rng, L, spec);
    const auto p = testing_support::random_point(rng, std::vector<double>(L, 0.01),
                                                 std::vector<double>(L, 1.0));
    const auto s = make_sample(inst, p);

    std::vector<std::size_t> id(L);
    std::iota(id.begin(), id.end(), std::size_t{0});
    CHECK(augment_permute(s, id) == s);

    std::vector<std::size_t> sigma = id;
    std::shuffle(sigma.begin(), sigma.end(), rng);
    std::vector<std::size_t> inverse(L);
    for (std::size_t i = 0; i < L; ++i) inverse[sigma[i]] = i;
    const auto t = augment_permute(s, sigma);
    CHECK(augment_permute(t, inverse) == s);

    // the permuted sample describes the relabeled network with the same objective
    const auto relabeled = inst.permuted(sigma);
    const auto f = featurize(relabeled);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(t.features[k] == doctest::Approx(f[k]).epsilon(1e-12));
    const auto back = defeaturize(t.features, L, 4.0, 1.0);
    std::vector<double> q(L);
    for (std::size_t i = 0; i < L; ++i) q[i] = std::pow(10.0, t.label[i]) * back.p_max(i);
    CHECK(objective(q, back, Metric::wsee) == doctest::Approx(s.objective).epsilon(1e-10));
  }
  const auto s = random_samples(rng, 1, 3)[0];
  const std::vector<std::size_t> dup{0, 0, 1};
  CHECK_THROWS_AS(augment_permute(s, dup), std::invalid_argument);
}

TEST_CASE("zero learning rate leaves the network unchanged") {
  std::mt19937_64 rng(2);
  const auto data = random_samples(rng, 40, 2);
  const Mlp start = init_mlp(Architecture::small(2), 4);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch = 16;
  cfg.nadam.learning_rate = 0.0;
  const auto r = train(start, data, data, cfg);
  CHECK(r.model == start);
  REQUIRE(r.history.train_mse.size() == 3);
  CHECK(r.history.val_mse[0] == r.history.val_mse[2]);
}

TEST_CASE("memorizes a handful of samples") {
  std::mt19937_64 rng(3);
  const auto data = random_samples(rng, 10, 2);
  TrainConfig cfg;
  cfg.epochs = 2000;
  cfg.batch = 10;
  cfg.augment = false;
  cfg.nadam.learning_rate = 0.01;
  const auto r = train(init_mlp(Architecture::parse("32:elu,32:elu", 2), 1), data, {}, cfg);
  CHECK(r.history.train_mse.back() < 1e-3);
  CHECK(std::isnan(r.history.val_mse.back()));
}

TEST_CASE("training is deterministic") {
  std::mt19937_64 rng(4);
  const auto data = random_samples(rng, 60, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch = 8;
  std::size_t calls = 0;
  const auto a = train(init_mlp(Architecture::small(3), 9), data, data, cfg,
                       [&](std::size_t, double, double) { ++calls; });
  const auto b = train(init_mlp(Architecture::small(3), 9), data, data, cfg);
  CHECK(calls == 5);
  CHECK(a.model == b.model);
  CHECK(a.history.train_mse == b.history.train_mse);
  cfg.seed = 2;
  CHECK_FALSE(train(init_mlp(Architecture::small(3), 9), data, data, cfg).model == a.model);

  cfg.epochs = 0;
  CHECK_THROWS_AS(train(init_mlp(Architecture::small(3), 9), data, data, cfg), std::invalid_argument);
  cfg.epochs = 1;
  CHECK_THROWS_AS(train(init_mlp(Architecture::small(2), 9), data, data, cfg), std::invalid_argument);
}

TEST_CASE("predicted powers are always feasible") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 30.0);
  const ProblemInstance inst({1.0, 2.0, 3.0}, std::vector<double>(6, 0.1), {0.5, 2.0, 8.0},
                             {4, 4, 4}, {1, 1, 1}, {1, 1, 1});
  int bad = 0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> o{g(rng), g(rng), g(rng)};
    if (k % 100 == 0) o[k % 3] = std::nan("");
    if (k % 101 == 0) o[1] = INFINITY;
    bad += !is_feasible(powers_from_output(o, inst), inst);
  }
  CHECK(bad == 0);
  const auto full = powers_from_output(std::vector<double>{0.0, 0.0, -1.0}, inst);
  CHECK(full[0] == 0.5);
  CHECK(full[1] == 2.0);
  CHECK(full[2] == doctest::Approx(0.8));

  const Mlp m = init_mlp(Architecture::small(3), 1);
  CHECK(is_feasible(predict_powers(m, inst), inst));
}

TEST_CASE("evaluation statistics") {
  std::mt19937_64 rng(6);
  const Mlp m = init_mlp(Architecture::small(2), 2);
  auto data = random_samples(rng, 30, 2);
  for (auto& s : data) {
    const auto inst = defeaturize(s.features, 2, 4.0, 1.0);
    s.objective = objective(powers_from_output(forward(m, s.features), inst), inst, Metric::wsee);
  }
  data[3].objective = 0.0;
  const auto stats = evaluate(m, data, 4.0, 1.0);
  CHECK(stats.skipped == 1);
  CHECK(stats.samples.size() == 29);
  for (double e : stats.errors) CHECK(e < 1e-12);
  CHECK(stats.median < 1e-12);
  CHECK(stats.cdf.front().fraction == 1.0);

  const std::vector<double> errs{0.5, 0.01, 0.2, 0.03};
  const auto cdf = empirical_cdf(errs, default_cdf_grid());
  CHECK(cdf.size() == 61);
  CHECK(cdf.front().error == doctest::Approx(1e-6));
  CHECK(cdf.back().fraction == 1.0);
  for (std::size_t k = 1; k < cdf.size(); ++k) CHECK(cdf[k].fraction >= cdf[k - 1].fraction);
  const std::vector<double> at{0.01, 0.1, 0.25};
  const auto pts = empirical_cdf(errs, at);
  CHECK(pts[0].fraction == 0.25);
  CHECK(pts[1].fraction == 0.5);
  CHECK(pts[2].fraction == 0.75);
}

TEST_CASE("augmentation makes predictions equivariant") {
  // one 2-link network; with augmentation the net sees both orderings
  const ProblemInstance inst({50.0, 3.0}, {0.2, 1.5}, {1.0, 1.0}, {4, 4}, {1, 1}, {1, 1});
  const auto opt = solve_global(inst, Metric::wsee, Tolerance::relative(1e-4));
  const auto s = make_sample(inst, opt.p);
  const std::vector<DatasetSample> data{s};
  TrainConfig cfg;
  cfg.epochs = 3000;
  cfg.batch = 1;
  cfg.nadam.learning_rate = 0.005;
  const auto model = train(init_mlp(Architecture::parse("16:elu,16:elu", 2), 3), data, {}, cfg).model;
  const std::vector<std::size_t> swap{1, 0};
  const auto t = augment_permute(s, swap);
  const auto ya = forward(model, s.features);
  const auto yb = forward(model, t.features);
  CHECK(std::abs(ya[0] - yb[1]) < 1e-3);
  CHECK(std::abs(ya[1] - yb[0]) < 1e-3);
}
