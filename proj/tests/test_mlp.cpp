#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "eepc/config_file.hpp"
#include "eepc/mlp.hpp"

using namespace eepc;

namespace {

DenseLayer layer(std::size_t in, std::size_t out, Activation act, std::vector<double> w,
                 std::vector<double> b) {
  return DenseLayer{in, out, std::move(w), std::move(b), act};
}

std::vector<double> randn(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

Mlp tiny(Activation hidden) {
  Architecture a{3, {{5, hidden}, {4, hidden}}, 2};
  return init_mlp(a, 11);
}

}  // namespace

TEST_CASE("activations") {
  CHECK(activate(Activation::elu, -1.0) == doctest::Approx(std::exp(-1.0) - 1.0).epsilon(1e-15));
  CHECK(activate(Activation::elu, 2.0) == 2.0);
  CHECK(activate(Activation::relu, -3.0) == 0.0);
  CHECK(activate(Activation::relu, 3.0) == 3.0);
  CHECK(activate(Activation::linear, -3.0) == -3.0);
  CHECK(activate_derivative(Activation::elu, 0.0) == 1.0);
  CHECK(activate_derivative(Activation::relu, 0.0) == 0.0);
  CHECK(activate_derivative(Activation::elu, -2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(parse_activation("relu") == Activation::relu);
  CHECK_THROWS_AS(parse_activation("tanh"), std::invalid_argument);
}

TEST_CASE("initialization") {
  const auto arch = Architecture::paper(4);
  const Mlp a = init_mlp(arch, 1);
  CHECK(a == init_mlp(arch, 1));
  CHECK_FALSE(a == init_mlp(arch, 2));
  CHECK(a.inputs() == 20);
  CHECK(a.outputs() == 4);
  REQUIRE(a.layers().size() == 6);
  const std::vector<std::size_t> widths{128, 64, 32, 16, 8, 4};
  const std::vector<Activation> acts{Activation::elu, Activation::relu, Activation::elu,
                                     Activation::relu, Activation::elu, Activation::linear};
  std::size_t params = 0;
  for (std::size_t k = 0; k < 6; ++k) {
    const auto& d = a.layers()[k];
    CHECK(d.outputs == widths[k]);
    CHECK(d.activation == acts[k]);
    const double limit = std::sqrt(6.0 / static_cast<double>(d.inputs + d.outputs));
    double sum = 0.0;
    for (double w : d.weights) {
      CHECK(std::abs(w) <= limit);
      sum += w;
    }
    CHECK(std::abs(sum / static_cast<double>(d.weights.size())) < 0.25 * limit);
    for (double b : d.bias) CHECK(b == 0.0);
    params += d.weights.size() + d.bias.size();
  }
  CHECK(a.parameter_count() == params);
}

TEST_CASE("architectures") {
  CHECK(Architecture::small(2).hidden.size() == 2);
  CHECK(Architecture::wide(3).hidden.size() == 9);
  CHECK(Architecture::wide(3).hidden[1].width == 4096);
  const auto custom = Architecture::parse("64:elu,32:relu", 3);
  CHECK(custom.inputs == 12);
  CHECK(custom.outputs == 3);
  REQUIRE(custom.hidden.size() == 2);
  CHECK(custom.hidden[1].width == 32);
  CHECK(custom.hidden[1].activation == Activation::relu);
  CHECK_THROWS_AS(Architecture::parse("64", 3), std::invalid_argument);
  CHECK_THROWS_AS(Architecture::parse("64:tanh", 3), std::invalid_argument);
}

TEST_CASE("forward pass by hand") {
  // 2 -> 2 (relu) -> 1 (linear)
  const Mlp m({layer(2, 2, Activation::relu, {1.0, -1.0, 0.5, 2.0}, {0.0, -1.0}),
               layer(2, 1, Activation::linear, {3.0, -2.0}, {0.25})});
  // hidden pre = (1 - 2, 0.5 + 4 - 1) = (-1, 3.5) -> (0, 3.5); out = -7 + 0.25
  CHECK(forward(m, std::vector<double>{1.0, 2.0})[0] == -6.75);
  const std::vector<double> batch{1.0, 2.0, 0.0, 0.0};
  const auto y = forward_batch(m, batch, 2);
  CHECK(y[0] == -6.75);
  CHECK(y[1] == 0.25);

  CHECK_THROWS_AS(Mlp({layer(2, 1, Activation::relu, {1.0, 1.0}, {0.0})}), std::invalid_argument);
  CHECK_THROWS_AS(Mlp({layer(2, 2, Activation::elu, {1, 1, 1, 1}, {0, 0}),
                       layer(3, 1, Activation::linear, {1, 1, 1}, {0})}),
                  std::invalid_argument);
  CHECK_THROWS_AS(forward(m, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("gradients match finite differences") {
  for (Activation act : {Activation::elu, Activation::relu, Activation::linear}) {
    CAPTURE(to_string(act));
    Mlp m = tiny(act);
    std::mt19937_64 rng(21);
    for (auto& d : m.layers()) {
      for (auto& b : d.bias) b = 0.3 * randn(rng, 1)[0];
    }
    const std::size_t batch = 6;
    const auto x = randn(rng, batch * 3);
    const auto y = randn(rng, batch * 2);
    const auto lg = loss_and_grad(m, x, y, batch);
    CHECK(lg.loss == doctest::Approx(mse(m, x, y, batch)).epsilon(1e-14));
    double worst = 0.0;
    const double h = 1e-6;
    for (std::size_t k = 0; k < m.layers().size(); ++k) {
      for (int which = 0; which < 2; ++which) {
        auto& params = which ? m.layers()[k].bias : m.layers()[k].weights;
        const auto& analytic = which ? lg.grad.bias[k] : lg.grad.weights[k];
        for (std::size_t q = 0; q < params.size(); ++q) {
          const double keep = params[q];
          params[q] = keep + h;
          const double up = mse(m, x, y, batch);
          params[q] = keep - h;
          const double dn = mse(m, x, y, batch);
          params[q] = keep;
          const double fd = (up - dn) / (2 * h);
          worst = std::max(worst, std::abs(fd - analytic[q]) / std::max(1.0, std::abs(fd)));
        }
      }
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("duplicating the batch leaves loss and gradient unchanged") {
  const Mlp m = tiny(Activation::elu);
  std::mt19937_64 rng(22);
  const auto x = randn(rng, 4 * 3);
  const auto y = randn(rng, 4 * 2);
  std::vector<double> x2 = x, y2 = y;
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), y.begin(), y.end());
  const auto a = loss_and_grad(m, x, y, 4);
  const auto b = loss_and_grad(m, x2, y2, 8);
  CHECK(b.loss == doctest::Approx(a.loss).epsilon(1e-14));
  for (std::size_t k = 0; k < a.grad.weights.size(); ++k) {
    for (std::size_t q = 0; q < a.grad.weights[k].size(); ++q) {
      CHECK(b.grad.weights[k][q] == doctest::Approx(a.grad.weights[k][q]).epsilon(1e-12));
    }
  }
}

TEST_CASE("nadam") {
  const NadamConfig cfg;
  Mlp m = tiny(Activation::relu);
  const Mlp start = m;
  NadamState st = NadamState::zeros_like(m);
  Gradients zero;
  for (const auto& d : m.layers()) {
    zero.weights.emplace_back(d.weights.size(), 0.0);
    zero.bias.emplace_back(d.bias.size(), 0.0);
  }
  optimizer_step(m, st, zero, cfg);
  CHECK(m == start);
  CHECK(st.step == 1);

  // first step by hand: m_hat = g (1 + b1 / (1 + b1)), v_hat = g^2
  Gradients g = zero;
  g.weights[0][0] = 0.5;
  g.bias[2][1] = -2.0;
  st = NadamState::zeros_like(m);
  optimizer_step(m, st, g, cfg);
  const double b1 = cfg.beta1;
  const double step_w = cfg.learning_rate * 0.5 * (1.0 + b1 / (1.0 + b1)) / (0.5 + cfg.epsilon);
  const double step_b = cfg.learning_rate * -2.0 * (1.0 + b1 / (1.0 + b1)) / (2.0 + cfg.epsilon);
  CHECK(m.layers()[0].weights[0] == doctest::Approx(start.layers()[0].weights[0] - step_w).epsilon(1e-14));
  CHECK(m.layers()[2].bias[1] == doctest::Approx(start.layers()[2].bias[1] - step_b).epsilon(1e-14));
  CHECK(m.layers()[0].weights[1] == start.layers()[0].weights[1]);

  // a constant gradient moves a parameter by about lr per step
  for (int k = 0; k < 99; ++k) optimizer_step(m, st, g, cfg);
  const double moved = start.layers()[0].weights[0] - m.layers()[0].weights[0];
  CHECK(moved == doctest::Approx(100 * cfg.learning_rate).epsilon(0.02));

  Gradients wrong = zero;
  wrong.weights.pop_back();
  CHECK_THROWS_AS(optimizer_step(m, st, wrong, cfg), std::invalid_argument);
}

TEST_CASE("model files") {
  const Mlp m = init_mlp(Architecture::parse("7:elu,5:relu", 2), 3);
  CHECK(parse_mlp(format_mlp(m)) == m);
  const auto dir = std::filesystem::temp_directory_path() / "eepc_test_mlp";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "m.txt").string();
  save_mlp(path, m);
  CHECK(load_mlp(path) == m);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_mlp(path), IoError);
  CHECK_THROWS(parse_mlp("not a model"));
  std::string text = format_mlp(m);
  CHECK_THROWS(parse_mlp(text.substr(0, text.size() / 2)));
}
