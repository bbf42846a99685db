#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pinn/network.hpp"
#include "test_util.hpp"

using namespace pinn;
using pinn::testing::central_diff;
using pinn::testing::rel_error;
using pinn::testing::uniform;

TEST_CASE("constant initialization matches the hand-calculation setup") {
  const NetworkParams p =
      init_network({2, 2, 1}, InitScheme::constant(0.5, 0.0), 42);
  CHECK(p.parameter_count() == 9);
  for (const auto& layer : p.weights) {
    for (double w : layer) CHECK(w == 0.5);
  }
  for (const auto& layer : p.biases) {
    for (double b : layer) CHECK(b == 0.0);
  }
}

TEST_CASE("glorot draws respect per-layer bounds and are seed-deterministic") {
  const NetworkParams a = init_network({2, 64, 64, 1}, InitScheme::glorot(), 7);
  const NetworkParams b = init_network({2, 64, 64, 1}, InitScheme::glorot(), 7);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    const double limit = std::sqrt(
        6.0 / (a.layer_sizes[l] + a.layer_sizes[l + 1]));
    for (std::size_t i = 0; i < a.weights[l].size(); ++i) {
      CHECK(std::abs(a.weights[l][i]) <= limit);
      CHECK(a.weights[l][i] == b.weights[l][i]);
    }
    for (double bias : a.biases[l]) CHECK(bias == 0.0);
  }
}

TEST_CASE("glorot bound for the two-unit layout") {
  const NetworkParams p = init_network({2, 2, 1}, InitScheme::glorot(), 3);
  const double bound = 1.224744871391589;  // sqrt(6/4)
  for (double w : p.weights[0]) {
    CHECK(std::abs(w) <= bound);
  }
}

TEST_CASE("glorot sample mean is near zero") {
  // One [2,n,1] layer big enough for 1e4 first-layer draws.
  const int n = 5000;
  const NetworkParams p = init_network({2, n, 1}, InitScheme::glorot(), 12);
  double sum = 0.0;
  std::size_t count = 0;
  for (double w : p.weights[0]) {
    sum += w;
    ++count;
  }
  REQUIRE(count == 10000);
  const double limit = std::sqrt(6.0 / (2 + n));
  const double sigma = limit / std::sqrt(3.0);
  CHECK(std::abs(sum / static_cast<double>(count)) <=
        3.0 * sigma / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("init_network rejects malformed layouts") {
  CHECK_THROWS_AS((void)init_network({}, InitScheme::glorot(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)init_network({2}, InitScheme::glorot(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)init_network({3, 2, 1}, InitScheme::glorot(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)init_network({2, 2, 2}, InitScheme::glorot(), 1),
                  std::invalid_argument);
}

TEST_CASE("forward pass anchors") {
  const NetworkParams p =
      init_network({2, 2, 1}, InitScheme::constant(0.5, 0.0), 0);
  SUBCASE("hand-calculation point") {
    const double y = forward(p, 0.1, 0.1);
    CHECK(std::abs(y - 0.525) < 0.001);
    CHECK(rel_error(y, 0.52497918747893999) < 1e-14);
  }
  SUBCASE("input symmetry under symmetric weights") {
    CHECK(forward(p, 0.3, -0.8) == forward(p, -0.8, 0.3));
  }
}

TEST_CASE("input-independent network with sigmoid output") {
  NetworkParams p = init_network({2, 2, 1}, InitScheme::constant(0.0, 0.0), 0,
                                 Activation::kSigmoid,
                                 /*output_linear=*/false);
  p.biases[1][0] = 0.7;
  const double expected = 0.66818777216816611;  // sigmoid(0.7)
  CHECK(rel_error(forward(p, 0.0, 0.0), expected) < 1e-14);
  CHECK(rel_error(forward(p, -1.2, 1.9), expected) < 1e-14);
}

TEST_CASE("tanh activation equals the two-sigmoid composition") {
  const NetworkParams p = init_network({2, 4, 1}, InitScheme::glorot(), 5,
                                       Activation::kTanh);
  // spot check one hidden unit against std::tanh
  const double z = p.weights[0][0] * 0.3 + p.weights[0][1] * 0.7;
  CHECK(rel_error(2.0 * eval_sigmoid(2.0 * z) - 1.0, std::tanh(z), 1e-12) <
        1e-12);
  // forward stays finite and bounded-ish
  const double y = forward(p, 0.3, 0.7);
  CHECK(std::isfinite(y));
}

TEST_CASE("flatten and assign_flat round-trip") {
  NetworkParams p = init_network({2, 10, 1}, InitScheme::glorot(), 8);
  const auto flat = p.flatten();
  CHECK(flat.size() == p.parameter_count());
  NetworkParams q = init_network({2, 10, 1}, InitScheme::constant(0.0, 0.0), 0);
  q.assign_flat(flat);
  CHECK(q.flatten() == flat);
  CHECK_THROWS_AS(q.assign_flat(std::vector<double>(3, 0.0)),
                  std::invalid_argument);
}

TEST_CASE("forward_with_input_derivs: analytic anchor and symmetry") {
  const NetworkParams p =
      init_network({2, 2, 1}, InitScheme::constant(0.5, 0.0), 0);
  NetworkDerivatives nd = forward_with_input_derivs(p, 0.1, 0.1);
  GraphEval eval(nd.graph);
  eval.run();
  CHECK(rel_error(eval.value(nd.dy_dx), 0.12468802009644598) < 1e-13);
  CHECK(eval.value(nd.dy_dx) == eval.value(nd.dy_dt));
}

TEST_CASE("zero first-layer weights kill both input derivatives") {
  NetworkParams p = init_network({2, 3, 1}, InitScheme::glorot(), 4);
  for (double& w : p.weights[0]) w = 0.0;
  NetworkDerivatives nd = forward_with_input_derivs(p, 0.4, 1.2);
  GraphEval eval(nd.graph);
  eval.run();
  CHECK(eval.value(nd.dy_dx) == 0.0);
  CHECK(eval.value(nd.dy_dt) == 0.0);
}

TEST_CASE("input derivatives agree with finite differences") {
  const NetworkParams p = init_network({2, 8, 1}, InitScheme::glorot(), 21);
  Rng rng(22);
  for (int i = 0; i < 50; ++i) {
    const double x = uniform(rng, -1.5, 1.5);
    const double t = uniform(rng, 0.0, 2.0);
    NetworkDerivatives nd = forward_with_input_derivs(p, x, t);
    GraphEval eval(nd.graph);
    eval.run();
    const double h = 1e-5;
    const double fdx = central_diff(
        [&](double xv) { return forward(p, xv, t); }, x, h);
    const double fdt = central_diff(
        [&](double tv) { return forward(p, x, tv); }, t, h);
    CHECK(rel_error(eval.value(nd.dy_dx), fdx, 1e-6) < 1e-6);
    CHECK(rel_error(eval.value(nd.dy_dt), fdt, 1e-6) < 1e-6);
  }
}

TEST_CASE("graph primal channel reproduces forward bit-for-bit") {
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    const NetworkParams p =
        init_network({2, 6, 4, 1}, InitScheme::glorot(), seed);
    Rng rng(seed + 100);
    for (int i = 0; i < 20; ++i) {
      const double x = uniform(rng, -1.5, 1.5);
      const double t = uniform(rng, 0.0, 2.0);
      NetworkDerivatives nd = forward_with_input_derivs(p, x, t);
      GraphEval eval(nd.graph);
      eval.run();
      CHECK(eval.value(nd.y) == forward(p, x, t));
    }
  }
}

TEST_CASE("sigmoid-output network also reproduces bit-for-bit") {
  const NetworkParams p = init_network({2, 5, 1}, InitScheme::glorot(), 77,
                                       Activation::kSigmoid,
                                       /*output_linear=*/false);
  NetworkDerivatives nd = forward_with_input_derivs(p, 0.25, 0.75);
  GraphEval eval(nd.graph);
  eval.run();
  CHECK(eval.value(nd.y) == forward(p, 0.25, 0.75));
}
