#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "pinn/optimizer.hpp"
#include "pinn/sampling.hpp"
#include "test_util.hpp"

using namespace pinn;
using pinn::testing::rel_error;
using pinn::testing::uniform;

TEST_CASE("sgd step arithmetic") {
  const std::vector<double> p = {0.5};
  const std::vector<double> g = {0.2};
  const auto out = sgd_step(p, g, 0.05);
  CHECK(rel_error(out[0], 0.49) < 1e-15);
}

TEST_CASE("sgd with zero gradient leaves parameters bitwise unchanged") {
  const std::vector<double> p = {0.5, -1.25, 3.75};
  const std::vector<double> g = {0.0, 0.0, 0.0};
  CHECK(sgd_step(p, g, 0.05) == p);
}

TEST_CASE("sgd is affine in the gradient") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const double g1 = uniform(rng, -2.0, 2.0);
    const double g2 = uniform(rng, -2.0, 2.0);
    const auto combined =
        sgd_step(std::vector<double>{0.5}, std::vector<double>{g1 + g2}, 0.05);
    CHECK(combined[0] == 0.5 - 0.05 * (g1 + g2));
  }
}

TEST_CASE("sgd rejects mismatched lengths") {
  CHECK_THROWS_AS(
      (void)sgd_step(std::vector<double>{1.0}, std::vector<double>{}, 0.1),
      std::invalid_argument);
}

TEST_CASE("adam first step anchors") {
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::kAdam;
  cfg.learning_rate = 0.001;

  SUBCASE("large gradient moves by about the learning rate") {
    AdamState state = AdamState::zeros(1);
    const auto out = adam_step(state, std::vector<double>{0.5},
                               std::vector<double>{0.2}, cfg);
    CHECK(rel_error(out[0] - 0.5, -0.0009999999500000025) < 1e-12);
    CHECK(state.step_count == 1);
  }
  SUBCASE("zero gradient does nothing") {
    AdamState state = AdamState::zeros(2);
    const std::vector<double> p = {0.5, -0.25};
    const auto out =
        adam_step(state, p, std::vector<double>{0.0, 0.0}, cfg);
    CHECK(out == p);
  }
  SUBCASE("opposite gradients give mirror-image updates") {
    AdamState state = AdamState::zeros(2);
    const auto out = adam_step(state, std::vector<double>{0.0, 0.0},
                               std::vector<double>{0.37, -0.37}, cfg);
    CHECK(out[0] == -out[1]);
  }
}

TEST_CASE("adam first-step magnitude is bounded by the learning rate") {
  OptimizerConfig cfg;
  cfg.learning_rate = 0.05;
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    double g = uniform(rng, -3.0, 3.0);
    if (std::abs(g) < 1e-3) g = 1e-3;
    AdamState state = AdamState::zeros(1);
    const auto out = adam_step(state, std::vector<double>{0.0},
                               std::vector<double>{g}, cfg);
    CHECK(std::abs(out[0]) <= 1.01 * cfg.learning_rate);
  }
}

TEST_CASE("adam is deterministic") {
  OptimizerConfig cfg;
  auto run = [&] {
    AdamState state = AdamState::zeros(3);
    std::vector<double> p = {0.1, -0.2, 0.3};
    for (int step = 0; step < 10; ++step) {
      const std::vector<double> g = {0.01 * step, -0.5, 0.25};
      p = adam_step(state, p, g, cfg);
    }
    return p;
  };
  CHECK(run() == run());
}

TEST_CASE("adam validates configuration and lengths") {
  OptimizerConfig cfg;
  cfg.adam_beta1 = 1.0;
  AdamState state = AdamState::zeros(1);
  CHECK_THROWS_AS((void)adam_step(state, std::vector<double>{1.0},
                                  std::vector<double>{0.1}, cfg),
                  std::invalid_argument);
  OptimizerConfig bad_lr;
  bad_lr.learning_rate =0.0;
  CHECK_THROWS_AS(bad_lr.validate(), std::invalid_argument);
  OptimizerConfig ok;
  AdamState state2 = AdamState::zeros(2);
  CHECK_THROWS_AS((void)adam_step(state2, std::vector<double>{1.0},
                                  std::vector<double>{0.1}, ok),
                  std::invalid_argument);
}
