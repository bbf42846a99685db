#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pinn/config.hpp"
#include "pinn/trainer.hpp"
#include "test_util.hpp"

using namespace pinn;
using pinn::testing::rel_error;

namespace {

TrainConfig tiny_forward_config() {
  TrainConfig cfg;
  cfg.architecture = {2, 8, 1};
  cfg.counts = {20, 10, 5, 0, 0};
  cfg.weights.observation = 0.0;
  cfg.optimizer.learning_rate = 0.01;
  cfg.epochs = 300;
  cfg.log_every = 30;
  cfg.seed = 2;
  return cfg;
}

bool rows_identical(const RunLog& a, const RunLog& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const RunLogRow& ra = a.rows[i];
    const RunLogRow& rb = b.rows[i];
    if (ra.epoch != rb.epoch) return false;
    if (ra.loss.total != rb.loss.total) return false;
    if (ra.loss.residual_term != rb.loss.residual_term) return false;
    if (ra.loss.boundary_term != rb.loss.boundary_term) return false;
    if (ra.loss.initial_term != rb.loss.initial_term) return false;
    if (ra.loss.observation_term != rb.loss.observation_term) return false;
    if (ra.rel_l2 != rb.rel_l2) return false;
    if (ra.coefficient != rb.coefficient) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config validation") {
  TrainConfig cfg = tiny_forward_config();
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_forward_config();
  cfg.architecture = {2, 0, 1};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = tiny_forward_config();
  cfg.coefficient = Coefficient::trainable(0.0);
  cfg.weights.observation = 1.0;
  cfg.counts.observe_x = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("one epoch produces one step and two log rows") {
  TrainConfig cfg = tiny_forward_config();
  cfg.epochs = 1;
  const ForwardResult result = train_forward(cfg);
  REQUIRE(result.log.rows.size() == 2);
  CHECK(result.log.rows[0].epoch == 0);
  CHECK(result.log.rows[1].epoch == 1);
  // parameters moved
  const NetworkParams fresh =
      init_network(cfg.architecture, cfg.init, cfg.seed);
  CHECK(result.params.flatten() != fresh.flatten());
}

TEST_CASE("log cadence includes epoch zero and the final epoch") {
  TrainConfig cfg = tiny_forward_config();
  cfg.epochs = 10;
  cfg.log_every = 3;
  const ForwardResult result = train_forward(cfg);
  std::vector<int> epochs;
  for (const auto& row : result.log.rows) epochs.push_back(row.epoch);
  CHECK(epochs == std::vector<int>{0, 3, 6, 9, 10});
}

TEST_CASE("training runs are bitwise reproducible") {
  const TrainConfig cfg = tiny_forward_config();
  const ForwardResult a = train_forward(cfg);
  const ForwardResult b = train_forward(cfg);
  CHECK(rows_identical(a.log, b.log));
  CHECK(a.params.flatten() == b.params.flatten());
}

TEST_CASE("loss trends down over a short forward run") {
  const TrainConfig cfg = tiny_forward_config();
  const ForwardResult result = train_forward(cfg);
  const auto& rows = result.log.rows;
  REQUIRE(rows.size() >= 4);
  const std::size_t tenth = std::max<std::size_t>(1, rows.size() / 10);
  double first = rows[0].loss.total;
  double last = rows.back().loss.total;
  for (std::size_t i = 0; i < tenth; ++i) {
    first = std::min(first, rows[i].loss.total);
    last = std::min(last, rows[rows.size() - 1 - i].loss.total);
  }
  CHECK(last < first);
}

TEST_CASE("train_forward rejects trainable coefficients and vice versa") {
  TrainConfig cfg = tiny_forward_config();
  cfg.coefficient = Coefficient::trainable(0.0);
  cfg.counts.observe_x = 3;
  cfg.counts.observe_t = 3;
  cfg.weights.observation = 1.0;
  CHECK_THROWS_AS((void)train_forward(cfg), std::invalid_argument);
  TrainConfig fwd = tiny_forward_config();
  CHECK_THROWS_AS((void)train_inverse(fwd), std::invalid_argument);
}

TEST_CASE("non-finite loss aborts with the epoch in the message") {
  TrainConfig cfg = tiny_forward_config();
  cfg.optimizer.kind = OptimizerConfig::Kind::kSgd;
  cfg.optimizer.learning_rate = 1e200;
  cfg.epochs = 50;
  try {
    (void)train_forward(cfg);
    FAIL("expected TrainError");
  } catch (const TrainError& e) {
    CHECK(e.epoch() >= 1);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("replication table: loop zero matches the published row") {
  for (const auto mode :
       {ReplicationMode::kPaperLiteral, ReplicationMode::kStandardDescent}) {
    const auto rows = replicate_manual_table(mode);
    REQUIRE(rows.size() == 6);
    const ReplicationRow& r0 = rows[0];
    CHECK(r0.loop == 0);
    CHECK(r0.w1 == 0.5);
    CHECK(r0.w2 == 0.5);
    CHECK(r0.w3 == 0.5);
    CHECK(r0.w4 == 0.5);
    CHECK(r0.w5 == 0.5);
    CHECK(r0.w6 == 0.5);
    CHECK(r0.b1 == 0.0);
    CHECK(r0.b2 == 0.0);
    CHECK(r0.b3 == 0.0);
    CHECK(std::abs(r0.y_hat - 0.525) < 0.001);
  }
  // both modes start from the same state
  const auto lit = replicate_manual_table(ReplicationMode::kPaperLiteral);
  const auto std_rows =
      replicate_manual_table(ReplicationMode::kStandardDescent);
  CHECK(lit[0].y_hat == std_rows[0].y_hat);
  CHECK(lit[0].loss == std_rows[0].loss);
}

TEST_CASE("replication table: symmetry holds at every loop in both modes") {
  for (const auto mode :
       {ReplicationMode::kPaperLiteral, ReplicationMode::kStandardDescent}) {
    for (const ReplicationRow& r : replicate_manual_table(mode)) {
      CHECK(r.w1 == r.w2);
      CHECK(r.w3 == r.w4);
      CHECK(r.w5 == r.w6);
      CHECK(r.b1 == r.b2);
    }
  }
}

TEST_CASE("replication table: standard descent loss strictly decreases") {
  const auto rows = replicate_manual_table(ReplicationMode::kStandardDescent);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].loss < rows[i - 1].loss);
  }
}

TEST_CASE("evaluate_model: zero network has unit relative error") {
  const NetworkParams zero =
      init_network({2, 4, 1}, InitScheme::constant(0.0, 0.0), 0);
  const SpaceTimeDomain domain{-1.5, 1.5, 0.0, 2.0};
  const auto grid = evaluation_grid(domain);
  REQUIRE(grid.size() == 100);
  for (const Point& p : grid) CHECK(p.t == 0.0);
  const Evaluation ev = evaluate_model(zero, grid);
  CHECK(ev.predictions.size() == 100);
  for (double y : ev.predictions) CHECK(y == 0.0);
  CHECK(ev.rel_l2 == 1.0);
  CHECK_THROWS_AS((void)evaluate_model(zero, {}), std::invalid_argument);
}

TEST_CASE("checkpoint round-trip preserves the subsequent trajectory") {
  TrainConfig cfg = tiny_forward_config();
  cfg.epochs = 40;
  const ForwardResult first = train_forward(cfg);

  std::stringstream buffer;
  save_checkpoint(buffer, first.params, config_hash(cfg));
  const Checkpoint cp = load_checkpoint(buffer);
  CHECK(cp.config_hash == config_hash(cfg));
  CHECK(cp.flat_params == first.params.flatten());
  CHECK_FALSE(cp.coefficient.has_value());

  NetworkParams restored = init_network(cfg.architecture, cfg.init, cfg.seed);
  restored.assign_flat(cp.flat_params);
  TrainConfig resume = cfg;
  resume.epochs = 25;
  const ForwardResult from_memory = train_forward(resume, first.params);
  const ForwardResult from_disk = train_forward(resume, restored);
  CHECK(rows_identical(from_memory.log, from_disk.log));
  CHECK(from_memory.params.flatten() == from_disk.params.flatten());
}

TEST_CASE("checkpoint rejects malformed input") {
  std::stringstream bad("not a checkpoint\n");
  CHECK_THROWS_AS((void)load_checkpoint(bad), std::runtime_error);
}

TEST_CASE("runlog csv layout") {
  RunLog log;
  RunLogRow row;
  row.epoch = 5;
  row.loss = {1.5, 1.0, 0.25, 0.25, 0.0};
  row.rel_l2 = 0.5;
  row.seconds = 123.0;
  log.rows.push_back(row);
  std::ostringstream out;
  log.write_csv(out);
  CHECK(out.str() ==
        "epoch,total,residual,boundary,initial,observation,rel_l2,"
        "coefficient,seconds\n5,1.5,1,0.25,0.25,0,0.5,,\n");
  std::ostringstream timed;
  log.write_csv(timed, /*include_timing=*/true);
  CHECK(timed.str().find(",123") != std::string::npos);
}

TEST_CASE("inverse training holds a correct coefficient steady") {
  // Pre-train the network at the true coefficient, then check that joint
  // training does not pull the coefficient away from it.
  TrainConfig pre = tiny_forward_config();
  pre.architecture = {2, 16, 1};
  pre.epochs = 1500;
  pre.optimizer.learning_rate = 0.01;
  const ForwardResult trained = train_forward(pre);

  TrainConfig inv = pre;
  inv.coefficient = Coefficient::trainable(3.0);
  inv.counts.observe_x = 5;
  inv.counts.observe_t = 5;
  inv.weights.observation = 1.0;
  inv.optimizer.kind = OptimizerConfig::Kind::kSgd;
  inv.optimizer.learning_rate = 0.001;
  inv.epochs = 500;
  inv.coefficient_log_every = 25;
  const InverseResult result = train_inverse(inv, trained.params, 3.0);
  for (const CoefficientSample& s : result.trajectory) {
    CHECK(std::abs(s.value - 3.0) <= 0.05);
  }
}

TEST_CASE("inverse training is bitwise reproducible") {
  TrainConfig cfg = tiny_forward_config();
  cfg.architecture = {2, 6, 1};
  cfg.coefficient = Coefficient::trainable(0.0);
  cfg.counts.observe_x = 4;
  cfg.counts.observe_t = 4;
  cfg.weights.observation = 1.0;
  cfg.epochs = 60;
  cfg.coefficient_log_every = 20;
  const InverseResult a = train_inverse(cfg);
  const InverseResult b = train_inverse(cfg);
  CHECK(rows_identical(a.log, b.log));
  CHECK(a.coefficient == b.coefficient);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].epoch == b.trajectory[i].epoch);
    CHECK(a.trajectory[i].value == b.trajectory[i].value);
  }
}
