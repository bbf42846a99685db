#include "pinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pinn/csv.hpp"

namespace pinn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// Shared epoch loop for forward and inverse runs. The loss graph is
/// recorded once; every epoch re-seats the trainable roots, runs one
/// forward sweep and one reverse sweep, and applies one optimizer step.
struct TrainLoop {
  const TrainConfig& config;
  LossGraph loss;
  GraphEval eval;
  std::vector<double> flat;  // theta, plus coefficient last if trainable
  std::vector<Point> grid;
  NetworkParams params;

  TrainLoop(const TrainConfig& cfg, const NetworkParams& initial,
            std::optional<double> initial_coefficient)
      : config(cfg),
        loss(build_loss_graph(
            initial,
            [&] {
              ResidualSpec spec;
              spec.coefficient = cfg.coefficient;
              if (initial_coefficient && cfg.coefficient.is_trainable()) {
                spec.coefficient.value = *initial_coefficient;
              }
              return spec;
            }(),
            transport_conditions(cfg.boundary_condition), cfg.domain,
            sample_collocation(cfg), cfg.weights)),
        eval(loss.graph),
        grid(evaluation_grid(cfg.domain)),
        params(initial) {
    flat = initial.flatten();
    if (loss.coefficient != kInvalidNode) {
      flat.push_back(initial_coefficient ? *initial_coefficient
                                         : cfg.coefficient.value);
    }
  }

  void seat_roots() {
    const std::size_t p = loss.theta.size();
    for (std::size_t i = 0; i < p; ++i) {
      eval.set_root(loss.theta[i], flat[i]);
    }
    if (loss.coefficient != kInvalidNode) {
      eval.set_root(loss.coefficient, flat[p]);
    }
  }

  void evaluate(int epoch) {
    try {
      eval.run();
    } catch (const EvalError& e) {
      throw TrainError(epoch, e.what());
    }
  }

  RunLogRow log_row(int epoch, Clock::time_point start) {
    RunLogRow row;
    row.epoch = epoch;
    row.loss = loss_breakdown(loss, eval);
    params.assign_flat(std::span<const double>(flat.data(), loss.theta.size()));
    row.rel_l2 = evaluate_model(params, grid).rel_l2;
    if (loss.coefficient != kInvalidNode) {
      row.coefficient = flat[loss.theta.size()];
    }
    row.seconds = seconds_since(start);
    return row;
  }
};

constexpr char kCheckpointMagic[] = "pinn-checkpoint v1";

}  // namespace

void TrainConfig::validate() const {
  if (architecture.size() < 2 || architecture.front() != 2 ||
      architecture.back() != 1) {
    throw std::invalid_argument("config: architecture must start at 2 and "
                                "end at 1");
  }
  for (int s : architecture) {
    if (s < 1) throw std::invalid_argument("config: layer sizes must be >= 1");
  }
  domain.validate();
  weights.validate();
  optimizer.validate();
  if (epochs < 1) throw std::invalid_argument("config: epochs must be >= 1");
  if (log_every < 1) {
    throw std::invalid_argument("config: log_every must be >= 1");
  }
  if (coefficient_log_every < 1) {
    throw std::invalid_argument("config: coefficient_log_every must be >= 1");
  }
  if (weights.residual > 0.0 && counts.interior < 1) {
    throw std::invalid_argument("config: interior count must be >= 1");
  }
  if (weights.boundary > 0.0 && counts.boundary < 1) {
    throw std::invalid_argument("config: boundary count must be >= 1");
  }
  if (weights.initial > 0.0 && counts.initial < 1) {
    throw std::invalid_argument("config: initial count must be >= 1");
  }
  if (is_inverse()) {
    if (counts.observe_x < 1 || counts.observe_t < 1) {
      throw std::invalid_argument("config: inverse problems need a nonempty "
                                  "observation grid");
    }
    if (!(weights.observation > 0.0)) {
      throw std::invalid_argument("config: inverse problems need a positive "
                                  "observation weight");
    }
  }
  if (!is_inverse() && weights.observation > 0.0 &&
      (counts.observe_x < 1 || counts.observe_t < 1)) {
    throw std::invalid_argument("config: observation weight is nonzero but "
                                "the observation grid is empty");
  }
}

CollocationSet sample_collocation(const TrainConfig& config) {
  // Fixed seed streams per set, derived from the config seed.
  CollocationSet set;
  if (config.weights.residual > 0.0) {
    set.interior = sample_interior(config.domain, config.counts.interior,
                                   config.seed + 1, config.sampling_mode);
  }
  if (config.weights.boundary > 0.0) {
    set.boundary = sample_boundary(config.domain, config.counts.boundary,
                                   config.seed + 2, config.sampling_mode);
  }
  if (config.weights.initial > 0.0) {
    set.initial = sample_initial(config.domain, config.counts.initial,
                                 config.seed + 3, config.sampling_mode);
  }
  if (config.weights.observation > 0.0 && config.counts.observe_x > 0 &&
      config.counts.observe_t > 0) {
    set.observations =
        make_observation_grid(config.domain, config.counts.observe_x,
                              config.counts.observe_t, exact_solution);
  }
  return set;
}

TrainError::TrainError(int epoch, std::string message)
    : epoch_(epoch),
      message_("epoch " + std::to_string(epoch) + ": " + std::move(message)) {}

std::vector<Point> evaluation_grid(const SpaceTimeDomain& domain, int n) {
  if (n < 2) throw std::invalid_argument("evaluation_grid: n must be >= 2");
  std::vector<Point> grid;
  grid.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = domain.x_min + (domain.x_max - domain.x_min) *
                                        static_cast<double>(i) / (n - 1);
    grid.push_back({x, domain.t_min});
  }
  return grid;
}

Evaluation evaluate_model(const NetworkParams& params,
                          const std::vector<Point>& grid) {
  if (grid.empty()) {
    throw std::invalid_argument("evaluate_model: empty grid");
  }
  Evaluation ev;
  ev.grid = grid;
  ev.predictions.reserve(grid.size());
  ev.exact.reserve(grid.size());
  double num = 0.0;
  double den = 0.0;
  for (const Point& p : grid) {
    const double y = forward(params, p.x, p.t);
    const double u = exact_solution(p.x, p.t);
    ev.predictions.push_back(y);
    ev.exact.push_back(u);
    num += (y - u) * (y - u);
    den += u * u;
  }
  if (den == 0.0) {
    throw std::invalid_argument("evaluate_model: exact solution vanishes on "
                                "the whole grid");
  }
  ev.rel_l2 = std::sqrt(num) / std::sqrt(den);
  return ev;
}

ForwardResult train_forward(const TrainConfig& config,
                            const std::optional<NetworkParams>& start) {
  config.validate();
  if (config.is_inverse()) {
    throw std::invalid_argument("train_forward: coefficient must be fixed");
  }
  const auto t0 = Clock::now();
  NetworkParams initial =
      start ? *start
            : init_network(config.architecture, config.init, config.seed,
                           config.activation, config.output_linear);
  TrainLoop loop(config, initial, {});
  Optimizer optimizer(config.optimizer, loop.flat.size());

  ForwardResult result;
  loop.seat_roots();
  loop.evaluate(0);
  result.log.rows.push_back(loop.log_row(0, t0));
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const LossGradient grad = loss_gradient(loop.loss, loop.eval);
    optimizer.step(loop.flat, grad.theta);
    loop.seat_roots();
    loop.evaluate(epoch);
    if (epoch % config.log_every == 0 || epoch == config.epochs) {
      result.log.rows.push_back(loop.log_row(epoch, t0));
    }
  }
  result.params = initial;
  result.params.assign_flat(loop.flat);
  return result;
}

InverseResult train_inverse(const TrainConfig& config,
                            const std::optional<NetworkParams>& start,
                            std::optional<double> start_coefficient) {
  config.validate();
  if (!config.is_inverse()) {
    throw std::invalid_argument("train_inverse: coefficient must be "
                                "trainable");
  }
  const auto t0 = Clock::now();
  NetworkParams initial =
      start ? *start
            : init_network(config.architecture, config.init, config.seed,
                           config.activation, config.output_linear);
  TrainLoop loop(config, initial, start_coefficient);
  Optimizer optimizer(config.optimizer, loop.flat.size());
  const std::size_t p = loop.loss.theta.size();

  InverseResult result;
  loop.seat_roots();
  loop.evaluate(0);
  result.log.rows.push_back(loop.log_row(0, t0));
  result.trajectory.push_back({0, loop.flat[p]});
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    LossGradient grad = loss_gradient(loop.loss, loop.eval);
    std::vector<double> full_grad = std::move(grad.theta);
    full_grad.push_back(*grad.coefficient);
    optimizer.step(loop.flat, full_grad);
    loop.seat_roots();
    loop.evaluate(epoch);
    if (epoch % config.log_every == 0 || epoch == config.epochs) {
      result.log.rows.push_back(loop.log_row(epoch, t0));
    }
    if (epoch % config.coefficient_log_every == 0 || epoch == config.epochs) {
      result.trajectory.push_back({epoch, loop.flat[p]});
    }
  }
  result.params = initial;
  result.params.assign_flat(
      std::span<const double>(loop.flat.data(), p));
  result.coefficient = loop.flat[p];
  return result;
}

const double kManualTableReferenceLoss[6] = {0.146, 0.132,  0.1008,
                                             0.0786, 0.063, 0.052};

namespace {

/// Flat index map for the hand-calculation's parameter naming on the
/// [2,2,1] layout: flatten order is [w1, w3, w2, w4, b1, b2, w5, w6, b3].
ReplicationRow row_from_flat(int loop, const std::vector<double>& f,
                             double y_hat, double loss_value) {
  ReplicationRow r;
  r.loop = loop;
  r.w1 = f[0];
  r.w3 = f[1];
  r.w2 = f[2];
  r.w4 = f[3];
  r.b1 = f[4];
  r.b2 = f[5];
  r.w5 = f[6];
  r.w6 = f[7];
  r.b3 = f[8];
  r.y_hat = y_hat;
  r.loss = loss_value;
  return r;
}

}  // namespace

std::vector<ReplicationRow> replicate_manual_table(ReplicationMode mode) {
  const double x = 0.1;
  const double t = 0.1;
  NetworkParams params =
      init_network({2, 2, 1}, InitScheme::constant(0.5, 0.0), 0,
                   Activation::kSigmoid, /*output_linear=*/true);
  ResidualSpec spec;
  spec.coefficient = Coefficient::fixed(3.0);
  ConditionSpec conds = transport_conditions(BoundaryKind::kDirichletZero);
  SpaceTimeDomain domain;
  CollocationSet colloc;
  colloc.interior = {{x, t}};
  colloc.initial = {{x, 0.0}};
  LossWeights weights;
  weights.boundary = 0.0;
  weights.observation = 0.0;

  LossGraph loss = build_loss_graph(params, spec, conds, domain, colloc,
                                    weights);
  GraphEval eval(loss.graph);
  std::vector<double> flat = params.flatten();
  const double lr = (mode == ReplicationMode::kPaperLiteral) ? 0.05 : 0.001;

  std::vector<ReplicationRow> rows;
  for (int loop = 0; loop <= 5; ++loop) {
    for (std::size_t i = 0; i < flat.size(); ++i) {
      eval.set_root(loss.theta[i], flat[i]);
    }
    eval.run();
    params.assign_flat(flat);
    rows.push_back(row_from_flat(loop, flat, forward(params, x, t),
                                 eval.value(loss.total)));
    if (loop == 5) break;

    const std::vector<double> grad = eval.reverse_gradient(loss.total);
    if (mode == ReplicationMode::kStandardDescent) {
      for (std::size_t i = 0; i < flat.size(); ++i) {
        flat[i] -= lr * grad[i];
      }
    } else {
      // The published rule ascends and scales every hidden weight's step
      // by x and each output weight's step by its hidden activation;
      // biases carry no factor. Applied verbatim, simultaneously.
      const double f1 = eval_sigmoid(flat[0] * x + flat[1] * t + flat[4]);
      const double f2 = eval_sigmoid(flat[2] * x + flat[3] * t + flat[5]);
      const double factor[9] = {x, x, x, x, 1.0, 1.0, f1, f2, 1.0};
      for (std::size_t i = 0; i < flat.size(); ++i) {
        flat[i] += lr * grad[i] * factor[i];
      }
    }
  }
  return rows;
}

void RunLog::write_csv(std::ostream& out, bool include_timing) const {
  out << "epoch,total,residual,boundary,initial,observation,rel_l2,"
         "coefficient,seconds\n";
  for (const RunLogRow& row : rows) {
    out << row.epoch << ',' << format_double(row.loss.total) << ','
        << format_double(row.loss.residual_term) << ','
        << format_double(row.loss.boundary_term) << ','
        << format_double(row.loss.initial_term) << ','
        << format_double(row.loss.observation_term) << ','
        << format_double(row.rel_l2) << ',';
    if (row.coefficient) out << format_double(*row.coefficient);
    out << ',';
    if (include_timing) out << format_double(row.seconds);
    out << '\n';
  }
}

void save_checkpoint(std::ostream& out, const NetworkParams& params,
                     std::uint64_t config_hash,
                     std::optional<double> coefficient) {
  char buf[64];
  out << kCheckpointMagic << '\n';
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash));
  out << "config-hash " << buf << '\n';
  const std::vector<double> flat = params.flatten();
  out << "params " << flat.size() << '\n';
  for (double v : flat) {
    std::snprintf(buf, sizeof buf, "%a", v);
    out << buf << '\n';
  }
  if (coefficient) {
    std::snprintf(buf, sizeof buf, "%a", *coefficient);
    out << "coefficient " << buf << '\n';
  }
}

Checkpoint load_checkpoint(std::istream& in) {
  Checkpoint cp;
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic) {
    throw std::runtime_error("checkpoint: bad magic line");
  }
  std::string word;
  if (!(in >> word) || word != "config-hash" || !(in >> word)) {
    throw std::runtime_error("checkpoint: missing config hash");
  }
  cp.config_hash = std::stoull(word, nullptr, 16);
  std::size_t count = 0;
  if (!(in >> word) || word != "params" || !(in >> count)) {
    throw std::runtime_error("checkpoint: missing parameter count");
  }
  cp.flat_params.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!(in >> word)) {
      throw std::runtime_error("checkpoint: truncated parameter list");
    }
    cp.flat_params.push_back(std::strtod(word.c_str(), nullptr));
  }
  if (in >> word) {
    if (word != "coefficient" || !(in >> word)) {
      throw std::runtime_error("checkpoint: malformed coefficient line");
    }
    cp.coefficient = std::strtod(word.c_str(), nullptr);
  }
  return cp;
}

}  // namespace pinn
