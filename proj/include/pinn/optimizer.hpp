#pragma once

#include <span>
#include <vector>

namespace pinn {

struct OptimizerConfig {
  enum class Kind { kSgd, kAdam };
  Kind kind = Kind::kAdam;
  double learning_rate = 0.001;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step_count = 0;

  static AdamState zeros(std::size_t size);
};

/// params - lr * grads.
std::vector<double> sgd_step(std::span<const double> params,
                             std::span<const double> grads,
                             double learning_rate);

/// Standard Adam with bias correction; advances the state by one step.
std::vector<double> adam_step(AdamState& state, std::span<const double> params,
                              std::span<const double> grads,
                              const OptimizerConfig& config);

/// Stateful wrapper used by the training loops.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& config, std::size_t size);
  void step(std::vector<double>& params, std::span<const double> grads);

 private:
  OptimizerConfig config_;
  AdamState adam_;
};

}  // namespace pinn
