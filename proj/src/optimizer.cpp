#include "pinn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace pinn {

void OptimizerConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("optimizer: learning rate must be positive");
  }
  if (kind == Kind::kAdam) {
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 ||
        adam_beta2 >= 1.0) {
      throw std::invalid_argument("optimizer: betas must lie in [0,1)");
    }
    if (!(adam_epsilon > 0.0)) {
      throw std::invalid_argument("optimizer: epsilon must be positive");
    }
  }
}

AdamState AdamState::zeros(std::size_t size) {
  AdamState s;
  s.first_moment.assign(size, 0.0);
  s.second_moment.assign(size, 0.0);
  s.step_count = 0;
  return s;
}

std::vector<double> sgd_step(std::span<const double> params,
                             std::span<const double> grads,
                             double learning_rate) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("sgd_step: length mismatch");
  }
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    out[i] = params[i] - learning_rate * grads[i];
  }
  return out;
}

std::vector<double> adam_step(AdamState& state, std::span<const double> params,
                              std::span<const double> grads,
                              const OptimizerConfig& config) {
  if (params.size() != grads.size() ||
      state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw std::invalid_argument("adam_step: length mismatch");
  }
  config.validate();
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.step_count += 1;
  const double correction1 =
      1.0 - std::pow(b1, static_cast<double>(state.step_count));
  const double correction2 =
      1.0 - std::pow(b2, static_cast<double>(state.step_count));
  std::vector<double> out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.first_moment[i] = b1 * state.first_moment[i] + (1.0 - b1) * g;
    state.second_moment[i] = b2 * state.second_moment[i] + (1.0 - b2) * g * g;
    const double m_hat = state.first_moment[i] / correction1;
    const double v_hat = state.second_moment[i] / correction2;
    out[i] = params[i] -
             config.learning_rate * m_hat /
                 (std::sqrt(v_hat) + config.adam_epsilon);
  }
  return out;
}

Optimizer::Optimizer(const OptimizerConfig& config, std::size_t size)
    : config_(config), adam_(AdamState::zeros(size)) {
  config_.validate();
}

void Optimizer::step(std::vector<double>& params,
                     std::span<const double> grads) {
  if (config_.kind == OptimizerConfig::Kind::kSgd) {
    params = sgd_step(params, grads, config_.learning_rate);
  } else {
    params = adam_step(adam_, params, grads, config_);
  }
}

}  // namespace pinn
