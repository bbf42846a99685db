#pragma once

#include <optional>
#include <vector>

#include "pinn/network.hpp"
#include "pinn/sampling.hpp"
#include "pinn/transport.hpp"

namespace pinn {

struct LossWeights {
  double residual = 1.0;     // w_f, interior points
  double boundary = 1.0;     // w_b, wall points
  double initial = 1.0;      // w_i, t = t_min points
  double observation = 1.0;  // w_obs, observed values (inverse problems)

  void validate() const;  // finite, >= 0, not all zero
};

struct LossBreakdown {
  double total = 0.0;
  double residual_term = 0.0;
  double boundary_term = 0.0;
  double initial_term = 0.0;
  double observation_term = 0.0;
};

/// The assembled loss as one recorded graph. Roots are created in a fixed
/// order — theta (flatten order), then the trainable coefficient if any,
/// then per-point inputs — so a reverse sweep's leading entries are the
/// parameter gradient.
struct LossGraph {
  ScalarGraph graph;
  std::vector<NodeId> theta;
  NodeId coefficient = kInvalidNode;  // root, if the coefficient trains
  NodeId total = kInvalidNode;
  // Term nodes; kInvalidNode when the term's weight is exactly zero (the
  // subgraph is skipped entirely, which keeps the total bitwise
  // independent of that term's points).
  NodeId residual_term = kInvalidNode;
  NodeId boundary_term = kInvalidNode;
  NodeId initial_term = kInvalidNode;
  NodeId observation_term = kInvalidNode;
  LossWeights weights;
};

/// Records the weighted PINN loss over the collocation sets:
/// mean-square residual, wall mismatch, initial-profile mismatch, and
/// observation mismatch. Points are canonically sorted by (x,t) before
/// accumulation so the totals do not depend on sampling order.
LossGraph build_loss_graph(const NetworkParams& params,
                           const ResidualSpec& spec,
                           const ConditionSpec& conds,
                           const SpaceTimeDomain& domain,
                           const CollocationSet& colloc,
                           const LossWeights& weights);

/// Extracts the term values of an evaluated loss graph.
LossBreakdown loss_breakdown(const LossGraph& loss, const GraphEval& eval);

/// Convenience single-shot evaluation at the recorded parameter values.
struct LossResult {
  LossGraph loss;
  LossBreakdown breakdown;
};
LossResult pinn_loss(const NetworkParams& params, const ResidualSpec& spec,
                     const ConditionSpec& conds, const SpaceTimeDomain& domain,
                     const CollocationSet& colloc, const LossWeights& weights);

/// One reverse sweep over the total: exact parameter gradient plus the
/// coefficient gradient when it trains.
struct LossGradient {
  std::vector<double> theta;
  std::optional<double> coefficient;
};
LossGradient loss_gradient(const LossGraph& loss, GraphEval& eval);

}  // namespace pinn
