#include "pinn/transport.hpp"

#include <cmath>
#include <stdexcept>

namespace pinn {

NodeId residual(ScalarGraph& graph, const PointDerivatives& derivs,
                const ResidualSpec& spec, NodeId coefficient_root) {
  if (derivs.graph != &graph) {
    throw std::invalid_argument("residual: derivative nodes belong to a "
                                "different graph");
  }
  NodeId c;
  if (spec.coefficient.is_trainable()) {
    if (coefficient_root == kInvalidNode || !graph.is_root(coefficient_root)) {
      throw std::invalid_argument("residual: trainable coefficient requires "
                                  "a coefficient root");
    }
    c = coefficient_root;
  } else {
    if (!std::isfinite(spec.coefficient.value)) {
      throw std::invalid_argument("residual: coefficient must be finite");
    }
    c = graph.constant(spec.coefficient.value);
  }
  return graph.add(derivs.dy_dt, graph.mul(c, derivs.dy_dx));
}

double exact_solution(double x, double t) {
  const double xi = x - 3.0 * t;
  return xi * std::exp(-(xi * xi));
}

double initial_condition(double x) {
  return x * std::exp(-(x * x));
}

double boundary_value(const ConditionSpec& conds, const SpaceTimeDomain& domain,
                      double wall_x, double t) {
  if (wall_x != domain.x_min && wall_x != domain.x_max) {
    throw std::invalid_argument("boundary_value: x is not on a wall");
  }
  switch (conds.boundary) {
    case BoundaryKind::kDirichletZero:
      return 0.0;
    case BoundaryKind::kDirichletExact:
      return exact_solution(wall_x, t);
  }
  throw std::logic_error("boundary_value: unknown boundary kind");
}

ConditionSpec transport_conditions(BoundaryKind boundary) {
  ConditionSpec conds;
  conds.initial = initial_condition;
  conds.boundary = boundary;
  return conds;
}

}  // namespace pinn
