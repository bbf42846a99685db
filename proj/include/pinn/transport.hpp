#pragma once

#include <functional>
#include <optional>

#include "pinn/graph.hpp"
#include "pinn/sampling.hpp"

namespace pinn {

/// Advection speed in the residual u_t + c*u_x: either a known constant or
/// an unknown to be recovered, in which case it becomes a root of the loss
/// graph and trains alongside the network parameters.
struct Coefficient {
  enum class Kind { kFixed, kTrainable };
  Kind kind = Kind::kFixed;
  double value = 3.0;  // fixed value, or the trainable initial value

  static Coefficient fixed(double c) { return {Kind::kFixed, c}; }
  static Coefficient trainable(double initial) {
    return {Kind::kTrainable, initial};
  }
  bool is_trainable() const { return kind == Kind::kTrainable; }
};

struct ResidualSpec {
  Coefficient coefficient = Coefficient::fixed(3.0);
};

enum class BoundaryKind { kDirichletZero, kDirichletExact };

struct ConditionSpec {
  std::function<double(double)> initial;  // x -> u(x, t_min)
  BoundaryKind boundary = BoundaryKind::kDirichletZero;
};

/// The network's first derivatives at one point, as nodes of a shared
/// graph.
struct PointDerivatives {
  const ScalarGraph* graph = nullptr;
  NodeId y = kInvalidNode;
  NodeId dy_dx = kInvalidNode;
  NodeId dy_dt = kInvalidNode;
};

/// Emits the residual dy/dt + c*dy/dx as a node of `graph`. For a
/// trainable coefficient the caller supplies its root via
/// `coefficient_root`.
NodeId residual(ScalarGraph& graph, const PointDerivatives& derivs,
                const ResidualSpec& spec,
                NodeId coefficient_root = kInvalidNode);

/// Travelling-pulse solution (x - 3t) * exp(-(x - 3t)^2); the test oracle
/// for the fixed-coefficient problem.
double exact_solution(double x, double t);

/// u(x, t_min) = x * exp(-x^2).
double initial_condition(double x);

/// Prescribed wall value: zero everywhere, or the exact solution sampled
/// on the wall. wall_x must equal one of the domain walls bitwise.
double boundary_value(const ConditionSpec& conds, const SpaceTimeDomain& domain,
                      double wall_x, double t);

/// Default conditions for the transport problem: pulse initial profile and
/// the chosen wall rule.
ConditionSpec transport_conditions(BoundaryKind boundary);

}  // namespace pinn
