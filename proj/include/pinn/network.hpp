#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pinn/graph.hpp"

namespace pinn {

enum class Activation { kSigmoid, kTanh };

struct InitScheme {
  enum class Kind { kGlorotUniform, kConstant };
  Kind kind = Kind::kGlorotUniform;
  double constant_weight = 0.5;  // used when kind == kConstant
  double constant_bias = 0.0;

  static InitScheme glorot() { return {Kind::kGlorotUniform, 0.0, 0.0}; }
  static InitScheme constant(double weight, double bias) {
    return {Kind::kConstant, weight, bias};
  }
};

/// Fully connected feed-forward surrogate y(x,t;theta). Hidden layers are
/// activated; the output layer is linear unless output_linear is cleared,
/// in which case it shares the hidden activation. Weight matrices are
/// stored row-major as (fan_out x fan_in).
struct NetworkParams {
  std::vector<int> layer_sizes;  // starts at 2 (x,t), ends at 1
  std::vector<std::vector<double>> weights;  // per layer, fan_out*fan_in
  std::vector<std::vector<double>> biases;   // per layer, fan_out
  Activation activation = Activation::kSigmoid;
  bool output_linear = true;

  std::size_t parameter_count() const;
  /// Flat view in deterministic layer-major, row-major order: for each
  /// layer all weights then all biases. The trainer's checkpoint files and
  /// the loss graph's root ordering both use this layout.
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);
  void validate() const;
};

/// Builds parameters for the given layout. Glorot-uniform draws each
/// weight from +-sqrt(6/(fan_in+fan_out)) with zero biases; the constant
/// scheme fills every weight and bias with the given values. Deterministic
/// for a fixed seed.
NetworkParams init_network(const std::vector<int>& layer_sizes,
                           const InitScheme& scheme, std::uint64_t seed,
                           Activation activation = Activation::kSigmoid,
                           bool output_linear = true);

/// Plain forward pass. Accumulation order matches the recorded graph
/// exactly (left-to-right dot products, then bias), so graph evaluation
/// reproduces this value bit-for-bit.
double forward(const NetworkParams& params, double x, double t);

/// Emits the network into `graph` over existing parameter roots (flatten
/// order) and input nodes; returns the output node.
NodeId emit_network(ScalarGraph& graph, const NetworkParams& params,
                    std::span<const NodeId> theta, NodeId x, NodeId t);

/// Creates one root per parameter, in flatten order, defaulted to the
/// parameter values.
std::vector<NodeId> make_theta_roots(ScalarGraph& graph,
                                     const NetworkParams& params);

/// A self-contained graph computing y, dy/dx, and dy/dt at one point, all
/// rooted at theta (plus the x,t input roots), so one reverse sweep yields
/// parameter gradients of any combination of the three.
struct NetworkDerivatives {
  ScalarGraph graph;
  std::vector<NodeId> theta;
  NodeId x_root = kInvalidNode;
  NodeId t_root = kInvalidNode;
  NodeId y = kInvalidNode;
  NodeId dy_dx = kInvalidNode;
  NodeId dy_dt = kInvalidNode;
};

NetworkDerivatives forward_with_input_derivs(const NetworkParams& params,
                                             double x, double t);

}  // namespace pinn
