#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace pinn {

using NodeId = std::int32_t;
inline constexpr NodeId kInvalidNode = -1;

/// Operation kinds form a closed set; every kind has a hand-audited value
/// rule, reverse (adjoint) rule, and tangent rule.
enum class OpKind : std::uint8_t {
  kConstant,
  kRoot,  // independent variable (parameter or input)
  kAdd,
  kSub,
  kMul,
  kNeg,
  kExp,
  kSigmoid,
  kSquare,
};

struct Node {
  OpKind kind;
  NodeId a = kInvalidNode;
  NodeId b = kInvalidNode;
  // Constant payload, or the default value of a root at recording time.
  double payload = 0.0;
};

/// Value/tangent pair produced by forward-mode accumulation.
struct DualValue {
  double primal = 0.0;
  double tangent = 0.0;
};

/// Recorded computation of a differentiable scalar expression.
///
/// The graph is an append-only tape: operands always precede their
/// consumers, so a single forward sweep evaluates it and a single backward
/// sweep differentiates it. Recording is single-context; once recorded the
/// topology is immutable and any number of GraphEval buffers may evaluate
/// it concurrently.
class ScalarGraph {
 public:
  /// Creates an independent variable with the given default value.
  NodeId root(double default_value);
  /// Creates (or reuses) a constant node. Constants are deduplicated by
  /// bit pattern.
  NodeId constant(double value);

  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId neg(NodeId a);
  NodeId exp(NodeId a);
  NodeId sigmoid(NodeId a);
  NodeId square(NodeId a);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<NodeId>& roots() const { return roots_; }
  NodeId size() const { return static_cast<NodeId>(nodes_.size()); }
  bool is_root(NodeId id) const;
  /// Position of a root within roots(), or -1.
  std::int32_t root_index(NodeId id) const;

 private:
  NodeId push(OpKind kind, NodeId a, NodeId b, double payload = 0.0);
  void check_operand(NodeId id) const;

  std::vector<Node> nodes_;
  std::vector<NodeId> roots_;
  std::unordered_map<std::uint64_t, NodeId> constant_pool_;
};

/// Numerically stable logistic function, 1/(1+e^-z).
double eval_sigmoid(double z);

/// Evaluation buffer for one ScalarGraph.
///
/// Holds the per-node values of a single forward sweep plus a reusable
/// adjoint buffer for reverse sweeps. Root values default to the values
/// given at recording time and can be overridden with set_root.
class GraphEval {
 public:
  explicit GraphEval(const ScalarGraph& graph);

  /// Overrides a root's value; invalidates the current evaluation.
  void set_root(NodeId root, double value);

  /// Forward sweep. Throws EvalError naming the first node whose value is
  /// non-finite.
  void run();

  bool evaluated() const { return evaluated_; }
  double value(NodeId id) const;

  /// One reverse sweep from `output`: returns d(output)/d(root) for every
  /// root, aligned with graph().roots(). Roots the output does not depend
  /// on receive exactly 0.
  std::vector<double> reverse_gradient(NodeId output);

  /// Forward-mode sweep along one root: d(node)/d(direction) for every
  /// node, paired with its primal value.
  std::vector<DualValue> forward_tangent(NodeId direction_root) const;

  const ScalarGraph& graph() const { return *graph_; }

 private:
  const ScalarGraph* graph_;
  std::vector<double> values_;
  std::vector<double> adjoints_;  // scratch, reused across reverse sweeps
  bool evaluated_ = false;
};

/// Records, as new nodes appended to a ScalarGraph, the computation of
/// every node's tangent along a chosen root. Folds structural zeros and
/// units so untouched subexpressions contribute no nodes, and memoizes
/// activation-derivative helper nodes so a second direction reuses them.
///
/// The recorded tangent of a node is itself an ordinary differentiable
/// expression over the original roots, which is what makes
/// reverse-over-tangent (mixed parameter/input derivatives) possible.
class TangentRecorder {
 public:
  explicit TangentRecorder(ScalarGraph& graph);

  /// Records tangents for nodes in [first, last) along direction_root.
  /// Nodes outside the span keep tangent zero. Resets any previous
  /// direction's tangent assignment; derivative helper nodes are kept.
  void record_span(NodeId first, NodeId last, NodeId direction_root);

  /// Node computing d(primal)/d(direction) for the last recorded
  /// direction. Materializes a constant 0/1 node if the tangent folded
  /// away structurally.
  NodeId tangent_node(NodeId primal);

 private:
  static constexpr NodeId kZero = -2;
  static constexpr NodeId kOne = -3;

  NodeId tangent_add(NodeId ta, NodeId tb);
  NodeId tangent_sub(NodeId ta, NodeId tb);
  NodeId tangent_scale(NodeId factor, NodeId t);  // factor * t with folding
  NodeId materialize(NodeId t);

  ScalarGraph* graph_;
  std::vector<NodeId> tangent_;
  std::vector<NodeId> sigma_prime_;  // per-sigmoid s(1-s) node, shared
  std::vector<NodeId> twice_;        // per-square 2a node, shared
};

/// Whole-graph tangent recording: a copy of `graph` extended with nodes
/// that compute every original node's tangent along `direction_root`. The
/// copy shares the original root ids, so reverse_gradient applies to any
/// tangent node.
struct TangentGraph {
  ScalarGraph graph;
  std::vector<NodeId> tangent;  // tangent[i] computes d(node i)/d(direction)
};
TangentGraph record_tangent_as_graph(const ScalarGraph& graph,
                                     NodeId direction_root);

/// Thrown when evaluation produces a non-finite intermediate or an
/// operation is used outside its contract.
class EvalError : public std::exception {
 public:
  explicit EvalError(std::string message) : message_(std::move(message)) {}
  const char* what() const noexcept override { return message_.c_str(); }

 private:
  std::string message_;
};

}  // namespace pinn
