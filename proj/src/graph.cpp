#include "pinn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace pinn {

namespace {

std::uint64_t bit_key(double v) {
  std::uint64_t k;
  std::memcpy(&k, &v, sizeof k);
  return k;
}

}  // namespace

double eval_sigmoid(double z) {
  // Two-branch form: the exponential argument is never positive, so no
  // intermediate overflows for any finite z.
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

NodeId ScalarGraph::push(OpKind kind, NodeId a, NodeId b, double payload) {
  nodes_.push_back(Node{kind, a, b, payload});
  return static_cast<NodeId>(nodes_.size() - 1);
}

void ScalarGraph::check_operand(NodeId id) const {
  if (id < 0 || id >= size()) {
    throw EvalError("ScalarGraph: operand id " + std::to_string(id) +
                    " out of range");
  }
}

NodeId ScalarGraph::root(double default_value) {
  const NodeId id = push(OpKind::kRoot, kInvalidNode, kInvalidNode,
                         default_value);
  roots_.push_back(id);
  return id;
}

NodeId ScalarGraph::constant(double value) {
  const auto key = bit_key(value);
  if (auto it = constant_pool_.find(key); it != constant_pool_.end()) {
    return it->second;
  }
  const NodeId id = push(OpKind::kConstant, kInvalidNode, kInvalidNode, value);
  constant_pool_.emplace(key, id);
  return id;
}

NodeId ScalarGraph::add(NodeId a, NodeId b) {
  check_operand(a);
  check_operand(b);
  return push(OpKind::kAdd, a, b);
}

NodeId ScalarGraph::sub(NodeId a, NodeId b) {
  check_operand(a);
  check_operand(b);
  return push(OpKind::kSub, a, b);
}

NodeId ScalarGraph::mul(NodeId a, NodeId b) {
  check_operand(a);
  check_operand(b);
  return push(OpKind::kMul, a, b);
}

NodeId ScalarGraph::neg(NodeId a) {
  check_operand(a);
  return push(OpKind::kNeg, a, kInvalidNode);
}

NodeId ScalarGraph::exp(NodeId a) {
  check_operand(a);
  return push(OpKind::kExp, a, kInvalidNode);
}

NodeId ScalarGraph::sigmoid(NodeId a) {
  check_operand(a);
  return push(OpKind::kSigmoid, a, kInvalidNode);
}

NodeId ScalarGraph::square(NodeId a) {
  check_operand(a);
  return push(OpKind::kSquare, a, kInvalidNode);
}

bool ScalarGraph::is_root(NodeId id) const {
  return id >= 0 && id < size() && nodes_[id].kind == OpKind::kRoot;
}

std::int32_t ScalarGraph::root_index(NodeId id) const {
  const auto it = std::lower_bound(roots_.begin(), roots_.end(), id);
  if (it == roots_.end() || *it != id) return -1;
  return static_cast<std::int32_t>(it - roots_.begin());
}

GraphEval::GraphEval(const ScalarGraph& graph) : graph_(&graph) {
  values_.resize(graph.nodes().size(), 0.0);
  for (NodeId i = 0; i < graph.size(); ++i) {
    const Node& n = graph.nodes()[i];
    if (n.kind == OpKind::kConstant || n.kind == OpKind::kRoot) {
      values_[i] = n.payload;
    }
  }
}

void GraphEval::set_root(NodeId root, double value) {
  if (!graph_->is_root(root)) {
    throw EvalError("GraphEval::set_root: node " + std::to_string(root) +
                    " is not a root");
  }
  values_[root] = value;
  evaluated_ = false;
}

void GraphEval::run() {
  const auto& nodes = graph_->nodes();
  const std::size_t n = nodes.size();
  double* v = values_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const Node& nd = nodes[i];
    switch (nd.kind) {
      case OpKind::kConstant:
      case OpKind::kRoot:
        break;
      case OpKind::kAdd:
        v[i] = v[nd.a] + v[nd.b];
        break;
      case OpKind::kSub:
        v[i] = v[nd.a] - v[nd.b];
        break;
      case OpKind::kMul:
        v[i] = v[nd.a] * v[nd.b];
        break;
      case OpKind::kNeg:
        v[i] = -v[nd.a];
        break;
      case OpKind::kExp:
        v[i] = std::exp(v[nd.a]);
        break;
      case OpKind::kSigmoid:
        v[i] = eval_sigmoid(v[nd.a]);
        break;
      case OpKind::kSquare:
        v[i] = v[nd.a] * v[nd.a];
        break;
    }
  }
  // Single scan keeps the hot loop branch-free; the first offender is the
  // diagnostic (everything downstream of it is suspect anyway).
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) {
      evaluated_ = false;
      throw EvalError("evaluation produced non-finite value at node " +
                      std::to_string(i));
    }
  }
  evaluated_ = true;
}

double GraphEval::value(NodeId id) const {
  if (id < 0 || id >= graph_->size()) {
    throw EvalError("GraphEval::value: node id out of range");
  }
  if (!evaluated_) {
    throw EvalError("GraphEval::value: graph not evaluated");
  }
  return values_[id];
}

std::vector<double> GraphEval::reverse_gradient(NodeId output) {
  if (output < 0 || output >= graph_->size()) {
    throw EvalError("reverse_gradient: output id out of range");
  }
  if (!evaluated_) {
    throw EvalError("reverse_gradient: graph not evaluated");
  }
  const auto& nodes = graph_->nodes();
  adjoints_.assign(nodes.size(), 0.0);
  double* adj = adjoints_.data();
  const double* v = values_.data();
  adj[output] = 1.0;
  for (NodeId i = output; i >= 0; --i) {
    const double w = adj[i];
    if (w == 0.0) continue;
    const Node& nd = nodes[i];
    switch (nd.kind) {
      case OpKind::kConstant:
      case OpKind::kRoot:
        break;
      case OpKind::kAdd:
        adj[nd.a] += w;
        adj[nd.b] += w;
        break;
      case OpKind::kSub:
        adj[nd.a] += w;
        adj[nd.b] -= w;
        break;
      case OpKind::kMul:
        adj[nd.a] += w * v[nd.b];
        adj[nd.b] += w * v[nd.a];
        break;
      case OpKind::kNeg:
        adj[nd.a] -= w;
        break;
      case OpKind::kExp:
        adj[nd.a] += w * v[i];
        break;
      case OpKind::kSigmoid:
        adj[nd.a] += w * v[i] * (1.0 - v[i]);
        break;
      case OpKind::kSquare:
        adj[nd.a] += w * 2.0 * v[nd.a];
        break;
    }
  }
  const auto& roots = graph_->roots();
  std::vector<double> grad(roots.size());
  for (std::size_t r = 0; r < roots.size(); ++r) {
    grad[r] = adj[roots[r]];
  }
  return grad;
}

std::vector<DualValue> GraphEval::forward_tangent(NodeId direction_root) const {
  if (!graph_->is_root(direction_root)) {
    throw EvalError("forward_tangent: node " + std::to_string(direction_root) +
                    " is not a root");
  }
  if (!evaluated_) {
    throw EvalError("forward_tangent: graph not evaluated");
  }
  const auto& nodes = graph_->nodes();
  std::vector<DualValue> dual(nodes.size());
  const double* v = values_.data();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    double t = 0.0;
    switch (nd.kind) {
      case OpKind::kConstant:
        t = 0.0;
        break;
      case OpKind::kRoot:
        t = (static_cast<NodeId>(i) == direction_root) ? 1.0 : 0.0;
        break;
      case OpKind::kAdd:
        t = dual[nd.a].tangent + dual[nd.b].tangent;
        break;
      case OpKind::kSub:
        t = dual[nd.a].tangent - dual[nd.b].tangent;
        break;
      case OpKind::kMul:
        t = dual[nd.a].tangent * v[nd.b] + v[nd.a] * dual[nd.b].tangent;
        break;
      case OpKind::kNeg:
        t = -dual[nd.a].tangent;
        break;
      case OpKind::kExp:
        t = v[i] * dual[nd.a].tangent;
        break;
      case OpKind::kSigmoid:
        t = v[i] * (1.0 - v[i]) * dual[nd.a].tangent;
        break;
      case OpKind::kSquare:
        t = 2.0 * v[nd.a] * dual[nd.a].tangent;
        break;
    }
    dual[i] = DualValue{v[i], t};
  }
  return dual;
}

TangentRecorder::TangentRecorder(ScalarGraph& graph) : graph_(&graph) {}

NodeId TangentRecorder::tangent_add(NodeId ta, NodeId tb) {
  if (ta == kZero) return tb;
  if (tb == kZero) return ta;
  return graph_->add(materialize(ta), materialize(tb));
}

NodeId TangentRecorder::tangent_sub(NodeId ta, NodeId tb) {
  if (tb == kZero) return ta;
  if (ta == kZero) {
    if (tb == kOne) return graph_->constant(-1.0);
    return graph_->neg(tb);
  }
  return graph_->sub(materialize(ta), materialize(tb));
}

NodeId TangentRecorder::tangent_scale(NodeId factor, NodeId t) {
  if (t == kZero) return kZero;
  if (t == kOne) return factor;
  return graph_->mul(factor, t);
}

NodeId TangentRecorder::materialize(NodeId t) {
  if (t == kZero) return graph_->constant(0.0);
  if (t == kOne) return graph_->constant(1.0);
  return t;
}

void TangentRecorder::record_span(NodeId first, NodeId last,
                                  NodeId direction_root) {
  if (!graph_->is_root(direction_root)) {
    throw EvalError("record_span: node " + std::to_string(direction_root) +
                    " is not a root");
  }
  if (first < 0 || last > graph_->size() || first > last) {
    throw EvalError("record_span: invalid node span");
  }
  tangent_.assign(graph_->nodes().size(), kZero);
  sigma_prime_.resize(graph_->nodes().size(), kInvalidNode);
  twice_.resize(graph_->nodes().size(), kInvalidNode);
  tangent_[direction_root] = kOne;

  // New nodes appended below must not themselves be differentiated, so the
  // sweep runs over the fixed original span.
  for (NodeId i = first; i < last; ++i) {
    const Node nd = graph_->nodes()[i];  // copy: vector may reallocate
    NodeId t = kZero;
    switch (nd.kind) {
      case OpKind::kConstant:
        break;
      case OpKind::kRoot:
        t = tangent_[i];  // seeded above
        break;
      case OpKind::kAdd:
        t = tangent_add(tangent_[nd.a], tangent_[nd.b]);
        break;
      case OpKind::kSub:
        t = tangent_sub(tangent_[nd.a], tangent_[nd.b]);
        break;
      case OpKind::kMul: {
        const NodeId left = tangent_scale(nd.b, tangent_[nd.a]);
        const NodeId right = tangent_scale(nd.a, tangent_[nd.b]);
        t = tangent_add(left, right);
        break;
      }
      case OpKind::kNeg: {
        const NodeId ta = tangent_[nd.a];
        if (ta == kZero) {
          t = kZero;
        } else if (ta == kOne) {
          t = graph_->constant(-1.0);
        } else {
          t = graph_->neg(ta);
        }
        break;
      }
      case OpKind::kExp:
        t = tangent_scale(i, tangent_[nd.a]);
        break;
      case OpKind::kSigmoid: {
        const NodeId ta = tangent_[nd.a];
        if (ta == kZero) {
          t = kZero;
        } else {
          if (sigma_prime_[i] == kInvalidNode) {
            const NodeId one_minus = graph_->sub(graph_->constant(1.0), i);
            sigma_prime_[i] = graph_->mul(i, one_minus);
          }
          t = tangent_scale(sigma_prime_[i], ta);
        }
        break;
      }
      case OpKind::kSquare: {
        const NodeId ta = tangent_[nd.a];
        if (ta == kZero) {
          t = kZero;
        } else {
          if (twice_[i] == kInvalidNode) {
            twice_[i] = graph_->add(nd.a, nd.a);
          }
          t = tangent_scale(twice_[i], ta);
        }
        break;
      }
    }
    tangent_[i] = t;
  }
}

NodeId TangentRecorder::tangent_node(NodeId primal) {
  if (primal < 0 || primal >= static_cast<NodeId>(tangent_.size())) {
    throw EvalError("tangent_node: no tangent recorded for node " +
                    std::to_string(primal));
  }
  return materialize(tangent_[primal]);
}

TangentGraph record_tangent_as_graph(const ScalarGraph& graph,
                                     NodeId direction_root) {
  TangentGraph out;
  out.graph = graph;
  TangentRecorder recorder(out.graph);
  recorder.record_span(0, graph.size(), direction_root);
  out.tangent.resize(graph.size());
  for (NodeId i = 0; i < graph.size(); ++i) {
    out.tangent[i] = recorder.tangent_node(i);
  }
  return out;
}

}  // namespace pinn
