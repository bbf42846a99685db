#include "pinn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pinn {

namespace {

bool point_less(const Point& a, const Point& b) {
  if (a.x != b.x) return a.x < b.x;
  return a.t < b.t;
}

bool observation_less(const Observation& a, const Observation& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.t != b.t) return a.t < b.t;
  return a.u < b.u;
}

/// Left-to-right mean of already-emitted squared error nodes.
NodeId emit_mean(ScalarGraph& g, const std::vector<NodeId>& terms) {
  NodeId acc = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) {
    acc = g.add(acc, terms[i]);
  }
  return g.mul(g.constant(1.0 / static_cast<double>(terms.size())), acc);
}

struct PointEmitter {
  ScalarGraph& g;
  const NetworkParams& params;
  std::span<const NodeId> theta;

  struct Emitted {
    NodeId x_root, t_root, y;
    NodeId first, last;  // network body span, for tangent recording
  };

  Emitted emit(double x, double t) {
    Emitted e;
    e.x_root = g.root(x);
    e.t_root = g.root(t);
    e.first = g.size();
    e.y = emit_network(g, params, theta, e.x_root, e.t_root);
    e.last = g.size();
    return e;
  }
};

}  // namespace

void LossWeights::validate() const {
  const double all[] = {residual, boundary, initial, observation};
  double sum = 0.0;
  for (double w : all) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("loss weights must be finite and >= 0");
    }
    sum += w;
  }
  if (sum == 0.0) {
    throw std::invalid_argument("loss weights must not all be zero");
  }
}

LossGraph build_loss_graph(const NetworkParams& params,
                           const ResidualSpec& spec,
                           const ConditionSpec& conds,
                           const SpaceTimeDomain& domain,
                           const CollocationSet& colloc,
                           const LossWeights& weights) {
  weights.validate();
  params.validate();
  domain.validate();
  if (weights.residual > 0.0 && colloc.interior.empty()) {
    throw std::invalid_argument("loss: residual weight is nonzero but the "
                                "interior set is empty");
  }
  if (weights.boundary > 0.0 && colloc.boundary.empty()) {
    throw std::invalid_argument("loss: boundary weight is nonzero but the "
                                "boundary set is empty");
  }
  if (weights.initial > 0.0 && colloc.initial.empty()) {
    throw std::invalid_argument("loss: initial weight is nonzero but the "
                                "initial set is empty");
  }
  if (weights.observation > 0.0 && colloc.observations.empty()) {
    throw std::invalid_argument("loss: observation weight is nonzero but the "
                                "observation set is empty");
  }
  if (!conds.initial && weights.initial > 0.0) {
    throw std::invalid_argument("loss: initial condition function missing");
  }

  LossGraph out;
  out.weights = weights;
  out.theta = make_theta_roots(out.graph, params);
  if (spec.coefficient.is_trainable()) {
    out.coefficient = out.graph.root(spec.coefficient.value);
  }
  ScalarGraph& g = out.graph;
  PointEmitter emitter{g, params, out.theta};
  TangentRecorder recorder(g);

  if (weights.residual > 0.0) {
    std::vector<Point> pts = colloc.interior;
    std::sort(pts.begin(), pts.end(), point_less);
    std::vector<NodeId> squares;
    squares.reserve(pts.size());
    for (const Point& p : pts) {
      const auto e = emitter.emit(p.x, p.t);
      recorder.record_span(e.first, e.last, e.x_root);
      const NodeId dy_dx = recorder.tangent_node(e.y);
      recorder.record_span(e.first, e.last, e.t_root);
      const NodeId dy_dt = recorder.tangent_node(e.y);
      PointDerivatives derivs{&g, e.y, dy_dx, dy_dt};
      const NodeId r = residual(g, derivs, spec, out.coefficient);
      squares.push_back(g.square(r));
    }
    out.residual_term = emit_mean(g, squares);
  }

  if (weights.boundary > 0.0) {
    std::vector<Point> pts = colloc.boundary;
    std::sort(pts.begin(), pts.end(), point_less);
    std::vector<NodeId> squares;
    squares.reserve(pts.size());
    for (const Point& p : pts) {
      const auto e = emitter.emit(p.x, p.t);
      const double target = boundary_value(conds, domain, p.x, p.t);
      const NodeId diff = g.sub(e.y, g.constant(target));
      squares.push_back(g.square(diff));
    }
    out.boundary_term = emit_mean(g, squares);
  }

  if (weights.initial > 0.0) {
    std::vector<Point> pts = colloc.initial;
    std::sort(pts.begin(), pts.end(), point_less);
    std::vector<NodeId> squares;
    squares.reserve(pts.size());
    for (const Point& p : pts) {
      const auto e = emitter.emit(p.x, p.t);
      const NodeId diff = g.sub(e.y, g.constant(conds.initial(p.x)));
      squares.push_back(g.square(diff));
    }
    out.initial_term = emit_mean(g, squares);
  }

  if (weights.observation > 0.0) {
    std::vector<Observation> obs = colloc.observations;
    std::sort(obs.begin(), obs.end(), observation_less);
    std::vector<NodeId> squares;
    squares.reserve(obs.size());
    for (const Observation& o : obs) {
      const auto e = emitter.emit(o.x, o.t);
      const NodeId diff = g.sub(e.y, g.constant(o.u));
      squares.push_back(g.square(diff));
    }
    out.observation_term = emit_mean(g, squares);
  }

  // total = w_f*res + w_b*bnd + w_i*init + w_obs*obs, fixed term order,
  // zero-weight terms absent.
  NodeId total = kInvalidNode;
  auto accumulate = [&](double w, NodeId term) {
    if (term == kInvalidNode) return;
    const NodeId contribution = g.mul(g.constant(w), term);
    total = (total == kInvalidNode) ? contribution : g.add(total, contribution);
  };
  accumulate(weights.residual, out.residual_term);
  accumulate(weights.boundary, out.boundary_term);
  accumulate(weights.initial, out.initial_term);
  accumulate(weights.observation, out.observation_term);
  out.total = total;
  return out;
}

LossBreakdown loss_breakdown(const LossGraph& loss, const GraphEval& eval) {
  LossBreakdown b;
  auto term = [&](NodeId id) { return id == kInvalidNode ? 0.0 : eval.value(id); };
  b.total = eval.value(loss.total);
  b.residual_term = term(loss.residual_term);
  b.boundary_term = term(loss.boundary_term);
  b.initial_term = term(loss.initial_term);
  b.observation_term = term(loss.observation_term);
  return b;
}

LossResult pinn_loss(const NetworkParams& params, const ResidualSpec& spec,
                     const ConditionSpec& conds, const SpaceTimeDomain& domain,
                     const CollocationSet& colloc, const LossWeights& weights) {
  LossResult result;
  result.loss = build_loss_graph(params, spec, conds, domain, colloc, weights);
  GraphEval eval(result.loss.graph);
  eval.run();
  result.breakdown = loss_breakdown(result.loss, eval);
  return result;
}

LossGradient loss_gradient(const LossGraph& loss, GraphEval& eval) {
  if (!eval.evaluated()) {
    eval.run();
  }
  const std::vector<double> grad = eval.reverse_gradient(loss.total);
  LossGradient out;
  out.theta.assign(grad.begin(), grad.begin() + loss.theta.size());
  if (loss.coefficient != kInvalidNode) {
    out.coefficient = grad[loss.theta.size()];
  }
  return out;
}

}  // namespace pinn
