#include "pinn/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pinn/sampling.hpp"

namespace pinn {

namespace {

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::kSigmoid:
      return eval_sigmoid(z);
    case Activation::kTanh:
      // Same composition the graph emits: 2*sigmoid(2z) - 1.
      return 2.0 * eval_sigmoid(2.0 * z) - 1.0;
  }
  throw std::logic_error("unknown activation");
}

NodeId emit_activation(ScalarGraph& g, Activation act, NodeId z) {
  switch (act) {
    case Activation::kSigmoid:
      return g.sigmoid(z);
    case Activation::kTanh: {
      // tanh(z) = 2*sigmoid(2z) - 1, composed from the closed op set so
      // its derivative rules need no new primitive.
      const NodeId two = g.constant(2.0);
      const NodeId s = g.sigmoid(g.mul(two, z));
      return g.sub(g.mul(two, s), g.constant(1.0));
    }
  }
  throw std::logic_error("unknown activation");
}

}  // namespace

std::size_t NetworkParams::parameter_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
    count += fan_out * fan_in + fan_out;
  }
  return count;
}

std::vector<double> NetworkParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    flat.insert(flat.end(), weights[l].begin(), weights[l].end());
    flat.insert(flat.end(), biases[l].begin(), biases[l].end());
  }
  return flat;
}

void NetworkParams::assign_flat(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw std::invalid_argument("assign_flat: expected " +
                                std::to_string(parameter_count()) +
                                " values, got " + std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (double& w : weights[l]) w = flat[pos++];
    for (double& b : biases[l]) b = flat[pos++];
  }
}

void NetworkParams::validate() const {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("network: need at least input and output "
                                "layers");
  }
  if (layer_sizes.front() != 2 || layer_sizes.back() != 1) {
    throw std::invalid_argument("network: layer sizes must start at 2 and "
                                "end at 1");
  }
  for (int s : layer_sizes) {
    if (s < 1) throw std::invalid_argument("network: layer sizes must be >= 1");
  }
  const std::size_t n_layers = layer_sizes.size() - 1;
  if (weights.size() != n_layers || biases.size() != n_layers) {
    throw std::invalid_argument("network: layer count mismatch");
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
    if (weights[l].size() != fan_out * fan_in || biases[l].size() != fan_out) {
      throw std::invalid_argument("network: shape mismatch at layer " +
                                  std::to_string(l));
    }
    for (double w : weights[l]) {
      if (!std::isfinite(w)) {
        throw std::invalid_argument("network: non-finite weight");
      }
    }
    for (double b : biases[l]) {
      if (!std::isfinite(b)) {
        throw std::invalid_argument("network: non-finite bias");
      }
    }
  }
}

NetworkParams init_network(const std::vector<int>& layer_sizes,
                           const InitScheme& scheme, std::uint64_t seed,
                           Activation activation, bool output_linear) {
  if (layer_sizes.size() < 2 || layer_sizes.front() != 2 ||
      layer_sizes.back() != 1) {
    throw std::invalid_argument("init_network: layer sizes must start at 2 "
                                "and end at 1");
  }
  NetworkParams params;
  params.layer_sizes = layer_sizes;
  params.activation = activation;
  params.output_linear = output_linear;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const std::size_t fan_in = static_cast<std::size_t>(layer_sizes[l]);
    const std::size_t fan_out = static_cast<std::size_t>(layer_sizes[l + 1]);
    std::vector<double> w(fan_out * fan_in);
    std::vector<double> b(fan_out);
    if (scheme.kind == InitScheme::Kind::kGlorotUniform) {
      const double limit =
          std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      for (double& e : w) {
        e = -limit + rng.next_unit() * (2.0 * limit);
      }
      // biases stay 0
    } else {
      for (double& e : w) e = scheme.constant_weight;
      for (double& e : b) e = scheme.constant_bias;
    }
    params.weights.push_back(std::move(w));
    params.biases.push_back(std::move(b));
  }
  params.validate();
  return params;
}

double forward(const NetworkParams& params, double x, double t) {
  params.validate();
  std::vector<double> current = {x, t};
  std::vector<double> next;
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = current.size();
    const std::size_t fan_out = params.biases[l].size();
    next.assign(fan_out, 0.0);
    const bool activated = (l + 1 < n_layers) || !params.output_linear;
    for (std::size_t i = 0; i < fan_out; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < fan_in; ++j) {
        z = z + params.weights[l][i * fan_in + j] * current[j];
      }
      z = z + params.biases[l][i];
      next[i] = activated ? apply_activation(params.activation, z) : z;
    }
    current.swap(next);
  }
  return current[0];
}

std::vector<NodeId> make_theta_roots(ScalarGraph& graph,
                                     const NetworkParams& params) {
  const std::vector<double> flat = params.flatten();
  std::vector<NodeId> theta;
  theta.reserve(flat.size());
  for (double v : flat) {
    theta.push_back(graph.root(v));
  }
  return theta;
}

NodeId emit_network(ScalarGraph& graph, const NetworkParams& params,
                    std::span<const NodeId> theta, NodeId x, NodeId t) {
  params.validate();
  if (theta.size() != params.parameter_count()) {
    throw std::invalid_argument("emit_network: theta root count mismatch");
  }
  std::vector<NodeId> current = {x, t};
  std::vector<NodeId> next;
  std::size_t pos = 0;  // walks theta in flatten order
  const std::size_t n_layers = params.weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = current.size();
    const std::size_t fan_out = params.biases[l].size();
    const std::size_t w_base = pos;
    const std::size_t b_base = pos + fan_out * fan_in;
    next.clear();
    const bool activated = (l + 1 < n_layers) || !params.output_linear;
    for (std::size_t i = 0; i < fan_out; ++i) {
      // z = sum_j w_ij*h_j left to right, then + b_i: the same order as
      // forward(), which keeps the two paths bit-identical.
      NodeId z = graph.mul(theta[w_base + i * fan_in + 0], current[0]);
      for (std::size_t j = 1; j < fan_in; ++j) {
        z = graph.add(z, graph.mul(theta[w_base + i * fan_in + j], current[j]));
      }
      z = graph.add(z, theta[b_base + i]);
      next.push_back(activated ? emit_activation(graph, params.activation, z)
                               : z);
    }
    current.swap(next);
    pos = b_base + fan_out;
  }
  return current[0];
}

NetworkDerivatives forward_with_input_derivs(const NetworkParams& params,
                                             double x, double t) {
  NetworkDerivatives out;
  out.theta = make_theta_roots(out.graph, params);
  out.x_root = out.graph.root(x);
  out.t_root = out.graph.root(t);
  const NodeId first = out.graph.size();
  out.y = emit_network(out.graph, params, out.theta, out.x_root, out.t_root);
  const NodeId last = out.graph.size();
  TangentRecorder recorder(out.graph);
  recorder.record_span(first, last, out.x_root);
  out.dy_dx = recorder.tangent_node(out.y);
  recorder.record_span(first, last, out.t_root);
  out.dy_dt = recorder.tangent_node(out.y);
  return out;
}

}  // namespace pinn
