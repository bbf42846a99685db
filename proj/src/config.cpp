#include "pinn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pinn {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const char* where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string("config: unknown key \"") +
                                  it.key() + "\" in " + where);
    }
  }
}

Activation parse_activation(const std::string& s) {
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "tanh") return Activation::kTanh;
  throw std::invalid_argument("config: unknown activation \"" + s + "\"");
}

SampleMode parse_sample_mode(const std::string& s) {
  if (s == "uniform_random") return SampleMode::kUniformRandom;
  if (s == "equispaced_grid") return SampleMode::kEquispacedGrid;
  throw std::invalid_argument("config: unknown sampling mode \"" + s + "\"");
}

BoundaryKind parse_boundary(const std::string& s) {
  if (s == "dirichlet_zero") return BoundaryKind::kDirichletZero;
  if (s == "dirichlet_exact") return BoundaryKind::kDirichletExact;
  throw std::invalid_argument("config: unknown boundary condition \"" + s +
                              "\"");
}

const char* activation_name(Activation a) {
  return a == Activation::kSigmoid ? "sigmoid" : "tanh";
}

const char* sample_mode_name(SampleMode m) {
  return m == SampleMode::kUniformRandom ? "uniform_random"
                                         : "equispaced_grid";
}

const char* boundary_name(BoundaryKind b) {
  return b == BoundaryKind::kDirichletZero ? "dirichlet_zero"
                                           : "dirichlet_exact";
}

}  // namespace

TrainConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  check_keys(doc, "top level",
             {"problem", "architecture", "activation", "output_linear",
              "init", "seed", "domain", "counts", "sampling_mode",
              "coefficient", "boundary_condition", "weights", "optimizer",
              "epochs", "log_every", "coefficient_log_every"});

  TrainConfig cfg;
  bool problem_inverse = false;
  if (doc.contains("problem")) {
    const std::string p = doc["problem"].get<std::string>();
    if (p != "forward" && p != "inverse") {
      throw std::invalid_argument("config: problem must be \"forward\" or "
                                  "\"inverse\"");
    }
    problem_inverse = (p == "inverse");
  }
  if (doc.contains("architecture")) {
    cfg.architecture = doc["architecture"].get<std::vector<int>>();
  }
  if (doc.contains("activation")) {
    cfg.activation = parse_activation(doc["activation"].get<std::string>());
  }
  if (doc.contains("output_linear")) {
    cfg.output_linear = doc["output_linear"].get<bool>();
  }
  if (doc.contains("init")) {
    const json& init = doc["init"];
    check_keys(init, "init", {"kind", "constant_weight", "constant_bias"});
    const std::string kind = init.value("kind", "glorot_uniform");
    if (kind == "glorot_uniform") {
      cfg.init = InitScheme::glorot();
    } else if (kind == "constant") {
      cfg.init = InitScheme::constant(init.value("constant_weight", 0.5),
                                      init.value("constant_bias", 0.0));
    } else {
      throw std::invalid_argument("config: unknown init kind \"" + kind +
                                  "\"");
    }
  }
  if (doc.contains("seed")) {
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    check_keys(d, "domain", {"x_min", "x_max", "t_min", "t_max"});
    cfg.domain.x_min = d.value("x_min", cfg.domain.x_min);
    cfg.domain.x_max = d.value("x_max", cfg.domain.x_max);
    cfg.domain.t_min = d.value("t_min", cfg.domain.t_min);
    cfg.domain.t_max = d.value("t_max", cfg.domain.t_max);
  }
  if (doc.contains("counts")) {
    const json& c = doc["counts"];
    check_keys(c, "counts",
               {"interior", "boundary", "initial", "observe_x", "observe_t"});
    cfg.counts.interior = c.value("interior", cfg.counts.interior);
    cfg.counts.boundary = c.value("boundary", cfg.counts.boundary);
    cfg.counts.initial = c.value("initial", cfg.counts.initial);
    cfg.counts.observe_x = c.value("observe_x", cfg.counts.observe_x);
    cfg.counts.observe_t = c.value("observe_t", cfg.counts.observe_t);
  }
  if (doc.contains("sampling_mode")) {
    cfg.sampling_mode =
        parse_sample_mode(doc["sampling_mode"].get<std::string>());
  }
  if (doc.contains("coefficient")) {
    const json& c = doc["coefficient"];
    check_keys(c, "coefficient", {"kind", "value", "initial"});
    const std::string kind = c.value("kind", "fixed");
    if (kind == "fixed") {
      cfg.coefficient = Coefficient::fixed(c.value("value", 3.0));
    } else if (kind == "trainable") {
      cfg.coefficient = Coefficient::trainable(c.value("initial", 0.0));
    } else {
      throw std::invalid_argument("config: unknown coefficient kind \"" +
                                  kind + "\"");
    }
  }
  if (doc.contains("boundary_condition")) {
    cfg.boundary_condition =
        parse_boundary(doc["boundary_condition"].get<std::string>());
  }
  if (doc.contains("weights")) {
    const json& w = doc["weights"];
    check_keys(w, "weights",
               {"residual", "boundary", "initial", "observation"});
    cfg.weights.residual = w.value("residual", cfg.weights.residual);
    cfg.weights.boundary = w.value("boundary", cfg.weights.boundary);
    cfg.weights.initial = w.value("initial", cfg.weights.initial);
    cfg.weights.observation = w.value("observation", cfg.weights.observation);
  } else {
    // Forward problems have no observations by default.
    cfg.weights.observation = problem_inverse ? 1.0 : 0.0;
  }
  if (doc.contains("optimizer")) {
    const json& o = doc["optimizer"];
    check_keys(o, "optimizer",
               {"kind", "learning_rate", "beta1", "beta2", "epsilon"});
    const std::string kind = o.value("kind", "adam");
    if (kind == "adam") {
      cfg.optimizer.kind = OptimizerConfig::Kind::kAdam;
    } else if (kind == "sgd") {
      cfg.optimizer.kind = OptimizerConfig::Kind::kSgd;
    } else {
      throw std::invalid_argument("config: unknown optimizer \"" + kind +
                                  "\"");
    }
    cfg.optimizer.learning_rate =
        o.value("learning_rate", cfg.optimizer.learning_rate);
    cfg.optimizer.adam_beta1 = o.value("beta1", cfg.optimizer.adam_beta1);
    cfg.optimizer.adam_beta2 = o.value("beta2", cfg.optimizer.adam_beta2);
    cfg.optimizer.adam_epsilon = o.value("epsilon", cfg.optimizer.adam_epsilon);
  }
  if (doc.contains("epochs")) cfg.epochs = doc["epochs"].get<int>();
  if (doc.contains("log_every")) {
    cfg.log_every = doc["log_every"].get<int>();
  }
  if (doc.contains("coefficient_log_every")) {
    cfg.coefficient_log_every = doc["coefficient_log_every"].get<int>();
  }

  if (problem_inverse && !cfg.coefficient.is_trainable()) {
    throw std::invalid_argument("config: inverse problem requires a "
                                "trainable coefficient");
  }
  if (!doc.contains("problem") && cfg.coefficient.is_trainable() &&
      !doc.contains("weights")) {
    cfg.weights.observation = 1.0;
  }
  cfg.validate();
  return cfg;
}

TrainConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("config: cannot open \"" + path + "\"");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string config_to_json(const TrainConfig& config) {
  json doc;
  doc["problem"] = config.is_inverse() ? "inverse" : "forward";
  doc["architecture"] = config.architecture;
  doc["activation"] = activation_name(config.activation);
  doc["output_linear"] = config.output_linear;
  if (config.init.kind == InitScheme::Kind::kGlorotUniform) {
    doc["init"] = {{"kind", "glorot_uniform"}};
  } else {
    doc["init"] = {{"kind", "constant"},
                   {"constant_weight", config.init.constant_weight},
                   {"constant_bias", config.init.constant_bias}};
  }
  doc["seed"] = config.seed;
  doc["domain"] = {{"x_min", config.domain.x_min},
                   {"x_max", config.domain.x_max},
                   {"t_min", config.domain.t_min},
                   {"t_max", config.domain.t_max}};
  doc["counts"] = {{"interior", config.counts.interior},
                   {"boundary", config.counts.boundary},
                   {"initial", config.counts.initial},
                   {"observe_x", config.counts.observe_x},
                   {"observe_t", config.counts.observe_t}};
  doc["sampling_mode"] = sample_mode_name(config.sampling_mode);
  if (config.coefficient.is_trainable()) {
    doc["coefficient"] = {{"kind", "trainable"},
                          {"initial", config.coefficient.value}};
  } else {
    doc["coefficient"] = {{"kind", "fixed"},
                          {"value", config.coefficient.value}};
  }
  doc["boundary_condition"] = boundary_name(config.boundary_condition);
  doc["weights"] = {{"residual", config.weights.residual},
                    {"boundary", config.weights.boundary},
                    {"initial", config.weights.initial},
                    {"observation", config.weights.observation}};
  doc["optimizer"] = {
      {"kind",
       config.optimizer.kind == OptimizerConfig::Kind::kAdam ? "adam" : "sgd"},
      {"learning_rate", config.optimizer.learning_rate},
      {"beta1", config.optimizer.adam_beta1},
      {"beta2", config.optimizer.adam_beta2},
      {"epsilon", config.optimizer.adam_epsilon}};
  doc["epochs"] = config.epochs;
  doc["log_every"] = config.log_every;
  doc["coefficient_log_every"] = config.coefficient_log_every;
  return doc.dump(2) + "\n";
}

std::uint64_t config_hash(const TrainConfig& config) {
  const std::string canon = config_to_json(config);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "forward-tutorial", "forward-small", "inverse-tutorial",
      "table-replication"};
  return names;
}

TrainConfig preset_config(const std::string& name) {
  TrainConfig cfg;  // tutorial domain and Adam defaults
  cfg.weights.observation = 0.0;
  cfg.seed = 2;
  if (name == "forward-small") {
    cfg.architecture = {2, 64, 64, 1};
    cfg.counts = {40, 20, 10, 0, 0};
    cfg.optimizer.learning_rate = 0.001;
    cfg.epochs = 5000;
    cfg.log_every = 100;
    return cfg;
  }
  if (name == "forward-tutorial") {
    cfg.architecture = {2, 64, 64, 1};
    cfg.counts = {8190, 4094, 4094, 0, 0};
    cfg.optimizer.learning_rate = 0.001;
    cfg.epochs = 2000;
    cfg.log_every = 100;
    return cfg;
  }
  if (name == "inverse-tutorial") {
    cfg.architecture = {2, 64, 64, 1};
    cfg.counts = {40, 20, 10, 10, 10};
    cfg.coefficient = Coefficient::trainable(0.0);
    cfg.weights.observation = 1.0;
    cfg.optimizer.learning_rate = 0.01;
    cfg.epochs = 20000;
    cfg.log_every = 100;
    cfg.coefficient_log_every = 100;
    return cfg;
  }
  if (name == "table-replication") {
    cfg.architecture = {2, 2, 1};
    cfg.init = InitScheme::constant(0.5, 0.0);
    cfg.counts = {1, 1, 1, 0, 0};
    cfg.sampling_mode = SampleMode::kEquispacedGrid;
    cfg.optimizer.kind = OptimizerConfig::Kind::kSgd;
    cfg.optimizer.learning_rate = 0.001;
    cfg.weights.boundary = 0.0;
    cfg.epochs = 5;
    cfg.log_every = 1;
    return cfg;
  }
  throw std::invalid_argument("unknown preset \"" + name + "\"");
}

}  // namespace pinn
