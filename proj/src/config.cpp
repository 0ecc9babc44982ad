#include "stochsync/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "stochsync/conditions.hpp"
#include "stochsync/errors.hpp"
#include "stochsync/models.hpp"

namespace stochsync {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? -1 : n.Mark().line + 1; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping", line_of(n));
}

void check_keys(const YAML::Node& n, const std::string& path, std::initializer_list<const char*> allowed) {
  require_map(n, path);
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      std::string msg = "unknown key (allowed:";
      for (const char* a : allowed) msg += std::string(" ") + a;
      throw ConfigError(join(path, key), msg + ")", line_of(kv.first));
    }
  }
}

double as_double(const YAML::Node& n, const std::string& field) {
  try {
    const double v = n.as<double>();
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite", line_of(n));
    return v;
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "expected a number", line_of(n));
  }
}

long long as_int(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<long long>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "expected an integer", line_of(n));
  }
}

std::size_t as_count(const YAML::Node& n, const std::string& field, long long min_value) {
  const long long v = as_int(n, field);
  if (v < min_value) throw ConfigError(field, "must be at least " + std::to_string(min_value), line_of(n));
  return static_cast<std::size_t>(v);
}

std::string as_string(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) throw ConfigError(field, "expected a string", line_of(n));
  return n.as<std::string>();
}

std::vector<double> as_double_list(const YAML::Node& n, const std::string& field) {
  if (!n.IsSequence()) throw ConfigError(field, "expected a list of numbers", line_of(n));
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_double(n[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

Graph parse_graph(const YAML::Node& n, const std::string& path, const std::string& base_dir) {
  check_keys(n, path, {"nodes", "edges", "file", "generator", "parts", "name"});
  try {
    if (n["file"]) {
      std::filesystem::path p = as_string(n["file"], join(path, "file"));
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      return load_edge_list(p.string());
    }
    if (n["generator"]) {
      const auto gen = as_string(n["generator"], join(path, "generator"));
      if (gen == "multipartite") {
        if (!n["parts"]) throw ConfigError(join(path, "parts"), "required for the multipartite generator", line_of(n));
        std::vector<std::size_t> parts;
        for (double v : as_double_list(n["parts"], join(path, "parts"))) parts.push_back(static_cast<std::size_t>(v));
        return complete_multipartite_graph(parts);
      }
      if (!n["nodes"]) throw ConfigError(join(path, "nodes"), "required for generator '" + gen + "'", line_of(n));
      const auto count = as_count(n["nodes"], join(path, "nodes"), 1);
      if (gen == "path") return path_graph(count);
      if (gen == "cycle") return cycle_graph(count);
      if (gen == "complete") return complete_graph(count);
      if (gen == "star") return star_graph(count);
      if (gen == "empty") return empty_graph(count);
      throw ConfigError(join(path, "generator"), "unknown generator '" + gen +
                                                   "' (path, cycle, complete, star, empty, multipartite)",
                        line_of(n["generator"]));
    }
    if (!n["nodes"]) throw ConfigError(join(path, "nodes"), "required (or give 'file' or 'generator')", line_of(n));
    const auto count = as_count(n["nodes"], join(path, "nodes"), 1);
    std::vector<Edge> edges;
    if (const auto e = n["edges"]) {
      if (!e.IsSequence()) throw ConfigError(join(path, "edges"), "expected a list of [i, j] pairs", line_of(e));
      for (std::size_t k = 0; k < e.size(); ++k) {
        const auto field = join(path, "edges") + "[" + std::to_string(k) + "]";
        if (!e[k].IsSequence() || e[k].size() != 2) throw ConfigError(field, "expected [i, j]", line_of(e[k]));
        edges.emplace_back(as_count(e[k][0], field, 0), as_count(e[k][1], field, 0));
      }
    }
    std::string name = n["name"] ? as_string(n["name"], join(path, "name")) : "";
    return Graph(count, std::move(edges), std::move(name));
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what(), line_of(n));
  }
}

void parse_model(const YAML::Node& n, ExperimentConfig::Model& m) {
  check_keys(n, "model", {"name", "nodes", "a", "b", "c", "gamma", "sigma", "drift_matrix", "diffusion"});
  if (!n["name"]) throw ConfigError("model.name", "required", line_of(n));
  m.name = as_string(n["name"], "model.name");
  const auto& names = model_names();
  if (std::find(names.begin(), names.end(), m.name) == names.end()) {
    throw ConfigError("model.name", "unknown model '" + m.name + "' (fn_env, fn_full, ddm, linear_consensus, custom)",
                      line_of(n["name"]));
  }
  if (n["nodes"]) m.nodes = as_count(n["nodes"], "model.nodes", 1);
  if (n["a"]) m.a = as_double(n["a"], "model.a");
  if (n["b"]) m.b = as_double(n["b"], "model.b");
  if (n["c"]) m.c = as_double(n["c"], "model.c");
  if (n["gamma"]) m.gamma = as_double(n["gamma"], "model.gamma");
  if (n["sigma"]) m.sigma = as_double(n["sigma"], "model.sigma");
  if (n["drift_matrix"]) {
    const auto& dm = n["drift_matrix"];
    if (!dm.IsSequence() || dm.size() == 0) throw ConfigError("model.drift_matrix", "expected a square list of rows", line_of(dm));
    const auto dim = static_cast<Eigen::Index>(dm.size());
    m.drift_matrix.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto row = as_double_list(dm[static_cast<std::size_t>(r)], "model.drift_matrix[" + std::to_string(r) + "]");
      if (static_cast<Eigen::Index>(row.size()) != dim) {
        throw ConfigError("model.drift_matrix", "matrix must be square", line_of(dm[static_cast<std::size_t>(r)]));
      }
      for (Eigen::Index c = 0; c < dim; ++c) m.drift_matrix(r, c) = row[static_cast<std::size_t>(c)];
    }
  }
  if (n["diffusion"]) {
    const auto& d = n["diffusion"];
    check_keys(d, "model.diffusion", {"kind", "gains"});
    const auto kind = d["kind"] ? as_string(d["kind"], "model.diffusion.kind") : "none";
    if (kind == "none") {
      m.diffusion_kind = DiffusionKind::none;
    } else if (kind == "shared_scalar") {
      m.diffusion_kind = DiffusionKind::shared_scalar;
    } else if (kind == "per_node_independent") {
      m.diffusion_kind = DiffusionKind::per_node_independent;
    } else {
      throw ConfigError("model.diffusion.kind", "expected none, shared_scalar or per_node_independent",
                        line_of(d["kind"]));
    }
    if (d["gains"]) {
      const auto g = as_double_list(d["gains"], "model.diffusion.gains");
      m.diffusion_gains = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    }
  }
}

void validate_semantics(ExperimentConfig& cfg, const YAML::Node& root) {
  auto& m = cfg.model;
  const int model_line = line_of(root["model"]);
  const bool fn = m.name == "fn_env" || m.name == "fn_full";
  if (fn) {
    if (m.nodes < 2) throw ConfigError("model.nodes", "FitzHugh-Nagumo models need nodes >= 2", model_line);
    if (m.c == 0.0) throw ConfigError("model.c", "must be nonzero", model_line);
    if (cfg.graph && cfg.graph->node_count() != m.nodes) {
      throw ConfigError("graph", "FitzHugh-Nagumo models have no coupling graph; omit the section", line_of(root["graph"]));
    }
  } else if (!cfg.graph) {
    throw ConfigError("graph", "required for model '" + m.name + "'", model_line);
  }
  if (m.gamma < 0) throw ConfigError("model.gamma", "must be non-negative", model_line);
  if (m.sigma < 0) throw ConfigError("model.sigma", "must be non-negative", model_line);
  if (m.name == "custom") {
    if (m.drift_matrix.size() == 0) throw ConfigError("model.drift_matrix", "required for the custom model", model_line);
    if (m.diffusion_kind != DiffusionKind::none && m.diffusion_gains.size() != m.drift_matrix.rows()) {
      throw ConfigError("model.diffusion.gains", "need one gain per state component", model_line);
    }
  }
  if (cfg.noise_layer && (m.name == "fn_env" || m.name == "fn_full" || m.name == "ddm")) {
    throw ConfigError("noise_layer", "only linear_consensus and custom models take a noise layer",
                      line_of(root["noise_layer"]));
  }

  const auto& in = cfg.integration;
  const int iline = line_of(root["integration"]);
  if (!(in.dt > 0)) throw ConfigError("integration.dt", "must be positive", iline);
  if (!(in.t_end > in.t0)) throw ConfigError("integration.t_end", "must be greater than integration.t0", iline);
  try {
    const auto steps = step_count(in.t0, in.t_end, in.dt);
    if (steps % in.record_stride != 0) {
      throw ConfigError("integration.record_stride", "must divide the number of steps (" + std::to_string(steps) + ")",
                        iline);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError("integration.dt", e.what(), iline);
  }
  if (!(cfg.initial_state.high > cfg.initial_state.low)) {
    throw ConfigError("initial_state.uniform", "upper bound must exceed lower bound", line_of(root["initial_state"]));
  }

  if (cfg.sweep) {
    const int sline = line_of(root["sweep"]);
    const auto& p = cfg.sweep->parameter;
    const auto& allowed = sweepable_parameters();
    if (std::find(allowed.begin(), allowed.end(), p) == allowed.end()) {
      throw ConfigError("sweep.parameter", "cannot sweep '" + p + "' (gamma, sigma, sigma_star, a, b, c)", sline);
    }
    if (cfg.sweep->values.empty()) throw ConfigError("sweep.values", "must not be empty", sline);
    if ((p == "gamma" || p == "a" || p == "b" || p == "c") && !fn) {
      throw ConfigError("sweep.parameter", "'" + p + "' applies to FitzHugh-Nagumo models only", sline);
    }
    if (p == "sigma" && !(m.name == "linear_consensus" || m.name == "custom")) {
      throw ConfigError("sweep.parameter", "'sigma' applies to linear_consensus and custom models only", sline);
    }
    if (p == "sigma_star" && !cfg.noise_layer) throw ConfigError("sweep.parameter", "'sigma_star' needs a noise_layer", sline);
  }

  static const std::set<std::string> known{keys::K_f,     keys::K_g,          keys::Kbar_g,      keys::sigma,
                                           keys::lambda2, keys::sigma_star,   keys::lambda2_star, keys::lambdaN_star};
  for (const auto& [k, v] : cfg.constants) {
    (void)v;
    if (!known.count(k)) throw ConfigError("constants." + k, "unknown constant", line_of(root["constants"]));
  }
  if (cfg.design.safety < 1.0) throw ConfigError("design.safety", "must be >= 1", line_of(root["design"]));
  if (!(cfg.estimation.box_high > cfg.estimation.box_low)) {
    throw ConfigError("estimation.box", "upper bound must exceed lower bound", line_of(root["estimation"]));
  }

  // Building the system catches the remaining inconsistencies (dimensions, layer sizes).
  try {
    const auto sys = build_system(cfg);
    if (cfg.metrics.component >= sys.node_dim()) {
      throw ConfigError("metrics.component", "must be below the node dimension " + std::to_string(sys.node_dim()),
                        line_of(root["metrics"]));
    }
    if (!cfg.initial_state.values.empty() && cfg.initial_state.values.size() != sys.state_dim()) {
      throw ConfigError("initial_state.values",
                        "has " + std::to_string(cfg.initial_state.values.size()) + " entries, the state has " +
                            std::to_string(sys.state_dim()),
                        line_of(root["initial_state"]));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError("model", e.what(), model_line);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<syntax>", e.msg, e.mark.line + 1);
  }
  check_keys(root, "", {"model", "graph", "noise_layer", "integration", "initial_state", "sweep", "outputs", "metrics",
                        "constants", "design", "estimation"});
  ExperimentConfig cfg;
  cfg.source = source;

  if (!root["model"]) throw ConfigError("model", "required section is missing", 1);
  parse_model(root["model"], cfg.model);

  if (root["graph"]) cfg.graph = parse_graph(root["graph"], "graph", base_dir);

  if (const auto nl = root["noise_layer"]) {
    check_keys(nl, "noise_layer", {"graph", "sigma_star"});
    if (!nl["graph"]) throw ConfigError("noise_layer.graph", "required", line_of(nl));
    NoiseLayer layer{parse_graph(nl["graph"], "noise_layer.graph", base_dir), 0.0};
    if (nl["sigma_star"]) layer.sigma_star = as_double(nl["sigma_star"], "noise_layer.sigma_star");
    if (layer.sigma_star < 0) throw ConfigError("noise_layer.sigma_star", "must be non-negative", line_of(nl["sigma_star"]));
    cfg.noise_layer = std::move(layer);
  }

  if (!root["integration"]) throw ConfigError("integration", "required section is missing", 1);
  {
    const auto in = root["integration"];
    check_keys(in, "integration", {"t0", "t_end", "dt", "seed", "n_seeds", "record_stride"});
    if (!in["t_end"]) throw ConfigError("integration.t_end", "required", line_of(in));
    auto& I = cfg.integration;
    if (in["t0"]) I.t0 = as_double(in["t0"], "integration.t0");
    I.t_end = as_double(in["t_end"], "integration.t_end");
    if (in["dt"]) I.dt = as_double(in["dt"], "integration.dt");
    if (in["seed"]) I.seed = static_cast<std::uint64_t>(as_count(in["seed"], "integration.seed", 0));
    if (in["n_seeds"]) I.n_seeds = as_count(in["n_seeds"], "integration.n_seeds", 1);
    if (in["record_stride"]) I.record_stride = as_count(in["record_stride"], "integration.record_stride", 1);
  }

  if (const auto is = root["initial_state"]) {
    check_keys(is, "initial_state", {"values", "uniform"});
    if (is["values"]) cfg.initial_state.values = as_double_list(is["values"], "initial_state.values");
    if (is["uniform"]) {
      const auto u = as_double_list(is["uniform"], "initial_state.uniform");
      if (u.size() != 2) throw ConfigError("initial_state.uniform", "expected [low, high]", line_of(is["uniform"]));
      cfg.initial_state.low = u[0];
      cfg.initial_state.high = u[1];
    }
  }

  if (const auto sw = root["sweep"]) {
    check_keys(sw, "sweep", {"parameter", "values"});
    if (!sw["parameter"]) throw ConfigError("sweep.parameter", "required", line_of(sw));
    ExperimentConfig::Sweep s;
    s.parameter = as_string(sw["parameter"], "sweep.parameter");
    if (!sw["values"]) throw ConfigError("sweep.values", "required", line_of(sw));
    s.values = as_double_list(sw["values"], "sweep.values");
    cfg.sweep = std::move(s);
  }

  if (const auto o = root["outputs"]) {
    check_keys(o, "outputs", {"directory"});
    if (o["directory"]) cfg.output_dir = as_string(o["directory"], "outputs.directory");
  }

  if (const auto mt = root["metrics"]) {
    check_keys(mt, "metrics", {"component", "transient_cut"});
    if (mt["component"]) cfg.metrics.component = as_count(mt["component"], "metrics.component", 0);
    if (mt["transient_cut"]) cfg.metrics.transient_cut = as_double(mt["transient_cut"], "metrics.transient_cut");
  }

  if (const auto c = root["constants"]) {
    require_map(c, "constants");
    for (const auto& kv : c) {
      const auto key = kv.first.as<std::string>();
      cfg.constants[key] = as_double(kv.second, "constants." + key);
    }
  }

  if (const auto d = root["design"]) {
    check_keys(d, "design", {"layer", "safety", "zero_deficit_contraction"});
    if (d["layer"]) cfg.design.layer = parse_graph(d["layer"], "design.layer", base_dir);
    if (d["safety"]) cfg.design.safety = as_double(d["safety"], "design.safety");
    if (d["zero_deficit_contraction"]) {
      cfg.design.zero_deficit_contraction = as_double(d["zero_deficit_contraction"], "design.zero_deficit_contraction");
    }
  }

  if (const auto e = root["estimation"]) {
    check_keys(e, "estimation", {"samples", "box", "seed"});
    if (e["samples"]) cfg.estimation.samples = as_count(e["samples"], "estimation.samples", 1);
    if (e["box"]) {
      const auto b = as_double_list(e["box"], "estimation.box");
      if (b.size() != 2) throw ConfigError("estimation.box", "expected [low, high]", line_of(e["box"]));
      cfg.estimation.box_low = b[0];
      cfg.estimation.box_high = b[1];
    }
    if (e["seed"]) cfg.estimation.seed = static_cast<std::uint64_t>(as_count(e["seed"], "estimation.seed", 0));
  }

  validate_semantics(cfg, root);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(ss.str(), path, base.empty() ? "." : base.string());
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& parameter, double value) {
  ExperimentConfig out = cfg;
  if (parameter == "gamma") {
    out.model.gamma = value;
  } else if (parameter == "sigma") {
    out.model.sigma = value;
  } else if (parameter == "sigma_star") {
    if (!out.noise_layer) throw ConfigError("sweep.parameter", "'sigma_star' needs a noise_layer");
    out.noise_layer->sigma_star = value;
  } else if (parameter == "a") {
    out.model.a = value;
  } else if (parameter == "b") {
    out.model.b = value;
  } else if (parameter == "c") {
    out.model.c = value;
  } else {
    throw ConfigError("sweep.parameter", "cannot sweep '" + parameter + "'");
  }
  return out;
}

NetworkSystem build_system(const ExperimentConfig& cfg, std::ostream* warnings) {
  const auto& m = cfg.model;
  if (m.name == "fn_env" || m.name == "fn_full") {
    FNParams p;
    p.a = m.a;
    p.b = m.b;
    p.c = m.c;
    p.gamma = m.gamma;
    return m.name == "fn_env" ? fn_env_system(p, m.nodes) : fn_full_system(p, m.nodes);
  }
  if (!cfg.graph) throw ValidationError("model '" + m.name + "' needs a graph");
  if (m.name == "ddm") return ddm_system(DDMParams{*cfg.graph}, warnings);
  if (m.name == "linear_consensus") return linear_consensus_system(*cfg.graph, m.sigma, cfg.noise_layer);
  if (m.name == "custom") {
    LinearNodeParams p;
    p.drift_matrix = m.drift_matrix;
    p.sigma = m.sigma;
    p.diffusion_gains = m.diffusion_gains;
    p.diffusion_kind = m.diffusion_kind;
    return linear_node_system(p, *cfg.graph, cfg.noise_layer);
  }
  throw ValidationError("unknown model '" + m.name + "'");
}

Eigen::VectorXd initial_state(const ExperimentConfig& cfg, const NetworkSystem& sys, std::uint64_t seed) {
  const auto dim = static_cast<Eigen::Index>(sys.state_dim());
  if (!cfg.initial_state.values.empty()) {
    if (static_cast<Eigen::Index>(cfg.initial_state.values.size()) != dim) {
      throw ConfigError("initial_state.values", "length does not match the state dimension");
    }
    return Eigen::Map<const Eigen::VectorXd>(cfg.initial_state.values.data(), dim);
  }
  auto rng = derive_engine(seed, kAuxiliaryStreamBase);
  std::uniform_real_distribution<double> dist(cfg.initial_state.low, cfg.initial_state.high);
  Eigen::VectorXd x0(dim);
  for (Eigen::Index k = 0; k < dim; ++k) x0(k) = dist(rng);
  return x0;
}

}  // namespace stochsync
