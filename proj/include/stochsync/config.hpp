#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stochsync/graph.hpp"
#include "stochsync/sde.hpp"

namespace stochsync {

/// Experiment description loaded from a YAML file (JSON is accepted as well).
/// Unknown keys are rejected; see configs/README.md for the schema.
struct ExperimentConfig {
  struct Model {
    std::string name;  // fn_env | fn_full | ddm | linear_consensus | custom
    std::size_t nodes{0};  // fn_* models
    double a{0.7}, b{0.4}, c{2.8};
    double gamma{0};
    double sigma{0};
    Eigen::MatrixXd drift_matrix;  // custom
    Eigen::VectorXd diffusion_gains;
    DiffusionKind diffusion_kind{DiffusionKind::none};
  };
  struct Integration {
    double t0{0};
    double t_end{0};
    double dt{1e-3};
    std::uint64_t seed{1};
    std::size_t n_seeds{1};
    std::size_t record_stride{1};
  };
  struct InitialState {
    std::vector<double> values;  // explicit x0; empty means random
    double low{-2.0};
    double high{2.0};
  };
  struct Sweep {
    std::string parameter;
    std::vector<double> values;
  };
  struct Metrics {
    std::size_t component{0};
    std::optional<double> transient_cut;
  };
  struct Design {
    std::optional<Graph> layer;
    double safety{1.1};
    double zero_deficit_contraction{0.5};
  };
  struct Estimation {
    std::size_t samples{10000};
    double box_low{-5.0};
    double box_high{5.0};
    std::uint64_t seed{0};
  };

  std::string source;
  Model model;
  std::optional<Graph> graph;
  std::optional<NoiseLayer> noise_layer;
  Integration integration;
  InitialState initial_state;
  std::optional<Sweep> sweep;
  std::string output_dir{"out"};
  Metrics metrics;
  std::map<std::string, double> constants;  // user-pinned
  Design design;
  Estimation estimation;
};

inline const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"fn_env", "fn_full", "ddm", "linear_consensus", "custom"};
  return names;
}

inline const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"gamma", "sigma", "sigma_star", "a", "b", "c"};
  return names;
}

/// Parses and validates; throws ConfigError naming the offending field.
/// Relative graph file paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>",
                              const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// Copy of `cfg` with a sweepable parameter replaced.
ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& parameter, double value);

/// The configured network system.
NetworkSystem build_system(const ExperimentConfig& cfg, std::ostream* warnings = nullptr);

/// Explicit x0 if configured, otherwise uniform in [low, high] per component
/// from a stream derived from `seed`.
Eigen::VectorXd initial_state(const ExperimentConfig& cfg, const NetworkSystem& sys, std::uint64_t seed);

}  // namespace stochsync
