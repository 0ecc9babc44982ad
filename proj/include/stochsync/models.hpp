#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "stochsync/graph.hpp"
#include "stochsync/sde.hpp"

namespace stochsync {

/// FitzHugh-Nagumo node parameters. Node state is (v, w).
struct FNParams {
  double a{0.7};
  double b{0.4};
  double c{2.8};
  std::function<double(double)> u;  // external stimulus; empty means u = 0
  double gamma{0};                  // noise intensity
};

/// DDM network: drift x - x^3, unit Laplacian coupling on `graph`,
/// independent noise with g_ii = x_i - mean(x).
struct DDMParams {
  Graph graph;
};

/// dv = c (v + w - v^3/3 + u(t)),  dw = -(v - a + b w)/c
NodeDrift fn_drift(const FNParams& p);

/// x - x^3 (scalar node).
NodeDrift bistable_drift();

/// f(x) = A x.
NodeDrift linear_drift(const Eigen::MatrixXd& A);

/// Mean-field diffusion: component c of node i gets gains(c) * (mean_c(X) - x_{i,c}).
/// Vanishes exactly when all nodes share the same state.
///
/// With shared_scalar the whole column multiplies one Brownian channel; with
/// per_node_independent node i gets diag(gains * (mean - x_i)) on its own n
/// channels.
DiffusionSpec mean_field_diffusion(std::size_t node_dim, const Eigen::VectorXd& gains, DiffusionKind kind);

/// Nodes coupled only through a noisy shared environment acting on v (no
/// deterministic coupling).
NetworkSystem fn_env_system(const FNParams& p, std::size_t node_count);

/// Same as fn_env_system with the environment noise acting on both v and w.
NetworkSystem fn_full_system(const FNParams& p, std::size_t node_count);

/// Collective decision model; writes a warning to `warnings` for a
/// disconnected graph.
NetworkSystem ddm_system(const DDMParams& p, std::ostream* warnings = nullptr);

/// Integrator nodes (f = 0) with Laplacian coupling and an optional noise layer.
NetworkSystem linear_consensus_system(const Graph& graph, double sigma,
                                      std::optional<NoiseLayer> noise_layer = std::nullopt);

/// User-defined linear node dynamics f(x) = A x with optional mean-field
/// diffusion and noise layer.
struct LinearNodeParams {
  Eigen::MatrixXd drift_matrix;
  double sigma{0};
  Eigen::VectorXd diffusion_gains;  // empty or length n
  DiffusionKind diffusion_kind{DiffusionKind::none};
};

NetworkSystem linear_node_system(const LinearNodeParams& p, const Graph& graph,
                                 std::optional<NoiseLayer> noise_layer = std::nullopt);

/// The matrix P = I_N - (1/N) 1 1^T that the mean-field noise applies to each
/// component. Symmetric, zero row sums, transverse eigenvalues all 1.
Eigen::MatrixXd mean_field_matrix(std::size_t node_count);

}  // namespace stochsync
