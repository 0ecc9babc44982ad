#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "stochsync/brownian.hpp"
#include "stochsync/graph.hpp"

namespace stochsync {

/// Node drift f(t, x_i). Writes dx (length n); shared by all nodes.
using NodeDrift =
    std::function<void(double t, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> dx)>;

/// Per-node diffusion blocks: rows [i*n, (i+1)*n) of the nN x d output hold g_i(t, X).
using BlockDiffusion = std::function<void(double t, const Eigen::VectorXd& X, Eigen::MatrixXd& blocks)>;

/// Full-state diffusion column for a single shared Brownian channel (nN entries).
using SharedDiffusion = std::function<void(double t, const Eigen::VectorXd& X, Eigen::VectorXd& g)>;

enum class DiffusionKind { none, per_node_independent, shared_scalar };

const char* to_string(DiffusionKind kind);

struct DiffusionSpec {
  DiffusionKind kind{DiffusionKind::none};
  std::size_t noise_dim{0};  // d, Brownian channels per node (per_node_independent)
  BlockDiffusion per_node;
  SharedDiffusion shared;

  static DiffusionSpec none();
  static DiffusionSpec per_node_independent(std::size_t noise_dim, BlockDiffusion g);
  static DiffusionSpec shared_scalar(SharedDiffusion g);

  std::size_t channels(std::size_t node_count) const;
};

/// Noise-diffusion layer: adds -sigma_star (L* kron I_n) X db on its own
/// Brownian channel.
struct NoiseLayer {
  Graph graph;
  double sigma_star{0};
};

/// dX = [F(t,X) - sigma (L kron I_n) X] dt + G(t,X) dB  [- sigma* (L* kron I_n) X db]
///
/// States are stacked node by node: X = [x_0; x_1; ...; x_{N-1}].
/// Brownian channels: diffusion channels first (N*d, 1 or 0), then one
/// channel for the noise layer if present.
class NetworkSystem {
 public:
  NetworkSystem(std::size_t node_dim, Graph graph, NodeDrift drift, double coupling_strength,
                DiffusionSpec diffusion = DiffusionSpec::none(),
                std::optional<NoiseLayer> noise_layer = std::nullopt, std::string descriptor = {});

  std::size_t node_dim() const { return node_dim_; }
  std::size_t node_count() const { return graph_.node_count(); }
  std::size_t state_dim() const { return node_dim_ * node_count(); }
  const Graph& graph() const { return graph_; }
  double coupling_strength() const { return sigma_; }
  const NodeDrift& drift() const { return drift_; }
  const DiffusionSpec& diffusion() const { return diffusion_; }
  const std::optional<NoiseLayer>& noise_layer() const { return layer_; }
  const std::string& descriptor() const { return descriptor_; }

  std::size_t diffusion_channels() const { return diffusion_.channels(node_count()); }
  std::size_t channel_count() const { return diffusion_channels() + (layer_ ? 1 : 0); }

  /// F(t,X) - sigma (L kron I_n) X
  void drift_field(double t, const Eigen::VectorXd& X, Eigen::VectorXd& out) const;

  /// Dense nN x channel_count() diffusion matrix, including the noise-layer column.
  Eigen::MatrixXd diffusion_matrix(double t, const Eigen::VectorXd& X) const;

 private:
  std::size_t node_dim_;
  Graph graph_;
  NodeDrift drift_;
  double sigma_;
  DiffusionSpec diffusion_;
  std::optional<NoiseLayer> layer_;
  std::string descriptor_;
};

/// out = (L kron I_n) X, accumulated edge by edge so that it is exactly zero
/// whenever all node states coincide.
void apply_laplacian(const Graph& g, std::size_t node_dim, const Eigen::VectorXd& X, Eigen::VectorXd& out);

/// out += scale * (L kron I_n) X
void accumulate_laplacian(const Graph& g, std::size_t node_dim, const Eigen::VectorXd& X, double scale,
                          Eigen::VectorXd& out);

/// Reusable Euler-Maruyama stepper (Ito: coefficients at the left endpoint).
class EulerMaruyama {
 public:
  explicit EulerMaruyama(const NetworkSystem& sys);

  /// In place: x += drift*dt + G*dW. Throws IntegrationBlowup.
  void step(Eigen::VectorXd& x, double t, const Eigen::Ref<const Eigen::VectorXd>& dW, double dt);

 private:
  const NetworkSystem& sys_;
  Eigen::VectorXd drift_;
  Eigen::VectorXd shared_;
  Eigen::MatrixXd blocks_;
  Eigen::VectorXd layer_;
};

inline constexpr double kBlowupThreshold = 1e8;

Eigen::VectorXd em_step(const Eigen::VectorXd& x, double t, const NetworkSystem& sys,
                        const Eigen::Ref<const Eigen::VectorXd>& dW, double dt);

using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Trajectory {
  Eigen::VectorXd times;
  StateMatrix states;  // one row per recorded time, nN columns
  std::size_t node_dim{0};
  std::size_t node_count{0};
  std::uint64_t seed{0};
  double dt{0};
  std::size_t record_stride{1};
  std::uint64_t system_hash{0};

  Eigen::Index samples() const { return states.rows(); }
  Eigen::Index column(std::size_t node, std::size_t component) const {
    return static_cast<Eigen::Index>(node * node_dim + component);
  }
};

std::uint64_t descriptor_hash(const std::string& descriptor);

/// Integrates on a given Brownian path (channels must match the system).
/// Every `record_stride`-th state is kept; the stride must divide the step count.
Trajectory integrate(const NetworkSystem& sys, const Eigen::VectorXd& x0, double t0,
                     const BrownianPath& path, std::size_t record_stride = 1);

/// Fixed-step EM from t0 to t_end with Brownian streams derived from `seed`.
Trajectory simulate(const NetworkSystem& sys, const Eigen::VectorXd& x0, double t0, double t_end,
                    double dt, std::uint64_t seed, std::size_t record_stride = 1);

std::size_t step_count(double t0, double t_end, double dt);

/// Header `t,x_0_0,...,x_{N-1}_{n-1}`, values printed with %.10g.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace stochsync
