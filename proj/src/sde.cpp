#include "stochsync/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "stochsync/errors.hpp"

namespace stochsync {

const char* to_string(DiffusionKind kind) {
  switch (kind) {
    case DiffusionKind::none:
      return "none";
    case DiffusionKind::per_node_independent:
      return "per_node_independent";
    case DiffusionKind::shared_scalar:
      return "shared_scalar";
  }
  return "?";
}

DiffusionSpec DiffusionSpec::none() { return {}; }

DiffusionSpec DiffusionSpec::per_node_independent(std::size_t noise_dim, BlockDiffusion g) {
  if (noise_dim == 0) throw ValidationError("per-node diffusion needs noise_dim >= 1");
  if (!g) throw ValidationError("per-node diffusion function is empty");
  DiffusionSpec s;
  s.kind = DiffusionKind::per_node_independent;
  s.noise_dim = noise_dim;
  s.per_node = std::move(g);
  return s;
}

DiffusionSpec DiffusionSpec::shared_scalar(SharedDiffusion g) {
  if (!g) throw ValidationError("shared diffusion function is empty");
  DiffusionSpec s;
  s.kind = DiffusionKind::shared_scalar;
  s.noise_dim = 1;
  s.shared = std::move(g);
  return s;
}

std::size_t DiffusionSpec::channels(std::size_t node_count) const {
  switch (kind) {
    case DiffusionKind::none:
      return 0;
    case DiffusionKind::per_node_independent:
      return node_count * noise_dim;
    case DiffusionKind::shared_scalar:
      return 1;
  }
  return 0;
}

NetworkSystem::NetworkSystem(std::size_t node_dim, Graph graph, NodeDrift drift, double coupling_strength,
                             DiffusionSpec diffusion, std::optional<NoiseLayer> noise_layer,
                             std::string descriptor)
    : node_dim_(node_dim),
      graph_(std::move(graph)),
      drift_(std::move(drift)),
      sigma_(coupling_strength),
      diffusion_(std::move(diffusion)),
      layer_(std::move(noise_layer)),
      descriptor_(std::move(descriptor)) {
  if (node_dim_ == 0) throw ValidationError("node dimension must be positive");
  if (!drift_) throw ValidationError("drift function is empty");
  if (!(sigma_ >= 0) || !std::isfinite(sigma_)) throw ValidationError("coupling strength must be >= 0");
  if (layer_) {
    if (layer_->graph.node_count() != graph_.node_count()) {
      throw ValidationError("noise layer has " + std::to_string(layer_->graph.node_count()) +
                            " nodes, network has " + std::to_string(graph_.node_count()));
    }
    if (!(layer_->sigma_star >= 0) || !std::isfinite(layer_->sigma_star)) {
      throw ValidationError("noise layer strength sigma* must be >= 0");
    }
  }
}

void accumulate_laplacian(const Graph& g, std::size_t node_dim, const Eigen::VectorXd& X, double scale,
                          Eigen::VectorXd& out) {
  const auto n = static_cast<Eigen::Index>(node_dim);
  for (const auto& [i, j] : g.edges()) {
    const auto a = static_cast<Eigen::Index>(i) * n;
    const auto b = static_cast<Eigen::Index>(j) * n;
    for (Eigen::Index c = 0; c < n; ++c) {
      const double d = scale * (X(a + c) - X(b + c));
      out(a + c) += d;
      out(b + c) -= d;
    }
  }
}

void apply_laplacian(const Graph& g, std::size_t node_dim, const Eigen::VectorXd& X, Eigen::VectorXd& out) {
  out.setZero(X.size());
  accumulate_laplacian(g, node_dim, X, 1.0, out);
}

void NetworkSystem::drift_field(double t, const Eigen::VectorXd& X, Eigen::VectorXd& out) const {
  const auto n = static_cast<Eigen::Index>(node_dim_);
  out.resize(X.size());
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(node_count()); ++i) {
    drift_(t, X.segment(i * n, n), out.segment(i * n, n));
  }
  if (sigma_ != 0.0) accumulate_laplacian(graph_, node_dim_, X, -sigma_, out);
}

Eigen::MatrixXd NetworkSystem::diffusion_matrix(double t, const Eigen::VectorXd& X) const {
  const auto nN = static_cast<Eigen::Index>(state_dim());
  const auto n = static_cast<Eigen::Index>(node_dim_);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nN, static_cast<Eigen::Index>(channel_count()));
  switch (diffusion_.kind) {
    case DiffusionKind::none:
      break;
    case DiffusionKind::per_node_independent: {
      const auto d = static_cast<Eigen::Index>(diffusion_.noise_dim);
      Eigen::MatrixXd blocks(nN, d);
      diffusion_.per_node(t, X, blocks);
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(node_count()); ++i) {
        G.block(i * n, i * d, n, d) = blocks.middleRows(i * n, n);
      }
      break;
    }
    case DiffusionKind::shared_scalar: {
      Eigen::VectorXd g(nN);
      diffusion_.shared(t, X, g);
      G.col(0) = g;
      break;
    }
  }
  if (layer_) {
    Eigen::VectorXd lx;
    apply_laplacian(layer_->graph, node_dim_, X, lx);
    G.col(G.cols() - 1) = -layer_->sigma_star * lx;
  }
  return G;
}

EulerMaruyama::EulerMaruyama(const NetworkSystem& sys) : sys_(sys) {
  const auto nN = static_cast<Eigen::Index>(sys.state_dim());
  drift_.resize(nN);
  if (sys.diffusion().kind == DiffusionKind::shared_scalar) shared_.resize(nN);
  if (sys.diffusion().kind == DiffusionKind::per_node_independent) {
    blocks_.resize(nN, static_cast<Eigen::Index>(sys.diffusion().noise_dim));
  }
}

void EulerMaruyama::step(Eigen::VectorXd& x, double t, const Eigen::Ref<const Eigen::VectorXd>& dW, double dt) {
  if (static_cast<std::size_t>(x.size()) != sys_.state_dim()) {
    throw ValidationError("em_step: state has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(sys_.state_dim()));
  }
  if (static_cast<std::size_t>(dW.size()) != sys_.channel_count()) {
    throw ValidationError("em_step: increment has " + std::to_string(dW.size()) + " channels, system uses " +
                          std::to_string(sys_.channel_count()));
  }
  // All coefficients are evaluated at the pre-step state before x is touched.
  sys_.drift_field(t, x, drift_);
  const auto& diff = sys_.diffusion();
  switch (diff.kind) {
    case DiffusionKind::none:
      break;
    case DiffusionKind::shared_scalar:
      diff.shared(t, x, shared_);
      break;
    case DiffusionKind::per_node_independent:
      diff.per_node(t, x, blocks_);
      break;
  }
  const auto& layer = sys_.noise_layer();
  if (layer) apply_laplacian(layer->graph, sys_.node_dim(), x, layer_);

  x.noalias() += dt * drift_;
  switch (diff.kind) {
    case DiffusionKind::none:
      break;
    case DiffusionKind::shared_scalar:
      x.noalias() += dW(0) * shared_;
      break;
    case DiffusionKind::per_node_independent: {
      const auto n = static_cast<Eigen::Index>(sys_.node_dim());
      const auto d = static_cast<Eigen::Index>(diff.noise_dim);
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(sys_.node_count()); ++i) {
        x.segment(i * n, n).noalias() += blocks_.middleRows(i * n, n) * dW.segment(i * d, d);
      }
      break;
    }
  }
  if (layer) x.noalias() -= (layer->sigma_star * dW(dW.size() - 1)) * layer_;

  const double norm = x.norm();
  if (!std::isfinite(norm) || norm > kBlowupThreshold) throw IntegrationBlowup(t + dt, norm);
}

Eigen::VectorXd em_step(const Eigen::VectorXd& x, double t, const NetworkSystem& sys,
                        const Eigen::Ref<const Eigen::VectorXd>& dW, double dt) {
  Eigen::VectorXd out = x;
  EulerMaruyama(sys).step(out, t, dW, dt);
  return out;
}

std::uint64_t descriptor_hash(const std::string& descriptor) {
  // FNV-1a, stable across platforms.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : descriptor) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t step_count(double t0, double t_end, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(t_end > t0)) throw ValidationError("t_end must be greater than t0");
  const double ratio = (t_end - t0) / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio) || steps < 1) {
    throw ValidationError("dt does not divide the integration interval");
  }
  return static_cast<std::size_t>(steps);
}

namespace {

Trajectory start_trajectory(const NetworkSystem& sys, const Eigen::VectorXd& x0, double t0, double dt,
                            std::size_t steps, std::size_t record_stride, std::uint64_t seed) {
  if (static_cast<std::size_t>(x0.size()) != sys.state_dim()) {
    throw ValidationError("initial state has dimension " + std::to_string(x0.size()) + ", expected " +
                          std::to_string(sys.state_dim()));
  }
  if (record_stride == 0 || steps % record_stride != 0) {
    throw ValidationError("record stride must divide the number of steps");
  }
  Trajectory traj;
  const auto rows = static_cast<Eigen::Index>(steps / record_stride + 1);
  traj.times.resize(rows);
  traj.states.resize(rows, static_cast<Eigen::Index>(sys.state_dim()));
  traj.node_dim = sys.node_dim();
  traj.node_count = sys.node_count();
  traj.seed = seed;
  traj.dt = dt;
  traj.record_stride = record_stride;
  traj.system_hash = descriptor_hash(sys.descriptor());
  traj.times(0) = t0;
  traj.states.row(0) = x0.transpose();
  return traj;
}

template <typename NextIncrement>
void run_steps(const NetworkSystem& sys, Trajectory& traj, double t0, double dt, std::size_t steps,
               NextIncrement&& next) {
  EulerMaruyama em(sys);
  Eigen::VectorXd x = traj.states.row(0).transpose();
  Eigen::VectorXd dW(static_cast<Eigen::Index>(sys.channel_count()));
  Eigen::Index row = 1;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    next(k, dW);
    em.step(x, t, dW, dt);
    if ((k + 1) % traj.record_stride == 0) {
      traj.times(row) = t0 + static_cast<double>(k + 1) * dt;
      traj.states.row(row) = x.transpose();
      ++row;
    }
  }
}

}  // namespace

Trajectory integrate(const NetworkSystem& sys, const Eigen::VectorXd& x0, double t0, const BrownianPath& path,
                     std::size_t record_stride) {
  if (path.channels != sys.channel_count() && !(sys.channel_count() == 0 && path.channels == 1)) {
    throw ValidationError("Brownian path has " + std::to_string(path.channels) + " channels, system uses " +
                          std::to_string(sys.channel_count()));
  }
  Trajectory traj = start_trajectory(sys, x0, t0, path.dt, path.steps, record_stride, path.seed);
  const auto used = static_cast<Eigen::Index>(sys.channel_count());
  run_steps(sys, traj, t0, path.dt, path.steps, [&](std::size_t k, Eigen::VectorXd& dW) {
    dW = path.increments.row(static_cast<Eigen::Index>(k)).head(used).transpose();
  });
  return traj;
}

Trajectory simulate(const NetworkSystem& sys, const Eigen::VectorXd& x0, double t0, double t_end, double dt,
                    std::uint64_t seed, std::size_t record_stride) {
  const std::size_t steps = step_count(t0, t_end, dt);
  Trajectory traj = start_trajectory(sys, x0, t0, dt, steps, record_stride, seed);
  if (sys.channel_count() == 0) {
    run_steps(sys, traj, t0, dt, steps, [](std::size_t, Eigen::VectorXd&) {});
    return traj;
  }
  BrownianSource source(seed, dt, sys.channel_count());
  run_steps(sys, traj, t0, dt, steps, [&](std::size_t, Eigen::VectorXd& dW) { source.next(dW); });
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (std::size_t i = 0; i < traj.node_count; ++i)
    for (std::size_t c = 0; c < traj.node_dim; ++c) out << ",x_" << i << '_' << c;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < traj.states.rows(); ++r) {
    std::snprintf(buf, sizeof buf, "%.10g", traj.times(r));
    out << buf;
    for (Eigen::Index c = 0; c < traj.states.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.10g", traj.states(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace stochsync
