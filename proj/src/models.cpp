#include "stochsync/models.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "stochsync/errors.hpp"

namespace stochsync {

namespace {

void check_fn(const FNParams& p, std::size_t node_count) {
  if (node_count < 2) throw ValidationError("FitzHugh-Nagumo network needs N >= 2");
  if (p.c == 0.0 || !std::isfinite(p.c)) throw ValidationError("FitzHugh-Nagumo parameter c must be nonzero");
  if (!std::isfinite(p.a) || !std::isfinite(p.b)) throw ValidationError("FitzHugh-Nagumo parameters must be finite");
  if (!(p.gamma >= 0) || !std::isfinite(p.gamma)) throw ValidationError("noise intensity gamma must be >= 0");
}

std::string fn_descriptor(const char* name, const FNParams& p, std::size_t node_count) {
  std::ostringstream s;
  s.precision(17);
  s << name << " a=" << p.a << " b=" << p.b << " c=" << p.c << " gamma=" << p.gamma << " N=" << node_count
    << " u=" << (p.u ? "custom" : "0");
  return s.str();
}

// Mean of component c taken relative to node 0 so that identical node states
// give exactly zero deviation.
void deviations_from_mean(const Eigen::VectorXd& X, std::size_t n, std::size_t node_count, Eigen::VectorXd& dev) {
  const auto nn = static_cast<Eigen::Index>(n);
  const auto N = static_cast<Eigen::Index>(node_count);
  dev.resize(X.size());
  for (Eigen::Index c = 0; c < nn; ++c) {
    const double ref = X(c);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) acc += X(i * nn + c) - ref;
    const double shift = acc / static_cast<double>(node_count);
    for (Eigen::Index i = 0; i < N; ++i) dev(i * nn + c) = shift - (X(i * nn + c) - ref);
  }
}

}  // namespace

NodeDrift fn_drift(const FNParams& p) {
  const double a = p.a, b = p.b, c = p.c;
  auto u = p.u;
  return [a, b, c, u](double t, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> dx) {
    const double v = x(0), w = x(1);
    const double stim = u ? u(t) : 0.0;
    dx(0) = c * (v + w - v * v * v / 3.0 + stim);
    dx(1) = -(v - a + b * w) / c;
  };
}

NodeDrift bistable_drift() {
  return [](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> dx) {
    dx(0) = x(0) - x(0) * x(0) * x(0);
  };
}

NodeDrift linear_drift(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ValidationError("drift matrix must be square and non-empty");
  return [A](double, Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<Eigen::VectorXd> dx) { dx.noalias() = A * x; };
}

DiffusionSpec mean_field_diffusion(std::size_t node_dim, const Eigen::VectorXd& gains, DiffusionKind kind) {
  if (static_cast<std::size_t>(gains.size()) != node_dim) {
    throw ValidationError("mean-field diffusion needs one gain per state component");
  }
  switch (kind) {
    case DiffusionKind::none:
      return DiffusionSpec::none();
    case DiffusionKind::shared_scalar:
      return DiffusionSpec::shared_scalar([node_dim, gains](double, const Eigen::VectorXd& X, Eigen::VectorXd& g) {
        const std::size_t N = static_cast<std::size_t>(X.size()) / node_dim;
        deviations_from_mean(X, node_dim, N, g);
        const auto n = static_cast<Eigen::Index>(node_dim);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(N); ++i) {
          g.segment(i * n, n).array() *= gains.array();
        }
      });
    case DiffusionKind::per_node_independent:
      return DiffusionSpec::per_node_independent(
          node_dim, [node_dim, gains](double, const Eigen::VectorXd& X, Eigen::MatrixXd& blocks) {
            const std::size_t N = static_cast<std::size_t>(X.size()) / node_dim;
            Eigen::VectorXd dev;
            deviations_from_mean(X, node_dim, N, dev);
            const auto n = static_cast<Eigen::Index>(node_dim);
            blocks.setZero(X.size(), n);
            for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(N); ++i) {
              blocks.middleRows(i * n, n).diagonal() = gains.cwiseProduct(dev.segment(i * n, n));
            }
          });
  }
  return DiffusionSpec::none();
}

NetworkSystem fn_env_system(const FNParams& p, std::size_t node_count) {
  check_fn(p, node_count);
  return NetworkSystem(2, empty_graph(node_count), fn_drift(p), 0.0,
                       mean_field_diffusion(2, Eigen::Vector2d(p.gamma, 0.0), DiffusionKind::shared_scalar),
                       std::nullopt, fn_descriptor("fn_env", p, node_count));
}

NetworkSystem fn_full_system(const FNParams& p, std::size_t node_count) {
  check_fn(p, node_count);
  return NetworkSystem(2, empty_graph(node_count), fn_drift(p), 0.0,
                       mean_field_diffusion(2, Eigen::Vector2d(p.gamma, p.gamma), DiffusionKind::shared_scalar),
                       std::nullopt, fn_descriptor("fn_full", p, node_count));
}

NetworkSystem ddm_system(const DDMParams& p, std::ostream* warnings) {
  if (warnings && !is_connected(graph_spectrum(p.graph))) {
    *warnings << "warning: ddm graph is disconnected; no collective decision can be certified\n";
  }
  std::ostringstream desc;
  desc << "ddm N=" << p.graph.node_count() << " edges=";
  for (const auto& [i, j] : p.graph.edges()) desc << i << '-' << j << ';';
  // g_ii = x_i - mean, i.e. gain -1 on (mean - x_i).
  return NetworkSystem(1, p.graph, bistable_drift(), 1.0,
                       mean_field_diffusion(1, Eigen::VectorXd::Constant(1, -1.0), DiffusionKind::per_node_independent),
                       std::nullopt, desc.str());
}

NetworkSystem linear_consensus_system(const Graph& graph, double sigma, std::optional<NoiseLayer> noise_layer) {
  if (!(sigma >= 0)) throw ValidationError("coupling strength must be >= 0");
  std::ostringstream desc;
  desc.precision(17);
  desc << "linear_consensus sigma=" << sigma << " N=" << graph.node_count() << " edges=";
  for (const auto& [i, j] : graph.edges()) desc << i << '-' << j << ';';
  if (noise_layer) {
    desc << " layer_sigma=" << noise_layer->sigma_star << " layer_edges=";
    for (const auto& [i, j] : noise_layer->graph.edges()) desc << i << '-' << j << ';';
  }
  auto zero = [](double, Eigen::Ref<const Eigen::VectorXd>, Eigen::Ref<Eigen::VectorXd> dx) { dx.setZero(); };
  return NetworkSystem(1, graph, zero, sigma, DiffusionSpec::none(), std::move(noise_layer), desc.str());
}

NetworkSystem linear_node_system(const LinearNodeParams& p, const Graph& graph, std::optional<NoiseLayer> noise_layer) {
  const auto n = static_cast<std::size_t>(p.drift_matrix.rows());
  DiffusionSpec diffusion = DiffusionSpec::none();
  if (p.diffusion_kind != DiffusionKind::none) {
    if (static_cast<std::size_t>(p.diffusion_gains.size()) != n) {
      throw ValidationError("custom model: diffusion gains must have one entry per state component");
    }
    diffusion = mean_field_diffusion(n, p.diffusion_gains, p.diffusion_kind);
  }
  std::ostringstream desc;
  desc.precision(17);
  desc << "custom_linear n=" << n << " A=" << p.drift_matrix.reshaped().transpose() << " sigma=" << p.sigma
       << " diffusion=" << to_string(p.diffusion_kind) << " N=" << graph.node_count();
  return NetworkSystem(n, graph, linear_drift(p.drift_matrix), p.sigma, std::move(diffusion), std::move(noise_layer),
                       desc.str());
}

Eigen::MatrixXd mean_field_matrix(std::size_t node_count) {
  const auto N = static_cast<Eigen::Index>(node_count);
  return Eigen::MatrixXd::Identity(N, N) - Eigen::MatrixXd::Constant(N, N, 1.0 / static_cast<double>(node_count));
}

}  // namespace stochsync
