#include "stochsync/conditions.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "stochsync/brownian.hpp"

namespace stochsync {

const char* to_string(Theorem t) { return t == Theorem::T2 ? "T2" : "T3"; }

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form:
      return "closed_form";
    case Provenance::numeric_estimate:
      return "numeric_estimate";
    case Provenance::user_supplied:
      return "user_supplied";
  }
  return "?";
}

namespace {

double require(const ConstantMap& m, const char* key, std::vector<std::string>& missing) {
  auto it = m.find(key);
  if (it == m.end()) {
    missing.emplace_back(key);
    return 0.0;
  }
  if (!std::isfinite(it->second.value)) throw ValidationError(std::string("constant ") + key + " is not finite");
  return it->second.value;
}

void throw_missing(const char* which, const std::vector<std::string>& missing) {
  std::string msg = std::string(which) + ": missing constants";
  for (const auto& k : missing) msg += " " + k;
  throw ValidationError(msg);
}

void require_nonnegative(double v, const char* key) {
  if (v < 0) throw ValidationError(std::string("constant ") + key + " must be non-negative");
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

}  // namespace

std::string SyncCertificate::inequality() const {
  const char* rel = verdict ? " > " : " <= ";
  if (theorem == Theorem::T2) {
    return "sigma*lambda2 = " + fmt(lhs) + rel + "K_f + (K_g^2 - 2*Kbar_g^2)/2 = " + fmt(rhs);
  }
  return "sigma_star^2*(lambda2_star^2 - lambdaN_star^2/2) = " + fmt(lhs) + rel + "K_f - sigma*lambda2 = " + fmt(rhs);
}

SyncCertificate check_theorem2(const ConstantMap& constants) {
  std::vector<std::string> missing;
  const double kf = require(constants, keys::K_f, missing);
  const double kg = require(constants, keys::K_g, missing);
  const double kbar = require(constants, keys::Kbar_g, missing);
  const double sigma = require(constants, keys::sigma, missing);
  const double lambda2 = require(constants, keys::lambda2, missing);
  if (!missing.empty()) throw_missing("check_theorem2", missing);
  require_nonnegative(kg, keys::K_g);
  require_nonnegative(kbar, keys::Kbar_g);
  require_nonnegative(sigma, keys::sigma);

  SyncCertificate cert;
  cert.theorem = Theorem::T2;
  cert.constants = constants;
  cert.lhs = sigma * lambda2;
  cert.rhs = kf + (kg * kg - 2.0 * kbar * kbar) / 2.0;
  cert.margin = cert.lhs - cert.rhs;
  cert.verdict = cert.margin > 0;
  return cert;
}

SyncCertificate check_theorem3(const ConstantMap& constants) {
  std::vector<std::string> missing;
  const double kf = require(constants, keys::K_f, missing);
  const double sigma = require(constants, keys::sigma, missing);
  const double lambda2 = require(constants, keys::lambda2, missing);
  const double ss = require(constants, keys::sigma_star, missing);
  const double l2s = require(constants, keys::lambda2_star, missing);
  const double lNs = require(constants, keys::lambdaN_star, missing);
  if (!missing.empty()) throw_missing("check_theorem3", missing);
  require_nonnegative(ss, keys::sigma_star);
  require_nonnegative(l2s, keys::lambda2_star);
  require_nonnegative(lNs, keys::lambdaN_star);
  if (l2s > lNs * (1.0 + 1e-12)) throw ValidationError("check_theorem3: lambda2_star exceeds lambdaN_star");

  SyncCertificate cert;
  cert.theorem = Theorem::T3;
  cert.constants = constants;
  cert.lhs = ss * ss * (l2s * l2s - lNs * lNs / 2.0);
  cert.rhs = kf - sigma * lambda2;
  cert.margin = cert.lhs - cert.rhs;
  cert.verdict = cert.margin > 0;
  return cert;
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  Box b{Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), lo),
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), hi)};
  b.validate();
  return b;
}

void Box::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) throw ValidationError("sampling box has inconsistent bounds");
  if (!((upper - lower).array() > 0).all() || !lower.allFinite() || !upper.allFinite()) {
    throw ValidationError("sampling box is degenerate");
  }
}

Eigen::MatrixXd latin_hypercube(const Box& box, std::size_t samples, std::uint64_t seed) {
  box.validate();
  if (samples == 0) throw ValidationError("latin_hypercube: need at least one sample");
  auto rng = derive_engine(seed, kAuxiliaryStreamBase + 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto S = static_cast<Eigen::Index>(samples);
  const auto dim = static_cast<Eigen::Index>(box.dim());
  Eigen::MatrixXd out(S, dim);
  std::vector<Eigen::Index> perm(samples);
  for (Eigen::Index d = 0; d < dim; ++d) {
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double width = box.upper(d) - box.lower(d);
    for (Eigen::Index s = 0; s < S; ++s) {
      const double u = (static_cast<double>(perm[static_cast<std::size_t>(s)]) + unit(rng)) / static_cast<double>(S);
      out(s, d) = box.lower(d) + u * width;
    }
  }
  return out;
}

double kf_numeric(const NodeDrift& drift, std::size_t node_dim, const Box& box, std::size_t samples,
                  std::uint64_t seed, double t) {
  box.validate();
  if (box.dim() != node_dim) throw ValidationError("kf_numeric: box dimension does not match node dimension");
  if (samples == 0) throw ValidationError("kf_numeric: need at least one sample");
  const auto n = static_cast<Eigen::Index>(node_dim);
  const Eigen::VectorXd step = 1e-5 * ((box.upper - box.lower) / 2.0).cwiseMax(1.0);

  Eigen::MatrixXd points(static_cast<Eigen::Index>(samples) + 1, n);
  points.topRows(static_cast<Eigen::Index>(samples)) = latin_hypercube(box, samples, seed);
  points.row(points.rows() - 1) = ((box.lower + box.upper) / 2.0).transpose();

  Eigen::VectorXd x(n), fp(n), fm(n);
  Eigen::MatrixXd J(n, n);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index s = 0; s < points.rows(); ++s) {
    for (Eigen::Index j = 0; j < n; ++j) {
      x = points.row(s).transpose();
      x(j) += step(j);
      drift(t, x, fp);
      x(j) -= 2.0 * step(j);
      drift(t, x, fm);
      if (!fp.allFinite() || !fm.allFinite()) {
        throw NumericError("kf_numeric: drift is not finite inside the sampling box");
      }
      J.col(j) = (fp - fm) / (2.0 * step(j));
    }
    solver.compute((J + J.transpose()) / 2.0, Eigen::EigenvaluesOnly);
    best = std::max(best, solver.eigenvalues()(n - 1));
  }
  return best;
}

DiffusionConstants diffusion_constants_numeric(const NetworkSystem& sys, const Box& node_box, std::size_t samples,
                                               std::uint64_t seed, double t) {
  node_box.validate();
  const std::size_t n = sys.node_dim();
  const std::size_t N = sys.node_count();
  if (node_box.dim() != n) throw ValidationError("diffusion constants: box dimension does not match node dimension");
  if (samples == 0) throw ValidationError("diffusion constants: need at least one sample");
  const auto nn = static_cast<Eigen::Index>(n);
  const auto nN = static_cast<Eigen::Index>(n * N);

  // The diffusion must vanish on synchronous states before the gains mean anything.
  const Eigen::MatrixXd sync_points = latin_hypercube(node_box, 100, seed ^ 0x5eedULL);
  for (Eigen::Index s = 0; s < sync_points.rows(); ++s) {
    const Eigen::VectorXd S = sync_points.row(s).transpose().replicate(static_cast<Eigen::Index>(N), 1);
    const double g = sys.diffusion_matrix(t, S).norm();
    if (g > 1e-12 * (1.0 + S.norm())) {
      throw ValidationError("diffusion does not vanish on a synchronous state (|G(S)|_F = " + std::to_string(g) +
                            "); G(t,S) = 0 is required");
    }
  }

  Box network_box{node_box.lower.replicate(static_cast<Eigen::Index>(N), 1),
                  node_box.upper.replicate(static_cast<Eigen::Index>(N), 1)};
  const Eigen::MatrixXd points = latin_hypercube(network_box, samples, seed);

  DiffusionConstants out;
  out.Kbar_g = std::numeric_limits<double>::infinity();
  Eigen::VectorXd e(nN);
  for (Eigen::Index s = 0; s < points.rows(); ++s) {
    const Eigen::VectorXd X = points.row(s).transpose();
    const Eigen::Map<const Eigen::MatrixXd> nodes(X.data(), nn, static_cast<Eigen::Index>(N));
    const Eigen::VectorXd mean = nodes.rowwise().mean();
    for (std::size_t i = 0; i < N; ++i) e.segment(static_cast<Eigen::Index>(i) * nn, nn) = nodes.col(static_cast<Eigen::Index>(i)) - mean;
    const double e2 = e.squaredNorm();
    if (!(e2 > 1e-300)) continue;
    const Eigen::MatrixXd G = sys.diffusion_matrix(t, X);
    out.K_g = std::max(out.K_g, G.norm() / std::sqrt(e2));
    const double projected = G.cols() > 0 ? (e.transpose() * G).norm() : 0.0;
    out.Kbar_g = std::min(out.Kbar_g, projected / e2);
    ++out.samples;
  }
  if (out.samples == 0) throw NumericError("diffusion constants: every sample lies on the synchronous manifold");
  return out;
}

NoiseLayerDesign design_noise_layer(double K_f, double sigma, double lambda2, const Graph& layer_graph, double safety,
                                    double zero_deficit_contraction) {
  if (!(safety >= 1.0)) throw ValidationError("design_noise_layer: safety factor must be >= 1");
  const auto spec = graph_spectrum(layer_graph);
  if (!is_connected(spec)) throw ValidationError("design_noise_layer: noise layer graph must be connected");

  NoiseLayerDesign d;
  d.lambda2_star = spec.lambda2;
  d.lambdaN_star = spec.lambdaN;
  d.deficit = K_f - sigma * lambda2;
  if (d.deficit < 0) return d;

  const double gain = d.lambda2_star * d.lambda2_star - d.lambdaN_star * d.lambdaN_star / 2.0;
  if (!(gain > 0)) {
    std::ostringstream msg;
    msg << "layer topology cannot certify synchronization: lambda2*^2 = " << d.lambda2_star * d.lambda2_star
        << " <= lambdaN*^2/2 = " << d.lambdaN_star * d.lambdaN_star / 2.0
        << "; choose a layer with lambda2*/lambdaN* > 1/sqrt(2) (e.g. complete graph, ratio 1)";
    throw InfeasibleDesign(msg.str());
  }
  const double target = d.deficit > 0 ? d.deficit : zero_deficit_contraction;
  if (!(target > 0)) throw ValidationError("design_noise_layer: zero deficit needs a positive requested contraction");
  d.sigma_star = safety * std::sqrt(target / gain);
  return d;
}

MaoConstants mao_rate_bound(double c2, double c3, double p, double c1) {
  if (!(p > 0)) throw ValidationError("mao_rate_bound: p must be positive");
  if (!(c3 >= 0)) throw ValidationError("mao_rate_bound: c3 must be non-negative");
  if (!(c1 > 0)) throw ValidationError("mao_rate_bound: c1 must be positive");
  MaoConstants m;
  m.p = p;
  m.c1 = c1;
  m.c2 = c2;
  m.c3 = c3;
  m.rate_bound = -(c3 - 2.0 * c2) / p;
  m.stable = c3 > 2.0 * c2;
  return m;
}

}  // namespace stochsync
