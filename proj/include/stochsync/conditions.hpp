#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "stochsync/errors.hpp"
#include "stochsync/graph.hpp"
#include "stochsync/sde.hpp"

namespace stochsync {

enum class Theorem { T2, T3 };

enum class Provenance { closed_form, numeric_estimate, user_supplied };

const char* to_string(Theorem t);
const char* to_string(Provenance p);

struct Constant {
  double value{0};
  Provenance provenance{Provenance::closed_form};
};

// Keys used by the certificate checks.
namespace keys {
inline constexpr const char* K_f = "K_f";
inline constexpr const char* K_g = "K_g";
inline constexpr const char* Kbar_g = "Kbar_g";
inline constexpr const char* sigma = "sigma";
inline constexpr const char* lambda2 = "lambda2";
inline constexpr const char* sigma_star = "sigma_star";
inline constexpr const char* lambda2_star = "lambda2_star";
inline constexpr const char* lambdaN_star = "lambdaN_star";
}  // namespace keys

using ConstantMap = std::map<std::string, Constant>;

/// Outcome of a sufficient synchronization condition.
///
/// T2: lhs = sigma*lambda2, rhs = K_f + (K_g^2 - 2 Kbar_g^2)/2.
/// T3: lhs = sigma*^2 (lambda2*^2 - lambdaN*^2/2), rhs = K_f - sigma*lambda2.
///
/// rhs of T2 is the coupling threshold K~ that sigma*lambda2 has to exceed.
/// A false verdict means "not certified"; the conditions are only sufficient.
struct SyncCertificate {
  Theorem theorem{Theorem::T2};
  ConstantMap constants;
  double lhs{0};
  double rhs{0};
  double margin{0};
  bool verdict{false};

  std::string inequality() const;
  std::string verdict_text() const { return verdict ? "certified" : "not certified"; }
};

SyncCertificate check_theorem2(const ConstantMap& constants);
SyncCertificate check_theorem3(const ConstantMap& constants);

/// Largest eigenvalue of the symmetric part of the FitzHugh-Nagumo Jacobian at
/// v = 0, which bounds it for every v.
template <typename Scalar>
Scalar kf_fn_closed_form(Scalar b, Scalar c) {
  using std::sqrt;
  if (!(c > Scalar(0))) throw ValidationError("kf_fn_closed_form: c must be positive");
  const Scalar c2 = c * c;
  const Scalar disc = Scalar(1) + b * b + Scalar(2) * (b - Scalar(1)) * c2 + Scalar(2) * c2 * c2;
  return (-b + c2 + sqrt(disc)) / (Scalar(2) * c);
}

/// Axis-aligned sampling box.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box cube(std::size_t dim, double lo, double hi);
  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  void validate() const;
};

/// samples x dim Latin-hypercube design inside `box`.
Eigen::MatrixXd latin_hypercube(const Box& box, std::size_t samples, std::uint64_t seed);

inline constexpr std::size_t kDefaultConstantSamples = 10000;

/// Sampled estimate of the QUAD constant: max over a Latin hypercube (plus the
/// box centre) of the largest eigenvalue of the symmetric Jacobian, with the
/// Jacobian from central differences. This is a lower bound on the supremum.
double kf_numeric(const NodeDrift& drift, std::size_t node_dim, const Box& box,
                  std::size_t samples = kDefaultConstantSamples, std::uint64_t seed = 0, double t = 0.0);

struct DiffusionConstants {
  double K_g{0};     // max ||G(X)||_F / |e|    (sampled lower bound of a sup)
  double Kbar_g{0};  // min |e^T G(X)| / |e|^2  (sampled upper bound of an inf)
  std::size_t samples{0};
};

/// Checks that G vanishes on synchronous states, then samples network states
/// with every node in `node_box` and measures the diffusion gains against the
/// deviation-from-mean vector e.
DiffusionConstants diffusion_constants_numeric(const NetworkSystem& sys, const Box& node_box,
                                               std::size_t samples = kDefaultConstantSamples,
                                               std::uint64_t seed = 0, double t = 0.0);

struct NoiseLayerDesign {
  double sigma_star{0};
  double lambda2_star{0};
  double lambdaN_star{0};
  double deficit{0};  // K_f - sigma*lambda2
};

/// Smallest noise-layer strength (times `safety`) that certifies the network
/// through the T3 inequality. Returns 0 when the network is already certified
/// without noise (deficit < 0). For a zero deficit the strict inequality
/// needs some noise; `zero_deficit_contraction` is then the contraction
/// sigma*^2 (lambda2*^2 - lambdaN*^2/2) requested from the layer.
///
/// Throws InfeasibleDesign when the layer spectrum has
/// lambda2*^2 <= lambdaN*^2/2 and the deficit is non-negative.
NoiseLayerDesign design_noise_layer(double K_f, double sigma, double lambda2, const Graph& layer_graph,
                                    double safety = 1.1, double zero_deficit_contraction = 0.5);

/// Constants of the almost-sure exponential stability test with V
/// satisfying LV <= c2 V and |V_x g|^2 >= c3 V^2.
struct MaoConstants {
  double p{0};
  double c1{0};
  double c2{0};
  double c3{0};
  double rate_bound{0};  // -(c3 - 2 c2)/p
  bool stable{false};    // c3 > 2 c2
};

MaoConstants mao_rate_bound(double c2, double c3, double p, double c1 = 1.0);

}  // namespace stochsync
