#include <doctest.h>

#include <random>

#include "property_checks.hpp"
#include "stochsync/metrics.hpp"
#include "stochsync/models.hpp"

using namespace stochsync;

namespace {

constexpr std::size_t kCases = 10000;

void require_ok(const props::Outcome& o) {
  INFO(o.first_failure);
  CHECK(o.cases == kCases);
  CHECK(o.failures == 0);
}

Trajectory random_trajectory(std::mt19937_64& rng, std::size_t n, std::size_t N, Eigen::Index samples) {
  std::normal_distribution<double> z;
  Trajectory traj;
  traj.node_dim = n;
  traj.node_count = N;
  traj.times = Eigen::VectorXd::LinSpaced(samples, 0.0, 1.0);
  traj.states.resize(samples, static_cast<Eigen::Index>(n * N));
  for (Eigen::Index r = 0; r < samples; ++r)
    for (Eigen::Index c = 0; c < traj.states.cols(); ++c) traj.states(r, c) = z(rng) + std::sin(3.0 * r / samples + c);
  return traj;
}

}  // namespace

TEST_CASE("Rayleigh quotient lies between lambda2 and lambdaN off the constant vector") {
  require_ok(props::rayleigh_bound(kCases, 101));
}

TEST_CASE("built-in diffusions vanish on the synchronous manifold") {
  require_ok(props::diffusion_vanishes_on_manifold(kCases, 202));
}

TEST_CASE("one-sided Lipschitz bound holds for the FN drift") { require_ok(props::quad_bound_fn(kCases, 303)); }

TEST_CASE("one-sided Lipschitz bound holds for the bistable drift") { require_ok(props::quad_bound_ddm(kCases, 404)); }

TEST_CASE("certificates are monotone in their constants") {
  require_ok(props::certificate_monotonicity(kCases, 505));
}

TEST_CASE("sync error is invariant under a common shift") {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> z;
  for (int k = 0; k < 1000; ++k) {
    auto traj = random_trajectory(rng, 2, 4, 5);
    const auto before = sync_error(traj);
    const Eigen::RowVector2d shift(10 * z(rng), 10 * z(rng));
    for (std::size_t i = 0; i < 4; ++i) traj.states.middleCols(static_cast<Eigen::Index>(2 * i), 2).rowwise() += shift;
    REQUIRE((sync_error(traj) - before).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + 10 * shift.norm()));
  }
}

TEST_CASE("R is invariant under affine rescaling") {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    auto traj = random_trajectory(rng, 1, 5, 120);
    const double before = order_parameter(traj, 0, 0.0);
    double alpha = u(rng);
    if (std::abs(alpha) < 0.1) alpha = 0.1;
    traj.states = (alpha * traj.states.array() + u(rng)).matrix();
    REQUIRE(order_parameter(traj, 0, 0.0) == doctest::Approx(before).epsilon(1e-9));
  }
}

TEST_CASE("R stays within [0, 1.1] on stationary windows") {
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  std::normal_distribution<double> z;
  for (int k = 0; k < 1000; ++k) {
    // common signal plus independent noise in random proportion
    const Eigen::Index T = 200;
    const double w = mix(rng);
    Trajectory traj;
    traj.node_dim = 1;
    traj.node_count = 6;
    traj.times = Eigen::VectorXd::LinSpaced(T, 0.0, 1.0);
    traj.states.resize(T, 6);
    for (Eigen::Index r = 0; r < T; ++r) {
      const double common = z(rng);
      for (Eigen::Index c = 0; c < 6; ++c) traj.states(r, c) = w * common + (1.0 - w) * z(rng);
    }
    const double R = order_parameter(traj, 0, 0.0);
    REQUIRE(R >= 0.0);
    REQUIRE(R <= 1.1);
  }
}

TEST_CASE("sampled diffusion constants bracket the exact DDM values") {
  std::mt19937_64 rng(909);
  for (int k = 0; k < 20; ++k) {
    const auto g = props::random_graph(rng, 3, 8);
    const auto dc = diffusion_constants_numeric(ddm_system(DDMParams{g}), Box::cube(1, -3, 3), 500, k);
    REQUIRE(dc.K_g == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(dc.Kbar_g >= 1.0 / std::sqrt(double(g.node_count())) - 1e-12);
    REQUIRE(dc.Kbar_g <= 1.0);
  }
}

TEST_CASE("DDM diffusion norms: |G|_F = |e| and |e^T G|^2 = sum e_i^4") {
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> z;
  for (std::size_t k = 0; k < kCases; ++k) {
    const auto g = props::random_graph(rng, 2, 9);
    const auto sys = ddm_system(DDMParams{g});
    Eigen::VectorXd X(static_cast<Eigen::Index>(g.node_count()));
    for (auto& v : X) v = 3.0 * z(rng);
    const Eigen::MatrixXd G = sys.diffusion_matrix(0.0, X);
    const Eigen::VectorXd e = X.array() - X.mean();
    REQUIRE(G.norm() == doctest::Approx(e.norm()).epsilon(1e-12));
    REQUIRE((e.transpose() * G).squaredNorm() == doctest::Approx(e.array().pow(4).sum()).epsilon(1e-12));
  }
}
