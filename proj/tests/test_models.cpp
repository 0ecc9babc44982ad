#include <doctest.h>

#include <sstream>

#include "stochsync/models.hpp"

using namespace stochsync;

TEST_CASE("FitzHugh-Nagumo drift") {
  FNParams p;
  const auto f = fn_drift(p);
  Eigen::Vector2d x(1.5, -0.5), dx;
  f(0.0, x, dx);
  CHECK(dx(0) == doctest::Approx(2.8 * (1.5 - 0.5 - 1.5 * 1.5 * 1.5 / 3.0)));
  CHECK(dx(1) == doctest::Approx(-(1.5 - 0.7 + 0.4 * -0.5) / 2.8));
  p.u = [](double t) { return t; };
  fn_drift(p)(2.0, x, dx);
  CHECK(dx(0) == doctest::Approx(2.8 * (1.5 - 0.5 - 1.125 + 2.0)));
}

TEST_CASE("bistable and linear drifts") {
  Eigen::VectorXd x(1), dx(1);
  x << 2.0;
  bistable_drift()(0.0, x, dx);
  CHECK(dx(0) == doctest::Approx(-6.0));
  Eigen::Matrix2d A;
  A << 0, 1, -1, 0;
  Eigen::Vector2d y(1, 2), dy;
  linear_drift(A)(0.0, y, dy);
  CHECK(dy == Eigen::Vector2d(2, -1));
}

TEST_CASE("environment noise acts on v only, full noise on v and w") {
  FNParams p;
  p.gamma = 2.0;
  const auto env = fn_env_system(p, 3);
  const auto full = fn_full_system(p, 3);
  CHECK(env.channel_count() == 1);
  CHECK(env.coupling_strength() == 0.0);
  Eigen::VectorXd X(6);
  X << 1, 2, 3, 4, 5, 6;  // v = (1,3,5), w = (2,4,6); means 3 and 4
  Eigen::VectorXd ge(6), gf(6);
  ge << 2 * (3 - 1), 0, 0, 0, 2 * (3 - 5), 0;
  gf << 2 * (3 - 1), 2 * (4 - 2), 0, 0, 2 * (3 - 5), 2 * (4 - 6);
  CHECK((env.diffusion_matrix(0, X).col(0) - ge).norm() < 1e-14);
  CHECK((full.diffusion_matrix(0, X).col(0) - gf).norm() < 1e-14);
}

TEST_CASE("DDM diffusion is diag(x_i - mean)") {
  const auto sys = ddm_system(DDMParams{path_graph(4)});
  CHECK(sys.channel_count() == 4);
  CHECK(sys.coupling_strength() == 1.0);
  Eigen::VectorXd X(4);
  X << 1, 2, 4, -3;
  const auto G = sys.diffusion_matrix(0, X);
  const Eigen::VectorXd e = X.array() - X.mean();
  CHECK((G - Eigen::MatrixXd(e.asDiagonal())).norm() < 1e-14);
}

TEST_CASE("DDM warns for a disconnected graph") {
  std::ostringstream w;
  ddm_system(DDMParams{empty_graph(3)}, &w);
  CHECK(w.str().find("disconnected") != std::string::npos);
  std::ostringstream quiet;
  ddm_system(DDMParams{path_graph(3)}, &quiet);
  CHECK(quiet.str().empty());
}

TEST_CASE("mean-field matrix has unit transverse spectrum") {
  const auto P = mean_field_matrix(6);
  const auto s = spectrum(P);
  CHECK(std::abs(s.eigenvalues(0)) < 1e-12);
  CHECK(s.lambda2 == doctest::Approx(1.0));
  CHECK(s.lambdaN == doctest::Approx(1.0));
}

TEST_CASE("custom linear node model") {
  LinearNodeParams p;
  p.drift_matrix = Eigen::Matrix2d::Identity() * -1.0;
  p.sigma = 0.5;
  p.diffusion_gains = Eigen::Vector2d(1.0, 0.0);
  p.diffusion_kind = DiffusionKind::per_node_independent;
  const auto sys = linear_node_system(p, path_graph(3));
  CHECK(sys.node_dim() == 2);
  CHECK(sys.channel_count() == 6);
  p.diffusion_gains = Eigen::Vector3d(1, 1, 1);
  CHECK_THROWS_AS(linear_node_system(p, path_graph(3)), ValidationError);
}

TEST_CASE("model parameter validation") {
  FNParams p;
  CHECK_THROWS_AS(fn_env_system(p, 1), ValidationError);
  p.gamma = -1.0;
  CHECK_THROWS_AS(fn_full_system(p, 3), ValidationError);
  p.gamma = 0.0;
  p.c = 0.0;
  CHECK_THROWS_AS(fn_full_system(p, 3), ValidationError);
}
