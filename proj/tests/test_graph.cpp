#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "stochsync/graph.hpp"

using namespace stochsync;

namespace {

void require_spectrum(const Graph& g, const std::vector<double>& expected, double tol = 1e-10) {
  const auto s = graph_spectrum<double>(g);
  REQUIRE(s.eigenvalues.size() == static_cast<Eigen::Index>(expected.size()));
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(s.eigenvalues(static_cast<Eigen::Index>(k)) == doctest::Approx(expected[k]).epsilon(tol));
}

}  // namespace

TEST_CASE("path spectrum follows the cosine formula") {
  for (int n : {2, 3, 5, 8, 13}) require_spectrum(path_graph(n), oracle::path_eigenvalues(n));
  const auto s = graph_spectrum<double>(path_graph(5));
  CHECK(s.lambda2 == doctest::Approx(0.3819660112501051).epsilon(1e-12));
}

TEST_CASE("cycle, complete and star spectra") {
  require_spectrum(cycle_graph(7), oracle::cycle_eigenvalues(7));
  require_spectrum(complete_graph(6), oracle::complete_eigenvalues(6));
  require_spectrum(star_graph(5), oracle::star_eigenvalues(5));
}

TEST_CASE("K_{2,2,1} has lambda2 = 3") {
  const auto g = complete_multipartite_graph({2, 2, 1});
  CHECK(g.node_count() == 5);
  CHECK(g.edges().size() == 8);
  require_spectrum(g, oracle::k221_eigenvalues());
}

TEST_CASE("laplacian is symmetric with zero row sums, for several scalars") {
  const auto g = cycle_graph(6);
  const auto L = laplacian(g);
  CHECK((L - L.transpose()).norm() == 0.0);
  CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK(L.trace() == doctest::Approx(12.0));
  const auto Lf = laplacian<float>(g);
  CHECK(graph_spectrum<float>(g).lambda2 == doctest::Approx(1.0f).epsilon(1e-5));
  const auto sl = graph_spectrum<long double>(path_graph(5));
  CHECK(static_cast<double>(sl.lambda2) == doctest::Approx(0.3819660112501051).epsilon(1e-12));
  CHECK(Lf.rows() == 6);
  CHECK((Eigen::MatrixXd(sparse_laplacian(g)) - L).norm() == 0.0);
}

TEST_CASE("fiedler vector is orthogonal to the constant vector") {
  const auto s = graph_spectrum<double>(path_graph(6));
  CHECK(std::abs(s.fiedler_vector.sum()) < 1e-10);
  const auto L = laplacian(path_graph(6));
  CHECK((L * s.fiedler_vector - s.lambda2 * s.fiedler_vector).norm() < 1e-10);
}

TEST_CASE("connectivity") {
  CHECK(is_connected(graph_spectrum<double>(path_graph(4))));
  const Graph two_triangles(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const auto s = graph_spectrum<double>(two_triangles);
  CHECK(std::abs(s.lambda2) < 1e-12);
  CHECK_FALSE(is_connected(s));
  CHECK_FALSE(is_connected(graph_spectrum<double>(empty_graph(3))));
  CHECK(is_connected(graph_spectrum<double>(empty_graph(1))));
}

TEST_CASE("construction rejects malformed edges and names them") {
  auto message = [](auto&& fn) {
    try {
      fn();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message([] { Graph(3, {{1, 1}}); }).find("(1,1)") != std::string::npos);
  CHECK(message([] { Graph(3, {{0, 1}, {1, 0}}); }).find("(1,0)") != std::string::npos);
  CHECK(message([] { Graph(3, {{0, 3}}); }).find("(0,3)") != std::string::npos);
  CHECK_THROWS_AS(Graph(0, {}), ValidationError);
}

TEST_CASE("edges are normalised and sorted") {
  const Graph g(4, {{3, 2}, {1, 0}, {2, 0}});
  REQUIRE(g.edges().size() == 3);
  CHECK(g.edges()[0] == Edge{0, 1});
  CHECK(g.edges()[1] == Edge{0, 2});
  CHECK(g.edges()[2] == Edge{2, 3});
  CHECK(g.degree(0) == 2);
  CHECK(g.max_degree() == 2);
}

TEST_CASE("edge list round trip and comments") {
  std::istringstream in("# a path\n5\n0 1  # first\n1 2\n\n2 3\n3 4\n");
  const auto g = read_edge_list(in);
  CHECK(g.node_count() == 5);
  CHECK(g.edges().size() == 4);
  std::ostringstream out;
  write_edge_list(out, g);
  std::istringstream back(out.str());
  CHECK(read_edge_list(back).edges() == g.edges());

  std::istringstream bad("3\n0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), ValidationError);
  std::istringstream loop("3\n2 2\n");
  CHECK_THROWS_AS(read_edge_list(loop), ValidationError);
  CHECK_THROWS_AS(load_edge_list("/nonexistent/graph.txt"), ValidationError);
}

TEST_CASE("relabelling keeps the spectrum") {
  const Graph g(5, {{0, 1}, {1, 2}, {1, 3}, {3, 4}});
  const auto h = relabel(g, {4, 2, 0, 1, 3});
  const auto a = graph_spectrum<double>(g), b = graph_spectrum<double>(h);
  CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(h.degree(2) == 3);
}

TEST_CASE("spectrum rejects non-laplacian input") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  CHECK_THROWS_AS(spectrum(A), ValidationError);
  Eigen::MatrixXd B(2, 3);
  B.setZero();
  CHECK_THROWS_AS(spectrum(B), ValidationError);
}
