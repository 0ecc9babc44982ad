#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stochsync/errors.hpp"

namespace stochsync {

using Edge = std::pair<std::size_t, std::size_t>;

/// Undirected, unweighted simple graph on nodes 0..N-1.
///
/// Edges are stored normalized (first < second) and sorted. Construction
/// rejects self-loops, duplicates and out-of-range endpoints, so every
/// Graph value is valid.
class Graph {
 public:
  Graph(std::size_t node_count, std::vector<Edge> edges, std::string name = {});

  std::size_t node_count() const { return node_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::string& name() const { return name_; }

  std::size_t degree(std::size_t node) const;
  std::size_t max_degree() const;

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  std::string name_;
};

Graph build_graph(std::size_t node_count, const std::vector<Edge>& edges);

Graph path_graph(std::size_t n);
Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph star_graph(std::size_t n);  // node 0 is the hub
Graph empty_graph(std::size_t n);

// Complete multipartite graph with the given part sizes.
Graph complete_multipartite_graph(const std::vector<std::size_t>& parts);

// Node i of `g` becomes node perm[i].
Graph relabel(const Graph& g, const std::vector<std::size_t>& perm);

/// Edge-list text format: first non-comment line `N`, then one `i j` pair per
/// line. `#` starts a comment.
Graph read_edge_list(std::istream& in, const std::string& source = "<stream>");
Graph load_edge_list(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

/// L = D - A, dense.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  for (const auto& [i, j] : g.edges()) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    L(a, a) += Scalar(1);
    L(b, b) += Scalar(1);
    L(a, b) -= Scalar(1);
    L(b, a) -= Scalar(1);
  }
  return L;
}

Eigen::SparseMatrix<double> sparse_laplacian(const Graph& g);

template <typename Scalar = double>
struct LaplacianSpectrum {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> eigenvalues;  // ascending
  Scalar lambda2{0};
  Scalar lambdaN{0};
  // Unit eigenvector for lambda2 (Fiedler vector); empty when N == 1.
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fiedler_vector;

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Spectrum of a symmetric matrix with zero row sums (a Laplacian).
/// For N == 1 both lambda2 and lambdaN are 0.
template <typename Derived>
LaplacianSpectrum<typename Derived::Scalar> spectrum(const Eigen::MatrixBase<Derived>& L) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (L.rows() != L.cols() || L.rows() == 0) {
    throw ValidationError("spectrum: Laplacian must be square and non-empty");
  }
  const Matrix M = L;
  const Scalar scale = std::max(Scalar(1), M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw ValidationError("spectrum: matrix is not symmetric");
  }
  if (M.rowwise().sum().cwiseAbs().maxCoeff() > Scalar(1e-10) * scale) {
    throw ValidationError("spectrum: matrix rows do not sum to zero");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  if (solver.info() != Eigen::Success) {
    throw NumericError("spectrum: eigensolver did not converge (N=" + std::to_string(M.rows()) +
                       ", max|L_ij|=" + std::to_string(static_cast<double>(scale)) + ")");
  }
  LaplacianSpectrum<Scalar> s;
  s.eigenvalues = solver.eigenvalues();
  const auto n = s.eigenvalues.size();
  if (n >= 2) {
    s.lambda2 = s.eigenvalues(1);
    s.lambdaN = s.eigenvalues(n - 1);
    s.fiedler_vector = solver.eigenvectors().col(1);
  }
  return s;
}

template <typename Scalar = double>
LaplacianSpectrum<Scalar> graph_spectrum(const Graph& g) {
  return spectrum(laplacian<Scalar>(g));
}

// Default zero-eigenvalue tolerance: 1e-9 relative to lambdaN.
template <typename Scalar>
Scalar default_zero_tolerance(const LaplacianSpectrum<Scalar>& s) {
  return Scalar(1e-9) * s.lambdaN;
}

/// lambda2 > tol. A single node counts as connected.
template <typename Scalar>
bool is_connected(const LaplacianSpectrum<Scalar>& s, Scalar tol) {
  if (s.size() == 1) return true;
  return s.lambda2 > tol;
}

template <typename Scalar>
bool is_connected(const LaplacianSpectrum<Scalar>& s) {
  return is_connected(s, default_zero_tolerance(s));
}

}  // namespace stochsync
