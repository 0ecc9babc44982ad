#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace stochsync {

// Stream ids at or above this value are reserved for non-Brownian draws
// (random initial conditions, sampling boxes).
inline constexpr std::uint64_t kAuxiliaryStreamBase = 0xFFFF'0000'0000'0000ULL;

/// Engine for stream `stream` of master seed `seed`. Distinct (seed, stream)
/// pairs give independent generators; the mapping is fixed, so results do not
/// depend on how work is split across threads.
std::mt19937_64 derive_engine(std::uint64_t seed, std::uint64_t stream);

/// Brownian increments on a uniform grid. Row k holds B(t_{k+1}) - B(t_k).
struct BrownianPath {
  double dt{0};
  std::size_t steps{0};
  std::size_t channels{0};
  std::uint64_t seed{0};
  Eigen::MatrixXd increments;  // steps x channels

  /// B(t_k) for k = 0..steps; row 0 is zero.
  Eigen::MatrixXd cumulative() const;

  /// Same path on a grid `factor` times coarser (sums consecutive increments).
  BrownianPath coarsen(std::size_t factor) const;
};

/// Draws increments one step at a time; channel c uses stream c.
class BrownianSource {
 public:
  BrownianSource(std::uint64_t seed, double dt, std::size_t channels);

  std::size_t channels() const { return engines_.size(); }
  void next(Eigen::Ref<Eigen::VectorXd> dW);

 private:
  std::vector<std::mt19937_64> engines_;
  std::vector<std::normal_distribution<double>> normals_;
  double sqrt_dt_;
};

/// steps x channels i.i.d. N(0, dt) increments; bit-identical for identical
/// arguments, and identical to what BrownianSource yields step by step.
BrownianPath sample_brownian(std::uint64_t seed, double dt, std::size_t steps, std::size_t channels);

}  // namespace stochsync
