#include "stochsync/brownian.hpp"

#include <cmath>

#include "stochsync/errors.hpp"

namespace stochsync {

std::mt19937_64 derive_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Eigen::MatrixXd BrownianPath::cumulative() const {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps) + 1,
                                            static_cast<Eigen::Index>(channels));
  for (Eigen::Index k = 0; k < increments.rows(); ++k) B.row(k + 1) = B.row(k) + increments.row(k);
  return B;
}

BrownianPath BrownianPath::coarsen(std::size_t factor) const {
  if (factor == 0 || steps % factor != 0) {
    throw ValidationError("coarsen: factor must divide the number of steps");
  }
  BrownianPath out;
  out.dt = dt * static_cast<double>(factor);
  out.steps = steps / factor;
  out.channels = channels;
  out.seed = seed;
  out.increments.resize(static_cast<Eigen::Index>(out.steps), static_cast<Eigen::Index>(channels));
  const auto f = static_cast<Eigen::Index>(factor);
  for (Eigen::Index k = 0; k < out.increments.rows(); ++k) {
    out.increments.row(k) = increments.middleRows(k * f, f).colwise().sum();
  }
  return out;
}

BrownianSource::BrownianSource(std::uint64_t seed, double dt, std::size_t channels)
    : normals_(channels), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0)) throw ValidationError("Brownian increments need dt > 0");
  if (channels == 0) throw ValidationError("Brownian increments need at least one channel");
  engines_.reserve(channels);
  for (std::size_t c = 0; c < channels; ++c) engines_.push_back(derive_engine(seed, c));
}

void BrownianSource::next(Eigen::Ref<Eigen::VectorXd> dW) {
  for (std::size_t c = 0; c < engines_.size(); ++c) {
    dW(static_cast<Eigen::Index>(c)) = sqrt_dt_ * normals_[c](engines_[c]);
  }
}

BrownianPath sample_brownian(std::uint64_t seed, double dt, std::size_t steps, std::size_t channels) {
  if (!(dt > 0)) throw ValidationError("sample_brownian: dt must be positive");
  if (steps == 0) throw ValidationError("sample_brownian: steps must be at least 1");
  if (channels == 0) throw ValidationError("sample_brownian: channels must be at least 1");
  BrownianSource source(seed, dt, channels);
  BrownianPath path;
  path.dt = dt;
  path.steps = steps;
  path.channels = channels;
  path.seed = seed;
  path.increments.resize(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(channels));
  Eigen::VectorXd dW(static_cast<Eigen::Index>(channels));
  for (Eigen::Index k = 0; k < path.increments.rows(); ++k) {
    source.next(dW);
    path.increments.row(k) = dW.transpose();
  }
  return path;
}

}  // namespace stochsync
