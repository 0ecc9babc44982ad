#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "stochsync/sde.hpp"

namespace stochsync {

/// |e(t)| per recorded time, e_i = x_i - (1/N) sum_j x_j over all components.
Eigen::VectorXd sync_error(const Trajectory& traj);

/// max_i |x_i - mean| at the last recorded time.
double final_spread(const Trajectory& traj);

/// R = (<M^2> - <M>^2) / mean_i(<v_i^2> - <v_i>^2) for component `component`,
/// where M is the network mean and <.> the time average over t >= transient_cut.
/// Needs at least 100 samples in the window; throws NumericError when the
/// per-node variances vanish.
double order_parameter(const Trajectory& traj, std::size_t component, double transient_cut);

struct FitWindow {
  double t_start{0};
  double t_end{0};
};

inline constexpr std::size_t kMinFitSamples = 50;
inline constexpr double kLogClip = 1e-300;

/// Least-squares slope of log|err| against time over `window`, refitted after
/// dropping the lowest decile of residuals. Values are clipped at 1e-300; if
/// every value in the window is clipped the error has collapsed to zero and
/// -infinity is returned.
double lyapunov_fit(const Eigen::VectorXd& times, const Eigen::VectorXd& err, FitWindow window);

struct MetricsOptions {
  std::size_t component{0};
  std::optional<double> transient_cut;  // absolute time; default: first 30% of the span
};

inline constexpr double kDefaultTransientFraction = 0.3;

/// Sync errors at or below kRoundoffFloor * max(1, |X|_inf) count as collapsed.
inline constexpr double kRoundoffFloor = 1e-12;

struct MetricsReport {
  std::optional<double> order_parameter;  // empty when R is undefined (N < 2, flat signals)
  double lyapunov_estimate{0};
  FitWindow fit_window;
  double final_spread{0};
  double transient_cut{0};
};

/// The exponent is fitted over [transient_cut, T], truncated at the first
/// sample where the sync error reaches the round-off floor. If fewer than
/// kMinFitSamples remain the error has collapsed and the estimate is -inf.
MetricsReport compute_metrics(const Trajectory& traj, const MetricsOptions& options = {});

}  // namespace stochsync
