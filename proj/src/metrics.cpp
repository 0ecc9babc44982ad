#include "stochsync/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stochsync/errors.hpp"

namespace stochsync {

namespace {

Eigen::Index first_index_at_or_after(const Eigen::VectorXd& times, double t) {
  const auto* begin = times.data();
  const auto* end = begin + times.size();
  // Tolerate rounding in t0 + k*dt.
  const double slack = 1e-9 * std::max(1.0, std::abs(t));
  return static_cast<Eigen::Index>(std::lower_bound(begin, end, t - slack) - begin);
}

// Slope and intercept of y against x.
std::pair<double, double> least_squares(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const double mx = x.mean();
  const double my = y.mean();
  const Eigen::VectorXd dx = x.array() - mx;
  const double sxx = dx.squaredNorm();
  if (!(sxx > 0)) throw ValidationError("lyapunov_fit: window has no time extent");
  const double slope = dx.dot(y.array().matrix() - Eigen::VectorXd::Constant(y.size(), my)) / sxx;
  return {slope, my - slope * mx};
}

// Node deviations from the network mean, with the mean taken relative to
// node 0 so that identical node states give exactly zero.
void deviations(const Eigen::Ref<const Eigen::RowVectorXd>& row, Eigen::Index n, Eigen::Index N, Eigen::MatrixXd& dev) {
  dev.resize(n, N);
  for (Eigen::Index i = 0; i < N; ++i) dev.col(i) = (row.segment(i * n, n) - row.segment(0, n)).transpose();
  const Eigen::VectorXd shift = dev.rowwise().mean();
  dev.colwise() -= shift;
}

}  // namespace

Eigen::VectorXd sync_error(const Trajectory& traj) {
  if (traj.node_count < 2) throw ValidationError("sync_error needs at least two nodes");
  const auto n = static_cast<Eigen::Index>(traj.node_dim);
  const auto N = static_cast<Eigen::Index>(traj.node_count);
  Eigen::VectorXd out(traj.samples());
  Eigen::MatrixXd dev;
  for (Eigen::Index r = 0; r < traj.samples(); ++r) {
    deviations(traj.states.row(r), n, N, dev);
    out(r) = dev.norm();
  }
  return out;
}

double final_spread(const Trajectory& traj) {
  Eigen::MatrixXd dev;
  deviations(traj.states.row(traj.samples() - 1), static_cast<Eigen::Index>(traj.node_dim),
             static_cast<Eigen::Index>(traj.node_count), dev);
  return dev.colwise().norm().maxCoeff();
}

double order_parameter(const Trajectory& traj, std::size_t component, double transient_cut) {
  if (component >= traj.node_dim) throw ValidationError("order_parameter: component out of range");
  const Eigen::Index start = first_index_at_or_after(traj.times, transient_cut);
  const Eigen::Index count = traj.samples() - start;
  if (count < 100) {
    throw ValidationError("order_parameter: post-transient window holds " + std::to_string(count) +
                          " samples, need at least 100");
  }
  const auto N = static_cast<Eigen::Index>(traj.node_count);
  Eigen::MatrixXd v(count, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    v.col(i) = traj.states.col(traj.column(static_cast<std::size_t>(i), component)).tail(count);
  }
  const Eigen::VectorXd M = v.rowwise().mean();
  const double var_mean = (M.array() - M.mean()).square().mean();
  const Eigen::RowVectorXd node_mean = v.colwise().mean();
  const double mean_var = (v.rowwise() - node_mean).array().square().colwise().mean().mean();
  if (!(mean_var > 0)) throw NumericError("order_parameter: per-node variances vanish, R is undefined");
  return var_mean / mean_var;
}

double lyapunov_fit(const Eigen::VectorXd& times, const Eigen::VectorXd& err, FitWindow window) {
  if (times.size() != err.size()) throw ValidationError("lyapunov_fit: times and error differ in length");
  const Eigen::Index lo = first_index_at_or_after(times, window.t_start);
  Eigen::Index hi = lo;
  const double slack = 1e-9 * std::max(1.0, std::abs(window.t_end));
  while (hi < times.size() && times(hi) <= window.t_end + slack) ++hi;
  const Eigen::Index count = hi - lo;
  if (count < static_cast<Eigen::Index>(kMinFitSamples)) {
    throw ValidationError("lyapunov_fit: window holds " + std::to_string(count) + " samples, need at least " +
                          std::to_string(kMinFitSamples));
  }
  const Eigen::VectorXd t = times.segment(lo, count);
  const Eigen::VectorXd e = err.segment(lo, count);
  if ((e.array() <= kLogClip).all()) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd y = e.array().max(kLogClip).log();

  const auto [slope, intercept] = least_squares(t, y);
  const Eigen::VectorXd residual = y - (slope * t).array().matrix() - Eigen::VectorXd::Constant(count, intercept);

  // Drop the lowest decile of residuals (sharp dips of log|e|) and refit.
  std::vector<double> sorted(residual.data(), residual.data() + count);
  const auto cut_at = static_cast<std::size_t>(count / 10);
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(cut_at), sorted.end());
  const double cutoff = sorted[cut_at];
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index k = 0; k < count; ++k)
    if (residual(k) >= cutoff) keep.push_back(k);
  Eigen::VectorXd tk(static_cast<Eigen::Index>(keep.size())), yk(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    tk(static_cast<Eigen::Index>(k)) = t(keep[k]);
    yk(static_cast<Eigen::Index>(k)) = y(keep[k]);
  }
  return least_squares(tk, yk).first;
}

MetricsReport compute_metrics(const Trajectory& traj, const MetricsOptions& options) {
  MetricsReport report;
  const double t0 = traj.times(0);
  const double t_end = traj.times(traj.samples() - 1);
  report.transient_cut = options.transient_cut.value_or(t0 + kDefaultTransientFraction * (t_end - t0));
  if (report.transient_cut < t0 || report.transient_cut >= t_end) {
    throw ValidationError("transient cut lies outside the trajectory span");
  }
  report.fit_window = {report.transient_cut, t_end};
  report.final_spread = final_spread(traj);
  const Eigen::VectorXd err = sync_error(traj);

  // Stop the fit where the error reaches round-off; past that point log|e|
  // measures floating-point noise rather than the dynamics.
  const Eigen::Index lo = first_index_at_or_after(traj.times, report.transient_cut);
  Eigen::Index floor_hit = traj.samples();
  for (Eigen::Index k = lo; k < traj.samples(); ++k) {
    const double scale = std::max(1.0, traj.states.row(k).cwiseAbs().maxCoeff());
    if (err(k) <= kRoundoffFloor * scale) {
      floor_hit = k;
      break;
    }
  }
  if (floor_hit < traj.samples()) {
    if (floor_hit - lo < static_cast<Eigen::Index>(kMinFitSamples)) {
      report.fit_window.t_end = traj.times(floor_hit);
      report.lyapunov_estimate = -std::numeric_limits<double>::infinity();
    } else {
      report.fit_window.t_end = traj.times(floor_hit - 1);
      report.lyapunov_estimate = lyapunov_fit(traj.times, err, report.fit_window);
    }
  } else {
    report.lyapunov_estimate = lyapunov_fit(traj.times, err, report.fit_window);
  }
  try {
    report.order_parameter = order_parameter(traj, options.component, report.transient_cut);
  } catch (const NumericError&) {
    report.order_parameter.reset();
  }
  return report;
}

}  // namespace stochsync
