// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "property_checks.hpp"
#include "stochsync/brownian.hpp"
#include "stochsync/commands.hpp"
#include "stochsync/conditions.hpp"
#include "stochsync/config.hpp"
#include "stochsync/metrics.hpp"
#include "stochsync/models.hpp"
#include "stochsync/report.hpp"
#include "stochsync/sde.hpp"

using namespace stochsync;

namespace {

struct Verdict {
  bool pass{false};
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

const std::vector<double> kGammas{0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75, 2, 2.25, 2.5, 2.75, 3, 3.25, 3.5, 3.75, 4};

Eigen::VectorXd uniform_state(std::size_t dim, std::uint64_t seed, double lo, double hi) {
  auto rng = derive_engine(seed, kAuxiliaryStreamBase);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  for (auto& v : x) v = u(rng);
  return x;
}

// ---------------------------------------------------------------------------

Verdict fn_constant() {
  const double kf = kf_fn_closed_form(0.4, 2.8);
  return {kf >= 3.15 && kf <= 3.30, "K_f(b=0.4, c=2.8) = " + num(kf, 8) + " (required in [3.15, 3.30])"};
}

Verdict ddm_threshold() {
  const double l2_dense = graph_spectrum<double>(complete_multipartite_graph({2, 2, 1})).lambda2;
  const double l2_path = graph_spectrum<double>(path_graph(5)).lambda2;
  auto cert = [](double l2) {
    return check_theorem2({{keys::K_f, {1.0}},
                           {keys::K_g, {1.0}},
                           {keys::Kbar_g, {1.0}},
                           {keys::sigma, {1.0}},
                           {keys::lambda2, {l2}}});
  };
  const auto a = cert(l2_dense), b = cert(l2_path);
  const bool pass = a.rhs == 0.5 && b.rhs == 0.5 && l2_dense >= 3.0 - 1e-12 && a.verdict && !b.verdict;
  return {pass, "rhs = " + num(a.rhs) + "; K_{2,2,1}: lambda2 = " + num(l2_dense, 6) + ", " + a.verdict_text() +
                    "; P5: lambda2 = " + num(l2_path, 6) + ", margin " + num(b.margin) + ", " + b.verdict_text()};
}

Verdict ddm_experiment() {
  Eigen::VectorXd x0(5);
  x0 << 10.3469, 7.2689, -3.0344, 2.9387, -7.8728;
  const double T = 50.0, dt = 1e-3;
  const std::size_t steps = step_count(0.0, T, dt);
  auto run = [&](const Graph& g, std::vector<Eigen::VectorXd>& finals) {
    const auto sys = ddm_system(DDMParams{g});
    finals.assign(20, {});
    parallel_for(20, 0, [&](std::size_t k) {
      const auto traj = simulate(sys, x0, 0.0, T, dt, k + 1, steps);
      finals[k] = traj.states.row(traj.samples() - 1).transpose();
    });
  };
  std::vector<Eigen::VectorXd> dense, path;
  run(complete_multipartite_graph({2, 2, 1}), dense);
  run(path_graph(5), path);
  int agreed = 0, split = 0;
  for (const auto& x : dense) agreed += (x.array() - x.mean()).abs().maxCoeff() < 0.05;
  double path_spread = 0;
  for (const auto& x : path) {
    split += x.maxCoeff() - x.minCoeff() > 1.0;
    path_spread = std::max(path_spread, (x.array() - x.mean()).abs().maxCoeff());
  }
  const double consensus = path.front().mean();
  return {agreed >= 18 && split >= 15, "K_{2,2,1}: " + std::to_string(agreed) + "/20 with spread < 0.05 (need 18); P5: " +
                                           std::to_string(split) + "/20 split (need 15), largest final spread " +
                                           num(path_spread) + ", seed-1 consensus value " + num(consensus)};
}

ExperimentConfig fn_sweep_config(const std::string& model) {
  std::ostringstream yaml;
  yaml << "model: {name: " << model << ", nodes: 10, a: 0.7, b: 0.4, c: 2.8, gamma: 0}\n"
       << "integration: {t_end: 200, dt: 0.001, seed: 1, n_seeds: 5, record_stride: 20}\n"
       << "initial_state: {uniform: [-2, 2]}\n"
       << "metrics: {component: 0}\n"
       << "sweep: {parameter: gamma, values: [";
  for (std::size_t k = 0; k < kGammas.size(); ++k) yaml << (k ? ", " : "") << kGammas[k];
  yaml << "]}\n";
  return parse_config(yaml.str(), model + " sweep");
}

struct SweepStats {
  std::vector<double> mean_R;
  std::vector<double> median_lyapunov;
};

SweepStats summarise(const std::vector<SweepRow>& rows, std::size_t seeds) {
  SweepStats s;
  for (std::size_t v = 0; v < kGammas.size(); ++v) {
    std::vector<double> R, L;
    for (std::size_t k = 0; k < seeds; ++k) {
      R.push_back(rows[v * seeds + k].R);
      L.push_back(rows[v * seeds + k].lyapunov);
    }
    s.mean_R.push_back(mean(R));
    s.median_lyapunov.push_back(median(L));
  }
  return s;
}

std::string r_profile(const SweepStats& s) {
  std::string out;
  for (std::size_t v = 0; v < kGammas.size(); ++v) out += (v ? " " : "") + num(kGammas[v], 3) + ":" + num(s.mean_R[v], 3);
  return out;
}

Verdict fn_environment() {
  auto cfg = fn_sweep_config("fn_env");
  bool never_certified = true;
  double min_rhs = 1e300;
  for (double g : kGammas) {
    const auto c = certify(with_parameter(cfg, "gamma", g)).primary;
    never_certified = never_certified && c.lhs == 0.0 && c.rhs > 0.0 && !c.verdict;
    min_rhs = std::min(min_rhs, c.rhs);
  }
  const auto s = summarise(run_sweep(cfg, 0), cfg.integration.n_seeds);
  const double worst = *std::max_element(s.mean_R.begin(), s.mean_R.end());
  const bool below = worst < 0.9;
  return {never_certified && below, std::string("check: lhs = 0 < rhs (min rhs ") + num(min_rhs) + ") for all gamma: " +
                                        (never_certified ? "yes" : "no") + "; max mean R = " + num(worst, 3) +
                                        " (need < 0.9); mean R by gamma " + r_profile(s)};
}

Verdict fn_full_transition() {
  auto cfg = fn_sweep_config("fn_full");
  const auto s = summarise(run_sweep(cfg, 0), cfg.integration.n_seeds);
  const std::size_t hi = 15;  // gamma = 3.75
  const bool high = s.mean_R[hi] >= 0.9 && s.median_lyapunov[hi] < 0.0;
  const bool low = s.mean_R[0] < 0.9 && s.mean_R[1] < 0.9;
  const double kf = kf_fn_closed_form(0.4, 2.8);
  return {high && low, "gamma=3.75: mean R " + num(s.mean_R[hi], 3) + ", median lambda " + num(s.median_lyapunov[hi], 3) +
                           "; gamma=0: R " + num(s.mean_R[0], 3) + ", gamma=0.25: R " + num(s.mean_R[1], 3) +
                           "; analytic threshold sqrt(2K_f)/N = " + num(std::sqrt(2 * kf) / 10) +
                           " (lambda* = N), sqrt(2K_f) = " + num(std::sqrt(2 * kf)) + " (lambda* = 1); mean R by gamma " +
                           r_profile(s)};
}

Verdict designed_noise() {
  const Graph comm(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}, "two triangles");
  const auto layer = complete_graph(6);
  const double sigma = 1.0;
  const double l2 = graph_spectrum<double>(comm).lambda2;
  const auto d = design_noise_layer(0.0, sigma, l2, layer);
  const auto cert = check_theorem3({{keys::K_f, {0.0}},
                                    {keys::sigma, {sigma}},
                                    {keys::lambda2, {l2}},
                                    {keys::sigma_star, {d.sigma_star}},
                                    {keys::lambda2_star, {d.lambda2_star}},
                                    {keys::lambdaN_star, {d.lambdaN_star}}});
  const auto sys = linear_consensus_system(comm, sigma, NoiseLayer{layer, d.sigma_star});
  std::vector<double> lambdas(20);
  parallel_for(20, 0, [&](std::size_t k) {
    const auto traj = simulate(sys, uniform_state(6, k + 1, -2, 2), 0.0, 50.0, 1e-3, k + 1, 10);
    lambdas[k] = compute_metrics(traj).lyapunov_estimate;
  });
  const int negative = static_cast<int>(std::count_if(lambdas.begin(), lambdas.end(), [](double v) { return v < 0; }));
  const double expected = -0.5 * std::pow(d.sigma_star * d.lambda2_star, 2);
  return {d.sigma_star > 0 && cert.verdict && negative >= 18,
          "sigma* = " + num(d.sigma_star) + ", T3 margin " + num(cert.margin) + " (" + cert.verdict_text() + "); " +
              std::to_string(negative) + "/20 negative (need 18), median lambda " + num(median(lambdas)) +
              " vs -(sigma* lambda*)^2/2 = " + num(expected)};
}

Verdict integrator_order() {
  const double a = 2.0, b = 1.0, x0 = 1.0, T = 1.0;
  const std::size_t paths = 200, finest = 512;  // dt = 1/512
  const NetworkSystem sys(1, empty_graph(1), linear_drift(Eigen::MatrixXd::Constant(1, 1, a)), 0.0,
                          DiffusionSpec::shared_scalar([b](double, const Eigen::VectorXd& X, Eigen::VectorXd& g) { g = b * X; }));
  const std::vector<std::size_t> factors{8, 4, 2, 1};  // dt = 1/64 .. 1/512
  std::vector<double> err(factors.size(), 0.0);
  Eigen::VectorXd start(1);
  start << x0;
  for (std::size_t p = 0; p < paths; ++p) {
    const auto fine = sample_brownian(1000 + p, T / finest, finest, 1);
    const double exact = oracle::gbm_exact(x0, a, b, T, fine.increments.sum());
    for (std::size_t l = 0; l < factors.size(); ++l) {
      const auto traj = integrate(sys, start, 0.0, fine.coarsen(factors[l]), finest / factors[l]);
      err[l] += std::abs(traj.states(traj.samples() - 1, 0) - exact) / paths;
    }
  }
  bool pass = true;
  std::string ratios;
  for (std::size_t l = 0; l + 1 < err.size(); ++l) {
    const double r = err[l] / err[l + 1];
    pass = pass && r >= 1.25 && r <= 1.60;
    ratios += (l ? ", " : "") + num(r, 4);
  }
  return {pass, "strong errors " + num(err[0]) + " .. " + num(err.back()) + "; halving ratios " + ratios +
                    " (need each in [1.25, 1.60])"};
}

Verdict stability_calibration() {
  const double a = -1.0, b = 1.0, T = 100.0;
  const NetworkSystem sys(1, empty_graph(1), linear_drift(Eigen::MatrixXd::Constant(1, 1, a)), 0.0,
                          DiffusionSpec::shared_scalar([b](double, const Eigen::VectorXd& X, Eigen::VectorXd& g) { g = b * X; }));
  std::vector<double> est(50);
  parallel_for(50, 0, [&](std::size_t k) {
    const auto traj = simulate(sys, Eigen::VectorXd::Ones(1), 0.0, T, 1e-3, k + 1, 10);
    est[k] = lyapunov_fit(traj.times, traj.states.col(0).cwiseAbs(), {0.0, T});
  });
  const double m = mean(est), target = oracle::gbm_exponent(a, b);
  return {std::abs(m - target) <= 0.15, "mean lambda over 50 seeds " + num(m) + " vs a - b^2/2 = " + num(target) +
                                            " (tolerance 0.15)"};
}

Verdict property_suites() {
  const std::size_t n = 10000;
  const std::vector<std::pair<std::string, props::Outcome>> suites{
      {"rayleigh", props::rayleigh_bound(n, 11)},
      {"diffusion-on-manifold", props::diffusion_vanishes_on_manifold(n, 22)},
      {"quad-fn", props::quad_bound_fn(n, 33)},
      {"quad-ddm", props::quad_bound_ddm(n, 44)},
      {"monotonicity", props::certificate_monotonicity(n, 55)}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, o] : suites) {
    pass = pass && o.ok() && o.cases == n;
    detail += (detail.empty() ? "" : ", ") + name + " " + std::to_string(o.cases - o.failures) + "/" +
              std::to_string(o.cases);
    if (!o.ok()) detail += " [" + o.first_failure + "]";
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"FN closed-form constant", fn_constant},
      {"DDM threshold", ddm_threshold},
      {"DDM consensus experiment", ddm_experiment},
      {"FN environment coupling never synchronizes", fn_environment},
      {"FN full-coupling transition", fn_full_transition},
      {"designed noise layer round trip", designed_noise},
      {"EM strong order", integrator_order},
      {"stability oracle calibration", stability_calibration},
      {"property suites", property_suites}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
