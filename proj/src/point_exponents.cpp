#include "lyap/point_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lyap/adapted_metric.hpp"
#include "lyap/detail/tracks.hpp"
#include "lyap/errors.hpp"

namespace lyap {

namespace {

using detail::Track;

// Orbit of x in one direction: x_j = f^(sign*j) x, j = 0..steps.
std::vector<Point> one_sided_orbit(const DynamicalSystem& system, const Point& x, int steps, int sign) {
  std::vector<Point> out{x};
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j < steps; ++j) out.push_back(sign > 0 ? system.forward(out.back()) : system.backward(out.back()));
  return out;
}

std::vector<Track> point_tracks(const DynamicalSystem& system, const Point& x, double delta, int steps, int sign,
                                std::span<const Point> candidates) {
  if (!(delta > 0.0)) throw InvalidRadius(delta);
  const auto xs = one_sided_orbit(system, x, steps, sign);
  auto gauge = [&](int j, const Point& y) { return system.distance(xs[static_cast<std::size_t>(j)], y); };
  return detail::follow_all(system, candidates, steps, sign, delta, gauge);
}

ExponentSample sample_row(int n, double A, double a) {
  return {n, A, a, std::log(A) / n, std::log(a) / n};
}

void check_n_list(std::span<const int> n_list) {
  if (n_list.empty()) throw std::invalid_argument("exponent_sequence: empty n list");
  const int sign = n_list.front() > 0 ? 1 : -1;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    const bool ok = n_list[i] * sign > 0 && (i == 0 || (n_list[i] - n_list[i - 1]) * sign > 0);
    if (!ok) throw std::invalid_argument("exponent_sequence: n list must be strictly monotone away from 0");
  }
}

std::vector<ExponentSample> rows_from_tracks(const std::vector<Track>& tracks, std::span<const int> n_list,
                                             double delta) {
  std::vector<ExponentSample> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    const auto e = detail::extremes_at(tracks, std::abs(n));
    if (!e) throw EmptyBowenSample(n, delta);
    rows.push_back(sample_row(n, e->max_ratio, e->min_ratio));
  }
  return rows;
}

double tail_oscillation(const std::vector<ExponentSample>& rows) {
  double worst = 0.0;
  const std::size_t m = rows.size();
  for (std::size_t i = m >= 3 ? m - 2 : 1; i < m; ++i) {
    worst = std::max(worst, std::abs(rows[i].logA_over_n - rows[i - 1].logA_over_n));
    worst = std::max(worst, std::abs(rows[i].loga_over_n - rows[i - 1].loga_over_n));
  }
  return worst;
}

}  // namespace

void ExponentOptions::validate() const {
  if (delta_list.empty()) throw std::invalid_argument("delta_list must not be empty");
  for (std::size_t i = 0; i < delta_list.size(); ++i) {
    if (!(delta_list[i] > 0.0)) throw std::invalid_argument("delta_list entries must be positive");
    if (i > 0 && !(delta_list[i] < delta_list[i - 1]))
      throw std::invalid_argument("delta_list must be strictly decreasing");
  }
  if (n_max < 4) throw std::invalid_argument("n_max must be >= 4");
}

SamplerParams estimator_sampler(const SamplerParams& base, int n_max) {
  SamplerParams p = base;
  p.probe_levels = std::max(p.probe_levels, n_max + 2);
  return p;
}

std::vector<Point> bowen_filter(const DynamicalSystem& system, const Point& x, double delta, int n,
                                std::span<const Point> candidates) {
  const auto tracks = point_tracks(system, x, delta, std::abs(n), n >= 0 ? 1 : -1, candidates);
  std::vector<Point> out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].survived >= std::abs(n)) out.push_back(candidates[i]);
  }
  return out;
}

DistortionEstimate distortion(const DynamicalSystem& system, const Point& x, double delta, int n,
                              std::span<const Point> candidates) {
  if (n == 0) throw std::invalid_argument("distortion: n must be nonzero");
  const auto tracks = point_tracks(system, x, delta, std::abs(n), n > 0 ? 1 : -1, candidates);
  const auto e = detail::extremes_at(tracks, std::abs(n));
  if (!e) throw EmptyBowenSample(n, delta);
  return {e->max_ratio, e->min_ratio, candidates[e->arg_max], candidates[e->arg_min], e->count};
}

std::vector<ExponentSample> exponent_sequence(const DynamicalSystem& system, const Point& x, double delta,
                                              std::span<const int> n_list, std::span<const Point> candidates) {
  check_n_list(n_list);
  const int sign = n_list.front() > 0 ? 1 : -1;
  const auto tracks = point_tracks(system, x, delta, std::abs(n_list.back()), sign, candidates);
  return rows_from_tracks(tracks, n_list, delta);
}

std::vector<ExponentSample> exponent_sequence(const DynamicalSystem& system, const Point& x, double delta,
                                              std::span<const int> n_list, const SamplerParams& sampler) {
  check_n_list(n_list);
  const auto candidates = sample_near(system, x, delta, estimator_sampler(sampler, std::abs(n_list.back())));
  return exponent_sequence(system, x, delta, n_list, candidates);
}

ExponentReport point_exponents(const DynamicalSystem& system, const Point& x, const ExponentOptions& options) {
  options.validate();
  const int N = options.n_max;
  std::vector<int> fwd(static_cast<std::size_t>(N)), bwd(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    fwd[static_cast<std::size_t>(j)] = j + 1;
    bwd[static_cast<std::size_t>(j)] = -(j + 1);
  }
  const SamplerParams sampler = estimator_sampler(options.sampler, N);

  ExponentReport report;
  report.system = system.name();
  report.point = x.label();
  for (double delta : options.delta_list) {
    const auto candidates = sample_near(system, x, delta, sampler);
    DeltaRun run;
    run.delta = delta;
    run.forward = exponent_sequence(system, x, delta, fwd, candidates);
    run.backward = exponent_sequence(system, x, delta, bwd, candidates);
    run.Lambda_plus = run.forward.back().logA_over_n;
    run.lambda_plus = run.forward.back().loga_over_n;
    run.Lambda_minus = -run.backward.back().logA_over_n;
    run.lambda_minus = -run.backward.back().loga_over_n;
    run.oscillation = std::max(tail_oscillation(run.forward), tail_oscillation(run.backward));
    run.converged = run.oscillation < kConvergenceTolerance;
    run.duality_upper = std::abs(run.Lambda_plus + run.lambda_minus);
    run.duality_lower = std::abs(run.lambda_plus + run.Lambda_minus);
    report.runs.push_back(std::move(run));
  }

  const DeltaRun* chosen = &report.runs.back();
  for (auto it = report.runs.rbegin(); it != report.runs.rend(); ++it) {
    if (it->converged) {
      chosen = &*it;
      break;
    }
  }
  report.Lambda_plus = chosen->Lambda_plus;
  report.lambda_plus = chosen->lambda_plus;
  report.Lambda_minus = chosen->Lambda_minus;
  report.lambda_minus = chosen->lambda_minus;
  report.limit_delta = chosen->delta;
  report.converged = chosen->converged;
  return report;
}

double mirrored_duality_check(const DynamicalSystem& system, const Point& x, double delta, int n,
                              std::span<const Point> candidates) {
  if (n <= 0) throw std::invalid_argument("mirrored_duality_check: n must be positive");
  const auto forward = distortion(system, x, delta, n, candidates);
  std::vector<Point> images(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { images[i] = iterate(system, candidates[i], n); });
  const auto backward = distortion(system, iterate(system, x, n), delta, -n, images);
  return std::abs(forward.a_hat * backward.A_hat - 1.0);
}

double lipschitz_bound_check(const DynamicalSystem& system, const Point& x, double delta, int n_max,
                             double lipschitz_K, const SamplerParams& sampler) {
  if (!(lipschitz_K > 0.0)) throw std::invalid_argument("lipschitz_bound_check: K must be positive");
  if (n_max < 1) throw std::invalid_argument("lipschitz_bound_check: n_max must be >= 1");
  const auto candidates = sample_near(system, x, delta, estimator_sampler(sampler, n_max));
  const double logK = std::log(lipschitz_K);
  double worst = -std::numeric_limits<double>::infinity();
  for (int sign : {1, -1}) {
    const auto tracks = point_tracks(system, x, delta, n_max, sign, candidates);
    for (int n = 1; n <= n_max; ++n) {
      const auto e = detail::extremes_at(tracks, n);
      if (!e) break;
      worst = std::max(worst, std::abs(std::log(e->max_ratio)) - n * logK);
    }
  }
  return worst;
}

double lipschitz_constant(const DynamicalSystem& system, std::size_t n_pairs, std::uint64_t seed, double scale) {
  if (const auto known = system.constants().lipschitz) return *known;
  AdaptedMetricSpec probe;
  probe.k = 2.0;
  probe.epsilon0 = scale;
  return verify_hyperbolic_inequality(system, probe, n_pairs, seed).lipschitz_K;
}

}  // namespace lyap
