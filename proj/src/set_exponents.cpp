#include "lyap/set_exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lyap/detail/tracks.hpp"
#include "lyap/errors.hpp"

namespace lyap {

namespace {

using detail::Track;

std::vector<Track> set_tracks(const DynamicalSystem& system, const InvariantSet& K, double delta, int steps, int sign,
                              std::span<const Point> candidates) {
  if (!(delta > 0.0)) throw InvalidRadius(delta);
  auto gauge = [&](int, const Point& y) { return dist_to_set(system, K, y); };
  return detail::follow_all(system, candidates, steps, sign, delta, gauge);
}

std::vector<SetSample> set_rows(const std::vector<Track>& tracks, int N, int sign, double delta) {
  std::vector<SetSample> rows;
  rows.reserve(static_cast<std::size_t>(N));
  for (int n = 1; n <= N; ++n) {
    const auto e = detail::extremes_at(tracks, n);
    if (!e) throw EmptyBowenSample(sign * n, delta);
    rows.push_back({sign * n, e->max_ratio, e->min_ratio});
  }
  return rows;
}

double tail_oscillation(const std::vector<SetSample>& rows) {
  auto rate = [](double v, int n) { return std::log(v) / n; };
  double worst = 0.0;
  const std::size_t m = rows.size();
  for (std::size_t i = m >= 3 ? m - 2 : 1; i < m; ++i) {
    worst = std::max(worst, std::abs(rate(rows[i].A_hat, rows[i].n) - rate(rows[i - 1].A_hat, rows[i - 1].n)));
    worst = std::max(worst, std::abs(rate(rows[i].a_hat, rows[i].n) - rate(rows[i - 1].a_hat, rows[i - 1].n)));
  }
  return worst;
}

// Hair parameter whose height is h (h <= epsilon).
double hair_parameter_at_height(double epsilon, double h) { return std::sqrt(std::max(epsilon / h - 1.0, 0.0)); }

}  // namespace

InvariantSet InvariantSet::finite(std::vector<Point> points) {
  if (points.empty()) throw std::invalid_argument("invariant set: no points");
  InvariantSet K;
  K.kind_ = Kind::FinitePoints;
  K.points_ = std::move(points);
  return K;
}

InvariantSet InvariantSet::hair_space_torus(const TorusWithHair& system) {
  InvariantSet K;
  K.kind_ = Kind::WholeTorusInX;
  K.epsilon_ = system.epsilon();
  K.probe_growth_ = 1.0 / (system.lambda() * system.lambda());
  return K;
}

std::string InvariantSet::label() const {
  if (kind_ == Kind::WholeTorusInX) return "T2";
  std::string out = "{";
  for (std::size_t i = 0; i < points_.size(); ++i) out += (i ? ";" : "") + points_[i].label();
  return out + "}";
}

double InvariantSet::height_of(const Point& x) const {
  if (x.chart() != Chart::Hair) return 0.0;
  return epsilon_ / (x.t() * x.t() + 1.0);
}

double dist_to_set(const DynamicalSystem& system, const InvariantSet& K, const Point& x) {
  if (K.kind() == InvariantSet::Kind::WholeTorusInX) return K.height_of(x);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : K.points()) best = std::min(best, system.distance(p, x));
  return best;
}

bool check_invariance(const DynamicalSystem& system, const InvariantSet& K, double tol) {
  if (K.kind() == InvariantSet::Kind::WholeTorusInX) return dynamic_cast<const TorusWithHair*>(&system) != nullptr;
  for (const auto& p : K.points()) {
    if (dist_to_set(system, K, system.forward(p)) > tol) return false;
  }
  return true;
}

std::vector<Point> sample_near_set(const DynamicalSystem& system, const InvariantSet& K, double delta,
                                   const SamplerParams& sampler) {
  if (!(delta > 0.0)) throw InvalidRadius(delta);
  std::vector<Point> out;
  if (K.kind() == InvariantSet::Kind::FinitePoints) {
    const std::size_t m = K.points().size();
    for (std::size_t k = 0; k < m; ++k) {
      SamplerParams p = sampler;
      p.count = (sampler.count + m - 1) / m;
      p.seed = k == 0 ? sampler.seed : splitmix64(sampler.seed + k);
      for (auto& y : sample_near(system, K.points()[k], delta, p)) {
        if (dist_to_set(system, K, y) > 0.0) out.push_back(y);
      }
    }
    return out;
  }

  // Hair points by height. Random heights respect the sampler floor; the
  // probes below go deeper because forward Bowen balls around T^2 shrink by
  // lambda_u^2 per step.
  const double eps = K.epsilon();
  double lo = std::max(delta * 1e-4, TorusWithHair::kMinHeight);
  if (lo >= delta) lo = delta * 1e-4;
  out.reserve(sampler.count + 2 * static_cast<std::size_t>(sampler.probe_levels));
  for (std::size_t i = 0; i < sampler.count; ++i) {
    SeededStream rng(sampler.seed, i);
    const double h = rng.log_uniform(lo, delta);
    const double t = hair_parameter_at_height(eps, h);
    out.push_back(Point::hair(rng.coin() ? t : -t));
  }
  if (sampler.probes) {
    double h = delta;
    for (int m = 1; m <= sampler.probe_levels; ++m) {
      h /= K.probe_growth();
      const double t = hair_parameter_at_height(eps, h);
      out.push_back(Point::hair(t));
      out.push_back(Point::hair(-t));
    }
  }
  std::erase_if(out, [&](const Point& y) {
    const double d = dist_to_set(system, K, y);
    return !(d > 0.0 && d <= delta);
  });
  return out;
}

std::vector<Point> set_bowen_filter(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                                    std::span<const Point> candidates) {
  const auto tracks = set_tracks(system, K, delta, std::abs(n), n >= 0 ? 1 : -1, candidates);
  std::vector<Point> out;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (tracks[i].survived >= std::abs(n)) out.push_back(candidates[i]);
  }
  return out;
}

SetDistortion set_distortion(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                             std::span<const Point> candidates) {
  if (n == 0) throw std::invalid_argument("set_distortion: n must be nonzero");
  const auto tracks = set_tracks(system, K, delta, std::abs(n), n > 0 ? 1 : -1, candidates);
  const auto e = detail::extremes_at(tracks, std::abs(n));
  if (!e) throw EmptyBowenSample(n, delta);
  return {e->max_ratio, e->min_ratio, e->count};
}

double subadditivity_check(const DynamicalSystem& system, const InvariantSet& K, double delta,
                           std::span<const std::pair<int, int>> pairs, std::span<const Point> candidates) {
  if (pairs.empty()) return 0.0;
  int longest = 0, shift = 0;
  for (const auto& [n, k] : pairs) {
    if (n <= 0 || k <= 0) throw std::invalid_argument("subadditivity_check: n and k must be positive");
    longest = std::max(longest, n + k);
    shift = std::max(shift, n);
  }

  std::vector<Point> pool(candidates.begin(), candidates.end());
  std::vector<Point> layer = pool;
  for (int j = 1; j <= shift; ++j) {
    parallel_for(layer.size(), [&](std::size_t i) { layer[i] = system.forward(layer[i]); });
    pool.insert(pool.end(), layer.begin(), layer.end());
  }

  const auto base = set_tracks(system, K, delta, longest, 1, candidates);
  const auto pooled = set_tracks(system, K, delta, longest, 1, pool);
  auto log_A = [&](const std::vector<Track>& tracks, int n) {
    const auto e = detail::extremes_at(tracks, n);
    if (!e) throw EmptyBowenSample(n, delta);
    return std::log(e->max_ratio);
  };

  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [n, k] : pairs) {
    worst = std::max(worst, log_A(base, n + k) - log_A(base, n) - log_A(pooled, k));
  }
  return worst;
}

double set_mirrored_duality_check(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                                  std::span<const Point> candidates) {
  if (n <= 0) throw std::invalid_argument("set_mirrored_duality_check: n must be positive");
  const auto forward = set_distortion(system, K, delta, n, candidates);
  std::vector<Point> images(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { images[i] = iterate(system, candidates[i], n); });
  const auto backward = set_distortion(system, K, delta, -n, images);
  return std::abs(forward.a_hat * backward.A_hat - 1.0);
}

SetExponentReport set_exponents(const DynamicalSystem& system, const InvariantSet& K,
                                const ExponentOptions& options) {
  options.validate();
  const int N = options.n_max;
  const SamplerParams sampler = estimator_sampler(options.sampler, N);

  std::vector<std::pair<int, int>> pairs;
  for (int n = 1; n < N; ++n) {
    for (int k = 1; n + k <= N; ++k) pairs.emplace_back(n, k);
  }

  SetExponentReport report;
  report.system = system.name();
  report.set = K.label();
  for (double delta : options.delta_list) {
    const auto candidates = sample_near_set(system, K, delta, sampler);
    SetDeltaRun run;
    run.delta = delta;
    run.forward = set_rows(set_tracks(system, K, delta, N, 1, candidates), N, 1, delta);
    run.backward = set_rows(set_tracks(system, K, delta, N, -1, candidates), N, -1, delta);
    const auto& f = run.forward.back();
    const auto& b = run.backward.back();
    run.Lambda_plus = std::log(f.A_hat) / N;
    run.lambda_plus = std::log(f.a_hat) / N;
    run.Lambda_minus = std::log(b.A_hat) / N;
    run.lambda_minus = std::log(b.a_hat) / N;
    run.oscillation = std::max(tail_oscillation(run.forward), tail_oscillation(run.backward));
    run.converged = run.oscillation < kConvergenceTolerance;
    run.duality_upper = std::abs(run.Lambda_plus + run.lambda_minus);
    run.duality_lower = std::abs(run.lambda_plus + run.Lambda_minus);
    run.subadditivity = subadditivity_check(system, K, delta, pairs, candidates);
    report.runs.push_back(std::move(run));
  }

  const SetDeltaRun* chosen = &report.runs.back();
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

double empirical_basin_check(const DynamicalSystem& system, const InvariantSet& K, TimeDirection direction,
                             double delta_start, int n_steps, std::size_t n_probes, std::uint64_t seed) {
  if (!(delta_start > 0.0)) throw InvalidRadius(delta_start);
  if (n_probes == 0) return 0.0;
  SamplerParams p;
  p.count = 4 * n_probes;
  p.seed = seed;
  p.probes = false;
  const double target = delta_start / 100.0;
  // Candidate radii are log-uniform, so many start inside the target already;
  // only those that have something to prove count.
  std::vector<Point> probes;
  for (const auto& y : sample_near_set(system, K, delta_start, p)) {
    if (probes.size() == n_probes) break;
    if (dist_to_set(system, K, y) >= target) probes.push_back(y);
  }

  std::vector<char> reached(probes.size(), 0);
  parallel_for(probes.size(), [&](std::size_t i) {
    Point y = probes[i];
    for (int j = 0; j <= n_steps; ++j) {
      if (dist_to_set(system, K, y) < target) {
        reached[i] = 1;
        return;
      }
      if (j < n_steps) y = direction == TimeDirection::Forward ? system.forward(y) : system.backward(y);
    }
  });
  const auto hits = std::count(reached.begin(), reached.end(), 1);
  return probes.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(probes.size());
}

const char* set_label_name(SetLabel label) {
  switch (label) {
    case SetLabel::Attractor: return "Attractor";
    case SetLabel::Repeller: return "Repeller";
    case SetLabel::Neither: return "Neither";
    case SetLabel::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

SetLabel classify_exponents(const SetExponentReport& report, double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("classify: margin must be positive");
  if (!report.converged) return SetLabel::Inconclusive;
  const bool attracts = report.Lambda_plus < -margin;
  const bool repels = report.Lambda_minus < -margin;
  if (attracts && repels) return SetLabel::Inconclusive;
  if (attracts) return SetLabel::Attractor;
  if (repels) return SetLabel::Repeller;
  if (report.Lambda_plus > margin && report.Lambda_minus > margin) return SetLabel::Neither;
  return SetLabel::Inconclusive;
}

Classification classify(const DynamicalSystem& system, const InvariantSet& K, const SetExponentReport& report,
                        double margin, const BasinParams& basin) {
  Classification c;
  c.label = classify_exponents(report, margin);
  c.Lambda_plus = report.Lambda_plus;
  c.lambda_plus = report.lambda_plus;
  c.Lambda_minus = report.Lambda_minus;
  c.lambda_minus = report.lambda_minus;
  c.margin = margin;
  if (c.label == SetLabel::Attractor || c.label == SetLabel::Repeller) {
    const auto dir = c.label == SetLabel::Attractor ? TimeDirection::Forward : TimeDirection::Backward;
    c.basin_fraction =
        empirical_basin_check(system, K, dir, basin.delta_start, basin.n_steps, basin.n_probes, basin.seed);
  }
  return c;
}

}  // namespace lyap
