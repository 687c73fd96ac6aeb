#include "lyap/adapted_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lyap/errors.hpp"
#include "lyap/parallel.hpp"

namespace lyap {

namespace {

constexpr double kRelativeSlack = 1e-9;

double eigen_norm(const ToralAutomorphism& system, double du, double dv) {
  const Vec2 c = system.eigen_coordinates(du, dv);
  return std::max(std::abs(c[0]), std::abs(c[1]));
}

// A pair (p, q) with 0 < d(p, q) < limit drawn from the system's own sampler.
std::pair<Point, Point> draw_pair(const DynamicalSystem& system, double limit, std::uint64_t seed, std::size_t i) {
  SeededStream rng(seed, i);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Point p = system.random_point(rng);
    double r = rng.log_uniform(limit * 1e-4, limit);
    const auto dirs = system.directions(p);
    const bool use_direction = !dirs.empty() && i % 4 == 3;
    const std::size_t dir = use_direction ? rng.next() % dirs.size() : 0;
    for (int shrink = 0; shrink < 8; ++shrink) {
      const Point q = use_direction ? system.along(p, dir, r) : system.perturb(p, r, rng);
      const double d = system.distance(p, q);
      if (d > 0.0 && d < limit) return {p, q};
      if (d == 0.0) break;
      r *= 0.999 * limit / d;
    }
  }
  throw std::runtime_error("verify_hyperbolic_inequality: could not draw a close pair");
}

}  // namespace

void AdaptedMetricSpec::validate() const {
  if (!(k > 1.0)) throw std::invalid_argument("AdaptedMetricSpec: k must exceed 1");
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("AdaptedMetricSpec: epsilon0 must be positive");
  if (mode == AdaptedMode::ExpansivityChain) {
    if (!(expansivity_c > 0.0)) throw std::invalid_argument("AdaptedMetricSpec: expansivity constant must be positive");
    if (horizon < 1) throw std::invalid_argument("AdaptedMetricSpec: horizon must be >= 1");
  }
}

double eigen_adapted_distance(const ToralAutomorphism& system, const Point& p, const Point& q) {
  const double du = signed_gap(p.pu(), q.pu());
  const double dv = signed_gap(p.pv(), q.pv());
  double best = std::numeric_limits<double>::infinity();
  for (int m = -1; m <= 1; ++m) {
    for (int k = -1; k <= 1; ++k) best = std::min(best, eigen_norm(system, du + m, dv + k));
  }
  return best;
}

double eigen_epsilon0(const ToralAutomorphism& system) {
  double shortest = std::numeric_limits<double>::infinity();
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      if (i != 0 || j != 0) shortest = std::min(shortest, eigen_norm(system, i, j));
    }
  }
  return shortest / 4.0;
}

AdaptedMetricSpec eigen_metric_spec(const ToralAutomorphism& system) {
  AdaptedMetricSpec spec;
  spec.mode = AdaptedMode::EigenExact;
  spec.k = system.lambda_u();
  spec.epsilon0 = eigen_epsilon0(system);
  return spec;
}

SystemPtr with_eigen_metric(std::shared_ptr<const ToralAutomorphism> system) {
  SystemConstants c;
  c.lipschitz = system->lambda_u();
  c.adapted_k = system->lambda_u();
  c.adapted_epsilon0 = eigen_epsilon0(*system);
  const ToralAutomorphism* raw = system.get();
  return std::make_shared<const MetricView>(
      system, "eigen", [raw](const Point& p, const Point& q) { return eigen_adapted_distance(*raw, p, q); }, c);
}

ExpansivityTime expansivity_time(const DynamicalSystem& system, const Point& p, const Point& q, double c,
                                 int horizon) {
  if (!(c > 0.0)) throw std::invalid_argument("expansivity_time: c must be positive");
  if (horizon < 1) throw std::invalid_argument("expansivity_time: horizon must be >= 1");
  if (system.distance(p, q) > c) return {0, false};
  Point pf = p, qf = q, pb = p, qb = q;
  for (int n = 1; n <= horizon; ++n) {
    pf = system.forward(pf);
    qf = system.forward(qf);
    pb = system.backward(pb);
    qb = system.backward(qb);
    if (system.distance(pf, qf) > c || system.distance(pb, qb) > c) return {n - 1, false};
  }
  return {horizon, true};
}

DistanceTable chain_metric(std::span<const Point> cloud, const std::function<double(std::size_t, std::size_t)>& D) {
  const std::size_t n = cloud.size();
  if (n > kMaxChainCloud) throw CloudTooLarge(n);
  DistanceTable d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d.at(i, j) = i == j ? 0.0 : D(i, j);
  }
  // Floyd-Warshall; row k is unchanged during pass k because d(k,k) = 0.
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = d(i, k);
      double* row = &d.at(i, 0);
      const double* via = &d.at(k, 0);
      for (std::size_t j = 0; j < n; ++j) row[j] = std::min(row[j], dik + via[j]);
    }
  }
  return d;
}

ExpansivityPseudometric expansivity_pseudometric(const DynamicalSystem& system, std::span<const Point> cloud,
                                                 double c, int horizon, double k_target) {
  if (cloud.size() > kMaxChainCloud) throw CloudTooLarge(cloud.size());
  const std::size_t n = cloud.size();
  std::vector<OrbitSegment> orbits;
  orbits.reserve(n);
  for (const auto& p : cloud) orbits.emplace_back(system, p, -horizon, horizon);

  ExpansivityPseudometric out{DistanceTable(n), 0};
  std::vector<int> steps(n * n, 0);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      int s = -1;
      for (int m = 0; m <= horizon; ++m) {
        const bool inside = system.distance(orbits[i].at(m), orbits[j].at(m)) <= c &&
                            system.distance(orbits[i].at(-m), orbits[j].at(-m)) <= c;
        if (!inside) break;
        s = m;
      }
      steps[i * n + j] = s;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int s = steps[i * n + j];
      double value;
      if (s == horizon) {
        value = 0.0;
        ++out.infinite_pairs;
      } else {
        value = std::pow(k_target, -std::max(s, 0));
      }
      out.table.at(i, j) = value;
      out.table.at(j, i) = value;
    }
  }
  return out;
}

HyperbolicityReport verify_hyperbolic_inequality(const DynamicalSystem& system, const AdaptedMetricSpec& spec,
                                                 std::size_t n_pairs, std::uint64_t seed) {
  spec.validate();
  if (n_pairs < 1) throw std::invalid_argument("verify_hyperbolic_inequality: n_pairs must be >= 1");

  struct PairResult {
    double distortion;  // largest one-step ratio, forward or backward
    double k_bound;     // largest k this pair tolerates
    bool violated;
  };
  std::vector<PairResult> results(n_pairs);
  parallel_for(n_pairs, [&](std::size_t i) {
    const auto [p, q] = draw_pair(system, spec.epsilon0, seed, i);
    const double d = system.distance(p, q);
    const double d_fwd = system.distance(system.forward(p), system.forward(q));
    const double d_bwd = system.distance(system.backward(p), system.backward(q));
    const double spread = std::max(d_fwd, d_bwd);
    const double target = std::min(spec.k * d, spec.epsilon0);
    results[i] = {spread / d, spread >= spec.epsilon0 ? std::numeric_limits<double>::infinity() : spread / d,
                  spread < target * (1.0 - kRelativeSlack)};
  });

  HyperbolicityReport report;
  report.pairs = n_pairs;
  report.epsilon0 = spec.epsilon0;
  double k_min = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    report.lipschitz_K = std::max(report.lipschitz_K, r.distortion);
    k_min = std::min(k_min, r.k_bound);
    if (r.violated) ++report.violations;
  }
  report.empirical_k = std::min(k_min, report.lipschitz_K);
  return report;
}

ChainMetricReport verify_chain_metric(const DynamicalSystem& system, const AdaptedMetricSpec& spec,
                                      std::size_t bases, int half_orbit, std::uint64_t seed) {
  spec.validate();
  if (half_orbit < 1) throw std::invalid_argument("verify_chain_metric: half_orbit must be >= 1");
  const std::size_t span_len = static_cast<std::size_t>(2 * half_orbit + 1);

  std::vector<Point> cloud;
  cloud.reserve(bases * span_len);
  for (std::size_t b = 0; b < bases; ++b) {
    SeededStream rng(seed, b);
    const OrbitSegment seg(system, system.random_point(rng), -half_orbit, half_orbit);
    cloud.insert(cloud.end(), seg.images().begin(), seg.images().end());
  }
  if (cloud.size() > kMaxChainCloud) throw CloudTooLarge(cloud.size());

  const auto base = expansivity_pseudometric(system, cloud, spec.expansivity_c, spec.horizon, spec.k);
  const DistanceTable chain = chain_metric(cloud, [&](std::size_t i, std::size_t j) { return base.table(i, j); });

  ChainMetricReport report;
  report.cloud_size = cloud.size();
  report.infinite_pairs = base.infinite_pairs;
  report.empirical_k = std::numeric_limits<double>::infinity();

  const auto n = cloud.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (base.table(i, j) > 0.0) report.max_chain_over_base = std::max(report.max_chain_over_base, chain(i, j) / base.table(i, j));
    }
  }

  // Orbit position of a cloud index; f and f^-1 stay inside the cloud away from the ends.
  auto interior = [&](std::size_t i) {
    const auto pos = i % span_len;
    return pos > 0 && pos + 1 < span_len;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!interior(i)) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!interior(j)) continue;
      const double d = chain(i, j);
      if (!(d > 0.0) || d >= spec.epsilon0) continue;
      const double spread = std::max(chain(i + 1, j + 1), chain(i - 1, j - 1));
      ++report.pairs_tested;
      if (spread < std::min(spec.k * d, spec.epsilon0) * (1.0 - kRelativeSlack)) ++report.violations;
      if (spread < spec.epsilon0) report.empirical_k = std::min(report.empirical_k, spread / d);
    }
  }
  if (report.pairs_tested == 0 || !std::isfinite(report.empirical_k)) report.empirical_k = spec.k;
  return report;
}

}  // namespace lyap
