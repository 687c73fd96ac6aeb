#include "lyap/system.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lyap/errors.hpp"

namespace lyap {

Point DynamicalSystem::along(const Point& x, std::size_t, double) const {
  throw std::logic_error(name() + ": no distinguished directions at " + x.label());
}

MetricView::MetricView(SystemPtr base, std::string metric_label, Metric metric, SystemConstants constants)
    : base_(std::move(base)), label_(std::move(metric_label)), metric_(std::move(metric)), constants_(constants) {}

std::string MetricView::name() const { return base_->name() + "/" + label_; }

Point iterate(const DynamicalSystem& system, Point p, long n) {
  for (; n > 0; --n) p = system.forward(p);
  for (; n < 0; ++n) p = system.backward(p);
  return p;
}

OrbitSegment::OrbitSegment(const DynamicalSystem& system, const Point& base, int n_min, int n_max)
    : n_min_(n_min), n_max_(n_max) {
  if (n_min > 0 || n_max < 0) throw std::invalid_argument("orbit: need n_min <= 0 <= n_max");
  images_.resize(static_cast<std::size_t>(n_max - n_min + 1));
  const auto zero = static_cast<std::size_t>(-n_min);
  images_[zero] = base;
  for (std::size_t i = zero; i + 1 < images_.size(); ++i) images_[i + 1] = system.forward(images_[i]);
  for (std::size_t i = zero; i > 0; --i) images_[i - 1] = system.backward(images_[i]);
}

OrbitSegment orbit(const DynamicalSystem& system, const Point& p, int n_min, int n_max) {
  return OrbitSegment(system, p, n_min, n_max);
}

double torus_norm(double du, double dv) {
  du -= std::nearbyint(du);
  dv -= std::nearbyint(dv);
  double best = std::numeric_limits<double>::infinity();
  for (int m = -1; m <= 1; ++m) {
    for (int k = -1; k <= 1; ++k) {
      best = std::min(best, std::hypot(du + m, dv + k));
    }
  }
  return best;
}

double torus_distance(const Point& p, const Point& q) {
  return torus_norm(signed_gap(p.pu(), q.pu()), signed_gap(p.pv(), q.pv()));
}

double circle_distance(const Point& p, const Point& q) {
  return std::abs(signed_gap(p.turn(), q.turn())) * kTwoPi;
}

std::vector<Point> sample_near(const DynamicalSystem& system, const Point& x, double radius,
                               const SamplerParams& params) {
  if (!(radius > 0.0)) throw InvalidRadius(radius);
  if (params.count < 1) throw std::invalid_argument("sample_near: count must be >= 1");

  std::vector<Point> out;
  out.reserve(params.count + 4 * static_cast<std::size_t>(params.probe_levels));

  for (std::size_t i = 0; i < params.count; ++i) {
    SeededStream rng(params.seed, i);
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      double r = rng.log_uniform(radius * 1e-4, radius);
      Point y = system.perturb(x, r, rng);
      // Chart directions are not exactly metric balls; shrink until inside.
      for (int shrink = 0; shrink < 8; ++shrink) {
        const double d = system.distance(x, y);
        if (d > 0.0 && d <= radius) {
          out.push_back(y);
          placed = true;
          break;
        }
        if (d == 0.0) break;
        r *= 0.999 * radius / d;
        y = system.perturb(x, r, rng);
      }
    }
    if (!placed) throw std::runtime_error("sample_near: could not place a candidate near " + x.label());
  }

  if (params.probes) {
    const auto dirs = system.directions(x);
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      double r = radius;
      for (int m = 1; m <= params.probe_levels; ++m) {
        r /= dirs[k].growth;
        Point y = system.along(x, k, r);
        const double d = system.distance(x, y);
        if (d > 0.0 && d <= radius) out.push_back(y);
      }
    }
  }
  return out;
}

std::vector<Point> sample_near(const DynamicalSystem& system, const Point& x, double radius, std::size_t count,
                               std::uint64_t seed) {
  SamplerParams p;
  p.count = count;
  p.seed = seed;
  return sample_near(system, x, radius, p);
}

}  // namespace lyap
