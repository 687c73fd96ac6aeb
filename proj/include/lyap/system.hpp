#pragma once

// Compact metric spaces with a homeomorphism, and the orbit / sampling
// machinery every estimator is built on.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lyap/point.hpp"
#include "lyap/rng.hpp"

namespace lyap {

/// Constants a system may know about itself.
struct SystemConstants {
  std::optional<double> expansivity;  // c > 0
  std::optional<double> lipschitz;    // K > 1, for both f and f^-1
  std::optional<double> adapted_k;
  std::optional<double> adapted_epsilon0;
};

/// A direction at x along which the dynamics has a known per-step growth
/// factor (forward or backward). Probes along it are spaced by that factor.
struct DistinguishedDirection {
  std::string label;
  double growth;  // > 1
};

/// Derivative of f at a point, 1x1 or 2x2 row-major.
struct Jacobian {
  int dim = 1;
  std::array<double, 4> m{};
};

class DynamicalSystem {
 public:
  virtual ~DynamicalSystem() = default;

  virtual std::string name() const = 0;
  virtual bool contains(const Point& p) const = 0;

  virtual Point forward(const Point& p) const = 0;
  virtual Point backward(const Point& p) const = 0;
  virtual double distance(const Point& p, const Point& q) const = 0;

  /// A point displaced from x by roughly r in a uniformly random direction.
  virtual Point perturb(const Point& x, double r, SeededStream& rng) const = 0;
  /// A point drawn from the whole space.
  virtual Point random_point(SeededStream& rng) const = 0;

  virtual std::vector<DistinguishedDirection> directions(const Point& /*x*/) const { return {}; }
  /// x displaced by r (in the system's metric, to first order) along directions(x)[index].
  virtual Point along(const Point& x, std::size_t index, double r) const;

  virtual std::optional<Jacobian> jacobian(const Point& /*x*/) const { return std::nullopt; }
  virtual SystemConstants constants() const { return {}; }
};

using SystemPtr = std::shared_ptr<const DynamicalSystem>;

/// Same dynamics as `base`, different distance function.
class MetricView final : public DynamicalSystem {
 public:
  using Metric = std::function<double(const Point&, const Point&)>;

  MetricView(SystemPtr base, std::string metric_label, Metric metric, SystemConstants constants);

  std::string name() const override;
  bool contains(const Point& p) const override { return base_->contains(p); }
  Point forward(const Point& p) const override { return base_->forward(p); }
  Point backward(const Point& p) const override { return base_->backward(p); }
  double distance(const Point& p, const Point& q) const override { return metric_(p, q); }
  Point perturb(const Point& x, double r, SeededStream& rng) const override { return base_->perturb(x, r, rng); }
  Point random_point(SeededStream& rng) const override { return base_->random_point(rng); }
  std::vector<DistinguishedDirection> directions(const Point& x) const override { return base_->directions(x); }
  Point along(const Point& x, std::size_t index, double r) const override { return base_->along(x, index, r); }
  std::optional<Jacobian> jacobian(const Point& x) const override { return base_->jacobian(x); }
  SystemConstants constants() const override { return constants_; }

  const DynamicalSystem& base() const { return *base_; }

 private:
  SystemPtr base_;
  std::string label_;
  Metric metric_;
  SystemConstants constants_;
};

/// f^n(p): forward for n > 0, backward for n < 0.
Point iterate(const DynamicalSystem& system, Point p, long n);

class OrbitSegment {
 public:
  OrbitSegment(const DynamicalSystem& system, const Point& base, int n_min, int n_max);

  const Point& base() const { return at(0); }
  int n_min() const { return n_min_; }
  int n_max() const { return n_max_; }
  const Point& at(int j) const { return images_.at(static_cast<std::size_t>(j - n_min_)); }
  const std::vector<Point>& images() const { return images_; }

 private:
  int n_min_;
  int n_max_;
  std::vector<Point> images_;
};

OrbitSegment orbit(const DynamicalSystem& system, const Point& p, int n_min, int n_max);

inline double distance(const DynamicalSystem& system, const Point& p, const Point& q) {
  return system.distance(p, q);
}

/// Flat unit-torus metric: least Euclidean distance over the 9 neighbouring
/// lattice translates of the coordinate difference.
double torus_distance(const Point& p, const Point& q);
/// Same, for an explicit difference vector (already reduced or not).
double torus_norm(double du, double dv);
/// Arc-length distance on the circle of length 2*pi.
double circle_distance(const Point& p, const Point& q);

struct SamplerParams {
  std::size_t count = 4096;
  std::uint64_t seed = 42;
  int probe_levels = 8;
  bool probes = true;
};

/// `count` random points y != x with 0 < d(x,y) <= radius (radii log-uniform
/// over [radius*1e-4, radius]), followed by probes along each distinguished
/// direction at radius * growth^-m, m = 1..probe_levels. Bitwise reproducible
/// for fixed arguments.
std::vector<Point> sample_near(const DynamicalSystem& system, const Point& x, double radius,
                               const SamplerParams& params);
std::vector<Point> sample_near(const DynamicalSystem& system, const Point& x, double radius, std::size_t count,
                               std::uint64_t seed);

}  // namespace lyap
