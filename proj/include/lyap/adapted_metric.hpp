#pragma once

// Hyperbolic adapted metrics: a distance d for which, below some scale eps0,
// every pair is pushed apart by a factor k > 1 under f or under f^-1.
//
// Linear toral maps get one exactly: the max-norm in eigen-coordinates.
// For other systems an approximation is built on a finite cloud from
// expansivity (separation) times and chain metrization.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lyap/system.hpp"
#include "lyap/systems.hpp"

namespace lyap {

enum class AdaptedMode { EigenExact, ExpansivityChain };

struct AdaptedMetricSpec {
  AdaptedMode mode = AdaptedMode::EigenExact;
  double k = 0.0;
  double epsilon0 = 0.0;
  // ExpansivityChain only
  double expansivity_c = 0.0;
  int horizon = 0;
  std::size_t cloud_size = 0;

  /// Throws std::invalid_argument if k <= 1 or epsilon0 <= 0.
  void validate() const;
};

struct HyperbolicityReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double empirical_k = 0.0;
  double lipschitz_K = 0.0;
  double epsilon0 = 0.0;
};

/// max(|<w,u*>|, |<w,s*>|) minimised over the 9 lattice translates of the
/// coordinate difference w, with (u*, s*) dual to the unit eigenvectors.
double eigen_adapted_distance(const ToralAutomorphism& system, const Point& p, const Point& q);

/// A quarter of the shortest nonzero lattice vector measured in the eigen norm.
double eigen_epsilon0(const ToralAutomorphism& system);

/// {EigenExact, k = lambda_u, eps0 = eigen_epsilon0}.
AdaptedMetricSpec eigen_metric_spec(const ToralAutomorphism& system);

/// The toral system re-metrized with eigen_adapted_distance. Constants carry
/// k, eps0 and Lipschitz constant lambda_u.
SystemPtr with_eigen_metric(std::shared_ptr<const ToralAutomorphism> system);

struct ExpansivityTime {
  int steps = 0;
  bool infinite = false;

  friend bool operator==(const ExpansivityTime&, const ExpansivityTime&) = default;
};

/// Largest n in [0, horizon] with dist(f^j p, f^j q) <= c for all |j| <= n;
/// `infinite` when that holds through the whole horizon. Pairs already
/// further apart than c report 0.
ExpansivityTime expansivity_time(const DynamicalSystem& system, const Point& p, const Point& q, double c,
                                 int horizon);

/// Dense symmetric table of pairwise distances.
class DistanceTable {
 public:
  DistanceTable() = default;
  explicit DistanceTable(std::size_t n) : n_(n), d_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  double& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }
  const std::vector<double>& data() const { return d_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_;
};

inline constexpr std::size_t kMaxChainCloud = 5000;

/// Shortest-path (chain) metric on the complete graph over the cloud with
/// edge weights D(i, j). Throws CloudTooLarge beyond kMaxChainCloud points.
DistanceTable chain_metric(std::span<const Point> cloud, const std::function<double(std::size_t, std::size_t)>& D);

/// D(p, q) = k_target^-expansivity_time(p, q); 0 for infinite pairs.
struct ExpansivityPseudometric {
  DistanceTable table;
  std::size_t infinite_pairs = 0;
};

ExpansivityPseudometric expansivity_pseudometric(const DynamicalSystem& system, std::span<const Point> cloud,
                                                 double c, int horizon, double k_target);

/// Samples n_pairs pairs (0 < d < eps0) in the system's own metric, counts
/// violations of max{d(fx,fy), d(f^-1x,f^-1y)} >= min{k d(x,y), eps0} and
/// records the largest violation-free k and the largest one-step distortion.
HyperbolicityReport verify_hyperbolic_inequality(const DynamicalSystem& system, const AdaptedMetricSpec& spec,
                                                 std::size_t n_pairs, std::uint64_t seed);

/// Result of building the chain metric on a cloud made of orbit segments, so
/// that f and f^-1 map most cloud points into the cloud.
struct ChainMetricReport {
  std::size_t cloud_size = 0;
  std::size_t infinite_pairs = 0;
  std::size_t pairs_tested = 0;
  std::size_t violations = 0;
  double max_chain_over_base = 0.0;  // <= 1 by construction
  double empirical_k = 0.0;
};

/// Cloud = orbits f^j(b), |j| <= half_orbit, of `bases` random points.
ChainMetricReport verify_chain_metric(const DynamicalSystem& system, const AdaptedMetricSpec& spec,
                                      std::size_t bases, int half_orbit, std::uint64_t seed);

}  // namespace lyap
