#pragma once

// Exponents of a compact invariant set K, from the distortion of the distance
// to K along orbits that stay within delta of K:
//   A_delta(K, n) = sup dist(K, f^n y) / dist(K, y),  a_delta(K, n) = inf.
// Negative forward growth makes K an attractor, negative backward growth a
// repeller.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lyap/point_exponents.hpp"
#include "lyap/system.hpp"
#include "lyap/systems.hpp"

namespace lyap {

class InvariantSet {
 public:
  enum class Kind { FinitePoints, WholeTorusInX };

  /// A finite union of periodic orbits; must be nonempty.
  static InvariantSet finite(std::vector<Point> points);
  /// The torus fiber T^2 inside the torus-with-hair space.
  static InvariantSet hair_space_torus(const TorusWithHair& system);

  Kind kind() const { return kind_; }
  const std::vector<Point>& points() const { return points_; }
  std::string label() const;
  /// Hair apex height (WholeTorusInX only).
  double epsilon() const { return epsilon_; }
  /// Height of the hair above T^2 (WholeTorusInX only).
  double height_of(const Point& x) const;
  /// Per-step growth of distance to K near it (WholeTorusInX: heights scale by lambda_u^2).
  double probe_growth() const { return probe_growth_; }

 private:
  Kind kind_ = Kind::FinitePoints;
  std::vector<Point> points_;
  double epsilon_ = 0.0;
  double probe_growth_ = 0.0;
};

double dist_to_set(const DynamicalSystem& system, const InvariantSet& K, const Point& x);

/// f(K) = K: finite sets must be permuted by f up to `tol`; WholeTorusInX needs
/// a torus-with-hair system.
bool check_invariance(const DynamicalSystem& system, const InvariantSet& K, double tol = 1e-10);

/// Candidates y not in K with 0 < dist(y, K) <= delta. Finite sets split the
/// count between their points; WholeTorusInX draws hair points by height and
/// adds height probes at delta * growth^-m, m = 1..probe_levels.
std::vector<Point> sample_near_set(const DynamicalSystem& system, const InvariantSet& K, double delta,
                                   const SamplerParams& sampler);

std::vector<Point> set_bowen_filter(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                                    std::span<const Point> candidates);

struct SetDistortion {
  double A_hat = 0.0;
  double a_hat = 0.0;
  std::size_t in_ball_count = 0;
};

/// Throws EmptyBowenSample when nothing survives; n must be nonzero.
SetDistortion set_distortion(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                             std::span<const Point> candidates);

/// max over pairs of log A(K, n+k) - log A(K, n) - log A(K, k). The first two
/// use `candidates`; the k-term uses their orbit pool C u f(C) u ... so that
/// every surviving f^n(y) is itself a candidate.
double subadditivity_check(const DynamicalSystem& system, const InvariantSet& K, double delta,
                           std::span<const std::pair<int, int>> pairs, std::span<const Point> candidates);

/// |a_hat(K, n) * A_hat(K, -n) - 1| with the second factor on f^n(C). n > 0.
double set_mirrored_duality_check(const DynamicalSystem& system, const InvariantSet& K, double delta, int n,
                                  std::span<const Point> candidates);

struct SetSample {
  int n = 0;
  double A_hat = 0.0;
  double a_hat = 0.0;
};

struct SetDeltaRun {
  double delta = 0.0;
  std::vector<SetSample> forward;
  std::vector<SetSample> backward;
  double Lambda_plus = 0.0;
  double lambda_plus = 0.0;
  double Lambda_minus = 0.0;
  double lambda_minus = 0.0;
  double oscillation = 0.0;
  bool converged = false;
  double duality_upper = 0.0;  // |Lambda_plus + lambda_minus|
  double duality_lower = 0.0;  // |lambda_plus + Lambda_minus|
  double subadditivity = 0.0;  // over all (n, k) with n + k <= n_max
};

struct SetExponentReport {
  std::string system;
  std::string set;
  std::vector<SetDeltaRun> runs;
  double Lambda_plus = 0.0;
  double lambda_plus = 0.0;
  double Lambda_minus = 0.0;
  double lambda_minus = 0.0;
  double limit_delta = 0.0;
  bool converged = false;
};

SetExponentReport set_exponents(const DynamicalSystem& system, const InvariantSet& K, const ExponentOptions& options);

enum class TimeDirection { Forward, Backward };

/// Fraction of n_probes points started within delta_start of K whose distance
/// to K drops below delta_start / 100 within n_steps (iterating f or f^-1).
double empirical_basin_check(const DynamicalSystem& system, const InvariantSet& K, TimeDirection direction,
                             double delta_start = 0.1, int n_steps = 200, std::size_t n_probes = 256,
                             std::uint64_t seed = 42);

enum class SetLabel { Attractor, Repeller, Neither, Inconclusive };
const char* set_label_name(SetLabel label);

struct Classification {
  SetLabel label = SetLabel::Inconclusive;
  double Lambda_plus = 0.0;
  double lambda_plus = 0.0;
  double Lambda_minus = 0.0;
  double lambda_minus = 0.0;
  std::optional<double> basin_fraction;  // forward for attractors, backward for repellers
  double margin = 0.1;
};

struct BasinParams {
  double delta_start = 0.1;
  int n_steps = 200;
  std::size_t n_probes = 256;
  std::uint64_t seed = 42;
};

/// Label from the exponents alone.
SetLabel classify_exponents(const SetExponentReport& report, double margin);

/// Label plus an empirical basin check in the matching time direction.
Classification classify(const DynamicalSystem& system, const InvariantSet& K, const SetExponentReport& report,
                        double margin = 0.1, const BasinParams& basin = {});

}  // namespace lyap
