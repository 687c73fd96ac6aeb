#pragma once

// Metric Lyapunov exponents at a point, built from Bowen balls
//   B*_x(delta, n) = { y != x : d(f^j x, f^j y) <= delta for j between 0 and n }
// and the extreme distortions over them
//   A_delta(x, n) = sup d(f^n x, f^n y) / d(x, y),  a_delta(x, n) = inf (same).
// Both are estimated on a finite candidate sample, so A_hat is a lower bound
// and a_hat an upper bound; probes along distinguished directions make them
// exact for linear systems.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyap/system.hpp"

namespace lyap {

struct DistortionEstimate {
  double A_hat = 0.0;
  double a_hat = 0.0;
  Point witness_max;
  Point witness_min;
  std::size_t in_ball_count = 0;
};

struct ExponentSample {
  int n = 0;
  double A_hat = 0.0;
  double a_hat = 0.0;
  double logA_over_n = 0.0;  // log(A_hat) / n, with n signed
  double loga_over_n = 0.0;
};

struct ExponentOptions {
  std::vector<double> delta_list{1e-1, 1e-2, 1e-3};
  int n_max = 10;
  SamplerParams sampler;

  /// Throws std::invalid_argument unless delta_list is strictly decreasing
  /// and positive and n_max >= 4.
  void validate() const;
};

inline constexpr double kConvergenceTolerance = 0.05;

/// Exponents for one delta, read off at |n| = n_max.
struct DeltaRun {
  double delta = 0.0;
  std::vector<ExponentSample> forward;   // n = 1..n_max
  std::vector<ExponentSample> backward;  // n = -1..-n_max
  double Lambda_plus = 0.0;
  double lambda_plus = 0.0;
  double Lambda_minus = 0.0;
  double lambda_minus = 0.0;
  double oscillation = 0.0;  // max |consecutive difference| over the last 3 n
  bool converged = false;
  double duality_upper = 0.0;  // |Lambda_plus + lambda_minus|
  double duality_lower = 0.0;  // |lambda_plus + Lambda_minus|
};

struct ExponentReport {
  std::string system;
  std::string point;
  std::vector<DeltaRun> runs;
  // Values at the smallest delta whose run converged (the smallest delta
  // overall if none did; converged is false then).
  double Lambda_plus = 0.0;
  double lambda_plus = 0.0;
  double Lambda_minus = 0.0;
  double lambda_minus = 0.0;
  double limit_delta = 0.0;
  bool converged = false;
};

/// Probe depth needed for an |n| <= n_max run: unstable probes must survive n_max steps.
SamplerParams estimator_sampler(const SamplerParams& base, int n_max);

std::vector<Point> bowen_filter(const DynamicalSystem& system, const Point& x, double delta, int n,
                                std::span<const Point> candidates);

/// Throws EmptyBowenSample when nothing survives; n must be nonzero.
DistortionEstimate distortion(const DynamicalSystem& system, const Point& x, double delta, int n,
                              std::span<const Point> candidates);

/// n_list strictly increasing positive or strictly decreasing negative.
/// One candidate sample (radius delta) is filtered progressively, so the sets
/// are nested in n.
std::vector<ExponentSample> exponent_sequence(const DynamicalSystem& system, const Point& x, double delta,
                                              std::span<const int> n_list, const SamplerParams& sampler);

/// Same, on an explicit candidate set.
std::vector<ExponentSample> exponent_sequence(const DynamicalSystem& system, const Point& x, double delta,
                                              std::span<const int> n_list, std::span<const Point> candidates);

ExponentReport point_exponents(const DynamicalSystem& system, const Point& x, const ExponentOptions& options);

/// |a_hat(x, n) * A_hat(f^n x, -n) - 1| with the second factor computed on the
/// images f^n(C) of the first factor's candidates C. n > 0.
double mirrored_duality_check(const DynamicalSystem& system, const Point& x, double delta, int n,
                              std::span<const Point> candidates);

/// max over 1 <= |n| <= n_max of |log A_hat(x, n)| - |n| log K. Nonpositive
/// means the pointwise bound log A <= |n| log K holds on the sample.
double lipschitz_bound_check(const DynamicalSystem& system, const Point& x, double delta, int n_max,
                             double lipschitz_K, const SamplerParams& sampler);

/// The system's own Lipschitz constant if it knows one, otherwise the largest
/// one-step distortion seen on n_pairs sampled pairs at scale below `scale`.
double lipschitz_constant(const DynamicalSystem& system, std::size_t n_pairs = 10000, std::uint64_t seed = 42,
                          double scale = 0.1);

}  // namespace lyap
