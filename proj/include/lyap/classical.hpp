#pragma once

// Derivative-based Lyapunov exponents for the smooth built-in systems, used
// to cross-check the metric exponents.

#include "lyap/point_exponents.hpp"
#include "lyap/system.hpp"

namespace lyap {

struct ClassicalExponents {
  double chi_max = 0.0;
  double chi_min = 0.0;
  int n_used = 0;
};

/// Evolves an orthonormal frame of n_vectors (1 or 2, capped at the dimension)
/// along the orbit of x, re-orthonormalising every step. The first n steps are
/// warm-up; the log stretch factors of the next n are averaged. Throws
/// NotDifferentiable when the system has no derivative at some orbit point.
ClassicalExponents jacobian_exponents(const DynamicalSystem& system, const Point& x, int n = 50, int n_vectors = 2);

struct ClassicalComparison {
  bool pass = false;
  double delta_max = 0.0;  // |Lambda_plus - chi_max|
  double delta_min = 0.0;  // |lambda_plus - chi_min|
  double tol = 0.0;
};

ClassicalComparison compare(const ExponentReport& report, const ClassicalExponents& classical, double tol);

}  // namespace lyap
