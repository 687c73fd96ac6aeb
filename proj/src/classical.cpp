#include "lyap/classical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "lyap/errors.hpp"

namespace lyap {

namespace {

using Vec = std::array<double, 2>;

Jacobian jacobian_at(const DynamicalSystem& system, const Point& p) {
  const auto J = system.jacobian(p);
  if (!J) throw NotDifferentiable(system.name() + ": no derivative at " + p.label());
  return *J;
}

Vec push(const Jacobian& J, const Vec& v) {
  if (J.dim == 1) return {J.m[0] * v[0], 0.0};
  return {J.m[0] * v[0] + J.m[1] * v[1], J.m[2] * v[0] + J.m[3] * v[1]};
}

double norm(const Vec& v) { return std::hypot(v[0], v[1]); }

// One step of the frame: push forward, Gram-Schmidt, return the stretch factors.
std::array<double, 2> step(const Jacobian& J, std::array<Vec, 2>& frame, int k) {
  std::array<double, 2> stretch{1.0, 1.0};
  frame[0] = push(J, frame[0]);
  stretch[0] = norm(frame[0]);
  frame[0] = {frame[0][0] / stretch[0], frame[0][1] / stretch[0]};
  if (k == 2) {
    Vec w = push(J, frame[1]);
    const double proj = w[0] * frame[0][0] + w[1] * frame[0][1];
    w = {w[0] - proj * frame[0][0], w[1] - proj * frame[0][1]};
    stretch[1] = norm(w);
    frame[1] = {w[0] / stretch[1], w[1] / stretch[1]};
  }
  return stretch;
}

}  // namespace

ClassicalExponents jacobian_exponents(const DynamicalSystem& system, const Point& x, int n, int n_vectors) {
  if (n < 8) throw std::invalid_argument("jacobian_exponents: n must be >= 8");
  if (n_vectors < 1) throw std::invalid_argument("jacobian_exponents: n_vectors must be >= 1");
  const int dim = jacobian_at(system, x).dim;
  const int k = std::min(n_vectors, dim);

  // A fixed generic frame, not aligned with any eigendirection of the built-ins.
  std::array<Vec, 2> frame{Vec{0.8, 0.6}, Vec{-0.6, 0.8}};
  if (dim == 1) frame[0] = {1.0, 0.0};

  Point p = x;
  std::array<double, 2> sum{0.0, 0.0};
  for (int j = 0; j < 2 * n; ++j) {
    const auto stretch = step(jacobian_at(system, p), frame, k);
    if (j >= n) {
      sum[0] += std::log(stretch[0]);
      sum[1] += std::log(stretch[1]);
    }
    p = system.forward(p);
  }

  ClassicalExponents out;
  out.n_used = n;
  out.chi_max = sum[0] / n;
  out.chi_min = k == 2 ? sum[1] / n : out.chi_max;
  if (out.chi_min > out.chi_max) std::swap(out.chi_min, out.chi_max);
  return out;
}

ClassicalComparison compare(const ExponentReport& report, const ClassicalExponents& classical, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("compare: tol must be nonnegative");
  ClassicalComparison c;
  c.delta_max = std::abs(report.Lambda_plus - classical.chi_max);
  c.delta_min = std::abs(report.lambda_plus - classical.chi_min);
  c.tol = tol;
  c.pass = c.delta_max <= tol && c.delta_min <= tol;
  return c;
}

}  // namespace lyap
