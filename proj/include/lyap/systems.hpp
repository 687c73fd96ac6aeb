#pragma once

// Built-in example systems:
//   ToralAutomorphism    hyperbolic linear map of the 2-torus
//   TorusWithHair        T^2 with one stable leaf lifted off the surface as a
//                        hair converging back onto it (connected, not locally
//                        connected, with a Lyapunov-stable point q)
//   NorthSouthCircle     conjugate of x -> mu*x through tan(theta/2)
//   IrrationalRotation   isometry, non-expansive control

#include <array>
#include <memory>

#include "lyap/system.hpp"

namespace lyap {

using IntMatrix2 = std::array<std::array<long long, 2>, 2>;
using Vec2 = std::array<double, 2>;

class ToralAutomorphism final : public DynamicalSystem {
 public:
  /// Throws NotHyperbolic unless det == 1 and |trace| > 2.
  explicit ToralAutomorphism(const IntMatrix2& matrix);

  std::string name() const override;
  bool contains(const Point& p) const override { return p.chart() == Chart::Torus2; }
  Point forward(const Point& p) const override;
  Point backward(const Point& p) const override;
  double distance(const Point& p, const Point& q) const override { return torus_distance(p, q); }
  Point perturb(const Point& x, double r, SeededStream& rng) const override;
  Point random_point(SeededStream& rng) const override;
  std::vector<DistinguishedDirection> directions(const Point& x) const override;
  Point along(const Point& x, std::size_t index, double r) const override;
  std::optional<Jacobian> jacobian(const Point& x) const override;
  SystemConstants constants() const override;

  const IntMatrix2& matrix() const { return a_; }
  /// |eigenvalue| > 1 and its reciprocal.
  double lambda_u() const { return static_cast<double>(lambda_u_); }
  double lambda_s() const { return static_cast<double>(1 / lambda_u_); }
  /// Signed eigenvalues (negative when trace < -2).
  double eigenvalue_u() const { return static_cast<double>(mu_u_); }
  double eigenvalue_s() const { return static_cast<double>(mu_s_); }
  /// Unit eigenvectors.
  Vec2 v_u() const { return {static_cast<double>(vu_[0]), static_cast<double>(vu_[1])}; }
  Vec2 v_s() const { return {static_cast<double>(vs_[0]), static_cast<double>(vs_[1])}; }
  const std::array<quad, 2>& v_u_quad() const { return vu_; }
  const std::array<quad, 2>& v_s_quad() const { return vs_; }
  /// Coordinates of (du, dv) in the eigenbasis (v_u, v_s).
  Vec2 eigen_coordinates(double du, double dv) const;
  /// Largest singular value of the matrix (equal for the inverse, det = 1).
  double operator_norm() const { return sigma_; }

  /// Translates x by displacement d (no rounding beyond the fixed-point grid).
  static Point translate(const Point& x, quad du, quad dv);

 private:
  IntMatrix2 a_;
  IntMatrix2 inv_;
  quad mu_u_, mu_s_, lambda_u_;
  std::array<quad, 2> vu_, vs_;
  std::array<double, 4> dual_;  // rows: u*, s*
  double sigma_;
};

std::shared_ptr<const ToralAutomorphism> make_toral(const IntMatrix2& matrix);

inline constexpr IntMatrix2 kCatMatrix{{{2, 3}, {3, 5}}};

/// X = T^2 with a hair: points are torus points (height 0) or hair points
/// gamma(t) with torus shadow frac(t * v_p) and height epsilon / (t^2 + 1).
/// v_p is the stable eigenvector of the base normalised to first component 1.
/// Distance is the product metric sqrt(d_T^2 + (h_p - h_q)^2).
class TorusWithHair final : public DynamicalSystem {
 public:
  static constexpr double kMinHeight = 1e-6;

  explicit TorusWithHair(std::shared_ptr<const ToralAutomorphism> base, double epsilon = 0.5);

  std::string name() const override;
  bool contains(const Point& p) const override;
  Point forward(const Point& p) const override;
  Point backward(const Point& p) const override;
  double distance(const Point& p, const Point& q) const override;
  Point perturb(const Point& x, double r, SeededStream& rng) const override;
  Point random_point(SeededStream& rng) const override;
  std::vector<DistinguishedDirection> directions(const Point& x) const override;
  Point along(const Point& x, std::size_t index, double r) const override;

  const ToralAutomorphism& base() const { return *base_; }
  double epsilon() const { return epsilon_; }
  /// Contraction factor of the hair parameter: t -> lambda * t.
  double lambda() const { return lambda_; }
  const Vec2& hair_direction() const { return vp_; }
  double hair_direction_norm() const { return vp_norm_; }
  double height(double t) const { return epsilon_ / (t * t + 1.0); }
  Point shadow(double t) const;
  /// The fixed point gamma(0).
  Point q() const { return Point::hair(0.0); }
  /// Random hair candidates stay within |t| <= t_max().
  double t_max() const;
  /// |d gamma / dt| at t.
  double hair_speed(double t) const;

 private:
  std::shared_ptr<const ToralAutomorphism> base_;
  double epsilon_;
  double lambda_;
  Vec2 vp_;
  std::array<quad, 2> vp_quad_;
  double vp_norm_;
};

/// lambda^n * t in closed form.
double hair_map(const TorusWithHair& system, double t, int n);
double hair_distance(const TorusWithHair& system, const Point& p, const Point& q);

/// theta -> 2 atan(mu tan(theta/2)): repelling fixed point 0 (derivative mu),
/// attracting fixed point pi (derivative 1/mu).
class NorthSouthCircle final : public DynamicalSystem {
 public:
  explicit NorthSouthCircle(double mu = 2.0);

  std::string name() const override;
  bool contains(const Point& p) const override { return p.chart() == Chart::Circle; }
  Point forward(const Point& p) const override;
  Point backward(const Point& p) const override;
  double distance(const Point& p, const Point& q) const override { return circle_distance(p, q); }
  Point perturb(const Point& x, double r, SeededStream& rng) const override;
  Point random_point(SeededStream& rng) const override;
  std::vector<DistinguishedDirection> directions(const Point& x) const override;
  Point along(const Point& x, std::size_t index, double r) const override;
  std::optional<Jacobian> jacobian(const Point& x) const override;
  SystemConstants constants() const override;

  double mu() const { return mu_; }
  double derivative(double theta) const;
  double inverse_derivative(double theta) const;
  /// max of f' and (f^-1)' over an n-point grid.
  double grid_lipschitz(int n = 1000) const;

 private:
  Point apply(const Point& p, double scale) const;

  double mu_;
  double lipschitz_;
};

class IrrationalRotation final : public DynamicalSystem {
 public:
  /// Angle in radians; default (sqrt(5) - 1) * pi.
  IrrationalRotation();
  explicit IrrationalRotation(double alpha);

  std::string name() const override;
  bool contains(const Point& p) const override { return p.chart() == Chart::Circle; }
  Point forward(const Point& p) const override { return Point::circle(p.turn() + step_); }
  Point backward(const Point& p) const override { return Point::circle(p.turn() - step_); }
  double distance(const Point& p, const Point& q) const override { return circle_distance(p, q); }
  Point perturb(const Point& x, double r, SeededStream& rng) const override;
  Point random_point(SeededStream& rng) const override;
  std::optional<Jacobian> jacobian(const Point& x) const override;
  SystemConstants constants() const override;

  double alpha() const { return alpha_; }

 private:
  double alpha_;
  Phase step_;
};

}  // namespace lyap
