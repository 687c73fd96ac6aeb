#include "lyap/systems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "lyap/errors.hpp"

namespace lyap {

namespace {

quad quad_sqrt(quad x) {
  if (x <= 0) return 0;
  quad y = std::sqrt(static_cast<long double>(x));
  for (int i = 0; i < 3; ++i) y = (y + x / y) / 2;
  return y;
}

quad quad_abs(quad x) { return x < 0 ? -x : x; }

std::array<quad, 2> unit_eigenvector(const IntMatrix2& a, quad mu) {
  // (A - mu I) v = 0; b != 0 for every hyperbolic det-1 integer matrix
  std::array<quad, 2> v{static_cast<quad>(a[0][1]), mu - static_cast<quad>(a[0][0])};
  const quad n = quad_sqrt(v[0] * v[0] + v[1] * v[1]);
  return {v[0] / n, v[1] / n};
}

Phase random_turn(SeededStream& rng) {
  const u128 hi = rng.next();
  return Phase::from_raw((hi << 64) | rng.next());
}

const Phase kHalfTurn = Phase::from_raw(static_cast<u128>(1) << 127);

}  // namespace

// ---------------------------------------------------------------------------
// ToralAutomorphism

ToralAutomorphism::ToralAutomorphism(const IntMatrix2& matrix) : a_(matrix) {
  const long long det = a_[0][0] * a_[1][1] - a_[0][1] * a_[1][0];
  const long long tr = a_[0][0] + a_[1][1];
  if (det != 1) throw NotHyperbolic("NotHyperbolic: determinant is " + std::to_string(det) + ", expected 1");
  if (tr >= -2 && tr <= 2) throw NotHyperbolic("NotHyperbolic: |trace| = " + std::to_string(std::llabs(tr)) + " <= 2");

  inv_ = {{{a_[1][1], -a_[0][1]}, {-a_[1][0], a_[0][0]}}};

  const quad qtr = static_cast<quad>(tr);
  const quad root = quad_sqrt(qtr * qtr - 4);
  mu_u_ = (qtr + (tr > 0 ? root : -root)) / 2;
  mu_s_ = 1 / mu_u_;
  lambda_u_ = quad_abs(mu_u_);
  vu_ = unit_eigenvector(a_, mu_u_);
  vs_ = unit_eigenvector(a_, mu_s_);

  const double det_v = static_cast<double>(vu_[0] * vs_[1] - vs_[0] * vu_[1]);
  dual_ = {static_cast<double>(vs_[1]) / det_v, -static_cast<double>(vs_[0]) / det_v,
           -static_cast<double>(vu_[1]) / det_v, static_cast<double>(vu_[0]) / det_v};

  // singular values of a det-1 matrix: s + 1/s = sqrt(|A|_F^2 + 2)
  const double fro2 = static_cast<double>(a_[0][0] * a_[0][0] + a_[0][1] * a_[0][1] + a_[1][0] * a_[1][0] +
                                          a_[1][1] * a_[1][1]);
  const double s = std::sqrt(fro2 + 2.0);
  sigma_ = (s + std::sqrt(s * s - 4.0)) / 2.0;
}

std::string ToralAutomorphism::name() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "toral[%lld;%lld;%lld;%lld]", a_[0][0], a_[0][1], a_[1][0], a_[1][1]);
  return buf;
}

Point ToralAutomorphism::forward(const Point& p) const {
  return Point::torus(a_[0][0] * p.pu() + a_[0][1] * p.pv(), a_[1][0] * p.pu() + a_[1][1] * p.pv());
}

Point ToralAutomorphism::backward(const Point& p) const {
  return Point::torus(inv_[0][0] * p.pu() + inv_[0][1] * p.pv(), inv_[1][0] * p.pu() + inv_[1][1] * p.pv());
}

Point ToralAutomorphism::translate(const Point& x, quad du, quad dv) {
  return Point::torus(x.pu().shifted(du), x.pv().shifted(dv));
}

Point ToralAutomorphism::perturb(const Point& x, double r, SeededStream& rng) const {
  const double phi = rng.uniform(0.0, kTwoPi);
  return translate(x, static_cast<quad>(r * std::cos(phi)), static_cast<quad>(r * std::sin(phi)));
}

Point ToralAutomorphism::random_point(SeededStream& rng) const {
  const double u = rng.uniform();
  return Point::torus(u, rng.uniform());
}

std::vector<DistinguishedDirection> ToralAutomorphism::directions(const Point&) const {
  const double g = lambda_u();
  return {{"+unstable", g}, {"-unstable", g}, {"+stable", g}, {"-stable", g}};
}

Point ToralAutomorphism::along(const Point& x, std::size_t index, double r) const {
  const auto& v = index < 2 ? vu_ : vs_;
  const quad s = static_cast<quad>(index % 2 == 0 ? r : -r);
  return translate(x, s * v[0], s * v[1]);
}

std::optional<Jacobian> ToralAutomorphism::jacobian(const Point&) const {
  Jacobian j;
  j.dim = 2;
  j.m = {static_cast<double>(a_[0][0]), static_cast<double>(a_[0][1]), static_cast<double>(a_[1][0]),
         static_cast<double>(a_[1][1])};
  return j;
}

SystemConstants ToralAutomorphism::constants() const {
  SystemConstants c;
  c.lipschitz = sigma_;
  return c;
}

Vec2 ToralAutomorphism::eigen_coordinates(double du, double dv) const {
  return {dual_[0] * du + dual_[1] * dv, dual_[2] * du + dual_[3] * dv};
}

std::shared_ptr<const ToralAutomorphism> make_toral(const IntMatrix2& matrix) {
  return std::make_shared<const ToralAutomorphism>(matrix);
}

// ---------------------------------------------------------------------------
// TorusWithHair

TorusWithHair::TorusWithHair(std::shared_ptr<const ToralAutomorphism> base, double epsilon)
    : base_(std::move(base)), epsilon_(epsilon) {
  if (!base_) throw std::invalid_argument("TorusWithHair: null base");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("TorusWithHair: epsilon must lie in (0,1)");
  lambda_ = base_->eigenvalue_s();
  const auto& vs = base_->v_s_quad();
  vp_quad_ = {1, vs[1] / vs[0]};
  vp_ = {1.0, static_cast<double>(vp_quad_[1])};
  vp_norm_ = std::hypot(vp_[0], vp_[1]);
}

std::string TorusWithHair::name() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "torus_with_hair[%s;eps=%g]", base_->name().c_str(), epsilon_);
  return buf;
}

bool TorusWithHair::contains(const Point& p) const {
  return p.chart() == Chart::Torus2 || p.chart() == Chart::Hair;
}

Point TorusWithHair::forward(const Point& p) const {
  if (p.chart() == Chart::Hair) return Point::hair(p.t() * lambda_);
  return base_->forward(p);
}

Point TorusWithHair::backward(const Point& p) const {
  if (p.chart() == Chart::Hair) return Point::hair(p.t() / lambda_);
  return base_->backward(p);
}

Point TorusWithHair::shadow(double t) const {
  const quad qt = t;
  return Point::torus(Phase::from_quad(qt * vp_quad_[0]), Phase::from_quad(qt * vp_quad_[1]));
}

double TorusWithHair::t_max() const { return std::sqrt(epsilon_ / kMinHeight) - 1.0; }

double TorusWithHair::hair_speed(double t) const {
  const double s = 1.0 + t * t;
  const double dh = -2.0 * epsilon_ * t / (s * s);
  return std::sqrt(vp_norm_ * vp_norm_ + dh * dh);
}

double TorusWithHair::distance(const Point& p, const Point& q) const {
  const bool hp = p.chart() == Chart::Hair;
  const bool hq = q.chart() == Chart::Hair;
  if (!hp && !hq) return torus_distance(p, q);
  if (hp && hq) {
    const double tp = p.t();
    const double tq = q.t();
    const double dt = tp - tq;
    const double flat = torus_norm(dt * vp_[0], dt * vp_[1]);
    const double dh = epsilon_ * (tq - tp) * (tq + tp) / ((1.0 + tp * tp) * (1.0 + tq * tq));
    return std::hypot(flat, dh);
  }
  const Point& hair = hp ? p : q;
  const Point& flat_pt = hp ? q : p;
  return std::hypot(torus_distance(shadow(hair.t()), flat_pt), height(hair.t()));
}

Point TorusWithHair::perturb(const Point& x, double r, SeededStream& rng) const {
  if (x.chart() == Chart::Torus2) return base_->perturb(x, r, rng);
  const double h = height(x.t());
  if (h < r && rng.coin()) {
    // torus point below the hair, inside the r-ball
    const double flat = std::sqrt(r * r - h * h);
    return base_->perturb(shadow(x.t()), flat, rng);
  }
  const double step = r / hair_speed(x.t());
  double t = x.t() + (rng.coin() ? step : -step);
  const double cap = t_max();
  if (std::abs(x.t()) <= cap) t = std::clamp(t, -cap, cap);
  return Point::hair(t);
}

Point TorusWithHair::random_point(SeededStream& rng) const {
  if (rng.coin()) return base_->random_point(rng);
  const double t = rng.log_uniform(1e-3, t_max());
  return Point::hair(rng.coin() ? t : -t);
}

std::vector<DistinguishedDirection> TorusWithHair::directions(const Point& x) const {
  if (x.chart() == Chart::Torus2) return base_->directions(x);
  const double g = 1.0 / std::abs(lambda_);
  return {{"+hair", g}, {"-hair", g}};
}

Point TorusWithHair::along(const Point& x, std::size_t index, double r) const {
  if (x.chart() == Chart::Torus2) return base_->along(x, index, r);
  const double step = r / hair_speed(x.t());
  return Point::hair(index == 0 ? x.t() + step : x.t() - step);
}

double hair_map(const TorusWithHair& system, double t, int n) { return std::pow(system.lambda(), n) * t; }

double hair_distance(const TorusWithHair& system, const Point& p, const Point& q) { return system.distance(p, q); }

// ---------------------------------------------------------------------------
// NorthSouthCircle

NorthSouthCircle::NorthSouthCircle(double mu) : mu_(mu) {
  if (!(mu > 1.0)) throw std::invalid_argument("NorthSouthCircle: multiplier must exceed 1");
  lipschitz_ = grid_lipschitz(1000);
}

std::string NorthSouthCircle::name() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "north_south[mu=%g]", mu_);
  return buf;
}

// Conjugate of x -> scale*x through h(theta) = tan(theta/2), evaluated in
// whichever chart (around 0 or around pi) keeps the offset small.
Point NorthSouthCircle::apply(const Point& p, double scale) const {
  const double phi = signed_gap(p.turn(), Phase{}) * kTwoPi;
  if (std::abs(phi) <= kTwoPi / 4) {
    const double off = 2.0 * std::atan(scale * std::tan(phi / 2));
    return Point::circle(Phase{}.shifted(off / kTwoPi));
  }
  const double psi = signed_gap(p.turn(), kHalfTurn) * kTwoPi;
  const double off = 2.0 * std::atan(std::tan(psi / 2) / scale);
  return Point::circle(kHalfTurn.shifted(off / kTwoPi));
}

Point NorthSouthCircle::forward(const Point& p) const { return apply(p, mu_); }
Point NorthSouthCircle::backward(const Point& p) const { return apply(p, 1.0 / mu_); }

double NorthSouthCircle::derivative(double theta) const {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  return mu_ / (c * c + mu_ * mu_ * s * s);
}

double NorthSouthCircle::inverse_derivative(double theta) const {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  const double m = 1.0 / mu_;
  return m / (c * c + m * m * s * s);
}

double NorthSouthCircle::grid_lipschitz(int n) const {
  double k = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = kTwoPi * i / n;
    k = std::max({k, derivative(th), inverse_derivative(th)});
  }
  return k;
}

Point NorthSouthCircle::perturb(const Point& x, double r, SeededStream& rng) const {
  return Point::circle(x.turn().shifted((rng.coin() ? r : -r) / kTwoPi));
}

Point NorthSouthCircle::random_point(SeededStream& rng) const { return Point::circle(random_turn(rng)); }

std::vector<DistinguishedDirection> NorthSouthCircle::directions(const Point&) const {
  return {{"+", mu_}, {"-", mu_}};
}

Point NorthSouthCircle::along(const Point& x, std::size_t index, double r) const {
  return Point::circle(x.turn().shifted((index == 0 ? r : -r) / kTwoPi));
}

std::optional<Jacobian> NorthSouthCircle::jacobian(const Point& x) const {
  Jacobian j;
  j.dim = 1;
  j.m[0] = derivative(x.theta());
  return j;
}

SystemConstants NorthSouthCircle::constants() const {
  SystemConstants c;
  c.lipschitz = lipschitz_;
  return c;
}

// ---------------------------------------------------------------------------
// IrrationalRotation

IrrationalRotation::IrrationalRotation()
    : alpha_((std::sqrt(5.0) - 1.0) * kTwoPi / 2), step_(Phase::from_quad((quad_sqrt(5) - 1) / 2)) {}

IrrationalRotation::IrrationalRotation(double alpha) : alpha_(alpha), step_(Phase::from_double(alpha / kTwoPi)) {}

std::string IrrationalRotation::name() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "rotation[alpha=%.10g]", alpha_);
  return buf;
}

Point IrrationalRotation::perturb(const Point& x, double r, SeededStream& rng) const {
  return Point::circle(x.turn().shifted((rng.coin() ? r : -r) / kTwoPi));
}

Point IrrationalRotation::random_point(SeededStream& rng) const { return Point::circle(random_turn(rng)); }

std::optional<Jacobian> IrrationalRotation::jacobian(const Point&) const {
  Jacobian j;
  j.dim = 1;
  j.m[0] = 1.0;
  return j;
}

SystemConstants IrrationalRotation::constants() const {
  SystemConstants c;
  c.lipschitz = 1.0;
  return c;
}

}  // namespace lyap
