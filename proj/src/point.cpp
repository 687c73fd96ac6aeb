#include "lyap/point.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lyap {

namespace {

const double kTwo128 = std::ldexp(1.0, 128);
const double kTwoM128 = std::ldexp(1.0, -128);
const quad kQuadTwo128 = static_cast<quad>(kTwo128);

}  // namespace

Phase Phase::from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("Phase: non-finite coordinate");
  double frac = x - std::floor(x);
  if (frac >= 1.0) frac = 0.0;  // x slightly below an integer
  return from_raw(static_cast<u128>(frac * kTwo128));
}

Phase Phase::from_quad(quad x) {
  // floor without libquadmath: the integer part fits in 64 bits for every use here
  const auto whole = static_cast<std::int64_t>(x);
  quad frac = x - static_cast<quad>(whole);
  if (frac < 0) frac += 1;
  if (frac >= 1) frac = 0;
  return from_raw(static_cast<u128>(frac * kQuadTwo128));
}

double Phase::value() const {
  const double v = static_cast<double>(raw_) * kTwoM128;
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

Phase Phase::shifted(double offset) const {
  return from_raw(raw_ + static_cast<u128>(static_cast<i128>(offset * kTwo128)));
}

Phase Phase::shifted(quad offset) const {
  return from_raw(raw_ + static_cast<u128>(static_cast<i128>(offset * kQuadTwo128)));
}

double signed_gap(Phase a, Phase b) {
  return static_cast<double>(static_cast<i128>(a.raw() - b.raw())) * kTwoM128;
}

const char* chart_name(Chart c) {
  switch (c) {
    case Chart::Torus2: return "torus";
    case Chart::Hair: return "hair";
    case Chart::Circle: return "circle";
  }
  return "?";
}

Point Point::torus(double u, double v) { return torus(Phase::from_double(u), Phase::from_double(v)); }

Point Point::torus(Phase u, Phase v) {
  Point p;
  p.chart_ = Chart::Torus2;
  p.a_ = u;
  p.b_ = v;
  return p;
}

Point Point::hair(double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("Point::hair: parameter must be finite");
  Point p;
  p.chart_ = Chart::Hair;
  p.t_ = t;
  return p;
}

Point Point::circle(double theta) { return circle(Phase::from_double(theta / kTwoPi)); }

Point Point::circle(Phase turn) {
  Point p;
  p.chart_ = Chart::Circle;
  p.a_ = turn;
  return p;
}

double Point::theta() const {
  const double th = a_.value() * kTwoPi;
  return th < kTwoPi ? th : std::nextafter(kTwoPi, 0.0);
}

std::string Point::label() const {
  char buf[96];
  switch (chart_) {
    case Chart::Torus2: std::snprintf(buf, sizeof buf, "torus[%.10g;%.10g]", u(), v()); break;
    case Chart::Hair: std::snprintf(buf, sizeof buf, "hair[%.10g]", t_); break;
    case Chart::Circle: std::snprintf(buf, sizeof buf, "circle[%.10g]", theta()); break;
  }
  return buf;
}

}  // namespace lyap
