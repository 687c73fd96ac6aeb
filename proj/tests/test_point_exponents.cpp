#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "lyap/adapted_metric.hpp"
#include "lyap/errors.hpp"
#include "lyap/point_exponents.hpp"
#include "lyap/systems.hpp"

using namespace lyap;

namespace {

struct World {
  std::shared_ptr<const ToralAutomorphism> cat = make_toral(kCatMatrix);
  SystemPtr eigen = with_eigen_metric(cat);
  TorusWithHair hair{cat, 0.5};
  IrrationalRotation rot;
  NorthSouthCircle ns;
  double lu = cat->lambda_u();
  double ls = cat->lambda_s();
};

SamplerParams small_sampler(int n_max) {
  SamplerParams p;
  p.count = 1024;
  return estimator_sampler(p, n_max);
}

}  // namespace

TEST_CASE("estimator sampler deepens probes to cover n_max") {
  SamplerParams p;
  p.probe_levels = 8;
  CHECK(estimator_sampler(p, 10).probe_levels >= 12);
  CHECK(estimator_sampler(p, 4).probe_levels == 8);
  CHECK(estimator_sampler(p, 10).seed == p.seed);
}

TEST_CASE("bowen filter on unstable probes") {
  World w;
  const Point x = Point::torus(0.3, 0.7);
  const double delta = 0.01;
  std::vector<Point> cands;
  for (int m = 1; m <= 6; ++m) cands.push_back(w.cat->along(x, 0, delta * std::pow(w.lu, -m) * 0.999));
  for (int n = 1; n <= 6; ++n) {
    const auto kept = bowen_filter(*w.cat, x, delta, n, cands);
    // the probe at delta*lu^-m stays within delta exactly up to step m
    CHECK(kept.size() == static_cast<std::size_t>(6 - n + 1));
  }
  // n = 0 is the plain ball
  CHECK(bowen_filter(*w.cat, x, delta, 0, cands).size() == cands.size());
  // stable probes survive forward but not backward
  const Point s = w.cat->along(x, 2, delta * 0.5);
  const std::vector<Point> one{s};
  CHECK(bowen_filter(*w.cat, x, delta, 8, one).size() == 1);
  CHECK(bowen_filter(*w.cat, x, delta, -3, one).empty());
}

TEST_CASE("bowen filter drops x and far points") {
  World w;
  const Point x = Point::circle(1.0);
  const std::vector<Point> cands{x, Point::circle(1.0005), Point::circle(2.0)};
  const auto kept = bowen_filter(w.rot, x, 0.01, 5, cands);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0] == cands[1]);
}

TEST_CASE("distortion examples") {
  World w;
  SUBCASE("rotation is 1") {
    const Point x = Point::circle(1.0);
    const auto c = sample_near(w.rot, x, 0.01, 256, 1);
    const auto d = distortion(w.rot, x, 0.01, 7, c);
    CHECK(d.A_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.a_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.in_ball_count > 0);
  }
  SUBCASE("toral unstable probe") {
    const Point x = Point::torus(0.3, 0.7);
    const double delta = 0.01;
    const std::vector<Point> c{w.cat->along(x, 0, delta * std::pow(w.lu, -5) * (1 - 1e-9))};
    const auto d = distortion(*w.cat, x, delta, 5, c);
    CHECK(d.A_hat == doctest::Approx(std::pow(w.lu, 5)).epsilon(1e-8));
    CHECK(d.witness_max == c[0]);
  }
  SUBCASE("hair contracts at lambda_s toward q") {
    const auto c = sample_near(w.hair, w.hair.q(), 0.1, small_sampler(5));
    const auto d = distortion(w.hair, w.hair.q(), 0.1, 5, c);
    CHECK(d.A_hat == doctest::Approx(std::pow(w.ls, 5)).epsilon(0.05));
    CHECK(d.a_hat <= d.A_hat);
  }
}

TEST_CASE("distortion errors") {
  World w;
  const Point x = Point::torus(0.3, 0.7);
  const std::vector<Point> c{w.cat->along(x, 0, 1e-3)};
  CHECK_THROWS_AS(distortion(*w.cat, x, 1e-3, 10, c), EmptyBowenSample);
  CHECK_THROWS(distortion(*w.cat, x, 1e-2, 0, c));
  try {
    distortion(*w.cat, x, 1e-3, 10, c);
  } catch (const EmptyBowenSample& e) {
    CHECK(e.n() >= 1);
    CHECK(e.delta() == 1e-3);
  }
}

TEST_CASE("exponent sequence is nested and a_hat <= A_hat") {
  World w;
  const Point x = Point::torus(0.41, 0.13);
  const auto c = sample_near(*w.eigen, x, 0.01, small_sampler(8));
  const std::vector<int> ns{1, 2, 3, 4, 5, 6, 7, 8};
  const auto seq = exponent_sequence(*w.eigen, x, 0.01, ns, c);
  REQUIRE(seq.size() == ns.size());
  std::size_t prev = c.size() + 1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(seq[i].n == ns[i]);
    CHECK(seq[i].a_hat <= seq[i].A_hat);
    CHECK(seq[i].logA_over_n == doctest::Approx(std::log(seq[i].A_hat) / seq[i].n));
    // linear map in the adapted metric: ratios lie in [lu^-n, lu^n]
    CHECK(seq[i].A_hat <= std::pow(w.lu, seq[i].n) * (1 + 1e-9));
    CHECK(seq[i].a_hat >= std::pow(w.lu, -seq[i].n) * (1 - 1e-9));
    const std::size_t kept = bowen_filter(*w.eigen, x, 0.01, ns[i], c).size();
    CHECK(kept <= prev);
    prev = kept;
  }
  const std::vector<int> back{-1, -2, -3};
  for (const auto& s : exponent_sequence(*w.eigen, x, 0.01, back, c)) CHECK(s.n < 0);
  const std::vector<int> bad{1, 3, 2};
  CHECK_THROWS(exponent_sequence(*w.eigen, x, 0.01, bad, c));
}

TEST_CASE("options validation") {
  ExponentOptions o;
  CHECK_NOTHROW(o.validate());
  o.delta_list = {1e-2, 1e-1};
  CHECK_THROWS(o.validate());
  o.delta_list = {1e-1, -1e-2};
  CHECK_THROWS(o.validate());
  o.delta_list = {1e-1};
  o.n_max = 3;
  CHECK_THROWS(o.validate());
}

TEST_CASE("toral exponents are +-log lambda_u") {
  World w;
  ExponentOptions o;
  const auto r = point_exponents(*w.eigen, Point::torus(0.3, 0.7), o);
  const double L = std::log(w.lu);
  CHECK(r.converged);
  CHECK(r.Lambda_plus == doctest::Approx(L).epsilon(1e-6));
  CHECK(r.lambda_plus == doctest::Approx(-L).epsilon(1e-6));
  CHECK(r.Lambda_minus == doctest::Approx(L).epsilon(1e-6));
  CHECK(r.lambda_minus == doctest::Approx(-L).epsilon(1e-6));
  REQUIRE(r.runs.size() == 3);
  for (const auto& run : r.runs) {
    CHECK(run.forward.size() == 10);
    CHECK(run.backward.size() == 10);
    CHECK(run.backward.front().n == -1);
    CHECK(run.duality_upper < 1e-6);
    CHECK(run.duality_lower < 1e-6);
  }
  CHECK(r.limit_delta == 1e-3);
}

TEST_CASE("rotation exponents vanish") {
  World w;
  const auto r = point_exponents(w.rot, Point::circle(2.0), ExponentOptions{});
  CHECK(r.converged);
  CHECK(std::abs(r.Lambda_plus) < 1e-9);
  CHECK(std::abs(r.lambda_plus) < 1e-9);
  CHECK(std::abs(r.Lambda_minus) < 1e-9);
  CHECK(std::abs(r.lambda_minus) < 1e-9);
}

TEST_CASE("hair point q has negative forward exponents") {
  World w;
  ExponentOptions o;
  o.delta_list = {1e-1, 1e-2, 1e-3};
  const auto r = point_exponents(w.hair, w.hair.q(), o);
  CHECK(r.Lambda_plus < 0.0);
  CHECK(r.Lambda_plus == doctest::Approx(std::log(w.ls)).epsilon(0.03));
  CHECK(r.lambda_plus <= r.Lambda_plus);
}

TEST_CASE("A_hat grows as delta shrinks on a shared sample") {
  World w;
  const Point x = Point::circle(1.0);
  const auto c = sample_near(w.ns, x, 0.1, small_sampler(6));
  double prevA = 0.0, preva = 1e300;
  for (double delta : {0.1, 0.03, 0.01}) {
    const auto d = distortion(w.ns, x, delta, 6, c);
    // smaller balls are subsets, so the sup can only drop and the inf only rise
    if (prevA > 0.0) {
      CHECK(d.A_hat <= prevA);
      CHECK(d.a_hat >= preva);
    }
    prevA = d.A_hat;
    preva = d.a_hat;
  }
}

TEST_CASE("mirrored duality is exact on the image sample") {
  World w;
  const Point xr = Point::circle(0.5);
  CHECK(mirrored_duality_check(w.rot, xr, 0.01, 5, sample_near(w.rot, xr, 0.01, 256, 3)) < 1e-9);

  const Point xt = Point::torus(0.3, 0.7);
  CHECK(mirrored_duality_check(*w.cat, xt, 0.01, 3, sample_near(*w.cat, xt, 0.01, small_sampler(3))) < 1e-9);

  CHECK(mirrored_duality_check(w.hair, w.hair.q(), 0.1, 4, sample_near(w.hair, w.hair.q(), 0.1, small_sampler(4))) <
        1e-9);
  CHECK_THROWS(mirrored_duality_check(w.rot, xr, 0.01, 0, sample_near(w.rot, xr, 0.01, 16, 3)));
}

TEST_CASE("Lipschitz bound holds") {
  World w;
  const auto sp = small_sampler(8);
  CHECK(lipschitz_bound_check(*w.eigen, Point::torus(0.3, 0.7), 0.01, 8, w.lu, sp) <= 1e-9);
  CHECK(lipschitz_bound_check(w.rot, Point::circle(1.0), 0.01, 8, 1.0 + 1e-9, sp) <= 0.0);
  CHECK(lipschitz_bound_check(w.ns, Point::circle(1.0), 0.01, 8, w.ns.grid_lipschitz(), sp) <= 0.0);
  // too small a constant is caught
  CHECK(lipschitz_bound_check(*w.eigen, Point::torus(0.3, 0.7), 0.01, 8, 2.0, sp) > 0.0);
}

TEST_CASE("Lipschitz constants") {
  World w;
  CHECK(lipschitz_constant(*w.eigen) == doctest::Approx(w.lu));
  CHECK(lipschitz_constant(w.rot) == doctest::Approx(1.0));
  const double K = lipschitz_constant(w.hair, 2000, 42);
  CHECK(K > w.lu);
  CHECK(std::isfinite(K));
}

TEST_CASE("results do not depend on the thread count") {
  World w;
  ExponentOptions o;
  o.sampler.count = 2048;
  setenv("LYAP_THREADS", "1", 1);
  const auto a = point_exponents(w.hair, Point::hair(0.3), o);
  setenv("LYAP_THREADS", "4", 1);
  const auto b = point_exponents(w.hair, Point::hair(0.3), o);
  unsetenv("LYAP_THREADS");
  CHECK(a.Lambda_plus == b.Lambda_plus);
  CHECK(a.lambda_plus == b.lambda_plus);
  CHECK(a.Lambda_minus == b.Lambda_minus);
  CHECK(a.lambda_minus == b.lambda_minus);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    for (std::size_t j = 0; j < a.runs[i].forward.size(); ++j) {
      CHECK(a.runs[i].forward[j].A_hat == b.runs[i].forward[j].A_hat);
      CHECK(a.runs[i].backward[j].a_hat == b.runs[i].backward[j].a_hat);
    }
  }
}
