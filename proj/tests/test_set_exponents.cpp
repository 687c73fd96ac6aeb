#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "lyap/errors.hpp"
#include "lyap/set_exponents.hpp"
#include "lyap/systems.hpp"

using namespace lyap;

namespace {

const Point kPi = Point::circle(Phase::from_raw(u128(1) << 127));

struct World {
  std::shared_ptr<const ToralAutomorphism> cat = make_toral(kCatMatrix);
  TorusWithHair hair{cat, 0.5};
  NorthSouthCircle ns;
  double lu = cat->lambda_u();
};

SamplerParams sampler(int n_max, std::size_t count = 1024) {
  SamplerParams p;
  p.count = count;
  return estimator_sampler(p, n_max);
}

std::vector<std::pair<int, int>> pairs_up_to(int N) {
  std::vector<std::pair<int, int>> out;
  for (int n = 1; n < N; ++n)
    for (int k = 1; n + k <= N; ++k) out.emplace_back(n, k);
  return out;
}

SetExponentReport synthetic(double Lp, double Lm, bool converged = true) {
  SetExponentReport r;
  r.Lambda_plus = Lp;
  r.Lambda_minus = Lm;
  r.converged = converged;
  return r;
}

}  // namespace

TEST_CASE("distance to a finite set") {
  World w;
  const auto K = InvariantSet::finite({Point::circle(0.0), kPi});
  CHECK(dist_to_set(w.ns, K, Point::circle(0.3)) == doctest::Approx(0.3));
  CHECK(dist_to_set(w.ns, K, Point::circle(M_PI - 0.2)) == doctest::Approx(0.2));
  CHECK(dist_to_set(w.ns, K, kPi) == 0.0);
  CHECK(K.label() == "{" + Point::circle(0.0).label() + ";" + kPi.label() + "}");
  CHECK_THROWS(InvariantSet::finite({}));
}

TEST_CASE("distance to the torus inside the hair space is the height") {
  World w;
  const auto T = InvariantSet::hair_space_torus(w.hair);
  CHECK(T.label() == "T2");
  CHECK(dist_to_set(w.hair, T, Point::torus(0.2, 0.4)) == 0.0);
  for (double t : {0.0, 1.0, 30.0, -400.0}) {
    CHECK(dist_to_set(w.hair, T, Point::hair(t)) == doctest::Approx(0.5 / (t * t + 1)));
    CHECK(T.height_of(Point::hair(t)) == doctest::Approx(0.5 / (t * t + 1)));
  }
  CHECK(T.probe_growth() == doctest::Approx(1.0 / (w.cat->lambda_s() * w.cat->lambda_s())));
}

TEST_CASE("invariance") {
  World w;
  CHECK(check_invariance(w.ns, InvariantSet::finite({kPi})));
  CHECK(check_invariance(w.ns, InvariantSet::finite({Point::circle(0.0), kPi})));
  CHECK_FALSE(check_invariance(w.ns, InvariantSet::finite({Point::circle(1.0)})));
  CHECK(check_invariance(w.hair, InvariantSet::finite({w.hair.q()})));
  CHECK(check_invariance(w.hair, InvariantSet::hair_space_torus(w.hair)));
  CHECK_FALSE(check_invariance(w.ns, InvariantSet::hair_space_torus(w.hair)));
  IrrationalRotation half(M_PI);
  CHECK(check_invariance(half, InvariantSet::finite({Point::circle(0.0), kPi})));
}

TEST_CASE("samples near a set stay within delta and off the set") {
  World w;
  const auto K = InvariantSet::finite({Point::circle(0.0), kPi});
  const auto c = sample_near_set(w.ns, K, 0.05, sampler(4));
  CHECK(c.size() >= 1024);
  for (const auto& y : c) {
    const double d = dist_to_set(w.ns, K, y);
    CHECK(d > 0.0);
    CHECK(d <= 0.05);
  }
  const auto T = InvariantSet::hair_space_torus(w.hair);
  for (const auto& y : sample_near_set(w.hair, T, 1e-3, sampler(4))) {
    const double h = dist_to_set(w.hair, T, y);
    CHECK(h > 0.0);
    CHECK(h <= 1e-3 * (1 + 1e-12));
  }
  CHECK(c == sample_near_set(w.ns, K, 0.05, sampler(4)));
  CHECK_THROWS_AS(sample_near_set(w.ns, K, 0.0, sampler(4)), InvalidRadius);
}

TEST_CASE("set bowen filter follows the distance to K") {
  World w;
  const auto K = InvariantSet::finite({Point::circle(0.0)});
  const std::vector<Point> c{Point::circle(0.01), Point::circle(0.04), Point::circle(0.2)};
  // 0 repels with rate about 2: 0.01 stays below 0.05 for two steps, 0.04 for none
  CHECK(set_bowen_filter(w.ns, K, 0.05, 1, c).size() == 1);
  CHECK(set_bowen_filter(w.ns, K, 0.05, -5, c).size() == 2);

  const auto T = InvariantSet::hair_space_torus(w.hair);
  const double delta = 1e-3;
  // forward heights grow by lu^2 per step near T2
  const double t = std::sqrt(0.5 / (delta / std::pow(w.lu, 4) * 0.99) - 1);
  const std::vector<Point> probe{Point::hair(t)};
  CHECK(set_bowen_filter(w.hair, T, delta, 2, probe).size() == 1);
  CHECK(set_bowen_filter(w.hair, T, delta, 3, probe).empty());
}

TEST_CASE("set distortion examples") {
  World w;
  SUBCASE("north-south attractor halves distances") {
    const auto K = InvariantSet::finite({kPi});
    const auto d = set_distortion(w.ns, K, 1e-3, 1, sample_near_set(w.ns, K, 1e-3, sampler(1)));
    CHECK(d.A_hat == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(d.a_hat <= d.A_hat);
  }
  SUBCASE("torus in the hair space, one step") {
    const auto T = InvariantSet::hair_space_torus(w.hair);
    const auto d = set_distortion(w.hair, T, 1e-3, 1, sample_near_set(w.hair, T, 1e-3, sampler(1)));
    CHECK(d.A_hat == doctest::Approx(w.lu * w.lu).epsilon(1e-3));
  }
  SUBCASE("half-turn rotation permuting {0, pi}") {
    IrrationalRotation half(M_PI);
    const auto K = InvariantSet::finite({Point::circle(0.0), kPi});
    const auto d = set_distortion(half, K, 0.01, 3, sample_near_set(half, K, 0.01, sampler(3, 256)));
    CHECK(d.A_hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.a_hat == doctest::Approx(1.0).epsilon(1e-9));
  }
  const auto K0 = InvariantSet::finite({Point::circle(0.0)});
  const std::vector<Point> far{Point::circle(1.0)};
  CHECK_THROWS_AS(set_distortion(w.ns, K0, 0.01, 1, far), EmptyBowenSample);
}

TEST_CASE("log A is subadditive") {
  World w;
  const auto pairs = pairs_up_to(8);
  const auto Kq = InvariantSet::finite({w.hair.q()});
  CHECK(subadditivity_check(w.hair, Kq, 0.1, pairs, sample_near_set(w.hair, Kq, 0.1, sampler(8))) <= 1e-9);
  const auto Kpi = InvariantSet::finite({kPi});
  CHECK(subadditivity_check(w.ns, Kpi, 0.1, pairs, sample_near_set(w.ns, Kpi, 0.1, sampler(8))) <= 1e-9);
  const auto T = InvariantSet::hair_space_torus(w.hair);
  CHECK(subadditivity_check(w.hair, T, 1e-3, pairs, sample_near_set(w.hair, T, 1e-3, sampler(8))) <= 1e-9);
}

TEST_CASE("set mirrored duality") {
  World w;
  const auto Kpi = InvariantSet::finite({kPi});
  CHECK(set_mirrored_duality_check(w.ns, Kpi, 0.1, 3, sample_near_set(w.ns, Kpi, 0.1, sampler(3))) < 1e-9);
}

TEST_CASE("classification from exponents") {
  CHECK(classify_exponents(synthetic(-0.7, 0.7), 0.1) == SetLabel::Attractor);
  CHECK(classify_exponents(synthetic(0.7, -0.7), 0.1) == SetLabel::Repeller);
  CHECK(classify_exponents(synthetic(0.7, 0.7), 0.1) == SetLabel::Neither);
  CHECK(classify_exponents(synthetic(-0.05, 0.7), 0.1) == SetLabel::Inconclusive);
  CHECK(classify_exponents(synthetic(-0.7, -0.7), 0.1) == SetLabel::Inconclusive);
  CHECK(classify_exponents(synthetic(-0.7, 0.7, false), 0.1) == SetLabel::Inconclusive);
  CHECK_THROWS(classify_exponents(synthetic(-0.7, 0.7), 0.0));
  CHECK(std::string(set_label_name(SetLabel::Repeller)) == "Repeller");
}

TEST_CASE("north-south fixed points") {
  World w;
  ExponentOptions o;
  const auto Kpi = InvariantSet::finite({kPi});
  const auto r = set_exponents(w.ns, Kpi, o);
  CHECK(r.converged);
  CHECK(r.Lambda_plus == doctest::Approx(-std::log(2.0)).epsilon(0.03));
  const auto c = classify(w.ns, Kpi, r);
  CHECK(c.label == SetLabel::Attractor);
  REQUIRE(c.basin_fraction);
  CHECK(*c.basin_fraction >= 0.99);

  const auto K0 = InvariantSet::finite({Point::circle(0.0)});
  const auto r0 = set_exponents(w.ns, K0, o);
  CHECK(classify(w.ns, K0, r0).label == SetLabel::Repeller);
  CHECK(empirical_basin_check(w.ns, K0, TimeDirection::Forward) == 0.0);
  CHECK(empirical_basin_check(w.ns, K0, TimeDirection::Backward) >= 0.99);
}

TEST_CASE("q attracts and the torus repels in the hair space") {
  World w;
  ExponentOptions o;
  const auto Kq = InvariantSet::finite({w.hair.q()});
  const auto rq = set_exponents(w.hair, Kq, o);
  const auto cq = classify(w.hair, Kq, rq);
  CHECK(cq.label == SetLabel::Attractor);
  CHECK(*cq.basin_fraction >= 0.99);

  const auto T = InvariantSet::hair_space_torus(w.hair);
  const auto rT = set_exponents(w.hair, T, o);
  CHECK(rT.Lambda_minus == doctest::Approx(2 * std::log(w.cat->lambda_s())).epsilon(0.03));
  for (const auto& run : rT.runs) CHECK(run.subadditivity <= 1e-9);
  const auto cT = classify(w.hair, T, rT);
  CHECK(cT.label == SetLabel::Repeller);
  CHECK(*cT.basin_fraction >= 0.99);
}
