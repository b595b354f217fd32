#include "doctest.h"

#include <cmath>

#include "dchain/params.hpp"
#include "dchain/verify.hpp"

using namespace dchain;

TEST_SUITE("params") {

TEST_CASE("theta families") {
  const ThetaSequence c = ThetaSequence::constant(0.7);
  CHECK(c(1) == 1.0);
  CHECK(c(2) == 0.7);  // the constant family keeps theta_2 = theta
  CHECK(ThetaSequence::eta_star(0.7)(2) == 1.0);
  CHECK(c(9) == 0.7);
  CHECK(c.with_theta2(3.0)(2) == 3.0);
  const ThetaSequence e = ThetaSequence::eta_star(0.8);
  CHECK(e(3) == doctest::Approx(0.8));
  CHECK(e(6) == doctest::Approx(0.8 * (1 + 0.8 / 4)));
  const ThetaSequence h = ThetaSequence::holst(1.0, 2.0, 1.0);
  CHECK(h(5) == doctest::Approx(1.0 * 4 / (2.0 - 1.0 + 4)));
  CHECK(c.indicator_prob(1) == 1.0);
  CHECK(c.indicator_prob(4) == doctest::Approx(0.7 / 3.7));
  CHECK_THROWS_AS(ThetaSequence::constant(-1.0), DomainError);
  const ThetaSequence t = ThetaSequence::tabulated({1.0, 2.0, 3.0});
  CHECK(t(4) == 3.0);
  CHECK_THROWS_AS(t(5), DomainError);
  CHECK(ThetaSequence::tabulated({1.0, 2.0}, TailRule::ConstantExtend)(40) == 2.0);
}

TEST_CASE("p families") {
  const PSequence p = PSequence::eta(0.5);
  CHECK(p.p(1) == 0.0);
  CHECK(p.p(2) == 1.0);
  CHECK(p.p(3) == doctest::Approx(2.0 / 2.5));
  CHECK(p.q(3) == doctest::Approx(0.5 / 2.5));
  CHECK(p.theta() == 0.5);
  CHECK_THROWS_AS(PSequence::tabulated({0.5, 1.5}), DomainError);
}

TEST_CASE("conditional link") {
  const double th = 1.3;
  const PSequence p = PSequence::eta(th);
  CHECK(link_conditional(p, 3) == doctest::Approx(th).epsilon(1e-14));
  for (std::size_t i = 4; i <= 50; ++i)
    CHECK(link_conditional(p, i) == doctest::Approx(th * (1 + th / double(i - 2))).epsilon(1e-13));
  CHECK(link_conditional(ThetaSequence::constant(1.0), 3) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK_THROWS_AS(link_conditional(p, 2), DomainError);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PSequence r = PSequence::tabulated(random_p_values(12, seed));
    const PSequence back = PSequence::from_theta_conditional(ThetaSequence::from_p_conditional(r));
    for (std::size_t i = 3; i <= 12; ++i) CHECK(std::abs(back.p(i) - r.p(i)) < 1e-13);
  }
}

TEST_CASE("push-forward link") {
  const PSequence p = PSequence::from_theta_pushforward(ThetaSequence::constant(0.9));
  for (std::size_t i = 3; i < 30; ++i) CHECK(p.p(i) == doctest::Approx(PSequence::eta(0.9).p(i)).epsilon(1e-15));
  CHECK(link_pushforward(ThetaSequence::constant(1.0), 3) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK_THROWS_AS(link_pushforward(p, 1), DomainError);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PSequence r = PSequence::tabulated(random_p_values(12, seed + 100));
    const PSequence back = PSequence::from_theta_pushforward(ThetaSequence::from_p_pushforward(r));
    for (std::size_t i = 3; i <= 12; ++i) CHECK(std::abs(back.p(i) - r.p(i)) < 1e-13);
  }
}

TEST_CASE("q tail of eta") {
  const double th = 0.5;
  const std::size_t i = 1000000;
  CHECK(std::abs(double(i) * PSequence::eta(th).q(i) - th) < th * th / double(i - 1));
}

}
