#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/oracle.hpp"

using namespace dchain;

TEST_SUITE("coupling") {

TEST_CASE("gamma_n") {
  const ThetaSequence one = ThetaSequence::constant(1.0);
  CHECK(gamma_n(one, 1) == 0.0);
  CHECK(gamma_n(one.with_theta2(2.0), 2) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(gamma_n(one, 3) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(gamma_n(one, 4) == doctest::Approx(3.0 / 8).epsilon(1e-15));
  const ThetaSequence h = ThetaSequence::holst(0.9, 1.5, 1.1);
  for (std::size_t n = 3; n <= 60; ++n) {
    const double r = gamma_n(h, n);
    CHECK(gamma_n(h, n, GammaMethod::GProduct) == doctest::Approx(r).epsilon(1e-12));
    CHECK(gamma_n(h, n, GammaMethod::PProduct) == doctest::Approx(r).epsilon(1e-12));
  }
}

TEST_CASE("delta_n") {
  CHECK(delta_n(1.0, 1.0, 3) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(delta_n(1.0, 1.0, 4) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  for (double th : {0.5, 2.0})
    for (std::size_t n = 3; n <= 12; ++n)
      CHECK(delta_n(th, 1.0, n) == doctest::Approx(gamma_n(ThetaSequence::eta_star(th), n)).epsilon(1e-12));
  CHECK(std::abs(delta_n(0.5, 1.0, 4000) - delta_inf(0.5)) < 1e-3);
  CHECK(std::abs(delta_n(2.0, 1.0, 4000) - delta_inf(2.0)) < 1e-3);
}

TEST_CASE("cycle-count laws and pgfs") {
  const ThetaSequence t = ThetaSequence::constant(1.0).with_theta2(0.6);
  CHECK(k_distribution_y(2, t).prob(2) == doctest::Approx(0.6 / 1.6).epsilon(1e-15));
  CHECK(k_distribution_y(3, ThetaSequence::constant(1.0)).prob(3) == doctest::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(pgf_k_y(1.0, 9, t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pgf_k_x(1.0, 9, t) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pgf_k_y(0.3, 2, t) == doctest::Approx(0.3 * (1 + 0.3 * 0.6) / 1.6).epsilon(1e-14));
  const ThetaSequence one = ThetaSequence::constant(1.0);
  const auto law = k_distribution_x_conditioned(10, one);
  for (double s : {0.3, 1.7}) CHECK(std::abs(pgf_k_x(s, 10, one) - pgf_from_distribution(law, s)) < 1e-10);
  for (double s : {0.25, 0.5, 1.0, 1.5, 2.0})
    for (std::size_t n : {6, 12, 24, 30}) {
      const double lhs = pgf_k_x(s, n, one) * gamma_n(one, n);
      const double rhs = gamma_n(one.scaled(s), n) * pgf_k_y(s, n, one);
      CHECK(std::abs(lhs - rhs) < 1e-10);
    }
}

TEST_CASE("joint cycle counts") {
  CHECK(expand_cycle_type(CycleType({2, 0, 1, 0, 4})) == std::vector<int>{1, 1, 3, 5, 5, 5, 5});
  CHECK(joint_cycle_counts_eta(CycleType({0, 2, 0, 0}), 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(joint_cycle_counts_eta(CycleType({0, 0, 0, 1}), 1.0) == doctest::Approx(2.0 / 3).epsilon(1e-13));
  const ThetaSequence t = ThetaSequence::eta_star(0.7);
  for (std::size_t n = 4; n <= 10; ++n) {
    const auto law = cycle_type_law(conditional_law(n, t));
    double total = 0.0;
    for (const CycleType& c : derangement_cycle_types(n)) {
      const double v = joint_cycle_counts_x(c, t);
      total += v;
      CHECK(std::abs(v - law.prob(c)) < 1e-12);
    }
    CHECK(std::abs(total - 1.0) < 1e-11);
  }
}

TEST_CASE("ordered cycle prefix") {
  const ThetaSequence one = ThetaSequence::constant(1.0);
  CHECK(ordered_cycle_prefix_prob({2}, 4, one) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ordered_cycle_prefix_prob({1}, 4, one) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(ordered_cycle_prefix_prob({4}, 4, one), DomainError);
  const ThetaSequence t = ThetaSequence::constant(0.6);
  for (std::size_t n = 2; n <= 10; ++n) {
    double s = k_distribution_y(n, t).prob(1);
    for (int a = 1; a < int(n); ++a) s += ordered_cycle_prefix_prob({a}, n, t);
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("erase11") {
  const ChainWord y = ChainWord::from_ascending("11111001111000");
  CHECK(erase11(y, 11).to_ascending() == "10101001010");
  CHECK(erase11(y, 12).to_ascending() == "101010001010");
  for (const ChainWord& w : enumerate_delta(9)) CHECK(erase11(w, 9) == w);
  for (unsigned mask = 0; mask < 256; ++mask) {
    ChainWord w(std::vector<std::uint8_t>(9, 0));
    w.bits[0] = 1;
    for (int i = 0; i < 8; ++i) w.bits[i + 1] = (mask >> i) & 1u;
    const ChainWord e = erase11(w, 9);
    CHECK(e.in_delta());
  }
}

TEST_CASE("Delta cardinality follows Fibonacci") {
  for (std::size_t n = 4; n <= 20; ++n) {
    CHECK(enumerate_delta(n).size() == delta_cardinality(n));
    CHECK(delta_cardinality(n) == delta_cardinality(n - 1) + delta_cardinality(n - 2));
  }
  CHECK(delta_cardinality(2) == 1);
  CHECK(delta_cardinality(3) == 1);
}

}
