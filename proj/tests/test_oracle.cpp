#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/moments.hpp"
#include "dchain/oracle.hpp"
#include "dchain/verify.hpp"

using namespace dchain;

TEST_SUITE("oracle") {

TEST_CASE("Delta enumeration") {
  const auto d6 = enumerate_delta(6);
  REQUIRE(d6.size() == 5);
  CHECK(d6.front().to_string() == "000001");
  for (std::size_t i = 1; i < d6.size(); ++i) CHECK(d6[i - 1].to_string() < d6[i].to_string());
  for (const auto& w : d6) CHECK(w.in_delta());
  CHECK_THROWS_AS(enumerate_delta(kDeltaEnumLimit + 1), GuardError);
  CHECK_THROWS_AS(exact_law(ChainKind::y(ThetaSequence::constant(1.0)), kFullEnumLimit + 1), GuardError);
}

TEST_CASE("exact laws") {
  const auto law = exact_law(ChainKind::eta(1.0), 4);
  CHECK(law.size() == 2);
  CHECK(law.prob(ChainWord::from_string("0001")) == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(law.prob(ChainWord::from_string("0101")) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  for (std::size_t n = 2; n <= 14; ++n) {
    CHECK(exact_law(ChainKind::eta_tilde(0.7), n).total() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(exact_law(ChainKind::y(ThetaSequence::constant(0.7)), n).total() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("conditional and push-forward laws") {
  for (std::size_t n = 4; n <= 12; ++n)
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const PSequence p = PSequence::tabulated(random_p_values(n, seed * 31 + n));
      const auto x = exact_law(ChainKind::x(p), n);
      CHECK(compare_laws(x, conditional_law(n, ThetaSequence::from_p_conditional(p))).tv < 1e-12);
    }
  for (std::size_t n = 4; n <= 12; ++n) {
    const ThetaSequence t = ThetaSequence::eta_star(0.8);
    const auto x = exact_law(ChainKind::x(PSequence::from_theta_pushforward(t)), n);
    CHECK(compare_laws(x, pushforward_law(n, t)).tv < 1e-12);
  }
  // theta_2 does not matter after conditioning
  const ThetaSequence t = ThetaSequence::constant(0.6);
  CHECK(compare_laws(conditional_law(9, t), conditional_law(9, t.with_theta2(5.0))).tv < 1e-13);
}

TEST_CASE("cycle-type enumeration") {
  const auto types = derangement_cycle_types(6);
  CHECK(types.size() == 4);  // 6, 4+2, 3+3, 2+2+2
  for (const auto& c : types) {
    CHECK(c.size() == 6);
    CHECK(c.c(1) == 0);
  }
  CHECK_THROWS_AS(derangement_cycle_types(61), GuardError);
  const auto kl = cycle_count_law(exact_law(ChainKind::eta(1.0), 4));
  CHECK(kl.prob(2) == doctest::Approx(1.0 / 3));
}

TEST_CASE("dynamic-programming moments against enumeration") {
  for (const ChainKind& k : {ChainKind::eta(0.5), ChainKind::x(PSequence::tabulated(random_p_values(13, 4))),
                             ChainKind::y(ThetaSequence::constant(1.3))}) {
    const std::size_t n = 13;
    const auto law = exact_law(k, n);
    const DpMoments dp(k, n);
    CHECK(std::abs(dp.mean_k() - law.expectation([](const ChainWord& w) { return cycle_statistics(w).K; })) < 1e-12);
    const auto kl = cycle_count_law(law);
    CHECK(std::abs(dp.var_k() - kl.variance()) < 1e-12);
    for (std::size_t i = 1; i <= 5; ++i)
      for (std::size_t j = i; j <= 5; ++j) {
        double ei = 0, ej = 0, eij = 0;
        for (const auto& [w, pr] : law) {
          const CycleType c = cycle_statistics(w).type;
          ei += pr * c.c(i);
          ej += pr * c.c(j);
          eij += pr * c.c(i) * c.c(j);
        }
        CHECK(std::abs(dp.mean_cj(j) - ej) < 1e-12);
        CHECK(std::abs(dp.cov_cj(i, j) - (eij - ei * ej)) < 1e-12);
      }
  }
  CHECK_THROWS_AS(DpMoments(ChainKind::eta(1.0), 5001), GuardError);
}

TEST_CASE("variance display against the oracle") {
  // Var C_j(n) at theta = 0.5, certified by enumeration for small n
  const double n20[] = {0.206407723, 0.152218177, 0.12283828, 0.104642407, 0.0925752597};
  const double n50[] = {0.197282717, 0.142444049, 0.112307428, 0.0932061103, 0.0800080858};
  const double n100[] = {0.194579203, 0.139672943, 0.10946559, 0.0902901608, 0.0770143791};
  const PSequence p = PSequence::eta(0.5);
  for (std::size_t j = 3; j <= 7; ++j) {
    for (auto [n, tab] : {std::pair<std::size_t, const double*>{20, n20}, {50, n50}, {100, n100}}) {
      const double v = DpMoments(ChainKind::eta(0.5), n).var_cj(j);
      CHECK(std::abs(v - tab[j - 3]) < 5e-9);
      CHECK(std::abs(v - variance_cj(n, j, p)) < 1e-10);
    }
  }
}

}
