#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/moments.hpp"
#include "dchain/oracle.hpp"
#include "dchain/signed_stats.hpp"

using namespace dchain;

namespace {
DistTable<int> c_law(std::size_t n, std::size_t k, double theta) {
  DistTable<int> out;
  for (const auto& [w, p] : exact_law(ChainKind::eta(theta), n)) out.add(cycle_statistics(w).type.c(k), p);
  return out;
}
}  // namespace

TEST_SUITE("signed_stats") {

TEST_CASE("orientation weights") {
  const OrientationWeights half = OrientationWeights::binomial(0.5);
  CHECK(omega(3, 2, half) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(omega(7, 7, OrientationWeights::binomial(1.0)) == 1.0);
  const OrientationWeights w = OrientationWeights::binomial(0.37);
  for (int k = 1; k <= 50; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += omega(k, i, w);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(OrientationWeights::table({{0.5, 0.6}}), DomainError);
}

TEST_CASE("C_ki distribution") {
  const auto law2 = c_law(4, 2, 1.0);
  const OrientationWeights half = OrientationWeights::binomial(0.5);
  CHECK(cki_distribution(2, 1, 1, 4, law2, half) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  CHECK(cki_distribution(3, 3, 0, 6, c_law(6, 3, 1.0), OrientationWeights::binomial(1.0)) ==
        doctest::Approx(c_law(6, 3, 1.0).prob(0)).epsilon(1e-14));
  for (std::size_t n = 4; n <= 10; ++n)
    for (int k = 2; k <= int(n); ++k) {
      const auto law = c_law(n, k, 0.7);
      for (int i = 1; i <= k; ++i) {
        double s = 0.0;
        for (int l = 0; l <= int(n) / k; ++l) s += cki_distribution(k, i, l, int(n), law, half);
        CHECK(std::abs(s - 1.0) < 1e-12);
      }
    }
}

TEST_CASE("C* moments") {
  const std::size_t n = 4;
  const CycleLawMoments c(cycle_type_law(exact_law(ChainKind::eta(1.0), n)));
  CHECK(cstar_moments(1, 1, c, OrientationWeights::binomial(0.5)).mean_j == doctest::Approx(5.0 / 12).epsilon(1e-14));
  const CycleLawMoments c8(cycle_type_law(exact_law(ChainKind::eta(0.6), 8)));
  for (int j = 2; j <= 8; ++j)
    CHECK(cstar_moments(j, j, c8, OrientationWeights::binomial(1.0)).mean_j ==
          doctest::Approx(mean_cj(8, j, PSequence::eta(0.6))).epsilon(1e-12));
  // sums over j reproduce E K and Var K
  const OrientationWeights w = OrientationWeights::binomial(0.3);
  const auto kl = k_distribution_x(10, PSequence::eta(0.6));
  const CycleLawMoments c10(cycle_type_law(exact_law(ChainKind::eta(0.6), 10)));
  double mean = 0.0, var = 0.0;
  for (int i = 1; i <= 10; ++i) {
    mean += cstar_moments(i, i, c10, w).mean_i;
    for (int j = 1; j <= 10; ++j) var += cstar_moments(i, j, c10, w).cov_ij;
  }
  CHECK(std::abs(mean - kl.mean()) < 1e-12);
  CHECK(std::abs(var - kl.variance()) < 1e-12);
  // marginal consistency: E C*_j = sum_k sum_l l P(C_kj = l)
  for (int j = 1; j <= 4; ++j) {
    double e = 0.0;
    for (int k = j; k <= 8; ++k) {
      const auto law = c_law(8, k, 0.6);
      for (int l = 1; l <= 8 / k; ++l) e += l * cki_distribution(k, j, l, 8, law, w);
    }
    CHECK(std::abs(e - cstar_moments(j, j, c8, w).mean_j) < 1e-12);
  }
}

TEST_CASE("number of children looking in") {
  DistTable<int> k2;
  k2.add(1, 1.0);
  const auto l2 = lambda_total(2, 0.35, k2);
  CHECK(l2.prob(1) == doctest::Approx(0.65));
  CHECK(l2.mean() == doctest::Approx(1.35).epsilon(1e-15));
  for (std::size_t n = 3; n <= 12; ++n)
    for (double kappa : {0.3, 0.9}) {
      const auto kl = k_distribution_x(n, PSequence::eta(0.8));
      const auto lt = lambda_total(n, kappa, kl);
      CHECK(lt.total() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(lt.mean() - lambda_mean_identity(n, kappa, kl.mean())) < 1e-12);
    }
}

TEST_CASE("ordered star probabilities") {
  const ThetaSequence one = ThetaSequence::constant(1.0);
  // r = 1, 2, 3 contribute (1/4)(1) + (1/4)(1/2) + (1/4)(1/4)
  CHECK(ordered_star_prob({1}, 4, one, OrientationWeights::binomial(0.5)) == doctest::Approx(7.0 / 16).epsilon(1e-14));
  CHECK(ordered_cycle_prefix_prob({3}, 4, one) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ordered_star_prob({2}, 6, one, OrientationWeights::binomial(1.0)) ==
        doctest::Approx(ordered_cycle_prefix_prob({2}, 6, one)).epsilon(1e-14));
}

}
