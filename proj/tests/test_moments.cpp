#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/moments.hpp"
#include "dchain/oracle.hpp"

using namespace dchain;

TEST_SUITE("moments") {

TEST_CASE("mean number of cycles") {
  CHECK(mean_k(4, PSequence::eta(1.0)) == doctest::Approx(4.0 / 3).epsilon(1e-14));
  CHECK(mean_k(3, PSequence::eta(0.2)) == 1.0);
  CHECK(std::abs(mean_k(20, PSequence::eta(0.5)) - DpMoments(ChainKind::eta(0.5), 20).mean_k()) < 1e-12);
  for (double th : {0.5, 1.0, 2.0})
    for (std::size_t n = 5; n <= 60; ++n) CHECK(std::abs(mean_k_eta(n, th) - mean_k(n, PSequence::eta(th))) < 1e-12);
}

TEST_CASE("limit constant of E K") {
  CHECK(psi_eta(1.0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(abar_eta(1.0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(abar(PSequence::eta(1.0), 1) == doctest::Approx(1.0 / 3).epsilon(1e-9));
  const LimitEstimate a = mean_k_asymptotic(PSequence::eta(0.5), 0.5, 3);
  CHECK(std::abs(a.value - 0.555069) < 1e-6);
  CHECK(a.error_bound <= 1.3e-7);
  const LimitEstimate s = mean_k_eta_limit(0.5, LimitMethod::Series, 3);
  CHECK(std::abs(s.value - 0.555069) < 1e-6);
  CHECK(s.error_bound <= 1.3e-7);
  CHECK(std::abs(mean_k_eta_limit(1e-6).value - 1.0) < 1e-4);
}

TEST_CASE("mean cycle counts") {
  const PSequence p = PSequence::eta(1.0);
  CHECK(mean_cj(4, 2, p) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(mean_cj(4, 3, p) == 0.0);
  CHECK(mean_cj(4, 4, p) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  for (std::size_t n = 5; n <= 40; ++n) CHECK(std::abs(mean_cj_eta(n, n - 1, 0.7)) < 1e-15);
  const PSequence q = PSequence::eta(0.6);
  for (std::size_t n = 4; n <= 60; n += 7) {
    double mass = 0.0, count = 0.0;
    for (std::size_t j = 2; j <= n; ++j) {
      const double m = mean_cj(n, j, q);
      mass += double(j) * m;
      count += m;
      CHECK(std::abs(m - mean_cj_eta(n, j, 0.6)) < 1e-12);
    }
    CHECK(std::abs(mass - double(n)) < 1e-10);
    CHECK(std::abs(count - mean_k(n, q)) < 1e-10);
  }
}

TEST_CASE("limit of mean cycle counts (Table 1 column)") {
  const double want[] = {0.255318, 0.19468, 0.137891, 0.107192, 0.0878281, 0.0744583};
  for (std::size_t j = 2; j <= 7; ++j) {
    const LimitEstimate e = mean_cj_eta_limit(0.5, j, LimitMethod::Series, 2);
    CHECK(std::abs(e.value - want[j - 2]) < 2e-6);
    CHECK(e.error_bound <= 9.87e-7 * 1.1);
  }
  const double series = mean_cj_eta_limit(0.5, 4, LimitMethod::Series, 2).value;
  const double integral = mean_cj_eta_limit(0.5, 4, LimitMethod::Integral).value;
  CHECK(std::abs(series - integral) < 1e-6);
}

TEST_CASE("variances") {
  CHECK(variance_cj(4, 2, PSequence::eta(1.0)) == doctest::Approx(8.0 / 9).epsilon(1e-13));
  // values certified by the dynamic-programming oracle and by enumeration
  CHECK(std::abs(variance_cj(20, 3, PSequence::eta(0.5)) - 0.206407723) < 1e-8);
  CHECK(std::abs(variance_cj(50, 5, PSequence::eta(0.5)) - 0.112307428) < 1e-8);
  CHECK(std::abs(variance_cj(100, 7, PSequence::eta(0.5)) - 0.0770143791) < 1e-9);
  // covariances of the chain indicators against enumeration
  for (std::size_t n = 6; n <= 12; ++n) {
    const auto law = exact_law(ChainKind::eta(0.5), n);
    for (std::size_t j = 4; j + 1 < n; ++j)
      for (std::size_t i = 3; i < j; ++i) {
        double ei = 0, ej = 0, eij = 0;
        for (const auto& [w, pr] : law) {
          ei += pr * w.at(i);
          ej += pr * w.at(j);
          eij += pr * w.at(i) * w.at(j);
        }
        CHECK(std::abs(cov_eta(n, i, j, 0.5) - (eij - ei * ej)) < 1e-12);
        if (i + 1 == j) {
          CHECK(std::abs(cov_eta_adjacent(n, j, 0.5) - (eij - ei * ej)) < 1e-12);
          CHECK(std::abs(cov_eta_adjacent(n, j, 0.5) + ei * ej) < 1e-12);
        }
      }
  }
}

TEST_CASE("derangement-type probabilities") {
  CHECK(lambda_esf(4, 1.0) == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(lambda_esf(1, 0.8) == 0.0);
  for (std::size_t n = 1; n <= 10; ++n) {
    double e = 0.0;
    for (const auto& [w, pr] : exact_law(ChainKind::xi_tilde(0.8), n)) e += pr * (cycle_statistics(w).type.c(1) == 0);
    CHECK(std::abs(lambda_esf(n, 0.8) - e) < 1e-12);
  }
  CHECK(std::abs(lambda_esf(2000, 0.7) - std::exp(-0.7)) < 1e-3);
}

}
