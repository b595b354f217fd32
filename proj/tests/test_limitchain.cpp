#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/limitchain.hpp"
#include "dchain/oracle.hpp"

using namespace dchain;

TEST_SUITE("limitchain") {

TEST_CASE("phi values") {
  const PSequence p = PSequence::eta(1.0);
  CHECK(phi(1, p) == 1.0);
  CHECK(phi(2, p) == 0.0);
  CHECK(phi(3, p) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(phi_eta(3, 1.0) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
  CHECK(phi_series(3, p) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
  // constant q: phi = q/(1+q)
  const double q = 0.3;
  const PSequence c = PSequence::tabulated({1 - q}, TailRule::ConstantExtend);
  CHECK(phi_series(10, c) == doctest::Approx(q / (1 + q)).epsilon(1e-12));
  const PSequence h = PSequence::eta(0.5);
  for (std::size_t i = 3; i <= 100; ++i) {
    const double f = phi(i, h);
    CHECK(f > h.q(i) * h.p(i + 1));
    CHECK(f < h.q(i));
  }
  for (std::size_t i = 3; i <= 200; ++i) CHECK(std::abs(h.q(i) * (1 - phi(i + 1, h)) - phi(i, h)) < 1e-12);
  for (std::size_t i = 3; i <= 20; ++i)
    CHECK(phi_eta_tilde(i, 0.8) == doctest::Approx(phi_series(i, PSequence::eta_tilde(0.8))).epsilon(1e-9));
}

TEST_CASE("divergence flag is required") {
  // summable p: p_i = 1/i^2 for i >= 3 (values in (0,1))
  std::vector<double> v;
  for (std::size_t i = 3; i < 2000; ++i) v.push_back(1.0 / double(i * i));
  const LimitContext ctx = LimitContext::probe(PSequence::tabulated(v, TailRule::ConstantExtend), 1999);
  CHECK_THROWS_AS(phi(4, ctx), DomainError);
  CHECK_NOTHROW(phi(4, LimitContext::probe(PSequence::eta(1.0))));
}

TEST_CASE("X-infinity transitions") {
  const PSequence p = PSequence::eta(1.0);
  CHECK(xinf_transition(1, p) == 0.0);
  CHECK(xinf_transition(2, p) == doctest::Approx(phi(3, p)).epsilon(1e-13));
  // prefix law of length 5 against the n -> infinity limit of n-chain prefixes
  const ChainKind inf = ChainKind::xinf_prefix(p);
  const auto pre = exact_law(inf, 5);
  CHECK(pre.total() == doctest::Approx(1.0).epsilon(1e-13));
  // P(X_1..X_5 = w) for large n through marginals: compare the top-bit marginal
  double top = 0.0;
  for (const auto& [w, pr] : pre) top += pr * w.at(5);
  CHECK(std::abs(top - phi(5, p)) < 1e-10);
}

TEST_CASE("prefix total variation") {
  const PSequence p = PSequence::eta(1.0);
  CHECK(tv_prefix(2, p) == 0.0);
  CHECK(std::abs(tv_prefix(6, p) - tv_prefix_direct(6, p)) < 1e-12);
  const auto a = exact_law(ChainKind::xinf_prefix(p), 6);
  const auto b = exact_law(ChainKind::x(p), 6);
  CHECK(std::abs(compare_laws(a, b).tv - tv_prefix(6, p)) < 1e-12);
  const PSequence h = PSequence::eta(0.5);
  double prev = 1.0;
  for (std::size_t n = 8; n <= 1024; n *= 2) {
    const double t = tv_prefix(n, h);
    CHECK(t < prev);
    prev = t;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("gamma at infinity") {
  const ThetaSequence t = ThetaSequence::eta_star(1.0);
  CHECK(gamma_inf(200, t) > 0.99);
  CHECK(delta_i_inf(0.8, 2) == doctest::Approx(delta_inf(0.8)).epsilon(1e-9));
  CHECK(std::abs(delta_i_inf(0.8, 5) - gamma_inf(5, ThetaSequence::eta_star(0.8))) < 1e-9);
  for (std::size_t i = 3; i <= 30; ++i) {
    const double lhs = gamma_inf(i, t);
    const double rhs = double(i - 1) / (double(i - 1) + t(i)) *
                       (gamma_inf(i + 1, t) + t(i + 1) / (double(i) + t(i + 1)) * gamma_inf(i + 2, t));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

}
