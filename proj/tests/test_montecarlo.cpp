#include "doctest.h"

#include <cmath>

#include "dchain/chains.hpp"
#include "dchain/montecarlo.hpp"
#include "dchain/rng.hpp"

using namespace dchain;

TEST_SUITE("montecarlo") {

TEST_CASE("replicates do not depend on the worker count") {
  auto draw = [](Philox4x32& r) { return r.uniform(); };
  const auto a = replicate_values(1000, 11, draw, 1);
  const auto b = replicate_values(1000, 11, draw, 7);
  CHECK(a == b);
  CHECK(replicate_values(10, 12, draw, 1) != a);
  CHECK_THROWS_AS(replicate_values(0, 1, draw, 1), DomainError);
  CHECK_THROWS_AS(replicate<double>(
                      50, 1, [](Philox4x32&) -> double { throw std::runtime_error("boom"); }, 4),
                  std::runtime_error);
}

TEST_CASE("summaries and KS") {
  EstimateReport r;
  summarize({1.0, 2.0, 3.0, 4.0}, r);
  CHECK(r.mean == doctest::Approx(2.5));
  CHECK(r.sd == doctest::Approx(std::sqrt(5.0 / 3)));
  CHECK(r.std_error == doctest::Approx(r.sd / 2));
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100);
  CHECK(ks_statistic(grid, [](double x) { return x; }) == doctest::Approx(0.005).epsilon(1e-9));
  CHECK(kolmogorov_pvalue(0.0, 100) == doctest::Approx(1.0));
  CHECK(kolmogorov_pvalue(0.5, 100) < 1e-10);
  // asymptotic Kolmogorov quantile: P(sqrt(n) D > 1.358) ~ 0.05
  CHECK(kolmogorov_pvalue(1.358 / std::sqrt(1e6), 1000000) == doctest::Approx(0.05).epsilon(0.02));
}

TEST_CASE("estimates match exact values") {
  const ChainKind k = ChainKind::eta(1.0);
  const EstimateReport mk = estimate(Statistic::K, k, 4, 20000, 3);
  CHECK(std::abs(mk.mean - 4.0 / 3) < 4 * mk.std_error);
  EstimateOptions o;
  o.j = 2;
  const EstimateReport c2 = estimate(Statistic::Cj, k, 4, 20000, 3, o);
  CHECK(std::abs(c2.mean - 2.0 / 3) < 4 * c2.std_error);
  o.workers = 1;
  const EstimateReport one = estimate(Statistic::K, k, 30, 500, 8, o);
  o.workers = 6;
  const EstimateReport six = estimate(Statistic::K, k, 30, 500, 8, o);
  CHECK(one.mean == six.mean);
  CHECK(one.sd == six.sd);
  CHECK_THROWS_AS(estimate(Statistic::Lambda, k, 10, 10, 1), DomainError);
  CHECK_THROWS_AS(statistic_from_name("nope"), DomainError);
  for (const auto& s : statistic_names()) CHECK(statistic_name(statistic_from_name(s)) == s);
}

TEST_CASE("signed estimates") {
  const ChainKind s = ChainKind::signed_chain(PSequence::eta(1.0), 0.5);
  const EstimateReport l = estimate(Statistic::Lambda, s, 2, 20000, 5);
  CHECK(std::abs(l.mean - 1.5) < 4 * l.std_error);
}

TEST_CASE("KS is flagged for small samples") {
  const EstimateReport g = gem_diagnostic(ThetaSequence::constant(0.7), 300, 100, 1);
  CHECK_FALSE(g.ks_reliable);
  REQUIRE(g.pvalue.has_value());
}

}
