#include "doctest.h"

#include <cmath>
#include <complex>

#include "dchain/numerics.hpp"

using namespace dchain;

TEST_SUITE("numerics") {

TEST_CASE("rising factorial") {
  CHECK(rising_factorial(0.5, 3) == doctest::Approx(1.875).epsilon(1e-15));
  CHECK(rising_factorial(0.7, 0) == 1.0);
  CHECK(rising_factorial(1.0, 6) == doctest::Approx(720.0).epsilon(1e-15));
  CHECK_THROWS_AS(rising_factorial(10.0, 400), OverflowError);
  const SignedLog l = log_rising_factorial(10.0, 400);
  CHECK(l.sign == 1);
  CHECK(l.log_abs == doctest::Approx(log_gamma(410.0) - log_gamma(10.0)).epsilon(1e-13));
  CHECK(log_rising_factorial(-1.5, 3).sign == 1);  // (-1.5)(-0.5)(0.5) > 0
  CHECK_THROWS_AS(log_rising_factorial(-2.0, 4), DomainError);
}

TEST_CASE("kummer M") {
  CHECK(kummer_m(1, 1, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(kummer_m(0.3, 1.7, 0.0) == 1.0);
  CHECK(kummer_m(1, 2, 1) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  // both methods must agree
  const double both = kummer_m(1.5, 3.5, -1.0, {}, KummerMethod::Both);
  CHECK(both == doctest::Approx(kummer_m(1.5, 3.5, -1.0)).epsilon(1e-10));
  AccuracySpec tight;
  tight.max_terms = 100;
  CHECK_THROWS_AS(kummer_m(1, 1, 400.0, tight), ConvergenceError);
}

TEST_CASE("generalized hypergeometric") {
  CHECK(generalized_pfq({1.2, 3.0}, {0.7}, 0.0) == 1.0);
  // 2F1(j-1, theta; theta+j-1; 1-y) against its Euler integral, theta = 0.5, j = 3, y = 0.4
  const double theta = 0.5, y = 0.4;
  const double series = generalized_pfq({2.0, theta}, {theta + 2.0}, 1.0 - y);
  const double integral =
      integrate([&](double x) { return std::pow(x, theta - 1) * (1 - x) * std::pow(1 - x * (1 - y), -2.0); }, 0, 1) /
      beta_fn(theta, 2.0);
  CHECK(std::abs(series - integral) < 1e-10);
  // 2F2(1,1;2,3.5;-0.5) against a double integral: (1,1;2) gives int_0^1 e^{zvu}..., use
  // 2F2 = int_0^1 int_0^1 B(1,2.5)^{-1} (1-v)^{1.5} e^{z u v} du dv
  const double f22 = generalized_pfq({1.0, 1.0}, {2.0, 3.5}, -0.5);
  const double dbl = integrate2d([](double u, double v) { return 2.5 * std::pow(1 - v, 1.5) * std::exp(-0.5 * u * v); },
                                 0, 1, 0, 1);
  CHECK(std::abs(f22 - dbl) < 1e-10);
  CHECK_THROWS_AS(generalized_pfq({1.0, 1.0, 1.0}, {2.0}, 0.5), DomainError);
}

TEST_CASE("beta function") {
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(beta_fn(2.5, 0.7) == doctest::Approx(beta_fn(0.7, 2.5)).epsilon(1e-14));
  CHECK(beta_fn(3.7, 1.0) == doctest::Approx(1.0 / 3.7).epsilon(1e-14));
  // conjugate pair gives a real value
  const std::complex<double> z(1.5, 0.8);
  const double b = beta_fn(z, std::conj(z));
  CHECK(std::isfinite(b));
  CHECK(b > 0.0);
}

TEST_CASE("quadrature") {
  CHECK(integrate([](double x) { return x * x; }, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(integrate([](double u) { return std::exp(-u) * (1 - u) * (1 - u); }, 0, 1) ==
        doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
  // integrable endpoint singularity
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0, 1) == doctest::Approx(2.0).epsilon(1e-9));
  auto f = [](double x) { return std::sin(3 * x) * std::exp(x); };
  CHECK(integrate(f, 0, 2) == integrate(f, 0, 2));  // bit-identical
  AccuracySpec shallow;
  shallow.quad_max_depth = 1;
  shallow.abs_tol = 1e-15;
  shallow.rel_tol = 1e-15;
  CHECK_THROWS_AS(integrate([](double x) { return std::sin(200 * x); }, 0, 10, shallow, EndpointMode::None),
                  IntegrationError);
}

TEST_CASE("harmonic numbers") {
  CHECK(harmonic_h(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(harmonic_h(2.0) == doctest::Approx(1.5).epsilon(1e-14));
  const double q = integrate([](double x) { return (1 - std::pow(x, 1.5)) / (1 - x); }, 0, 1);
  CHECK(std::abs(harmonic_h(1.5) - q) < 1e-10);
  CHECK(euler_gamma() == doctest::Approx(0.5772156649015329));
}

TEST_CASE("binomial helpers") {
  CHECK(choose(10, 3) == doctest::Approx(120.0));
  CHECK(choose(4, 7) == 0.0);
  CHECK(std::isinf(log_choose(3, -1)));
}

TEST_CASE("compensated sum and accuracy spec") {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  CHECK(s.value() == doctest::Approx(1e-13).epsilon(1e-6));
  AccuracySpec bad;
  bad.abs_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

}
