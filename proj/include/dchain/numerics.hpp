#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dchain/errors.hpp"

namespace dchain {

struct AccuracySpec {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  long max_terms = 1000000;
  int quad_max_depth = 30;

  // Throws DomainError if any field is out of range.
  void validate() const;
};

// Neumaier-compensated running sum; used for the long alternating sums.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SignedLog {
  double log_abs = 0.0;  // log |value|
  int sign = 1;          // +1, -1 (0 for an exact zero)
  double value() const;
};

// x (x+1) ... (x+m-1).  Throws OverflowError instead of returning inf.
double rising_factorial(double x, long m);
// log |x_(m)| together with its sign.  Throws DomainError when x+k == 0.
SignedLog log_rising_factorial(double x, long m);

double log_gamma(double x);
std::complex<double> log_gamma(std::complex<double> z);
double digamma(double x);
double euler_gamma();

// Generalized harmonic number H_y = psi(y+1) + gamma, y > -1.
double harmonic_h(double y);

// Sum_j prod(a)_(j) z^j / (prod(b)_(j) j!).  Terminates when |term| falls
// below abs_tol * |sum| three times in a row.
double generalized_pfq(const std::vector<double>& a, const std::vector<double>& b, double z,
                       const AccuracySpec& acc = {});

enum class KummerMethod { Series, Integral, Both };

// Confluent hypergeometric M(a, b, z).  With Both the series and the Euler
// integral are evaluated and must agree within acc (b > a > 0 required).
double kummer_m(double a, double b, double z, const AccuracySpec& acc = {},
                KummerMethod method = KummerMethod::Series);

double beta_fn(double z1, double z2);
// Complex Beta function; the result must be real (e.g. conjugate arguments).
double beta_fn(std::complex<double> z1, std::complex<double> z2);
double log_beta(double z1, double z2);

enum class EndpointMode {
  None,       // plain adaptive Gauss-Kronrod on [a, b]
  Smoothstep  // substitute x = a + (b-a)(3t^2 - 2t^3) to tame endpoint singularities
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (G7/K15) on [a, b].  Throws IntegrationError when the
// error estimate stays above max(abs_tol, rel_tol*|I|) at the depth limit.
QuadResult integrate_with_error(const std::function<double(double)>& f, double a, double b,
                                const AccuracySpec& acc = {},
                                EndpointMode mode = EndpointMode::Smoothstep);
double integrate(const std::function<double(double)>& f, double a, double b,
                 const AccuracySpec& acc = {}, EndpointMode mode = EndpointMode::Smoothstep);

// Nested adaptive integral of f(x, y) over [ax, bx] x [ay, by] (x inner).
double integrate2d(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                   double by, const AccuracySpec& acc = {},
                   EndpointMode mode = EndpointMode::Smoothstep);

// log of the binomial coefficient C(n, k); -inf when k is out of range.
double log_choose(long n, long k);
double choose(long n, long k);

}  // namespace dchain
