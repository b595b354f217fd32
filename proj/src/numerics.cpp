#include "dchain/numerics.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <queue>
#include <limits>
#include <string>

namespace dchain {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }

}  // namespace

void AccuracySpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
    throw DomainError("AccuracySpec: tolerances must be strictly positive");
  if (max_terms < 100) throw DomainError("AccuracySpec: max_terms must be at least 100");
  if (quad_max_depth <= 0) throw DomainError("AccuracySpec: quad_max_depth must be positive");
}

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double SignedLog::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

double rising_factorial(double x, long m) {
  if (m < 0) throw DomainError("rising_factorial: m must be nonnegative");
  double r = 1.0;
  for (long k = 0; k < m; ++k) {
    r *= (x + static_cast<double>(k));
    if (!std::isfinite(r))
      throw OverflowError("rising_factorial(" + std::to_string(x) + ", " + std::to_string(m) +
                          ") overflows; use log_rising_factorial");
  }
  return r;
}

SignedLog log_rising_factorial(double x, long m) {
  if (m < 0) throw DomainError("log_rising_factorial: m must be nonnegative");
  SignedLog out;
  if (m == 0) return out;
  if (x > 0.0 && m > 64) {
    out.log_abs = log_gamma(x + static_cast<double>(m)) - log_gamma(x);
    return out;
  }
  // Small m, or nonpositive x where factors may change sign: explicit product.
  CompensatedSum s;
  int sign = 1;
  for (long k = 0; k < m; ++k) {
    double f = x + static_cast<double>(k);
    if (f == 0.0) throw DomainError("log_rising_factorial: zero factor x+k = 0");
    if (f < 0.0) sign = -sign;
    s.add(std::log(std::abs(f)));
  }
  out.log_abs = s.value();
  out.sign = sign;
  return out;
}

double log_gamma(double x) {
  if (is_nonpositive_integer(x)) throw DomainError("log_gamma: pole at nonpositive integer");
  return boost::math::lgamma(x);
}

std::complex<double> log_gamma(std::complex<double> z) {
  if (z.imag() == 0.0) {
    if (z.real() > 0.0) return {log_gamma(z.real()), 0.0};
    if (is_nonpositive_integer(z.real())) throw DomainError("log_gamma: pole at nonpositive integer");
  }
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
    const double pi = boost::math::constants::pi<double>();
    return std::log(pi / std::sin(pi * z)) - log_gamma(1.0 - z);
  }
  // Shift upward, then Stirling's series.
  std::complex<double> shift = 0.0;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  static const double kCoef[] = {1.0 / 12.0,          -1.0 / 360.0,        1.0 / 1260.0,
                                 -1.0 / 1680.0,       1.0 / 1188.0,        -691.0 / 360360.0,
                                 1.0 / 156.0,         -3617.0 / 122400.0};
  const double half_log_2pi = 0.5 * std::log(2.0 * boost::math::constants::pi<double>());
  std::complex<double> r = (z - 0.5) * std::log(z) - z + half_log_2pi;
  std::complex<double> zinv = 1.0 / z;
  std::complex<double> zpow = zinv;
  std::complex<double> z2 = zinv * zinv;
  for (double c : kCoef) {
    r += c * zpow;
    zpow *= z2;
  }
  return r - shift;
}

double digamma(double x) {
  if (is_nonpositive_integer(x)) throw DomainError("digamma: pole at nonpositive integer");
  return boost::math::digamma(x);
}

double euler_gamma() { return boost::math::constants::euler<double>(); }

double harmonic_h(double y) {
  if (!(y > -1.0)) throw DomainError("harmonic_h: requires y > -1");
  return digamma(y + 1.0) + euler_gamma();
}

double generalized_pfq(const std::vector<double>& a, const std::vector<double>& b, double z,
                       const AccuracySpec& acc) {
  acc.validate();
  for (double bi : b)
    if (is_nonpositive_integer(bi))
      throw DomainError("generalized_pfq: lower parameter is a nonpositive integer");
  const std::size_t p = a.size(), q = b.size();
  bool terminating = false;
  for (double ai : a)
    if (is_nonpositive_integer(ai)) terminating = true;
  if (!terminating) {
    if (p > q + 1) throw DomainError("generalized_pfq: divergent series (p > q+1)");
    if (p == q + 1 && std::abs(z) >= 1.0)
      throw DomainError("generalized_pfq: p = q+1 requires |z| < 1");
  }
  if (z == 0.0) return 1.0;

  CompensatedSum sum;
  double term = 1.0;
  sum.add(term);
  int small_run = 0;
  for (long j = 0; j < acc.max_terms; ++j) {
    double ratio = z / static_cast<double>(j + 1);
    for (double ai : a) ratio *= (ai + static_cast<double>(j));
    for (double bi : b) ratio /= (bi + static_cast<double>(j));
    term *= ratio;
    sum.add(term);
    if (!std::isfinite(term) || !std::isfinite(sum.value()))
      throw ConvergenceError("generalized_pfq: overflow", sum.value(), term, j + 1);
    if (std::abs(term) <= acc.abs_tol * std::abs(sum.value())) {
      if (++small_run >= 3) return sum.value();
    } else {
      small_run = 0;
    }
  }
  throw ConvergenceError("generalized_pfq: no convergence within max_terms", sum.value(), term,
                         acc.max_terms);
}

double kummer_m(double a, double b, double z, const AccuracySpec& acc, KummerMethod method) {
  if (is_nonpositive_integer(b)) throw DomainError("kummer_m: b is a nonpositive integer");
  auto series = [&] { return generalized_pfq({a}, {b}, z, acc); };
  auto integral = [&] {
    if (!(b > a && a > 0.0)) throw DomainError("kummer_m: integral method requires b > a > 0");
    double lognorm = log_gamma(b) - log_gamma(a) - log_gamma(b - a);
    double v = integrate(
        [&](double t) {
          if (t <= 0.0 || t >= 1.0) return 0.0;
          return std::exp(z * t + (a - 1.0) * std::log(t) + (b - a - 1.0) * std::log1p(-t) +
                          lognorm);
        },
        0.0, 1.0, acc);
    return v;
  };
  switch (method) {
    case KummerMethod::Series:
      return series();
    case KummerMethod::Integral:
      return integral();
    case KummerMethod::Both: {
      double s = series(), i = integral();
      double tol = 10.0 * (acc.abs_tol + acc.rel_tol * std::abs(s));
      if (std::abs(s - i) > tol)
        throw ConvergenceError("kummer_m: series and integral disagree by " +
                                   std::to_string(std::abs(s - i)),
                               s, i - s, 0);
      return s;
    }
  }
  return series();
}

double log_beta(double z1, double z2) {
  if (!(z1 > 0.0) || !(z2 > 0.0)) throw DomainError("beta_fn: arguments must be positive");
  return log_gamma(z1) + log_gamma(z2) - log_gamma(z1 + z2);
}

double beta_fn(double z1, double z2) { return std::exp(log_beta(z1, z2)); }

double beta_fn(std::complex<double> z1, std::complex<double> z2) {
  if (!(z1.real() > 0.0) || !(z2.real() > 0.0))
    throw DomainError("beta_fn: arguments must have positive real part");
  if (z1.imag() == 0.0 && z2.imag() == 0.0) return beta_fn(z1.real(), z2.real());
  std::complex<double> v = std::exp(log_gamma(z1) + log_gamma(z2) - log_gamma(z1 + z2));
  if (std::abs(v.imag()) > 1e-10 * std::abs(v))
    throw DomainError("beta_fn: complex-valued result (arguments are not a conjugate pair)");
  return v.real();
}

QuadResult integrate_with_error(const std::function<double(double)>& f, double a, double b,
                                const AccuracySpec& acc, EndpointMode mode) {
  acc.validate();
  if (a == b) return {};
  if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate: finite interval required");
  std::function<double(double)> g;
  double lo = a, hi = b;
  if (mode == EndpointMode::Smoothstep) {
    const double w = b - a;
    g = [&f, a, w](double t) {
      double jac = 6.0 * t * (1.0 - t);
      if (jac == 0.0) return 0.0;
      return f(a + w * t * t * (3.0 - 2.0 * t)) * w * jac;
    };
    lo = 0.0;
    hi = 1.0;
  } else {
    g = f;
  }
  // Global adaptive scheme: always bisect the interval with the largest error
  // estimate.  Boost supplies the G7/K15 rule on each piece.
  struct Piece {
    double a, b, value, error, l1;
    int depth;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto rule = [&g](double a0, double b0, int depth) {
    double e = 0.0, l = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, a0, b0, 0, 0.0, &e, &l);
    return Piece{a0, b0, v, e, l, depth};
  };
  const std::size_t max_pieces = 20000;
  std::priority_queue<Piece> heap;
  std::vector<Piece> done;  // pieces that cannot be split further
  heap.push(rule(lo, hi, 0));
  auto totals = [&](double& v, double& e, double& l) {
    CompensatedSum sv, se, sl;
    auto add = [&](const Piece& p) { sv.add(p.value); se.add(p.error); sl.add(p.l1); };
    auto copy = heap;
    while (!copy.empty()) { add(copy.top()); copy.pop(); }
    for (const Piece& p : done) add(p);
    v = sv.value();
    e = se.value();
    l = sl.value();
  };
  double v = heap.top().value, err = heap.top().error, l1 = heap.top().l1;
  std::size_t iter = 0;
  while (!heap.empty()) {
    if (err <= std::max(acc.abs_tol, acc.rel_tol * l1)) break;
    if (heap.size() + done.size() >= max_pieces) break;
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.depth >= acc.quad_max_depth || !(mid > worst.a && mid < worst.b)) {
      done.push_back(worst);
    } else {
      Piece left = rule(worst.a, mid, worst.depth + 1), right = rule(mid, worst.b, worst.depth + 1);
      v += left.value + right.value - worst.value;
      err += left.error + right.error - worst.error;
      l1 += left.l1 + right.l1 - worst.l1;
      heap.push(left);
      heap.push(right);
    }
    // refresh the running totals now and then to shed accumulated rounding
    if (++iter % 256 == 0) totals(v, err, l1);
  }
  totals(v, err, l1);
  if (!std::isfinite(v)) throw IntegrationError("integrate: non-finite result", v, err);
  const double target = std::max(acc.abs_tol, acc.rel_tol * l1);
  if (err > target) throw IntegrationError("integrate: error target not reached", v, err);
  return {v, err};
}

double integrate(const std::function<double(double)>& f, double a, double b, const AccuracySpec& acc,
                 EndpointMode mode) {
  return integrate_with_error(f, a, b, acc, mode).value;
}

double integrate2d(const std::function<double(double, double)>& f, double ax, double bx, double ay,
                   double by, const AccuracySpec& acc, EndpointMode mode) {
  auto outer = [&](double y) {
    return integrate([&](double x) { return f(x, y); }, ax, bx, acc, mode);
  };
  return integrate(outer, ay, by, acc, mode);
}

double log_choose(long n, long k) {
  if (k < 0 || k > n || n < 0) return -std::numeric_limits<double>::infinity();
  return log_gamma(static_cast<double>(n) + 1.0) - log_gamma(static_cast<double>(k) + 1.0) -
         log_gamma(static_cast<double>(n - k) + 1.0);
}

double choose(long n, long k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (n <= 60) {
    // exact in double for this range
    double r = 1.0;
    k = std::min(k, n - k);
    for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
  }
  return std::exp(log_choose(n, k));
}

}  // namespace dchain
