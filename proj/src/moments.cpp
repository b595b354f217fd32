#include "dchain/moments.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dchain/limitchain.hpp"

namespace dchain {

namespace {

// log of x_(m) with the convention x_(m) = 1 for m <= 0.
double log_rf(double x, long m) {
  if (m <= 0) return 0.0;
  return log_rising_factorial(x, m).log_abs;
}

double log_fact(long k) { return log_gamma(static_cast<double>(k) + 1.0); }

// Sum of term(i) for i >= i0 by doubling blocks.  Once consecutive block ratios
// settle below 0.9 the remaining tail is extrapolated geometrically.
double extrapolated_sum(const std::function<double(std::size_t)>& term, std::size_t i0,
                        const AccuracySpec& acc, const char* what) {
  CompensatedSum s;
  std::size_t N = std::max<std::size_t>(1024, 2 * i0);
  for (std::size_t i = i0; i <= N; ++i) s.add(term(i));
  const std::size_t cap = std::size_t{1} << 24;
  double prev_block = std::nan(""), prev_est = std::nan(""), est = std::nan("");
  int divergent_votes = 0;
  while (true) {
    CompensatedSum block;
    for (std::size_t i = N + 1; i <= 2 * N; ++i) block.add(term(i));
    const double b = block.value();
    s.add(b);
    N *= 2;
    if (!std::isnan(prev_block)) {
      if (b == 0.0) return s.value();
      const double r = b / prev_block;
      if (std::abs(r) >= 0.9) {
        if (++divergent_votes >= 3)
          throw ConvergenceError(std::string(what) + ": block sums do not decay (series appears divergent)",
                                 s.value(), b, static_cast<long>(N));
      } else {
        divergent_votes = 0;
        est = s.value() + b * r / (1.0 - r);
        if (!std::isnan(prev_est) &&
            std::abs(est - prev_est) <= std::max(acc.abs_tol, acc.rel_tol * std::abs(est)))
          return est;
        prev_est = est;
      }
    }
    prev_block = b;
    if (N >= cap) {
      if (!std::isnan(est) && std::abs(est - prev_est) < 1e-8) return est;
      throw ConvergenceError(std::string(what) + ": tail extrapolation did not settle", s.value(), b,
                             static_cast<long>(N));
    }
  }
}

// Downward recursion for P(X^m_l = 1), l = 1..m+1 (index m+1 is the sentinel 1).
std::vector<double> marginal_table(std::size_t m, const PSequence& p) {
  std::vector<double> v(m + 2, 0.0);
  v[m + 1] = 1.0;
  v[m] = 0.0;
  for (std::size_t l = m - 1; l >= 1; --l) {
    v[l] = p.q(l) * (1.0 - v[l + 1]);
    if (l == 1) break;
  }
  return v;
}

// q_{l-j} prod_{s=l-j+1}^{l-2} p_s: the spacing below a 1 at index l.
double spacing_weight(std::size_t j, std::size_t l, const PSequence& p) {
  double w = p.q(l - j);
  for (std::size_t s = l - j + 1; s + 2 <= l; ++s) w *= p.p(s);
  return w;
}

void check_j(std::size_t n, std::size_t j) {
  if (j < 2) throw DomainError("cycle size j must be at least 2");
  if (n < j) throw DomainError("cycle size j must not exceed n");
}

// P(eta^n_i = 1) = sum_{k=1}^{n-i} (-1)^{k+1} theta^k/(theta+i-1)_(k), 3 <= i; 0 for i >= n.
double eta_marginal(std::size_t i, std::size_t n, double theta) {
  if (i >= n) return 0.0;
  CompensatedSum s;
  double t = 1.0;
  for (std::size_t k = 1; k + i <= n; ++k) {
    t *= theta / (theta + static_cast<double>(i + k - 2));
    s.add(k % 2 == 1 ? t : -t);
  }
  return s.value();
}

void check_theta(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) throw DomainError("theta must be positive and finite");
}

}  // namespace

// ------------------------------------------------------------- K_n ---

double mean_k(std::size_t n, const PSequence& p) {
  if (n < 2) throw DomainError("mean_k: n must be at least 2");
  if (n <= 3) return 1.0;
  CompensatedSum s;
  for (std::size_t i = 1; i + 1 <= n; ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; i + j + 1 <= n; ++j) {
      prod *= p.q(i + j);
      if (prod == 0.0) break;
      s.add(j % 2 == 0 ? prod : -prod);
    }
  }
  return s.value();
}

double psi_alpha(const PSequence& p, double alpha, const AccuracySpec& acc) {
  if (!(alpha >= 0.0)) throw DomainError("psi_alpha: alpha must be nonnegative");
  return extrapolated_sum([&](std::size_t i) { return p.q(i) - alpha / static_cast<double>(i); }, 1, acc,
                          "psi_alpha");
}

double abar(const PSequence& p, std::size_t j, const AccuracySpec& acc) {
  if (j < 1) throw DomainError("abar: j must be at least 1");
  return extrapolated_sum(
      [&](std::size_t i) {
        double prod = 1.0;
        for (std::size_t l = i; l <= i + j && prod != 0.0; ++l) prod *= p.q(l);
        return prod;
      },
      1, acc, "abar");
}

LimitEstimate mean_k_asymptotic(const PSequence& p, double alpha, int m, const AccuracySpec& acc) {
  if (m < 1) throw DomainError("mean_k_asymptotic: m must be at least 1");
  acc.validate();
  // n q_n -> alpha, checked over a probe window
  const std::size_t H = std::size_t{1} << 20;
  const double vH = static_cast<double>(H) * p.q(H), vh = static_cast<double>(H / 2) * p.q(H / 2);
  const double dev = std::abs(vH - alpha), dev_half = std::abs(vh - alpha);
  const double scale = std::max(1.0, alpha);
  if (!(dev <= 1e-3 * scale || (dev <= 0.05 * scale && dev <= 0.75 * dev_half)))
    throw DomainError("mean_k_asymptotic: n q_n does not approach alpha (n q_n = " + std::to_string(vH) +
                      " at n = " + std::to_string(H) + ")");
  const double psi = psi_alpha(p, alpha, acc);
  CompensatedSum s;
  s.add(alpha * euler_gamma());
  s.add(psi);
  double last = 0.0;
  for (int j = 1; j <= 2 * m; ++j) {
    last = abar(p, static_cast<std::size_t>(j), acc);
    s.add(j % 2 == 0 ? last : -last);
  }
  return {s.value(), last, m};
}

double mean_k_eta(std::size_t n, double theta) {
  check_theta(theta);
  if (n < 2) throw DomainError("mean_k_eta: n must be at least 2");
  if (n <= 3) return 1.0;
  CompensatedSum s;
  s.add(1.0);
  for (std::size_t i = 3; i + 1 <= n; ++i) s.add(theta / (theta + static_cast<double>(i) - 1.0));
  for (std::size_t i = 3; i + 2 <= n; ++i) {
    // j = 2 .. n-i terms for this i
    double t = theta / (theta + static_cast<double>(i) - 1.0);
    for (std::size_t j = 2; j + i <= n; ++j) {
      t *= theta / (theta + static_cast<double>(i + j) - 2.0);
      s.add(j % 2 == 1 ? t : -t);
    }
  }
  return s.value();
}

double psi_eta(double theta) {
  check_theta(theta);
  return 1.0 - theta * harmonic_h(theta + 1.0);
}

double abar_eta(double theta, std::size_t j) {
  check_theta(theta);
  if (j < 1) throw DomainError("abar_eta: j must be at least 1");
  const double jj = static_cast<double>(j);
  return std::exp((jj + 1.0) * std::log(theta) - std::log(jj) - log_rf(theta + 2.0, static_cast<long>(j)));
}

LimitEstimate mean_k_eta_limit(double theta, LimitMethod method, int m, const AccuracySpec& acc) {
  check_theta(theta);
  acc.validate();
  const double head = psi_eta(theta) + theta * euler_gamma();
  if (method == LimitMethod::Series) {
    if (m < 1) throw DomainError("mean_k_eta_limit: m must be at least 1");
    CompensatedSum s;
    s.add(head);
    double last = 0.0;
    for (int j = 1; j <= 2 * m; ++j) {
      last = abar_eta(theta, static_cast<std::size_t>(j));
      s.add(j % 2 == 0 ? last : -last);
    }
    return {s.value(), last, m};
  }
  const double di = integrate2d(
      [theta](double x, double y) { return std::exp(-theta * x * y) * std::pow(1.0 - x, theta + 1.0); }, 0.0, 1.0,
      0.0, 1.0, acc);
  const double via_pfq = generalized_pfq({1.0, 1.0}, {2.0, theta + 3.0}, -theta, acc) / (theta + 2.0);
  const double diff = theta * theta * std::abs(di - via_pfq);
  const double quad_err = std::max(acc.abs_tol, acc.rel_tol * std::abs(theta * theta * di));
  if (diff > 1e3 * quad_err)
    throw ConvergenceError("mean_k_eta_limit: double integral and 2F2 forms disagree", di, di - via_pfq, 0);
  return {head - theta * theta * di, std::max(diff, quad_err), 0};
}

// ---------------------------------------------------------- C_j(n) ---

double pattern_probability(std::size_t j, std::size_t i, std::size_t m, const PSequence& p) {
  if (j < 2) throw DomainError("pattern_probability: j must be at least 2");
  if (m < j || i < j + 1 || i > m + 1 || i == m) return 0.0;
  if (i == m + 1) return spacing_weight(j, m + 1, p);
  CompensatedSum marg;
  double prod = 1.0;
  for (std::size_t k = 0; i + k + 1 <= m; ++k) {
    prod *= p.q(i + k);
    if (prod == 0.0) break;
    marg.add(k % 2 == 0 ? prod : -prod);
  }
  return marg.value() * spacing_weight(j, i, p);
}

double mean_cj(std::size_t n, std::size_t j, const PSequence& p) {
  check_j(n, j);
  CompensatedSum s;
  s.add(spacing_weight(j, n + 1, p));
  for (std::size_t i = j + 1; i + 1 <= n; ++i) {
    const double w = spacing_weight(j, i, p);
    if (w == 0.0) continue;
    double prod = 1.0;
    for (std::size_t k = 0; i + k + 1 <= n; ++k) {
      prod *= p.q(i + k);
      if (prod == 0.0) break;
      s.add(k % 2 == 0 ? w * prod : -w * prod);
    }
  }
  return s.value();
}

double mean_cj_eta(std::size_t n, std::size_t j, double theta) {
  check_theta(theta);
  check_j(n, j);
  const long nn = static_cast<long>(n), jj = static_cast<long>(j);
  if (j == n) return std::exp(log_fact(nn - 2) - log_rf(theta + 2.0, nn - 3));
  if (j + 1 == n) return 0.0;
  CompensatedSum s;
  s.add(std::exp(std::log(theta) + log_rf(static_cast<double>(nn - jj + 1), jj - 2) -
                 log_rf(theta + static_cast<double>(nn - jj), jj - 1)));
  const double c2 = std::exp(log_fact(jj - 2) - log_rf(theta + 2.0, jj - 3));
  double t = 1.0;
  for (long k = 1; k <= nn - jj - 1; ++k) {
    t *= theta / (theta + static_cast<double>(jj + k - 1));
    s.add(k % 2 == 1 ? c2 * t : -c2 * t);
  }
  for (long i = jj + 3; i <= nn - 1; ++i) {
    const double ci = std::exp(std::log(theta) + log_rf(static_cast<double>(i - jj), jj - 2) -
                               log_rf(theta + static_cast<double>(i - jj - 1), jj - 1));
    double u = 1.0;
    for (long k = 1; k <= nn - i; ++k) {
      u *= theta / (theta + static_cast<double>(i + k - 2));
      s.add(k % 2 == 1 ? ci * u : -ci * u);
    }
  }
  return s.value();
}

double bbar_eta(double theta, std::size_t j, std::size_t k) {
  check_theta(theta);
  if (j < 2 || k < 1) throw DomainError("bbar_eta: need j >= 2 and k >= 1");
  const double kd = static_cast<double>(k), jd = static_cast<double>(j);
  const double lt = kd * std::log(theta);
  const double a = std::exp(lt + log_fact(static_cast<long>(k) - 1) - log_rf(theta + 1.0, static_cast<long>(k)) -
                            log_rf(jd - 1.0, static_cast<long>(k) + 1)) *
                   (kd * (jd - 1.0) + theta * (kd + jd - 1.0));
  const double b = std::exp(lt + log_fact(static_cast<long>(j) - 2) -
                            log_rf(theta + 1.0, static_cast<long>(k + j))) *
                   ((kd - 1.0 + (theta + 1.0) * jd) * (theta + jd) - kd);
  return a - b;
}

LimitEstimate mean_cj_eta_limit(double theta, std::size_t j, LimitMethod method, int m, const AccuracySpec& acc) {
  check_theta(theta);
  if (j < 2) throw DomainError("mean_cj_eta_limit: j must be at least 2");
  acc.validate();
  const long jj = static_cast<long>(j);
  if (method == LimitMethod::Series) {
    if (m < 1) throw DomainError("mean_cj_eta_limit: m must be at least 1");
    CompensatedSum s;
    if (j == 2) {
      s.add(phi_eta(3, theta, acc, EtaPhiForm::KummerSeries));
    } else {
      const double c2 = std::exp(log_fact(jj - 2) - log_rf(theta + 2.0, jj - 3));
      s.add(c2 * phi_eta(j + 1, theta, acc, EtaPhiForm::KummerSeries));
    }
    for (int k = 1; k <= 2 * m; ++k) {
      const double b = bbar_eta(theta, j, static_cast<std::size_t>(k));
      s.add(k % 2 == 1 ? b : -b);
    }
    return {s.value(), bbar_eta(theta, j, static_cast<std::size_t>(2 * m + 1)), m};
  }
  const double jd = static_cast<double>(j);
  // The integrand is singular at the corner x = 1, y = 0.  With s = 1 - x = rho c and
  // y = rho (1 - c) the singular factor s^{j-2}/(1-x+xy)^{j-1} times the Jacobian rho
  // becomes c^{j-2} / (1 - rho c (1-c))^{j-1}, which is bounded.  The remaining
  // x^{theta-1} singularity (s -> 1) is absorbed by v = (1-s)^theta when rho is near 1.
  auto h = [theta, jd](double rho, double c) {  // everything except x^{theta-1}
    const double y = rho * (1.0 - c);
    if (y >= 1.0) return 0.0;
    const double ratio = 1.0 / (1.0 - rho * c * (1.0 - c));
    return theta * theta * std::exp(-theta * y) * std::pow(c, jd - 2.0) * std::pow(ratio, jd - 1.0) *
           std::pow(1.0 - y, theta + jd - 1.0);
  };
  auto inner = [&](double rho) {
    const double lo = rho > 1.0 ? 1.0 - 1.0 / rho : 0.0, hi = rho > 1.0 ? 1.0 / rho : 1.0;
    if (hi <= lo) return 0.0;
    if (rho < 0.5) {
      return integrate([&](double c) { return h(rho, c) * std::pow(1.0 - rho * c, theta - 1.0); }, lo, hi, acc);
    }
    // limits written out exactly: 1 - rho*(1/rho) may round to a tiny positive number,
    // which the power theta would magnify
    const double v_lo = rho > 1.0 ? 0.0 : std::pow(1.0 - rho, theta);
    const double v_hi = rho > 1.0 ? std::pow(2.0 - rho, theta) : 1.0;
    const double I = integrate(
        [&](double v) {
          const double c = (1.0 - std::pow(v, 1.0 / theta)) / rho;
          return h(rho, std::clamp(c, 0.0, 1.0));
        },
        v_lo, v_hi, acc);
    return I / (theta * rho);
  };
  const double di = integrate(inner, 0.0, 1.0, acc) + integrate(inner, 1.0, 2.0, acc);
  CompensatedSum s;
  s.add(di);
  if (j >= 3) {
    // int_0^1 e^{-theta x} (1-x)^{theta+j} dx = phi_{j+2}/theta
    const double ij = phi_eta(j + 2, theta, acc, EtaPhiForm::KummerSeries) / theta;
    const double pre = std::exp(3.0 * std::log(theta) + log_fact(jj - 2) - log_rf(theta, jj + 1));
    s.add(pre * (theta + jd - 1.0 - ((theta + jd - 1.0) * (theta + jd - 1.0) + jd - 1.0) * ij));
  } else {
    s.add(-theta / (theta + 1.0) * phi_eta(4, theta, acc, EtaPhiForm::KummerSeries));
  }
  const double v = s.value();
  return {v, std::max(acc.abs_tol, acc.rel_tol * std::abs(v)), 0};
}

double variance_cj(std::size_t n, std::size_t j, const PSequence& p) {
  check_j(n, j);
  // spacing weights are horizon independent: R^{(m)}_l = P(X^m_l = 1) w_l
  std::vector<double> w(n + 2, 0.0);
  for (std::size_t l = j + 1; l <= n + 1; ++l) w[l] = spacing_weight(j, l, p);
  auto R_row = [&](std::size_t m) {
    std::vector<double> r(m + 2, 0.0);
    if (m < j) return r;
    const std::vector<double> marg = marginal_table(m, p);
    for (std::size_t l = j + 1; l <= m + 1; ++l) r[l] = marg[l] * w[l];
    return r;
  };
  const std::vector<double> R = R_row(n);
  CompensatedSum v;
  for (std::size_t i = j + 1; i <= n + 1; ++i) v.add(R[i] * (1.0 - R[i]));
  for (std::size_t i = 2 * j + 1; i <= n + 1; ++i) {
    if (R[i] == 0.0) continue;
    const std::vector<double> Rm = R_row(i - j - 1);
    for (std::size_t l = j + 1; l <= i - j; ++l) v.add(2.0 * R[i] * Rm[l]);
  }
  CompensatedSum below;  // sum_{l<i} R_l
  for (std::size_t i = j + 1; i <= n + 1; ++i) {
    v.add(-2.0 * R[i] * below.value());
    below.add(R[i]);
  }
  return v.value();
}

double cov_eta(std::size_t n, std::size_t i, std::size_t j, double theta) {
  check_theta(theta);
  if (!(2 < i && i < j && j + 1 < n)) throw DomainError("cov_eta: need 2 < i < j < n-1");
  const double ej = eta_marginal(j, n, theta), ei = eta_marginal(i, n, theta);
  return ej * eta_marginal(i, j - 1, theta) - ej * ei;
}

double cov_eta_adjacent(std::size_t n, std::size_t j, double theta) {
  check_theta(theta);
  if (!(j >= 4 && j + 1 < n)) throw DomainError("cov_eta_adjacent: need 3 < j < n-1");
  const std::size_t i = j - 1;
  auto tail = [&](std::size_t from) {
    CompensatedSum s;
    for (std::size_t l = from; l + 1 <= n; ++l) {
      const double t = std::exp(static_cast<double>(l) * std::log(theta) - log_gamma(theta + static_cast<double>(l)));
      s.add(l % 2 == 0 ? t : -t);
    }
    return s.value();
  };
  const double sj = tail(j), si = tail(i);
  const double log_pre = log_gamma(theta + static_cast<double>(i) - 1.0) +
                         log_gamma(theta + static_cast<double>(j) - 1.0) -
                         static_cast<double>(i + j - 2) * std::log(theta);
  const double sign = ((i + j + 1) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(log_pre) * sj * si;
}

double lambda_esf(std::size_t n, double theta) {
  check_theta(theta);
  if (n < 1) throw DomainError("lambda_esf: n must be positive");
  if (n == 1) return 0.0;
  const double nd = static_cast<double>(n);
  const double base = log_gamma(nd + 1.0) - log_gamma(nd + theta);
  CompensatedSum s;
  for (std::size_t j = 0; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const double lt = base + jd * std::log(theta) - log_gamma(jd + 1.0) + log_gamma(nd + theta - jd) -
                      log_gamma(nd - jd + 1.0);
    const double t = std::exp(lt);
    s.add(j % 2 == 0 ? t : -t);
  }
  return std::clamp(s.value(), 0.0, 1.0);
}

}  // namespace dchain
