#include "dchain/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dchain/numerics.hpp"

namespace dchain {

namespace {

const double kNegInf = -std::numeric_limits<double>::infinity();

double log_bracket(const ThetaSequence& theta, std::size_t n) {
  CompensatedSum s;
  for (std::size_t k = 2; k <= n; ++k) s.add(std::log(theta(k) + static_cast<double>(k - 1)));
  return s.value();  // theta_1 = 1
}

}  // namespace

// ------------------------------------------------------------- gamma ---

GammaTable::GammaTable(const ThetaSequence& theta, std::size_t N) : theta_(theta) {
  if (N < 1) throw DomainError("GammaTable: N must be positive");
  gamma_.assign(N + 1, 0.0);
  log_g_.assign(N + 1, 0.0);
  log_br_.assign(N + 1, 0.0);
  log_g_[0] = kNegInf;
  gamma_[1] = 0.0;
  if (N >= 2) gamma_[2] = 1.0 / (1.0 + theta(2));
  for (std::size_t i = 3; i <= N; ++i) {
    const double ti1 = theta.indicator_prob(i - 1);
    gamma_[i] = (1.0 - theta.indicator_prob(i)) * (gamma_[i - 1] + ti1 * gamma_[i - 2]);
  }
  // log G via the ratio G_{i-2}/G_{i-1}: G_i = G_{i-1} (1 + theta_i/(i-1) G_{i-2}/G_{i-1}).
  double ratio = 1.0;  // G_1/G_2
  for (std::size_t i = 3; i <= N; ++i) {
    const double x = theta(i) / static_cast<double>(i - 1) * ratio;
    log_g_[i] = log_g_[i - 1] + std::log1p(x);
    ratio = 1.0 / (1.0 + x);
  }
  CompensatedSum br;
  for (std::size_t i = 2; i <= N; ++i) {
    br.add(std::log(theta(i) + static_cast<double>(i - 1)));
    log_br_[i] = br.value();
  }
}

double GammaTable::gamma(std::size_t i) const {
  if (i < 1 || i >= gamma_.size()) throw DomainError("GammaTable: index out of range");
  return gamma_[i];
}

double GammaTable::log_G(std::size_t i) const {
  if (i >= log_g_.size()) throw DomainError("GammaTable: index out of range");
  return log_g_[i];
}

double GammaTable::G(std::size_t i) const { return std::exp(log_G(i)); }

double GammaTable::log_theta_bracket(std::size_t i) const {
  if (i < 1 || i >= log_br_.size()) throw DomainError("GammaTable: index out of range");
  return log_br_[i];
}

double gamma_n(const ThetaSequence& theta, std::size_t n, GammaMethod method) {
  if (n < 1) throw DomainError("gamma_n: n must be positive");
  switch (method) {
    case GammaMethod::Recursion:
      return GammaTable(theta, n).gamma(n);
    case GammaMethod::GProduct: {
      if (n == 1) return 0.0;
      const GammaTable t(theta, n);
      return std::exp(t.log_G(n - 1) + log_gamma(static_cast<double>(n)) - t.log_theta_bracket(n));
    }
    case GammaMethod::PProduct: {
      if (n == 1) return 0.0;
      const PSequence p = PSequence::from_theta_conditional(theta);
      double log_v = std::log(p.p(n)) - std::log1p(theta(2));
      for (std::size_t j = 2; j + 1 <= n; ++j)
        log_v += std::log(p.p(j)) - std::log(p.p(j) * p.p(j + 1) + p.q(j + 1));
      return std::exp(log_v);
    }
  }
  return 0.0;
}

double delta_n(double theta, double theta2star, std::size_t n) {
  if (!(theta > 0.0)) throw DomainError("delta_n: theta must be positive");
  if (!(theta2star > 0.0 && theta2star <= 1.0)) throw DomainError("delta_n: theta*_2 must lie in (0,1]");
  if (n == 0) return delta_inf(theta, theta2star);
  if (n == 1) return 0.0;
  if (n == 2) return 1.0 / (1.0 + theta2star);
  const double nn = static_cast<double>(n);
  CompensatedSum s;
  s.add(log_gamma(nn));
  s.add(std::log(theta * theta + theta + 2.0));
  s.add(log_rising_factorial(theta + 2.0, static_cast<long>(n) - 3).log_abs);
  s.add(-std::log1p(theta2star));
  s.add(-std::log(theta + 2.0));
  for (std::size_t k = 1; k + 2 <= n; ++k) {
    const double kk = static_cast<double>(k);
    s.add(-std::log(kk * (kk + 1.0) + theta * (theta + kk)));
  }
  return std::exp(s.value());
}

double delta_inf(double theta, double theta2star) {
  if (!(theta > 0.0)) throw DomainError("delta_inf: theta must be positive");
  if (!(theta2star > 0.0 && theta2star <= 1.0)) throw DomainError("delta_inf: theta*_2 must lie in (0,1]");
  // z_{1,2} = (3 + theta -/+ sqrt((1-theta)(1+3 theta)))/2, complex conjugates for theta > 1
  const std::complex<double> root = std::sqrt(std::complex<double>((1.0 - theta) * (1.0 + 3.0 * theta), 0.0));
  const std::complex<double> z1 = (3.0 + theta - root) / 2.0, z2 = (3.0 + theta + root) / 2.0;
  return (theta * theta + theta + 2.0) / (1.0 + theta2star) * beta_fn(z1, z2);
}

// ------------------------------------------------------ distributions ---

DistTable<int> k_distribution_y(std::size_t n, const ThetaSequence& theta) {
  if (n < 1) throw DomainError("k_distribution: n must be positive");
  std::vector<double> d(n + 2, 0.0);
  d[1] = 1.0;  // Y_1 = 1
  for (std::size_t i = 2; i <= n; ++i) {
    const double t = theta.indicator_prob(i);
    for (std::size_t k = i; k >= 1; --k) d[k] = d[k] * (1.0 - t) + d[k - 1] * t;
  }
  DistTable<int> out;
  for (std::size_t k = 1; k <= n; ++k)
    if (d[k] > 0.0) out.add(static_cast<int>(k), d[k]);
  return out;
}

DistTable<int> k_distribution_x(std::size_t n, const PSequence& p) {
  if (n < 2) throw DomainError("k_distribution: derangement chains need n >= 2");
  // d0[k], d1[k]: current index carries 0 / 1 with k ones seen so far (indices above)
  std::vector<double> d0(n + 2, 0.0), d1(n + 2, 0.0);
  d0[0] = 1.0;  // X_n = 0
  for (std::size_t r = n - 1; r >= 3; --r) {
    const double pr = p.p(r), qr = p.q(r);
    std::vector<double> n0(n + 2, 0.0), n1(n + 2, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      n0[k] = d0[k] * pr + d1[k];
      if (k >= 1) n1[k] = d0[k - 1] * qr;
    }
    d0.swap(n0);
    d1.swap(n1);
  }
  // X_2 = 0, X_1 = 1
  DistTable<int> out;
  for (std::size_t k = 0; k <= n; ++k) {
    const double m = d0[k] + d1[k];
    if (m > 0.0) out.add(static_cast<int>(k + 1), m);
  }
  return out;
}

DistTable<int> k_distribution_x_conditioned(std::size_t n, const ThetaSequence& theta) {
  if (n < 2) throw DomainError("k_distribution: derangement chains need n >= 2");
  std::vector<double> d0(n + 2, 0.0), d1(n + 2, 0.0);
  d1[1] = 1.0;  // Y_1 = 1
  for (std::size_t i = 2; i <= n; ++i) {
    const double t = theta.indicator_prob(i);
    std::vector<double> n0(n + 2, 0.0), n1(n + 2, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      n0[k] = (d0[k] + d1[k]) * (1.0 - t);
      if (i < n && k >= 1) n1[k] = d0[k - 1] * t;  // no 11, and Y_n = 0
    }
    d0.swap(n0);
    d1.swap(n1);
  }
  DistTable<int> out;
  for (std::size_t k = 0; k <= n; ++k)
    if (d0[k] > 0.0) out.add(static_cast<int>(k), d0[k]);
  out.normalize();
  return out;
}

double pgf_k_y(double s, std::size_t n, const ThetaSequence& theta) {
  if (!(s >= 0.0)) throw DomainError("pgf: s must be nonnegative");
  if (n < 1) throw DomainError("pgf: n must be positive");
  if (s == 0.0) return 0.0;  // K >= 1
  CompensatedSum l;
  l.add(std::log(s));  // theta_1 scaled too
  for (std::size_t k = 2; k <= n; ++k) {
    const double m = static_cast<double>(k - 1);
    l.add(std::log(s * theta(k) + m) - std::log(theta(k) + m));
  }
  return std::exp(l.value());
}

double pgf_k_x(double s, std::size_t n, const ThetaSequence& theta) {
  if (n < 2) throw DomainError("pgf: derangement chains need n >= 2");
  if (s == 0.0) return 0.0;
  return gamma_n(theta.scaled(s), n) / gamma_n(theta, n) * pgf_k_y(s, n, theta);
}

double pgf_from_distribution(const DistTable<int>& law, double s) {
  return law.expectation([s](int k) { return std::pow(s, k); });
}

// --------------------------------------------------------- joint laws ---

std::vector<int> expand_cycle_type(const CycleType& c) {
  std::vector<int> out;
  for (std::size_t j = 1; j <= c.counts.size(); ++j)
    for (int r = 0; r < c.c(j); ++r) out.push_back(static_cast<int>(j));
  return out;
}

namespace {

void validate_cycle_type(const CycleType& c) {
  for (int v : c.counts)
    if (v < 0) throw DomainError("cycle type: negative count");
  if (c.size() != static_cast<int>(c.counts.size()))
    throw DomainError("cycle type: sum j c_j must equal n = " + std::to_string(c.counts.size()));
}

void check_ordering_budget(const CycleType& c) {
  double log_count = log_gamma(static_cast<double>(c.cycles()) + 1.0);
  for (int v : c.counts) log_count -= log_gamma(static_cast<double>(v) + 1.0);
  if (log_count > std::log(static_cast<double>(kJointOrderingBudget)) + 1e-9)
    throw GuardError("joint_cycle_counts: " + std::to_string(std::llround(std::exp(log_count))) +
                     " distinct cycle orderings exceed the budget of " + std::to_string(kJointOrderingBudget) +
                     "; use Monte Carlo (estimate) instead");
}

// sum over distinct orderings of c-bar of prod_{i=1}^{||c||-1} w(eps_i), eps_i = n+1 - partial sums.
template <class W>
double ordering_sum(const CycleType& c, W&& w) {
  std::vector<int> cb = expand_cycle_type(c);
  const int n = static_cast<int>(c.counts.size());
  CompensatedSum total;
  do {
    double prod = 1.0;
    int partial = 0;
    for (std::size_t i = 0; i + 1 < cb.size(); ++i) {
      partial += cb[i];
      prod *= w(n + 1 - partial);
      if (prod == 0.0) break;
    }
    total.add(prod);
  } while (std::next_permutation(cb.begin(), cb.end()));
  return total.value();
}

}  // namespace

double joint_cycle_counts_y(const CycleType& c, const ThetaSequence& theta) {
  validate_cycle_type(c);
  check_ordering_budget(c);
  const std::size_t n = c.counts.size();
  const double sum = ordering_sum(c, [&](int e) { return theta(e) / static_cast<double>(e - 1); });
  return std::exp(log_gamma(static_cast<double>(n)) - log_bracket(theta, n)) * sum;
}

double joint_cycle_counts_x(const CycleType& c, const ThetaSequence& theta) {
  validate_cycle_type(c);
  if (c.c(1) != 0) return 0.0;  // X has no 1-cycles
  const std::size_t n = c.counts.size();
  if (n < 2) throw DomainError("joint_cycle_counts: n must be at least 2");
  return joint_cycle_counts_y(c, theta) / gamma_n(theta, n);
}

double joint_cycle_counts_x_p(const CycleType& c, const PSequence& p) {
  validate_cycle_type(c);
  if (c.c(1) != 0) return 0.0;
  check_ordering_budget(c);
  const std::size_t n = c.counts.size();
  if (n < 2) throw DomainError("joint_cycle_counts: n must be at least 2");
  double pref = 1.0;
  for (std::size_t i = 2; i + 1 <= n; ++i) pref *= p.p(i);
  const double sum = ordering_sum(c, [&](int e) {
    return p.q(static_cast<std::size_t>(e)) / (p.p(static_cast<std::size_t>(e)) * p.p(static_cast<std::size_t>(e - 1)));
  });
  // summing over distinct orderings absorbs the 1/prod c_i! factors
  return pref * sum;
}

double joint_cycle_counts_eta(const CycleType& c, double theta) {
  validate_cycle_type(c);
  if (c.c(1) != 0) return 0.0;
  check_ordering_budget(c);
  const std::size_t n = c.counts.size();
  if (n < 3) throw DomainError("joint_cycle_counts_eta: n must be at least 3");
  const int kk = c.cycles();
  std::vector<int> cb = expand_cycle_type(c);
  CompensatedSum total;
  do {
    double prod = 1.0;
    int partial = 0;
    int last_eps = 0;
    for (std::size_t i = 0; i + 1 < cb.size(); ++i) {
      partial += cb[i];
      const int e = static_cast<int>(n) + 1 - partial;
      prod *= (theta + e - 2.0) / (static_cast<double>(e - 1) * static_cast<double>(e - 2));
      last_eps = e;
    }
    double star = 1.0;
    if (cb.size() >= 2) star = last_eps > 3 ? 1.0 : 1.0 / (theta + 1.0);
    total.add(star * prod);
  } while (std::next_permutation(cb.begin(), cb.end()));
  const double log_pref = std::log1p(theta) + log_gamma(static_cast<double>(n) - 1.0) + kk * std::log(theta) -
                          log_rising_factorial(theta, static_cast<long>(n) - 1).log_abs;
  return std::exp(log_pref) * total.value();
}

double ordered_cycle_prefix_prob(const std::vector<int>& a, std::size_t n, const ThetaSequence& theta) {
  if (a.empty()) throw DomainError("ordered_cycle_prefix_prob: need at least one cycle length");
  long m = 0;
  for (int v : a) {
    if (v < 1) throw DomainError("ordered_cycle_prefix_prob: cycle lengths must be positive");
    m += v;
  }
  const long nn = static_cast<long>(n);
  if (m >= nn) throw DomainError("ordered_cycle_prefix_prob: sum of lengths must be < n");
  CompensatedSum l;
  l.add(log_gamma(static_cast<double>(nn) + 1.0) - log_gamma(static_cast<double>(nn - m) + 1.0));
  l.add(log_bracket(theta, static_cast<std::size_t>(nn - m)) - log_bracket(theta, n));
  long partial = 0;
  for (int v : a) {
    l.add(-std::log(static_cast<double>(nn - partial)));
    partial += v;
    l.add(std::log(theta(static_cast<std::size_t>(nn + 1 - partial))));
  }
  return std::exp(l.value());
}

// ------------------------------------------------------------ erase11 ---

ChainWord erase11(const ChainWord& y, std::size_t n) {
  if (n < 2) throw DomainError("erase11: horizon must be at least 2");
  if (y.n() + 1 < n) throw DomainError("erase11: input must cover indices 1..n-1");
  if (y.n() == 0 || y.at(1) != 1) throw DomainError("erase11: input must have w_1 = 1");
  ChainWord out;
  out.bits.assign(n, 0);
  out.bits[0] = 1;
  // beta_i: run of 1s directly above i, counted within indices <= n-1
  int run = 0;  // beta of the index being visited
  for (std::size_t i = n - 1; i >= 3; --i) {
    const int yi = y.at(i);
    if (yi && run % 2 == 0) out.bits[i - 1] = 1;
    run = yi ? run + 1 : 0;
  }
  return out;
}

ChainWord erase11_infinite(const ChainWord& window) {
  const std::size_t n = window.n();
  if (n == 0 || window.at(1) != 1) throw DomainError("erase11: input must have w_1 = 1");
  if (window.at(n) == 1)
    throw DomainError("erase11_infinite: a run of 1s reaches the window edge; extend the window");
  ChainWord out;
  out.bits.assign(n, 0);
  out.bits[0] = 1;
  int run = 0;
  for (std::size_t i = n; i >= 3; --i) {
    const int yi = window.at(i);
    if (yi && run % 2 == 0) out.bits[i - 1] = 1;
    run = yi ? run + 1 : 0;
  }
  return out;
}

}  // namespace dchain
