#include "dchain/limitchain.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>

#include "dchain/chains.hpp"

namespace dchain {

namespace {

struct BlockSums {
  double total = 0.0;  // sum over [start, H]
  double b1 = 0.0;     // (H/4, H/2]
  double b2 = 0.0;     // (H/2, H]
};

template <class F>
BlockSums block_sums(F&& a, std::size_t start, std::size_t h) {
  CompensatedSum tot, s1, s2;
  for (std::size_t i = start; i <= h; ++i) {
    const double v = a(i);
    tot.add(v);
    if (i > h / 4 && i <= h / 2) s1.add(v);
    if (i > h / 2) s2.add(v);
  }
  return {tot.value(), s1.value(), s2.value()};
}

// A series of positive terms looks convergent when the last block is clearly
// smaller than the one before (ratio 2^{1-s} for terms ~ i^{-s}).
bool looks_convergent(const BlockSums& b, double& tail) {
  if (b.b2 == 0.0) {
    tail = 0.0;
    return true;
  }
  const double r = b.b2 / b.b1;
  if (!(r < 0.9)) {
    tail = std::numeric_limits<double>::infinity();
    return false;
  }
  tail = b.b2 * r / (1.0 - r);
  return true;
}

bool vanishes(double at_h, double at_half) { return at_h < 1e-9 || at_h <= 0.75 * at_half; }

void fill_theta_flags(const ThetaSequence& theta, std::size_t h, ConditionFlags& f) {
  auto t = [&](std::size_t i) { return theta.indicator_prob(i); };
  BlockSums c2 = block_sums([&](std::size_t i) { return t(i) * t(i + 1); }, 2, h);
  f.eqcond2_partial = c2.total;
  f.eqcond2 = looks_convergent(c2, f.eqcond2_tail);
  BlockSums c4 = block_sums([&](std::size_t i) { return t(i) * t(i); }, 2, h);
  f.eqcond4_partial = c4.total;
  f.eqcond4 = looks_convergent(c4, f.eqcond4_tail);
  f.theta_over_n = theta(h) / static_cast<double>(h);
  f.eqcond3 = vanishes(f.theta_over_n, theta(h / 2) / static_cast<double>(h / 2));
}

double tol_for(const AccuracySpec& acc, double v) { return std::max(acc.abs_tol, acc.rel_tol * std::abs(v)); }

}  // namespace

std::string ConditionFlags::summary() const {
  std::ostringstream os;
  os << "probe horizon " << horizon << ": sum p diverges=" << p_sum_diverges << ", q_n->0=" << q_to_zero
     << ", eqcond2=" << eqcond2 << " (partial " << eqcond2_partial << ", tail ~" << eqcond2_tail << ")"
     << ", eqcond3=" << eqcond3 << ", eqcond4=" << eqcond4;
  return os.str();
}

ConditionFlags probe_p_conditions(const PSequence& p, std::size_t horizon) {
  if (horizon < 16) throw DomainError("probe: horizon must be at least 16");
  ConditionFlags f;
  f.horizon = horizon;
  BlockSums bp = block_sums([&](std::size_t i) { return p.p(i); }, 3, horizon);
  f.p_partial_sum = bp.total + 1.0;  // p_2 = 1
  f.p_sum_diverges = bp.b1 > 0.0 && bp.b2 >= 0.9 * bp.b1;
  f.q_at_horizon = p.q(horizon);
  f.q_to_zero = vanishes(f.q_at_horizon, p.q(horizon / 2));
  fill_theta_flags(ThetaSequence::from_p_conditional(p), horizon, f);
  return f;
}

ConditionFlags probe_theta_conditions(const ThetaSequence& theta, std::size_t horizon) {
  if (horizon < 16) throw DomainError("probe: horizon must be at least 16");
  ConditionFlags f;
  f.horizon = horizon;
  const PSequence p = PSequence::from_theta_conditional(theta);
  BlockSums bp = block_sums([&](std::size_t i) { return p.p(i); }, 3, horizon);
  f.p_partial_sum = bp.total + 1.0;
  f.p_sum_diverges = bp.b1 > 0.0 && bp.b2 >= 0.9 * bp.b1;
  f.q_at_horizon = p.q(horizon);
  f.q_to_zero = vanishes(f.q_at_horizon, p.q(horizon / 2));
  fill_theta_flags(theta, horizon, f);
  return f;
}

LimitContext LimitContext::probe(const PSequence& p, std::size_t horizon) {
  return LimitContext(p, ThetaSequence::from_p_conditional(p), probe_p_conditions(p, horizon));
}

void LimitContext::require_divergence() const {
  if (!flags_.p_sum_diverges)
    throw DomainError("limit chain requires sum p_j = infinity; probe failed (" + flags_.summary() + ")");
}

void LimitContext::require_eqcond2() const {
  if (!flags_.eqcond2)
    throw DomainError("gamma_inf requires the pair-sum condition; probe failed (" + flags_.summary() + ")");
}

// ----------------------------------------------------------------- phi ---

double phi_series(std::size_t i, const PSequence& p, const AccuracySpec& acc) {
  if (i < 1) throw DomainError("phi: i must be positive");
  if (i == 1) return 1.0;
  if (i == 2) return 0.0;
  CompensatedSum s;
  double prod = 1.0, sign = 1.0;
  for (long j = 0; j < acc.max_terms; ++j) {
    prod *= p.q(i + static_cast<std::size_t>(j));
    // alternating with decreasing terms: the error is below the next term
    if (prod < 0.5 * acc.abs_tol) return s.value();
    s.add(sign * prod);
    sign = -sign;
  }
  throw ConvergenceError("phi_series: alternating series did not converge (is sum p_j finite?)", s.value(), prod,
                         acc.max_terms);
}

double phi_eta(std::size_t i, double theta, const AccuracySpec& acc, EtaPhiForm form) {
  if (!(theta > 0.0)) throw DomainError("phi_eta: theta must be positive");
  if (i < 1) throw DomainError("phi: i must be positive");
  if (i == 1) return 1.0;
  if (i == 2) return 0.0;
  const double m = static_cast<double>(i);
  auto series = [&] { return theta / (theta + m - 1.0) * kummer_m(1.0, theta + m, -theta, acc); };
  auto integral = [&] {
    return theta * integrate([&](double u) { return std::exp(-theta * u) * std::pow(1.0 - u, theta + m - 2.0); },
                             0.0, 1.0, acc);
  };
  if (form == EtaPhiForm::KummerSeries) return series();
  if (form == EtaPhiForm::Integral) return integral();
  const double a = series(), b = integral();
  if (std::abs(a - b) > 10.0 * tol_for(acc, a))
    throw ConvergenceError("phi_eta: series and integral forms disagree", a, b - a, 0);
  return a;
}

double phi_eta_tilde(std::size_t i, double theta, const AccuracySpec& acc) {
  if (!(theta > 0.0)) throw DomainError("phi_eta_tilde: theta must be positive");
  if (i < 1) throw DomainError("phi: i must be positive");
  if (i == 1) return 1.0;
  if (i == 2) return 0.0;
  const double m = static_cast<double>(i);
  return theta * std::exp(theta) * lambda_recursive(theta, i - 1) / (theta + m - 1.0) *
         kummer_m(theta + 1.0, theta + m, -theta, acc);
}

double phi(std::size_t i, const PSequence& p, const AccuracySpec& acc, PhiMethod method) {
  if (method == PhiMethod::Series) return phi_series(i, p, acc);
  const bool closed = p.family() == PFamily::Eta || p.family() == PFamily::EtaTilde;
  if (method == PhiMethod::ClosedForm && !closed)
    throw DomainError("phi: closed form only exists for eta and eta_tilde");
  if (closed) {
    return p.family() == PFamily::Eta ? phi_eta(i, p.theta(), acc, EtaPhiForm::KummerSeries)
                                      : phi_eta_tilde(i, p.theta(), acc);
  }
  return phi_series(i, p, acc);
}

double phi(std::size_t i, const LimitContext& ctx, const AccuracySpec& acc) {
  ctx.require_divergence();
  return phi(i, ctx.p(), acc);
}

std::vector<double> phi_table(const PSequence& p, std::size_t upto, const AccuracySpec& acc) {
  std::vector<double> out(std::max<std::size_t>(upto, 2) + 1, 0.0);
  const std::size_t top = out.size() - 1;
  if (top >= 3) {
    out[top] = phi(top, p, acc);
    for (std::size_t i = top - 1; i >= 3; --i) out[i] = p.q(i) * (1.0 - out[i + 1]);
  }
  out[1] = 1.0;
  out[2] = 0.0;
  return out;
}

double xinf_transition(std::size_t i, const PSequence& p, const AccuracySpec& acc) {
  if (i < 1) throw DomainError("xinf_transition: i must be positive");
  if (i == 1) return 0.0;
  const double a = phi(i, p, acc), b = phi(i + 1, p, acc);
  return b / (1.0 - a);
}

double tv_prefix(std::size_t n, const PSequence& p, const AccuracySpec& acc) {
  if (n < 1) throw DomainError("tv_prefix: n must be positive");
  return n > 1 ? phi(n, p, acc) : 0.0;
}

double tv_prefix_direct(std::size_t n, const PSequence& p, const AccuracySpec& acc) {
  if (n < 2) return 0.0;
  if (n > 30) throw GuardError("tv_prefix_direct: n <= 30 required (enumeration)");
  const std::vector<double> ph = phi_table(p, n + 1, acc);
  const ChainKind xk = ChainKind::x(p);
  // All words with w_1 = 1 and no 11; the top bit is free.
  CompensatedSum tv;
  ChainWord w;
  w.bits.assign(n, 0);
  w.bits[0] = 1;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double pr) {
    // w_1..w_i fixed, pr = X^inf probability of that prefix
    if (i == n) {
      const double mu_n = w.in_delta() ? path_probability(xk, w) : 0.0;
      tv.add(std::abs(pr - mu_n));
      return;
    }
    if (w.bits[i - 1]) {
      w.bits[i] = 0;
      rec(i + 1, pr);
      return;
    }
    const double a = ph[i + 1] / (1.0 - ph[i]);
    w.bits[i] = 0;
    rec(i + 1, pr * (1.0 - a));
    w.bits[i] = 1;
    rec(i + 1, pr * a);
    w.bits[i] = 0;
  };
  rec(1, 1.0);
  return 0.5 * tv.value();
}

// ------------------------------------------------------------ gamma_inf ---

double gamma_inf(std::size_t i, const ThetaSequence& theta, const AccuracySpec& acc) {
  if (i < 1) throw DomainError("gamma_inf: i must be positive");
  if (i == 1) return 0.0;  // Y_1 = 1 always
  {
    const ConditionFlags f = probe_theta_conditions(theta, 1 << 16);
    if (!f.eqcond2) throw DomainError("gamma_inf requires the pair-sum condition; " + f.summary());
  }
  auto t = [&](std::size_t k) { return theta.indicator_prob(k); };
  auto run = [&](std::size_t N) {
    // S_m = sum_{k >= m} t_k t_{k+1}: explicit to 4N plus a 1/k^2-type tail.
    const std::size_t top = 4 * N;
    CompensatedSum s;
    for (std::size_t k = top; k >= N + 2; --k) s.add(t(k) * t(k + 1));
    const double tail = t(top) * t(top + 1) * static_cast<double>(top);
    const double s_n2 = s.value() + tail;
    const double s_n1 = s_n2 + t(N + 1) * t(N + 2);
    double g2 = (1.0 - t(N + 1)) * (1.0 - s_n2);  // gamma_{N+1}
    double g1 = (1.0 - t(N)) * (1.0 - s_n1);      // gamma_N
    for (std::size_t k = N - 1; k >= i; --k) {
      const double g = (1.0 - t(k)) * (g1 + t(k + 1) * g2);
      g2 = g1;
      g1 = g;
    }
    return g1;  // gamma_i (N > i always)
  };
  std::size_t N = std::max<std::size_t>(64, 2 * i);
  double prev = run(N);
  for (int it = 0; it < 24; ++it) {
    N *= 2;
    const double cur = run(N);
    if (std::abs(cur - prev) < tol_for(acc, cur)) return cur;
    prev = cur;
  }
  throw ConvergenceError("gamma_inf: backward iteration did not stabilize", prev, 0.0, static_cast<long>(N));
}

double delta_i_inf(double theta, std::size_t i, double theta2star, const AccuracySpec& acc) {
  if (!(theta > 0.0)) throw DomainError("delta_i_inf: theta must be positive");
  if (!(theta2star > 0.0 && theta2star <= 1.0)) throw DomainError("delta_i_inf: theta*_2 must lie in (0,1]");
  if (i < 1) throw DomainError("delta_i_inf: i must be positive");
  if (i == 1) return 0.0;
  const double disc = (1.0 - theta) * (1.0 + 3.0 * theta);
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  const std::complex<double> z1 = (3.0 + theta - root) / 2.0;
  const std::complex<double> z2 = (3.0 + theta + root) / 2.0;
  auto closed = [&](std::size_t k) {
    const double s = static_cast<double>(k) - 3.0;
    const std::complex<double> lb = log_gamma(z1 + s) + log_gamma(z2 + s) - log_gamma(z1 + z2 + 2.0 * s);
    const double log_ratio = lb.real() - log_beta(static_cast<double>(k) - 2.0, theta + static_cast<double>(k) - 1.0);
    return kummer_m(1.0, theta + static_cast<double>(k) - 1.0, -theta, acc) * std::exp(log_ratio);
  };
  if (i >= 4) return closed(i);
  const ThetaSequence ts = ThetaSequence::eta_star(theta, theta2star);
  if (i == 3) {
    return (1.0 - ts.indicator_prob(3)) * (closed(4) + ts.indicator_prob(4) * closed(5));
  }
  // i == 2: delta_infinity = (theta^2+theta+2)/(1+theta*_2) B(z1, z2)
  return (theta * theta + theta + 2.0) / (1.0 + theta2star) * beta_fn(z1, z2);
}

}  // namespace dchain
