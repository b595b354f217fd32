#include "dchain/signed_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dchain/coupling.hpp"
#include "dchain/numerics.hpp"

namespace dchain {

OrientationWeights OrientationWeights::binomial(double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("kappa must lie in [0,1]");
  OrientationWeights w;
  w.binomial_ = true;
  w.kappa_ = kappa;
  return w;
}

OrientationWeights OrientationWeights::table(std::vector<std::vector<double>> rows) {
  for (std::size_t k = 1; k <= rows.size(); ++k) {
    const auto& row = rows[k - 1];
    if (row.size() != k) throw DomainError("orientation table: row " + std::to_string(k) + " must have k entries");
    CompensatedSum s;
    for (double v : row) {
      if (!(v >= 0.0)) throw DomainError("orientation table: negative weight");
      s.add(v);
    }
    if (std::abs(s.value() - 1.0) > 1e-12)
      throw DomainError("orientation table: row " + std::to_string(k) + " does not sum to 1");
  }
  OrientationWeights w;
  w.binomial_ = false;
  w.kappa_ = std::nan("");
  w.rows_ = std::move(rows);
  return w;
}

int OrientationWeights::max_k() const {
  return binomial_ ? std::numeric_limits<int>::max() : static_cast<int>(rows_.size());
}

double OrientationWeights::operator()(int k, int i) const {
  if (k < 1 || i < 1 || i > k)
    throw DomainError("omega: need 1 <= i <= k (got k=" + std::to_string(k) + ", i=" + std::to_string(i) + ")");
  if (!binomial_) {
    if (k > max_k()) throw DomainError("omega: table has no row for k=" + std::to_string(k));
    return rows_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)];
  }
  // C(k-1, i-1) kappa^{i-1} (1-kappa)^{k-i}, with 0^0 = 1
  if (kappa_ == 0.0) return i == 1 ? 1.0 : 0.0;
  if (kappa_ == 1.0) return i == k ? 1.0 : 0.0;
  return std::exp(log_choose(k - 1, i - 1) + (i - 1) * std::log(kappa_) + (k - i) * std::log1p(-kappa_));
}

double omega(int k, int i, const OrientationWeights& w) { return w(k, i); }

double cki_distribution(int k, int i, int ell, int n, const DistTable<int>& ck_law, const OrientationWeights& w) {
  if (ell < 0) throw DomainError("cki_distribution: ell must be nonnegative");
  if (k < 1 || n < 1) throw DomainError("cki_distribution: k and n must be positive");
  if (static_cast<long>(k) * ell > n) return 0.0;
  const double om = w(k, i);
  CompensatedSum s;
  for (const auto& [m, pm] : ck_law) {
    if (m < ell || pm == 0.0) continue;
    double b;
    if (om == 0.0) b = ell == 0 ? 1.0 : 0.0;
    else if (om == 1.0) b = ell == m ? 1.0 : 0.0;
    else b = std::exp(log_choose(m, ell) + ell * std::log(om) + (m - ell) * std::log1p(-om));
    s.add(b * pm);
  }
  return s.value();
}

// ------------------------------------------------------------ provider ---

CycleLawMoments::CycleLawMoments(const DistTable<CycleType>& law) : law_(law) {
  if (law.empty()) throw DomainError("CycleLawMoments: empty law");
  n_ = law.begin()->first.counts.size();
  mean_.assign(n_ + 1, 0.0);
  second_.assign((n_ + 1) * (n_ + 1), 0.0);
  for (const auto& [c, p] : law) {
    if (c.counts.size() != n_) throw DomainError("CycleLawMoments: cycle types of different n");
    for (std::size_t k = 1; k <= n_; ++k) {
      const double ck = c.c(k);
      if (ck == 0.0) continue;
      mean_[k] += p * ck;
      for (std::size_t l = 1; l <= n_; ++l) second_[k * (n_ + 1) + l] += p * ck * c.c(l);
    }
  }
}

double CycleLawMoments::mean(std::size_t k) const { return k >= 1 && k <= n_ ? mean_[k] : 0.0; }

double CycleLawMoments::cov(std::size_t k, std::size_t l) const {
  if (k < 1 || l < 1 || k > n_ || l > n_) return 0.0;
  return second_[k * (n_ + 1) + l] - mean_[k] * mean_[l];
}

DistTable<int> CycleLawMoments::marginal(std::size_t k) const {
  DistTable<int> out;
  for (const auto& [c, p] : law_) out.add(c.c(k), p);
  return out;
}

CStarMoments cstar_moments(int i, int j, const CycleMomentProvider& c, const OrientationWeights& w) {
  const int n = static_cast<int>(c.n());
  if (i < 1 || j < 1 || i > n || j > n) throw DomainError("cstar_moments: need 1 <= i, j <= n");
  const int kmax = std::min(n, w.max_k());
  CStarMoments out;
  CompensatedSum mi, mj, cv;
  for (int k = std::max(i, j); k <= kmax; ++k) {
    const double ek = c.mean(static_cast<std::size_t>(k));
    const double wi = w(k, i), wj = w(k, j);
    cv.add(-wi * wj * ek);
    if (i == j) cv.add(wi * ek);  // multinomial variance term
  }
  for (int k = i; k <= kmax; ++k) {
    const double wi = w(k, i);
    mi.add(wi * c.mean(static_cast<std::size_t>(k)));
    if (wi == 0.0) continue;
    for (int l = j; l <= kmax; ++l) {
      const double wj = w(l, j);
      if (wj != 0.0) cv.add(wi * wj * c.cov(static_cast<std::size_t>(k), static_cast<std::size_t>(l)));
    }
  }
  for (int k = j; k <= kmax; ++k) mj.add(w(k, j) * c.mean(static_cast<std::size_t>(k)));
  out.mean_i = mi.value();
  out.mean_j = mj.value();
  out.cov_ij = cv.value();
  return out;
}

DistTable<int> lambda_total(std::size_t n, double kappa, const DistTable<int>& k_law) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("lambda_total: kappa must lie in [0,1]");
  const long nn = static_cast<long>(n);
  DistTable<int> out;
  for (long r = 1; r <= nn; ++r) {
    CompensatedSum s;
    for (const auto& [k, pk] : k_law) {
      if (k < 1 || k > r || k > nn) continue;
      const long a = r - k, b = nn - r;  // a successes out of n-k trials
      double term;
      if (kappa == 0.0) term = a == 0 ? 1.0 : 0.0;
      else if (kappa == 1.0) term = b == 0 ? 1.0 : 0.0;
      else term = std::exp(log_choose(nn - k, a) + a * std::log(kappa) + b * std::log1p(-kappa));
      s.add(term * pk);
    }
    if (s.value() != 0.0) out.add(static_cast<int>(r), s.value());
  }
  return out;
}

double lambda_mean_identity(std::size_t n, double kappa, double mean_k) {
  return static_cast<double>(n) * kappa + (1.0 - kappa) * mean_k;
}

double ordered_cycle_prefix_prob_x(const std::vector<int>& r, std::size_t n, const PSequence& p) {
  if (r.empty()) throw DomainError("ordered_cycle_prefix_prob_x: need at least one cycle length");
  long total = 0;
  for (int v : r) {
    if (v < 1) throw DomainError("ordered_cycle_prefix_prob_x: cycle lengths must be positive");
    total += v;
  }
  if (total >= static_cast<long>(n)) throw DomainError("ordered_cycle_prefix_prob_x: sum of lengths must be < n");
  double prob = 1.0;
  std::size_t top = n + 1;  // index of the current 1
  for (int v : r) {
    if (v < 2) return 0.0;  // no 1-cycles
    const std::size_t next = top - static_cast<std::size_t>(v);
    // X_{top-1} = 0 is forced, then zeros down to next+1, then a 1 at next
    for (std::size_t s = next + 1; s + 2 <= top; ++s) prob *= p.p(s);
    prob *= p.q(next);
    top = next;
    if (prob == 0.0) return 0.0;
  }
  return prob;
}

namespace {

template <class Prefix>
double star_sum(const std::vector<int>& astar, std::size_t n, const OrientationWeights& w, Prefix&& prefix) {
  long amin = 0;
  for (int a : astar) {
    if (a < 1) throw DomainError("ordered_star_prob: a*_l must be at least 1");
    amin += a;
  }
  if (amin >= static_cast<long>(n)) throw DomainError("ordered_star_prob: sum of a*_l must be < n");
  const int k = static_cast<int>(astar.size());
  std::vector<int> r(astar.size());
  CompensatedSum total;
  // depth-first over r_l >= a*_l with running sum < n
  std::function<void(int, long, double)> rec = [&](int l, long used, double wprod) {
    if (l == k) {
      total.add(wprod * prefix(r));
      return;
    }
    long rest_min = 0;
    for (int m = l + 1; m < k; ++m) rest_min += astar[static_cast<std::size_t>(m)];
    for (long v = astar[static_cast<std::size_t>(l)]; used + v + rest_min < static_cast<long>(n); ++v) {
      if (v > w.max_k()) break;
      const double om = w(static_cast<int>(v), astar[static_cast<std::size_t>(l)]);
      if (om == 0.0) continue;
      r[static_cast<std::size_t>(l)] = static_cast<int>(v);
      rec(l + 1, used + v, wprod * om);
    }
  };
  rec(0, 0, 1.0);
  return total.value();
}

}  // namespace

double ordered_star_prob(const std::vector<int>& astar, std::size_t n, const ThetaSequence& theta,
                         const OrientationWeights& w) {
  return star_sum(astar, n, w, [&](const std::vector<int>& r) { return ordered_cycle_prefix_prob(r, n, theta); });
}

double ordered_star_prob(const std::vector<int>& astar, std::size_t n, const PSequence& p,
                         const OrientationWeights& w) {
  return star_sum(astar, n, w, [&](const std::vector<int>& r) { return ordered_cycle_prefix_prob_x(r, n, p); });
}

}  // namespace dchain
