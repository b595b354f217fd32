#include "dchain/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "dchain/coupling.hpp"
#include "dchain/numerics.hpp"

namespace dchain {

namespace {

// Depth-first over indices top..1, 0 before 1, so words come out in
// lexicographic order of their text form.  `top_free` allows w_n = 1.
void enumerate_no11(std::size_t n, bool top_free, const std::function<void(const ChainWord&)>& emit) {
  ChainWord w(std::vector<std::uint8_t>(n, 0));
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int above) {
    if (i == 0) {
      emit(w);
      return;
    }
    if (i == 1) {  // w_1 = 1 always
      if (above) return;
      w.bits[0] = 1;
      rec(0, 1);
      w.bits[0] = 0;
      return;
    }
    w.bits[i - 1] = 0;
    rec(i - 1, 0);
    if (!above && (i < n || top_free)) {
      w.bits[i - 1] = 1;
      rec(i - 1, 1);
      w.bits[i - 1] = 0;
    }
  };
  rec(n, 0);
}

void enumerate_all_y(std::size_t n, const std::function<void(const ChainWord&)>& emit) {
  ChainWord w(std::vector<std::uint8_t>(n, 0));
  w.bits[0] = 1;
  const unsigned long long count = 1ULL << (n - 1);
  for (unsigned long long mask = 0; mask < count; ++mask) {
    for (std::size_t i = 2; i <= n; ++i) w.bits[i - 1] = static_cast<std::uint8_t>((mask >> (i - 2)) & 1U);
    emit(w);
  }
}

void guard_delta(std::size_t n) {
  if (n > kDeltaEnumLimit)
    throw GuardError("Delta_n enumeration limited to n <= " + std::to_string(kDeltaEnumLimit) + " (|Delta_" +
                     std::to_string(n) + "| = " + std::to_string(delta_cardinality(n)) + ")");
}

void guard_full(std::size_t n) {
  if (n > kFullEnumLimit)
    throw GuardError("full Y-word enumeration limited to n <= " + std::to_string(kFullEnumLimit) + " (2^" +
                     std::to_string(n - 1) + " words requested)");
}

}  // namespace

unsigned long long delta_cardinality(std::size_t n) {
  if (n < 2) return 0;
  unsigned long long a = 1, b = 1;  // d_2, d_3
  for (std::size_t k = 3; k < n; ++k) {
    const unsigned long long c = a + b;
    a = b;
    b = c;
  }
  return n == 2 ? a : b;
}

std::vector<ChainWord> enumerate_delta(std::size_t n) {
  if (n < 1) throw DomainError("enumerate_delta: n must be at least 1");
  guard_delta(n);
  std::vector<ChainWord> out;
  if (n < 2) return out;  // w_1 = 1 and w_n = 0 cannot both hold
  out.reserve(static_cast<std::size_t>(delta_cardinality(n)));
  enumerate_no11(n, false, [&](const ChainWord& w) { out.push_back(w); });
  return out;
}

DistTable<ChainWord> exact_law(const ChainKind& kind, std::size_t n) {
  if (n < 1) throw DomainError("exact_law: n must be at least 1");
  DistTable<ChainWord> law;
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde:
      guard_full(n);
      enumerate_all_y(n, [&](const ChainWord& w) {
        const double pr = path_probability(kind, w);
        if (pr != 0.0) law.add(w, pr);
      });
      break;
    case KindTag::XinfPrefix:
      guard_delta(n);
      enumerate_no11(n, true, [&](const ChainWord& w) {
        const double pr = path_probability(kind, w);
        if (pr != 0.0) law.add(w, pr);
      });
      break;
    default: {
      if (n < 2) throw DomainError("exact_law: derangement chains need n >= 2");
      // the signed chain is summarized by its projection, which is X^{n,p}
      const ChainKind base = kind.tag() == KindTag::Signed ? ChainKind::x(kind.p()) : kind;
      for (const ChainWord& w : enumerate_delta(n)) {
        const double pr = path_probability(base, w);
        if (pr != 0.0) law.add(w, pr);
      }
    }
  }
  return law;
}

DistTable<ChainWord> conditional_law(std::size_t n, const ThetaSequence& theta) {
  if (n < 2) throw DomainError("conditional_law: n must be at least 2");
  guard_full(n);
  const ChainKind y = ChainKind::y(theta);
  const double g = gamma_n(theta, n);
  if (!(g > 0.0)) throw DomainError("conditional_law: gamma_n vanishes");
  DistTable<ChainWord> law;
  for (const ChainWord& w : enumerate_delta(n)) {
    const double pr = path_probability(y, w);
    if (pr != 0.0) law.add(w, pr / g);
  }
  return law;
}

DistTable<ChainWord> pushforward_law(std::size_t n, const ThetaSequence& theta) {
  if (n < 2) throw DomainError("pushforward_law: n must be at least 2");
  guard_full(n);
  const ChainKind y = ChainKind::y(theta);
  DistTable<ChainWord> law;
  // chi_n only reads y_1..y_{n-1}
  enumerate_all_y(n - 1, [&](const ChainWord& w) {
    const double pr = path_probability(y, w);
    if (pr != 0.0) law.add(erase11(w, n), pr);
  });
  return law;
}

std::vector<CycleType> derangement_cycle_types(std::size_t n) {
  if (n < 2) throw DomainError("derangement_cycle_types: n must be at least 2");
  if (n > 60) throw GuardError("derangement_cycle_types: n limited to 60");
  std::vector<CycleType> out;
  std::vector<int> counts(n, 0);
  // choose c_j for j = largest first, remaining size r
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t r) {
    if (r == 0) {
      out.emplace_back(counts);
      return;
    }
    if (j < 2) return;
    for (std::size_t c = 0; c * j <= r; ++c) {
      counts[j - 1] = static_cast<int>(c);
      rec(j - 1, r - c * j);
    }
    counts[j - 1] = 0;
  };
  rec(n, n);
  std::sort(out.begin(), out.end());
  return out;
}

DistTable<CycleType> cycle_type_law(const DistTable<ChainWord>& words) {
  DistTable<CycleType> out;
  for (const auto& [w, p] : words) out.add(cycle_statistics(w).type, p);
  return out;
}

DistTable<int> cycle_count_law(const DistTable<ChainWord>& words) {
  DistTable<int> out;
  for (const auto& [w, p] : words) out.add(cycle_statistics(w).K, p);
  return out;
}

// ------------------------------------------------------------ DP moments ---

DpMoments::DpMoments(const ChainKind& kind, std::size_t n) : n_(n) {
  if (n < 2) throw DomainError("DpMoments: n must be at least 2");
  if (n > 5000) throw GuardError("DpMoments: n limited to 5000");
  a_.assign(n + 2, 0.0);
  b_.assign(n + 2, 0.0);
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde:
      for (std::size_t u = 1; u <= n; ++u) a_[u] = b_[u] = kind.theta_seq().indicator_prob(u);
      break;
    case KindTag::XinfPrefix:
      throw DomainError("DpMoments: X-infinity prefixes are not a top-down chain");
    default: {
      const PSequence& p = kind.p();
      // a 1 is always followed by a 0, except that index 1 is forced to 1
      for (std::size_t u = 1; u <= n; ++u) {
        a_[u] = u == 1 ? 1.0 : 0.0;
        b_[u] = u == 1 ? 1.0 : p.q(u);
      }
    }
  }
  m_.assign(n + 2, 0.0);
  m_[n + 1] = 1.0;
  for (std::size_t u = n; u >= 1; --u) m_[u] = m_[u + 1] * a_[u] + (1.0 - m_[u + 1]) * b_[u];
}

std::vector<double> DpMoments::conditional_ones(std::size_t s) const {
  std::vector<double> h(s + 1, 0.0);
  h[s] = 1.0;
  for (std::size_t u = s - 1; u >= 1; --u) h[u] = h[u + 1] * a_[u] + (1.0 - h[u + 1]) * b_[u];
  return h;
}

double DpMoments::spacing(std::size_t j, std::size_t t) const {
  if (j < 1 || t < j + 1 || t > n_ + 1) return 0.0;
  if (j == 1) return a_[t - 1];
  double pr = 1.0 - a_[t - 1];
  for (std::size_t s = t - j + 1; s + 2 <= t; ++s) pr *= 1.0 - b_[s];
  return pr * b_[t - j];
}

double DpMoments::mean_cj(std::size_t j) const {
  if (j < 1) throw DomainError("DpMoments: j must be at least 1");
  CompensatedSum s;
  for (std::size_t t = j + 1; t <= n_ + 1; ++t) s.add(m_[t] * spacing(j, t));
  return s.value();
}

double DpMoments::cross(std::size_t j, std::size_t l) const {
  CompensatedSum s;
  for (std::size_t t = j + 1; t <= n_ + 1; ++t) {
    const double top = m_[t] * spacing(j, t);
    if (top == 0.0) continue;
    const std::size_t base = t - j;
    if (base < l + 1) continue;
    const std::vector<double> h = conditional_ones(base);
    CompensatedSum inner;
    for (std::size_t u = l + 1; u <= base; ++u) inner.add(h[u] * spacing(l, u));
    s.add(top * inner.value());
  }
  return s.value();
}

double DpMoments::second_moment_cj(std::size_t j) const { return 2.0 * cross(j, j) + mean_cj(j); }

double DpMoments::cov_cj(std::size_t i, std::size_t j) const {
  if (i < 1 || j < 1) throw DomainError("DpMoments: cycle lengths must be positive");
  double second = cross(i, j) + cross(j, i);
  if (i == j) second = 2.0 * cross(i, i) + mean_cj(i);
  return second - mean_cj(i) * mean_cj(j);
}

double DpMoments::mean_k() const {
  CompensatedSum s;
  for (std::size_t u = 1; u <= n_; ++u) s.add(m_[u]);
  return s.value();
}

double DpMoments::var_k() const {
  // E K^2 = sum_u m_u + 2 sum_{u<s<=n} m_s h_s(u)
  CompensatedSum second;
  for (std::size_t s = 1; s <= n_; ++s) {
    second.add(m_[s]);
    if (s < 2) continue;
    const std::vector<double> h = conditional_ones(s);
    CompensatedSum inner;
    for (std::size_t u = 1; u < s; ++u) inner.add(h[u]);
    second.add(2.0 * m_[s] * inner.value());
  }
  const double mk = mean_k();
  return second.value() - mk * mk;
}

}  // namespace dchain
