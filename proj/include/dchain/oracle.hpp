#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dchain/chains.hpp"
#include "dchain/dist.hpp"
#include "dchain/params.hpp"

namespace dchain {

inline constexpr std::size_t kDeltaEnumLimit = 30;
inline constexpr std::size_t kFullEnumLimit = 22;

// All words of Delta_n in lexicographic order of their text form (w_n first).
std::vector<ChainWord> enumerate_delta(std::size_t n);
// |Delta_n| by the Fibonacci recursion d_2 = d_3 = 1.
unsigned long long delta_cardinality(std::size_t n);

// Exact law of the chain over words of length n by exhaustive path probabilities.
// Derangement kinds enumerate Delta_n (n <= 30), X-infinity prefixes enumerate
// the words without adjacent 1s, Y kinds enumerate all 2^{n-1} words (n <= 22).
DistTable<ChainWord> exact_law(const ChainKind& kind, std::size_t n);

// Y-law restricted to Delta_n and divided by gamma_n.
DistTable<ChainWord> conditional_law(std::size_t n, const ThetaSequence& theta);
// chi_n applied to every Y-word of length n-1.
DistTable<ChainWord> pushforward_law(std::size_t n, const ThetaSequence& theta);

// Every cycle type of size n with no 1-cycles (partitions of n into parts >= 2),
// in lexicographic order of the count vectors.
std::vector<CycleType> derangement_cycle_types(std::size_t n);

// Law of the cycle type / number of cycles induced by a word law.
DistTable<CycleType> cycle_type_law(const DistTable<ChainWord>& words);
DistTable<int> cycle_count_law(const DistTable<ChainWord>& words);

// Moments by dynamic programming over the Markov marginals and pairwise pattern
// probabilities (O(n^2) per target), independent of the closed-form sums.
// Supports the p-driven derangement kinds and the Y kinds.
class DpMoments {
 public:
  DpMoments(const ChainKind& kind, std::size_t n);

  std::size_t n() const { return n_; }
  double mean_k() const;
  double var_k() const;
  double mean_cj(std::size_t j) const;
  double second_moment_cj(std::size_t j) const;  // E[C_j^2]
  double cov_cj(std::size_t i, std::size_t j) const;
  double var_cj(std::size_t j) const { return cov_cj(j, j); }

 private:
  // P(index u carries 1 | index s carries 1), u <= s; s = n+1 is the sentinel.
  std::vector<double> conditional_ones(std::size_t s) const;
  // probability that a 1 at index t is followed (downward) by exactly j-1 zeros and a 1
  double spacing(std::size_t j, std::size_t t) const;
  double cross(std::size_t j, std::size_t l) const;  // sum over ordered pairs: j-pattern above l-pattern

  std::size_t n_;
  std::vector<double> a_;  // a_[u] = P(1 at u | 1 at u+1)
  std::vector<double> b_;  // b_[u] = P(1 at u | 0 at u+1)
  std::vector<double> m_;  // m_[u] = P(1 at u), m_[n+1] = 1
};

template <class Key>
struct LawPair {
  DistTable<Key> a, b;
  double tv = 0.0;
  double max_gap = 0.0;
  std::vector<Key> offending;  // outcomes with |a - b| > 1e-12 (at most 16 listed)
};

template <class Key>
LawPair<Key> compare_laws(const DistTable<Key>& a, const DistTable<Key>& b) {
  LawPair<Key> out{a, b, 0.0, 0.0, {}};
  CompensatedSum l1;
  auto visit = [&](const Key& k) {
    const double d = std::abs(a.prob(k) - b.prob(k));
    l1.add(d);
    out.max_gap = std::max(out.max_gap, d);
    if (d > 1e-12 && out.offending.size() < 16) out.offending.push_back(k);
  };
  for (const auto& [k, p] : a) visit(k);
  for (const auto& [k, p] : b)
    if (a.entries().find(k) == a.entries().end()) visit(k);
  out.tv = 0.5 * l1.value();
  return out;
}

}  // namespace dchain
