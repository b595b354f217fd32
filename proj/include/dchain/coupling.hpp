#pragma once

#include <cstddef>
#include <vector>

#include "dchain/chains.hpp"
#include "dchain/dist.hpp"
#include "dchain/params.hpp"

namespace dchain {

// gamma_1..gamma_N (probability that the coupling word lies in Delta_i) and
// log G_0..log G_N, built by the two-term recursions.
class GammaTable {
 public:
  GammaTable(const ThetaSequence& theta, std::size_t N);

  std::size_t size() const { return gamma_.size() - 1; }
  double gamma(std::size_t i) const;
  double log_G(std::size_t i) const;  // -inf for G_0 = 0
  double G(std::size_t i) const;
  // log theta_<i> = log theta_1 + sum_{k=2}^i log(theta_k + k - 1)
  double log_theta_bracket(std::size_t i) const;
  const ThetaSequence& theta() const { return theta_; }

 private:
  ThetaSequence theta_;
  std::vector<double> gamma_;    // index 0 unused
  std::vector<double> log_g_;    // log G_0 .. log G_N
  std::vector<double> log_br_;   // log theta_<i>, index 0 unused
};

enum class GammaMethod { Recursion, GProduct, PProduct };

double gamma_n(const ThetaSequence& theta, std::size_t n, GammaMethod method = GammaMethod::Recursion);

// Closed form for the eta-star family (theta*_2 configurable); n = 0 means infinity.
double delta_n(double theta, double theta2star, std::size_t n);
double delta_inf(double theta, double theta2star = 1.0);

// Law of the number of 1s of Y^n (Poisson-binomial).
DistTable<int> k_distribution_y(std::size_t n, const ThetaSequence& theta);
// Law of K_n for X^{n,p}: Markov DP over (previous bit, count).
DistTable<int> k_distribution_x(std::size_t n, const PSequence& p);
// Same law obtained by conditioning Y^n on Delta_n (non-adjacency DP, divided by gamma_n).
DistTable<int> k_distribution_x_conditioned(std::size_t n, const ThetaSequence& theta);

// (s theta)_<n> / theta_<n>, every theta_i (theta_1 included) scaled by s.
double pgf_k_y(double s, std::size_t n, const ThetaSequence& theta);
// gamma_n(s theta)/gamma_n(theta) * pgf_k_y (theta conditional-linked to p).
double pgf_k_x(double s, std::size_t n, const ThetaSequence& theta);
// sum_k s^k P(K = k)
double pgf_from_distribution(const DistTable<int>& law, double s);

// c-bar: each cycle length j repeated c_j times, ascending.
std::vector<int> expand_cycle_type(const CycleType& c);

// Budget on the number of distinct orderings of c-bar summed over.
inline constexpr long kJointOrderingBudget = 362880;  // 9!

double joint_cycle_counts_y(const CycleType& c, const ThetaSequence& theta);
// Conditioned form: joint_cycle_counts_y / gamma_n.  Requires c_1 = 0.
double joint_cycle_counts_x(const CycleType& c, const ThetaSequence& theta);
// p form: (1/c_n!) prod_{i=2}^{n-1} (p_i / c_i!) sum prod q_e/(p_e p_{e-1}).
double joint_cycle_counts_x_p(const CycleType& c, const PSequence& p);
// The eta specialization.
double joint_cycle_counts_eta(const CycleType& c, double theta);

// P(A_1 = a_1, ..., A_r = a_r, K_n > r) for the coupling Y^n; sum a_i < n.
double ordered_cycle_prefix_prob(const std::vector<int>& a, std::size_t n, const ThetaSequence& theta);

// chi_n: y must cover indices 1..n-1 (longer words are allowed, the extra
// bits are ignored).  Output has length n and lies in Delta_n.
ChainWord erase11(const ChainWord& y, std::size_t n);
// chi_infinity on a finite window; throws if a run of 1s reaches the window end.
ChainWord erase11_infinite(const ChainWord& window);

}  // namespace dchain
