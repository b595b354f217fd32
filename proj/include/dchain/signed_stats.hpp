#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "dchain/chains.hpp"
#include "dchain/dist.hpp"
#include "dchain/params.hpp"

namespace dchain {

// omega_{ki}: probability that a k-circle has exactly i children looking in.
class OrientationWeights {
 public:
  // Leader always looks in, every other child independently with probability kappa.
  static OrientationWeights binomial(double kappa);
  // rows[k-1][i-1] = omega_{ki}; each row must have k entries summing to 1.
  static OrientationWeights table(std::vector<std::vector<double>> rows);

  double operator()(int k, int i) const;
  bool is_binomial() const { return binomial_; }
  double kappa() const { return kappa_; }
  int max_k() const;  // largest k supported (unbounded for binomial)

 private:
  bool binomial_ = true;
  double kappa_ = 1.0;
  std::vector<std::vector<double>> rows_;
};

double omega(int k, int i, const OrientationWeights& w);

// P(C_{ki} = ell) from the law of C_k.
double cki_distribution(int k, int i, int ell, int n, const DistTable<int>& ck_law, const OrientationWeights& w);

// Means and covariances of the unsigned cycle counts C_1..C_n.
class CycleMomentProvider {
 public:
  virtual ~CycleMomentProvider() = default;
  virtual std::size_t n() const = 0;
  virtual double mean(std::size_t k) const = 0;
  virtual double cov(std::size_t k, std::size_t l) const = 0;
};

// Moments from an exact law over cycle types (e.g. oracle enumeration).
class CycleLawMoments : public CycleMomentProvider {
 public:
  explicit CycleLawMoments(const DistTable<CycleType>& law);
  std::size_t n() const override { return n_; }
  double mean(std::size_t k) const override;
  double cov(std::size_t k, std::size_t l) const override;
  // law of C_k alone
  DistTable<int> marginal(std::size_t k) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> mean_;
  std::vector<double> second_;  // E[C_k C_l], row-major n x n
  DistTable<CycleType> law_;
};

struct CStarMoments {
  double mean_i = 0.0;
  double mean_j = 0.0;
  double cov_ij = 0.0;
};

// E C*_j = sum_k omega_{kj} E C_k and
// Cov(C*_i, C*_j) = sum_{k,k'} omega_{ki} omega_{k'j} Cov(C_k, C_k') - sum_k omega_{ki} omega_{kj} E C_k
//                   + [i = j] sum_k omega_{ki} E C_k.
CStarMoments cstar_moments(int i, int j, const CycleMomentProvider& c, const OrientationWeights& w);

// Law of Lambda_n = K + Bin(n - K, kappa) (binomial weights only).
DistTable<int> lambda_total(std::size_t n, double kappa, const DistTable<int>& k_law);
double lambda_mean_identity(std::size_t n, double kappa, double mean_k);

// P(A*_1 = a_1, ..., A*_k = a_k, K_n > k): sum over r_l >= a_l with sum r < n of the ordered
// cycle prefix probability times prod omega_{r_l a_l}.  The Y overload uses the coupling
// prefix law; the p overload uses the derangement chain X^{n,p}.
double ordered_star_prob(const std::vector<int>& astar, std::size_t n, const ThetaSequence& theta,
                         const OrientationWeights& w);
double ordered_star_prob(const std::vector<int>& astar, std::size_t n, const PSequence& p,
                         const OrientationWeights& w);

// P(A_1 = r_1, ..., A_k = r_k, K_n > k) for X^{n,p} (product of segment probabilities).
double ordered_cycle_prefix_prob_x(const std::vector<int>& r, std::size_t n, const PSequence& p);

}  // namespace dchain
