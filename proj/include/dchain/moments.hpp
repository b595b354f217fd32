#pragma once

#include <cstddef>
#include <string>

#include "dchain/numerics.hpp"
#include "dchain/params.hpp"

namespace dchain {

struct LimitEstimate {
  double value = 0.0;
  double error_bound = 0.0;
  int m = 0;  // truncation order (0 for integral evaluations)
};

// E K_n for X^{n,p}: sum_{i<n} sum_j (-1)^j prod_{l=i}^{i+j} q_l.  E K_2 = E K_3 = 1.
double mean_k(std::size_t n, const PSequence& p);

// psi_alpha(p) = sum_i (q_i - alpha/i) and abar_j = sum_i prod_{l=i}^{i+j} q_l,
// evaluated by doubling blocks with geometric tail extrapolation.
double psi_alpha(const PSequence& p, double alpha, const AccuracySpec& acc = {});
double abar(const PSequence& p, std::size_t j, const AccuracySpec& acc = {});

// lim (E K_n - alpha log n) = alpha gamma + psi + sum_j (-1)^j abar_j, truncated after
// 2m terms; error_bound = abar_{2m} (width of the bracket [S_{2m-1}, S_{2m}]).
LimitEstimate mean_k_asymptotic(const PSequence& p, double alpha, int m, const AccuracySpec& acc = {});

// eta specializations
double mean_k_eta(std::size_t n, double theta);
double psi_eta(double theta);                  // 1 - theta H_{theta+1}
double abar_eta(double theta, std::size_t j);  // theta^{j+1} / (j (theta+2)_(j))

enum class LimitMethod { Series, Integral };
// Series: value = S_{2m}, error_bound = abar_{2m}.
// Integral: the double integral, cross-checked against the 2F2 form; error_bound is the
// larger of the quadrature estimate and the discrepancy between the two.
LimitEstimate mean_k_eta_limit(double theta, LimitMethod method = LimitMethod::Integral, int m = 3,
                               const AccuracySpec& acc = {});

// Probability of the spacing pattern 1 0^{j-1} 1 with top at index i in X^{m,p}
// (X_{m+1} = 1); i ranges over j+1..m+1 and the value is 0 outside, or for m < j.
double pattern_probability(std::size_t j, std::size_t i, std::size_t m, const PSequence& p);

// E C_j(n) for X^{n,p}, j >= 2, n >= j.
double mean_cj(std::size_t n, std::size_t j, const PSequence& p);
// E C_j(n) for eta(theta): closed forms for 2 <= j <= n.
double mean_cj_eta(std::size_t n, std::size_t j, double theta);
// bbar_k(theta, j), the terms of the alternating series for the limit.
double bbar_eta(double theta, std::size_t j, std::size_t k);
// Series(m): value through bbar_{2m}, error_bound = bbar_{2m+1}.  Integral: double integral.
LimitEstimate mean_cj_eta_limit(double theta, std::size_t j, LimitMethod method = LimitMethod::Integral,
                                int m = 2, const AccuracySpec& acc = {});

// Var C_j(n) assembled from pattern probabilities:
//   sum R_i (1 - R_i) + 2 sum_{l <= i-j} R_i R^{(i-j-1)}_l - 2 sum_{l<i} R_i R_l.
double variance_cj(std::size_t n, std::size_t j, const PSequence& p);

// Cov(eta_j, eta_i) of the chain indicators, 2 < i < j < n-1: E[eta_j eta_i] - E eta_j E eta_i,
// with E[eta_j eta_i] = P(eta^n_j = 1) P(eta^{j-1}_i = 1).
double cov_eta(std::size_t n, std::size_t i, std::size_t j, double theta);
// The single-product closed form, valid for adjacent indices i = j - 1.
double cov_eta_adjacent(std::size_t n, std::size_t j, double theta);

// lambda_n(theta) = P(no fixed point) under ESF(theta), by the alternating log-gamma sum.
double lambda_esf(std::size_t n, double theta);

}  // namespace dchain
