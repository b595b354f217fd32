#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dchain/numerics.hpp"
#include "dchain/params.hpp"

namespace dchain {

// Numerically probed convergence conditions.  Each flag is established over a
// finite horizon from block sums over (H/4, H/2] and (H/2, H]; the flags are
// evidence, not proofs.
struct ConditionFlags {
  std::size_t horizon = 0;
  // sum p_j = infinity
  bool p_sum_diverges = false;
  double p_partial_sum = 0.0;
  // q_n -> 0
  bool q_to_zero = false;
  double q_at_horizon = 0.0;
  // sum theta_i theta_{i+1} / ((i-1+theta_i)(i+theta_{i+1})) < infinity
  bool eqcond2 = false;
  double eqcond2_partial = 0.0;
  double eqcond2_tail = 0.0;  // extrapolated tail beyond the horizon
  // theta_n / n -> 0
  bool eqcond3 = false;
  double theta_over_n = 0.0;
  // sum (theta_i/(i-1+theta_i))^2 < infinity
  bool eqcond4 = false;
  double eqcond4_partial = 0.0;
  double eqcond4_tail = 0.0;

  std::string summary() const;
};

ConditionFlags probe_p_conditions(const PSequence& p, std::size_t horizon = 1000000);
ConditionFlags probe_theta_conditions(const ThetaSequence& theta, std::size_t horizon = 1000000);

// The limit-chain context: p, its conditionally linked theta, and the probes.
class LimitContext {
 public:
  static LimitContext probe(const PSequence& p, std::size_t horizon = 1000000);

  const PSequence& p() const { return p_; }
  const ThetaSequence& theta() const { return theta_; }
  const ConditionFlags& flags() const { return flags_; }

  void require_divergence() const;
  void require_eqcond2() const;

 private:
  LimitContext(PSequence p, ThetaSequence t, ConditionFlags f)
      : p_(std::move(p)), theta_(std::move(t)), flags_(f) {}
  PSequence p_;
  ThetaSequence theta_;
  ConditionFlags flags_;
};

enum class PhiMethod { Auto, Series, ClosedForm };

// phi_i = lim_n P(X^n_i = 1).  Auto uses the closed forms for eta / eta-tilde
// and the alternating marginal series otherwise.
double phi(std::size_t i, const PSequence& p, const AccuracySpec& acc = {},
           PhiMethod method = PhiMethod::Auto);
// Same, after checking the divergence flag of the context.
double phi(std::size_t i, const LimitContext& ctx, const AccuracySpec& acc = {});

// Generic alternating series sum_{j>=0} (-1)^j prod_{l=i}^{i+j} q_l.
double phi_series(std::size_t i, const PSequence& p, const AccuracySpec& acc = {});

enum class EtaPhiForm { KummerSeries, Integral, Both };
// eta closed forms: (theta/(theta+i-1)) M(1, theta+i, -theta) and
// theta * int_0^1 e^{-theta u} (1-u)^{theta+i-2} du.
double phi_eta(std::size_t i, double theta, const AccuracySpec& acc = {},
               EtaPhiForm form = EtaPhiForm::Both);
// eta-tilde closed form theta e^theta lambda_{i-1}/(theta+i-1) M(theta+1, theta+i, -theta).
double phi_eta_tilde(std::size_t i, double theta, const AccuracySpec& acc = {});

// phi_1..phi_upto (index 0 unused), via the series at the top index and the
// stable downward recursion phi_i = q_i (1 - phi_{i+1}).
std::vector<double> phi_table(const PSequence& p, std::size_t upto, const AccuracySpec& acc = {});

// P(X^inf_{i+1} = 1 | X^inf_i = 0) = phi_{i+1}/(1 - phi_i); 0 at i = 1 (state there is 1).
double xinf_transition(std::size_t i, const PSequence& p, const AccuracySpec& acc = {});

// d_TV(prefix law of X^inf, law of X^n) = phi_n for n > 1, 0 for n = 1.
double tv_prefix(std::size_t n, const PSequence& p, const AccuracySpec& acc = {});
// Direct evaluation: half the L1 distance over Delta_n and all X^inf prefixes of length n.
double tv_prefix_direct(std::size_t n, const PSequence& p, const AccuracySpec& acc = {});

// gamma_{i,inf} = P(Y_i + sum_{j>=i} Y_j Y_{j+1} = 0) by backward iteration
// from a horizon N, doubled until successive horizons agree within acc.
double gamma_inf(std::size_t i, const ThetaSequence& theta, const AccuracySpec& acc = {});
// The eta-star closed form: i >= 4 uses M(1, theta+i-1, -theta) B(z1+i-3, z2+i-3)/B(i-2, theta+i-1);
// i = 3 takes one backward-recursion step from i = 4, 5; i = 2 is delta_infinity.
double delta_i_inf(double theta, std::size_t i, double theta2star = 1.0, const AccuracySpec& acc = {});

}  // namespace dchain
