#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "dchain/errors.hpp"

namespace dchain {

class PSequence;

enum class TailRule { ConstantExtend, Reject };

enum class ThetaFamily { Constant, EtaStar, Holst, Tabulated, FromPConditional, FromPPushforward };

// i -> theta_i, the parameters of the generalized Feller coupling.
// theta_1 = 1 always.  theta_2 has a family default and may be overridden.
class ThetaSequence {
 public:
  struct Impl;

  static ThetaSequence constant(double theta);
  // theta*_3 = theta, theta*_i = theta (1 + theta/(i-2)) for i >= 4.
  static ThetaSequence eta_star(double theta, double theta2 = 1.0);
  // theta_i = a (i-1) / (b - a + (i-1)^c), i >= 2.
  static ThetaSequence holst(double a, double b, double c);
  // values[0] = theta_2, values[1] = theta_3, ...
  static ThetaSequence tabulated(std::vector<double> values, TailRule tail = TailRule::Reject);
  // theta_i = (i-1) q_i / (p_i p_{i-1}), i >= 3.
  static ThetaSequence from_p_conditional(const PSequence& p);
  // theta_i = (i-1) q_i / p_i, i >= 3.
  static ThetaSequence from_p_pushforward(const PSequence& p);

  ThetaSequence with_theta2(double theta2) const;
  // theta_i -> s theta_i for i >= 2.  theta_1 stays 1; callers that need the
  // scaled bracket product account for the extra factor s themselves.
  ThetaSequence scaled(double s) const;

  double operator()(std::size_t i) const;
  // P(Y_i = 1) = theta_i / (i - 1 + theta_i); equals 1 at i = 1.
  double indicator_prob(std::size_t i) const;

  ThetaFamily family() const;
  // The family's natural limit of theta_n (constant / eta_star: theta).  NaN if unknown.
  double limit_value() const;
  double scale() const { return scale_; }
  std::string describe() const;

 private:
  ThetaSequence(std::shared_ptr<const Impl> impl, double theta2_override, double scale)
      : impl_(std::move(impl)), theta2_(theta2_override), scale_(scale) {}

  std::shared_ptr<const Impl> impl_;
  double theta2_;  // NaN: use the family default
  double scale_ = 1.0;
};

enum class PFamily { Eta, EtaTilde, FromThetaConditional, FromThetaPushforward, Tabulated };

// i -> p_i with p_1 = 0, p_2 = 1 and p_i in (0,1) for i >= 3.
class PSequence {
 public:
  struct Impl;

  // p_i = (i-1)/(theta+i-1)
  static PSequence eta(double theta);
  // p_r = (theta+r-1) lambda_r / ((theta+r-1) lambda_r + theta lambda_{r-1})
  static PSequence eta_tilde(double theta);
  // p_i = G_{i-1}/G_i
  static PSequence from_theta_conditional(const ThetaSequence& theta);
  // p_i = (i-1)/(i-1+theta_i)
  static PSequence from_theta_pushforward(const ThetaSequence& theta);
  // values[0] = p_3, values[1] = p_4, ...
  static PSequence tabulated(std::vector<double> values, TailRule tail = TailRule::Reject);

  double p(std::size_t i) const;
  // q_i = 1 - p_i, computed without cancellation where the family allows it.
  double q(std::size_t i) const;

  PFamily family() const;
  // For eta / eta_tilde: theta.  NaN otherwise.
  double theta() const;
  std::string describe() const;

 private:
  explicit PSequence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

enum class LinkDirection { PToTheta, ThetaToP };

// Conditional relation: theta_i = (i-1) q_i/(p_i p_{i-1}) and p_i = G_{i-1}/G_i.
double link_conditional(const PSequence& p, std::size_t i);
double link_conditional(const ThetaSequence& theta, std::size_t i);

// Push-forward relation: theta_i = (i-1) q_i / p_i and p_i = (i-1)/(i-1+theta_i).
double link_pushforward(const PSequence& p, std::size_t i);
double link_pushforward(const ThetaSequence& theta, std::size_t i);

// Tabulated lambda_1..lambda_N for constant theta via the (positive) recursion
// lambda_n = (n-1)/(n-1+theta) (lambda_{n-1} + theta/(n-2+theta) lambda_{n-2}).
// Thread safe, grows on demand.
double lambda_recursive(double theta, std::size_t n);

}  // namespace dchain
