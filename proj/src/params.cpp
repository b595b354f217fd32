#include "dchain/params.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace dchain {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive and finite");
}

// Growable table of lambda_n(theta) built from the positive recursion.
class LambdaTable {
 public:
  explicit LambdaTable(double theta) : theta_(theta), values_{0.0, 0.0, 1.0 / (1.0 + theta)} {}

  double operator()(std::size_t n) const {
    if (n == 0) throw DomainError("lambda: n must be at least 1");
    std::lock_guard<std::mutex> lock(mu_);
    while (values_.size() <= n) {
      const double m = static_cast<double>(values_.size());
      const std::size_t k = values_.size();
      values_.push_back((m - 1.0) / (m - 1.0 + theta_) *
                        (values_[k - 1] + theta_ / (m - 2.0 + theta_) * values_[k - 2]));
    }
    return values_[n];
  }

 private:
  double theta_;
  mutable std::mutex mu_;
  mutable std::vector<double> values_;  // index 0 unused
};

}  // namespace

double lambda_recursive(double theta, std::size_t n) {
  require_positive(theta, "theta");
  return LambdaTable(theta)(n);
}

// ---------------------------------------------------------------- theta ---

struct ThetaSequence::Impl {
  virtual ~Impl() = default;
  virtual ThetaFamily family() const = 0;
  // theta_i for i >= 2 (family default at i = 2)
  virtual double value(std::size_t i) const = 0;
  virtual double limit() const { return kNaN; }
  virtual std::string describe() const = 0;
};

namespace {

struct ConstantTheta : ThetaSequence::Impl {
  double theta;
  explicit ConstantTheta(double t) : theta(t) {}
  ThetaFamily family() const override { return ThetaFamily::Constant; }
  double value(std::size_t) const override { return theta; }
  double limit() const override { return theta; }
  std::string describe() const override { return "constant(" + std::to_string(theta) + ")"; }
};

struct EtaStarTheta : ThetaSequence::Impl {
  double theta;
  explicit EtaStarTheta(double t) : theta(t) {}
  ThetaFamily family() const override { return ThetaFamily::EtaStar; }
  double value(std::size_t i) const override {
    if (i == 2) return 1.0;
    if (i == 3) return theta;
    return theta * (1.0 + theta / static_cast<double>(i - 2));
  }
  double limit() const override { return theta; }
  std::string describe() const override { return "eta_star(" + std::to_string(theta) + ")"; }
};

struct HolstTheta : ThetaSequence::Impl {
  double a, b, c;
  HolstTheta(double a_, double b_, double c_) : a(a_), b(b_), c(c_) {}
  ThetaFamily family() const override { return ThetaFamily::Holst; }
  double value(std::size_t i) const override {
    const double m = static_cast<double>(i - 1);
    const double den = b - a + std::pow(m, c);
    const double v = a * m / den;
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("holst: non-positive theta_" + std::to_string(i));
    return v;
  }
  double limit() const override {
    if (c == 1.0) return a;
    return c > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "holst(" << a << "," << b << "," << c << ")";
    return os.str();
  }
};

struct TabulatedTheta : ThetaSequence::Impl {
  std::vector<double> values;
  TailRule tail;
  TabulatedTheta(std::vector<double> v, TailRule t) : values(std::move(v)), tail(t) {}
  ThetaFamily family() const override { return ThetaFamily::Tabulated; }
  double value(std::size_t i) const override {
    const std::size_t k = i - 2;
    if (k < values.size()) return values[k];
    if (tail == TailRule::Reject)
      throw DomainError("tabulated theta: index " + std::to_string(i) + " beyond table");
    return values.back();
  }
  std::string describe() const override {
    return "tabulated(" + std::to_string(values.size()) + " values)";
  }
};

struct FromPTheta : ThetaSequence::Impl {
  std::shared_ptr<PSequence> p;
  bool conditional;
  FromPTheta(const PSequence& ps, bool cond) : p(std::make_shared<PSequence>(ps)), conditional(cond) {}
  ThetaFamily family() const override {
    return conditional ? ThetaFamily::FromPConditional : ThetaFamily::FromPPushforward;
  }
  double value(std::size_t i) const override {
    if (i == 2) return 1.0;
    return conditional ? link_conditional(*p, i) : link_pushforward(*p, i);
  }
  double limit() const override { return p->theta(); }
  std::string describe() const override {
    return std::string(conditional ? "conditional_from(" : "pushforward_from(") + p->describe() + ")";
  }
};

}  // namespace

ThetaSequence ThetaSequence::constant(double theta) {
  require_positive(theta, "theta");
  // theta_2 = theta: the classical Feller coupling.
  return ThetaSequence(std::make_shared<ConstantTheta>(theta), kNaN, 1.0);
}

ThetaSequence ThetaSequence::eta_star(double theta, double theta2) {
  require_positive(theta, "theta");
  if (!(theta2 > 0.0 && theta2 <= 1.0)) throw DomainError("eta_star: theta*_2 must lie in (0,1]");
  return ThetaSequence(std::make_shared<EtaStarTheta>(theta), theta2, 1.0);
}

ThetaSequence ThetaSequence::holst(double a, double b, double c) {
  require_positive(a, "holst a");
  require_positive(c, "holst c");
  if (!(b - a + 1.0 > 0.0)) throw DomainError("holst: b - a + 1 must be positive");
  return ThetaSequence(std::make_shared<HolstTheta>(a, b, c), kNaN, 1.0);
}

ThetaSequence ThetaSequence::tabulated(std::vector<double> values, TailRule tail) {
  if (values.empty()) throw DomainError("tabulated theta: empty table");
  for (double v : values) require_positive(v, "tabulated theta value");
  return ThetaSequence(std::make_shared<TabulatedTheta>(std::move(values), tail), kNaN, 1.0);
}

ThetaSequence ThetaSequence::from_p_conditional(const PSequence& p) {
  return ThetaSequence(std::make_shared<FromPTheta>(p, true), kNaN, 1.0);
}

ThetaSequence ThetaSequence::from_p_pushforward(const PSequence& p) {
  return ThetaSequence(std::make_shared<FromPTheta>(p, false), kNaN, 1.0);
}

ThetaSequence ThetaSequence::with_theta2(double theta2) const {
  require_positive(theta2, "theta_2");
  return ThetaSequence(impl_, theta2, scale_);
}

ThetaSequence ThetaSequence::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("scaled: s must be positive");
  return ThetaSequence(impl_, theta2_, scale_ * s);
}

double ThetaSequence::operator()(std::size_t i) const {
  if (i == 0) throw DomainError("theta sequence is indexed from 1");
  if (i == 1) return 1.0;
  if (i == 2 && !std::isnan(theta2_)) return scale_ * theta2_;
  return scale_ * impl_->value(i);
}

double ThetaSequence::indicator_prob(std::size_t i) const {
  if (i == 1) return 1.0;
  const double t = (*this)(i);
  return t / (static_cast<double>(i - 1) + t);
}

ThetaFamily ThetaSequence::family() const { return impl_->family(); }
double ThetaSequence::limit_value() const { return scale_ * impl_->limit(); }

std::string ThetaSequence::describe() const {
  std::string s = impl_->describe();
  if (!std::isnan(theta2_)) s += "[theta2=" + std::to_string(theta2_) + "]";
  if (scale_ != 1.0) s += "*" + std::to_string(scale_);
  return s;
}

// -------------------------------------------------------------------- p ---

struct PSequence::Impl {
  virtual ~Impl() = default;
  virtual PFamily family() const = 0;
  // p_i and q_i for i >= 3
  virtual double p(std::size_t i) const = 0;
  virtual double q(std::size_t i) const { return 1.0 - p(i); }
  virtual double theta() const { return kNaN; }
  virtual std::string describe() const = 0;
};

namespace {

struct EtaP : PSequence::Impl {
  double th;
  explicit EtaP(double t) : th(t) {}
  PFamily family() const override { return PFamily::Eta; }
  double p(std::size_t i) const override {
    const double m = static_cast<double>(i - 1);
    return m / (th + m);
  }
  double q(std::size_t i) const override { return th / (th + static_cast<double>(i - 1)); }
  double theta() const override { return th; }
  std::string describe() const override { return "eta(" + std::to_string(th) + ")"; }
};

struct EtaTildeP : PSequence::Impl {
  double th;
  LambdaTable lambda;
  explicit EtaTildeP(double t) : th(t), lambda(t) {}
  PFamily family() const override { return PFamily::EtaTilde; }
  double p(std::size_t r) const override {
    const double a = (th + static_cast<double>(r - 1)) * lambda(r);
    return a / (a + th * lambda(r - 1));
  }
  double q(std::size_t r) const override {
    const double a = (th + static_cast<double>(r - 1)) * lambda(r);
    const double b = th * lambda(r - 1);
    return b / (a + b);
  }
  double theta() const override { return th; }
  std::string describe() const override { return "eta_tilde(" + std::to_string(th) + ")"; }
};

// p_i = G_{i-1}/G_i, via p_i = 1/(1 + t_i p_{i-1}), t_i = theta_i/(i-1).
// Memoized; grows on demand under a mutex.
struct ConditionalP : PSequence::Impl {
  ThetaSequence theta_seq;
  mutable std::mutex mu;
  mutable std::vector<double> ps{0.0, 0.0, 1.0};  // p_0 (unused), p_1, p_2
  mutable std::vector<double> qs{1.0, 1.0, 0.0};
  explicit ConditionalP(ThetaSequence t) : theta_seq(std::move(t)) {}
  PFamily family() const override { return PFamily::FromThetaConditional; }
  void grow(std::size_t i) const {
    while (ps.size() <= i) {
      const std::size_t k = ps.size();
      const double x = theta_seq(k) / static_cast<double>(k - 1) * ps[k - 1];
      ps.push_back(1.0 / (1.0 + x));
      qs.push_back(x / (1.0 + x));
    }
  }
  double p(std::size_t i) const override {
    std::lock_guard<std::mutex> lock(mu);
    grow(i);
    return ps[i];
  }
  double q(std::size_t i) const override {
    std::lock_guard<std::mutex> lock(mu);
    grow(i);
    return qs[i];
  }
  double theta() const override {
    return theta_seq.family() == ThetaFamily::Constant ? theta_seq.limit_value() : kNaN;
  }
  std::string describe() const override { return "conditional_from(" + theta_seq.describe() + ")"; }
};

struct PushforwardP : PSequence::Impl {
  ThetaSequence theta_seq;
  explicit PushforwardP(ThetaSequence t) : theta_seq(std::move(t)) {}
  PFamily family() const override { return PFamily::FromThetaPushforward; }
  double p(std::size_t i) const override {
    const double m = static_cast<double>(i - 1);
    return m / (m + theta_seq(i));
  }
  double q(std::size_t i) const override {
    const double t = theta_seq(i);
    return t / (static_cast<double>(i - 1) + t);
  }
  double theta() const override { return theta_seq.limit_value(); }
  std::string describe() const override { return "pushforward_from(" + theta_seq.describe() + ")"; }
};

struct TabulatedP : PSequence::Impl {
  std::vector<double> values;
  TailRule tail;
  TabulatedP(std::vector<double> v, TailRule t) : values(std::move(v)), tail(t) {}
  PFamily family() const override { return PFamily::Tabulated; }
  double p(std::size_t i) const override {
    const std::size_t k = i - 3;
    if (k < values.size()) return values[k];
    if (tail == TailRule::Reject)
      throw DomainError("tabulated p: index " + std::to_string(i) + " beyond table");
    return values.back();
  }
  std::string describe() const override { return "tabulated(" + std::to_string(values.size()) + " values)"; }
};

}  // namespace

PSequence PSequence::eta(double theta) {
  require_positive(theta, "theta");
  return PSequence(std::make_shared<EtaP>(theta));
}

PSequence PSequence::eta_tilde(double theta) {
  require_positive(theta, "theta");
  return PSequence(std::make_shared<EtaTildeP>(theta));
}

PSequence PSequence::from_theta_conditional(const ThetaSequence& theta) {
  return PSequence(std::make_shared<ConditionalP>(theta));
}

PSequence PSequence::from_theta_pushforward(const ThetaSequence& theta) {
  return PSequence(std::make_shared<PushforwardP>(theta));
}

PSequence PSequence::tabulated(std::vector<double> values, TailRule tail) {
  if (values.empty()) throw DomainError("tabulated p: empty table");
  for (double v : values)
    if (!(v > 0.0 && v < 1.0)) throw DomainError("tabulated p: values must lie in (0,1)");
  return PSequence(std::make_shared<TabulatedP>(std::move(values), tail));
}

double PSequence::p(std::size_t i) const {
  if (i == 0) throw DomainError("p sequence is indexed from 1");
  if (i == 1) return 0.0;
  if (i == 2) return 1.0;
  return impl_->p(i);
}

double PSequence::q(std::size_t i) const {
  if (i == 0) throw DomainError("p sequence is indexed from 1");
  if (i == 1) return 1.0;
  if (i == 2) return 0.0;
  return impl_->q(i);
}

PFamily PSequence::family() const { return impl_->family(); }
double PSequence::theta() const { return impl_->theta(); }
std::string PSequence::describe() const { return impl_->describe(); }

// ----------------------------------------------------------------- links ---

double link_conditional(const PSequence& p, std::size_t i) {
  if (i < 3) throw DomainError("link_conditional: i must be at least 3");
  return static_cast<double>(i - 1) * p.q(i) / (p.p(i) * p.p(i - 1));
}

double link_conditional(const ThetaSequence& theta, std::size_t i) {
  if (i < 3) throw DomainError("link_conditional: i must be at least 3");
  // G ratio recursion: G_{i-1}/G_i = 1/(1 + theta_i/(i-1) * G_{i-2}/G_{i-1}).
  double r = 1.0;  // G_1/G_2
  for (std::size_t k = 3; k <= i; ++k) r = 1.0 / (1.0 + theta(k) / static_cast<double>(k - 1) * r);
  return r;
}

double link_pushforward(const PSequence& p, std::size_t i) {
  if (i < 3) throw DomainError("link_pushforward: i must be at least 3");
  return static_cast<double>(i - 1) * p.q(i) / p.p(i);
}

double link_pushforward(const ThetaSequence& theta, std::size_t i) {
  if (i < 3) throw DomainError("link_pushforward: i must be at least 3");
  const double m = static_cast<double>(i - 1);
  return m / (m + theta(i));
}

}  // namespace dchain
