#include "dchain/chains.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "dchain/limitchain.hpp"

namespace dchain {

// ------------------------------------------------------------- words ---

ChainWord ChainWord::from_string(const std::string& s) {
  ChainWord w;
  w.bits.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char ch = s[s.size() - 1 - k];
    if (ch != '0' && ch != '1') throw DomainError("ChainWord: expected a 0/1 string, got '" + s + "'");
    w.bits[k] = static_cast<std::uint8_t>(ch - '0');
  }
  return w;
}

ChainWord ChainWord::from_ascending(const std::string& s) {
  return from_string(std::string(s.rbegin(), s.rend()));
}

std::string ChainWord::to_ascending() const {
  const std::string s = to_string();
  return std::string(s.rbegin(), s.rend());
}

std::string ChainWord::to_string() const {
  std::string s(bits.size(), '0');
  for (std::size_t k = 0; k < bits.size(); ++k) s[bits.size() - 1 - k] = bits[k] ? '1' : '0';
  return s;
}

bool ChainWord::in_delta() const {
  const std::size_t n = bits.size();
  if (n < 2 || bits[0] != 1 || bits[n - 1] != 0) return false;
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (bits[k] && bits[k + 1]) return false;
  return true;
}

int CycleType::size() const {
  int s = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) s += static_cast<int>(j + 1) * counts[j];
  return s;
}

int CycleType::cycles() const { return std::accumulate(counts.begin(), counts.end(), 0); }

std::string CycleType::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < counts.size(); ++j) os << (j ? "," : "") << counts[j];
  os << ')';
  return os.str();
}

ChainWord SignedWord::projection() const {
  ChainWord w;
  w.bits.resize(steps.size());
  for (std::size_t k = 0; k < steps.size(); ++k) w.bits[k] = steps[k] == SignedStep::One ? 1 : 0;
  return w;
}

std::string SignedWord::to_string() const {
  std::string s(steps.size(), 'o');
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const char c = steps[k] == SignedStep::One ? '1' : (steps[k] == SignedStep::Plus0 ? 'i' : 'o');
    s[steps.size() - 1 - k] = c;
  }
  return s;
}

SignedWord SignedWord::from_string(const std::string& s, double kappa) {
  SignedWord w;
  w.kappa = kappa;
  w.steps.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const char c = s[s.size() - 1 - k];
    if (c == '1')
      w.steps[k] = SignedStep::One;
    else if (c == 'i')
      w.steps[k] = SignedStep::Plus0;
    else if (c == 'o')
      w.steps[k] = SignedStep::Minus0;
    else
      throw DomainError("SignedWord: expected characters o/i/1, got '" + s + "'");
  }
  return w;
}

int SignedPermutation::positive_count() const {
  int c = 0;
  for (const auto& circle : circles)
    for (int l : circle) c += l > 0;
  return c;
}

std::vector<int> SignedPermutation::circle_sizes() const {
  std::vector<int> out;
  for (const auto& circle : circles) out.push_back(static_cast<int>(circle.size()));
  return out;
}

std::string SignedPermutation::to_string() const {
  std::ostringstream os;
  for (const auto& circle : circles) {
    os << '(';
    for (std::size_t k = 0; k < circle.size(); ++k) os << (k ? " " : "") << (circle[k] > 0 ? "+" : "") << circle[k];
    os << ')';
  }
  return os.str();
}

double Matrix::row_sum(std::size_t i) const {
  CompensatedSum s;
  for (std::size_t j = 0; j < cols; ++j) s.add((*this)(i, j));
  return s.value();
}

// -------------------------------------------------------------- kinds ---

ChainKind ChainKind::x(const PSequence& p) {
  return ChainKind(KindTag::X, p, ThetaSequence::constant(1.0), 1.0);
}
ChainKind ChainKind::eta(double theta) {
  return ChainKind(KindTag::Eta, PSequence::eta(theta), ThetaSequence::constant(theta), 1.0);
}
ChainKind ChainKind::eta_tilde(double theta) {
  return ChainKind(KindTag::EtaTilde, PSequence::eta_tilde(theta), ThetaSequence::constant(theta), 1.0);
}
ChainKind ChainKind::y(const ThetaSequence& theta) {
  return ChainKind(KindTag::Y, PSequence::eta(1.0), theta, 1.0);
}
ChainKind ChainKind::xi_tilde(double theta) {
  return ChainKind(KindTag::XiTilde, PSequence::eta(1.0), ThetaSequence::constant(theta), 1.0);
}
ChainKind ChainKind::signed_chain(const PSequence& p, double kappa) {
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("signed chain: kappa must lie in [0,1]");
  return ChainKind(KindTag::Signed, p, ThetaSequence::constant(1.0), kappa);
}
ChainKind ChainKind::xinf_prefix(const PSequence& p) {
  return ChainKind(KindTag::XinfPrefix, p, ThetaSequence::constant(1.0), 1.0);
}

bool ChainKind::uses_p() const { return tag_ != KindTag::Y && tag_ != KindTag::XiTilde; }

bool ChainKind::is_derangement() const {
  return tag_ == KindTag::X || tag_ == KindTag::Eta || tag_ == KindTag::EtaTilde || tag_ == KindTag::Signed;
}

const PSequence& ChainKind::p() const {
  if (!uses_p()) throw DomainError("chain kind " + name() + " has no p sequence");
  return p_;
}

const ThetaSequence& ChainKind::theta_seq() const {
  if (uses_p()) throw DomainError("chain kind " + name() + " has no theta sequence");
  return theta_;
}

std::string ChainKind::name() const {
  switch (tag_) {
    case KindTag::X: return "x";
    case KindTag::Eta: return "eta";
    case KindTag::EtaTilde: return "eta_tilde";
    case KindTag::Y: return "y";
    case KindTag::XiTilde: return "xi_tilde";
    case KindTag::Signed: return "signed";
    case KindTag::XinfPrefix: return "xinf_prefix";
  }
  return "?";
}

std::string ChainKind::describe() const {
  std::string s = name() + ":";
  s += uses_p() ? p_.describe() : theta_.describe();
  if (tag_ == KindTag::Signed) s += ",kappa=" + std::to_string(kappa_);
  return s;
}

// -------------------------------------------------------- transitions ---

Matrix transition_matrix(const ChainKind& kind, std::size_t r, std::size_t n) {
  if (r < 1 || r > n) throw DomainError("transition_matrix: need 1 <= r <= n");
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde: {
      const double t = kind.theta_seq().indicator_prob(r);
      Matrix m(2, 2);
      for (std::size_t s = 0; s < 2; ++s) {
        m(s, 0) = 1.0 - t;
        m(s, 1) = t;
      }
      return m;
    }
    case KindTag::Signed: {
      const double k = kind.kappa();
      Matrix m(3, 3);
      for (std::size_t s = 0; s < 3; ++s) {
        if (r == 1) {
          m(s, 2) = 1.0;
        } else if (r == n || s == 2) {
          m(s, 0) = k;
          m(s, 1) = 1.0 - k;
        } else {
          const double p = kind.p().p(r), q = kind.p().q(r);
          m(s, 0) = k * p;
          m(s, 1) = (1.0 - k) * p;
          m(s, 2) = q;
        }
      }
      return m;
    }
    case KindTag::XinfPrefix: {
      const double a = xinf_transition(r, kind.p());
      Matrix m(2, 2);
      m(0, 0) = 1.0 - a;
      m(0, 1) = a;
      m(1, 0) = 1.0;
      return m;
    }
    default: {
      Matrix m(2, 2);
      if (r == 1) {
        m(0, 1) = m(1, 1) = 1.0;
      } else if (r == n) {
        m(0, 0) = m(1, 0) = 1.0;
      } else {
        m(0, 0) = kind.p().p(r);
        m(0, 1) = kind.p().q(r);
        m(1, 0) = 1.0;
      }
      return m;
    }
  }
}

// ----------------------------------------------------------- sampling ---

namespace {

void require_derangement_n(std::size_t n) {
  if (n < 2) throw DomainError("derangement chains need n >= 2 (no derangement of size " + std::to_string(n) + ")");
}

ChainWord sample_x(const PSequence& p, std::size_t n, Philox4x32& rng) {
  ChainWord w;
  w.bits.assign(n, 0);
  w.bits[0] = 1;
  // X_n = 0; X_2 = 0 since q_2 = 0
  std::uint8_t prev = 0;
  for (std::size_t r = n - 1; r >= 3; --r) {
    std::uint8_t cur = 0;
    if (!prev) cur = rng.uniform() < p.q(r) ? 1 : 0;
    w.bits[r - 1] = cur;
    prev = cur;
  }
  return w;
}

ChainWord sample_y(const ThetaSequence& theta, std::size_t n, Philox4x32& rng) {
  ChainWord w;
  w.bits.assign(n, 0);
  if (n >= 1) w.bits[0] = 1;
  for (std::size_t i = 2; i <= n; ++i) w.bits[i - 1] = rng.uniform() < theta.indicator_prob(i) ? 1 : 0;
  return w;
}

ChainWord sample_xinf(const PSequence& p, std::size_t n, Philox4x32& rng) {
  const std::vector<double> ph = phi_table(p, n + 1);
  ChainWord w;
  w.bits.assign(n, 0);
  if (n >= 1) w.bits[0] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (w.bits[i - 1]) continue;
    const double a = ph[i + 1] / (1.0 - ph[i]);
    w.bits[i] = rng.uniform() < a ? 1 : 0;
  }
  return w;
}

}  // namespace

ChainWord sample_path(const ChainKind& kind, std::size_t n, Philox4x32& rng) {
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde:
      if (n < 1) throw DomainError("sample_path: n must be positive");
      return sample_y(kind.theta_seq(), n, rng);
    case KindTag::XinfPrefix:
      if (n < 1) throw DomainError("sample_path: n must be positive");
      return sample_xinf(kind.p(), n, rng);
    case KindTag::Signed:
      require_derangement_n(n);
      return sample_signed_path(kind.p(), kind.kappa(), n, rng).projection();
    default:
      require_derangement_n(n);
      return sample_x(kind.p(), n, rng);
  }
}

ChainWord sample_path(const ChainKind& kind, std::size_t n, std::uint64_t seed) {
  Philox4x32 rng(seed);
  return sample_path(kind, n, rng);
}

// -------------------------------------------------------- probability ---

double path_probability(const ChainKind& kind, const ChainWord& word) {
  const std::size_t n = word.n();
  if (n == 0) throw DomainError("path_probability: empty word");
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde: {
      if (word.at(1) != 1) return 0.0;
      double pr = 1.0;
      for (std::size_t i = 2; i <= n; ++i) {
        const double t = kind.theta_seq().indicator_prob(i);
        pr *= word.at(i) ? t : 1.0 - t;
      }
      return pr;
    }
    case KindTag::XinfPrefix: {
      if (word.at(1) != 1) return 0.0;
      const std::vector<double> ph = phi_table(kind.p(), n + 1);
      double pr = 1.0;
      for (std::size_t i = 1; i < n; ++i) {
        const int cur = word.at(i), next = word.at(i + 1);
        if (cur) {
          if (next) return 0.0;
        } else {
          const double a = ph[i + 1] / (1.0 - ph[i]);
          pr *= next ? a : 1.0 - a;
        }
      }
      return pr;
    }
    case KindTag::Signed:
      throw DomainError("path_probability: signed chains take a SignedWord");
    default: {
      if (!word.in_delta()) return 0.0;
      const PSequence& p = kind.p();
      double pr = 1.0;
      for (std::size_t r = n - 1; r >= 3; --r) {
        if (word.at(r + 1)) continue;  // forced 0
        pr *= word.at(r) ? p.q(r) : p.p(r);
      }
      return pr;
    }
  }
}

double path_probability(const ChainKind& kind, const SignedWord& word) {
  if (kind.tag() != KindTag::Signed) return path_probability(kind, word.projection());
  const std::size_t n = word.n();
  require_derangement_n(n);
  double pr = 1.0;
  SignedStep prev = SignedStep::One;  // sentinel at n+1
  for (std::size_t r = n; r >= 1; --r) {
    const SignedStep s = word.steps[r - 1];
    const Matrix m = transition_matrix(kind, r, n);
    pr *= m(static_cast<std::size_t>(prev), static_cast<std::size_t>(s));
    if (pr == 0.0) return 0.0;
    prev = s;
  }
  return pr;
}

double path_probability_y_closed_form(const ThetaSequence& theta, const ChainWord& word) {
  const std::size_t n = word.n();
  if (n == 0) throw DomainError("path_probability: empty word");
  if (word.at(1) != 1) return 0.0;
  // log (n-1)! - log theta_<n> + log theta_1 + sum log theta_i/(i-1)
  CompensatedSum s;
  s.add(log_gamma(static_cast<double>(n)));
  for (std::size_t k = 2; k <= n; ++k) s.add(-std::log(theta(k) + static_cast<double>(k - 1)));
  for (std::size_t i = 2; i <= n; ++i)
    if (word.at(i)) s.add(std::log(theta(i) / static_cast<double>(i - 1)));
  return std::exp(s.value());
}

// ---------------------------------------------------------- marginals ---

namespace {

// sum_{j=0}^{m-i-1} (-1)^j prod_{l=i}^{i+j} q_l : P(X_i = 1) at horizon m.
double alternating_marginal(const PSequence& p, std::size_t i, std::size_t m) {
  if (i + 1 > m) return 0.0;
  CompensatedSum s;
  double prod = 1.0;
  double sign = 1.0;
  for (std::size_t l = i; l + 1 <= m; ++l) {
    prod *= p.q(l);
    if (prod == 0.0) break;
    s.add(sign * prod);
    if (prod < 1e-17 * std::abs(s.value())) break;
    sign = -sign;
  }
  return s.value();
}

}  // namespace

double marginal_one(const ChainKind& kind, std::size_t i, std::size_t n) {
  if (i < 1 || i > n) throw DomainError("marginal_one: need 1 <= i <= n");
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde:
      return kind.theta_seq().indicator_prob(i);
    case KindTag::XinfPrefix:
      return phi(i, kind.p());
    default:
      require_derangement_n(n);
      if (i == 1) return 1.0;
      if (i == 2 || i == n) return 0.0;
      return alternating_marginal(kind.p(), i, n);
  }
}

double marginal_one_limit(const ChainKind& kind, std::size_t i, const AccuracySpec& acc) {
  if (i < 1) throw DomainError("marginal_one_limit: i must be positive");
  switch (kind.tag()) {
    case KindTag::Y:
    case KindTag::XiTilde:
      return kind.theta_seq().indicator_prob(i);
    case KindTag::Eta:
      return phi_eta(i, kind.p().theta(), acc, EtaPhiForm::Both);
    default:
      return phi(i, kind.p(), acc);
  }
}

double joint_marginal_product(const std::vector<std::size_t>& indices, std::size_t n, const PSequence& p) {
  if (indices.empty()) return 1.0;
  std::size_t upper = n + 1;
  double prod = 1.0;
  for (std::size_t idx : indices) {
    if (idx <= 2 || idx >= upper)
      throw DomainError("joint_marginal_product: indices must satisfy n+1 > i_1 > ... > i_k > 2");
    // conditional on a 1 at `upper`, the chain below restarts with horizon upper-1
    prod *= alternating_marginal(p, idx, upper - 1);
    upper = idx;
  }
  return prod;
}

CycleStats cycle_statistics(const ChainWord& word) {
  const std::size_t n = word.n();
  if (n == 0 || word.at(1) != 1) throw DomainError("cycle_statistics: word must have w_1 = 1");
  CycleStats st;
  st.type.counts.assign(n, 0);
  std::size_t prev = n + 1;  // virtual sentinel
  for (std::size_t i = n; i >= 1; --i) {
    if (word.at(i)) {
      const int len = static_cast<int>(prev - i);
      st.lengths.push_back(len);
      st.type.counts[len - 1] += 1;
      prev = i;
    }
  }
  st.K = static_cast<int>(st.lengths.size());
  return st;
}

// ------------------------------------------------------------- signed ---

SignedWord sample_signed_path(const PSequence& p, double kappa, std::size_t n, Philox4x32& rng) {
  require_derangement_n(n);
  if (!(kappa >= 0.0 && kappa <= 1.0)) throw DomainError("signed chain: kappa must lie in [0,1]");
  SignedWord w;
  w.kappa = kappa;
  w.steps.assign(n, SignedStep::Minus0);
  auto zero_step = [&]() { return rng.uniform() < kappa ? SignedStep::Plus0 : SignedStep::Minus0; };
  SignedStep prev = SignedStep::One;
  for (std::size_t r = n; r >= 2; --r) {
    SignedStep s;
    if (r == n || prev == SignedStep::One) {
      s = zero_step();
    } else {
      // from a zero state: 1 with q_r, otherwise a zero step with the kappa split
      s = rng.uniform() < p.q(r) ? SignedStep::One : zero_step();
    }
    w.steps[r - 1] = s;
    prev = s;
  }
  w.steps[0] = SignedStep::One;
  return w;
}

SignedSample generate_signed(std::size_t n, const PSequence& p, double kappa, Philox4x32& rng) {
  SignedSample out;
  out.word = sample_signed_path(p, kappa, n, rng);
  // Labels: one per index, from n down to 1, drawn uniformly from the unused
  // absolute labels.  The sign comes from the step just above.
  std::vector<int> unused(n);
  std::iota(unused.begin(), unused.end(), 1);
  std::vector<int> circle;
  SignedStep above = SignedStep::One;
  for (std::size_t i = n; i >= 1; --i) {
    const std::size_t pick = static_cast<std::size_t>(rng.below(unused.size()));
    const int label = unused[pick];
    unused[pick] = unused.back();
    unused.pop_back();
    const bool positive = above != SignedStep::Minus0;
    circle.push_back(positive ? label : -label);
    const SignedStep s = out.word.steps[i - 1];
    if (s == SignedStep::One) {
      out.perm.circles.push_back(std::move(circle));
      circle.clear();
    }
    above = s;
  }
  return out;
}

SignedSample generate_signed(std::size_t n, const PSequence& p, double kappa, std::uint64_t seed) {
  Philox4x32 rng(seed);
  return generate_signed(n, p, kappa, rng);
}

}  // namespace dchain
