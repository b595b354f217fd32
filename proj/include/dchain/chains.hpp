#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dchain/numerics.hpp"
#include "dchain/params.hpp"
#include "dchain/rng.hpp"

namespace dchain {

// A 0/1 word w_1..w_n stored by chain index (bits[i-1] = w_i).  The implicit
// sentinel w_{n+1} = 1 is never stored.  Text form lists w_n first.
struct ChainWord {
  std::vector<std::uint8_t> bits;

  ChainWord() = default;
  explicit ChainWord(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
  static ChainWord from_string(const std::string& s);
  // "w_1 w_2 ... w_n" (ascending index order, as sequences are usually listed)
  static ChainWord from_ascending(const std::string& s);
  std::string to_ascending() const;

  std::size_t n() const { return bits.size(); }
  int at(std::size_t i) const { return bits.at(i - 1); }
  std::string to_string() const;
  // w_1 = 1, w_n = 0, no two adjacent 1s
  bool in_delta() const;

  auto operator<=>(const ChainWord&) const = default;
};

// counts[j-1] = c_j
struct CycleType {
  std::vector<int> counts;

  CycleType() = default;
  explicit CycleType(std::vector<int> c) : counts(std::move(c)) {}
  int c(std::size_t j) const { return j >= 1 && j <= counts.size() ? counts[j - 1] : 0; }
  int size() const;    // sum j c_j
  int cycles() const;  // ||c|| = sum c_j
  std::string to_string() const;

  auto operator<=>(const CycleType&) const = default;
};

struct CycleStats {
  CycleType type;
  int K = 0;
  std::vector<int> lengths;  // A_1, A_2, ... in order of appearance from the top
};

enum class SignedStep : std::uint8_t { Plus0 = 0, Minus0 = 1, One = 2 };

struct SignedWord {
  std::vector<SignedStep> steps;  // steps[i-1] = s_i
  double kappa = 1.0;

  std::size_t n() const { return steps.size(); }
  ChainWord projection() const;
  // w_n ... w_1 with o = -0, i = +0, 1 = 1
  std::string to_string() const;
  static SignedWord from_string(const std::string& s, double kappa);
};

struct SignedPermutation {
  std::vector<std::vector<int>> circles;  // signed labels, first label of each circle positive

  int positive_count() const;
  std::vector<int> circle_sizes() const;
  std::string to_string() const;
};

// Dense row-major matrix (used for the small transition matrices).
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  double row_sum(std::size_t i) const;
};

enum class KindTag { X, Eta, EtaTilde, Y, XiTilde, Signed, XinfPrefix };

class ChainKind {
 public:
  static ChainKind x(const PSequence& p);
  static ChainKind eta(double theta);
  static ChainKind eta_tilde(double theta);
  static ChainKind y(const ThetaSequence& theta);
  static ChainKind xi_tilde(double theta);
  static ChainKind signed_chain(const PSequence& p, double kappa);
  static ChainKind xinf_prefix(const PSequence& p);

  KindTag tag() const { return tag_; }
  // Kinds driven by a p sequence (X, Eta, EtaTilde, Signed, XinfPrefix).
  bool uses_p() const;
  // Kinds whose words live in Delta_n (X, Eta, EtaTilde, Signed).
  bool is_derangement() const;
  const PSequence& p() const;
  const ThetaSequence& theta_seq() const;
  double kappa() const { return kappa_; }
  std::string name() const;
  std::string describe() const;

 private:
  ChainKind(KindTag t, PSequence p, ThetaSequence th, double kappa)
      : tag_(t), p_(std::move(p)), theta_(std::move(th)), kappa_(kappa) {}

  KindTag tag_;
  PSequence p_;
  ThetaSequence theta_;
  double kappa_;
};

// Transition matrix used to move from index r+1 to index r (rows: current
// state).  States are ordered (0, 1) for binary kinds and (+0, -0, 1) for the
// signed chain (SignedStep order).  For X^infinity prefixes the chain runs upward and the matrix
// moves from index r to index r+1.  For Y the rows are identical (independence).
Matrix transition_matrix(const ChainKind& kind, std::size_t r, std::size_t n);

// Sample a word of length n.  Signed kinds return the projection.
ChainWord sample_path(const ChainKind& kind, std::size_t n, std::uint64_t seed);
ChainWord sample_path(const ChainKind& kind, std::size_t n, Philox4x32& rng);

// Exact probability of a word (0 outside the support).
double path_probability(const ChainKind& kind, const ChainWord& word);
double path_probability(const ChainKind& kind, const SignedWord& word);
// Y only: (n-1)!/theta_<n> * theta_1 * prod_{i>1, w_i=1} theta_i/(i-1), in log space.
double path_probability_y_closed_form(const ThetaSequence& theta, const ChainWord& word);

// P(chain at index i equals 1) for horizon n.
double marginal_one(const ChainKind& kind, std::size_t i, std::size_t n);
// Horizon infinity (phi_i for p-driven kinds; theta_i/(i-1+theta_i) for Y).
double marginal_one_limit(const ChainKind& kind, std::size_t i, const AccuracySpec& acc = {});

// E[X_{i_1} ... X_{i_k}] for n+1 > i_1 > ... > i_k > 2 (indices descending).
double joint_marginal_product(const std::vector<std::size_t>& indices, std::size_t n,
                              const PSequence& p);

CycleStats cycle_statistics(const ChainWord& word);

struct SignedSample {
  SignedWord word;
  SignedPermutation perm;
};

SignedWord sample_signed_path(const PSequence& p, double kappa, std::size_t n, Philox4x32& rng);
SignedSample generate_signed(std::size_t n, const PSequence& p, double kappa, std::uint64_t seed);
SignedSample generate_signed(std::size_t n, const PSequence& p, double kappa, Philox4x32& rng);

}  // namespace dchain
