#include "dchain/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/limitchain.hpp"
#include "dchain/moments.hpp"
#include "dchain/montecarlo.hpp"
#include "dchain/numerics.hpp"
#include "dchain/oracle.hpp"
#include "dchain/rng.hpp"
#include "dchain/signed_stats.hpp"

namespace dchain {

bool SuiteResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

double SuiteResult::worst_ratio() const {
  double w = 0.0;
  for (const auto& c : checks) {
    if (c.threshold > 0.0) w = std::max(w, c.value / c.threshold);
    else if (c.value > 0.0) w = std::numeric_limits<double>::infinity();
  }
  return w;
}

std::vector<double> random_p_values(std::size_t n, std::uint64_t seed, double lo, double hi) {
  Philox4x32 rng(seed);
  std::vector<double> v;
  for (std::size_t i = 3; i <= n; ++i) v.push_back(lo + (hi - lo) * rng.uniform());
  return v;
}

namespace {

// Accumulates the worst error of one named identity.
class Tracker {
 public:
  Tracker(std::string name, double threshold) : name_(std::move(name)), threshold_(threshold) {}
  void observe(double err) {
    if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
    worst_ = std::max(worst_, err);
  }
  CheckResult result() const { return {name_, worst_, threshold_, worst_ <= threshold_}; }

 private:
  std::string name_;
  double threshold_;
  double worst_ = 0.0;
};

double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

struct ThetaCase {
  std::string label;
  ThetaSequence theta;
};

std::vector<ThetaCase> pushforward_families() {
  return {{"constant 0.5", ThetaSequence::constant(0.5)},
          {"constant 1", ThetaSequence::constant(1.0)},
          {"eta_star 0.8", ThetaSequence::eta_star(0.8)}};
}

// ------------------------------------------------------------------ suites ---

SuiteResult suite_conditional(const VerifyOptions& opt) {
  SuiteResult r{"conditional", {}, 0.0};
  Tracker tv("TV(exact X-law, Delta-conditioned Y-law), random p", 1e-12);
  Tracker mass("|total mass - 1|", 1e-12);
  for (std::size_t n = 4; n <= opt.n; ++n) {
    for (int t = 0; t < opt.trials; ++t) {
      const PSequence p = PSequence::tabulated(random_p_values(n, replicate_seed(opt.seed, n * 1000 + t)));
      const auto x = exact_law(ChainKind::x(p), n);
      const auto c = conditional_law(n, ThetaSequence::from_p_conditional(p));
      tv.observe(compare_laws(x, c).tv);
      mass.observe(std::abs(c.total() - 1.0));
    }
  }
  r.checks = {tv.result(), mass.result()};
  return r;
}

SuiteResult suite_pushforward(const VerifyOptions& opt) {
  SuiteResult r{"pushforward", {}, 0.0};
  Tracker tv("TV(exact X-law with p_i=(i-1)/(i-1+theta_i), chi_n push-forward of Y)", 1e-12);
  for (const auto& fam : pushforward_families())
    for (std::size_t n = 4; n <= opt.n; ++n) {
      const auto x = exact_law(ChainKind::x(PSequence::from_theta_pushforward(fam.theta)), n);
      tv.observe(compare_laws(x, pushforward_law(n, fam.theta)).tv);
    }
  // the two worked erasing examples
  const ChainWord y = ChainWord::from_ascending("11111001111000");
  const bool ex11 = erase11(y, 11).to_ascending() == "10101001010";
  const bool ex12 = erase11(y, 12).to_ascending() == "101010001010";
  r.checks = {tv.result(), {"chi_11 worked example", ex11 ? 0.0 : 1.0, 0.0, ex11},
              {"chi_12 worked example", ex12 ? 0.0 : 1.0, 0.0, ex12}};
  return r;
}

SuiteResult suite_tv(const VerifyOptions& opt) {
  SuiteResult r{"tv", {}, 0.0};
  Tracker tv("|TV(X-infinity prefix law, X^n law) - phi_n|", 1e-12);
  for (double theta : {0.5, 1.0}) {
    const PSequence p = PSequence::eta(theta);
    for (std::size_t n = 3; n <= opt.n; ++n) {
      const double direct = compare_laws(exact_law(ChainKind::xinf_prefix(p), n), exact_law(ChainKind::x(p), n)).tv;
      tv.observe(std::abs(direct - phi(n, p)));
    }
  }
  r.checks = {tv.result()};
  return r;
}

SuiteResult suite_pgf(const VerifyOptions&) {
  SuiteResult r{"pgf", {}, 0.0};
  Tracker id("|E s^K(X) - gamma_n(s theta)/gamma_n(theta) E s^K(Y)|", 1e-10);
  Tracker ylaw("|E s^K(Y) from the Poisson-binomial law - bracket ratio|", 1e-10);
  const std::vector<ThetaCase> fams = {{"constant 0.5", ThetaSequence::constant(0.5)},
                                       {"eta_star 0.8", ThetaSequence::eta_star(0.8)},
                                       {"constant 2", ThetaSequence::constant(2.0)}};
  for (const auto& fam : fams)
    for (std::size_t n : {6u, 12u, 24u}) {
      const auto kx = k_distribution_x(n, PSequence::from_theta_conditional(fam.theta));
      const auto ky = k_distribution_y(n, fam.theta);
      for (double s : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        const double rhs = gamma_n(fam.theta.scaled(s), n) / gamma_n(fam.theta, n) * pgf_k_y(s, n, fam.theta);
        id.observe(std::abs(pgf_from_distribution(kx, s) - rhs));
        ylaw.observe(std::abs(pgf_from_distribution(ky, s) - pgf_k_y(s, n, fam.theta)));
      }
    }
  r.checks = {id.result(), ylaw.result()};
  return r;
}

SuiteResult suite_variance(const VerifyOptions& opt) {
  SuiteResult r{"variance-formula", {}, 0.0};
  Tracker dp("|variance display - dp oracle|, n in {20,50,100}", 1e-10);
  Tracker en("|variance display - enumeration|, n <= 14", 1e-12);
  Tracker mean("|closed-form E C_j, E K - dp oracle|, n <= 60", 1e-12);
  for (double theta : {0.5, 1.3}) {
    const PSequence p = PSequence::eta(theta);
    for (std::size_t n : {20u, 50u, 100u}) {
      const DpMoments d(ChainKind::eta(theta), n);
      for (std::size_t j = 3; j <= 7; ++j) dp.observe(std::abs(variance_cj(n, j, p) - d.var_cj(j)));
    }
    for (std::size_t n = 4; n <= std::min<std::size_t>(opt.n, 14); ++n) {
      const auto types = cycle_type_law(exact_law(ChainKind::eta(theta), n));
      for (std::size_t j = 2; j <= n; ++j) {
        const double m1 = types.expectation([j](const CycleType& c) { return static_cast<double>(c.c(j)); });
        const double m2 = types.expectation([j](const CycleType& c) { return static_cast<double>(c.c(j)) * c.c(j); });
        en.observe(std::abs(variance_cj(n, j, p) - (m2 - m1 * m1)));
      }
    }
    for (std::size_t n = 5; n <= 60; n += 5) {
      const DpMoments d(ChainKind::eta(theta), n);
      mean.observe(std::abs(mean_k(n, p) - d.mean_k()));
      mean.observe(std::abs(mean_k_eta(n, theta) - d.mean_k()));
      for (std::size_t j = 2; j <= n; ++j) {
        mean.observe(std::abs(mean_cj(n, j, p) - d.mean_cj(j)));
        mean.observe(std::abs(mean_cj_eta(n, j, theta) - d.mean_cj(j)));
      }
    }
  }
  r.checks = {dp.result(), en.result(), mean.result()};
  return r;
}

SuiteResult suite_delta(const VerifyOptions& opt) {
  SuiteResult r{"delta", {}, 0.0};
  Tracker g("rel |delta_n closed form - gamma_n(eta_star)|", 1e-12);
  Tracker e("rel |delta_n closed form - Y-enumeration mass on Delta_n|", 1e-12);
  Tracker lim("|delta_4000 - delta_infinity|", 1e-3);
  for (double theta : {0.5, 2.0}) {
    for (double t2 : {1.0, 0.5}) {
      const ThetaSequence th = ThetaSequence::eta_star(theta, t2);
      for (std::size_t n = 3; n <= std::min<std::size_t>(opt.n, 12); ++n) {
        const double closed = delta_n(theta, t2, n);
        g.observe(rel_err(closed, gamma_n(th, n)));
        const auto law = exact_law(ChainKind::y(th), n);
        CompensatedSum mass;
        for (const auto& [w, pr] : law)
          if (w.in_delta()) mass.add(pr);
        e.observe(rel_err(closed, mass.value()));
      }
    }
    lim.observe(std::abs(delta_n(theta, 1.0, 4000) - delta_inf(theta, 1.0)));
  }
  r.checks = {g.result(), e.result(), lim.result()};
  return r;
}

SuiteResult suite_joint(const VerifyOptions& opt) {
  SuiteResult r{"joint", {}, 0.0};
  Tracker sum("|sum over derangement cycle types - 1|", 1e-11);
  Tracker each("|joint cycle-count formula - enumeration|", 1e-12);
  const std::size_t nmax = std::min<std::size_t>(opt.n, 10);
  for (double theta : {0.5, 1.5}) {
    const ThetaSequence th = ThetaSequence::from_p_conditional(PSequence::eta(theta));
    for (std::size_t n = 3; n <= nmax; ++n) {
      const auto law = cycle_type_law(exact_law(ChainKind::eta(theta), n));
      CompensatedSum s_eta, s_x;
      for (const CycleType& c : derangement_cycle_types(n)) {
        const double ve = joint_cycle_counts_eta(c, theta);
        const double vx = joint_cycle_counts_x(c, th);
        const double vp = joint_cycle_counts_x_p(c, PSequence::eta(theta));
        s_eta.add(ve);
        s_x.add(vx);
        each.observe(std::abs(ve - law.prob(c)));
        each.observe(std::abs(vx - law.prob(c)));
        each.observe(std::abs(vp - law.prob(c)));
      }
      sum.observe(std::abs(s_eta.value() - 1.0));
      sum.observe(std::abs(s_x.value() - 1.0));
    }
  }
  // tabulated p: the p-form against enumeration
  for (std::size_t n = 4; n <= nmax; ++n) {
    const PSequence p = PSequence::tabulated(random_p_values(n, replicate_seed(opt.seed, 77 + n)));
    const auto law = cycle_type_law(exact_law(ChainKind::x(p), n));
    CompensatedSum s;
    for (const CycleType& c : derangement_cycle_types(n)) {
      const double v = joint_cycle_counts_x_p(c, p);
      s.add(v);
      each.observe(std::abs(v - law.prob(c)));
    }
    sum.observe(std::abs(s.value() - 1.0));
  }
  r.checks = {sum.result(), each.result()};
  return r;
}

// Law of the number of positive labels, by enumerating signed words.
DistTable<int> lambda_law_enumerated(std::size_t n, const PSequence& p, double kappa) {
  const ChainKind kind = ChainKind::signed_chain(p, kappa);
  DistTable<int> out;
  for (const ChainWord& w : enumerate_delta(n)) {
    std::vector<std::size_t> zeros;
    for (std::size_t i = 1; i <= n; ++i)
      if (!w.at(i)) zeros.push_back(i);
    const unsigned long long combos = 1ULL << zeros.size();
    SignedWord sw;
    sw.kappa = kappa;
    sw.steps.assign(n, SignedStep::One);
    for (unsigned long long mask = 0; mask < combos; ++mask) {
      for (std::size_t z = 0; z < zeros.size(); ++z)
        sw.steps[zeros[z] - 1] = (mask >> z) & 1ULL ? SignedStep::Plus0 : SignedStep::Minus0;
      const double pr = path_probability(kind, sw);
      if (pr == 0.0) continue;
      int positives = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        const SignedStep above = i == n ? SignedStep::One : sw.steps[i];
        positives += above != SignedStep::Minus0;
      }
      out.add(positives, pr);
    }
  }
  return out;
}

SuiteResult suite_signed(const VerifyOptions& opt) {
  SuiteResult r{"signed", {}, 0.0};
  Tracker mean("|E Lambda_n (exact law) - (n kappa + (1-kappa) E K_n)|", 1e-12);
  Tracker law("TV(enumerated signed-word law of Lambda_n, mixture formula)", 1e-12);
  Tracker star("|C*_j moments: closed sum - enumeration|", 1e-12);
  for (double theta : {0.5, 1.0}) {
    const PSequence p = PSequence::eta(theta);
    for (std::size_t n = 4; n <= std::min<std::size_t>(opt.n, 12); ++n) {
      const auto words = exact_law(ChainKind::eta(theta), n);
      const auto k_law = cycle_count_law(words);
      const CycleLawMoments cm(cycle_type_law(words));
      for (double kappa : {0.3, 0.9}) {
        const auto lt = lambda_total(n, kappa, k_law);
        mean.observe(std::abs(lt.mean() - lambda_mean_identity(n, kappa, k_law.mean())));
        const auto le = lambda_law_enumerated(n, p, kappa);
        law.observe(compare_laws(le, lt).tv);
        mean.observe(std::abs(le.mean() - lambda_mean_identity(n, kappa, k_law.mean())));
        // sum_j C*_j = K: the C* means sum to E K and their covariances to Var K
        const OrientationWeights w = OrientationWeights::binomial(kappa);
        CompensatedSum msum, csum;
        for (int i = 1; i <= static_cast<int>(n); ++i)
          for (int j = 1; j <= static_cast<int>(n); ++j) {
            const CStarMoments cs = cstar_moments(i, j, cm, w);
            csum.add(cs.cov_ij);
            if (i == j) msum.add(cs.mean_i);
          }
        star.observe(std::abs(msum.value() - k_law.mean()));
        star.observe(std::abs(csum.value() - k_law.variance()));
      }
    }
  }
  r.checks = {mean.result(), law.result(), star.result()};
  return r;
}

SuiteResult suite_invariants(const VerifyOptions& opt) {
  SuiteResult r{"invariants", {}, 0.0};
  AccuracySpec acc;

  Tracker num("numerics cross-checks (Kummer series/integral, pFq, Pochhammer, quadrature, lambda)", 1e-9);
  for (double theta : {0.3, 1.0, 2.5})
    for (std::size_t i : {2u, 5u, 12u}) {
      const double a = kummer_m(1.0, theta + i, -theta, acc, KummerMethod::Series);
      const double b = kummer_m(1.0, theta + i, -theta, acc, KummerMethod::Both);
      num.observe(rel_err(a, b));
      num.observe(rel_err(a, generalized_pfq({1.0}, {theta + i}, -theta, acc)));
      num.observe(rel_err(phi_eta(i, theta, acc, EtaPhiForm::KummerSeries), phi_eta(i, theta, acc, EtaPhiForm::Integral)));
      num.observe(rel_err(rising_factorial(theta, static_cast<long>(i)),
                          std::exp(log_gamma(theta + i) - log_gamma(theta))));
    }
  num.observe(std::abs(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, acc) - 2.0));
  for (double theta : {0.5, 1.0, 3.0})
    for (std::size_t n : {2u, 7u, 30u}) num.observe(std::abs(lambda_esf(n, theta) - lambda_recursive(theta, n)));

  Tracker gam("gamma_n three-method agreement (relative)", 1e-12);
  const std::vector<ThetaSequence> fams = {ThetaSequence::constant(0.5), ThetaSequence::eta_star(0.8),
                                           ThetaSequence::holst(0.7, 1.5, 1.2), ThetaSequence::constant(3.0)};
  for (const auto& th : fams)
    for (std::size_t n = 2; n <= 40; ++n) {
      const double a = gamma_n(th, n, GammaMethod::Recursion);
      gam.observe(rel_err(a, gamma_n(th, n, GammaMethod::GProduct)));
      gam.observe(rel_err(a, gamma_n(th, n, GammaMethod::PProduct)));
    }

  Tracker t2("theta_2 invariance of the Delta-conditioned law (TV)", 1e-12);
  for (std::size_t n = 4; n <= std::min<std::size_t>(opt.n, 12); ++n) {
    const ThetaSequence base = ThetaSequence::constant(0.7);
    t2.observe(compare_laws(conditional_law(n, base.with_theta2(0.25)), conditional_law(n, base)).tv);
    const ThetaSequence es = ThetaSequence::eta_star(1.3);
    t2.observe(compare_laws(conditional_law(n, es.with_theta2(0.4)), conditional_law(n, es)).tv);
  }

  Tracker fib("|Delta_n| against the Fibonacci recursion and word validity", 0.0);
  unsigned long long a = 1, b = 1;  // d_2, d_3
  for (std::size_t n = 2; n <= kDeltaEnumLimit; ++n) {
    const unsigned long long expect = n == 2 ? a : (n == 3 ? b : 0);
    unsigned long long want = expect;
    if (n >= 4) {
      const unsigned long long c = a + b;
      a = b;
      b = c;
      want = c;
    }
    const auto words = enumerate_delta(n);
    fib.observe(static_cast<double>(words.size() != want) + static_cast<double>(delta_cardinality(n) != want));
    if (n <= 16)
      for (const auto& w : words) fib.observe(w.in_delta() ? 0.0 : 1.0);
  }

  Tracker rows("transition matrices: |row sum - 1|", 1e-14);
  const PSequence pe = PSequence::eta(0.8);
  const std::vector<ChainKind> kinds = {ChainKind::eta(0.8),         ChainKind::eta_tilde(0.8),
                                        ChainKind::y(ThetaSequence::eta_star(0.8)), ChainKind::xi_tilde(0.8),
                                        ChainKind::signed_chain(pe, 0.3), ChainKind::xinf_prefix(pe)};
  for (const auto& k : kinds)
    for (std::size_t nn : {5u, 20u})
      for (std::size_t rr = 1; rr <= nn; ++rr) {
        const Matrix m = transition_matrix(k, rr, nn);
        for (std::size_t i = 0; i < m.rows; ++i) rows.observe(std::abs(m.row_sum(i) - 1.0));
      }

  Tracker det("seed determinism across worker counts (mismatches)", 0.0);
  const auto e1 = estimate(Statistic::K, ChainKind::eta(0.7), 40, 4000, opt.seed, {2, {}, 1});
  const auto e4 = estimate(Statistic::K, ChainKind::eta(0.7), 40, 4000, opt.seed, {2, {}, 4});
  det.observe((e1.mean != e4.mean) + (e1.sd != e4.sd));
  const auto g1 = gem_diagnostic(ThetaSequence::constant(0.7), 200, 300, opt.seed, 1);
  const auto g3 = gem_diagnostic(ThetaSequence::constant(0.7), 200, 300, opt.seed, 3);
  det.observe((g1.mean != g3.mean) + (*g1.ks != *g3.ks));
  Philox4x32 x(opt.seed), y(opt.seed);
  for (int i = 0; i < 100; ++i) det.observe(x() != y());

  r.checks = {num.result(), gam.result(), t2.result(), fib.result(), rows.result(), det.result()};
  return r;
}

const std::vector<std::pair<std::string, std::function<SuiteResult(const VerifyOptions&)>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<SuiteResult(const VerifyOptions&)>>> reg = {
      {"conditional", suite_conditional}, {"pushforward", suite_pushforward},
      {"tv", suite_tv},                   {"pgf", suite_pgf},
      {"variance-formula", suite_variance}, {"delta", suite_delta},
      {"joint", suite_joint},             {"signed", suite_signed},
      {"invariants", suite_invariants}};
  return reg;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& opt) {
  for (const auto& [n, fn] : registry()) {
    if (n != name) continue;
    const auto t0 = std::chrono::steady_clock::now();
    SuiteResult r = fn(opt);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
  }
  std::string known;
  for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
  throw DomainError("unknown suite '" + name + "' (known: " + known + ")");
}

}  // namespace dchain
