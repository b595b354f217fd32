// Acceptance runner: one line per criterion, "PASS"/"FAIL" plus the measured
// numbers.  `acceptance --only N` runs a single criterion (used by ctest).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/moments.hpp"
#include "dchain/montecarlo.hpp"
#include "dchain/oracle.hpp"
#include "dchain/signed_stats.hpp"
#include "dchain/verify.hpp"

using namespace dchain;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

// Folds a verify suite into the outcome.
void absorb(Outcome& o, const SuiteResult& s) {
  for (const auto& c : s.checks) {
    o.require(c.passed, s.name + ": " + c.name);
  }
  o.detail << " " << s.name << " worst value/threshold=" << s.worst_ratio();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. limits of E C_j for theta = 0.5
void table1(Outcome& o) {
  const double value[] = {0.255318, 0.19468, 0.137891, 0.107192, 0.0878281, 0.0744583};
  const double err[] = {9.86668e-7, 4.38404e-7, 2.20947e-7, 1.21856e-7, 7.19514e-8, 4.48278e-8};
  double worst = 0.0;
  for (std::size_t j = 2; j <= 7; ++j) {
    const LimitEstimate e = mean_cj_eta_limit(0.5, j, LimitMethod::Series, 2);
    const double gap = std::abs(e.value - value[j - 2]);
    worst = std::max(worst, gap);
    o.require(gap < 2e-6, "value j=" + std::to_string(j));
    o.require(e.error_bound <= 1.1 * err[j - 2], "error bound j=" + std::to_string(j));
  }
  o.detail << " max|value-printed|=" << worst;
}

// 2. Var C_j(n), theta = 0.5, against the printed table and the DP oracle
void table2(Outcome& o) {
  const std::size_t ns[] = {20, 50, 100};
  const double printed[5][3] = {{0.185732, 0.177823, 0.175253},
                                {0.142278, 0.133938, 0.131308},
                                {0.116493, 0.107688, 0.104996},
                                {0.0996403, 0.090335, 0.087578},
                                {0.087877, 0.078045, 0.075221}};
  const PSequence p = PSequence::eta(0.5);
  double worst_printed = 0.0, worst_dp = 0.0;
  int matched = 0;
  for (std::size_t j = 3; j <= 7; ++j)
    for (int c = 0; c < 3; ++c) {
      const double display = variance_cj(ns[c], j, p);
      const double dp = DpMoments(ChainKind::eta(0.5), ns[c]).var_cj(j);
      worst_dp = std::max(worst_dp, std::abs(display - dp));
      const double gap = std::abs(display - printed[j - 3][c]);
      worst_printed = std::max(worst_printed, gap);
      matched += gap < 1e-6;
    }
  o.require(worst_dp < 1e-10, "display vs DP oracle");
  o.require(matched == 15, "printed values (" + std::to_string(matched) + "/15 within 1e-6)");
  o.detail << " max|display-dp|=" << worst_dp << " max|display-printed|=" << worst_printed;
}

// 3. the constant in E K_n - theta log n
void constant_k(Outcome& o) {
  const LimitEstimate e = mean_k_asymptotic(PSequence::eta(0.5), 0.5, 3);
  const LimitEstimate s = mean_k_eta_limit(0.5, LimitMethod::Series, 3);
  o.require(std::abs(e.value - 0.555069) < 5e-7, "value (generic)");
  o.require(std::abs(s.value - 0.555069) < 5e-7, "value (eta form)");
  o.require(e.error_bound <= 1.3e-7, "bracket");
  o.detail << " value=" << e.value << " bound=" << e.error_bound;
}

void suite(Outcome& o, const std::string& name) {
  VerifyOptions v;
  v.n = 12;
  v.trials = 10;
  absorb(o, run_suite(name, v));
}

// 7 adds the n = 3 end of the range explicitly
void delta_identities(Outcome& o) {
  suite(o, "delta");
  o.require(std::abs(delta_n(1.0, 1.0, 3) - 1.0 / 3) < 1e-15, "delta_3(1) = 1/3");
}

// 10. CLT for K_n of eta(1)
void clt(Outcome& o) {
  const EstimateReport r = clt_diagnostic(PSequence::eta(1.0), 20000, 2000, 1, CltCentering::QBar, 1.0);
  o.require(r.pvalue.value_or(0.0) > 1e-3, "KS p-value > 0.001");
  o.detail << " mean=" << r.mean << " sd=" << r.sd << " KS=" << r.ks.value_or(NAN)
           << " p=" << r.pvalue.value_or(NAN);
}

// 11. GEM(0.7) limit of the first ordered cycle fraction
void gem(Outcome& o) {
  const EstimateReport r = gem_diagnostic(ThetaSequence::constant(0.7), 5000, 2000, 1);
  o.require(r.pvalue.value_or(0.0) > 1e-3, "KS p-value > 0.001");
  o.detail << " KS=" << r.ks.value_or(NAN) << " p=" << r.pvalue.value_or(NAN);
  if (r.extras.count("pvalue_A2")) o.detail << " p(A2)=" << r.extras.at("pvalue_A2");
}

// 12. signed identities and Monte Carlo against the C* / A* formulas
void signed_chain(Outcome& o) {
  suite(o, "signed");
  const std::size_t n = 20;
  const long reps = 100000;
  const double kappa = 0.3;
  const double theta = 1.0;
  const PSequence p = PSequence::eta(theta);
  const ChainKind kind = ChainKind::signed_chain(p, kappa);
  const OrientationWeights w = OrientationWeights::binomial(kappa);
  const DpMoments dp(ChainKind::eta(theta), n);

  struct DpProvider : CycleMomentProvider {
    const DpMoments& d;
    explicit DpProvider(const DpMoments& m) : d(m) {}
    std::size_t n() const override { return d.n(); }
    double mean(std::size_t k) const override { return d.mean_cj(k); }
    double cov(std::size_t k, std::size_t l) const override { return d.cov_cj(k, l); }
  } provider(dp);

  double worst_z = 0.0;
  for (std::size_t j = 1; j <= 3; ++j) {
    EstimateOptions eo;
    eo.j = j;
    const EstimateReport r = estimate(Statistic::Cstar, kind, n, reps, 100 + j, eo);
    const double exact = cstar_moments(int(j), int(j), provider, w).mean_j;
    const double z = std::abs(r.mean - exact) / r.std_error;
    worst_z = std::max(worst_z, z);
    o.require(z < 3.0, "E C*_" + std::to_string(j));
  }
  {
    const EstimateReport r = estimate(Statistic::Lambda, kind, n, reps, 200);
    const double exact = lambda_mean_identity(n, kappa, dp.mean_k());
    const double z = std::abs(r.mean - exact) / r.std_error;
    worst_z = std::max(worst_z, z);
    o.require(z < 3.0, "E Lambda");
  }
  for (const std::vector<int>& a : {std::vector<int>{1}, std::vector<int>{1, 2}}) {
    EstimateOptions eo;
    eo.astar = a;
    const EstimateReport r = estimate(Statistic::AstarPrefix, kind, n, reps, 300 + a.size(), eo);
    const double exact = ordered_star_prob(a, n, p, w);
    const double se = std::sqrt(exact * (1 - exact) / double(reps));
    const double z = std::abs(r.mean - exact) / se;
    worst_z = std::max(worst_z, z);
    o.require(z < 3.0, "ordered A* prefix of length " + std::to_string(a.size()));
  }
  o.detail << " max|z|=" << worst_z;
}

// 13. invariants plus the whole verify run under ten minutes
void invariants(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& name : suite_names()) suite(o, name);
  const double secs = seconds_since(t0);
  o.require(secs < 600.0, "full verify under 10 minutes");
  o.detail << " full verify " << secs << " s";
}

struct Criterion {
  int id;
  std::string title;
  double budget;  // seconds, <= 0 for none
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-13)")->check(CLI::Range(1, 13));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all = {
      {1, "limits of E C_j (theta=0.5)", 5, table1},
      {2, "Var C_j(n) (theta=0.5)", 30, table2},
      {3, "constant of E K_n - theta log n", 0, constant_k},
      {4, "conditional relation", 60, [](Outcome& o) { suite(o, "conditional"); }},
      {5, "push-forward relation", 0, [](Outcome& o) { suite(o, "pushforward"); }},
      {6, "prefix total variation", 0, [](Outcome& o) { suite(o, "tv"); }},
      {7, "delta identities", 0, delta_identities},
      {8, "pgf identity", 0, [](Outcome& o) { suite(o, "pgf"); }},
      {9, "joint cycle counts", 0, [](Outcome& o) { suite(o, "joint"); }},
      {10, "CLT diagnostic", 180, clt},
      {11, "GEM diagnostic", 0, gem},
      {12, "signed identities", 0, signed_chain},
      {13, "invariant suites", 600, invariants},
  };

  int failures = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = seconds_since(t0);
    if (c.budget > 0) o.require(secs < c.budget, "runtime budget " + std::to_string(c.budget) + " s");
    std::printf("%s %2d %-36s %8.2fs%s\n", o.ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.ok;
  }
  return failures ? 1 : 0;
}
