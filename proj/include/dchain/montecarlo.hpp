#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dchain/chains.hpp"
#include "dchain/errors.hpp"
#include "dchain/params.hpp"
#include "dchain/rng.hpp"

namespace dchain {

struct EstimateReport {
  std::string statistic;
  long reps = 0;
  double mean = 0.0;
  double sd = 0.0;
  double std_error = 0.0;  // sd / sqrt(reps)
  std::optional<double> ks;
  std::optional<double> pvalue;
  bool ks_reliable = false;  // asymptotic Kolmogorov p-values need reps >= 500
  std::uint64_t seed = 0;
  std::string params;                    // parameter echo
  std::map<std::string, double> extras;  // diagnostic-specific numbers
};

inline constexpr long kKsReliableReps = 500;

// Run fn once per replicate with a generator seeded by replicate_seed(seed, r);
// values are stored by replicate index, so the result does not depend on workers.
// workers = 0 uses the hardware concurrency.
template <class T>
std::vector<T> replicate(long reps, std::uint64_t seed, const std::function<T(Philox4x32&)>& fn, unsigned workers = 0) {
  if (reps < 1) throw DomainError("replicate: reps must be positive");
  std::vector<T> out(static_cast<std::size_t>(reps));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<long>(workers, reps));
  auto run = [&](long lo, long hi) {
    for (long r = lo; r < hi; ++r) {
      Philox4x32 rng(replicate_seed(seed, static_cast<std::uint64_t>(r)));
      out[static_cast<std::size_t>(r)] = fn(rng);
    }
  };
  if (workers <= 1) {
    run(0, reps);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex mu;
  const long chunk = (reps + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const long lo = static_cast<long>(w) * chunk, hi = std::min(reps, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi]() {
      try {
        run(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline std::vector<double> replicate_values(long reps, std::uint64_t seed,
                                            const std::function<double(Philox4x32&)>& fn, unsigned workers = 0) {
  return replicate<double>(reps, seed, fn, workers);
}

// Mean and sample standard deviation (summed in replicate order).
void summarize(const std::vector<double>& values, EstimateReport& report);

// One-sample Kolmogorov-Smirnov distance sup |F_n - F|.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
// Asymptotic p-value P(D_n > d) with the Stephens small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

enum class Statistic { K, Cj, A1, A2, Cstar, Lambda, AstarPrefix };

Statistic statistic_from_name(const std::string& name);  // DomainError listing the known names
std::string statistic_name(Statistic s);
std::vector<std::string> statistic_names();

struct EstimateOptions {
  std::size_t j = 2;       // cycle / orientation index for Cj and Cstar
  std::vector<int> astar;  // event A*_1 = astar[0], ... for AstarPrefix
  unsigned workers = 0;
};

// Cstar, Lambda and AstarPrefix need the signed chain; the others accept any kind
// with a top-down sampler.
EstimateReport estimate(Statistic statistic, const ChainKind& kind, std::size_t n, long reps, std::uint64_t seed,
                        const EstimateOptions& opt = {});

enum class CltCentering { QBar, ThetaLogN };

// (K_n - c_n)/sqrt(c_n) with c_n = sum_{i<=n} q_i (QBar) or theta log n (ThetaLogN),
// KS against the standard normal.  extras: qbar, qbar2 (sum q_i^2), precondition
// ratio qbar2^2/qbar, centering.
EstimateReport clt_diagnostic(const PSequence& p, std::size_t n, long reps, std::uint64_t seed,
                              CltCentering centering = CltCentering::QBar, double theta = 1.0,
                              unsigned workers = 0);

// Ordered cycle fractions of X^{n,p} with p_i = (i-1)/(i-1+theta_i).  The report's
// sample is A_1/n, tested against Beta(1, theta_limit); extras carry the KS test of
// A_2/(n - A_1), and the joint prefix probability P(A_1/n in [0.4,0.6], A_2/n in
// [0.1,0.3]) against a stick-breaking simulation with independent Beta(1, theta) sticks.
EstimateReport gem_diagnostic(const ThetaSequence& theta, std::size_t n, long reps, std::uint64_t seed,
                              unsigned workers = 0);

}  // namespace dchain
