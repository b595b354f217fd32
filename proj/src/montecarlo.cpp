#include "dchain/montecarlo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "dchain/numerics.hpp"

namespace dchain {

void summarize(const std::vector<double>& values, EstimateReport& report) {
  if (values.size() < 2) throw DomainError("summarize: need at least two replicates");
  CompensatedSum s;
  for (double v : values) s.add(v);
  const double mean = s.value() / static_cast<double>(values.size());
  CompensatedSum ss;
  for (double v : values) ss.add((v - mean) * (v - mean));
  report.reps = static_cast<long>(values.size());
  report.mean = mean;
  report.sd = std::sqrt(ss.value() / static_cast<double>(values.size() - 1));
  report.std_error = report.sd / std::sqrt(static_cast<double>(values.size()));
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  // ties: evaluate the empirical CDF just below and at each distinct value
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t k = i;
    while (k + 1 < sample.size() && sample[k + 1] == sample[i]) ++k;
    const double f = cdf(sample[i]);
    d = std::max(d, std::max(std::abs(static_cast<double>(k + 1) / n - f), std::abs(f - static_cast<double>(i) / n)));
    i = k + 1;
  }
  return d;
}

double kolmogorov_pvalue(double d, std::size_t n) {
  if (n == 0) throw DomainError("kolmogorov_pvalue: empty sample");
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  // Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

const std::vector<std::pair<Statistic, std::string>>& statistic_table() {
  static const std::vector<std::pair<Statistic, std::string>> t = {
      {Statistic::K, "K"},         {Statistic::Cj, "Cj"},         {Statistic::A1, "A1"},
      {Statistic::A2, "A2"},       {Statistic::Cstar, "Cstar"},   {Statistic::Lambda, "Lambda"},
      {Statistic::AstarPrefix, "AstarPrefix"}};
  return t;
}

void attach_ks(EstimateReport& r, const std::vector<double>& sample, const std::function<double(double)>& cdf) {
  r.ks = ks_statistic(sample, cdf);
  r.pvalue = kolmogorov_pvalue(*r.ks, sample.size());
  r.ks_reliable = static_cast<long>(sample.size()) >= kKsReliableReps;
}

double beta1_cdf(double x, double theta) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return -std::expm1(theta * std::log1p(-x));
}

}  // namespace

std::vector<std::string> statistic_names() {
  std::vector<std::string> out;
  for (const auto& [s, name] : statistic_table()) out.push_back(name);
  return out;
}

std::string statistic_name(Statistic s) {
  for (const auto& [t, name] : statistic_table())
    if (t == s) return name;
  return "?";
}

Statistic statistic_from_name(const std::string& name) {
  auto lower = [](std::string v) {
    for (char& ch : v) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return v;
  };
  for (const auto& [s, n] : statistic_table())
    if (lower(n) == lower(name)) return s;
  std::string known;
  for (const auto& n : statistic_names()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown statistic '" + name + "' (known: " + known + ")");
}

EstimateReport estimate(Statistic statistic, const ChainKind& kind, std::size_t n, long reps, std::uint64_t seed,
                        const EstimateOptions& opt) {
  if (reps < 2) throw DomainError("estimate: reps must be at least 2");
  const bool needs_signed =
      statistic == Statistic::Cstar || statistic == Statistic::Lambda || statistic == Statistic::AstarPrefix;
  if (needs_signed && kind.tag() != KindTag::Signed)
    throw DomainError("estimate: statistic " + statistic_name(statistic) + " needs the signed chain");
  if (kind.tag() == KindTag::XinfPrefix) throw DomainError("estimate: X-infinity prefixes carry no cycle statistics");
  if (statistic == Statistic::AstarPrefix && opt.astar.empty())
    throw DomainError("estimate: AstarPrefix needs the event values a*_1, ...");

  std::function<double(Philox4x32&)> fn;
  if (kind.tag() == KindTag::Signed) {
    const PSequence p = kind.p();
    const double kappa = kind.kappa();
    fn = [=](Philox4x32& rng) -> double {
      const SignedSample s = generate_signed(n, p, kappa, rng);
      const auto& circles = s.perm.circles;
      auto positives = [](const std::vector<int>& c) {
        return static_cast<int>(std::count_if(c.begin(), c.end(), [](int l) { return l > 0; }));
      };
      switch (statistic) {
        case Statistic::Lambda: return s.perm.positive_count();
        case Statistic::Cstar: {
          int c = 0;
          for (const auto& circle : circles) c += positives(circle) == static_cast<int>(opt.j);
          return c;
        }
        case Statistic::AstarPrefix: {
          if (circles.size() <= opt.astar.size()) return 0.0;  // event requires K > k
          for (std::size_t l = 0; l < opt.astar.size(); ++l)
            if (positives(circles[l]) != opt.astar[l]) return 0.0;
          return 1.0;
        }
        default: {
          const CycleStats st = cycle_statistics(s.word.projection());
          if (statistic == Statistic::K) return st.K;
          if (statistic == Statistic::Cj) return st.type.c(opt.j);
          if (statistic == Statistic::A1) return st.lengths.at(0);
          return st.lengths.size() > 1 ? st.lengths[1] : 0.0;
        }
      }
    };
  } else {
    fn = [&kind, n, statistic, &opt](Philox4x32& rng) -> double {
      const CycleStats st = cycle_statistics(sample_path(kind, n, rng));
      switch (statistic) {
        case Statistic::K: return st.K;
        case Statistic::Cj: return st.type.c(opt.j);
        case Statistic::A1: return st.lengths.at(0);
        default: return st.lengths.size() > 1 ? st.lengths[1] : 0.0;
      }
    };
  }
  const std::vector<double> values = replicate_values(reps, seed, fn, opt.workers);
  EstimateReport r;
  r.statistic = statistic_name(statistic);
  if (statistic == Statistic::Cj || statistic == Statistic::Cstar) r.statistic += "(" + std::to_string(opt.j) + ")";
  summarize(values, r);
  r.seed = seed;
  std::ostringstream os;
  os << kind.describe() << ", n=" << n;
  if (statistic == Statistic::AstarPrefix) {
    os << ", astar=";
    for (std::size_t l = 0; l < opt.astar.size(); ++l) os << (l ? "," : "") << opt.astar[l];
  }
  r.params = os.str();
  return r;
}

EstimateReport clt_diagnostic(const PSequence& p, std::size_t n, long reps, std::uint64_t seed, CltCentering centering,
                              double theta, unsigned workers) {
  if (n < 3) throw DomainError("clt_diagnostic: n must be at least 3");
  if (reps < 2) throw DomainError("clt_diagnostic: reps must be at least 2");
  CompensatedSum q1, q2;
  for (std::size_t i = 1; i <= n; ++i) {
    const double q = p.q(i);
    q1.add(q);
    q2.add(q * q);
  }
  const double qbar = q1.value(), qbar2 = q2.value();
  double c = qbar;
  if (centering == CltCentering::ThetaLogN) {
    if (!(theta > 0.0)) throw DomainError("clt_diagnostic: theta must be positive");
    c = theta * std::log(static_cast<double>(n));
  }
  const ChainKind kind = ChainKind::x(p);
  const double sc = std::sqrt(c);
  const std::vector<double> z = replicate_values(
      reps, seed, [&](Philox4x32& rng) { return (cycle_statistics(sample_path(kind, n, rng)).K - c) / sc; }, workers);
  EstimateReport r;
  r.statistic = centering == CltCentering::QBar ? "clt_standardized_K" : "clt_standardized_K_thetalogn";
  summarize(z, r);
  r.seed = seed;
  r.params = kind.describe() + ", n=" + std::to_string(n);
  attach_ks(r, z, [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  r.extras["qbar"] = qbar;
  r.extras["qbar2"] = qbar2;
  r.extras["precondition_ratio"] = qbar2 * qbar2 / qbar;
  r.extras["centering"] = c;
  return r;
}

EstimateReport gem_diagnostic(const ThetaSequence& theta, std::size_t n, long reps, std::uint64_t seed,
                              unsigned workers) {
  if (n < 3) throw DomainError("gem_diagnostic: n must be at least 3");
  if (reps < 2) throw DomainError("gem_diagnostic: reps must be at least 2");
  const double th = theta.limit_value();
  if (!(th > 0.0)) throw DomainError("gem_diagnostic: the theta family needs a known positive limit");
  const ChainKind kind = ChainKind::x(PSequence::from_theta_pushforward(theta));
  const double dn = static_cast<double>(n);

  const auto pairs = replicate<std::pair<int, int>>(
      reps, seed,
      [&](Philox4x32& rng) {
        const CycleStats st = cycle_statistics(sample_path(kind, n, rng));
        return std::make_pair(st.lengths[0], st.lengths.size() > 1 ? st.lengths[1] : 0);
      },
      workers);
  std::vector<double> f1, f2;
  long joint_hits = 0;
  for (const auto& [l1, l2] : pairs) {
    const double x1 = l1 / dn, x2 = l2 / dn;
    f1.push_back(x1);
    if (l1 < static_cast<int>(n)) f2.push_back(l2 / (dn - l1));
    joint_hits += (x1 >= 0.4 && x1 <= 0.6 && x2 >= 0.1 && x2 <= 0.3);
  }

  EstimateReport r;
  r.statistic = "gem_A1_over_n";
  summarize(f1, r);
  r.seed = seed;
  r.params = kind.describe() + ", theta limit=" + std::to_string(th) + ", n=" + std::to_string(n);
  attach_ks(r, f1, [th](double x) { return beta1_cdf(x, th); });
  r.extras["theta_limit"] = th;
  r.extras["beta_mean"] = 1.0 / (1.0 + th);
  if (f2.size() >= 2) {
    const double d2 = ks_statistic(f2, [th](double x) { return beta1_cdf(x, th); });
    r.extras["ks_A2"] = d2;
    r.extras["pvalue_A2"] = kolmogorov_pvalue(d2, f2.size());
    r.extras["reps_A2"] = static_cast<double>(f2.size());
  }

  // stick-breaking oracle on an independent stream
  const long oracle_reps = 20 * reps;
  const std::vector<double> hits = replicate_values(
      oracle_reps, splitmix64(seed ^ 0x6A09E667F3BCC909ULL),
      [th](Philox4x32& rng) {
        const double v1 = -std::expm1(std::log(rng.uniform_open()) / th);
        const double v2 = -std::expm1(std::log(rng.uniform_open()) / th);
        const double x2 = (1.0 - v1) * v2;
        return (v1 >= 0.4 && v1 <= 0.6 && x2 >= 0.1 && x2 <= 0.3) ? 1.0 : 0.0;
      },
      workers);
  CompensatedSum hs;
  for (double h : hits) hs.add(h);
  const double p_emp = static_cast<double>(joint_hits) / static_cast<double>(reps);
  const double p_orc = hs.value() / static_cast<double>(oracle_reps);
  const double sigma = std::sqrt(p_orc * (1.0 - p_orc) / static_cast<double>(reps) +
                                 p_orc * (1.0 - p_orc) / static_cast<double>(oracle_reps));
  r.extras["joint_empirical"] = p_emp;
  r.extras["joint_oracle"] = p_orc;
  r.extras["joint_sigma"] = sigma;
  r.extras["joint_z"] = sigma > 0.0 ? (p_emp - p_orc) / sigma : 0.0;
  return r;
}

}  // namespace dchain
