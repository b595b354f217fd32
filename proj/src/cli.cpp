#include "dchain/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "dchain/chains.hpp"
#include "dchain/coupling.hpp"
#include "dchain/limitchain.hpp"
#include "dchain/moments.hpp"
#include "dchain/montecarlo.hpp"
#include "dchain/oracle.hpp"
#include "dchain/signed_stats.hpp"
#include "dchain/verify.hpp"

#ifndef DCHAIN_VERSION
#define DCHAIN_VERSION "dev"
#endif

namespace dchain::cli {

using nlohmann::json;

namespace {

// Raised for an unknown quantity / suite / kind name; maps to exit 2.
class UnknownName : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Opts {
  // chain and parameters
  std::string kind = "eta";
  std::string family = "constant";  // theta family
  std::string p_family = "eta";
  double theta = 1.0;
  std::optional<double> theta2;
  std::vector<double> p_values;
  std::vector<double> holst;  // a, b, c
  double kappa = 0.5;
  std::size_t n = 10;
  // indices and series controls
  std::size_t i = 2, j = 2, k = 1;
  int m = 2;
  int ell = 0;
  double s = 1.0;
  double alpha = 1.0;
  std::string method;
  std::vector<int> cycle_type;
  std::vector<int> astar;
  // runs
  std::uint64_t seed = 1;
  long reps = 1;
  unsigned workers = 0;
  std::string statistic = "K";
  std::string which = "clt";
  std::string centering = "qbar";
  double level = 1e-3;
  std::string suite = "all";
  int trials = 10;
  std::string quantity;
  // output and accuracy
  std::string format = "json";
  int digits = 9;
  AccuracySpec acc;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Report {
  json results = json::object();
  std::optional<Table> table;
  bool ok = true;
};

// ---------------------------------------------------------- formatting ---

double round_sig(double x, int digits) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

// Round every floating value in a json tree to `digits` significant digits.
void round_tree(json& j, int digits) {
  if (j.is_number_float()) {
    j = round_sig(j.get<double>(), digits);
  } else if (j.is_array() || j.is_object()) {
    for (auto& v : j) round_tree(v, digits);
  }
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_cell(const json& v) {
  std::string s = cell(v);
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  return s;
}

void emit(std::ostream& out, const std::string& format, const std::string& sub, const json& config, Report rep,
          int digits) {
  round_tree(rep.results, digits);
  if (rep.table)
    for (auto& row : rep.table->rows)
      for (auto& v : row) round_tree(v, digits);

  if (format == "json") {
    json doc = {{"program", "dchain"},    {"version", version()}, {"subcommand", sub},
                {"config", config},       {"results", rep.results}, {"status", rep.ok ? "pass" : "fail"}};
    if (rep.table) {
      json rows = json::array();
      for (const auto& row : rep.table->rows) {
        json o = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) o[rep.table->columns[c]] = row[c];
        rows.push_back(o);
      }
      doc["rows"] = rows;
    }
    out << doc.dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    out << "# dchain " << version() << " " << sub << " config=" << config.dump() << "\n";
    if (rep.table) {
      for (std::size_t c = 0; c < rep.table->columns.size(); ++c) out << (c ? "," : "") << rep.table->columns[c];
      out << "\n";
      for (const auto& row : rep.table->rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << csv_cell(row[c]);
        out << "\n";
      }
    } else {
      out << "key,value\n";
      for (const auto& [k, v] : rep.results.items()) out << csv_cell(json(k)) << "," << csv_cell(v) << "\n";
    }
    return;
  }
  // text
  out << "dchain " << version() << " " << sub << "  [" << (rep.ok ? "pass" : "fail") << "]\n";
  out << "config: " << config.dump() << "\n";
  if (rep.table) {
    std::vector<std::size_t> width(rep.table->columns.size());
    for (std::size_t c = 0; c < width.size(); ++c) width[c] = rep.table->columns[c].size();
    for (const auto& row : rep.table->rows)
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], cell(row[c]).size());
    for (std::size_t c = 0; c < width.size(); ++c)
      out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << rep.table->columns[c];
    out << "\n";
    for (const auto& row : rep.table->rows) {
      for (std::size_t c = 0; c < row.size(); ++c)
        out << (c ? "  " : "") << std::setw(static_cast<int>(width[c])) << cell(row[c]);
      out << "\n";
    }
  }
  for (const auto& [k, v] : rep.results.items()) {
    if (rep.table && (k == "rows")) continue;
    out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  }
}

// ---------------------------------------------------------- parameters ---

ThetaSequence make_theta(const Opts& o);

PSequence make_p(const Opts& o) {
  if (o.p_family == "eta") return PSequence::eta(o.theta);
  if (o.p_family == "eta_tilde") return PSequence::eta_tilde(o.theta);
  if (o.p_family == "tabulated") {
    if (o.p_values.empty()) throw DomainError("--p-family tabulated needs --p-values p_3,p_4,...");
    return PSequence::tabulated(o.p_values);
  }
  if (o.p_family == "from_theta_conditional" || o.p_family == "from_theta_pushforward") {
    if (o.family.rfind("from_p", 0) == 0) throw DomainError("p and theta families cannot both be linked");
    const ThetaSequence th = make_theta(o);
    return o.p_family == "from_theta_conditional" ? PSequence::from_theta_conditional(th)
                                                  : PSequence::from_theta_pushforward(th);
  }
  throw UnknownName("unknown p family '" + o.p_family +
                    "' (known: eta, eta_tilde, tabulated, from_theta_conditional, from_theta_pushforward)");
}

ThetaSequence make_theta(const Opts& o) {
  ThetaSequence th = ThetaSequence::constant(1.0);
  if (o.family == "constant") {
    th = ThetaSequence::constant(o.theta);
  } else if (o.family == "eta_star") {
    return ThetaSequence::eta_star(o.theta, o.theta2.value_or(1.0));
  } else if (o.family == "holst") {
    if (o.holst.size() != 3) throw DomainError("--family holst needs --holst a,b,c");
    th = ThetaSequence::holst(o.holst[0], o.holst[1], o.holst[2]);
  } else if (o.family == "from_p_conditional" || o.family == "from_p_pushforward") {
    if (o.p_family.rfind("from_theta", 0) == 0) throw DomainError("p and theta families cannot both be linked");
    const PSequence p = make_p(o);
    th = o.family == "from_p_conditional" ? ThetaSequence::from_p_conditional(p) : ThetaSequence::from_p_pushforward(p);
  } else {
    throw UnknownName("unknown theta family '" + o.family +
                      "' (known: constant, eta_star, holst, from_p_conditional, from_p_pushforward)");
  }
  return o.theta2 ? th.with_theta2(*o.theta2) : th;
}

ChainKind make_kind(const Opts& o) {
  if (o.kind == "eta") return ChainKind::eta(o.theta);
  if (o.kind == "eta_tilde") return ChainKind::eta_tilde(o.theta);
  if (o.kind == "x") return ChainKind::x(make_p(o));
  if (o.kind == "y") return ChainKind::y(make_theta(o));
  if (o.kind == "xi_tilde") return ChainKind::xi_tilde(o.theta);
  if (o.kind == "signed") return ChainKind::signed_chain(make_p(o), o.kappa);
  if (o.kind == "xinf") return ChainKind::xinf_prefix(make_p(o));
  throw UnknownName("unknown kind '" + o.kind + "' (known: eta, eta_tilde, x, y, xi_tilde, signed, xinf)");
}

LimitMethod limit_method(const Opts& o, LimitMethod dflt) {
  if (o.method.empty()) return dflt;
  if (o.method == "series") return LimitMethod::Series;
  if (o.method == "integral") return LimitMethod::Integral;
  throw UnknownName("unknown method '" + o.method + "' (known: series, integral)");
}

GammaMethod gamma_method(const Opts& o) {
  if (o.method.empty() || o.method == "recursion") return GammaMethod::Recursion;
  if (o.method == "gproduct") return GammaMethod::GProduct;
  if (o.method == "pproduct") return GammaMethod::PProduct;
  throw UnknownName("unknown method '" + o.method + "' (known: recursion, gproduct, pproduct)");
}

CycleType cycle_type_arg(const Opts& o) {
  if (o.cycle_type.empty()) throw DomainError("--cycle-type c_1,c_2,... is required");
  return CycleType(o.cycle_type);
}

json limit_json(const LimitEstimate& e) { return {{"value", e.value}, {"error_bound", e.error_bound}, {"m", e.m}}; }

template <class Key>
Report dist_report(const DistTable<Key>& d, const std::string& key_name) {
  Report r;
  Table t{{key_name, "probability"}, {}};
  for (const auto& [k, p] : d) t.rows.push_back({json(k), json(p)});
  r.table = t;
  r.results["total"] = d.total();
  r.results["mean"] = d.mean();
  r.results["variance"] = d.variance();
  return r;
}

Report value_report(double v) {
  Report r;
  r.results["value"] = v;
  return r;
}

// ------------------------------------------------------------- exact ---

using QuantityFn = std::function<Report(const Opts&)>;

const std::vector<std::pair<std::string, QuantityFn>>& quantities() {
  static const std::vector<std::pair<std::string, QuantityFn>> q = {
      {"mean_k", [](const Opts& o) { return value_report(mean_k(o.n, make_p(o))); }},
      {"mean_k_eta", [](const Opts& o) { return value_report(mean_k_eta(o.n, o.theta)); }},
      {"psi_eta", [](const Opts& o) { return value_report(psi_eta(o.theta)); }},
      {"abar_eta", [](const Opts& o) { return value_report(abar_eta(o.theta, o.j)); }},
      {"psi_alpha", [](const Opts& o) { return value_report(psi_alpha(make_p(o), o.alpha, o.acc)); }},
      {"abar", [](const Opts& o) { return value_report(abar(make_p(o), o.j, o.acc)); }},
      {"mean_k_asymptotic",
       [](const Opts& o) {
         Report r;
         r.results = limit_json(mean_k_asymptotic(make_p(o), o.alpha, o.m, o.acc));
         return r;
       }},
      {"mean_k_eta_limit",
       [](const Opts& o) {
         Report r;
         r.results = limit_json(mean_k_eta_limit(o.theta, limit_method(o, LimitMethod::Integral), o.m, o.acc));
         return r;
       }},
      {"pattern_probability", [](const Opts& o) { return value_report(pattern_probability(o.j, o.i, o.n, make_p(o))); }},
      {"mean_cj", [](const Opts& o) { return value_report(mean_cj(o.n, o.j, make_p(o))); }},
      {"mean_cj_eta", [](const Opts& o) { return value_report(mean_cj_eta(o.n, o.j, o.theta)); }},
      {"bbar_eta", [](const Opts& o) { return value_report(bbar_eta(o.theta, o.j, o.k)); }},
      {"mean_cj_eta_limit",
       [](const Opts& o) {
         Report r;
         r.results = limit_json(mean_cj_eta_limit(o.theta, o.j, limit_method(o, LimitMethod::Integral), o.m, o.acc));
         return r;
       }},
      {"variance_cj", [](const Opts& o) { return value_report(variance_cj(o.n, o.j, make_p(o))); }},
      {"cov_eta", [](const Opts& o) { return value_report(cov_eta(o.n, o.i, o.j, o.theta)); }},
      {"cov_eta_adjacent", [](const Opts& o) { return value_report(cov_eta_adjacent(o.n, o.j, o.theta)); }},
      {"lambda_esf", [](const Opts& o) { return value_report(lambda_esf(o.n, o.theta)); }},
      {"lambda_recursive", [](const Opts& o) { return value_report(lambda_recursive(o.theta, o.n)); }},
      {"gamma_n", [](const Opts& o) { return value_report(gamma_n(make_theta(o), o.n, gamma_method(o))); }},
      {"delta_n", [](const Opts& o) { return value_report(delta_n(o.theta, o.theta2.value_or(1.0), o.n)); }},
      {"delta_inf", [](const Opts& o) { return value_report(delta_inf(o.theta, o.theta2.value_or(1.0))); }},
      {"pgf_k_y", [](const Opts& o) { return value_report(pgf_k_y(o.s, o.n, make_theta(o))); }},
      {"pgf_k_x", [](const Opts& o) { return value_report(pgf_k_x(o.s, o.n, make_theta(o))); }},
      {"k_distribution_x", [](const Opts& o) { return dist_report(k_distribution_x(o.n, make_p(o)), "k"); }},
      {"k_distribution_y", [](const Opts& o) { return dist_report(k_distribution_y(o.n, make_theta(o)), "k"); }},
      {"joint_cycle_counts_y",
       [](const Opts& o) { return value_report(joint_cycle_counts_y(cycle_type_arg(o), make_theta(o))); }},
      {"joint_cycle_counts_x",
       [](const Opts& o) { return value_report(joint_cycle_counts_x(cycle_type_arg(o), make_theta(o))); }},
      {"joint_cycle_counts_x_p",
       [](const Opts& o) { return value_report(joint_cycle_counts_x_p(cycle_type_arg(o), make_p(o))); }},
      {"joint_cycle_counts_eta",
       [](const Opts& o) { return value_report(joint_cycle_counts_eta(cycle_type_arg(o), o.theta)); }},
      {"ordered_cycle_prefix_prob",
       [](const Opts& o) { return value_report(ordered_cycle_prefix_prob(o.astar, o.n, make_theta(o))); }},
      {"phi", [](const Opts& o) { return value_report(phi(o.i, make_p(o), o.acc)); }},
      {"phi_eta", [](const Opts& o) { return value_report(phi_eta(o.i, o.theta, o.acc)); }},
      {"phi_eta_tilde", [](const Opts& o) { return value_report(phi_eta_tilde(o.i, o.theta, o.acc)); }},
      {"tv_prefix", [](const Opts& o) { return value_report(tv_prefix(o.n, make_p(o), o.acc)); }},
      {"tv_prefix_direct", [](const Opts& o) { return value_report(tv_prefix_direct(o.n, make_p(o), o.acc)); }},
      {"xinf_transition", [](const Opts& o) { return value_report(xinf_transition(o.i, make_p(o), o.acc)); }},
      {"gamma_inf", [](const Opts& o) { return value_report(gamma_inf(o.i, make_theta(o), o.acc)); }},
      {"delta_i_inf",
       [](const Opts& o) { return value_report(delta_i_inf(o.theta, o.i, o.theta2.value_or(1.0), o.acc)); }},
      {"marginal_one", [](const Opts& o) { return value_report(marginal_one(make_kind(o), o.i, o.n)); }},
      {"dp_moments",
       [](const Opts& o) {
         const DpMoments d(make_kind(o), o.n);
         Report r;
         r.results = {{"mean_k", d.mean_k()},         {"var_k", d.var_k()},
                      {"mean_cj", d.mean_cj(o.j)},    {"second_moment_cj", d.second_moment_cj(o.j)},
                      {"var_cj", d.var_cj(o.j)},      {"cov_cij", d.cov_cj(o.i, o.j)}};
         return r;
       }},
      {"exact_law",
       [](const Opts& o) {
         const auto law = exact_law(make_kind(o), o.n);
         Report r;
         Table t{{"word", "probability"}, {}};
         for (const auto& [w, p] : law) t.rows.push_back({w.to_string(), p});
         r.table = t;
         r.results["outcomes"] = law.size();
         r.results["total"] = law.total();
         return r;
       }},
      {"enumerate_delta",
       [](const Opts& o) {
         Report r;
         Table t{{"word"}, {}};
         for (const auto& w : enumerate_delta(o.n)) t.rows.push_back({w.to_string()});
         r.table = t;
         r.results["cardinality"] = delta_cardinality(o.n);
         return r;
       }},
  };
  return q;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

Report cmd_exact(const Opts& o) {
  for (const auto& [name, fn] : quantities()) {
    if (name != o.quantity) continue;
    Report r = fn(o);
    r.results["quantity"] = name;
    return r;
  }
  throw UnknownName("unknown quantity '" + o.quantity + "'; known quantities: " + join(quantity_names()));
}

// ------------------------------------------------------------- others ---

Report cmd_sample(const Opts& o) {
  const ChainKind kind = make_kind(o);
  Report r;
  const bool is_signed = kind.tag() == KindTag::Signed;
  Table t{{"rep", "word", "K", "lengths"}, {}};
  if (is_signed) t.columns = {"rep", "signed_word", "permutation", "positives"};
  for (long rep = 0; rep < o.reps; ++rep) {
    Philox4x32 rng(replicate_seed(o.seed, static_cast<std::uint64_t>(rep)));
    if (is_signed) {
      const SignedSample s = generate_signed(o.n, kind.p(), kind.kappa(), rng);
      t.rows.push_back({rep, s.word.to_string(), s.perm.to_string(), s.perm.positive_count()});
    } else {
      const ChainWord w = sample_path(kind, o.n, rng);
      std::string lengths;
      int K = 0;
      if (kind.tag() != KindTag::XinfPrefix) {
        const CycleStats st = cycle_statistics(w);
        K = st.K;
        for (int l : st.lengths) lengths += (lengths.empty() ? "" : " ") + std::to_string(l);
      }
      t.rows.push_back({rep, w.to_string(), K, lengths});
    }
  }
  r.table = t;
  r.results["kind"] = kind.describe();
  return r;
}

json report_json(const EstimateReport& e) {
  json j = {{"statistic", e.statistic}, {"reps", e.reps},         {"mean", e.mean},
            {"sd", e.sd},               {"std_error", e.std_error}, {"seed", e.seed},
            {"params", e.params}};
  if (e.ks) j["ks"] = *e.ks;
  if (e.pvalue) j["pvalue"] = *e.pvalue;
  if (e.ks) j["ks_reliable"] = e.ks_reliable;
  for (const auto& [k, v] : e.extras) j["extras"][k] = v;
  return j;
}

Report cmd_estimate(const Opts& o) {
  EstimateOptions eo;
  eo.j = o.j;
  eo.astar = o.astar;
  eo.workers = o.workers;
  Report r;
  r.results = report_json(estimate(statistic_from_name(o.statistic), make_kind(o), o.n, o.reps, o.seed, eo));
  return r;
}

Report cmd_table1(const Opts& o) {
  Report r;
  Table t{{"j", "limit", "error_bound", "theta_over_j"}, {}};
  const LimitMethod method = limit_method(o, LimitMethod::Series);
  json printed = json::array();
  for (std::size_t j = 2; j <= 7; ++j) {
    const LimitEstimate e = mean_cj_eta_limit(o.theta, j, method, o.m, o.acc);
    t.rows.push_back({j, e.value, e.error_bound, o.theta / static_cast<double>(j)});
    printed.push_back({{"j", j}, {"limit_6sig", round_sig(e.value, 6)}, {"error_6sig", round_sig(e.error_bound, 6)},
                       {"theta_over_j_3dp", std::round(o.theta / j * 1000.0) / 1000.0}});
  }
  r.table = t;
  r.results["printed_precision"] = printed;
  r.results["method"] = method == LimitMethod::Series ? "series" : "integral";
  return r;
}

Report cmd_table2(const Opts& o) {
  Report r;
  const std::vector<std::size_t> ns = {20, 50, 100};
  Table t{{"j", "n=20", "n=50", "n=100"}, {}};
  double worst = 0.0;
  json dp = json::array();
  const PSequence p = PSequence::eta(o.theta);
  std::vector<DpMoments> oracles;
  for (std::size_t n : ns) oracles.emplace_back(ChainKind::eta(o.theta), n);
  for (std::size_t j = 3; j <= 7; ++j) {
    std::vector<json> row = {j};
    json drow = {{"j", j}};
    for (std::size_t c = 0; c < ns.size(); ++c) {
      const double v = variance_cj(ns[c], j, p);
      const double d = oracles[c].var_cj(j);
      worst = std::max(worst, std::abs(v - d));
      row.push_back(v);
      drow["n=" + std::to_string(ns[c])] = d;
    }
    t.rows.push_back(row);
    dp.push_back(drow);
  }
  r.table = t;
  r.results["dp_oracle"] = dp;
  r.results["max_display_dp_gap"] = worst;
  r.ok = worst < 1e-10;
  return r;
}

Report cmd_verify(const Opts& o) {
  VerifyOptions vo;
  vo.n = o.n;
  vo.trials = o.trials;
  vo.seed = o.seed;
  vo.workers = o.workers;
  std::vector<std::string> names;
  if (o.suite == "all") {
    names = suite_names();
  } else {
    const auto known = suite_names();
    if (std::find(known.begin(), known.end(), o.suite) == known.end())
      throw UnknownName("unknown suite '" + o.suite + "'; known suites: all, " + join(known));
    names = {o.suite};
  }
  Report r;
  Table t{{"suite", "check", "value", "threshold", "passed"}, {}};
  json suites = json::array();
  for (const auto& name : names) {
    const SuiteResult s = run_suite(name, vo);
    json checks = json::array();
    for (const auto& c : s.checks) {
      t.rows.push_back({name, c.name, c.value, c.threshold, c.passed});
      checks.push_back({{"check", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
    }
    suites.push_back({{"suite", name}, {"passed", s.passed()}, {"seconds", s.seconds}, {"checks", checks}});
    r.ok = r.ok && s.passed();
  }
  r.table = t;
  r.results["suites"] = suites;
  return r;
}

Report cmd_diagnose(const Opts& o) {
  Report r;
  EstimateReport e;
  if (o.which == "clt") {
    const CltCentering c = o.centering == "qbar"        ? CltCentering::QBar
                           : o.centering == "thetalogn" ? CltCentering::ThetaLogN
                                                        : throw UnknownName("unknown centering '" + o.centering +
                                                                            "' (known: qbar, thetalogn)");
    e = clt_diagnostic(make_p(o), o.n, o.reps, o.seed, c, o.theta, o.workers);
  } else if (o.which == "gem") {
    e = gem_diagnostic(make_theta(o), o.n, o.reps, o.seed, o.workers);
  } else {
    throw UnknownName("unknown diagnostic '" + o.which + "' (known: clt, gem)");
  }
  r.results = report_json(e);
  r.results["level"] = o.level;
  r.ok = e.pvalue && *e.pvalue > o.level;
  return r;
}

const std::vector<std::string>& signed_names() {
  static const std::vector<std::string> v = {"omega",       "cki_distribution", "cstar_moments", "lambda_law",
                                             "lambda_mean", "ordered_star_prob", "estimate"};
  return v;
}

Report cmd_signed(const Opts& o) {
  const PSequence p = make_p(o);
  const OrientationWeights w = OrientationWeights::binomial(o.kappa);
  Report r;
  r.results["quantity"] = o.quantity;
  auto words = [&]() { return exact_law(ChainKind::x(p), o.n); };
  if (o.quantity == "omega") {
    r.results["value"] = omega(static_cast<int>(o.k), static_cast<int>(o.i), w);
  } else if (o.quantity == "cki_distribution") {
    const CycleLawMoments cm(cycle_type_law(words()));
    r.results["value"] = cki_distribution(static_cast<int>(o.k), static_cast<int>(o.i), o.ell, static_cast<int>(o.n),
                                          cm.marginal(o.k), w);
  } else if (o.quantity == "cstar_moments") {
    const CycleLawMoments cm(cycle_type_law(words()));
    const CStarMoments c = cstar_moments(static_cast<int>(o.i), static_cast<int>(o.j), cm, w);
    r.results["mean_i"] = c.mean_i;
    r.results["mean_j"] = c.mean_j;
    r.results["cov_ij"] = c.cov_ij;
  } else if (o.quantity == "lambda_law") {
    const auto law = lambda_total(o.n, o.kappa, cycle_count_law(words()));
    r = dist_report(law, "lambda");
    r.results["quantity"] = o.quantity;
  } else if (o.quantity == "lambda_mean") {
    const auto kl = cycle_count_law(words());
    const double exact = lambda_total(o.n, o.kappa, kl).mean();
    const double ident = lambda_mean_identity(o.n, o.kappa, kl.mean());
    r.results["exact"] = exact;
    r.results["identity"] = ident;
    r.ok = std::abs(exact - ident) < 1e-12;
  } else if (o.quantity == "ordered_star_prob") {
    r.results["value"] = ordered_star_prob(o.astar, o.n, p, w);
  } else if (o.quantity == "estimate") {
    EstimateOptions eo;
    eo.j = o.j;
    eo.astar = o.astar;
    eo.workers = o.workers;
    r.results = report_json(
        estimate(statistic_from_name(o.statistic), ChainKind::signed_chain(p, o.kappa), o.n, o.reps, o.seed, eo));
  } else {
    throw UnknownName("unknown signed quantity '" + o.quantity + "'; known: " + join(signed_names()));
  }
  return r;
}

// Echo of every option of the selected subcommand (parsed value or default).
json config_echo(CLI::App* sub) {
  json c = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, false);
    if (name == "--help" || name.empty()) continue;
    std::string key = opt->get_single_name();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (res.size() == 1) c[key] = res[0];
      else c[key] = res;
    } else {
      c[key] = opt->get_default_str();
    }
  }
  return c;
}

}  // namespace

std::string version() { return DCHAIN_VERSION; }

std::uint64_t default_seed() {
  if (const char* s = std::getenv("DCHAIN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (end && *end == '\0' && end != s) return v;
  }
  return 1;
}

std::vector<std::string> quantity_names() {
  std::vector<std::string> out;
  for (const auto& [n, fn] : quantities()) out.push_back(n);
  return out;
}

std::vector<std::string> signed_quantity_names() { return signed_names(); }

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Opts o;
  o.seed = default_seed();
  CLI::App app{"dchain: derangement Markov chains, generalized Feller couplings and their cycle statistics", "dchain"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", version());
  app.require_subcommand(1, 1);

  auto add_params = [&o](CLI::App* s) {
    s->add_option("--kind", o.kind, "chain kind: eta, eta_tilde, x, y, xi_tilde, signed, xinf");
    s->add_option("--theta", o.theta, "theta (constant families, eta/eta_tilde p, limits)");
    s->add_option("--theta2", o.theta2, "override theta_2");
    s->add_option("--family", o.family, "theta family: constant, eta_star, holst, from_p_conditional, from_p_pushforward");
    s->add_option("--p-family", o.p_family,
                  "p family: eta, eta_tilde, tabulated, from_theta_conditional, from_theta_pushforward");
    s->add_option("--p-values", o.p_values, "tabulated p_3,p_4,...")->delimiter(',');
    s->add_option("--holst", o.holst, "Holst parameters a,b,c")->delimiter(',');
    s->add_option("--kappa", o.kappa, "orientation probability of non-leaders");
    s->add_option("--n", o.n, "chain length");
  };
  auto add_output = [&o](CLI::App* s) {
    s->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_option("--digits", o.digits, "significant digits of floating output")->check(CLI::Range(1, 17));
  };
  auto add_accuracy = [&o](CLI::App* s) {
    s->add_option("--abs-tol", o.acc.abs_tol, "absolute tolerance");
    s->add_option("--rel-tol", o.acc.rel_tol, "relative tolerance");
    s->add_option("--max-terms", o.acc.max_terms, "series term limit");
    s->add_option("--quad-depth", o.acc.quad_max_depth, "quadrature subdivision depth");
  };
  auto add_indices = [&o](CLI::App* s) {
    s->add_option("--i", o.i, "index i");
    s->add_option("--j", o.j, "index / cycle length j");
    s->add_option("--k", o.k, "index k");
    s->add_option("--m", o.m, "series truncation order");
    s->add_option("--s", o.s, "pgf argument");
    s->add_option("--alpha", o.alpha, "alpha in n q_n -> alpha");
    s->add_option("--method", o.method, "series | integral, or recursion | gproduct | pproduct");
    s->add_option("--cycle-type", o.cycle_type, "c_1,c_2,...,c_n")->delimiter(',');
    s->add_option("--astar", o.astar, "a_1,a_2,... (ordered cycle / orientation prefix)")->delimiter(',');
  };
  auto add_run = [&o](CLI::App* s) {
    s->add_option("--seed", o.seed, "master seed (default: DCHAIN_SEED or 1)");
    s->add_option("--reps", o.reps, "replicates");
    s->add_option("--workers", o.workers, "worker threads (0 = hardware)");
  };

  CLI::App* sample = app.add_subcommand("sample", "sample chain words or signed permutations");
  add_params(sample);
  add_run(sample);
  add_output(sample);

  CLI::App* est = app.add_subcommand("estimate", "Monte Carlo estimate of a cycle statistic");
  add_params(est);
  add_run(est);
  add_indices(est);
  est->add_option("--statistic", o.statistic, "K, Cj, A1, A2, Cstar, Lambda, AstarPrefix");
  add_output(est);

  CLI::App* exact = app.add_subcommand("exact", "evaluate a named quantity");
  exact->add_option("--quantity", o.quantity, "quantity name")->required();
  add_params(exact);
  add_indices(exact);
  add_accuracy(exact);
  add_output(exact);

  // table and verify defaults differ from the shared ones; copied into o after parsing
  double table_theta = 0.5;
  std::string table_method = "series";
  std::size_t verify_n = 12;

  CLI::App* t1 = app.add_subcommand("table1", "limits of E C_j for eta, j = 2..7");
  t1->add_option("--theta", table_theta, "theta");
  t1->add_option("--m", o.m, "series truncation order");
  t1->add_option("--method", table_method, "series or integral");
  add_accuracy(t1);
  add_output(t1);

  CLI::App* t2 = app.add_subcommand("table2", "Var C_j(n) for eta, j = 3..7, n = 20, 50, 100");
  t2->add_option("--theta", table_theta, "theta");
  add_output(t2);

  CLI::App* ver = app.add_subcommand("verify", "run oracle verification suites");
  ver->add_option("--suite", o.suite, "suite name or all");
  ver->add_option("--n", verify_n, "largest n enumerated");
  ver->add_option("--trials", o.trials, "random draws per n");
  ver->add_option("--seed", o.seed, "seed for the random draws");
  ver->add_option("--workers", o.workers, "worker threads (0 = hardware)");
  add_output(ver);

  CLI::App* diag = app.add_subcommand("diagnose", "CLT and GEM diagnostics");
  diag->add_option("--which", o.which, "clt or gem");
  diag->add_option("--centering", o.centering, "clt centering: qbar or thetalogn");
  diag->add_option("--level", o.level, "p-value acceptance level");
  add_params(diag);
  add_run(diag);
  add_output(diag);

  CLI::App* sg = app.add_subcommand("signed", "signed-permutation quantities");
  sg->add_option("--quantity", o.quantity, "quantity name")->required();
  sg->add_option("--statistic", o.statistic, "statistic for --quantity estimate");
  sg->add_option("--ell", o.ell, "count ell for cki_distribution");
  add_params(sg);
  add_indices(sg);
  add_run(sg);
  add_output(sg);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  if (name == "table1" || name == "table2") {
    o.theta = table_theta;
    o.method = table_method;
  }
  if (name == "verify") o.n = verify_n;
  try {
    o.acc.validate();
    Report rep;
    if (name == "sample") rep = cmd_sample(o);
    else if (name == "estimate") rep = cmd_estimate(o);
    else if (name == "exact") rep = cmd_exact(o);
    else if (name == "table1") rep = cmd_table1(o);
    else if (name == "table2") rep = cmd_table2(o);
    else if (name == "verify") rep = cmd_verify(o);
    else if (name == "diagnose") rep = cmd_diagnose(o);
    else rep = cmd_signed(o);
    emit(out, o.format, name, config_echo(sub), rep, o.digits);
    return rep.ok ? kExitOk : kExitFail;
  } catch (const UnknownName& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GuardError& e) {
    err << "guard: " << e.what() << "\n";
    return kExitGuard;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int a = 1; a < argc; ++a) args.emplace_back(argv[a]);
  return run_command(args, out, err);
}

}  // namespace dchain::cli
