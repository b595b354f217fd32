#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "dchain/cli.hpp"
#include "json.hpp"

using dchain::cli::run_command;

namespace {
struct Run {
  int code;
  std::string out, err;
};
Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}
std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);)
    if (!l.empty()) v.push_back(l);
  return v;
}
}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors and guards") {
  CHECK(run({"exact", "--quantity", "no_such_thing"}).code == dchain::cli::kExitUsage);
  CHECK(run({"bogus"}).code == dchain::cli::kExitUsage);
  CHECK(run({"exact", "--quantity", "enumerate_delta", "--n", "40"}).code == dchain::cli::kExitGuard);
  CHECK(run({"exact", "--quantity", "mean_k", "--theta", "-1", "--n", "5"}).code == dchain::cli::kExitUsage);
  CHECK_FALSE(run({"--version"}).out.empty());
}

TEST_CASE("exact quantities") {
  const Run r = run({"exact", "--quantity", "mean_cj_eta_limit", "--theta", "0.5", "--j", "2", "--method", "series",
                     "--m", "2", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["subcommand"] == "exact");
  CHECK(j["results"]["value"].get<double>() == doctest::Approx(0.255318).epsilon(1e-5));
  const Run k = run({"exact", "--quantity", "mean_k", "--theta", "1", "--n", "4", "--format", "json"});
  REQUIRE(k.code == 0);
  CHECK(nlohmann::json::parse(k.out)["results"]["value"].get<double>() == doctest::Approx(4.0 / 3));
  for (const auto& q : dchain::cli::quantity_names()) CHECK_FALSE(q.empty());
}

TEST_CASE("table1 csv") {
  const Run r = run({"table1", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 8);
  CHECK(ls[0].rfind("# dchain", 0) == 0);
  CHECK(ls[1] == "j,limit,error_bound,theta_over_j");
  CHECK(ls[2].rfind("2,0.25531", 0) == 0);
}

TEST_CASE("verify and table2") {
  CHECK(run({"verify", "--suite", "conditional", "--n", "10", "--trials", "10", "--seed", "7"}).code == 0);
  CHECK(run({"verify", "--suite", "nonsense"}).code == dchain::cli::kExitUsage);
  const Run t = run({"table2", "--format", "json"});
  CHECK(t.code == 0);
  CHECK(nlohmann::json::parse(t.out)["results"]["max_display_dp_gap"].get<double>() < 1e-10);
}

TEST_CASE("sampling is reproducible and round-trips through json") {
  const std::vector<std::string> args = {"sample", "--kind", "eta", "--theta", "1", "--n", "12",
                                         "--reps", "5",   "--seed", "9",   "--format", "json"};
  const Run a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["config"]["seed"].dump() == "\"9\"");
  CHECK(nlohmann::json::parse(j.dump()) == j);
  CHECK(j["status"] == "pass");
}

TEST_CASE("signed subcommand") {
  const Run r = run({"signed", "--quantity", "omega", "--k", "3", "--i", "2", "--kappa", "0.5", "--format", "json"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["results"]["value"].get<double>() == doctest::Approx(0.5));
}

}
