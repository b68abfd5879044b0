#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "moranfrac/cli.hpp"
#include "moranfrac/errors.hpp"

using namespace moranfrac;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "moranfrac");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("moranfrac_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("config parsing") {
  const MoranConfig c = cli::parse_config(
      R"({"m": 2, "model": {"kind": "constant", "p": [0.2, 0.8], "r": [0.3, 0.3]}, "depth": 5, "layout": "left_flush"})");
  CHECK(c.depth == 5);
  CHECK(c.layout == GapLayout::left_flush);
  CHECK(c.model.p_left()[1] == 0.8);
  CHECK(cli::parse_config(cli::config_to_json(c)).depth == 5);
  CHECK(cli::config_to_json(cli::parse_config(cli::config_to_json(c))) == cli::config_to_json(c));

  CHECK_THROWS_AS(cli::parse_config("{"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"depth": "deep"})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"m": 3})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"model": {"kind": "constant", "p": [0.5, 0.5], "r": [0.3]}})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"model": {"kind": "cubic"}})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"layout": "centred"})"), ConfigError);
  CHECK_THROWS_AS(cli::parse_config(R"({"depth": 40})"), ResourceError);
}

TEST_CASE("exit codes") {
  const auto infeasible =
      temp_file("infeasible.json", R"({"model": {"kind": "constant", "p": [0.5, 0.5], "r": [0.6, 0.6]}})");
  CHECK(invoke({"construct", "--config", infeasible}).code == cli::kExitConfigError);
  const auto deep = temp_file("deep.json", R"({"depth": 40})");
  CHECK(invoke({"construct", "--config", deep}).code == cli::kExitResourceBudget);
  CHECK(invoke({"construct", "--no-such-flag"}).code == cli::kExitConfigError);
  CHECK(invoke({}).code == cli::kExitConfigError);
  CHECK(invoke({"verify", "--suite", "nonsense"}).code == cli::kExitConfigError);
  CHECK(invoke({"spectrum", "--depth", "8", "--window-last", "30"}).code == cli::kExitConfigError);
  CHECK(invoke({"construct", "--help"}).code == cli::kExitOk);
}

TEST_CASE("verification suites") {
  const Result ok = invoke({"verify", "--suite", "counterexample"});
  CHECK(ok.code == cli::kExitOk);
  const json report = json::parse(ok.out);
  CHECK(report["pass"] == true);
  CHECK(report["checks"].size() == 3);
  for (const std::string& name : cli::suite_names()) {
    CAPTURE(name);
    CHECK_FALSE(cli::run_suite(name, 1).checks.empty());
  }
}

TEST_CASE("CSV outputs and manifests") {
  const Result spectrum = invoke({"spectrum", "--depth", "10", "--q", "0", "--q", "2"});
  REQUIRE(spectrum.code == 0);
  CHECK(first_line(spectrum.out) == "q,n,delta,log_S,tau_scale,tau_slope,tau_stderr,tau_theory");
  const json manifest = json::parse(spectrum.err);
  CHECK(manifest["command"] == "spectrum");
  CHECK(manifest["config"]["depth"] == 10);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);

  const Result again = invoke({"spectrum", "--depth", "10", "--q", "0", "--q", "2"});
  CHECK(again.out == spectrum.out);
  CHECK(again.err == spectrum.err);

  const auto out = (std::filesystem::temp_directory_path() / "moranfrac_test_cells.csv").string();
  REQUIRE(invoke({"construct", "--depth", "3", "--out", out}).code == 0);
  std::ifstream cells(out);
  std::string header;
  std::getline(cells, header);
  CHECK(header == "word,a,b,diam,log_mass");
  int rows = 0;
  for (std::string line; std::getline(cells, line);) ++rows;
  CHECK(rows == 8);
  CHECK(std::filesystem::exists(out + ".manifest.json"));

  CHECK(first_line(invoke({"local-spectrum", "--depth", "12", "--x", "0.2", "--q", "2"}).out) ==
        "radius,q,n,delta,log_S,tau_scale,tau_slope,tau_stderr,tau_theory");
  CHECK(first_line(invoke({"entropy", "--depth", "10"}).out) == "n,delta,numerator,denominator,ratio");
  CHECK(first_line(invoke({"legendre"}).out) == "q,tau,alpha,f");
  const auto skew = temp_file("skew.json", R"({"model": {"kind": "constant", "p": [0.2, 0.8], "r": [0.3, 0.3]}})");
  CHECK(first_line(invoke({"legendre", "--config", skew, "--curve", "legendre"}).out) == "alpha,q_star,f");
  CHECK(first_line(invoke({"coarse", "--config", skew, "--depth", "10", "--n", "12"}).out) ==
        "alpha,count,f_emp,f_theory,deviation");
  const Result nu = invoke({"nu-sample", "--config", skew, "--samples", "5", "--depth", "12", "--alpha-q", "2"});
  CHECK(nu.code == 0);
  CHECK(first_line(nu.out) == "sample_id,point,dim_mu,dim_nu");
}
