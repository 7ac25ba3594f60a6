#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "folsing/cli/app.hpp"
#include "folsing/cli/inputs.hpp"
#include "folsing/errors.hpp"
#include "folsing/flow.hpp"
#include "folsing/folchart.hpp"
#include "json.hpp"

using namespace folsing;
using nlohmann::json;

namespace {

std::string data(const std::string& name) { return std::string(FOLSING_TEST_DATA_DIR) + "/" + name; }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t bits(double x) {
  std::uint64_t b;
  std::memcpy(&b, &x, sizeof b);
  return b;
}

}  // namespace

TEST(Cli, JetSymbolCubic) {
  const auto r = run({"jet", "symbol", data("cubic_germ.json")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("(1,1,0)"), std::string::npos) << r.out;
  const auto j = json::parse(run({"jet", "symbol", data("cusp_function_germ.json"), "--format", "json"}).out);
  EXPECT_EQ(j["symbol"], "(2,1,0)");
  EXPECT_EQ(j["exit_code"], 0);
}

TEST(Cli, JetSymbolForMapsAndFoliatedGerms) {
  const auto m = json::parse(run({"--format", "json", "jet", "symbol", data("cusp_map_germ.json")}).out);
  EXPECT_EQ(m["symbol"], "(1,1,0)");
  const auto r = run({"jet", "symbol", data("foliated_fold_germ.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto f = json::parse(r.out);
  EXPECT_EQ(f["symbol"], "(1,1,0)");
  EXPECT_TRUE(f.contains("foliated"));
}

TEST(Cli, JetCodim) {
  const auto j = json::parse(run({"jet", "codim", data("cubic_germ.json"), "--format", "json"}).out);
  EXPECT_EQ(j["jacobian_codim"], 1);
  EXPECT_EQ(j["determinacy_bound"], 3);
  const auto n = json::parse(run({"jet", "codim", data("nonisolated_germ.json"), "--format", "json"}).out);
  EXPECT_EQ(n["jacobian_codim"], "infinite-at-order-10");
  EXPECT_TRUE(n["determinacy_bound"].is_null());
  EXPECT_FALSE(n["isolated_certified"].get<bool>());
}

TEST(Cli, JetZk) {
  const auto a = json::parse(run({"jet", "zk", data("cubic_germ.json"), "--k", "2", "--format", "json"}).out);
  EXPECT_TRUE(a["member"].get<bool>());
  EXPECT_TRUE(a["agree"].get<bool>());
  const auto b = json::parse(run({"jet", "zk", data("cubic_germ.json"), "--k", "3", "--format", "json"}).out);
  EXPECT_FALSE(b["member"].get<bool>());
}

TEST(Cli, JetStrataTable) {
  const auto r = run({"jet", "strata", "--n", "2", "--p", "1", "--k", "3", "--max-codim", "3", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  bool two = false;
  bool cusp = false;
  for (const auto& s : j["strata"]) {
    if (s["symbol"] == "(2)" && s["codim"] == 2) two = true;
    if (s["symbol"] == "(2,1,0)" && s["codim"] == 3) cusp = true;
  }
  EXPECT_TRUE(two);
  EXPECT_TRUE(cusp);
  const auto csv = run({"jet", "strata", "--n", "2", "--p", "1", "--k", "3", "--max-codim", "3", "--format", "csv"});
  EXPECT_NE(csv.out.find("\"(2,1,0)\",3"), std::string::npos) << csv.out;
}

TEST(Cli, OpennessVerdictsAndExitCodes) {
  const auto fail = run({"fol", "openness", data("flipped_square_chart.json"), "--format", "json"});
  EXPECT_EQ(fail.code, 1);
  const auto j = json::parse(fail.out);
  EXPECT_EQ(j["verdict"], "FAIL");
  ASSERT_FALSE(j["witnesses"].empty());
  EXPECT_EQ(j["witnesses"][0]["location"][0], 0.0);
  const auto pass = run({"fol", "openness", data("square_sum_chart.json"), "--format", "json"});
  EXPECT_EQ(pass.code, 0);
  EXPECT_EQ(json::parse(pass.out)["properness"], "declared by user");
}

TEST(Cli, ClassifyFold) {
  const auto r = run({"fol", "classify", data("fold_chart.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  bool fold = false;
  for (const auto& rec : j["records"]) {
    if (rec["stratum_label"] == "Sigma_0^(1,1,0)") fold = true;
  }
  EXPECT_TRUE(fold);
}

TEST(Cli, FlowCsvAndSkeleton) {
  const auto r = run({"fol", "flow", data("square_sum_chart.json"), "--start", "0.5,0.5", "--direction", "backward",
                      "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("t,x1,v1,f\r\n", 0), 0U) << r.out.substr(0, 40);
  const auto bad = run({"fol", "flow", data("square_sum_chart.json"), "--start", "0.5"});
  EXPECT_EQ(bad.code, 2);
  const auto s = run({"fol", "skeleton", data("saddle_chart.json"), "--slice", "-0.5,0.5", "--format", "json"});
  ASSERT_EQ(s.code, 0) << s.err;
  for (const auto& p : json::parse(s.out)["points"]) EXPECT_LE(std::abs(p["start"][0].get<double>()), 1e-6);
}

TEST(Cli, ChecksBundle) {
  const auto ok = run({"fol", "checks", data("bowl_model_chart.json"), "--slice", "0.25,1", "--d", "1", "--format", "json"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_EQ(json::parse(ok.out)["verdict"], "PASS");
  // The cusp model confines, but its backward flow leaves the box through x2 = -1.
  const auto cusp = json::parse(
      run({"fol", "checks", data("model_chart.json"), "--slice", "-0.5,0.5", "--d", "1", "--format", "json"}).out);
  EXPECT_EQ(cusp["confinement"]["result"], "PASS");
  EXPECT_EQ(cusp["rossini"]["result"], "PASS");
  EXPECT_GT(cusp["alto"]["unresolved"].get<int>(), 0);
  const auto bad =
      run({"fol", "checks", data("skewed_model_chart.json"), "--slice", "-0.5,0.5", "--d", "1", "--format", "json"});
  EXPECT_EQ(bad.code, 1);
  const auto j = json::parse(bad.out);
  EXPECT_EQ(j["verdict"], "FAIL");
}

TEST(Cli, MalformedInputsReportPositions) {
  const auto syntax = run({"fol", "classify", data("malformed_syntax.json")});
  EXPECT_EQ(syntax.code, 2);
  EXPECT_NE(syntax.err.find("line 5"), std::string::npos) << syntax.err;
  const auto expr = run({"fol", "classify", data("malformed_expression.json")});
  EXPECT_EQ(expr.code, 2);
  EXPECT_NE(expr.err.find("line 1, column 8"), std::string::npos) << expr.err;
  const auto unknown = run({"jet", "symbol", data("unknown_field.json")});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("exponent"), std::string::npos) << unknown.err;
  EXPECT_EQ(run({"jet", "symbol", data("does_not_exist.json")}).code, 2);
  EXPECT_EQ(run({"jet", "frobnicate"}).code, 2);
  EXPECT_EQ(run({"jet", "zk", data("cubic_germ.json"), "--k", "1"}).code, 2);
}

TEST(Cli, InputParserStrictness) {
  EXPECT_THROW(cli::parse_chart_input(R"({"n": 1, "box": [[-1, 1]], "expression": "x1", "colour": 1})"), InputError);
  EXPECT_THROW(cli::parse_chart_input(R"({"n": 1, "box": [[-1, 1]]})"), InputError);
  EXPECT_THROW(cli::parse_germ_input(R"({"n": 1, "p": 1, "order": 2, "components": [[{"exponents": [1, 1], "coefficient": 1}]]})"),
               InputError);
  EXPECT_THROW(cli::parse_germ_input(R"({"n": 1, "p": 1, "order": 2, "components": [[{"exponents": [2], "coefficient": "x"}]]})"),
               InputError);
  const auto g = cli::parse_germ_input(R"({"n": 1, "p": 1, "order": 2, "components": [[{"exponents": [2], "coefficient": "-3/4"}]]})");
  EXPECT_EQ(g.components[0].coefficient(Monomial({2})), make_rational(-3, 4));
  try {
    (void)cli::parse_germ_input("{\n  \"n\": 1,\n  \"p\": ,\n}");
    ADD_FAILURE();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Cli, JsonReportRoundTripsBitExactly) {
  const auto r = run({"fol", "classify", data("model_chart.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  const auto in = cli::parse_chart_input(slurp(data("model_chart.json")));
  const FoliatedFunction f(in.expr, in.chart.leaf_dim, in.chart.transverse_dim);
  const auto search = find_critical_points(f, in.chart, in.metric, in.search);
  ASSERT_EQ(j["records"].size(), search.records.size());
  for (std::size_t k = 0; k < search.records.size(); ++k) {
    const auto& rec = search.records[k];
    const auto& jr = j["records"][k];
    for (std::size_t i = 0; i < rec.location.size(); ++i) {
      EXPECT_EQ(bits(jr["location"][i].get<double>()), bits(rec.location[i]));
    }
    for (std::size_t i = 0; i < rec.eigenvalues.size(); ++i) {
      EXPECT_EQ(bits(jr["eigenvalues"][i].get<double>()), bits(rec.eigenvalues[i]));
    }
    if (rec.exact_location) {
      for (std::size_t i = 0; i < rec.exact_location->size(); ++i) {
        EXPECT_EQ(parse_rational(jr["exact_location"][i].get<std::string>()), (*rec.exact_location)[i]);
      }
    }
  }
  // Flow samples too.
  const auto fl = json::parse(run({"fol", "flow", data("model_chart.json"), "--start", "0.3,0.2,0.1", "--format", "json"}).out);
  const std::vector<double> start{0.3, 0.2, 0.1};
  const auto tr = integrate(f, in.metric, in.chart, start, Direction::Forward, in.budget);
  ASSERT_EQ(fl["samples"].size(), tr.samples.size());
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    EXPECT_EQ(bits(fl["samples"][k]["t"].get<double>()), bits(tr.samples[k].t));
    EXPECT_EQ(bits(fl["samples"][k]["f"].get<double>()), bits(tr.samples[k].value));
  }
}

TEST(Cli, OutputIsDeterministic) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"fol", "classify", data("fold_chart.json"), "--format", "json"},
           {"fol", "checks", data("model_chart.json"), "--slice", "-0.5,0.5", "--format", "json"},
           {"jet", "codim", data("cusp_function_germ.json"), "--format", "json"},
       }) {
    EXPECT_EQ(run(args).out, run(args).out);
  }
}

TEST(Cli, OutFlagWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "folsing_cli_out_test.json";
  const auto r = run({"jet", "codim", data("cubic_germ.json"), "--format", "json", "--out", path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(path.string()))["jacobian_codim"], 1);
  std::filesystem::remove(path);
}
