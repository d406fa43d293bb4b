#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sfcapm/calibration.hpp"
#include "sfcapm/cli.hpp"
#include "sfcapm/csv.hpp"
#include "sfcapm/errors.hpp"
#include "sfcapm/moments.hpp"
#include "sfcapm/pricing.hpp"
#include "sfcapm/report.hpp"
#include "sfcapm/risk.hpp"

using namespace sfcapm;
using doctest::Contains;

namespace {

// Scratch file removed at scope exit; names are unique per test site.
struct TempFile {
  std::filesystem::path path;
  TempFile(const std::string& name, const std::string& bytes)
      : path(std::filesystem::temp_directory_path() / name) {
    std::ofstream file(path, std::ios::binary);
    file << bytes;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun result;
  result.code = run_cli(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string digest_of(const std::vector<std::string>& args,
                      const std::string& file_bytes) {
  Fnv1a hash;
  for (const std::string& arg : args) {
    hash.update(arg);
    hash.update(std::string_view("\0", 1));
  }
  hash.update(file_bytes);
  return hex64(hash.value());
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("delimited text parses into an annual series") {
  SUBCASE("comma table with year and dividends") {
    const AnnualSeries series = parse_series(
        "year,consumption,dividends\n"
        "1889,100,10\n"
        "1890,103,10.5\n"
        "1891,105,10.8\n");
    REQUIRE(series.consumption.size() == 3);
    CHECK(series.consumption[0] == 100.0);
    CHECK(series.consumption[2] == 105.0);
    CHECK(series.periods == std::vector<long long>{1889, 1890, 1891});
    REQUIRE(series.dividends.has_value());
    CHECK((*series.dividends)[1] == 10.5);
    CHECK(!series.equity_return.has_value());
    CHECK(!series.risk_free_return.has_value());
  }
  SUBCASE("rows without a year column are labelled from zero") {
    const AnnualSeries series = parse_series("consumption\n100\n102");
    CHECK(series.periods == std::vector<long long>{0, 1});
  }
  SUBCASE("tab delimiter is auto-detected from the header") {
    const AnnualSeries series =
        parse_series("year\tconsumption\n1889\t100\n1890\t102\n");
    CHECK(series.consumption == std::vector<double>{100.0, 102.0});
  }
  SUBCASE("explicit delimiter overrides detection") {
    const std::string text = "consumption;dividends\n100;10\n102;10.2\n";
    CHECK_THROWS_AS(parse_series(text), data_error);
    CsvOptions options;
    options.delimiter = ';';
    const AnnualSeries series = parse_series(text, options);
    CHECK(series.consumption.size() == 2);
    REQUIRE(series.dividends.has_value());
    CHECK((*series.dividends)[1] == 10.2);
  }
  SUBCASE("carriage returns and padding are trimmed") {
    const AnnualSeries series = parse_series(
        " consumption , year \r\n 100 , 1889 \r\n 102 , 1890 \r\n");
    CHECK(series.consumption == std::vector<double>{100.0, 102.0});
    CHECK(series.periods == std::vector<long long>{1889, 1890});
  }
  SUBCASE("unknown columns are ignored") {
    const AnnualSeries series =
        parse_series("consumption,population\n100,5\n102,6\n");
    CHECK(series.consumption.size() == 2);
    CHECK(!series.dividends.has_value());
  }
}

TEST_CASE("malformed tables are rejected with row diagnostics") {
  CHECK_THROWS_WITH_AS(parse_series(""),
                       Contains("empty input, expected a header row"),
                       data_error);
  CHECK_THROWS_WITH_AS(parse_series("   \n  \n"),
                       Contains("empty input, expected a header row"),
                       data_error);
  CHECK_THROWS_WITH_AS(parse_series("consumption,consumption\n100,100\n"),
                       Contains("duplicate column consumption"), data_error);
  CHECK_THROWS_WITH_AS(parse_series("year,dividends\n1889,10\n1890,10\n"),
                       Contains("missing required column consumption"),
                       data_error);
  CHECK_THROWS_WITH_AS(parse_series("consumption\n100\n\n102\n"),
                       Contains("blank line at row 2"), data_error);
  CHECK_THROWS_WITH_AS(parse_series("year,consumption\n1889\n"),
                       Contains("row 1 has 1 fields, expected 2"), data_error);
  CHECK_THROWS_WITH_AS(parse_series("consumption\nabc\n102\n"),
                       Contains("unparsable consumption value 'abc' at row 1"),
                       data_error);
  CHECK_THROWS_WITH_AS(parse_series("year,consumption\n18x9,100\n1890,102\n"),
                       Contains("unparsable year value '18x9' at row 1"),
                       data_error);
  CHECK_THROWS_WITH_AS(
      parse_series("consumption\n-5\n102\n"),
      Contains("consumption value '-5' at row 1 must be positive"),
      data_error);
  CHECK_THROWS_WITH_AS(
      parse_series("consumption\n0\n102\n"),
      Contains("consumption value '0' at row 1 must be positive"), data_error);
  CHECK_THROWS_WITH_AS(
      parse_series("consumption,equity_return\n100,1.07\n102,-1\n"),
      Contains("equity_return value '-1' at row 2 must be positive"),
      data_error);
  CHECK_THROWS_WITH_AS(parse_series("consumption\n100\n"),
                       Contains("need at least two data rows, found 1"),
                       data_error);
  CHECK_THROWS_WITH_AS(
      parse_series("year,consumption\n1890,100\n1889,102\n"),
      Contains("year values must be strictly increasing at row 2"),
      data_error);
  CHECK_THROWS_WITH_AS(load_series("/no/such/file.csv"),
                       Contains("cannot open '/no/such/file.csv'"), data_error);
}

TEST_CASE("bundled annual series reproduces the builtin summary") {
  const std::filesystem::path path =
      std::filesystem::path(SFCAPM_DATA_DIR) / "us_economy_annual.csv";
  const AnnualSeries series = load_series(path);
  REQUIRE(series.consumption.size() == 3);
  CHECK(series.periods.front() == 1889);
  REQUIRE(series.equity_return.has_value());
  REQUIRE(series.risk_free_return.has_value());

  const EconomySummary summary = summarize(series);
  CHECK(std::abs(summary.mean_growth - 1.018) <= 1e-12);
  CHECK(std::abs(summary.sd_growth - 0.036) <= 1e-9);
  CHECK(std::abs(summary.mean_equity_return - 1.0698) <= 1e-15);
  CHECK(std::abs(summary.risk_free_rate - 1.008) <= 1e-15);
  CHECK(std::abs(summary.mean_premium - 0.0618) <= 1e-12);

  // Same mean, sqrt(2) larger deviation under the sample divisor.
  const EconomySummary sample = summarize(series, VarianceDivisor::sample);
  CHECK(std::abs(sample.sd_growth - 0.036 * std::sqrt(2.0)) <= 1e-9);
}

TEST_CASE("incremental hash matches known digests") {
  CHECK(hex64(Fnv1a().value()) == "cbf29ce484222325");
  CHECK(hex64(Fnv1a().update("abc").value()) == "e71fa2190541574b");

  Fnv1a split;
  split.update("ab");
  split.update("");
  split.update("c");
  CHECK(split.value() == Fnv1a().update("abc").value());

  // NUL bytes participate in the digest.
  CHECK(Fnv1a().update(std::string_view("\0", 1)).value() != Fnv1a().value());

  CHECK(hex64(0) == "0000000000000000");
  CHECK(hex64(0x1a) == "000000000000001a");
  CHECK(hex64(0xffffffffffffffffull) == "ffffffffffffffff");
}

TEST_CASE("fixed six decimal rendering") {
  CHECK(format_fixed6(0.96174536913133912) == "0.961745");
  CHECK(format_fixed6(0.96174588819626494) == "0.961746");
  CHECK(format_fixed6(1.0698009879878392) == "1.069801");
  CHECK(format_fixed6(1.008000471995723) == "1.008000");
  CHECK(format_fixed6(0.0) == "0.000000");
  CHECK(format_fixed6(-0.01005) == "-0.010050");
  CHECK(format_fixed6(2.5e-7) == "0.000000");
}

TEST_CASE("json dump is canonical and round-trips doubles") {
  ordered_json j;
  j["b"] = 0.1;
  j["a"] = 7;
  j["flag"] = true;
  j["name"] = "a\"b\n";
  j["none"] = nullptr;
  j["arr"] = ordered_json::array({1.5, 2});
  CHECK(dump_json(j) ==
        "{\"b\":0.10000000000000001,\"a\":7,\"flag\":true,"
        "\"name\":\"a\\\"b\\n\",\"none\":null,\"arr\":[1.5,2]}");

  // Whole doubles print without a fraction; nonfinite values become null.
  CHECK(dump_json(ordered_json(1.0)) == "1");
  CHECK(dump_json(ordered_json(std::nan(""))) == "null");
  CHECK(dump_json(ordered_json(HUGE_VAL)) == "null");

  // 17 significant digits reproduce every finite double bit for bit.
  for (double value : {0.1, 1.0 / 3.0, 0.017215021714207007, 6.02e23, 5e-324,
                       -0.0012497928282480212}) {
    ordered_json obj;
    obj["x"] = value;
    const ordered_json parsed = ordered_json::parse(dump_json(obj));
    CHECK(parsed.at("x").get<double>() == value);
  }
}

TEST_CASE("report envelope round-trips") {
  ReportDocument doc;
  doc.tool = "sfcapm";
  doc.version = "0.1.0";
  doc.command = "sfcapm price --table1";
  doc.input_digest = "cbf29ce484222325";
  doc.payload_kind = "pricing";
  ordered_json payload;
  payload["value"] = 0.96174588819626494;
  payload["count"] = 3;
  payload["list"] = ordered_json::array({0.1, -3.75});
  doc.payload = payload;

  const std::string text = doc.serialize();
  CHECK(text.back() == '\n');
  CHECK(text.find("\"timestamp\"") == std::string::npos);
  CHECK(text.find("\"payload_kind\":\"pricing\"") != std::string::npos);

  const ReportDocument parsed = ReportDocument::parse(text);
  CHECK(parsed == doc);
  CHECK(parsed.serialize() == text);

  doc.timestamp = "2026-01-02T03:04:05Z";
  const std::string stamped = doc.serialize();
  CHECK(stamped.find("\"timestamp\":\"2026-01-02T03:04:05Z\"") !=
        std::string::npos);
  CHECK(ReportDocument::parse(stamped) == doc);
}

TEST_CASE("malformed reports are rejected") {
  CHECK_THROWS_WITH_AS(ReportDocument::parse("not json"),
                       Contains("report parse failure: "), data_error);
  CHECK_THROWS_WITH_AS(ReportDocument::parse("{}"),
                       Contains("report schema violation: "), data_error);
  CHECK_THROWS_WITH_AS(ReportDocument::parse("[]"),
                       Contains("report schema violation: "), data_error);
  CHECK_THROWS_WITH_AS(ReportDocument::parse("{\"tool\":1}"),
                       Contains("report schema violation: "), data_error);
}

TEST_CASE("timestamps are utc shaped") {
  const std::string stamp = utc_timestamp();
  REQUIRE(stamp.size() == 20);
  CHECK(stamp[4] == '-');
  CHECK(stamp[7] == '-');
  CHECK(stamp[10] == 'T');
  CHECK(stamp[13] == ':');
  CHECK(stamp[16] == ':');
  CHECK(stamp.back() == 'Z');
  CHECK(stamp.substr(0, 2) == "20");
}

TEST_CASE("cli help and version") {
  const CliRun version = invoke({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find("0.1.0") != std::string::npos);

  const CliRun bare = invoke({});
  CHECK(bare.code == 0);
  CHECK(bare.out.find("moments") != std::string::npos);
  CHECK(bare.out.find("calibrate") != std::string::npos);
  CHECK(bare.out.find("simulate") != std::string::npos);

  const CliRun help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("price") != std::string::npos);
}

TEST_CASE("moments subcommand reports estimates and digests") {
  const std::string csv =
      "year,consumption,dividends\n"
      "1889,100,10\n"
      "1890,103,10.5\n"
      "1891,105,10.8\n";
  TempFile file("sfcapm_io_moments.csv", csv);
  const std::vector<std::string> args = {"moments", "--input", file.str(),
                                         "--no-timestamp"};
  const CliRun result = invoke(args);
  REQUIRE(result.code == 0);
  REQUIRE(result.err.empty());

  const ReportDocument doc = ReportDocument::parse(result.out);
  CHECK(doc.tool == "sfcapm");
  CHECK(doc.version == "0.1.0");
  CHECK(doc.payload_kind == "moments");
  CHECK(!doc.timestamp.has_value());
  CHECK(doc.command == "sfcapm moments --input " + file.str() +
                           " --no-timestamp");
  CHECK(doc.input_digest == digest_of(args, csv));

  CHECK(doc.payload.at("observations").get<int>() == 3);
  CHECK(doc.payload.at("divisor").get<std::string>() == "n");
  const GrowthMoments expected = estimate_moments(parse_series(csv));
  CHECK(doc.payload.at("growth_moments").at("mu_x").get<double>() ==
        expected.mu_x);
  CHECK(doc.payload.at("growth_moments").at("var_x").get<double>() ==
        expected.var_x);
  CHECK(doc.payload.at("growth_moments").at("cov_xz").get<double>() ==
        expected.cov_xz);
  CHECK(!doc.payload.contains("economy_summary"));
  CHECK(doc.payload.at("display").at("mu_x").get<std::string>() ==
        format_fixed6(expected.mu_x));

  SUBCASE("sample divisor changes the reported variance") {
    const CliRun sample = invoke({"moments", "--input", file.str(),
                                  "--divisor", "n-1", "--no-timestamp"});
    REQUIRE(sample.code == 0);
    const ReportDocument sdoc = ReportDocument::parse(sample.out);
    CHECK(sdoc.payload.at("divisor").get<std::string>() == "n-1");
    const GrowthMoments unbiased =
        estimate_moments(parse_series(csv), VarianceDivisor::sample);
    CHECK(sdoc.payload.at("growth_moments").at("var_x").get<double>() ==
          unbiased.var_x);
  }
  SUBCASE("return columns add an economy summary") {
    const std::filesystem::path path =
        std::filesystem::path(SFCAPM_DATA_DIR) / "us_economy_annual.csv";
    const CliRun summary =
        invoke({"moments", "--input", path.string(), "--no-timestamp"});
    REQUIRE(summary.code == 0);
    const ReportDocument sdoc = ReportDocument::parse(summary.out);
    REQUIRE(sdoc.payload.contains("economy_summary"));
    CHECK(sdoc.payload.at("economy_summary").at("mean_growth").get<double>() ==
          summarize(load_series(path)).mean_growth);
  }
  SUBCASE("semicolon input needs the delimiter flag") {
    TempFile other("sfcapm_io_semicolon.csv",
                   "consumption;dividends\n100;10\n102;10.2\n");
    const CliRun bad = invoke({"moments", "--input", other.str()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("data error: missing required column consumption") !=
          std::string::npos);
    const CliRun good = invoke({"moments", "--input", other.str(),
                                "--delimiter", ";", "--no-timestamp"});
    CHECK(good.code == 0);
  }
}

TEST_CASE("calibrate subcommand pinned and least squares") {
  const std::vector<std::string> args = {"calibrate", "--table1", "--rho",
                                         "1.033526", "--no-timestamp"};
  const CliRun pinned = invoke(args);
  REQUIRE(pinned.code == 0);
  REQUIRE(pinned.err.empty());

  const ReportDocument doc = ReportDocument::parse(pinned.out);
  CHECK(doc.payload_kind == "calibration");
  CHECK(doc.payload.at("target_view").get<std::string>() == "paper-rounded");
  CHECK(doc.payload.at("mode").get<std::string>() == "pinned");
  CHECK(doc.payload.at("targets").at("t1").get<double>() == 0.039582);
  CHECK(doc.payload.at("targets").at("t2").get<double>() == -0.002082);
  CHECK(doc.payload.at("targets").at("t3").get<double>() == 0.059504);

  const CalibrationTargets rounded =
      build_targets(us_economy_1889_1978(), 0.99).rounded();
  const PinnedSolution solution = solve_pinned(1.033526, rounded);
  CHECK(doc.payload.at("point").at("zeta").get<double>() == solution.zeta);
  CHECK(doc.payload.at("point").at("xi").get<double>() == solution.xi);
  CHECK(doc.payload.at("point").at("rho").get<double>() == 1.033526);
  CHECK(doc.payload.at("display").at("zeta").get<std::string>() == "0.961745");
  CHECK(doc.payload.at("display").at("xi").get<std::string>() == "1.019392");
  CHECK(doc.payload.at("certificate").at("jacobian_rank").get<int>() == 2);
  CHECK(doc.payload.at("certificate").at("consistent").get<bool>());
  CHECK(doc.payload.at("family").at("text").get<std::string>().find(
            "ln_zeta(rho)") == 0);

  // Identical invocations serialize to identical bytes.
  CHECK(invoke(args).out == pinned.out);

  SUBCASE("full precision targets survive the table flag") {
    const CliRun full = invoke({"calibrate", "--table1", "--rho", "1.033526",
                                "--full-precision", "--no-timestamp"});
    REQUIRE(full.code == 0);
    const ReportDocument fdoc = ReportDocument::parse(full.out);
    CHECK(fdoc.payload.at("target_view").get<std::string>() ==
          "full-precision");
    CHECK(fdoc.payload.at("display").at("zeta").get<std::string>() ==
          "0.961746");
  }
  SUBCASE("explicit summary values replace the builtin table") {
    const CliRun explicit_run = invoke(
        {"calibrate", "--mean-equity", "1.0698", "--risk-free", "1.008",
         "--mean-growth", "1.018", "--sd-growth", "0.036", "--rho", "1.033526",
         "--no-timestamp"});
    REQUIRE(explicit_run.code == 0);
    const ReportDocument edoc = ReportDocument::parse(explicit_run.out);
    CHECK(edoc.payload.at("target_view").get<std::string>() ==
          "full-precision");
    const CalibrationTargets full_targets =
        build_targets(EconomySummary(1.0698, 1.008, 1.018, 0.036), 0.99);
    CHECK(edoc.payload.at("point").at("zeta").get<double>() ==
          solve_pinned(1.033526, full_targets).zeta);
    CHECK(edoc.payload.at("display").at("zeta").get<std::string>() ==
          "0.961746");
  }
  SUBCASE("least squares mode solves the full system") {
    const CliRun ls = invoke({"calibrate", "--table1", "--no-timestamp"});
    REQUIRE(ls.code == 0);
    const ReportDocument ldoc = ReportDocument::parse(ls.out);
    CHECK(ldoc.payload.at("mode").get<std::string>() == "least_squares");
    CHECK(ldoc.payload.at("converged").get<bool>());
    CHECK(ldoc.payload.at("initial_guess_dependent").get<bool>());
    CHECK(ldoc.payload.at("initial").at(0).get<double>() == 0.0);
    CHECK(ldoc.payload.at("initial").at(1).get<double>() == 0.0);
    CHECK(ldoc.payload.at("initial").at(2).get<double>() == 2.0);
    CHECK(ldoc.payload.at("sse").get<double>() <= 1e-18);
    REQUIRE(ldoc.payload.at("residuals").size() == 3);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(ldoc.payload.at("residuals").at(i).get<double>()) <=
            1e-9);
    CHECK(ldoc.payload.at("certificate").at("jacobian_rank").get<int>() == 2);
  }
}

TEST_CASE("price subcommand matches closed forms") {
  const CliRun result =
      invoke({"price", "--table1", "--rho", "1.033526", "--zeta", "0.961745",
              "--xi", "1.019392", "--no-timestamp"});
  REQUIRE(result.code == 0);
  REQUIRE(result.err.empty());

  const ReportDocument doc = ReportDocument::parse(result.out);
  CHECK(doc.payload_kind == "pricing");
  const LognormalParams p = moments_from_summary(1.018, 0.036);
  const GrowthMoments m = GrowthMoments::consumption_only(p.mu, p.var);
  const Preferences prefs(0.99, 1.033526);
  CHECK(doc.payload.at("moments").at("mu_x").get<double>() == m.mu_x);
  CHECK(doc.payload.at("price_dividend_ratio").get<double>() ==
        price_dividend_ratio(prefs, 0.961745, m));
  CHECK(doc.payload.at("expected_equity_return").get<double>() ==
        expected_equity_return(prefs, 0.961745, m));
  CHECK(doc.payload.at("risk_free_rate").get<double>() ==
        risk_free_rate(prefs, 1.019392, m));
  CHECK(doc.payload.at("log_equity_premium").get<double>() ==
        log_equity_premium(0.961745, 1.019392, 1.033526, m.var_x));
  CHECK(doc.payload.at("display").at("expected_equity_return")
            .get<std::string>() == "1.069801");
  CHECK(doc.payload.at("display").at("risk_free_rate").get<std::string>() ==
        "1.008000");
  CHECK(doc.payload.at("display").at("log_equity_premium")
            .get<std::string>() == "0.059504");

  SUBCASE("direct moments bypass the series estimate") {
    const CliRun direct =
        invoke({"price", "--mu", "0.017215", "--var", "0.001250", "--rho",
                "1.033526", "--zeta", "0.961745", "--xi", "1.019392",
                "--no-timestamp"});
    REQUIRE(direct.code == 0);
    const ReportDocument ddoc = ReportDocument::parse(direct.out);
    CHECK(ddoc.payload.at("expected_equity_return").get<double>() ==
          1.0698010746708733);
    CHECK(ddoc.payload.at("risk_free_rate").get<double>() ==
          1.0080003378408045);
    CHECK(ddoc.payload.at("price_dividend_ratio").get<double>() ==
          19.6521351676144);
  }
}

TEST_CASE("classify subcommand maps both input modes") {
  SUBCASE("utility inputs") {
    const CliRun result =
        invoke({"classify", "--certain", "-0.4", "--expected", "-0.45",
                "--beta", "0.99", "--eta", "1.1", "--no-timestamp"});
    REQUIRE(result.code == 0);
    const ReportDocument doc = ReportDocument::parse(result.out);
    CHECK(doc.payload_kind == "classification");
    const RiskAssessment expected = classify(-0.4, -0.45, 0.99, 1.1);
    CHECK(doc.payload.at("classification").get<std::string>() ==
          "risk_averse");
    CHECK(doc.payload.at("comparison").get<std::string>() == "greater");
    CHECK(doc.payload.at("allocation").get<double>() == expected.allocation);
    CHECK(doc.payload.at("discounted_scaled").get<double>() ==
          expected.discounted_scaled);
    CHECK(doc.payload.at("display").at("allocation").get<std::string>() ==
          "-0.045000");
    CHECK(!doc.payload.contains("rho"));
    CHECK(!doc.payload.contains("curve_position"));
  }
  SUBCASE("wealth inputs derive utilities and the curve position") {
    const CliRun result =
        invoke({"classify", "--wealth-now", "2.0", "--wealth-next", "2.2",
                "--rho", "2.0", "--beta", "0.99", "--eta", "1.2",
                "--no-timestamp"});
    REQUIRE(result.code == 0);
    const ReportDocument doc = ReportDocument::parse(result.out);
    CHECK(doc.payload.at("certain_utility").get<double>() ==
          crra_utility(2.0, 2.0).utility);
    CHECK(doc.payload.at("expected_utility").get<double>() ==
          crra_utility(2.2, 2.0).utility);
    CHECK(doc.payload.at("classification").get<std::string>() ==
          "risk_averse");
    CHECK(doc.payload.at("rho").get<double>() == 2.0);
    CHECK(doc.payload.at("curve_position").get<std::string>() ==
          to_string(curve_position(1.2, 2.0)));
  }
  SUBCASE("log utility omits the undefined curve position") {
    const CliRun result =
        invoke({"classify", "--wealth-now", "2.0", "--wealth-next", "2.2",
                "--rho", "1", "--eta", "1.2", "--no-timestamp"});
    REQUIRE(result.code == 0);
    const ReportDocument doc = ReportDocument::parse(result.out);
    CHECK(doc.payload.contains("rho"));
    CHECK(!doc.payload.contains("curve_position"));
  }
  SUBCASE("input mode must be chosen exactly once") {
    const CliRun neither = invoke({"classify", "--eta", "1.1"});
    CHECK(neither.code == 1);
    CHECK(neither.err.find("give either --certain with --expected") !=
          std::string::npos);
    const CliRun both = invoke({"classify", "--certain", "-0.4",
                                "--wealth-now", "2.0", "--eta", "1.1"});
    CHECK(both.code == 1);
    const CliRun half_utility =
        invoke({"classify", "--certain", "-0.4", "--eta", "1.1"});
    CHECK(half_utility.code == 1);
    CHECK(half_utility.err.find(
              "--certain and --expected must be given together") !=
          std::string::npos);
    const CliRun half_wealth = invoke({"classify", "--wealth-now", "2.0",
                                       "--wealth-next", "2.2", "--eta", "1.1"});
    CHECK(half_wealth.code == 1);
    CHECK(half_wealth.err.find(
              "--wealth-now, --wealth-next and --rho must be given together") !=
          std::string::npos);
  }
}

TEST_CASE("simulate subcommand is reproducible across drivers") {
  const std::vector<std::string> base = {
      "simulate", "--table1", "--rho",  "1.033526", "--zeta", "0.961745",
      "--xi",     "1.019392", "--draws", "4096",    "--seed", "7",
      "--chunk",  "512",      "--no-timestamp"};
  const CliRun parallel = invoke(base);
  REQUIRE(parallel.code == 0);
  REQUIRE(parallel.err.empty());

  const ReportDocument doc = ReportDocument::parse(parallel.out);
  CHECK(doc.payload_kind == "simulation");
  CHECK(doc.payload.at("mode").get<std::string>() == "parallel");
  CHECK(doc.payload.at("draws").get<std::uint64_t>() == 4096);
  CHECK(doc.payload.at("seed").get<std::uint64_t>() == 7);
  CHECK(doc.payload.at("chunk").get<std::uint64_t>() == 512);
  CHECK(doc.payload.at("euler_residual_sample").get<double>() <= 1e-12);
  CHECK(std::abs(doc.payload.at("central_gap_sample").get<double>()) <=
        1e-10);
  CHECK(doc.payload.at("equity_return").at("std_error").get<double>() > 0.0);

  const LognormalParams p = moments_from_summary(1.018, 0.036);
  const GrowthMoments m = GrowthMoments::consumption_only(p.mu, p.var);
  CHECK(doc.payload.at("closed_form").at("expected_equity_return")
            .get<double>() ==
        expected_equity_return(Preferences(0.99, 1.033526), 0.961745, m));

  std::vector<std::string> serial_args = base;
  serial_args.push_back("--serial");
  const CliRun serial = invoke(serial_args);
  REQUIRE(serial.code == 0);
  const ReportDocument sdoc = ReportDocument::parse(serial.out);
  CHECK(sdoc.payload.at("mode").get<std::string>() == "serial");
  // Both drivers reduce the same chunk sums, so every estimate agrees
  // bit for bit.
  for (const char* key : {"growth", "growth_power", "discount_power",
                          "equity_return", "risk_free"}) {
    CHECK(sdoc.payload.at(key).at("value").get<double>() ==
          doc.payload.at(key).at("value").get<double>());
    CHECK(sdoc.payload.at(key).at("std_error").get<double>() ==
          doc.payload.at(key).at("std_error").get<double>());
  }

  SUBCASE("automatic chunking picks a dividing power of two") {
    const CliRun result =
        invoke({"simulate", "--mu", "0.01", "--var", "0.0004", "--rho", "1",
                "--zeta", "0.9", "--xi", "1.0", "--draws", "1000", "--seed",
                "1", "--no-timestamp"});
    REQUIRE(result.code == 0);
    CHECK(ReportDocument::parse(result.out)
              .payload.at("chunk")
              .get<std::uint64_t>() == 8);
    const CliRun odd =
        invoke({"simulate", "--mu", "0.01", "--var", "0.0004", "--rho", "1",
                "--zeta", "0.9", "--xi", "1.0", "--draws", "999", "--seed",
                "1", "--no-timestamp"});
    REQUIRE(odd.code == 0);
    CHECK(ReportDocument::parse(odd.out)
              .payload.at("chunk")
              .get<std::uint64_t>() == 999);
  }
}

TEST_CASE("curves subcommand prints the wealth table") {
  const CliRun result =
      invoke({"curves", "--rho", "2", "--eta", "1.1", "--beta", "0.99",
              "--grid-min", "0.5", "--grid-max", "2.5", "--grid-points", "5"});
  REQUIRE(result.code == 0);
  REQUIRE(result.err.empty());

  std::vector<double> grid(5);
  const double step = (2.5 - 0.5) / double(5 - 1);
  for (int i = 0; i < 5; ++i) grid[i] = 0.5 + step * i;
  const std::vector<CurveSample> rows = curve_samples(2.0, 1.1, 0.99, grid);
  std::ostringstream expected;
  expected << "w\tu\teta_u\tbeta_eta_u\n";
  char buffer[160];
  for (const CurveSample& row : rows) {
    std::snprintf(buffer, sizeof buffer, "%.12g\t%.12g\t%.12g\t%.12g\n",
                  row.wealth, row.utility, row.scaled, row.discounted_scaled);
    expected << buffer;
  }
  CHECK(result.out == expected.str());

  SUBCASE("grid validation") {
    CHECK(invoke({"curves", "--rho", "2", "--eta", "1.1", "--grid-min", "0"})
              .code == 1);
    const CliRun inverted = invoke({"curves", "--rho", "2", "--eta", "1.1",
                                    "--grid-min", "2", "--grid-max", "1"});
    CHECK(inverted.code == 1);
    CHECK(inverted.err.find("--grid-max must not be below --grid-min") !=
          std::string::npos);
    CHECK(invoke({"curves", "--rho", "2", "--eta", "1.1", "--grid-points",
                  "1"})
              .code == 1);
  }
}

TEST_CASE("check subcommand passes its battery") {
  const CliRun result = invoke({"check"});
  CHECK(result.code == 0);
  CHECK(result.out.find("FAIL") == std::string::npos);
  CHECK(result.out.find("ok   philox reference vectors") != std::string::npos);
  CHECK(result.out.find("ok   serial and parallel sums bit-identical") !=
        std::string::npos);
  CHECK(result.out.find("ok   monte carlo within 3 standard errors of closed "
                        "form") != std::string::npos);
  CHECK(result.out.find("10/10 checks passed") != std::string::npos);
}

TEST_CASE("usage and data failures map to exit codes") {
  const CliRun unknown = invoke({"frobnicate"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("usage error: ") == 0);

  CHECK(invoke({"moments"}).code == 1);
  CHECK(invoke({"moments", "--input", "x.csv", "--divisor", "n-2"}).code == 1);

  const CliRun missing = invoke({"moments", "--input", "/no/such.csv"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("data error: cannot open '/no/such.csv'") !=
        std::string::npos);

  TempFile file("sfcapm_io_exitcodes.csv", "consumption\n100\n102\n");
  const CliRun delimiter =
      invoke({"moments", "--input", file.str(), "--delimiter", "bogus"});
  CHECK(delimiter.code == 1);
  CHECK(delimiter.err.find(
            "--delimiter must be a single character, 'tab' or 'comma'") !=
        std::string::npos);

  const CliRun conflict = invoke({"calibrate", "--table1", "--mean-equity",
                                  "1.0698", "--risk-free", "1.008",
                                  "--mean-growth", "1.018", "--sd-growth",
                                  "0.036"});
  CHECK(conflict.code == 1);
  CHECK(conflict.err.find("choose exactly one input source") !=
        std::string::npos);

  const CliRun partial = invoke({"calibrate", "--mean-equity", "1.0698"});
  CHECK(partial.code == 1);
  CHECK(partial.err.find("must be given together") != std::string::npos);

  const CliRun exclusive = invoke({"calibrate", "--table1", "--rho", "1",
                                   "--initial", "0", "0", "2"});
  CHECK(exclusive.code == 1);
  CHECK(exclusive.err.find("mutually exclusive") != std::string::npos);

  const CliRun moments_conflict =
      invoke({"price", "--table1", "--mu", "0.01", "--var", "0.0004", "--rho",
              "1", "--zeta", "1", "--xi", "1"});
  CHECK(moments_conflict.code == 1);
  CHECK(moments_conflict.err.find("choose exactly one moments source") !=
        std::string::npos);

  const CliRun half_moments =
      invoke({"price", "--mu", "0.01", "--rho", "1", "--zeta", "1", "--xi",
              "1"});
  CHECK(half_moments.code == 1);
  CHECK(half_moments.err.find("--mu and --var must be given together") !=
        std::string::npos);

  const CliRun no_price = invoke({"price", "--table1", "--rho", "0", "--zeta",
                                  "1.2", "--xi", "1.0", "--no-timestamp"});
  CHECK(no_price.code == 3);
  CHECK(no_price.err.find("error: ") == 0);
  CHECK(no_price.err.find("no finite equilibrium price") != std::string::npos);

  const CliRun bad_beta =
      invoke({"price", "--table1", "--beta", "1.5", "--rho", "1", "--zeta",
              "0.9", "--xi", "1.0"});
  CHECK(bad_beta.code == 3);
  CHECK(bad_beta.err.find("beta must lie in (0, 1]") != std::string::npos);

  const CliRun bad_chunk =
      invoke({"simulate", "--table1", "--rho", "1", "--zeta", "0.9", "--xi",
              "1.0", "--draws", "1000", "--chunk", "300", "--no-timestamp"});
  CHECK(bad_chunk.code == 3);
  CHECK(bad_chunk.err.find("chunk must divide") != std::string::npos);
}

TEST_CASE("reports write to files byte-identically") {
  const std::filesystem::path target =
      std::filesystem::temp_directory_path() / "sfcapm_io_report.json";
  std::error_code ec;
  std::filesystem::remove(target, ec);

  const CliRun result = invoke({"calibrate", "--table1", "--rho", "1.033526",
                                "--no-timestamp", "--out", target.string()});
  REQUIRE(result.code == 0);
  CHECK(result.out.empty());
  const std::string bytes = slurp(target);
  const ReportDocument doc = ReportDocument::parse(bytes);
  CHECK(doc.payload_kind == "calibration");
  CHECK(doc.payload.at("display").at("zeta").get<std::string>() ==
        "0.961745");
  std::filesystem::remove(target, ec);

  const CliRun unwritable =
      invoke({"calibrate", "--table1", "--rho", "1.033526", "--out",
              "/no_such_dir/report.json"});
  CHECK(unwritable.code == 2);
  CHECK(unwritable.err.find("cannot write '/no_such_dir/report.json'") !=
        std::string::npos);

  SUBCASE("curves tables write through the same path") {
    const std::filesystem::path table =
        std::filesystem::temp_directory_path() / "sfcapm_io_curves.tsv";
    std::filesystem::remove(table, ec);
    const CliRun curves = invoke({"curves", "--rho", "2", "--eta", "1.1",
                                  "--out", table.string()});
    REQUIRE(curves.code == 0);
    CHECK(curves.out.empty());
    CHECK(slurp(table).rfind("w\tu\teta_u\tbeta_eta_u\n", 0) == 0);
    std::filesystem::remove(table, ec);
  }
}
