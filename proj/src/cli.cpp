#include "sfcapm/cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sfcapm/calibration.hpp"
#include "sfcapm/csv.hpp"
#include "sfcapm/errors.hpp"
#include "sfcapm/moments.hpp"
#include "sfcapm/philox.hpp"
#include "sfcapm/pricing.hpp"
#include "sfcapm/report.hpp"
#include "sfcapm/risk.hpp"
#include "sfcapm/simulate.hpp"

namespace sfcapm {
namespace {

constexpr const char* kTool = "sfcapm";
constexpr const char* kVersion = "0.1.0";

// Usage problems detected after CLI11 parsing; mapped to exit code 1.
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct OutputOptions {
  std::string out_path;
  bool no_timestamp = false;
};

void add_output_options(CLI::App* sub, OutputOptions& opts) {
  sub->add_option("--out", opts.out_path,
                  "Write the report to this file instead of stdout");
  sub->add_flag("--no-timestamp", opts.no_timestamp,
                "Omit the timestamp for byte-reproducible output");
}

std::string join_command(const std::vector<std::string>& args) {
  std::string cmd = kTool;
  for (const std::string& arg : args) {
    cmd += ' ';
    cmd += arg;
  }
  return cmd;
}

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw data_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

// Input digest: every raw argument NUL-terminated, then the bytes of any
// input file, so the digest is recomputable from the invocation alone.
class DigestBuilder {
 public:
  explicit DigestBuilder(const std::vector<std::string>& args) {
    for (const std::string& arg : args) {
      hash_.update(arg);
      hash_.update(std::string_view("\0", 1));
    }
  }
  void add_file(std::string_view bytes) { hash_.update(bytes); }
  std::string hex() const { return hex64(hash_.value()); }

 private:
  Fnv1a hash_;
};

void emit_report(const std::string& payload_kind, ordered_json payload,
                 const DigestBuilder& digest,
                 const std::vector<std::string>& args,
                 const OutputOptions& opts, std::ostream& out) {
  ReportDocument doc;
  doc.tool = kTool;
  doc.version = kVersion;
  doc.command = join_command(args);
  doc.input_digest = digest.hex();
  if (!opts.no_timestamp) doc.timestamp = utc_timestamp();
  doc.payload_kind = payload_kind;
  doc.payload = std::move(payload);
  const std::string text = doc.serialize();
  if (opts.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(opts.out_path, std::ios::binary);
    if (!file) throw data_error("cannot write '" + opts.out_path + "'");
    file << text;
  }
}

void write_text(const std::string& text, const OutputOptions& opts,
                std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
  } else {
    std::ofstream file(opts.out_path, std::ios::binary);
    if (!file) throw data_error("cannot write '" + opts.out_path + "'");
    file << text;
  }
}

std::optional<char> resolve_delimiter(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  if (flag == "tab") return '\t';
  if (flag == "comma") return ',';
  if (flag.size() == 1) return flag[0];
  throw usage_error("--delimiter must be a single character, 'tab' or 'comma'");
}

AnnualSeries load_input(const std::string& path, const std::string& delimiter,
                        DigestBuilder& digest) {
  const std::string bytes = read_file(path);
  digest.add_file(bytes);
  CsvOptions options;
  options.delimiter = resolve_delimiter(delimiter);
  return parse_series(bytes, options);
}

// ---- payload builders ----

ordered_json json_moments(const GrowthMoments& m) {
  ordered_json j;
  j["mu_x"] = m.mu_x;
  j["var_x"] = m.var_x;
  j["mu_z"] = m.mu_z;
  j["var_z"] = m.var_z;
  j["cov_xz"] = m.cov_xz;
  return j;
}

ordered_json json_summary(const EconomySummary& s) {
  ordered_json j;
  j["mean_equity_return"] = s.mean_equity_return;
  j["risk_free_rate"] = s.risk_free_rate;
  j["mean_growth"] = s.mean_growth;
  j["sd_growth"] = s.sd_growth;
  j["mean_premium"] = s.mean_premium;
  return j;
}

ordered_json json_estimate(const MeanEstimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  return j;
}

ordered_json json_certificate(const DegeneracyReport& r) {
  ordered_json j;
  j["witness"] = r.witness;
  j["consistent"] = r.consistent;
  j["jacobian_rank"] = r.jacobian_rank;
  j["singular_values"] = ordered_json::array(
      {r.singular_values[0], r.singular_values[1], r.singular_values[2]});
  j["sv_ratio"] = r.sv_ratio;
  j["verdict"] = r.verdict;
  return j;
}

ordered_json json_family(const SolutionFamily& f) {
  ordered_json j;
  j["ln_zeta_coeffs"] = ordered_json::array(
      {f.ln_zeta_coeffs[0], f.ln_zeta_coeffs[1], f.ln_zeta_coeffs[2]});
  j["ln_xi_coeffs"] = ordered_json::array(
      {f.ln_xi_coeffs[0], f.ln_xi_coeffs[1], f.ln_xi_coeffs[2]});
  j["text"] = f.text;
  return j;
}

// ---- subcommand option bags ----

struct MomentsOptions {
  std::string input;
  std::string divisor = "n";
  std::string delimiter;
  OutputOptions output;
};

struct SummarySourceOptions {
  bool table1 = false;
  std::string input;
  std::string delimiter;
  double mean_equity = 0;
  double risk_free = 0;
  double mean_growth = 0;
  double sd_growth = 0;
  CLI::Option* mean_equity_opt = nullptr;
  CLI::Option* risk_free_opt = nullptr;
  CLI::Option* mean_growth_opt = nullptr;
  CLI::Option* sd_growth_opt = nullptr;
};

void add_summary_source(CLI::App* sub, SummarySourceOptions& opts) {
  sub->add_flag("--table1", opts.table1,
                "Use the builtin 1889-1978 U.S. annual statistics");
  sub->add_option("--input", opts.input,
                  "CSV series with consumption, equity_return and rf_return");
  sub->add_option("--delimiter", opts.delimiter,
                  "Field delimiter for --input (auto-detected by default)");
  opts.mean_equity_opt = sub->add_option("--mean-equity", opts.mean_equity,
                                         "Gross mean equity return");
  opts.risk_free_opt = sub->add_option("--risk-free", opts.risk_free,
                                       "Gross risk-free rate");
  opts.mean_growth_opt = sub->add_option("--mean-growth", opts.mean_growth,
                                         "Gross mean consumption growth");
  opts.sd_growth_opt = sub->add_option(
      "--sd-growth", opts.sd_growth, "Standard deviation of gross growth");
}

EconomySummary resolve_summary(const SummarySourceOptions& opts,
                               DigestBuilder& digest) {
  const bool explicit_any =
      opts.mean_equity_opt->count() || opts.risk_free_opt->count() ||
      opts.mean_growth_opt->count() || opts.sd_growth_opt->count();
  const int sources = int(opts.table1) + int(!opts.input.empty()) +
                      int(explicit_any);
  if (sources != 1) {
    throw usage_error(
        "choose exactly one input source: --table1, --input, or the four "
        "explicit summary values");
  }
  if (opts.table1) return us_economy_1889_1978();
  if (!opts.input.empty())
    return summarize(load_input(opts.input, opts.delimiter, digest));
  const bool explicit_all =
      opts.mean_equity_opt->count() && opts.risk_free_opt->count() &&
      opts.mean_growth_opt->count() && opts.sd_growth_opt->count();
  if (!explicit_all) {
    throw usage_error(
        "--mean-equity, --risk-free, --mean-growth and --sd-growth must be "
        "given together");
  }
  return EconomySummary(opts.mean_equity, opts.risk_free, opts.mean_growth,
                        opts.sd_growth);
}

struct MomentsSourceOptions {
  bool table1 = false;
  std::string input;
  std::string delimiter;
  double mu = 0;
  double var = 0;
  CLI::Option* mu_opt = nullptr;
  CLI::Option* var_opt = nullptr;
};

void add_moments_source(CLI::App* sub, MomentsSourceOptions& opts) {
  sub->add_flag("--table1", opts.table1,
                "Moments implied by the builtin 1889-1978 U.S. statistics");
  sub->add_option("--input", opts.input, "CSV series to estimate moments from");
  sub->add_option("--delimiter", opts.delimiter,
                  "Field delimiter for --input (auto-detected by default)");
  opts.mu_opt = sub->add_option("--mu", opts.mu, "Log-growth mean");
  opts.var_opt = sub->add_option("--var", opts.var, "Log-growth variance");
}

GrowthMoments resolve_moments(const MomentsSourceOptions& opts,
                              DigestBuilder& digest) {
  const bool direct = opts.mu_opt->count() || opts.var_opt->count();
  const int sources =
      int(opts.table1) + int(!opts.input.empty()) + int(direct);
  if (sources != 1) {
    throw usage_error(
        "choose exactly one moments source: --table1, --input, or --mu with "
        "--var");
  }
  if (opts.table1) {
    const EconomySummary summary = us_economy_1889_1978();
    const LognormalParams p =
        moments_from_summary(summary.mean_growth, summary.sd_growth);
    return GrowthMoments::consumption_only(p.mu, p.var);
  }
  if (!opts.input.empty())
    return estimate_moments(load_input(opts.input, opts.delimiter, digest));
  if (!(opts.mu_opt->count() && opts.var_opt->count()))
    throw usage_error("--mu and --var must be given together");
  return GrowthMoments::consumption_only(opts.mu, opts.var);
}

// ---- subcommand runners ----

int run_moments(const MomentsOptions& opts, const std::vector<std::string>& args,
                std::ostream& out) {
  DigestBuilder digest(args);
  const AnnualSeries series =
      load_input(opts.input, opts.delimiter, digest);
  const VarianceDivisor divisor = opts.divisor == "n"
                                      ? VarianceDivisor::population
                                      : VarianceDivisor::sample;
  const GrowthMoments moments = estimate_moments(series, divisor);
  ordered_json payload;
  payload["observations"] = series.consumption.size();
  payload["divisor"] = opts.divisor;
  payload["growth_moments"] = json_moments(moments);
  if (series.equity_return && series.risk_free_return)
    payload["economy_summary"] = json_summary(summarize(series, divisor));
  ordered_json display;
  display["mu_x"] = format_fixed6(moments.mu_x);
  display["var_x"] = format_fixed6(moments.var_x);
  display["mu_z"] = format_fixed6(moments.mu_z);
  display["var_z"] = format_fixed6(moments.var_z);
  display["cov_xz"] = format_fixed6(moments.cov_xz);
  payload["display"] = display;
  emit_report("moments", std::move(payload), digest, args, opts.output, out);
  return 0;
}

struct CalibrateOptions {
  SummarySourceOptions source;
  double beta = 0.99;
  double rho = 0;
  CLI::Option* rho_opt = nullptr;
  std::vector<double> initial;
  bool full_precision = false;
  int max_iterations = 200;
  double tolerance = 1e-18;
  OutputOptions output;
};

int run_calibrate(const CalibrateOptions& opts,
                  const std::vector<std::string>& args, std::ostream& out) {
  DigestBuilder digest(args);
  const EconomySummary summary = resolve_summary(opts.source, digest);
  CalibrationTargets targets = build_targets(summary, opts.beta);
  // The builtin table reproduces published six-decimal coefficients unless
  // full precision is requested explicitly.
  const bool rounded_view = opts.source.table1 && !opts.full_precision;
  if (rounded_view) targets = targets.rounded();
  const bool pinned = opts.rho_opt->count() > 0;
  if (pinned && !opts.initial.empty())
    throw usage_error("--rho (pinned solve) and --initial (full solve) are "
                      "mutually exclusive");

  ordered_json payload;
  payload["beta"] = opts.beta;
  payload["target_view"] = rounded_view ? "paper-rounded" : "full-precision";
  {
    ordered_json t;
    t["t1"] = targets.t1;
    t["t2"] = targets.t2;
    t["t3"] = targets.t3;
    payload["targets"] = t;
  }
  payload["moments"] = json_moments(targets.moments);

  double zeta = 0, xi = 0, rho = 0;
  if (pinned) {
    const PinnedSolution solution = solve_pinned(opts.rho, targets);
    zeta = solution.zeta;
    xi = solution.xi;
    rho = opts.rho;
    payload["mode"] = "pinned";
    ordered_json point;
    point["zeta"] = solution.zeta;
    point["xi"] = solution.xi;
    point["rho"] = rho;
    payload["point"] = point;
    payload["premium_residual"] = solution.premium_residual;
    payload["certificate"] = json_certificate(rank_certificate(targets));
    payload["family"] = json_family(solution_family(targets));
  } else {
    InitialGuess guess;
    if (!opts.initial.empty()) {
      guess.ln_zeta = opts.initial[0];
      guess.ln_xi = opts.initial[1];
      guess.rho = opts.initial[2];
    }
    SolveOptions solve_options;
    solve_options.max_iterations = opts.max_iterations;
    solve_options.sse_step_tolerance = opts.tolerance;
    const CalibrationResult result = solve_full(guess, targets, solve_options);
    zeta = result.zeta;
    xi = result.xi;
    rho = result.rho;
    payload["mode"] = "least_squares";
    payload["initial"] =
        ordered_json::array({guess.ln_zeta, guess.ln_xi, guess.rho});
    ordered_json point;
    point["zeta"] = result.zeta;
    point["xi"] = result.xi;
    point["rho"] = result.rho;
    payload["point"] = point;
    payload["residuals"] = ordered_json::array(
        {result.residual[0], result.residual[1], result.residual[2]});
    payload["sse"] = result.sse;
    payload["iterations"] = result.iterations;
    payload["converged"] = result.converged;
    payload["initial_guess_dependent"] = result.initial_guess_dependent;
    payload["certificate"] = json_certificate(result.certificate);
    payload["family"] = json_family(result.family);
  }
  ordered_json display;
  display["zeta"] = format_fixed6(zeta);
  display["xi"] = format_fixed6(xi);
  display["rho"] = format_fixed6(rho);
  payload["display"] = display;
  emit_report("calibration", std::move(payload), digest, args, opts.output,
              out);
  return 0;
}

struct PriceOptions {
  MomentsSourceOptions source;
  double beta = 0.99;
  double rho = 0;
  double zeta = 0;
  double xi = 0;
  OutputOptions output;
};

int run_price(const PriceOptions& opts, const std::vector<std::string>& args,
              std::ostream& out) {
  DigestBuilder digest(args);
  const GrowthMoments moments = resolve_moments(opts.source, digest);
  const Preferences prefs(opts.beta, opts.rho);
  const SufficiencyFactors factors(opts.zeta, opts.xi);
  const double v = price_dividend_ratio(prefs, factors.zeta, moments);
  const double equity = expected_equity_return(prefs, factors.zeta, moments);
  const double risk_free = risk_free_rate(prefs, factors.xi, moments);
  const double premium =
      log_equity_premium(factors.zeta, factors.xi, prefs.rho, moments.var_x);
  ordered_json payload;
  payload["beta"] = prefs.beta;
  payload["rho"] = prefs.rho;
  payload["zeta"] = factors.zeta;
  payload["xi"] = factors.xi;
  payload["moments"] = json_moments(moments);
  payload["price_dividend_ratio"] = v;
  payload["expected_equity_return"] = equity;
  payload["risk_free_rate"] = risk_free;
  payload["log_equity_premium"] = premium;
  ordered_json display;
  display["price_dividend_ratio"] = format_fixed6(v);
  display["expected_equity_return"] = format_fixed6(equity);
  display["risk_free_rate"] = format_fixed6(risk_free);
  display["log_equity_premium"] = format_fixed6(premium);
  payload["display"] = display;
  emit_report("pricing", std::move(payload), digest, args, opts.output, out);
  return 0;
}

struct ClassifyOptions {
  double certain = 0;
  double expected = 0;
  double wealth_now = 0;
  double wealth_next = 0;
  double rho = 0;
  double beta = 0.99;
  double eta = 0;
  CLI::Option* certain_opt = nullptr;
  CLI::Option* expected_opt = nullptr;
  CLI::Option* wealth_now_opt = nullptr;
  CLI::Option* wealth_next_opt = nullptr;
  CLI::Option* rho_opt = nullptr;
  OutputOptions output;
};

int run_classify(const ClassifyOptions& opts,
                 const std::vector<std::string>& args, std::ostream& out) {
  DigestBuilder digest(args);
  const bool utility_mode = opts.certain_opt->count() || opts.expected_opt->count();
  const bool wealth_mode = opts.wealth_now_opt->count() ||
                           opts.wealth_next_opt->count() ||
                           opts.rho_opt->count();
  if (utility_mode == wealth_mode) {
    throw usage_error(
        "give either --certain with --expected, or --wealth-now, "
        "--wealth-next and --rho");
  }
  double certain = opts.certain;
  double expected = opts.expected;
  if (utility_mode) {
    if (!(opts.certain_opt->count() && opts.expected_opt->count()))
      throw usage_error("--certain and --expected must be given together");
  } else {
    if (!(opts.wealth_now_opt->count() && opts.wealth_next_opt->count() &&
          opts.rho_opt->count()))
      throw usage_error(
          "--wealth-now, --wealth-next and --rho must be given together");
    certain = crra_utility(opts.wealth_now, opts.rho).utility;
    expected = crra_utility(opts.wealth_next, opts.rho).utility;
  }
  const RiskAssessment assessment =
      classify(certain, expected, opts.beta, opts.eta);
  ordered_json payload;
  payload["certain_utility"] = assessment.certain_utility;
  payload["expected_utility"] = assessment.expected_utility;
  payload["beta"] = assessment.beta;
  payload["eta"] = assessment.eta;
  payload["allocation"] = assessment.allocation;
  payload["discounted_scaled"] = assessment.discounted_scaled;
  payload["comparison"] = to_string(assessment.comparison);
  payload["classification"] = to_string(assessment.classification);
  if (wealth_mode) {
    payload["rho"] = opts.rho;
    if (opts.rho != 1.0)
      payload["curve_position"] = to_string(curve_position(opts.eta, opts.rho));
  }
  ordered_json display;
  display["allocation"] = format_fixed6(assessment.allocation);
  display["comparison"] = to_string(assessment.comparison);
  display["classification"] = to_string(assessment.classification);
  payload["display"] = display;
  emit_report("classification", std::move(payload), digest, args, opts.output,
              out);
  return 0;
}

struct SimulateOptions {
  MomentsSourceOptions source;
  double beta = 0.99;
  double rho = 0;
  double zeta = 0;
  double xi = 0;
  std::uint64_t draws = 1000000;
  std::uint64_t seed = 42;
  std::uint64_t chunk = 0;  // 0 selects the automatic chunk size
  bool serial = false;
  OutputOptions output;
};

int run_simulate(const SimulateOptions& opts,
                 const std::vector<std::string>& args, std::ostream& out) {
  DigestBuilder digest(args);
  const GrowthMoments moments = resolve_moments(opts.source, digest);
  const Preferences prefs(opts.beta, opts.rho);
  const SufficiencyFactors factors(opts.zeta, opts.xi);
  const std::uint64_t chunk =
      opts.chunk > 0 ? opts.chunk : automatic_chunk(opts.draws);
  const SimulationConfig config(moments, prefs, factors, opts.draws, opts.seed,
                                chunk);
  const RunMode mode = opts.serial ? RunMode::serial : RunMode::parallel;
  const SimulationReport report = run_simulation(config, mode);

  ordered_json payload;
  payload["draws"] = config.draws;
  payload["seed"] = config.seed;
  payload["chunk"] = config.chunk;
  payload["mode"] = opts.serial ? "serial" : "parallel";
  payload["beta"] = prefs.beta;
  payload["rho"] = prefs.rho;
  payload["zeta"] = factors.zeta;
  payload["xi"] = factors.xi;
  payload["moments"] = json_moments(moments);
  payload["growth"] = json_estimate(report.growth);
  payload["growth_power"] = json_estimate(report.growth_power);
  payload["discount_power"] = json_estimate(report.discount_power);
  payload["price_dividend_sample"] = report.price_dividend_sample;
  payload["equity_return"] = json_estimate(report.equity_return);
  payload["risk_free"] = json_estimate(report.risk_free);
  payload["euler_residual_sample"] = report.euler_residual_sample;
  payload["euler_residual_closed"] = json_estimate(report.euler_residual_closed);
  payload["central_gap_sample"] = report.central_gap_sample;
  payload["central_gap_closed"] = json_estimate(report.central_gap_closed);
  {
    ordered_json closed;
    closed["price_dividend_ratio"] =
        price_dividend_ratio(prefs, factors.zeta, moments);
    closed["expected_equity_return"] =
        expected_equity_return(prefs, factors.zeta, moments);
    closed["risk_free_rate"] = risk_free_rate(prefs, factors.xi, moments);
    payload["closed_form"] = closed;
  }
  ordered_json display;
  display["equity_return"] = format_fixed6(report.equity_return.value);
  display["risk_free"] = format_fixed6(report.risk_free.value);
  payload["display"] = display;
  emit_report("simulation", std::move(payload), digest, args, opts.output,
              out);
  return 0;
}

struct CurvesOptions {
  double rho = 0;
  double eta = 0;
  double beta = 0.99;
  double grid_min = 0.1;
  double grid_max = 3.0;
  int grid_points = 30;
  OutputOptions output;
};

int run_curves(const CurvesOptions& opts, std::ostream& out) {
  if (!(opts.grid_min > 0.0))
    throw usage_error("--grid-min must be positive (utility domain)");
  if (!(opts.grid_max >= opts.grid_min))
    throw usage_error("--grid-max must not be below --grid-min");
  if (opts.grid_points < 2) throw usage_error("--grid-points must be >= 2");
  std::vector<double> grid(opts.grid_points);
  const double step =
      (opts.grid_max - opts.grid_min) / double(opts.grid_points - 1);
  for (int i = 0; i < opts.grid_points; ++i)
    grid[i] = opts.grid_min + step * i;
  const std::vector<CurveSample> rows =
      curve_samples(opts.rho, opts.eta, opts.beta, grid);
  std::ostringstream table;
  table << "w\tu\teta_u\tbeta_eta_u\n";
  char buffer[160];
  for (const CurveSample& row : rows) {
    std::snprintf(buffer, sizeof buffer, "%.12g\t%.12g\t%.12g\t%.12g\n",
                  row.wealth, row.utility, row.scaled, row.discounted_scaled);
    table << buffer;
  }
  write_text(table.str(), opts.output, out);
  return 0;
}

// ---- self-check battery ----

struct CheckOptions {
  std::uint64_t draws = 20000;
  std::uint64_t seed = 42;
};

struct CheckResult {
  std::string name;
  bool ok;
};

bool bitwise_equal(const SampleSums& a, const SampleSums& b) {
  return a.count == b.count && a.x == b.x && a.xx == b.xx && a.p == b.p &&
         a.pp == b.pp && a.m == b.m && a.mm == b.mm && a.xp == b.xp &&
         a.pm == b.pm;
}

std::vector<CheckResult> self_check(const CheckOptions& opts) {
  std::vector<CheckResult> results;
  auto add = [&results](const std::string& name, bool ok) {
    results.push_back({name, ok});
  };

  {
    // Reference vectors for the counter-based generator.
    bool ok = true;
    const auto r1 = philox4x32({0, 0, 0, 0}, {0, 0});
    ok = ok && r1 == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du,
                                                 0xbc57ac4cu, 0x9b00dbd8u};
    const auto r2 = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu,
                                0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
    ok = ok && r2 == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu,
                                                 0xa20bc7c6u, 0x6d5451fdu};
    const auto r3 = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                                0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
    ok = ok && r3 == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu,
                                                 0x5001e420u, 0x24126ea1u};
    add("philox reference vectors", ok);
  }
  {
    bool ok = true;
    for (double mu : {-0.1, 0.0, 0.1}) {
      for (double var : {0.0, 0.004, 0.01}) {
        const double mean = lognormal_power_mean(mu, var, 1.0);
        ok = ok && std::abs(mean - std::exp(mu + 0.5 * var)) <= 1e-12;
        const double second = lognormal_power_mean(mu, var, 2.0);
        ok = ok && std::abs((second - mean * mean) -
                            mean * mean * std::expm1(var)) <= 1e-12;
      }
    }
    add("lognormal moment identities", ok);
  }
  {
    bool ok = true;
    const GrowthMoments m = GrowthMoments::consumption_only(0.0172, 0.00125);
    for (double rho : {0.5, 1.0, 2.0}) {
      const Preferences prefs(0.99, rho);
      const double k = 0.99 * lognormal_power_mean(m.mu_x, m.var_x, 1.0 - rho);
      ok = ok && std::abs(price_dividend_ratio(prefs, 1.0, m) -
                          k / (1.0 - k)) <= 1e-15;
      ok = ok && std::abs(risk_free_rate(prefs, 1.0, m) -
                          1.0 / (0.99 * lognormal_power_mean(m.mu_x, m.var_x,
                                                             -rho))) <= 1e-15;
      ok = ok && std::abs(log_equity_premium(1.0, 1.0, rho, m.var_x) -
                          rho * m.var_x) <= 1e-15;
    }
    add("pricing nests the standard model at zeta = xi = 1", ok);
  }
  {
    bool ok = true;
    const GrowthMoments m = GrowthMoments::consumption_only(0.0172, 0.00125);
    for (double rho : {0.0, 0.7, 1.9}) {
      const Preferences prefs(0.98, rho);
      const double premium = log_equity_premium(0.95, 1.01, rho, m.var_x);
      const double direct =
          std::log(expected_equity_return(prefs, 0.95, m)) -
          std::log(risk_free_rate(prefs, 1.01, m));
      ok = ok && std::abs(premium - direct) <= 1e-12;
    }
    add("log premium consistent with return logs", ok);
  }
  {
    const CalibrationTargets targets =
        build_targets(us_economy_1889_1978(), 0.99);
    const DegeneracyReport certificate = rank_certificate(targets);
    bool ok = std::abs(certificate.witness) <= 1e-12 &&
              certificate.jacobian_rank == 2;
    for (double rho : {0.0, 2.5, 5.0, 7.5, 10.0}) {
      const PinnedSolution solution = solve_pinned(rho, targets);
      const auto r =
          residuals(solution.ln_zeta, solution.ln_xi, rho, targets);
      ok = ok && std::abs(r[0]) <= 1e-12 && std::abs(r[1]) <= 1e-12 &&
           std::abs(r[2]) <= 1e-12;
    }
    add("calibration family closure and rank certificate", ok);
  }

  const CalibrationTargets targets =
      build_targets(us_economy_1889_1978(), 0.99);
  const SimulationConfig config(
      targets.moments, Preferences(0.99, 1.033526),
      SufficiencyFactors(0.961745, 1.019392), opts.draws, opts.seed,
      opts.draws % 8 == 0 ? opts.draws / 8 : opts.draws);
  {
    const SampleSums serial = collect_sums(config, RunMode::serial);
    const SampleSums parallel = collect_sums(config, RunMode::parallel);
    add("serial and parallel sums bit-identical",
        bitwise_equal(serial, parallel));
  }
  const SimulationReport report = run_simulation(config);
  add("in-sample euler residual at machine zero",
      report.euler_residual_sample <= 1e-12);
  add("in-sample central pricing identity",
      std::abs(report.central_gap_sample) <= 1e-10);
  {
    const double closed_equity = expected_equity_return(
        config.prefs, config.factors.zeta, config.moments);
    const double closed_rf =
        risk_free_rate(config.prefs, config.factors.xi, config.moments);
    const bool ok =
        std::abs(report.equity_return.value - closed_equity) <=
            3.0 * report.equity_return.std_error &&
        std::abs(report.risk_free.value - closed_rf) <=
            3.0 * report.risk_free.std_error;
    add("monte carlo within 3 standard errors of closed form", ok);
  }
  {
    bool ok = true;
    for (int i = 0; i < 200 && ok; ++i) {
      const GaussPair g = normal_pair(opts.seed, i, 1);
      const double certain = g.z0;
      const double expected = g.z1 + 0.1;
      const double eta = 0.5 + uniform01(random_bits(opts.seed, i, 2).lo);
      const RiskAssessment base = classify(certain, expected, 0.99, eta);
      for (double scale : {1e-6, 1e3}) {
        const RiskAssessment scaled =
            classify(certain * scale, expected * scale, 0.99, eta);
        ok = ok && scaled.classification == base.classification &&
             scaled.comparison == base.comparison;
      }
    }
    add("classification invariant under positive rescaling", ok);
  }
  return results;
}

int run_check(const CheckOptions& opts, std::ostream& out) {
  const std::vector<CheckResult> results = self_check(opts);
  std::size_t passed = 0;
  for (const CheckResult& result : results) {
    out << (result.ok ? "ok   " : "FAIL ") << result.name << "\n";
    if (result.ok) ++passed;
  }
  out << passed << "/" << results.size() << " checks passed\n";
  return passed == results.size() ? 0 : 3;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Sufficiency-factor consumption-CAPM calibration toolkit"};
  app.name(kTool);
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(0, 1);

  MomentsOptions moments_opts;
  CLI::App* moments_cmd = app.add_subcommand(
      "moments", "Estimate log-growth moments from an annual CSV series");
  moments_cmd->add_option("--input", moments_opts.input, "CSV series file")
      ->required();
  moments_cmd
      ->add_option("--divisor", moments_opts.divisor,
                   "Variance divisor: n (population) or n-1 (sample)")
      ->check(CLI::IsMember({"n", "n-1"}));
  moments_cmd->add_option("--delimiter", moments_opts.delimiter,
                          "Field delimiter (auto-detected by default)");
  add_output_options(moments_cmd, moments_opts.output);

  CalibrateOptions calibrate_opts;
  CLI::App* calibrate_cmd = app.add_subcommand(
      "calibrate", "Solve for the sufficiency factors from a summary");
  add_summary_source(calibrate_cmd, calibrate_opts.source);
  calibrate_cmd->add_option("--beta", calibrate_opts.beta,
                            "Subjective discount factor");
  calibrate_opts.rho_opt = calibrate_cmd->add_option(
      "--rho", calibrate_opts.rho, "Pin rho and solve the first two equations");
  calibrate_cmd
      ->add_option("--initial", calibrate_opts.initial,
                   "Initial guess ln_zeta ln_xi rho for the full solve")
      ->expected(3);
  calibrate_cmd->add_flag("--full-precision", calibrate_opts.full_precision,
                          "Use full-precision targets even with --table1");
  calibrate_cmd->add_option("--max-iterations", calibrate_opts.max_iterations,
                            "Damped least-squares iteration cap");
  calibrate_cmd->add_option("--tolerance", calibrate_opts.tolerance,
                            "Convergence tolerance on the SSE improvement");
  add_output_options(calibrate_cmd, calibrate_opts.output);

  PriceOptions price_opts;
  CLI::App* price_cmd = app.add_subcommand(
      "price", "Price the equity and risk-free assets in closed form");
  add_moments_source(price_cmd, price_opts.source);
  price_cmd->add_option("--beta", price_opts.beta, "Subjective discount factor");
  price_cmd->add_option("--rho", price_opts.rho, "Relative risk aversion")
      ->required();
  price_cmd->add_option("--zeta", price_opts.zeta, "Equity sufficiency factor")
      ->required();
  price_cmd->add_option("--xi", price_opts.xi, "Risk-free sufficiency factor")
      ->required();
  add_output_options(price_cmd, price_opts.output);

  ClassifyOptions classify_opts;
  CLI::App* classify_cmd = app.add_subcommand(
      "classify", "Classify risk behaviour from utilities or wealth levels");
  classify_opts.certain_opt = classify_cmd->add_option(
      "--certain", classify_opts.certain, "Certain utility u(w_now)");
  classify_opts.expected_opt = classify_cmd->add_option(
      "--expected", classify_opts.expected, "Expected future utility");
  classify_opts.wealth_now_opt = classify_cmd->add_option(
      "--wealth-now", classify_opts.wealth_now, "Current wealth level");
  classify_opts.wealth_next_opt = classify_cmd->add_option(
      "--wealth-next", classify_opts.wealth_next, "Expected future wealth");
  classify_opts.rho_opt = classify_cmd->add_option(
      "--rho", classify_opts.rho, "Relative risk aversion for wealth inputs");
  classify_cmd->add_option("--beta", classify_opts.beta,
                           "Subjective discount factor");
  classify_cmd->add_option("--eta", classify_opts.eta, "Sufficiency factor")
      ->required();
  add_output_options(classify_cmd, classify_opts.output);

  SimulateOptions simulate_opts;
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "Monte-Carlo check of the pricing identities");
  add_moments_source(simulate_cmd, simulate_opts.source);
  simulate_cmd->add_option("--beta", simulate_opts.beta,
                           "Subjective discount factor");
  simulate_cmd->add_option("--rho", simulate_opts.rho, "Relative risk aversion")
      ->required();
  simulate_cmd
      ->add_option("--zeta", simulate_opts.zeta, "Equity sufficiency factor")
      ->required();
  simulate_cmd
      ->add_option("--xi", simulate_opts.xi, "Risk-free sufficiency factor")
      ->required();
  simulate_cmd->add_option("--draws", simulate_opts.draws, "Sample size");
  simulate_cmd->add_option("--seed", simulate_opts.seed, "RNG seed");
  simulate_cmd->add_option("--chunk", simulate_opts.chunk,
                           "Draws per chunk (must divide draws; 0 = auto)");
  simulate_cmd->add_flag("--serial", simulate_opts.serial,
                         "Force the serial reference driver");
  add_output_options(simulate_cmd, simulate_opts.output);

  CurvesOptions curves_opts;
  CLI::App* curves_cmd = app.add_subcommand(
      "curves", "Tabulate u(w), eta*u(w) and beta*eta*u(w) over a wealth grid");
  curves_cmd->add_option("--rho", curves_opts.rho, "Relative risk aversion")
      ->required();
  curves_cmd->add_option("--eta", curves_opts.eta, "Sufficiency factor")
      ->required();
  curves_cmd->add_option("--beta", curves_opts.beta,
                         "Subjective discount factor");
  curves_cmd->add_option("--grid-min", curves_opts.grid_min,
                         "Smallest wealth value");
  curves_cmd->add_option("--grid-max", curves_opts.grid_max,
                         "Largest wealth value");
  curves_cmd->add_option("--grid-points", curves_opts.grid_points,
                         "Number of grid rows");
  add_output_options(curves_cmd, curves_opts.output);

  CheckOptions check_opts;
  CLI::App* check_cmd = app.add_subcommand(
      "check", "Run the invariant battery and print pass/fail lines");
  check_cmd->add_option("--draws", check_opts.draws,
                        "Sample size for the stochastic checks");
  check_cmd->add_option("--seed", check_opts.seed, "RNG seed");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back(kTool);
  for (const std::string& arg : args) argv.push_back(arg.c_str());

  try {
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      err << "usage error: " << e.what() << "\n";
      return 1;
    }
    if (app.get_subcommands().empty()) {
      out << app.help();
      return 0;
    }
    if (moments_cmd->parsed()) return run_moments(moments_opts, args, out);
    if (calibrate_cmd->parsed()) return run_calibrate(calibrate_opts, args, out);
    if (price_cmd->parsed()) return run_price(price_opts, args, out);
    if (classify_cmd->parsed()) return run_classify(classify_opts, args, out);
    if (simulate_cmd->parsed()) return run_simulate(simulate_opts, args, out);
    if (curves_cmd->parsed()) return run_curves(curves_opts, out);
    if (check_cmd->parsed()) return run_check(check_opts, out);
    out << app.help();
    return 0;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const data_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const numeric_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace sfcapm
