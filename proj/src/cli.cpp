#include "eeauction/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "text_util.hpp"

namespace eeauction {

namespace fs = std::filesystem;

namespace {

class StageError : public std::runtime_error {
 public:
  StageError(std::string_view stage, const std::string& what)
      : std::runtime_error(std::string(stage) + ": " + what) {}
};

std::string read_input(const std::string& path, std::string_view what) {
  if (path.empty()) throw ConfigError("no " + std::string(what) + " file given");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + std::string(what) + " file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

fs::path prepare_output_dir(const RunConfig& config) {
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
  return dir;
}

BandQuery band_of(const RunConfig& config) {
  BandQuery band{config.band_lo, config.band_hi};
  band.validate();
  return band;
}

std::string fit_diagnostics(const RunConfig& config, const FittedPipeline& fitted) {
  const ApproximationError err = approximation_error(fitted.kde, fitted.poly, config.fit_grid);
  const SupportInterval& s = fitted.poly.support();
  return "bandwidth=" + detail::format_fixed(fitted.kde.bandwidth(), 6) +
         " degree=" + std::to_string(fitted.poly.degree()) +
         " max_abs=" + detail::format_fixed(err.max_abs, 9) +
         " rmse=" + detail::format_fixed(err.rmse, 9) +
         " kernel=" + std::string(to_string(fitted.kde.kernel())) +
         " support=" + detail::format_fixed(s.lo, 6) + ":" + detail::format_fixed(s.hi, 6) +
         " normalizer=" + detail::format_fixed(fitted.poly.normalizer(), 9) + "\n";
}

void write_fit_outputs(const RunConfig& config, const FittedPipeline& fitted,
                       const fs::path& dir, std::ostream& out) {
  write_file(dir / "density.csv", density_csv(fitted.kde, fitted.poly, config.fit_grid));
  const std::string diag = fit_diagnostics(config, fitted);
  write_file(dir / "fit_diagnostics.txt", diag);
  out << diag;
}

ScenarioReport build_report(const RunConfig& config, const FittedPipeline& fitted,
                            const ScenarioSet& set) {
  ScenarioReport report = summarize(set, band_of(config));
  report.metadata.degree = fitted.poly.degree();
  report.metadata.bandwidth = fitted.kde.bandwidth();
  return report;
}

int cmd_ingest(const RunConfig& config, std::ostream& out) {
  std::vector<AuctionRecord> records;
  DeflatorTable deflator;
  const PriceSeries series = ingest_stage(config, &records, &deflator);
  out << "records=" << records.size() << " base_year=" << series.base_year()
      << " n=" << series.size() << " min=" << detail::format_fixed(series.min(), 2)
      << " max=" << detail::format_fixed(series.max(), 2)
      << " mean=" << detail::format_fixed(series.mean(), 4)
      << " median=" << detail::format_fixed(series.median(), 4)
      << " stdev=" << detail::format_fixed(series.stdev(), 4)
      << " silverman_h=" << detail::format_fixed(silverman_bandwidth(series), 6) << "\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& config, std::ostream& out) {
  const FittedPipeline fitted = fit_stage(config);
  write_fit_outputs(config, fitted, prepare_output_dir(config), out);
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const FittedPipeline fitted = fit_stage(config);
  const fs::path dir = prepare_output_dir(config);
  write_fit_outputs(config, fitted, dir, out);

  const ScenarioSet set = simulate_stage(config, fitted);
  for (const Scenario& scenario : set.scenarios) {
    for (const SizedChain& sc : scenario.chains) {
      write_file(dir / samples_file_name(scenario.id, sc.size), samples_csv(sc.chain.states));
      write_file(dir / histogram_file_name(scenario.id, sc.size),
                 histogram_csv(chain_histogram(sc.chain.states, fitted.poly.support())));
    }
  }
  const ScenarioReport report = build_report(config, fitted, set);
  write_file(dir / "report.csv", report_csv(report));
  write_file(dir / "report_display.txt", report_display(report));
  out << "chains=" << set.chain_count() << " report=" << (dir / "report.csv").string() << "\n";
  return kExitOk;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const FittedPipeline fitted = fit_stage(config);
  const fs::path dir = prepare_output_dir(config);
  const ScenarioSet set = simulate_stage(config, fitted);
  const SupportInterval& support = fitted.poly.support();
  const BandQuery band = band_of(config);
  const BandQuery full{support.lo, support.hi};

  std::vector<Check> checks;
  bool full_band_ok = true;
  bool nested_ok = true;
  // Probability at each size, stored states preferred over regenerated ones.
  std::map<std::size_t, std::vector<double>> probabilities;

  for (const Scenario& scenario : set.scenarios) {
    for (const SizedChain& sc : scenario.chains) {
      const std::string tag =
          "s=" + std::to_string(scenario.id) + " n=" + std::to_string(sc.size);
      std::vector<double> states = sc.chain.states;
      const fs::path stored = dir / samples_file_name(scenario.id, sc.size);
      if (fs::exists(stored)) {
        std::vector<double> loaded;
        try {
          loaded = parse_samples_csv(read_input(stored.string(), "samples"));
        } catch (const std::exception& e) {
          throw StageError("validate", "corrupted samples file " + stored.string() + ": " +
                                           e.what());
        }
        checks.push_back({"reproducible " + tag, loaded == states,
                          stored.filename().string() + " vs regenerated chain"});
        states = std::move(loaded);
      }

      const double ks = ks_distance(states, [&](double x) { return fitted.poly.cdf(x); });
      const double ks_limit = 2.0 * 1.63 / std::sqrt(static_cast<double>(states.size()));
      checks.push_back({"ks " + tag, ks < ks_limit,
                        "D=" + detail::format_fixed(ks, 6) +
                            " limit=" + detail::format_fixed(ks_limit, 6)});

      const double rate = acceptance_rate(sc.chain);
      checks.push_back({"acceptance " + tag, rate >= 0.01 && rate <= 1.0,
                        "rate=" + detail::format_fixed(rate, 6) + " range=[0.01,1]"});

      const double p_band = band_probability(states, band);
      const double p_full = band_probability(states, full);
      full_band_ok = full_band_ok && p_full == 1.0;
      const BandQuery wider{band.lo - 0.1 * (band.hi - band.lo + 1.0),
                            band.hi + 0.1 * (band.hi - band.lo + 1.0)};
      nested_ok = nested_ok && p_band <= band_probability(states, wider) &&
                  band_probability(states, wider) <= p_full;
      probabilities[sc.size].push_back(p_band);
    }
  }
  checks.push_back({"band_full_support", full_band_ok, "P([lo_support, hi_support]) == 1"});
  checks.push_back({"band_nested", nested_ok, "P(band) <= P(wider band) <= P(support)"});

  // Monte Carlo error shrinks like 1/sqrt(n); the accepted ratio window is
  // [0.447, 2.236] x sqrt(n_max / n_min), i.e. [2, 10] for 500 vs 10,000.
  const std::size_t n_min = *std::min_element(config.sizes.begin(), config.sizes.end());
  const std::size_t n_max = *std::max_element(config.sizes.begin(), config.sizes.end());
  if (config.n_scenarios >= 2 && n_min != n_max) {
    auto stdev = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      return std::sqrt(ss / static_cast<double>(v.size() - 1));
    };
    const double sd_small = stdev(probabilities[n_min]);
    const double sd_large = stdev(probabilities[n_max]);
    const double ideal = std::sqrt(static_cast<double>(n_max) / static_cast<double>(n_min));
    const double lo = ideal * 2.0 / std::sqrt(20.0);
    const double hi = ideal * 10.0 / std::sqrt(20.0);
    const double ratio = sd_large > 0.0 ? sd_small / sd_large : INFINITY;
    checks.push_back({"mc_scaling", sd_small > sd_large && ratio >= lo && ratio <= hi,
                      "sd(n=" + std::to_string(n_min) + ")=" + detail::format_fixed(sd_small, 6) +
                          " sd(n=" + std::to_string(n_max) + ")=" +
                          detail::format_fixed(sd_large, 6) +
                          " ratio=" + detail::format_fixed(ratio, 4) + " window=[" +
                          detail::format_fixed(lo, 4) + "," + detail::format_fixed(hi, 4) + "]"});
  } else {
    checks.push_back({"mc_scaling", true, "skipped: needs >= 2 scenarios and 2 distinct sizes"});
  }

  std::string text;
  bool all_pass = true;
  for (const Check& c : checks) {
    all_pass = all_pass && c.pass;
    text += (c.pass ? "PASS " : "FAIL ") + c.name + " " + c.detail + "\n";
  }
  text += all_pass ? "RESULT PASS\n" : "RESULT FAIL\n";
  write_file(dir / "validation.txt", text);
  out << text;
  return all_pass ? kExitOk : kExitValidationFailed;
}

}  // namespace

PriceSeries ingest_stage(const RunConfig& config, std::vector<AuctionRecord>* records_out,
                         DeflatorTable* deflator_out) {
  try {
    std::vector<AuctionRecord> records = parse_auction_csv(read_input(config.input_path, "input"));
    DeflatorTable deflator = parse_deflator_csv(read_input(config.deflator_path, "deflator"));
    if (deflator.empty()) throw DataError("deflator table is empty");
    const int base_year = config.base_year.value_or(deflator.last_year());
    PriceSeries series = adjust_for_inflation(records, deflator, base_year);
    if (records_out) *records_out = std::move(records);
    if (deflator_out) *deflator_out = std::move(deflator);
    return series;
  } catch (const ParseError& e) {
    throw StageError("ingest", e.what());
  } catch (const DataError& e) {
    throw StageError("ingest", e.what());
  }
}

FittedPipeline fit_stage(const RunConfig& config) {
  std::vector<AuctionRecord> records;
  DeflatorTable deflator;
  PriceSeries series = ingest_stage(config, &records, &deflator);
  try {
    const double h = config.bandwidth.value_or(silverman_bandwidth(series));
    KdeModel kde(std::vector<double>(series.prices().begin(), series.prices().end()), h,
                 config.kernel);
    PolyDensity poly = fit_polynomial(kde, config.degree, config.fit_grid);
    return {std::move(records), std::move(deflator), std::move(series), std::move(kde),
            std::move(poly)};
  } catch (const std::exception& e) {
    throw StageError("fit", e.what());
  }
}

ScenarioSet simulate_stage(const RunConfig& config, const FittedPipeline& fitted) {
  ScenarioOptions options;
  options.n_scenarios = config.n_scenarios;
  options.sizes = config.sizes;
  options.burn_in = config.burn_in;
  options.init = InitMode::data_median;
  options.data_median = fitted.series.median();
  const PolyDensity& poly = fitted.poly;
  try {
    return run_scenarios([&poly](double x) { return poly.target(x); }, poly.support(),
                         config.base_seed, options);
  } catch (const std::exception& e) {
    throw StageError("simulate", e.what());
  }
}

std::string samples_file_name(int scenario, std::size_t size) {
  return "samples_s" + std::to_string(scenario) + "_n" + std::to_string(size) + ".csv";
}

std::string histogram_file_name(int scenario, std::size_t size) {
  return "histogram_s" + std::to_string(scenario) + "_n" + std::to_string(size) + ".csv";
}

std::string samples_csv(std::span<const double> states) {
  std::string out = "price\n";
  for (double x : states) {
    out += detail::format_shortest(x);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_samples_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines.front() != "price") {
    throw ParseError("missing or wrong header at line 1 (expected 'price')", 1);
  }
  std::vector<double> states;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (detail::trim(lines[i]).empty()) continue;
    auto v = detail::parse_double(lines[i]);
    if (!v) throw ParseError("non-numeric price at line " + std::to_string(i + 1), i + 1);
    states.push_back(*v);
  }
  if (states.empty()) throw ParseError("samples file has no rows", 0);
  return states;
}

Histogram chain_histogram(std::span<const double> states, const SupportInterval& support) {
  auto [mn, mx] = std::minmax_element(states.begin(), states.end());
  if (*mn < *mx) return build_histogram(states, freedman_diaconis_bins(states));
  return build_histogram(states, uniform_grid(support, 11));
}

namespace {

std::string flag_help(std::string_view key) {
  static const std::map<std::string_view, std::string_view> help = {
      {"input", "auction CSV (year,price_brl_mwh,auction_id)"},
      {"deflator", "deflator CSV (year,factor)"},
      {"base-year", "year prices are expressed in (default: latest deflator year)"},
      {"kernel", "gaussian | epanechnikov"},
      {"bandwidth", "KDE bandwidth or 'auto' for Silverman's rule"},
      {"degree", "polynomial degree (default 17)"},
      {"fit-grid", "least-squares grid points (default 512)"},
      {"scenarios", "number of independent scenarios (default 10)"},
      {"sizes", "comma-separated chain lengths (default 500,1000,5000,10000)"},
      {"burn-in", "discarded steps per chain (default 1000)"},
      {"seed", "base seed (default 42)"},
      {"band", "price band LO:HI, both ends inclusive (default 110:140)"},
      {"out", "output directory (default out)"},
  };
  return std::string(help.at(key));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-efficiency auction price simulation (KDE + polynomial + MCMC)",
               "eeauction"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::string config_path;
  struct Command {
    CLI::App* app;
    std::vector<std::pair<std::string, CLI::Option*>> options;
  };
  std::vector<Command> commands;

  auto add_command = [&](const std::string& name, const std::string& help) {
    Command cmd{app.add_subcommand(name, help), {}};
    cmd.app->add_option("--config", config_path, "key=value config file");
    for (std::string_view key : kConfigKeys) {
      const std::string k(key);
      cmd.options.emplace_back(k, cmd.app->add_option("--" + k, values[k], flag_help(key)));
    }
    commands.push_back(std::move(cmd));
  };
  add_command("ingest", "parse and deflate prices, print series statistics");
  add_command("fit", "estimate the KDE, fit the polynomial, write density.csv");
  add_command("simulate", "run all scenario chains, write samples, histograms and report");
  add_command("validate", "check chains against the target and write validation.txt");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitError;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      apply_config_text(config, read_input(config_path, "config"));
    }
    const Command* chosen = nullptr;
    for (const Command& cmd : commands) {
      if (cmd.app->parsed()) chosen = &cmd;
    }
    for (const auto& [key, option] : chosen->options) {
      if (option->count() > 0) apply_setting(config, key, values[key]);
    }

    const std::string name = chosen->app->get_name();
    if (name == "ingest") return cmd_ingest(config, out);
    if (name == "fit") return cmd_fit(config, out);
    if (name == "simulate") return cmd_simulate(config, out);
    return cmd_validate(config, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace eeauction
