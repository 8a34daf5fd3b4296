#pragma once

// End-to-end pipeline and the `eeauction` command line.
//
// Exit codes: 0 success, 1 operational error, 2 validation failure.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eeauction/analysis.hpp"
#include "eeauction/density.hpp"
#include "eeauction/ingest.hpp"
#include "eeauction/run_config.hpp"
#include "eeauction/sampler.hpp"

namespace eeauction {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidationFailed = 2;

/// Ingest and fit stages, in order.
struct FittedPipeline {
  std::vector<AuctionRecord> records;
  DeflatorTable deflator;
  PriceSeries series;
  KdeModel kde;
  PolyDensity poly;
};

/// Reads both input files and adjusts prices. Errors are prefixed "ingest:".
PriceSeries ingest_stage(const RunConfig& config, std::vector<AuctionRecord>* records = nullptr,
                         DeflatorTable* deflator = nullptr);

/// Ingest + KDE + polynomial fit. Errors are prefixed with the stage name.
FittedPipeline fit_stage(const RunConfig& config);

/// Runs all (scenario, size) chains on the fitted target.
ScenarioSet simulate_stage(const RunConfig& config, const FittedPipeline& fitted);

std::string samples_file_name(int scenario, std::size_t size);
std::string histogram_file_name(int scenario, std::size_t size);

/// Single-column `price` file body, values printed to round-trip exactly.
std::string samples_csv(std::span<const double> states);
/// Parses a samples file; throws ParseError on malformed content.
std::vector<double> parse_samples_csv(std::string_view text);

/// Histogram of a chain with Freedman-Diaconis bins; falls back to ten bins
/// over `support` when all states coincide.
Histogram chain_histogram(std::span<const double> states, const SupportInterval& support);

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eeauction
