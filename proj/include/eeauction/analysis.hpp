#pragma once

// Band probabilities, histograms, the KS diagnostic and the per-scenario
// probability report.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "eeauction/sampler.hpp"

namespace eeauction {

/// Closed price band [lo, hi] in BRL/MWh.
struct BandQuery {
  double lo = 110.0;
  double hi = 140.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  /// Throws std::invalid_argument unless lo <= hi.
  void validate() const;
};

double band_probability(std::span<const double> states, const BandQuery& band);
/// Fraction of the chain's states inside the band; throws on an empty chain.
double band_probability(const Chain& chain, const BandQuery& band);

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::vector<double> density;  // counts / (total * width)

  std::size_t total() const;
};

/// Uniform bins over [min, max] of the samples. Bins are [lo, hi) except the
/// last, which is closed. Throws on empty input, n_bins < 1 or min == max
/// ("degenerate range").
Histogram build_histogram(std::span<const double> samples, int n_bins);
/// Binning on caller-provided ascending edges; samples outside are dropped.
Histogram build_histogram(std::span<const double> samples, std::vector<double> edges);

/// Freedman-Diaconis bin count, never below 10.
int freedman_diaconis_bins(std::span<const double> samples);

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and
/// `cdf`: max over sorted x_(i) of max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n),
/// in absolute value.
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

struct ReportRow {
  int scenario;
  std::size_t size;
  double probability;
};

struct ReportMetadata {
  std::uint64_t base_seed = 0;
  BandQuery band;
  std::size_t burn_in = 0;
  int degree = 0;
  double bandwidth = 0.0;
};

struct ScenarioReport {
  ReportMetadata metadata;
  std::vector<ReportRow> rows;  // ordered by (scenario, size)
};

/// One row per (scenario, size). Degree and bandwidth in the metadata are
/// left for the caller to fill in.
ScenarioReport summarize(const ScenarioSet& set, const BandQuery& band);

/// Two-decimal percent with half-up rounding: 0.3086 -> "30.86%".
std::string format_percent(double probability);

struct Spread {
  double min = 0.0;
  double max = 0.0;
  double stdev = 0.0;  // sample (n - 1)
};

/// Spread of the probability column at one sample size; needs >= 2 rows.
Spread spread_statistics(const ScenarioReport& report, std::size_t size);

/// `report.csv`: header `scenario,size,probability`, 6 decimals.
std::string report_csv(const ScenarioReport& report);
/// Human-readable tables, one per scenario, with two-decimal percents.
std::string report_display(const ScenarioReport& report);
/// `histogram.csv`: header `bin_lo,bin_hi,count,density`.
std::string histogram_csv(const Histogram& histogram);

}  // namespace eeauction
