#include "eeauction/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "text_util.hpp"

namespace eeauction {

void BandQuery::validate() const {
  if (!(lo <= hi)) throw std::invalid_argument("band requires lo <= hi");
}

double band_probability(std::span<const double> states, const BandQuery& band) {
  if (states.empty()) throw std::invalid_argument("band probability of an empty chain");
  const auto inside = std::count_if(states.begin(), states.end(),
                                    [&](double x) { return band.contains(x); });
  return static_cast<double>(inside) / static_cast<double>(states.size());
}

double band_probability(const Chain& chain, const BandQuery& band) {
  return band_probability(chain.states, band);
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

Histogram build_histogram(std::span<const double> samples, std::vector<double> edges) {
  if (edges.size() < 2) throw std::invalid_argument("histogram needs at least 2 edges");
  if (!std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw std::invalid_argument("histogram edges must be strictly ascending");
  }
  Histogram h;
  h.edges = std::move(edges);
  const std::size_t bins = h.edges.size() - 1;
  h.counts.assign(bins, 0);

  for (double x : samples) {
    if (x < h.edges.front() || x > h.edges.back()) continue;
    // First edge strictly greater than x closes the bin; x == last edge
    // lands in the last bin.
    auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
    std::size_t bin = static_cast<std::size_t>(it - h.edges.begin());
    bin = bin == 0 ? 0 : std::min(bin - 1, bins - 1);
    ++h.counts[bin];
  }

  const double total = static_cast<double>(h.total());
  h.density.assign(bins, 0.0);
  if (total > 0.0) {
    for (std::size_t b = 0; b < bins; ++b) {
      h.density[b] = static_cast<double>(h.counts[b]) / (total * (h.edges[b + 1] - h.edges[b]));
    }
  }
  return h;
}

Histogram build_histogram(std::span<const double> samples, int n_bins) {
  if (samples.empty()) throw std::invalid_argument("histogram of an empty sample");
  if (n_bins < 1) throw std::invalid_argument("histogram needs n_bins >= 1");
  auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (!(*mn < *mx)) throw std::invalid_argument("degenerate range: all samples equal");

  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  const double width = (*mx - *mn) / n_bins;
  for (int b = 0; b <= n_bins; ++b) edges[b] = *mn + width * b;
  edges.back() = *mx;
  return build_histogram(samples, std::move(edges));
}

int freedman_diaconis_bins(std::span<const double> samples) {
  constexpr int kMinBins = 10;
  if (samples.size() < 2) return kMinBins;
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lower = static_cast<std::size_t>(std::floor(pos));
    const std::size_t upper = std::min(lower + 1, sorted.size() - 1);
    return sorted[lower] + (pos - static_cast<double>(lower)) * (sorted[upper] - sorted[lower]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  const double range = sorted.back() - sorted.front();
  if (!(iqr > 0.0) || !(range > 0.0)) return kMinBins;
  const double width = 2.0 * iqr * std::cbrt(1.0 / static_cast<double>(sorted.size()));
  const double bins = std::ceil(range / width);
  return std::max(kMinBins, static_cast<int>(std::min(bins, 1e6)));
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("KS distance of an empty sample");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, std::abs(above), std::abs(below)});
  }
  return d;
}

ScenarioReport summarize(const ScenarioSet& set, const BandQuery& band) {
  band.validate();
  if (set.scenarios.empty()) throw std::invalid_argument("empty scenario set");
  ScenarioReport report;
  report.metadata.base_seed = set.base_seed;
  report.metadata.band = band;
  report.metadata.burn_in = set.burn_in;
  for (const Scenario& scenario : set.scenarios) {
    for (const SizedChain& sc : scenario.chains) {
      report.rows.push_back({scenario.id, sc.size, band_probability(sc.chain, band)});
    }
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return a.scenario != b.scenario ? a.scenario < b.scenario : a.size < b.size;
  });
  return report;
}

std::string format_percent(double probability) {
  // Hundredths of a percent; the epsilon absorbs binary representation
  // error so exact ties round up.
  const auto hundredths = static_cast<long long>(std::floor(probability * 10000.0 + 0.5 + 1e-9));
  const long long whole = hundredths / 100;
  const long long frac = std::abs(hundredths % 100);
  std::string out = std::to_string(whole) + '.';
  if (frac < 10) out += '0';
  out += std::to_string(frac);
  out += '%';
  return out;
}

Spread spread_statistics(const ScenarioReport& report, std::size_t size) {
  std::vector<double> values;
  for (const ReportRow& row : report.rows) {
    if (row.size == size) values.push_back(row.probability);
  }
  if (values.size() < 2) {
    throw std::invalid_argument("spread needs at least 2 scenarios at size " +
                                std::to_string(size));
  }
  Spread s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

std::string report_csv(const ScenarioReport& report) {
  std::string out = "scenario,size,probability\n";
  for (const ReportRow& row : report.rows) {
    out += std::to_string(row.scenario);
    out += ',';
    out += std::to_string(row.size);
    out += ',';
    out += detail::format_fixed(row.probability, 6);
    out += '\n';
  }
  return out;
}

std::string report_display(const ScenarioReport& report) {
  const ReportMetadata& m = report.metadata;
  std::string out;
  out += "# band: [" + detail::format_fixed(m.band.lo, 2) + ", " +
         detail::format_fixed(m.band.hi, 2) + "] BRL/MWh, both ends inclusive\n";
  out += "# base_seed: " + std::to_string(m.base_seed) + "\n";
  out += "# burn_in: " + std::to_string(m.burn_in) + "\n";
  out += "# degree: " + std::to_string(m.degree) + "\n";
  out += "# bandwidth: " + detail::format_fixed(m.bandwidth, 6) + "\n";
  out += "# generator: " + std::string(kGeneratorFamily) + "\n";

  int current = 0;
  for (const ReportRow& row : report.rows) {
    if (row.scenario != current) {
      current = row.scenario;
      out += "\nProbability in the Scenario " + std::to_string(current) + "\n";
      out += "Size of sample\tProbability\n";
    }
    out += std::to_string(row.size) + '\t' + format_percent(row.probability) + '\n';
  }
  return out;
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin_lo,bin_hi,count,density\n";
  for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
    out += detail::format_fixed(histogram.edges[b], 6);
    out += ',';
    out += detail::format_fixed(histogram.edges[b + 1], 6);
    out += ',';
    out += std::to_string(histogram.counts[b]);
    out += ',';
    out += detail::format_fixed(histogram.density[b], 10);
    out += '\n';
  }
  return out;
}

}  // namespace eeauction
