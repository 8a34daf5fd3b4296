#include "eeauction/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "text_util.hpp"

namespace eeauction {

namespace {

struct CsvLine {
  std::size_t number;  // 1-based
  std::vector<std::string_view> fields;
};

// Splits the body into lines, checks the header and drops blank lines.
std::vector<CsvLine> split_csv(std::string_view text, std::string_view header) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<CsvLine> rows;
  std::size_t line_no = 0;
  bool saw_header = false;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (!saw_header) {
      if (line != header) {
        throw ParseError("missing or wrong header at line 1 (expected '" +
                             std::string(header) + "')",
                         1);
      }
      saw_header = true;
      continue;
    }
    if (detail::trim(line).empty()) continue;
    rows.push_back({line_no, detail::split(line, ',')});
  }
  if (!saw_header) {
    throw ParseError("missing or wrong header at line 1 (expected '" +
                         std::string(header) + "')",
                     1);
  }
  return rows;
}

int parse_year(std::string_view field, std::size_t line_no) {
  auto year = detail::parse_int(field);
  if (!year) {
    throw ParseError("non-numeric year at line " + std::to_string(line_no), line_no);
  }
  if (*year < kMinYear || *year > kMaxYear) {
    throw ParseError("year " + std::to_string(*year) + " out of range at line " +
                         std::to_string(line_no),
                     line_no);
  }
  return static_cast<int>(*year);
}

void check_field_count(const CsvLine& row, std::size_t expected) {
  if (row.fields.size() != expected) {
    throw ParseError("wrong field count at line " + std::to_string(row.number) +
                         " (expected " + std::to_string(expected) + ", got " +
                         std::to_string(row.fields.size()) + ")",
                     row.number);
  }
}

}  // namespace

void DeflatorTable::insert(int year, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw DataError("non-positive factor for year " + std::to_string(year));
  }
  if (!factors_.emplace(year, factor).second) {
    throw DataError("duplicate year " + std::to_string(year));
  }
}

double DeflatorTable::factor(int year) const {
  auto it = factors_.find(year);
  if (it == factors_.end()) {
    throw DataError("year " + std::to_string(year) + " missing from deflator table");
  }
  return it->second;
}

int DeflatorTable::first_year() const {
  if (factors_.empty()) throw DataError("empty deflator table");
  return factors_.begin()->first;
}

int DeflatorTable::last_year() const {
  if (factors_.empty()) throw DataError("empty deflator table");
  return factors_.rbegin()->first;
}

PriceSeries::PriceSeries(std::vector<double> prices, int base_year)
    : prices_(std::move(prices)), base_year_(base_year) {
  if (prices_.size() < 2) {
    throw DataError("price series needs at least 2 observations, got " +
                    std::to_string(prices_.size()));
  }
  for (double p : prices_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw DataError("price series contains a non-positive price");
    }
  }
  if (!(min() < max())) {
    throw DataError("price series is constant (min == max)");
  }
}

double PriceSeries::min() const { return *std::min_element(prices_.begin(), prices_.end()); }
double PriceSeries::max() const { return *std::max_element(prices_.begin(), prices_.end()); }

double PriceSeries::mean() const {
  return std::accumulate(prices_.begin(), prices_.end(), 0.0) /
         static_cast<double>(prices_.size());
}

double PriceSeries::median() const {
  std::vector<double> sorted(prices_);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double PriceSeries::stdev() const {
  const double m = mean();
  double ss = 0.0;
  for (double p : prices_) ss += (p - m) * (p - m);
  return std::sqrt(ss / static_cast<double>(prices_.size() - 1));
}

std::vector<AuctionRecord> parse_auction_csv(std::string_view text) {
  std::vector<AuctionRecord> records;
  for (const CsvLine& row : split_csv(text, kAuctionHeader)) {
    check_field_count(row, 3);
    AuctionRecord rec;
    rec.year = parse_year(row.fields[0], row.number);
    auto price = detail::parse_double(row.fields[1]);
    if (!price) {
      throw ParseError("non-numeric price at line " + std::to_string(row.number),
                       row.number);
    }
    if (!(*price > 0.0)) {
      throw ParseError("non-positive price at line " + std::to_string(row.number),
                       row.number);
    }
    rec.price_nominal = *price;
    rec.auction_id = std::string(row.fields[2]);
    records.push_back(std::move(rec));
  }
  return records;
}

DeflatorTable parse_deflator_csv(std::string_view text) {
  DeflatorTable table;
  for (const CsvLine& row : split_csv(text, kDeflatorHeader)) {
    check_field_count(row, 2);
    const int year = parse_year(row.fields[0], row.number);
    auto factor = detail::parse_double(row.fields[1]);
    if (!factor) {
      throw ParseError("non-numeric factor at line " + std::to_string(row.number),
                       row.number);
    }
    if (!(*factor > 0.0)) {
      throw ParseError("non-positive factor at line " + std::to_string(row.number),
                       row.number);
    }
    if (table.contains(year)) {
      throw ParseError("duplicate year " + std::to_string(year) + " at line " +
                           std::to_string(row.number),
                       row.number);
    }
    table.insert(year, *factor);
  }
  return table;
}

PriceSeries adjust_for_inflation(std::span<const AuctionRecord> records,
                                 const DeflatorTable& table, int base_year) {
  if (records.empty()) throw DataError("no auction records to adjust");
  const double base = table.factor(base_year);
  std::vector<double> real;
  real.reserve(records.size());
  for (const AuctionRecord& rec : records) {
    real.push_back(rec.price_nominal * table.factor(rec.year) / base);
  }
  return PriceSeries(std::move(real), base_year);
}

std::string write_auction_csv(std::span<const AuctionRecord> records) {
  std::string out(kAuctionHeader);
  out += '\n';
  for (const AuctionRecord& rec : records) {
    out += std::to_string(rec.year);
    out += ',';
    out += detail::format_fixed(rec.price_nominal, 2);
    out += ',';
    out += rec.auction_id;
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace eeauction
