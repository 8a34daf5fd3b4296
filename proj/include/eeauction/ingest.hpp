#pragma once

// Auction price ingestion: CSV parsing of auction records and deflator
// tables, and conversion of nominal prices into a real (base-year) series.
//
// CSV dialect for both files: comma separator, '.' decimal point, no
// quoting, mandatory header. Blank lines are ignored; a leading UTF-8 BOM
// and trailing '\r' are tolerated.

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eeauction {

/// Malformed CSV input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input data that parses but violates a domain invariant.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kAuctionHeader = "year,price_brl_mwh,auction_id";
inline constexpr std::string_view kDeflatorHeader = "year,factor";

inline constexpr int kMinYear = 1990;
inline constexpr int kMaxYear = 2100;

struct AuctionRecord {
  int year = 0;
  double price_nominal = 0.0;  // BRL/MWh
  std::string auction_id;

  bool operator==(const AuctionRecord&) const = default;
};

/// Year -> multiplier into a common price index.
class DeflatorTable {
 public:
  DeflatorTable() = default;

  /// Throws DataError on a duplicate year or a non-positive factor.
  void insert(int year, double factor);

  bool contains(int year) const { return factors_.contains(year); }
  /// Throws DataError naming the year when absent.
  double factor(int year) const;
  std::size_t size() const { return factors_.size(); }
  bool empty() const { return factors_.empty(); }
  int first_year() const;
  int last_year() const;
  const std::map<int, double>& entries() const { return factors_; }

 private:
  std::map<int, double> factors_;
};

/// Real prices in base-year currency. At least two strictly positive
/// observations with min < max; anything else is rejected on construction.
class PriceSeries {
 public:
  PriceSeries(std::vector<double> prices, int base_year);

  std::span<const double> prices() const { return prices_; }
  int base_year() const { return base_year_; }
  std::size_t size() const { return prices_.size(); }

  double min() const;
  double max() const;
  double mean() const;
  double median() const;
  /// Sample standard deviation (n - 1 denominator).
  double stdev() const;

 private:
  std::vector<double> prices_;
  int base_year_;
};

std::vector<AuctionRecord> parse_auction_csv(std::string_view text);
DeflatorTable parse_deflator_csv(std::string_view text);

/// price_real = price_nominal * factor(year) / factor(base_year), order kept.
PriceSeries adjust_for_inflation(std::span<const AuctionRecord> records,
                                 const DeflatorTable& table, int base_year);

/// Canonical serialization: header line, then one row per record with the
/// price printed at two decimals.
std::string write_auction_csv(std::span<const AuctionRecord> records);

std::string read_text_file(const std::string& path);

}  // namespace eeauction
