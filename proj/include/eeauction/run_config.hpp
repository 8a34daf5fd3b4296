#pragma once

// Pipeline settings shared by every subcommand.
//
// Config files are flat `key=value` text, one pair per line; `#` starts a
// comment. Keys are the long flag names without the leading dashes, and
// flags override the file, which overrides the defaults below.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eeauction/density.hpp"
#include "eeauction/sampler.hpp"

namespace eeauction {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 13> kConfigKeys = {
    "input",     "deflator", "base-year", "kernel",  "bandwidth", "degree", "fit-grid",
    "scenarios", "sizes",    "burn-in",   "seed",    "band",      "out"};

struct RunConfig {
  std::string input_path;
  std::string deflator_path;
  std::optional<int> base_year;    // unset: latest year in the deflator table
  KernelKind kernel = KernelKind::gaussian;
  std::optional<double> bandwidth;  // unset: Silverman's rule
  int degree = 17;
  int fit_grid = 512;
  int n_scenarios = 10;
  std::vector<std::size_t> sizes{500, 1000, 5000, 10000};
  std::size_t burn_in = 1000;
  std::uint64_t base_seed = 42;
  double band_lo = 110.0;
  double band_hi = 140.0;
  std::string output_dir = "out";
};

/// Applies one setting. Throws ConfigError on an unknown key or bad value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Applies every `key=value` line of a config file body.
void apply_config_text(RunConfig& config, std::string_view text);

}  // namespace eeauction
