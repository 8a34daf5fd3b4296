#include "eeauction/run_config.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace eeauction {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + ": " +
                    std::string(why));
}

long long positive_int(std::string_view key, std::string_view value) {
  auto v = detail::parse_int(value);
  if (!v) bad_value(key, value, "not an integer");
  if (*v < 1) bad_value(key, value, "must be >= 1");
  return *v;
}

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view raw) {
  const std::string_view value = detail::trim(raw);
  if (key == "input") {
    config.input_path = std::string(value);
  } else if (key == "deflator") {
    config.deflator_path = std::string(value);
  } else if (key == "base-year") {
    auto v = detail::parse_int(value);
    if (!v) bad_value(key, value, "not an integer");
    config.base_year = static_cast<int>(*v);
  } else if (key == "kernel") {
    try {
      config.kernel = parse_kernel_kind(value);
    } catch (const std::invalid_argument& e) {
      bad_value(key, value, "expected gaussian or epanechnikov");
    }
  } else if (key == "bandwidth") {
    if (value == "auto") {
      config.bandwidth.reset();
      return;
    }
    auto v = detail::parse_double(value);
    if (!v || !(*v > 0.0)) bad_value(key, value, "expected 'auto' or a positive number");
    config.bandwidth = *v;
  } else if (key == "degree") {
    auto v = detail::parse_int(value);
    if (!v || *v < 0) bad_value(key, value, "expected a nonnegative integer");
    config.degree = static_cast<int>(*v);
  } else if (key == "fit-grid") {
    config.fit_grid = static_cast<int>(positive_int(key, value));
  } else if (key == "scenarios") {
    config.n_scenarios = static_cast<int>(positive_int(key, value));
  } else if (key == "sizes") {
    std::vector<std::size_t> sizes;
    for (std::string_view item : detail::split(value, ',')) {
      sizes.push_back(static_cast<std::size_t>(positive_int(key, item)));
    }
    config.sizes = std::move(sizes);
  } else if (key == "burn-in") {
    auto v = detail::parse_int(value);
    if (!v || *v < 0) bad_value(key, value, "expected a nonnegative integer");
    config.burn_in = static_cast<std::size_t>(*v);
  } else if (key == "seed") {
    auto v = detail::parse_uint64(value);
    if (!v) bad_value(key, value, "expected an unsigned 64-bit integer");
    config.base_seed = *v;
  } else if (key == "band") {
    const auto parts = detail::split(value, ':');
    if (parts.size() != 2) bad_value(key, value, "expected LO:HI");
    auto lo = detail::parse_double(parts[0]);
    auto hi = detail::parse_double(parts[1]);
    if (!lo || !hi || !(*lo <= *hi)) bad_value(key, value, "expected LO:HI with LO <= HI");
    config.band_lo = *lo;
    config.band_hi = *hi;
  } else if (key == "out") {
    config.output_dir = std::string(value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = detail::trim(line.substr(0, eq));
    try {
      apply_setting(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace eeauction
