#pragma once

// Metropolis-Hastings independence sampler with a Uniform(lo, hi) proposal,
// and the scenario runner that replicates chains over sample sizes.
//
// Draw discipline: every step consumes exactly two uniforms from the chain's
// generator, the proposal first and the acceptance draw second, even when
// the acceptance probability is 1. The generator is std::mt19937_64 and a
// uniform is (next() >> 11) * 2^-53, so chains are reproducible bit for bit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "eeauction/density.hpp"

namespace eeauction {

inline constexpr std::string_view kGeneratorFamily = "mt19937_64";

/// Target densities at or below this are treated as zero in the ratio.
inline constexpr double kZeroDensityFloor = 1e-300;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits; one engine output per call.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct StepResult {
  double next;
  bool accepted;
};

/// One independence-sampler transition from `current`.
StepResult mh_step(double current, const DensityFn& target, SupportInterval support, Rng& rng);

enum class InitMode { data_median, uniform_draw };

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct ChainConfig {
  std::size_t n_samples = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 42;
  InitMode init = InitMode::data_median;
  /// Starting point for InitMode::data_median; the support midpoint is used
  /// when unset.
  std::optional<double> data_median;

  /// Throws std::invalid_argument when n_samples == 0.
  void validate() const;
};

struct Chain {
  std::vector<double> states;  // post-burn-in, length n_samples
  std::size_t accepted = 0;    // over all steps, burn-in included
  std::size_t total_steps = 0;
  std::uint64_t seed = 0;
};

/// Runs burn_in + n_samples steps and keeps the last n_samples states.
///
/// Throws DataError when the target is zero on a 64-point probe grid over
/// the support. A starting point with zero target is replaced by the first
/// probe point with positive target. InitMode::uniform_draw consumes one
/// extra uniform before the first step.
Chain run_chain(const DensityFn& target, SupportInterval support, const ChainConfig& config);

/// accepted / total_steps.
double acceptance_rate(const Chain& chain);

/// SplitMix64 finalizer applied to a ^ (b * 0x9E3779B97F4A7C15).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// mix(mix(base_seed, scenario), size_index).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t scenario,
                          std::uint64_t size_index);

struct ScenarioOptions {
  int n_scenarios = 10;
  std::vector<std::size_t> sizes{500, 1000, 5000, 10000};
  std::size_t burn_in = 1000;
  InitMode init = InitMode::data_median;
  std::optional<double> data_median;
  /// 0 picks std::thread::hardware_concurrency(). Results do not depend on it.
  unsigned threads = 0;
};

struct SizedChain {
  std::size_t size;
  Chain chain;
};

struct Scenario {
  int id;                           // 1-based
  std::vector<SizedChain> chains;  // in the order of ScenarioOptions::sizes
};

struct ScenarioSet {
  std::uint64_t base_seed = 0;
  std::size_t burn_in = 0;
  std::vector<Scenario> scenarios;

  std::size_t chain_count() const;
};

/// One chain per (scenario, size). Chain (s, k) is seeded with
/// derive_seed(base_seed, s, k), with k the position of the size in
/// `options.sizes`. Errors from a chain are rethrown as DataError naming the
/// scenario and size.
ScenarioSet run_scenarios(const DensityFn& target, SupportInterval support,
                          std::uint64_t base_seed, const ScenarioOptions& options);

}  // namespace eeauction
