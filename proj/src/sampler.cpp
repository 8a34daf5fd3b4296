#include "eeauction/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <string>
#include <thread>

#include "eeauction/ingest.hpp"

namespace eeauction {

namespace {

constexpr int kProbePoints = 64;

// Transition with the current target value carried along, so a chain
// evaluates the target once per step.
StepResult step_from(double current, double current_density, const DensityFn& target,
                     const SupportInterval& support, Rng& rng, double& next_density) {
  const double proposal = support.lo + support.width() * rng.uniform01();
  const double u = rng.uniform01();
  const double proposal_density = target(proposal);

  bool accept = false;
  if (current_density <= kZeroDensityFloor) {
    accept = proposal_density > 0.0;
  } else {
    const double alpha = std::min(1.0, proposal_density / current_density);
    accept = u < alpha;
  }
  if (accept) {
    next_density = proposal_density;
    return {proposal, true};
  }
  next_density = current_density;
  return {current, false};
}

std::vector<double> probe_grid(const SupportInterval& support) {
  return uniform_grid(support, kProbePoints);
}

}  // namespace

StepResult mh_step(double current, const DensityFn& target, SupportInterval support, Rng& rng) {
  double unused = 0.0;
  return step_from(current, target(current), target, support, rng, unused);
}

std::string_view to_string(InitMode mode) {
  return mode == InitMode::data_median ? "data_median" : "uniform_draw";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "data_median") return InitMode::data_median;
  if (name == "uniform_draw") return InitMode::uniform_draw;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

void ChainConfig::validate() const {
  if (n_samples == 0) throw std::invalid_argument("chain needs n_samples >= 1");
}

Chain run_chain(const DensityFn& target, SupportInterval support, const ChainConfig& config) {
  config.validate();

  const std::vector<double> probe = probe_grid(support);
  auto first_positive = std::find_if(probe.begin(), probe.end(),
                                     [&](double x) { return target(x) > 0.0; });
  if (first_positive == probe.end()) {
    throw DataError("target density is zero on every probe point of the support");
  }

  Rng rng(config.seed);
  double current = 0.0;
  if (config.init == InitMode::uniform_draw) {
    current = support.lo + support.width() * rng.uniform01();
  } else {
    current = config.data_median.value_or(0.5 * (support.lo + support.hi));
    current = std::clamp(current, support.lo, support.hi);
  }
  double density = target(current);
  if (!(density > 0.0)) {
    current = *first_positive;
    density = target(current);
  }

  Chain chain;
  chain.seed = config.seed;
  chain.total_steps = config.burn_in + config.n_samples;
  chain.states.reserve(config.n_samples);
  for (std::size_t step = 0; step < chain.total_steps; ++step) {
    const StepResult r = step_from(current, density, target, support, rng, density);
    current = r.next;
    if (r.accepted) ++chain.accepted;
    if (step >= config.burn_in) chain.states.push_back(current);
  }
  return chain;
}

double acceptance_rate(const Chain& chain) {
  if (chain.total_steps == 0) throw std::invalid_argument("chain has no steps");
  return static_cast<double>(chain.accepted) / static_cast<double>(chain.total_steps);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a ^ (b * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t scenario,
                          std::uint64_t size_index) {
  return mix_seed(mix_seed(base_seed, scenario), size_index);
}

std::size_t ScenarioSet::chain_count() const {
  std::size_t n = 0;
  for (const Scenario& s : scenarios) n += s.chains.size();
  return n;
}

ScenarioSet run_scenarios(const DensityFn& target, SupportInterval support,
                          std::uint64_t base_seed, const ScenarioOptions& options) {
  if (options.n_scenarios < 1) throw std::invalid_argument("need at least one scenario");
  if (options.sizes.empty()) throw std::invalid_argument("need at least one sample size");
  if (std::set<std::size_t>(options.sizes.begin(), options.sizes.end()).size() !=
      options.sizes.size()) {
    throw std::invalid_argument("sample sizes must be distinct");
  }

  const std::size_t n_sizes = options.sizes.size();
  const std::size_t jobs = static_cast<std::size_t>(options.n_scenarios) * n_sizes;

  ScenarioSet set;
  set.base_seed = base_seed;
  set.burn_in = options.burn_in;
  set.scenarios.resize(static_cast<std::size_t>(options.n_scenarios));
  for (int s = 0; s < options.n_scenarios; ++s) {
    set.scenarios[s].id = s + 1;
    set.scenarios[s].chains.resize(n_sizes);
  }

  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next_job{0};
  auto worker = [&] {
    for (std::size_t job = next_job++; job < jobs; job = next_job++) {
      const std::size_t s = job / n_sizes;
      const std::size_t k = job % n_sizes;
      ChainConfig config;
      config.n_samples = options.sizes[k];
      config.burn_in = options.burn_in;
      config.seed = derive_seed(base_seed, s + 1, k);
      config.init = options.init;
      config.data_median = options.data_median;
      try {
        set.scenarios[s].chains[k] = {options.sizes[k], run_chain(target, support, config)};
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t job = 0; job < jobs; ++job) {
    if (!errors[job]) continue;
    const std::string where = "scenario " + std::to_string(job / n_sizes + 1) + ", size " +
                              std::to_string(options.sizes[job % n_sizes]);
    try {
      std::rethrow_exception(errors[job]);
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return set;
}

}  // namespace eeauction
