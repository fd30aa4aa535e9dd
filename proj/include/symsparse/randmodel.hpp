#pragma once

// Random sparse functions and the Monte Carlo engine.
//
// A sample draws, for k = 1..K in turn, a uniform permutation σ_k and then its
// value: uniform on [a, b] (continuous model, float mode) or uniform on
// {1..T} (integer model, exact mode). Every trial seeds its own generator
// from the sweep seed and its grid coordinates, so results do not depend on
// how trials are spread over worker threads.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "symsparse/condition1.hpp"
#include "symsparse/oracle.hpp"
#include "symsparse/random.hpp"
#include "symsparse/schedule.hpp"
#include "symsparse/sparsest_fit.hpp"

namespace symsparse {

struct ContinuousValues {
  double a = 1.0;
  double b = 2.0;
};

struct IntegerValues {
  std::uint64_t T = 1000;
};

using ValueModel = std::variant<ContinuousValues, IntegerValues>;

inline ValueMode value_mode_of(const ValueModel& model) {
  return std::holds_alternative<ContinuousValues>(model) ? ValueMode::floating : ValueMode::exact;
}

struct RandomModelSpec {
  std::uint32_t n = 0;
  std::size_t K = 0;
  ValueModel values = ContinuousValues{};
  std::uint64_t seed = 0;

  void validate() const {
    require(n >= 1, ErrorKind::precondition, "n must be positive");
    if (const auto* c = std::get_if<ContinuousValues>(&values)) {
      require(c->a > 0 && c->a < c->b, ErrorKind::precondition,
              "the continuous value model needs 0 < a < b");
    } else {
      require(std::get<IntegerValues>(values).T >= 1, ErrorKind::precondition,
              "the integer value model needs T >= 1");
    }
  }
};

using SampledFunction = std::variant<SparseSupportFunction<double>, SparseSupportFunction<Rational>>;

inline SparseSupportFunction<double> sample_continuous(std::uint32_t n, std::size_t K,
                                                       const ContinuousValues& v, Rng& rng) {
  std::vector<SupportEntry<double>> entries;
  entries.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    Permutation sigma = sample_uniform(n, rng);
    entries.push_back({std::move(sigma), uniform_real(rng, v.a, v.b)});
  }
  return SparseSupportFunction<double>(n, std::move(entries));
}

inline SparseSupportFunction<Rational> sample_integer(std::uint32_t n, std::size_t K,
                                                      const IntegerValues& v, Rng& rng) {
  std::vector<SupportEntry<Rational>> entries;
  entries.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    Permutation sigma = sample_uniform(n, rng);
    const std::uint64_t value = 1 + uniform_below(rng, v.T);
    entries.push_back({std::move(sigma), Rational(static_cast<unsigned long>(value))});
  }
  return SparseSupportFunction<Rational>(n, std::move(entries));
}

/// Duplicate permutations are merged; the effective K is the result's sparsity.
inline SampledFunction sample_function(const RandomModelSpec& spec, Rng& rng) {
  spec.validate();
  if (const auto* c = std::get_if<ContinuousValues>(&spec.values)) {
    return sample_continuous(spec.n, spec.K, *c, rng);
  }
  return sample_integer(spec.n, spec.K, std::get<IntegerValues>(spec.values), rng);
}

inline SampledFunction sample_function(const RandomModelSpec& spec) {
  Rng rng(spec.seed);
  return sample_function(spec, rng);
}

// ---------------------------------------------------------------------------
// Single trials

/// Unique witness for every sampled support permutation. Linear
/// independence is not re-checked: it holds almost surely for continuous
/// values.
inline bool trial_condition1(const RandomModelSpec& spec, const PartitionIndexer& indexer,
                             Rng& rng) {
  return std::visit(
      [&](const auto& f) { return check_unique_witness(f, indexer).all_pass(); },
      sample_function(spec, rng));
}

struct RecoveryTrial {
  bool unique_witness = false;
  /// Unique witness and, in exact mode, verified linear independence.
  bool condition1 = false;
  bool recovered = false;
  /// The recovered function equals the sample (support and values).
  bool exact_match = false;
  std::size_t effective_K = 0;

  /// condition1 must imply recovery.
  bool consistent() const { return !condition1 || exact_match; }
};

inline RecoveryTrial trial_full_recovery(const RandomModelSpec& spec,
                                         const PartitionIndexer& indexer, Rng& rng,
                                         const RecoveryOptions& opt = {},
                                         const LinearIndependenceOptions& li = {}) {
  return std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f[0].value)>;
        RecoveryTrial t;
        t.effective_K = f.sparsity();
        t.unique_witness = check_unique_witness(f, indexer).all_pass();
        t.condition1 = t.unique_witness;
        if constexpr (ScalarTraits<T>::mode == ValueMode::exact) {
          std::vector<T> values;
          for (const auto& e : f.entries()) values.push_back(e.value);
          t.condition1 = t.condition1 && check_linear_independence(values, f.sparsity(), li).status ==
                                             LinearIndependence::verified;
        }
        const auto result = recover(fourier_coefficient(f, indexer), indexer, opt);
        t.recovered = result.recovered();
        t.exact_match = t.recovered && result.function.same_as(f, opt.tolerance);
        return t;
      },
      sample_function(spec, rng));
}

// ---------------------------------------------------------------------------
// Sweeps

enum class CheckMode { condition1, full_recovery };

inline std::string_view to_string(CheckMode m) noexcept {
  return m == CheckMode::condition1 ? "condition1" : "full";
}

inline CheckMode parse_check_mode(std::string_view s) {
  if (s == "condition1") return CheckMode::condition1;
  if (s == "full" || s == "full-recovery") return CheckMode::full_recovery;
  throw Error(ErrorKind::parse, "unknown check mode '" + std::string(s) + "'");
}

struct SweepSpec {
  /// Part expressions in n, e.g. "n-1,1".
  std::string shape_pattern;
  std::vector<std::uint32_t> n_values;
  /// K formulas over n, D, m, r, c; each is evaluated at every c value.
  std::vector<std::string> schedules;
  std::vector<double> c_values{1.0};
  /// K values used as given, in addition to the formulas.
  std::vector<std::uint64_t> explicit_K;
  std::size_t trials = 1;
  CheckMode mode = CheckMode::condition1;
  ValueModel values = ContinuousValues{};
  RecoveryOptions recovery{};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  /// Record wall time per grid point; timing makes output run-dependent.
  bool timing = false;
};

struct SweepPoint {
  std::uint32_t n = 0;
  std::string shape;
  std::uint64_t K = 0;
  std::string schedule_tag;
  std::size_t trials = 0;
  std::size_t successes = 0;
  /// Full-recovery mode: trials where condition1 held but recovery did not match.
  std::size_t implication_failures = 0;
  std::optional<double> seconds;
  std::uint64_t seed = 0;

  double rate() const {
    return trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  }
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepPoint> points;
};

/// Seed of one trial: independent of thread count and of the other grid points.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint32_t n, std::uint64_t K,
                                std::uint64_t trial) {
  return mix_seed(seed, {n, K, trial});
}

/// Runs fn(job) for job = 0..jobs-1 on `threads` workers (work stealing by an
/// atomic counter). The first exception is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t jobs, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, jobs));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (!failed.load()) {
        const std::size_t j = next.fetch_add(1);
        if (j >= jobs) return;
        try {
          fn(j);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline SweepResult run_sweep(const SweepSpec& spec) {
  require(spec.trials >= 1, ErrorKind::precondition, "trials must be at least 1");
  SweepResult out{spec, {}};
  struct Grid {
    LambdaShape shape;
    std::uint64_t K;
  };
  std::vector<Grid> grid;
  for (std::uint32_t n : spec.n_values) {
    const LambdaShape shape = shape_from_pattern(spec.shape_pattern, n);
    for (const auto& expr : spec.schedules) {
      const bool uses_c = references_variable(expr, "c");
      for (double c : spec.c_values) {
        SweepPoint p;
        p.n = n;
        p.shape = shape.to_string();
        p.K = evaluate_schedule(expr, shape, c);
        p.schedule_tag = uses_c ? expr + " @ c=" + format_scalar(c) : expr;
        p.trials = spec.trials;
        p.seed = spec.seed;
        out.points.push_back(std::move(p));
        grid.push_back({shape, out.points.back().K});
        if (!uses_c) break;
      }
    }
    for (std::uint64_t K : spec.explicit_K) {
      SweepPoint p;
      p.n = n;
      p.shape = shape.to_string();
      p.K = K;
      p.schedule_tag = "explicit";
      p.trials = spec.trials;
      p.seed = spec.seed;
      out.points.push_back(std::move(p));
      grid.push_back({shape, K});
    }
  }
  if (out.points.empty()) return out;

  // one indexer per distinct shape
  std::vector<std::unique_ptr<PartitionIndexer>> indexers;
  std::vector<std::size_t> indexer_of(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::size_t found = indexers.size();
    for (std::size_t t = 0; t < indexers.size(); ++t) {
      if (indexers[t]->shape() == grid[g].shape) found = t;
    }
    if (found == indexers.size()) {
      indexers.push_back(std::make_unique<PartitionIndexer>(grid[g].shape, spec.recovery.cap));
    }
    indexer_of[g] = found;
  }

  std::vector<std::uint8_t> success(grid.size() * spec.trials, 0);
  std::vector<std::uint8_t> violated(grid.size() * spec.trials, 0);
  std::vector<double> seconds(grid.size() * spec.trials, 0.0);
  parallel_for(success.size(), spec.threads, [&](std::size_t job) {
    const std::size_t g = job / spec.trials;
    const std::size_t trial = job % spec.trials;
    const auto start = std::chrono::steady_clock::now();
    const RandomModelSpec model{grid[g].shape.n(), static_cast<std::size_t>(grid[g].K),
                                spec.values, spec.seed};
    Rng rng(trial_seed(spec.seed, grid[g].shape.n(), grid[g].K, trial));
    const auto& indexer = *indexers[indexer_of[g]];
    if (spec.mode == CheckMode::condition1) {
      success[job] = trial_condition1(model, indexer, rng);
    } else {
      const RecoveryTrial t = trial_full_recovery(model, indexer, rng, spec.recovery);
      success[job] = t.exact_match;
      violated[job] = !t.consistent();
    }
    seconds[job] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  for (std::size_t g = 0; g < grid.size(); ++g) {
    auto& p = out.points[g];
    double total = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      p.successes += success[g * spec.trials + t];
      p.implication_failures += violated[g * spec.trials + t];
      total += seconds[g * spec.trials + t];
    }
    if (spec.timing) p.seconds = total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ℓ1 non-uniqueness experiment

struct L1Experiment {
  std::uint32_t n = 0;
  std::size_t trials = 0;
  std::size_t witnesses = 0;
  /// 1 - single_cycle_probability(n): the chance that σ_b σ_a⁻¹ has two or
  /// more non-trivial cycles.
  Rational predicted;

  std::optional<double> fraction() const {
    if (trials == 0) return std::nullopt;
    return static_cast<double>(witnesses) / static_cast<double>(trials);
  }
};

/// Samples K = 2 functions (integer values in 1..T, exact arithmetic) at the
/// first-order shape and counts verified equal-mass alternatives. A sample
/// whose two permutations coincide has no alternative.
inline L1Experiment l1_failure_experiment(std::uint32_t n, std::size_t trials, std::uint64_t seed,
                                          std::size_t threads = 1,
                                          IntegerValues values = IntegerValues{1000}) {
  require(n >= 4, ErrorKind::precondition, "the l1 experiment needs n >= 4");
  L1Experiment out;
  out.n = n;
  out.trials = trials;
  out.predicted = 1 - single_cycle_probability(n);
  const PartitionIndexer indexer(LambdaShape::hook(n));
  std::vector<std::uint8_t> hit(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(mix_seed(seed, {n, t}));
    const auto f = sample_integer(n, 2, values, rng);
    if (f.sparsity() < 2) return;
    hit[t] = l1_witness(f, indexer).has_value();
  });
  for (auto h : hit) out.witnesses += h;
  return out;
}

}  // namespace symsparse
