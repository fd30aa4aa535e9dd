// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "brute.hpp"
#include "symsparse/analysis.hpp"
#include "symsparse/condition1.hpp"
#include "symsparse/fixtures.hpp"
#include "symsparse/io.hpp"
#include "symsparse/oracle.hpp"
#include "symsparse/randmodel.hpp"
#include "symsparse/sparsest_fit.hpp"

using namespace symsparse;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  failures += !o.pass;
  std::printf("[%s] criterion %2d  %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 1 ------------------------------------------------------------------------
Outcome example_identity() {
  for (std::size_t n : {4, 6, 10}) {
    const auto [lhs, rhs] = fixtures::quadruple_identity(n);
    if (!lhs.equals(rhs)) return {false, fmt("sides differ at n=%zu", n)};
    // dense cross-check of both sides
    const auto s = fixtures::transposition_quadruple(n);
    const std::vector<std::uint32_t> parts{static_cast<std::uint32_t>(n - 1), 1};
    const auto a = brute::marginal(
        SparseSupportFunction<Rational>(n, {{s[0], Rational(1)}, {s[1], Rational(1)}}), parts);
    const auto b = brute::marginal(
        SparseSupportFunction<Rational>(n, {{s[2], Rational(1)}, {s[3], Rational(1)}}), parts);
    if (a != b) return {false, fmt("dense sides differ at n=%zu", n)};
    for (std::uint32_t i = 0; i < n; ++i) {
      for (std::uint32_t j = 0; j < n; ++j) {
        const Rational* v = lhs.find(i, j);
        if ((v ? *v : Rational(0)) != a[i][j]) return {false, fmt("cell mismatch at n=%zu", n)};
      }
    }
  }
  return {true, "n = 4, 6, 10 equal cell for cell"};
}

// 2 ------------------------------------------------------------------------
Outcome soundness_suite() {
  const PartitionIndexer indexer(LambdaShape::hook(8));
  std::size_t verified = 0;
  std::size_t witness_only = 0;
  std::size_t witness_recovered = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    Rng rng(mix_seed(2, {t}));
    const std::size_t K = 1 + uniform_below(rng, 10);
    const auto f = sample_integer(8, K, IntegerValues{1000}, rng);
    const auto c1 = check_condition1(f, indexer);
    const auto r = recover(fourier_coefficient(f, indexer), indexer);
    if (c1.unique_witness.all_pass()) {
      ++witness_only;
      witness_recovered += r.recovered() && r.function.same_as(f);
    }
    if (!c1.holds()) continue;
    ++verified;
    if (!r.recovered() || !r.function.same_as(f)) {
      return {false, fmt("trial %llu: condition1 verified but recovery %s",
                         static_cast<unsigned long long>(t),
                         r.recovered() ? "differs" : r.certificate->detail.c_str())};
    }
  }
  if (verified == 0) return {false, "no trial verified condition1"};
  return {true, fmt("%zu/1000 trials verified condition1, all recovered exactly; unique witness "
                    "alone held in %zu, recovered in %zu",
                    verified, witness_only, witness_recovered)};
}

// 3 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  std::size_t total = 0;
  std::size_t attempts = 0;
  for (const std::vector<std::uint32_t>& parts :
       {std::vector<std::uint32_t>{3, 1}, {2, 2}, {2, 1, 1}}) {
    const PartitionIndexer indexer(LambdaShape::from_parts(parts));
    std::size_t accepted = 0;
    Rng rng(mix_seed(3, {parts.size(), parts[0]}));
    while (accepted < 200) {
      if (++attempts > 200000) return {false, "could not find enough condition1 functions"};
      const std::size_t K = 1 + uniform_below(rng, 3);
      std::vector<SupportEntry<Rational>> e;
      for (std::size_t k = 0; k < K; ++k) {
        Rational v(static_cast<long>(1 + uniform_below(rng, 100)),
                   static_cast<long>(1 + uniform_below(rng, 9)));
        v.canonicalize();
        e.push_back({sample_uniform(4, rng), v});
      }
      const SparseSupportFunction<Rational> f(4, e);
      if (!check_condition1(f, indexer).holds()) continue;
      ++accepted;
      const auto m = fourier_coefficient(f, indexer);
      L0Options opt;
      opt.k_max = 3;
      const auto l0 = l0_oracle(m, opt);
      if (!l0.unique() || !l0.solutions[0].same_as(f)) {
        return {false, fmt("shape %s: l0 minimal solution is not unique or differs from f",
                           indexer.shape().to_string().c_str())};
      }
      const auto r = recover(m, indexer);
      if (!r.recovered() || !r.function.same_as(l0.solutions[0])) {
        return {false, fmt("shape %s: recover disagrees with l0",
                           indexer.shape().to_string().c_str())};
      }
    }
    total += accepted;
  }
  return {true, fmt("%zu functions over (3,1), (2,2), (2,1,1): l0 unique = f = recover", total)};
}

// 4 ------------------------------------------------------------------------
Outcome negative_cases() {
  const auto hook = LambdaShape::hook(4);
  const auto a = fixtures::four_weight(4, {Rational(1), Rational(2), Rational(3), Rational(4)});
  const auto ra = l0_oracle(fourier_coefficient(a, hook));
  if (ra.min_size != 3u) return {false, "four-weight: minimum support is not 3"};
  const auto alt = fixtures::four_weight_alternative(
      4, {Rational(1), Rational(2), Rational(3), Rational(4)});
  bool has_alt = false;
  for (const auto& s : ra.solutions) has_alt |= s.same_as(alt);
  if (!has_alt) return {false, "four-weight: constructed 3-sparse alternative not found"};

  const auto b = fixtures::equal_pair(4, Rational(1));
  const auto rb = l0_oracle(fourier_coefficient(b, hook));
  if (rb.min_size != 2u || rb.solutions.size() != 2) return {false, "equal-pair: expected two size-2 solutions"};

  const auto c = fixtures::three_weight(4, {Rational(1), Rational(2), Rational(3)});
  const PartitionIndexer idx(hook);
  std::vector<std::vector<Rational>> cols(16, std::vector<Rational>(3, 0));
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::uint32_t j = 0; j < 4; ++j) cols[idx.image(c[k].perm, j) * 4 + j][k] = 1;
  }
  if (solve_exact(cols, std::vector<Rational>(16, 0)).rank != 3) {
    return {false, "three-weight: support matrices are not linearly independent"};
  }
  const auto rc = l0_oracle(fourier_coefficient(c, hook));
  if (rc.min_size != 3u || rc.solutions.size() < 2) return {false, "three-weight: solution is unique"};
  return {true, fmt("four-weight: min support 3 < 4 with %zu solutions; equal-pair: %zu size-2 solutions; three-weight: rank 3, "
                    "%zu size-3 solutions",
                    ra.solutions.size(), rb.solutions.size(), rc.solutions.size())};
}

// 5 ------------------------------------------------------------------------
Outcome l1_failure() {
  const auto e = l1_failure_experiment(30, 1000, 5, 1);
  const double p = e.predicted.get_d();
  const double f = *e.fraction();
  const double sigma = std::sqrt(p * (1 - p) / 1000);
  const bool ok = f >= 0.85 && std::abs(f - p) <= 4 * sigma;
  return {ok, fmt("fraction %.3f, predicted %.4f, |diff| = %.2f sigma", f, p, std::abs(f - p) / sigma)};
}

// 6 ------------------------------------------------------------------------
Outcome first_order_transition() {
  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {200};
  s.schedules = {"c*n*log(n)"};
  s.c_values = {0.25, 0.5, 1.5, 3};
  s.trials = 100;
  s.seed = 6;
  const auto r = run_sweep(s);
  std::string rates;
  bool monotone = true;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    rates += fmt("%sK=%llu:%.2f", i ? " " : "", static_cast<unsigned long long>(r.points[i].K),
                 r.points[i].rate());
    if (i && r.points[i].rate() > r.points[i - 1].rate()) monotone = false;
  }
  const bool ok = r.points[1].K == 529 && r.points[1].rate() >= 0.99 &&
                  r.points[3].K == 3178 && r.points[3].rate() <= 0.05 && monotone;
  return {ok, rates};
}

// 7 ------------------------------------------------------------------------
Outcome fixed_tail() {
  SweepSpec s;
  s.shape_pattern = "n-2,2";
  s.n_values = {40};
  s.schedules = {"(c/m!)*n^m*log(n)"};
  s.c_values = {0.5};
  s.trials = 50;
  s.seed = 7;
  const auto r = run_sweep(s);
  const auto& p = r.points[0];
  return {p.K == 1475 && p.rate() >= 0.9,
          fmt("K=%llu rate %.2f", static_cast<unsigned long long>(p.K), p.rate())};
}

// 8 ------------------------------------------------------------------------
Outcome entropy_ratio_numerics() {
  const auto up = entropy_ratio_check(LimitFamily::alpha1_to_1, {10, 100, 1000, 10000, 100000, 1000000});
  const auto down = entropy_ratio_check(LimitFamily::alpha1_to_0, {10, 30, 100, 300, 1000});
  const double hi = up.rows.back().ratio;
  const double lo = down.rows.back().ratio;
  const bool ok = up.monotone && down.monotone && hi >= 0.93 && std::abs(lo - 0.999) <= 1e-12;
  return {ok, fmt("(n-1,1) at 1e6: %.4f; (1,...,1) at 1000: %.6f; both increasing", hi, lo)};
}

// 9 ------------------------------------------------------------------------
Outcome converse() {
  const auto s = LambdaShape::hook(10);
  const double three = converse_bound(s, 2, 3);
  const double four = converse_bound(s, 2, 4);
  const double ratio = four / three;
  const bool ok = std::abs(three - 19.13) <= 0.01 && std::abs(ratio - 4.0 / 3.0) <= 1e-15;
  return {ok, fmt("constant 3: %.4f; constant 4 / constant 3 = %.17g", three, ratio)};
}

// 10 -----------------------------------------------------------------------
Outcome performance() {
  const PartitionIndexer indexer(LambdaShape::hook(1000));
  Rng rng(10);
  const auto f = sample_continuous(1000, 2000, ContinuousValues{}, rng);
  const auto m = fourier_coefficient(f, indexer);
  RecoveryOptions opt;
  opt.search = SubsetSearch::first_match;
  opt.tolerance = Tolerance{1e-14, 4e-15};
  const auto start = std::chrono::steady_clock::now();
  const auto r = recover(m, indexer, opt);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!r.recovered()) return {false, "recovery aborted: " + r.certificate->detail};
  if (!r.function.same_as(f, Tolerance{1e-12, 1e-12})) return {false, "recovered function differs"};

  SweepSpec s;
  s.shape_pattern = "n-1,1";
  s.n_values = {40, 60};
  s.schedules = {"c*n*log(n)"};
  s.c_values = {0.25, 1};
  s.trials = 40;
  s.mode = CheckMode::full_recovery;
  s.seed = 10;
  const auto one = io::sweep_csv(run_sweep(s));
  s.threads = 8;
  const auto eight = io::sweep_csv(run_sweep(s));
  const bool ok = secs < 60 && one == eight;
  return {ok, fmt("recover n=1000 K=2000 in %.1f s (exact match); sweep CSV %s for 1 vs 8 workers",
                  secs, one == eight ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
  criterion(1, "example identity", example_identity);
  criterion(2, "soundness under condition1", soundness_suite);
  criterion(3, "oracle equivalence", oracle_equivalence);
  criterion(4, "negative examples", negative_cases);
  criterion(5, "l1 non-uniqueness rate", l1_failure);
  criterion(6, "first-order phase transition", first_order_transition);
  criterion(7, "fixed-tail threshold", fixed_tail);
  criterion(8, "entropy ratio limits", entropy_ratio_numerics);
  criterion(9, "converse bound", converse);
  criterion(10, "performance and determinism", performance);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures ? 1 : 0;
}
