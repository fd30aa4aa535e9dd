// symsparse: command-line front end.
//
// Exit codes: 0 success, 2 recovery aborted with a certificate, 3 invalid
// input or failed precondition.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symsparse/analysis.hpp"
#include "symsparse/condition1.hpp"
#include "symsparse/fixtures.hpp"
#include "symsparse/io.hpp"
#include "symsparse/oracle.hpp"
#include "symsparse/randmodel.hpp"
#include "symsparse/schedule.hpp"
#include "symsparse/sparsest_fit.hpp"

namespace {

using namespace symsparse;
using io::Json;

constexpr int kExitAbort = 2;
constexpr int kExitPrecondition = 3;

struct Globals {
  bool json_errors = false;
  std::uint64_t cap = kDefaultDLambdaCap;
  std::size_t threads = 1;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_text(out, text);
  }
}

void report_error(const Globals& g, std::string_view kind, const std::string& message) {
  if (g.json_errors) {
    std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
  } else {
    std::cerr << "error (" << kind << "): " << message << "\n";
  }
}

LambdaShape shape_option(const std::string& pattern, std::optional<std::uint32_t> n) {
  if (n) return shape_from_pattern(pattern, *n);
  return io::parse_shape(pattern);
}

Tolerance tolerance_from(double abs_tol, double rel_tol) {
  require(abs_tol >= 0 && rel_tol >= 0, ErrorKind::precondition, "tolerances must be >= 0");
  return {abs_tol, rel_tol};
}

// ---------------------------------------------------------------------------

struct MarginalArgs {
  std::string input;
  std::string shape;
  std::string out;
};

int run_marginal(const Globals& g, const MarginalArgs& a) {
  const auto f = io::load_function(a.input);
  const auto shape = io::parse_shape(a.shape);
  const PartitionIndexer indexer(shape, g.cap);
  std::visit(
      [&](const auto& fn) { emit(io::dump(io::to_json(fourier_coefficient(fn, indexer))), a.out); },
      f);
  return 0;
}

struct CheckArgs {
  std::string input;
  std::string shape;
  std::size_t exact_cap = 12;
  std::string out;
};

int run_check(const Globals& g, const CheckArgs& a) {
  const auto f = io::load_function(a.input);
  const PartitionIndexer indexer(io::parse_shape(a.shape), g.cap);
  LinearIndependenceOptions li;
  li.exact_cap = a.exact_cap;
  std::visit(
      [&](const auto& fn) { emit(io::dump(io::to_json(check_condition1(fn, indexer, li))), a.out); },
      f);
  return 0;
}

struct RecoverArgs {
  std::string marginal;
  std::string mode = "exact";
  double abs_tol = Tolerance{}.abs_tol;
  double rel_tol = Tolerance{}.rel_tol;
  std::string search = "exhaustive";
  bool no_exclusion = false;
  std::string out;
  std::string report;
};

int run_recover(const Globals& g, const RecoverArgs& a) {
  const auto mode = parse_value_mode(a.mode);
  RecoveryOptions opt;
  opt.tolerance = tolerance_from(a.abs_tol, a.rel_tol);
  opt.cap = g.cap;
  opt.search = parse_subset_search(a.search);
  opt.matching_exclusion = !a.no_exclusion;
  const auto m = io::load_marginal(a.marginal, mode);
  return std::visit(
      [&](const auto& mat) {
        const auto result = recover(mat, opt);
        if (!a.report.empty()) io::write_text(a.report, io::dump(io::to_json(result)));
        if (!result.recovered()) {
          std::cout << io::dump(io::to_json(*result.certificate));
          return kExitAbort;
        }
        emit(io::dump(io::to_json(result.function)), a.out);
        return 0;
      },
      m);
}

struct L0Args {
  std::string marginal;
  std::size_t kmax = 4;
  std::string out;
};

int run_l0(const Globals&, const L0Args& a) {
  const auto m = std::get<MarginalMatrix<Rational>>(io::load_marginal(a.marginal, ValueMode::exact));
  L0Options opt;
  opt.k_max = a.kmax;
  emit(io::dump(io::to_json(l0_oracle(m, opt))), a.out);
  return 0;
}

struct L1Args {
  std::string input;
  std::string shape;
  std::optional<std::uint32_t> n;
  std::size_t trials = 1000;
  std::optional<std::uint64_t> seed;
  std::uint64_t T = 1000;
  std::string out;
};

int run_l1(const Globals& g, const L1Args& a) {
  if (!a.input.empty()) {
    const auto f = io::load_function(a.input);
    const auto shape = a.shape.empty()
                           ? LambdaShape::hook(static_cast<std::uint32_t>(
                                 std::visit([](const auto& fn) { return fn.n(); }, f)))
                           : io::parse_shape(a.shape);
    const PartitionIndexer indexer(shape, g.cap);
    std::visit([&](const auto& fn) { emit(io::dump(io::to_json(l1_witness(fn, indexer))), a.out); },
               f);
    return 0;
  }
  require(a.n.has_value(), ErrorKind::precondition,
          "l1-witness needs --input, or --n and --seed for the sampling experiment");
  require(a.seed.has_value(), ErrorKind::precondition, "the sampling experiment requires --seed");
  const auto e = l1_failure_experiment(*a.n, a.trials, *a.seed, g.threads, IntegerValues{a.T});
  emit(io::dump(io::to_json(e)), a.out);
  return 0;
}

struct SampleArgs {
  std::uint32_t n = 0;
  std::size_t k = 0;
  std::optional<double> a_lo;
  std::optional<double> b_hi;
  std::optional<std::uint64_t> T;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_sample(const Globals&, const SampleArgs& a) {
  require(a.seed.has_value(), ErrorKind::precondition, "sample requires --seed");
  require(!(a.T && (a.a_lo || a.b_hi)), ErrorKind::precondition,
          "--T selects integer values and cannot be combined with --a/--b");
  RandomModelSpec spec;
  spec.n = a.n;
  spec.K = a.k;
  spec.seed = *a.seed;
  if (a.T) {
    spec.values = IntegerValues{*a.T};
  } else {
    ContinuousValues c;
    if (a.a_lo) c.a = *a.a_lo;
    if (a.b_hi) c.b = *a.b_hi;
    spec.values = c;
  }
  spec.validate();
  emit(io::dump(std::visit([](const auto& f) { return io::to_json(f); }, sample_function(spec))),
       a.out);
  return 0;
}

struct SweepArgs {
  std::string shape;
  std::vector<std::uint32_t> n;
  std::vector<std::string> schedules;
  std::vector<double> c;
  std::vector<std::uint64_t> K;
  std::size_t trials = 100;
  std::string mode = "condition1";
  std::string values = "continuous";
  double a_lo = 1.0;
  double b_hi = 2.0;
  std::uint64_t T = 1000;
  std::optional<std::uint64_t> seed;
  double abs_tol = Tolerance{}.abs_tol;
  double rel_tol = Tolerance{}.rel_tol;
  std::string search = "exhaustive";
  bool timing = false;
  std::string out;
};

int run_sweep_cmd(const Globals& g, const SweepArgs& a) {
  require(a.seed.has_value(), ErrorKind::precondition, "sweep requires --seed");
  require(!a.schedules.empty() || !a.K.empty(), ErrorKind::precondition,
          "sweep needs at least one --schedule or --K");
  SweepSpec s;
  s.shape_pattern = a.shape;
  s.n_values = a.n;
  s.schedules = a.schedules;
  if (!a.c.empty()) s.c_values = a.c;
  s.explicit_K = a.K;
  s.trials = a.trials;
  s.mode = parse_check_mode(a.mode);
  if (a.values == "continuous") {
    s.values = ContinuousValues{a.a_lo, a.b_hi};
  } else if (a.values == "integer") {
    s.values = IntegerValues{a.T};
  } else {
    throw Error(ErrorKind::parse, "--values must be continuous or integer");
  }
  s.recovery.tolerance = tolerance_from(a.abs_tol, a.rel_tol);
  s.recovery.cap = g.cap;
  s.recovery.search = parse_subset_search(a.search);
  s.seed = *a.seed;
  s.threads = g.threads;
  s.timing = a.timing;
  emit(io::sweep_csv(run_sweep(s)), a.out);
  return 0;
}

struct AnalyzeArgs {
  std::string shape;
  std::optional<std::uint32_t> n;
  double epsilon = 0.5;
  double T = 1;
  double constant = 3;
  double C = 1;
  double C_prime = 1;
  std::uint32_t small_m_cap = 4;
  std::string family;
  std::vector<std::uint64_t> points;
  std::string out;
};

int run_analyze(const Globals&, const AnalyzeArgs& a) {
  if (!a.family.empty()) {
    require(!a.points.empty(), ErrorKind::precondition, "--family needs --points");
    emit(io::dump(io::to_json(entropy_ratio_check(parse_limit_family(a.family), a.points))), a.out);
    return 0;
  }
  require(!a.shape.empty(), ErrorKind::precondition, "analyze needs --shape or --family");
  const auto shape = shape_option(a.shape, a.n);
  ThresholdOptions opt;
  opt.epsilon = a.epsilon;
  opt.C = a.C;
  opt.C_prime = a.C_prime;
  opt.small_m_cap = a.small_m_cap;
  emit(io::dump(io::to_json(threshold_report(shape, opt, a.T, a.constant))), a.out);
  return 0;
}

struct FixtureArgs {
  std::string name;
  std::size_t n = 4;
  bool list = false;
  std::string out;
};

int run_fixture(const Globals&, const FixtureArgs& a) {
  if (a.list || a.name.empty()) {
    for (const auto& name : fixtures::fixture_names()) std::cout << name << "\n";
    return 0;
  }
  emit(io::dump(io::to_json(fixtures::named_fixture(a.name, a.n))), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover sparse non-negative functions on S_n from partial Fourier information"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json-errors", g.json_errors, "Write diagnostics to stderr as JSON");
  app.add_option("--cap-dlambda", g.cap, "Refuse shapes with more partitions than this")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads for sweeps and experiments")
      ->check(CLI::PositiveNumber);

  int code = 0;
  const auto dispatch = [&](auto fn, const auto& args) {
    return [&code, &g, fn, &args] { code = fn(g, args); };
  };

  MarginalArgs marg;
  auto* c_marg = app.add_subcommand("marginal", "Compute the λ-partial information of a function");
  c_marg->add_option("--input,-i", marg.input, "Function JSON")->required();
  c_marg->add_option("--shape", marg.shape, "Shape, e.g. 3,1")->required();
  c_marg->add_option("--out,-o", marg.out, "Output file (default stdout)");
  c_marg->callback(dispatch(run_marginal, marg));

  CheckArgs chk;
  auto* c_chk = app.add_subcommand("check", "Report unique witness and linear independence");
  c_chk->add_option("--input,-i", chk.input, "Function JSON")->required();
  c_chk->add_option("--shape", chk.shape, "Shape, e.g. 3,1")->required();
  c_chk->add_option("--exact-cap", chk.exact_cap, "Largest K for the exact independence search");
  c_chk->add_option("--out,-o", chk.out, "Output file (default stdout)");
  c_chk->callback(dispatch(run_check, chk));

  RecoverArgs rec;
  auto* c_rec = app.add_subcommand("recover", "Run sparsest-fit on a marginal");
  c_rec->add_option("--marginal,-m", rec.marginal, "Marginal JSON")->required();
  c_rec->add_option("--mode", rec.mode, "exact or float")
      ->check(CLI::IsMember({"exact", "float"}));
  c_rec->add_option("--abs-tol", rec.abs_tol, "Float mode absolute tolerance");
  c_rec->add_option("--rel-tol", rec.rel_tol, "Float mode relative tolerance");
  c_rec->add_option("--search", rec.search, "exhaustive or first-match")
      ->check(CLI::IsMember({"exhaustive", "first-match"}));
  c_rec->add_flag("--no-exclusion", rec.no_exclusion,
                  "Consider every discovered value as a subset candidate");
  c_rec->add_option("--out,-o", rec.out, "Recovered function JSON (default stdout)");
  c_rec->add_option("--report", rec.report, "Write the full recovery report here");
  c_rec->callback(dispatch(run_recover, rec));

  auto* c_oracle = app.add_subcommand("oracle", "Brute-force reference solvers");
  c_oracle->require_subcommand(1);
  L0Args l0;
  auto* c_l0 = c_oracle->add_subcommand("l0", "All minimum-support solutions (n <= 5)");
  c_l0->add_option("--marginal,-m", l0.marginal, "Marginal JSON (exact)")->required();
  c_l0->add_option("--kmax", l0.kmax, "Largest support size to search");
  c_l0->add_option("--out,-o", l0.out, "Output file (default stdout)");
  c_l0->callback(dispatch(run_l0, l0));

  L1Args l1;
  const auto add_l1 = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", l1.input, "Function JSON");
    cmd->add_option("--shape", l1.shape, "Shape (default n-1,1)");
    cmd->add_option("--n", l1.n, "Sampling experiment: permutation size");
    cmd->add_option("--trials", l1.trials, "Sampling experiment: number of K=2 samples");
    cmd->add_option("--seed", l1.seed, "Sampling experiment: seed");
    cmd->add_option("--T", l1.T, "Sampling experiment: values drawn from 1..T");
    cmd->add_option("--out,-o", l1.out, "Output file (default stdout)");
    cmd->callback(dispatch(run_l1, l1));
  };
  add_l1(c_oracle->add_subcommand("l1-witness", "Equal-mass alternative with the same marginal"));
  add_l1(app.add_subcommand("l1-witness", "Equal-mass alternative with the same marginal"));

  SampleArgs smp;
  auto* c_smp = app.add_subcommand("sample", "Draw a random sparse function");
  c_smp->add_option("--n", smp.n, "Permutation size")->required();
  c_smp->add_option("--k", smp.k, "Support size")->required();
  c_smp->add_option("--a", smp.a_lo, "Continuous values: lower end (default 1)");
  c_smp->add_option("--b", smp.b_hi, "Continuous values: upper end (default 2)");
  c_smp->add_option("--T", smp.T, "Integer values in 1..T (exact mode)");
  c_smp->add_option("--seed", smp.seed, "Seed")->required();
  c_smp->add_option("--out,-o", smp.out, "Output file (default stdout)");
  c_smp->callback(dispatch(run_sample, smp));

  SweepArgs swp;
  auto* c_swp = app.add_subcommand("sweep", "Monte Carlo success rates over a K grid");
  c_swp->add_option("--shape", swp.shape, "Shape pattern in n, e.g. n-1,1")->required();
  c_swp->add_option("--n", swp.n, "Values of n")->required();
  c_swp->add_option("--schedule", swp.schedules, "K formula over n, D, m, r, c");
  c_swp->add_option("--c", swp.c, "Values substituted for c")->delimiter(',');
  c_swp->add_option("--K", swp.K, "Explicit K values")->delimiter(',');
  c_swp->add_option("--trials", swp.trials, "Trials per grid point");
  c_swp->add_option("--mode", swp.mode, "condition1 or full")
      ->check(CLI::IsMember({"condition1", "full", "full-recovery"}));
  c_swp->add_option("--values", swp.values, "continuous or integer");
  c_swp->add_option("--a", swp.a_lo, "Continuous values: lower end");
  c_swp->add_option("--b", swp.b_hi, "Continuous values: upper end");
  c_swp->add_option("--T", swp.T, "Integer values in 1..T");
  c_swp->add_option("--abs-tol", swp.abs_tol, "Float recovery absolute tolerance");
  c_swp->add_option("--rel-tol", swp.rel_tol, "Float recovery relative tolerance");
  c_swp->add_option("--search", swp.search, "exhaustive or first-match")
      ->check(CLI::IsMember({"exhaustive", "first-match"}));
  c_swp->add_flag("--timing", swp.timing, "Fill the seconds column");
  c_swp->add_option("--seed", swp.seed, "Seed")->required();
  c_swp->add_option("--out,-o", swp.out, "CSV output (default stdout)");
  c_swp->callback(dispatch(run_sweep_cmd, swp));

  AnalyzeArgs ana;
  auto* c_ana = app.add_subcommand("analyze", "Threshold, exponent and converse calculators");
  c_ana->add_option("--shape", ana.shape, "Shape, or a pattern in n together with --n");
  c_ana->add_option("--n", ana.n, "Permutation size for shape patterns");
  c_ana->add_option("--epsilon", ana.epsilon, "Slack in the achievable threshold, 0 < ε < 1");
  c_ana->add_option("--T", ana.T, "Value range for the converse bound");
  c_ana->add_option("--constant", ana.constant, "Converse constant (3 or 4)");
  c_ana->add_option("--C", ana.C, "Multiplier of D^γ in the general case");
  c_ana->add_option("--C-prime", ana.C_prime, "Entropy weight inside γ");
  c_ana->add_option("--small-m-cap", ana.small_m_cap, "Largest tail treated as fixed");
  c_ana->add_option("--family", ana.family, "alpha1-to-1 or alpha1-to-0: tabulate H'/H");
  c_ana->add_option("--points", ana.points, "Values of n for --family")->delimiter(',');
  c_ana->add_option("--out,-o", ana.out, "Output file (default stdout)");
  c_ana->callback(dispatch(run_analyze, ana));

  FixtureArgs fix;
  auto* c_fix = app.add_subcommand("fixture", "Write a built-in example function");
  c_fix->add_option("--name", fix.name, "Fixture name (see --list)");
  c_fix->add_option("--n", fix.n, "Permutation size (>= 4)");
  c_fix->add_flag("--list", fix.list, "List fixture names");
  c_fix->add_option("--out,-o", fix.out, "Output file (default stdout)");
  c_fix->callback(dispatch(run_fixture, fix));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(g, "usage", e.what());
    return kExitPrecondition;
  } catch (const Error& e) {
    report_error(g, to_string(e.kind()), e.what());
    return kExitPrecondition;
  } catch (const std::exception& e) {
    report_error(g, "internal", e.what());
    return 1;
  }
  return code;
}
