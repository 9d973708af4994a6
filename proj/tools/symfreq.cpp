// symfreq: command-line front end.
//
// Exit status: 0 success, 1 a check found a failure, 2 usage or limit error.

#include "symfreq/ca_core.hpp"
#include "symfreq/correlation.hpp"
#include "symfreq/experiments.hpp"
#include "symfreq/intervals.hpp"
#include "symfreq/measures.hpp"
#include "symfreq/parallel.hpp"
#include "symfreq/sampler.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace symfreq;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

void print_histogram(std::ostream& out, const Histogram& h) {
  out << "(";
  for (std::size_t k = 0; k < h.counts.size(); ++k) out << (k ? "," : "") << to_string(h.counts[k]);
  out << ")";
}

int rule_info(const std::string& text) {
  const LocalRule rule = parse_rule(text);
  const int q = rule.alphabet();
  const int r = rule.radius();
  std::cout << "rule=" << format_rule(rule) << "\n";
  std::cout << "surjective=" << (is_surjective(rule) ? "true" : "false") << "\n";
  std::cout << "balanced=" << (is_balanced(rule) ? "true" : "false") << "\n";
  for (const SymbolSet& a : SymbolSet::nonempty_proper_subsets(q)) {
    const Histogram h = histogram(rule, a, a);
    std::cout << "A=B=" << a.to_string() << " histogram=";
    print_histogram(std::cout, h);
    std::cout << " C=" << to_string(moment(h, 1)) << " C_id=" << to_string(identity_correlation(q, a.size(), r))
              << " C_normalized=" << to_string(normalized_correlation(rule, a, a)) << "\n";
  }
  return 0;
}

int rule_surjective(const std::string& text) {
  const bool s = is_surjective(parse_rule(text));
  std::cout << (s ? "true" : "false") << "\n";
  return s ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbol frequencies under one-dimensional cellular automata"};
  app.require_subcommand(1);
  std::function<int()> action;

  // rule info / rule surjective
  auto* rule_cmd = app.add_subcommand("rule", "Inspect a rule descriptor \"q r digits\"");
  rule_cmd->require_subcommand(1);
  std::string rule_text;
  auto* info = rule_cmd->add_subcommand("info", "Surjectivity, histograms and correlations for every A=B");
  info->add_option("rule", rule_text, "Rule descriptor")->required();
  info->callback([&] { action = [&] { return rule_info(rule_text); }; });
  auto* surj = rule_cmd->add_subcommand("surjective", "Exit 0 when surjective, 1 otherwise");
  surj->add_option("rule", rule_text, "Rule descriptor")->required();
  surj->callback([&] { action = [&] { return rule_surjective(rule_text); }; });

  // correlate
  auto* corr = app.add_subcommand("correlate", "Histogram and correlations for one (A, B)");
  std::string corr_rule, corr_a = "1", corr_b;
  std::optional<int> corr_reff;
  int corr_m = 1;
  corr->add_option("--rule", corr_rule, "Rule descriptor")->required();
  corr->add_option("--A", corr_a, "Counted symbols, e.g. 0,2");
  corr->add_option("--B", corr_b, "Image symbols (default: A)");
  corr->add_option("--r-eff", corr_reff, "Radius at which to view the rule");
  corr->add_option("--m", corr_m, "Correlation order")->check(CLI::NonNegativeNumber);
  corr->callback([&] {
    action = [&] {
      const LocalRule rule = parse_rule(corr_rule);
      const SymbolSet a = SymbolSet::parse(rule.alphabet(), corr_a);
      const SymbolSet b = SymbolSet::parse(rule.alphabet(), corr_b.empty() ? corr_a : corr_b);
      const int r_eff = corr_reff.value_or(rule.radius());
      const Histogram h = histogram(rule, a, b, r_eff);
      std::cout << "histogram=";
      print_histogram(std::cout, h);
      std::cout << "\nC=" << to_string(moment(h, corr_m)) << "\n";
      std::cout << "C_normalized=" << to_string(normalized_correlation(rule, a, b, corr_m)) << "\n";
      if (a == b)
        std::cout << "C_identity=" << to_string(identity_correlation(rule.alphabet(), a.size(), r_eff, corr_m))
                  << "\n";
      return 0;
    };
  });

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Exhaustive checks over all rules of small radius");
  SweepConfig sc;
  std::string sweep_check = "one_domination", sweep_out, rules_file;
  std::optional<std::string> sweep_a, sweep_b;
  std::optional<int> sweep_period;
  sc.jobs = default_jobs();
  sweep->add_option("--q", sc.q, "Alphabet size");
  sweep->add_option("--r", sc.r_max, "Largest radius")->required();
  sweep->add_option("--r-min", sc.r_min, "Smallest radius");
  sweep->add_option("--check", sweep_check,
                    "one_domination | high_domination | prefix_sums | conservation | averages");
  sweep->add_option("--A", sweep_a, "Restrict to one A (default: all nonempty proper subsets)");
  sweep->add_option("--B", sweep_b, "B for averages (default: A)");
  sweep->add_option("--m-max", sc.m_max, "Largest order tried by high_domination");
  sweep->add_option("--period", sweep_period, "Largest period searched by conservation (default 12)");
  sweep->add_option("--limit", sc.limit, "Enumeration guard");
  sweep->add_option("--rules-file", rules_file, "Rules to test instead of enumerating");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep->add_option("--jobs", sc.jobs, "Worker threads (default SYMFREQ_JOBS or 1)");
  sweep->callback([&] {
    action = [&] {
      sc.check = parse_sweep_check(sweep_check);
      sc.a_text = sweep_a;
      sc.b_text = sweep_b;
      sc.max_period = sweep_period;
      if (!rules_file.empty()) sc.rules = parse_rule_file(read_file(rules_file));
      const SweepResult res = run_sweep(sc);
      write_output(sweep_out, res.csv);
      (sweep_out.empty() || sweep_out == "-" ? std::cerr : std::cout) << res.summary();
      return res.violations == 0 ? 0 : 1;
    };
  });

  // measure pushforward / contraction
  auto* measure = app.add_subcommand("measure", "Exact cylinder values of pushed-forward measures");
  measure->require_subcommand(1);
  std::string m_rule, m_measure = "uniform", m_word;
  int m_steps = 1, m_n = 1;
  bool m_trajectory = false;
  std::uint64_t m_limit = kDefaultPreimageLimit;
  auto* push = measure->add_subcommand("pushforward", "F^t mu([u])");
  push->add_option("--rule", m_rule, "Rule descriptor")->required();
  push->add_option("--measure", m_measure, "uniform | bernoulli:P | product:P0,... | dirac:S | split:A:P");
  push->add_option("--word", m_word, "Cylinder word u")->required();
  push->add_option("--steps", m_steps, "t")->check(CLI::NonNegativeNumber);
  push->add_flag("--trajectory", m_trajectory, "CSV rows for t = 0..steps");
  push->add_option("--limit", m_limit, "Preimage enumeration guard");
  push->callback([&] {
    action = [&] {
      const LocalRule rule = parse_rule(m_rule);
      const CylinderMeasure mu = parse_measure(rule.alphabet(), m_measure);
      const Word u = parse_word(m_word, rule.alphabet());
      if (!m_trajectory) {
        const Rational v = iterate_pushforward(rule, mu, m_steps, u, m_limit);
        std::cout << to_string(v) << " " << format_float(to_double(v)) << "\n";
        return 0;
      }
      std::cout << "t,u,value_numerator,value_denominator,value_float\n";
      for (int t = 0; t <= m_steps; ++t) {
        const Rational v = iterate_pushforward(rule, mu, t, u, m_limit);
        std::cout << t << ',' << format_word(u) << ',' << to_string(v.get_num()) << ',' << to_string(v.get_den())
                  << ',' << format_float(to_double(v)) << "\n";
      }
      return 0;
    };
  });
  auto* contraction = measure->add_subcommand("contraction", "Compare max |F mu - lambda| with max |mu - lambda|");
  contraction->add_option("--rule", m_rule, "Rule descriptor")->required();
  contraction->add_option("--measure", m_measure, "Measure")->required();
  contraction->add_option("--n", m_n, "Word length")->check(CLI::PositiveNumber);
  contraction->callback([&] {
    action = [&] {
      const LocalRule rule = parse_rule(m_rule);
      const CylinderMeasure mu = parse_measure(rule.alphabet(), m_measure);
      const ContractionReport rep = check_uniform_contraction(rule, mu, m_n, m_limit);
      std::cout << "lhs=" << to_string(rep.lhs) << " (u=" << format_word(rep.witness_u) << ")\n"
                << "rhs=" << to_string(rep.rhs) << " (w=" << format_word(rep.witness_w) << ")\n"
                << "holds=" << (rep.holds ? "true" : "false") << "\n";
      return rep.holds ? 0 : 1;
    };
  });

  // fn params / fn apply
  auto* fn = app.add_subcommand("fn", "The interval-swap map on binary windows");
  fn->require_subcommand(1);
  int fn_n = 2;
  std::string fn_p = "1/50", fn_window, fn_out;
  FnExperimentConfig fc;
  fc.jobs = default_jobs();
  auto* fn_params = fn->add_subcommand("params", "Derived thresholds and the validity report");
  fn_params->add_option("--n", fn_n, "Marker order")->check(CLI::PositiveNumber);
  fn_params->add_option("--p", fn_p, "Density p, e.g. 1/50");
  fn_params->callback([&] {
    action = [&] {
      const IntervalParams params = make_interval_params(fn_n, parse_rational(fn_p));
      const ParamsReport rep = check_interval_params(params);
      std::cout << "marker=" << format_word(params.marker) << "\n"
                << "marker_mass=" << to_string(params.marker_mass) << "\n"
                << "alpha=" << params.alpha << "\n"
                << "short_bound=" << params.short_bound << "\n"
                << "medium_free_lengths=" << rep.min_free_length << ".." << rep.max_free_length << "\n"
                << "valid=" << (rep.valid ? "true" : "false") << "\n";
      for (const auto& reason : rep.reasons) std::cout << "note: " << reason << "\n";
      return rep.valid ? 0 : 1;
    };
  });
  auto* fn_apply = fn->add_subcommand("apply", "Apply to one window, or run a seeded batch of random windows");
  fn_apply->add_option("--n", fn_n, "Marker order")->check(CLI::PositiveNumber);
  fn_apply->add_option("--p", fn_p, "Density p");
  auto* window_opt = fn_apply->add_option("--window", fn_window, "Binary window to transform");
  fn_apply->add_option("--windows", fc.windows, "Number of random windows")->excludes(window_opt);
  fn_apply->add_option("--seed", fc.seed, "Seed for random windows");
  fn_apply->add_option("--length", fc.window_length, "Random window length (default 3 * longest medium interval)");
  fn_apply->add_option("--out", fn_out, "CSV path (default stdout)");
  fn_apply->add_option("--jobs", fc.jobs, "Worker threads");
  fn_apply->callback([&] {
    action = [&] {
      if (!fn_window.empty()) {
        const IntervalSwap swap(make_interval_params(fn_n, parse_rational(fn_p)));
        std::cout << format_word(swap.apply(parse_word(fn_window, 2))) << "\n";
        return 0;
      }
      fc.n = fn_n;
      fc.p = parse_rational(fn_p);
      const FnExperimentResult res = run_fn_experiment(fc);
      write_output(fn_out, res.csv);
      (fn_out.empty() || fn_out == "-" ? std::cerr : std::cout)
          << res.rows.size() << " windows, " << res.rewrites << " rewrites, " << res.involution_failures
          << " involution failures, " << res.occurrence_failures << " occurrence failures, "
          << res.windows_with_111 << " windows with 111 in a rewritten part\n";
      return res.involution_failures == 0 && res.occurrence_failures == 0 ? 0 : 1;
    };
  });

  // xor-limit
  auto* xl = app.add_subcommand("xor-limit", "Frequencies under XOR iterates of the hierarchical block measure");
  XorLimitConfig xc;
  xc.jobs = default_jobs();
  std::string xl_alpha = "1", xl_word = "1", xl_out;
  std::optional<std::string> xl_p;
  xl->add_option("--alpha", xl_alpha, "Share of copies among correlated levels");
  xl->add_option("--levels", xc.levels, "Level of the outer block")->check(CLI::Range(0, kMaxSamplerLevels));
  xl->add_option("--samples", xc.samples, "Samples per row")->check(CLI::PositiveNumber);
  xl->add_option("--seed", xc.seed, "Seed");
  xl->add_option("--n-min", xc.n_min, "First level n (t = 2^(n(n+1)/2) steps)");
  xl->add_option("--n-max", xc.n_max, "Last level n");
  xl->add_option("--word", xl_word, "Cylinder word");
  xl->add_option("--p-const", xl_p, "Use this copy probability at every level");
  xl->add_option("--out", xl_out, "CSV path (default stdout)");
  xl->add_option("--jobs", xc.jobs, "Worker threads");
  xl->callback([&] {
    action = [&] {
      xc.alpha = parse_rational(xl_alpha);
      xc.word = parse_word(xl_word, 2);
      if (xl_p) xc.constant_p = parse_rational(*xl_p);
      write_output(xl_out, run_xor_limit(xc).csv);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const LimitExceeded& e) {
    std::cerr << "limit exceeded: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
