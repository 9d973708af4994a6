#include "symfreq/experiments.hpp"

#include "symfreq/correlation.hpp"
#include "symfreq/intervals.hpp"
#include "symfreq/parallel.hpp"
#include "symfreq/sampler.hpp"

#include <iomanip>
#include <map>
#include <sstream>

namespace symfreq {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string format_float(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

SweepCheck parse_sweep_check(std::string_view text) {
  if (text == "one_domination") return SweepCheck::one_domination;
  if (text == "high_domination") return SweepCheck::high_domination;
  if (text == "prefix_sums") return SweepCheck::prefix_sums;
  if (text == "conservation") return SweepCheck::conservation;
  if (text == "averages") return SweepCheck::averages;
  throw std::invalid_argument("unknown check '" + std::string(text) +
                              "' (one_domination, high_domination, prefix_sums, conservation, averages)");
}

const char* to_string(SweepCheck c) {
  switch (c) {
    case SweepCheck::one_domination: return "one_domination";
    case SweepCheck::high_domination: return "high_domination";
    case SweepCheck::prefix_sums: return "prefix_sums";
    case SweepCheck::conservation: return "conservation";
    case SweepCheck::averages: return "averages";
  }
  return "one_domination";
}

std::string SweepResult::summary() const {
  std::ostringstream out;
  if (averaged) {
    out << violations << " radii where the average differs from |A||B|/q\n";
    for (const auto& t : tallies)
      out << "  r=" << t.radius << ": averaged over " << t.rules << " rules" << (t.violations ? ", differs" : "")
          << "\n";
    return out.str();
  }
  out << violations << " violations / " << surjective << " surjective rules\n";
  for (const auto& t : tallies)
    out << "  r=" << t.radius << ": " << t.rules << " rules, " << t.surjective << " surjective, " << t.violations
        << " violations\n";
  return out.str();
}

namespace {

struct RuleRows {
  std::string text;
  bool surjective = false;
  bool violated = false;
};

void emit_row(std::ostringstream& out, const LocalRule& rule, const SymbolSet& a, const SymbolSet& b,
              const std::string& c_raw, const Rational& normalized, bool holds, const std::string& detail) {
  out << format_table(rule) << ',' << csv_field(a.to_string()) << ',' << csv_field(b.to_string()) << ','
      << a.size() << ',' << b.size() << ',' << rule.radius() << ',' << c_raw << ',' << to_string(normalized) << ','
      << format_float(to_double(normalized)) << ',' << (holds ? "true" : "false") << ',' << csv_field(detail)
      << '\n';
}

std::vector<SymbolSet> selected_sets(const SweepConfig& config, int q) {
  if (config.a_text) return {SymbolSet::parse(q, *config.a_text)};
  if (config.check == SweepCheck::prefix_sums) return {SymbolSet::of(q, {1})};
  return SymbolSet::nonempty_proper_subsets(q);
}

RuleRows rule_rows(const SweepConfig& config, const LocalRule& rule) {
  RuleRows rows;
  rows.surjective = is_surjective(rule);
  if (!rows.surjective) return rows;
  std::ostringstream out;
  const int q = rule.alphabet();
  const int r = rule.radius();
  for (const SymbolSet& a : selected_sets(config, q)) {
    const BigInt c = correlation(rule, a, a, r, 1);
    const Rational normalized = normalized_correlation(rule, a, a, 1);
    bool holds = true;
    std::string detail;
    switch (config.check) {
      case SweepCheck::one_domination: {
        const BigInt id = identity_correlation(q, a.size(), r);
        holds = c <= id;
        detail = "identity=" + to_string(id);
        break;
      }
      case SweepCheck::high_domination: {
        const auto rep = check_high_domination(rule, a, config.m_max);
        holds = rep.m_star.has_value();
        detail = "k0=" + (rep.k0 ? std::to_string(*rep.k0) : std::string("none")) +
                 ";m_star=" + (rep.m_star ? std::to_string(*rep.m_star) : std::string("none")) +
                 ";strict=" + (rep.strict_at_k0 ? "1" : "0");
        break;
      }
      case SweepCheck::prefix_sums: {
        const auto rep = check_prefix_sum_conjecture(rule);
        holds = rep.holds;
        detail = rep.witness_n ? "witness_n=" + std::to_string(*rep.witness_n) : std::string("witness_n=none");
        break;
      }
      case SweepCheck::conservation: {
        const auto rep = conserves_symbols(rule, a, config.max_period.value_or(12));
        holds = rep.histograms_equal != rep.witness.has_value();
        detail = std::string("verdict=") + to_string(rep.verdict) + ";histograms_equal=" +
                 (rep.histograms_equal ? "1" : "0") + ";periods=" + std::to_string(rep.periods_searched);
        if (rep.witness) detail += ";witness=" + format_word(rep.witness->period) + "->" + format_word(rep.witness->image);
        break;
      }
      case SweepCheck::averages: break;
    }
    if (!holds) rows.violated = true;
    emit_row(out, rule, a, a, to_string(c), normalized, holds, detail);
  }
  rows.text = out.str();
  return rows;
}

std::string average_row(const SweepConfig& config, int q, int r, std::uint64_t& rule_count, bool& holds) {
  const SymbolSet a = SymbolSet::parse(q, config.a_text.value_or("1"));
  const SymbolSet b = SymbolSet::parse(q, config.b_text.value_or(config.a_text.value_or("1")));
  RuleSpace space(q, r, config.limit);
  rule_count = space.size();
  std::vector<Rational> values(space.size());
  parallel_for(space.size(), config.jobs,
               [&](std::size_t i) { values[i] = normalized_correlation(space.at(i), a, b, 1); });
  Rational sum = 0;
  for (const auto& v : values) sum += v;
  const Rational avg = sum / Rational(BigInt(std::to_string(space.size())));
  const Rational expected(a.size() * b.size(), q);
  holds = avg == expected;
  std::ostringstream out;
  out << "*," << csv_field(a.to_string()) << ',' << csv_field(b.to_string()) << ',' << a.size() << ',' << b.size()
      << ',' << r << ",," << to_string(avg) << ',' << format_float(to_double(avg)) << ','
      << (holds ? "true" : "false") << ',' << csv_field("expected=" + to_string(expected) + ";rules=" +
                                                      std::to_string(space.size()))
      << '\n';
  return out.str();
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  SweepResult result;
  std::string csv = std::string(kSweepHeader) + "\n";

  if (config.check == SweepCheck::averages) {
    result.averaged = true;
    for (int r = config.r_min; r <= config.r_max; ++r) {
      RadiusTally tally{r, 0, 0, 0};
      bool holds = true;
      csv += average_row(config, config.q, r, tally.rules, holds);
      tally.violations = holds ? 0 : 1;
      result.violations += tally.violations;
      result.tallies.push_back(tally);
    }
    result.csv = std::move(csv);
    return result;
  }

  // Group the rules by radius, either from the explicit list or by enumeration.
  std::map<int, std::vector<LocalRule>> listed;
  for (const auto& rule : config.rules) listed[rule.radius()].push_back(rule);
  std::vector<int> radii;
  if (config.rules.empty())
    for (int r = config.r_min; r <= config.r_max; ++r) radii.push_back(r);
  else
    for (const auto& [r, _] : listed) radii.push_back(r);

  for (int r : radii) {
    std::optional<RuleSpace> space;
    std::size_t count = 0;
    if (config.rules.empty()) {
      space.emplace(config.q, r, config.limit);
      count = space->size();
    } else {
      count = listed[r].size();
    }
    std::vector<RuleRows> rows(count);
    parallel_for(count, config.jobs, [&](std::size_t i) {
      rows[i] = rule_rows(config, space ? space->at(i) : listed[r][i]);
    });
    RadiusTally tally{r, count, 0, 0};
    for (const auto& row : rows) {
      tally.surjective += row.surjective;
      tally.violations += row.violated;
      csv += row.text;
    }
    result.surjective += tally.surjective;
    result.violations += tally.violations;
    result.tallies.push_back(tally);
  }
  result.csv = std::move(csv);
  return result;
}

FnExperimentResult run_fn_experiment(const FnExperimentConfig& config) {
  const IntervalSwap swap(make_interval_params(config.n, config.p));
  const IntervalParams& params = swap.params();
  const std::size_t length = config.window_length ? config.window_length
                                                  : 3 * static_cast<std::size_t>(params.max_medium_length());
  const double density = to_double(config.p);

  FnExperimentResult result;
  result.rows.resize(config.windows);
  parallel_for(config.windows, config.jobs, [&](std::size_t i) {
    std::mt19937_64 rng = make_stream(config.seed, 0, i);
    Word window(length);
    for (auto& s : window) s = unit_interval(rng) < density ? 1 : 0;

    const SwapResult once = swap.apply_detailed(window);
    const Word twice = swap.apply(once.window);
    FnWindowRow& row = result.rows[i];
    row.index = i;
    row.length = length;
    const auto before = find_occurrences(window, params.marker);
    row.occurrences = before.size();
    for (const auto& iv : decompose_intervals(window, params).intervals)
      row.medium += iv.complete && iv.cls == IntervalClass::medium;
    for (const auto& rw : once.rewrites) {
      (rw.into_b ? row.rewrites_into_b : row.rewrites_into_a) += 1;
      WordView part(once.window.data() + rw.free_start, rw.free_length);
      row.longest_one_run = std::max(row.longest_one_run, longest_run(part, 1));
    }
    row.involution = twice == window;
    row.occurrences_kept = find_occurrences(once.window, params.marker) == before;
  });

  std::ostringstream out;
  out << kFnHeader << '\n';
  for (const auto& row : result.rows) {
    out << row.index << ',' << row.length << ',' << row.occurrences << ',' << row.medium << ','
        << row.rewrites_into_b << ',' << row.rewrites_into_a << ',' << (row.involution ? "true" : "false") << ','
        << (row.occurrences_kept ? "true" : "false") << ',' << row.longest_one_run << '\n';
    result.involution_failures += !row.involution;
    result.occurrence_failures += !row.occurrences_kept;
    result.windows_with_111 += row.longest_one_run >= 3;
    result.windows_with_1111 += row.longest_one_run >= 4;
    result.rewrites += row.rewrites_into_a + row.rewrites_into_b;
  }
  result.csv = out.str();
  return result;
}

XorLimitResult run_xor_limit(const XorLimitConfig& config) {
  if (config.n_min < 0 || config.n_max < config.n_min) throw std::invalid_argument("bad level range");
  HierarchicalParams params;
  params.levels = config.levels;
  params.alpha = config.alpha;
  params.seed = config.seed;
  if (config.constant_p) params.copy_probs.assign(config.levels, *config.constant_p);
  const HierarchicalSampler sampler(params);

  XorLimitResult result;
  std::ostringstream out;
  out << kXorHeader << '\n';
  for (int n = config.n_min; n <= config.n_max; ++n) {
    const std::uint64_t steps = block_length(n);
    const CylinderEstimate e =
        estimate_cylinder(sampler, config.word, config.samples, steps, static_cast<std::uint64_t>(n), config.jobs);
    result.rows.push_back({n, steps, e.estimate, e.standard_error});
    out << n << ',' << steps << ',' << to_string(config.alpha) << ',' << config.samples << ','
        << format_float(e.estimate) << ',' << format_float(e.standard_error) << ',' << config.seed << '\n';
  }
  result.csv = out.str();
  return result;
}

}  // namespace symfreq
