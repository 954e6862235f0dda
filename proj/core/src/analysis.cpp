#include "gradarg/analysis.hpp"

#include "gradarg/dynamics.hpp"
#include "gradarg/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace gradarg {

std::string_view to_string(ScenarioFilter filter) noexcept {
  switch (filter) {
    case ScenarioFilter::All: return "all";
    case ScenarioFilter::RootActive: return "root_active";
    case ScenarioFilter::RiskRemoved: return "risk_removed";
  }
  return "?";
}

ScenarioFilter parse_filter(std::string_view text) {
  if (text == "all") return ScenarioFilter::All;
  if (text == "root_active" || text == "root-active") return ScenarioFilter::RootActive;
  if (text == "risk_removed" || text == "risk-removed" || text == "no_risk") return ScenarioFilter::RiskRemoved;
  throw Error(ErrorCode::InvalidArgument, "unknown filter '" + std::string(text) + "'");
}

std::string_view to_string(AttributionMethod method) noexcept {
  switch (method) {
    case AttributionMethod::Auto: return "auto";
    case AttributionMethod::ExactShapley: return "exact";
    case AttributionMethod::PermutationSampling: return "sampling";
  }
  return "?";
}

double DistributionTable::pct(const OptionId& option) const {
  auto it = wins.find(option);
  if (it == wins.end()) throw Error(ErrorCode::NotAnOption, "'" + option + "' is not an option of the table");
  return n ? 100.0 * static_cast<double>(it->second) / static_cast<double>(n) : 0.0;
}

double DistributionTable::pct_tie() const {
  return n ? 100.0 * static_cast<double>(ties) / static_cast<double>(n) : 0.0;
}

const AttributionEntry& AttributionTable::at(const ArgumentId& source, const ArgumentId& target) const {
  for (const auto& e : entries) {
    if (e.relation.source == source && e.relation.target == target) return e;
  }
  throw Error(ErrorCode::NotFound, "no relation " + source + " -> " + target + " in the table");
}

const SweepPoint& SweepResult::point(double tau, std::string_view group) const {
  for (const auto& p : points) {
    if (p.tau == tau && p.group == group) return p;
  }
  throw Error(ErrorCode::NotFound, "no sweep point for group '" + std::string(group) + "'");
}

namespace {

unsigned effective_jobs(unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  return jobs;
}

// Runs body(chunk, begin, end) over [0, total) split into `chunks` contiguous pieces.
void parallel_chunks(std::uint64_t total, unsigned chunks,
                     const std::function<void(unsigned, std::uint64_t, std::uint64_t)>& body) {
  chunks = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(chunks, total)));
  if (chunks == 1) {
    body(0, 0, total);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(chunks);
  for (unsigned c = 0; c < chunks; ++c) {
    const std::uint64_t begin = total * c / chunks;
    const std::uint64_t end = total * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        body(c, begin, end);
      } catch (...) {
        failures[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

struct Tally {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> wins;
  std::uint64_t ties = 0;
  double sum_gap = 0.0;
  double sum_sq = 0.0;

  explicit Tally(std::size_t options = 0) : wins(options, 0) {}

  void merge(const Tally& o) {
    n += o.n;
    for (std::size_t i = 0; i < wins.size(); ++i) wins[i] += o.wins[i];
    ties += o.ties;
    sum_gap += o.sum_gap;
    sum_sq += o.sum_sq;
  }
};

struct GroupTallies {
  Tally all, active, inactive;
  explicit GroupTallies(std::size_t options) : all(options), active(options), inactive(options) {}
  void merge(const GroupTallies& o) {
    all.merge(o.all);
    active.merge(o.active);
    inactive.merge(o.inactive);
  }
};

// Activation of every argument for one toggle assignment, in graph index space.
class ActivationPlan {
public:
  ActivationPlan(const Framework& f, const CompiledGraph& g, const std::vector<ArgumentId>& toggles) {
    const auto n = g.size();
    mode_.assign(n, Mode::Fixed);
    fixed_.assign(n, 0);
    bit_.assign(n, 0);
    sources_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      const auto& a = f.at(g.ids()[v]);
      if (a.kind == ArgumentKind::Option) {
        fixed_[v] = 1;
      } else if (!a.derived_active_from.empty()) {
        mode_[v] = Mode::Derived;
        derived_.push_back(v);
        for (const auto& s : a.derived_active_from) sources_[v].push_back(g.index_of(s));
      } else {
        fixed_[v] = a.active ? 1 : 0;
      }
    }
    std::set<ArgumentId> seen;
    for (std::size_t i = 0; i < toggles.size(); ++i) {
      const auto& id = toggles[i];
      if (!f.contains(id)) throw Error(ErrorCode::UnknownArgument, "toggle names unknown argument '" + id + "'");
      if (f.is_option(id)) throw Error(ErrorCode::InvalidArgument, "option '" + id + "' cannot be a toggle");
      if (!seen.insert(id).second) throw Error(ErrorCode::InvalidArgument, "toggle '" + id + "' listed twice");
      const auto v = g.index_of(id);
      if (mode_[v] == Mode::Fixed) {
        mode_[v] = Mode::Toggle;
        bit_[v] = i;
      }
    }
  }

  // Least fixpoint, as in effective_active.
  void resolve(std::uint64_t mask, std::vector<char>& on) const {
    for (std::size_t v = 0; v < mode_.size(); ++v) {
      switch (mode_[v]) {
        case Mode::Fixed: on[v] = fixed_[v]; break;
        case Mode::Toggle: on[v] = static_cast<char>((mask >> bit_[v]) & 1u); break;
        case Mode::Derived: on[v] = 0; break;
      }
    }
    for (bool changed = !derived_.empty(); changed;) {
      changed = false;
      for (auto v : derived_) {
        if (on[v]) continue;
        for (auto s : sources_[v]) {
          if (on[s]) {
            on[v] = 1;
            changed = true;
            break;
          }
        }
      }
    }
  }

private:
  enum class Mode { Fixed, Toggle, Derived };

  std::vector<Mode> mode_;
  std::vector<char> fixed_;
  std::vector<std::size_t> bit_;
  std::vector<std::vector<std::size_t>> sources_;
  std::vector<std::size_t> derived_;
};

GroupTallies run_enumeration(const Scenario& s, SemanticsKind kind, const EvalConfig& config, double tie_epsilon,
                             unsigned jobs, const ArgumentId& group_by) {
  config.validate();
  if (s.toggles.size() > kMaxToggles) {
    throw Error(ErrorCode::TooManyToggles, std::to_string(s.toggles.size()) + " toggles exceed the limit of " +
                                               std::to_string(kMaxToggles));
  }
  const auto& options = s.framework.options();
  if (options.size() < 2) throw Error(ErrorCode::InvalidArgument, "enumeration needs at least two options");
  const CompiledGraph graph(s.framework);
  const ActivationPlan plan(s.framework, graph, s.toggles);
  std::vector<std::size_t> opt_index;
  for (const auto& o : options) opt_index.push_back(graph.index_of(o));
  const std::size_t group_index = group_by.empty() ? graph.size() : graph.index_of(group_by);

  const std::uint64_t total = std::uint64_t{1} << s.toggles.size();
  const unsigned chunks = effective_jobs(jobs);
  std::vector<GroupTallies> partial(chunks, GroupTallies(options.size()));
  parallel_chunks(total, chunks, [&](unsigned c, std::uint64_t begin, std::uint64_t end) {
    std::vector<char> on(graph.size());
    std::vector<double> out(graph.size(), 0.0);
    auto& tallies = partial[c];
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      plan.resolve(mask, on);
      graph.evaluate(kind, config, {}, on, {}, out);
      double best = -std::numeric_limits<double>::infinity();
      for (auto v : opt_index) best = std::max(best, out[v]);
      std::size_t winners = 0;
      std::size_t winner = 0;
      for (std::size_t k = 0; k < opt_index.size(); ++k) {
        if (best - out[opt_index[k]] <= tie_epsilon) {
          ++winners;
          winner = k;
        }
      }
      const double gap = out[opt_index[0]] - out[opt_index[1]];
      auto add = [&](Tally& t) {
        ++t.n;
        if (winners == 1) {
          ++t.wins[winner];
        } else {
          ++t.ties;
        }
        t.sum_gap += gap;
        t.sum_sq += gap * gap;
      };
      add(tallies.all);
      if (group_index < graph.size()) add(on[group_index] ? tallies.active : tallies.inactive);
    }
  });
  GroupTallies merged(options.size());
  for (const auto& p : partial) merged.merge(p);
  return merged;
}

DistributionTable to_table(const Scenario& s, ScenarioFilter filter, const Tally& t) {
  DistributionTable table;
  table.scenario = s.name;
  table.filter = std::string(to_string(filter));
  table.options = s.framework.options();
  table.n = t.n;
  for (std::size_t k = 0; k < table.options.size(); ++k) table.wins[table.options[k]] = t.wins[k];
  table.ties = t.ties;
  return table;
}

}  // namespace

Scenario remove_risk(const Scenario& s, bool keep_inert) {
  std::set<ArgumentId> removed(s.risk.begin(), s.risk.end());
  for (const auto& id : removed) {
    if (!s.framework.contains(id)) throw Error(ErrorCode::UnknownArgument, "risk argument '" + id + "' is unknown");
  }
  Framework f = without_arguments(s.framework, removed);
  if (!keep_inert) {
    std::set<ArgumentId> reaches;
    for (const auto& o : f.options()) {
      const auto up = ancestors(f, o);
      reaches.insert(up.begin(), up.end());
    }
    std::set<ArgumentId> inert;
    for (const auto& [id, a] : f.arguments()) {
      if (a.kind != ArgumentKind::Option && !reaches.count(id)) inert.insert(id);
    }
    f = without_arguments(f, inert);
  }
  Scenario out;
  out.name = s.name;
  out.framework = std::move(f);
  for (const auto& t : s.toggles) {
    if (out.framework.contains(t)) out.toggles.push_back(t);
  }
  return out;
}

DistributionTable enumerate_decisions(const Scenario& s, SemanticsKind kind, const EvalConfig& config,
                                      const EnumerateOptions& options) {
  switch (options.filter) {
    case ScenarioFilter::All: {
      const auto t = run_enumeration(s, kind, config, options.tie_epsilon, options.jobs, {});
      return to_table(s, options.filter, t.all);
    }
    case ScenarioFilter::RootActive: {
      if (s.risk.empty()) throw Error(ErrorCode::InvalidArgument, "scenario names no risk argument");
      const auto t = run_enumeration(s, kind, config, options.tie_epsilon, options.jobs, s.risk.front());
      return to_table(s, options.filter, t.active);
    }
    case ScenarioFilter::RiskRemoved: {
      if (s.risk.empty()) throw Error(ErrorCode::InvalidArgument, "scenario names no risk argument");
      const auto reduced = remove_risk(s, options.keep_inert);
      const auto t = run_enumeration(reduced, kind, config, options.tie_epsilon, options.jobs, {});
      return to_table(s, options.filter, t.all);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown filter");
}

// ---------------------------------------------------------------------------
// Relation attribution

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [0, bound) by rejection; std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

constexpr std::size_t kBlock = 64;

}  // namespace

AttributionTable relation_attribution(const Framework& framework, SemanticsKind kind,
                                      const AttributionOptions& options, const EvalConfig& config) {
  config.validate();
  const Framework sub = active_subframework(framework);
  const CompiledGraph graph(sub);
  const std::size_t m = graph.relation_count();
  const auto& opts = sub.options();
  const std::size_t k = opts.size();
  std::vector<std::size_t> opt_index;
  for (const auto& o : opts) opt_index.push_back(graph.index_of(o));

  AttributionMethod method = options.method;
  if (method == AttributionMethod::Auto) {
    method = m <= kMaxExactRelations ? AttributionMethod::ExactShapley : AttributionMethod::PermutationSampling;
  }
  if (method == AttributionMethod::ExactShapley && m > kMaxExactRelations) {
    throw Error(ErrorCode::TooManyRelations, std::to_string(m) + " relations exceed the exact limit of " +
                                                 std::to_string(kMaxExactRelations));
  }
  if (method == AttributionMethod::PermutationSampling && options.samples < 2) {
    throw Error(ErrorCode::InvalidArgument, "sampling needs at least two permutations");
  }

  AttributionTable table;
  table.options = opts;
  table.method = method;
  {
    std::vector<double> out(graph.size(), 0.0);
    graph.evaluate(kind, config, {}, {}, {}, out);
    for (std::size_t j = 0; j < k; ++j) table.strength[opts[j]] = out[opt_index[j]];
    std::vector<char> none(m, 0);
    if (m > 0) graph.evaluate(kind, config, {}, {}, none, out);
    for (std::size_t j = 0; j < k; ++j) table.base[opts[j]] = out[opt_index[j]];
  }

  std::vector<double> phi(m * k, 0.0);
  std::vector<double> err(m * k, 0.0);
  const unsigned jobs = effective_jobs(options.jobs);

  if (method == AttributionMethod::ExactShapley) {
    const std::uint64_t subsets = std::uint64_t{1} << m;
    std::vector<double> value(subsets * k);
    parallel_chunks(subsets, jobs, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
      std::vector<char> rel_on(m);
      std::vector<double> out(graph.size(), 0.0);
      for (std::uint64_t mask = begin; mask < end; ++mask) {
        for (std::size_t i = 0; i < m; ++i) rel_on[i] = static_cast<char>((mask >> i) & 1u);
        graph.evaluate(kind, config, {}, {}, rel_on, out);
        for (std::size_t j = 0; j < k; ++j) value[mask * k + j] = out[opt_index[j]];
      }
    });
    // weight(s) = s! (m-s-1)! / m! = 1 / (m * C(m-1, s))
    std::vector<double> weight(m, 0.0);
    for (std::size_t s = 0; s < m; ++s) {
      double binom = 1.0;
      for (std::size_t t = 1; t <= s; ++t) binom = binom * static_cast<double>(m - 1 - s + t) / static_cast<double>(t);
      weight[s] = 1.0 / (static_cast<double>(m) * binom);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        if (mask & bit) continue;
        const double w = weight[static_cast<std::size_t>(__builtin_popcountll(mask))];
        for (std::size_t j = 0; j < k; ++j) {
          phi[i * k + j] += w * (value[(mask | bit) * k + j] - value[mask * k + j]);
        }
      }
    }
  } else {
    table.samples = options.samples;
    table.seed = options.seed;
    const std::size_t blocks = (options.samples + kBlock - 1) / kBlock;
    std::vector<std::vector<double>> block_sum(blocks), block_sq(blocks);
    parallel_chunks(blocks, jobs, [&](unsigned, std::uint64_t begin, std::uint64_t end) {
      std::vector<std::size_t> order(m);
      std::vector<char> rel_on(m);
      std::vector<double> out(graph.size(), 0.0);
      std::vector<double> prev(k), cur(k);
      for (std::uint64_t b = begin; b < end; ++b) {
        std::mt19937_64 rng(splitmix64(options.seed ^ splitmix64(b)));
        auto& sum = block_sum[b];
        auto& sq = block_sq[b];
        sum.assign(m * k, 0.0);
        sq.assign(m * k, 0.0);
        const std::size_t count = std::min(kBlock, options.samples - static_cast<std::size_t>(b) * kBlock);
        for (std::size_t p = 0; p < count; ++p) {
          for (std::size_t i = 0; i < m; ++i) order[i] = i;
          shuffle(order, rng);
          std::fill(rel_on.begin(), rel_on.end(), 0);
          for (std::size_t j = 0; j < k; ++j) prev[j] = table.base[opts[j]];
          for (auto i : order) {
            rel_on[i] = 1;
            graph.evaluate(kind, config, {}, {}, rel_on, out);
            for (std::size_t j = 0; j < k; ++j) {
              cur[j] = out[opt_index[j]];
              const double d = cur[j] - prev[j];
              sum[i * k + j] += d;
              sq[i * k + j] += d * d;
              prev[j] = cur[j];
            }
          }
        }
      }
    });
    std::vector<double> total_sq(m * k, 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t x = 0; x < m * k; ++x) {
        phi[x] += block_sum[b][x];
        total_sq[x] += block_sq[b][x];
      }
    }
    const double n = static_cast<double>(options.samples);
    for (std::size_t x = 0; x < m * k; ++x) {
      const double mean = phi[x] / n;
      const double var = std::max(0.0, (total_sq[x] - n * mean * mean) / (n - 1.0));
      phi[x] = mean;
      err[x] = std::sqrt(var / n);
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    AttributionEntry e;
    e.relation = graph.relation(i);
    for (std::size_t j = 0; j < k; ++j) {
      e.contribution[opts[j]] = phi[i * k + j];
      e.stderr_[opts[j]] = err[i * k + j];
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point");
  std::vector<double> grid;
  for (std::size_t i = 0; i < count; ++i) {
    grid.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

namespace {

SweepPoint to_point(double tau, const char* group, const std::vector<OptionId>& options, const Tally& t) {
  SweepPoint p;
  p.tau = tau;
  p.group = group;
  p.n = t.n;
  const double n = static_cast<double>(t.n);
  if (t.n > 0) {
    p.mean_gap = t.sum_gap / n;
    p.std_gap = std::sqrt(std::max(0.0, t.sum_sq / n - p.mean_gap * p.mean_gap));
    for (std::size_t k = 0; k < options.size(); ++k) p.pct[options[k]] = 100.0 * static_cast<double>(t.wins[k]) / n;
    p.pct_tie = 100.0 * static_cast<double>(t.ties) / n;
  } else {
    for (const auto& o : options) p.pct[o] = 0.0;
  }
  return p;
}

}  // namespace

SweepResult base_score_sweep(const Scenario& s, const ArgumentId& target, const std::vector<double>& grid,
                             SemanticsKind kind, const EvalConfig& config, const EnumerateOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw Error(ErrorCode::InvalidArgument, "grid value outside [0,1]");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid is not strictly increasing");
  }
  Scenario base = s;
  if (options.filter == ScenarioFilter::RiskRemoved) base = remove_risk(s, options.keep_inert);
  base.framework.at(target);

  SweepResult result;
  result.target = target;
  result.options = base.framework.options();
  result.grid = grid;
  for (double tau : grid) {
    Scenario point = base;
    point.framework = apply_edit(base.framework, EditPayload{SetBaseScore{target, tau}});
    const auto t = run_enumeration(point, kind, config, options.tie_epsilon, options.jobs, target);
    result.points.push_back(to_point(tau, "all", result.options, t.all));
    result.points.push_back(to_point(tau, "active", result.options, t.active));
    result.points.push_back(to_point(tau, "inactive", result.options, t.inactive));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string option_at(const std::vector<OptionId>& options, std::size_t i) {
  if (i >= options.size()) throw Error(ErrorCode::InvalidArgument, "CSV output needs two options");
  return options[i];
}

}  // namespace

void write_distribution_csv(std::ostream& out, const std::vector<DistributionTable>& tables, int precision) {
  out << "scenario,filter,n,pct_r,pct_nr,pct_tie\n";
  for (const auto& t : tables) {
    out << t.scenario << ',' << t.filter << ',' << t.n << ',' << fixed(t.pct(option_at(t.options, 0)), precision)
        << ',' << fixed(t.pct(option_at(t.options, 1)), precision) << ',' << fixed(t.pct_tie(), precision) << '\n';
  }
}

void write_attribution_csv(std::ostream& out, const AttributionTable& table, int precision) {
  const auto r = option_at(table.options, 0);
  const auto nr = option_at(table.options, 1);
  out << "polarity,source,target,contrib_r,contrib_nr,stderr_r,stderr_nr\n";
  for (const auto& e : table.entries) {
    out << to_string(e.relation.polarity) << ',' << e.relation.source << ',' << e.relation.target << ','
        << fixed(e.contribution.at(r), precision) << ',' << fixed(e.contribution.at(nr), precision) << ','
        << fixed(e.stderr_.at(r), precision) << ',' << fixed(e.stderr_.at(nr), precision) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& result, int precision) {
  const auto r = option_at(result.options, 0);
  const auto nr = option_at(result.options, 1);
  out << "tau,group,mean_gap,std_gap,pct_r,pct_nr,pct_tie\n";
  for (const auto& p : result.points) {
    out << fixed(p.tau, precision) << ',' << p.group << ',' << fixed(p.mean_gap, precision) << ','
        << fixed(p.std_gap, precision) << ',' << fixed(p.pct.at(r), precision) << ',' << fixed(p.pct.at(nr), precision)
        << ',' << fixed(p.pct_tie, precision) << '\n';
  }
}

}  // namespace gradarg
