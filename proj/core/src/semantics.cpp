#include "gradarg/semantics.hpp"

#include "gradarg/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace gradarg {

std::string_view to_string(SemanticsKind kind) noexcept {
  switch (kind) {
    case SemanticsKind::QuadraticEnergy: return "qe";
    case SemanticsKind::DFQuAD: return "dfquad";
    case SemanticsKind::EulerBased: return "euler";
  }
  return "?";
}

SemanticsKind parse_semantics(std::string_view text) {
  if (text == "qe" || text == "quadratic_energy" || text == "QuadraticEnergy") return SemanticsKind::QuadraticEnergy;
  if (text == "dfquad" || text == "df-quad" || text == "DFQuAD") return SemanticsKind::DFQuAD;
  if (text == "euler" || text == "euler_based" || text == "EulerBased") return SemanticsKind::EulerBased;
  throw Error(ErrorCode::InvalidArgument, "unknown semantics '" + std::string(text) + "'");
}

void EvalConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (max_iterations < 1) throw Error(ErrorCode::InvalidArgument, "max_iterations must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw Error(ErrorCode::InvalidArgument, "damping must lie in (0,1]");
}

double StrengthMap::at(const ArgumentId& id) const {
  auto it = values.find(id);
  if (it == values.end()) throw Error(ErrorCode::UnknownArgument, "no strength for '" + id + "'");
  return it->second;
}

namespace {

void check_base(double base) {
  if (!(base >= 0.0 && base <= 1.0)) throw Error(ErrorCode::BadScore, "base score outside [0,1]");
}

}  // namespace

double influence_qe(double base, double energy) {
  check_base(base);
  const double sq = energy * energy;
  const double h = sq / (1.0 + sq);
  return energy <= 0.0 ? base - base * h : base + (1.0 - base) * h;
}

double influence_euler(double base, double energy) {
  check_base(base);
  return 1.0 - (1.0 - base * base) / (1.0 + base * std::exp(energy));
}

double influence_dfquad(double base, double attack, double support) {
  check_base(base);
  return attack >= support ? base - base * (attack - support) : base + (1.0 - base) * (support - attack);
}

double aggregate(const Framework& f, const StrengthMap& strengths, const ArgumentId& arg) {
  f.at(arg);
  double energy = 0.0;
  for (const auto& r : f.relations()) {
    if (r.target != arg || !strengths.contains(r.source)) continue;
    const double s = strengths.at(r.source);
    energy += r.polarity == Polarity::Support ? s : -s;
  }
  return energy;
}

double net_aggregate(const Framework& f, const StrengthMap& strengths, const ArgumentId& arg, SemanticsKind kind) {
  if (kind != SemanticsKind::DFQuAD) return aggregate(f, strengths, arg);
  f.at(arg);
  double keep_attack = 1.0;
  double keep_support = 1.0;
  for (const auto& r : f.relations()) {
    if (r.target != arg || !strengths.contains(r.source)) continue;
    (r.polarity == Polarity::Attack ? keep_attack : keep_support) *= 1.0 - strengths.at(r.source);
  }
  return (1.0 - keep_support) - (1.0 - keep_attack);
}

CompiledGraph::CompiledGraph(const Framework& f) {
  ids_.reserve(f.arguments().size());
  for (const auto& [id, a] : f.arguments()) {
    index_[id] = ids_.size();
    ids_.push_back(id);
    base_.push_back(a.base_score);
  }
  relations_ = f.relations();
  incoming_.resize(ids_.size());
  std::vector<std::size_t> indegree(ids_.size(), 0);
  std::vector<std::vector<std::size_t>> outgoing(ids_.size());
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const auto s = index_.at(relations_[i].source);
    const auto t = index_.at(relations_[i].target);
    incoming_[t].push_back({s, relations_[i].polarity, i});
    outgoing[s].push_back(t);
    ++indegree[t];
  }
  // Kahn's algorithm; the min-heap keeps the order independent of insertion history.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < ids_.size(); ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  while (!ready.empty()) {
    const auto v = ready.top();
    ready.pop();
    topo_.push_back(v);
    for (auto t : outgoing[v]) {
      if (--indegree[t] == 0) ready.push(t);
    }
  }
  acyclic_ = topo_.size() == ids_.size();
}

std::size_t CompiledGraph::index_of(const ArgumentId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownArgument, "unknown argument '" + id + "'");
  return it->second;
}

double CompiledGraph::update(SemanticsKind kind, std::size_t v, std::span<const double> base,
                             std::span<const char> argument_on, std::span<const char> relation_on,
                             std::span<const double> strengths) const {
  double energy = 0.0;
  double keep_attack = 1.0;
  double keep_support = 1.0;
  for (const auto& e : incoming_[v]) {
    if (!relation_on.empty() && !relation_on[e.relation]) continue;
    if (!argument_on.empty() && !argument_on[e.source]) continue;
    const double s = strengths[e.source];
    if (kind == SemanticsKind::DFQuAD) {
      (e.polarity == Polarity::Attack ? keep_attack : keep_support) *= 1.0 - s;
    } else {
      energy += e.polarity == Polarity::Support ? s : -s;
    }
  }
  switch (kind) {
    case SemanticsKind::QuadraticEnergy: return influence_qe(base[v], energy);
    case SemanticsKind::EulerBased: return influence_euler(base[v], energy);
    case SemanticsKind::DFQuAD: return influence_dfquad(base[v], 1.0 - keep_attack, 1.0 - keep_support);
  }
  return base[v];
}

CompiledGraph::Stats CompiledGraph::evaluate(SemanticsKind kind, const EvalConfig& config, std::span<const double> base,
                                             std::span<const char> argument_on, std::span<const char> relation_on,
                                             std::span<double> out) const {
  if (base.empty()) base = base_;
  const auto enabled = [&](std::size_t v) { return argument_on.empty() || argument_on[v]; };

  const bool topological = config.mode == EvalMode::Topological || (config.mode == EvalMode::Auto && acyclic_);
  if (topological) {
    if (!acyclic_) throw Error(ErrorCode::Cycle, "topological evaluation requested on a cyclic graph");
    for (auto v : topo_) {
      if (enabled(v)) out[v] = update(kind, v, base, argument_on, relation_on, out);
    }
    return {1, true};
  }

  // Synchronous damped iteration starting from the base scores.
  std::vector<double> current(base.begin(), base.end());
  std::vector<double> next(current.size());
  Stats stats{0, false};
  for (int it = 0; it < config.max_iterations; ++it) {
    double delta = 0.0;
    for (std::size_t v = 0; v < size(); ++v) {
      if (!enabled(v)) {
        next[v] = current[v];
        continue;
      }
      const double target = update(kind, v, base, argument_on, relation_on, current);
      next[v] = current[v] + config.damping * (target - current[v]);
      delta = std::max(delta, std::abs(next[v] - current[v]));
    }
    current.swap(next);
    stats.iterations = static_cast<std::size_t>(it) + 1;
    if (delta < config.epsilon) {
      stats.converged = true;
      break;
    }
  }
  for (std::size_t v = 0; v < size(); ++v) {
    if (enabled(v)) out[v] = current[v];
  }
  return stats;
}

StrengthMap evaluate(const Framework& f, SemanticsKind kind, const EvalConfig& config) {
  config.validate();
  const CompiledGraph graph(active_subframework(f));
  std::vector<double> out(graph.size(), 0.0);
  const auto stats = graph.evaluate(kind, config, {}, {}, {}, out);
  StrengthMap result;
  result.iterations = stats.iterations;
  result.converged = stats.converged;
  for (std::size_t v = 0; v < graph.size(); ++v) result.values[graph.ids()[v]] = out[v];
  return result;
}

}  // namespace gradarg
