#pragma once

#include "gradarg/model.hpp"

#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

namespace gradarg {

enum class SemanticsKind { QuadraticEnergy, DFQuAD, EulerBased };

std::string_view to_string(SemanticsKind kind) noexcept;
/// Accepts qe / quadratic_energy, dfquad / df-quad, euler / euler_based.
SemanticsKind parse_semantics(std::string_view text);

enum class EvalMode {
  Auto,         ///< topological on acyclic graphs, damped iteration otherwise
  Topological,  ///< throws Error(Cycle) on a cyclic graph
  Iterative,    ///< damped Jacobi iteration even when the graph is acyclic
};

struct EvalConfig {
  double epsilon = 1e-9;
  int max_iterations = 10000;
  double damping = 0.5;
  EvalMode mode = EvalMode::Auto;

  /// Throws Error(InvalidArgument) unless epsilon > 0, max_iterations >= 1,
  /// damping in (0,1].
  void validate() const;
};

struct StrengthMap {
  std::map<ArgumentId, double> values;
  std::size_t iterations = 0;
  bool converged = true;

  double at(const ArgumentId& id) const;
  bool contains(const ArgumentId& id) const { return values.count(id) != 0; }
  bool operator==(const StrengthMap&) const = default;
};

// Influence functions: map a base score and aggregated neighbour strength to
// a final strength. All throw Error(BadScore) when base is outside [0,1].
double influence_qe(double base, double energy);
double influence_euler(double base, double energy);
/// DF-QuAD combination of the attack and support aggregates (each in [0,1]).
double influence_dfquad(double base, double attack, double support);

/// Sum of supporter strengths minus sum of attacker strengths over direct
/// edges into `arg`. Throws Error(UnknownArgument).
double aggregate(const Framework& framework, const StrengthMap& strengths, const ArgumentId& arg);

/// The semantics' own net aggregate: the energy for QE and Euler-based,
/// support minus attack aggregate for DF-QuAD. Positive strengthens, negative weakens.
double net_aggregate(const Framework& framework, const StrengthMap& strengths, const ArgumentId& arg,
                     SemanticsKind kind);

/// Index-based evaluation plan over every argument of a framework. Arguments
/// and relations can be masked out per evaluation, which is what enumeration
/// and attribution need.
class CompiledGraph {
public:
  struct Edge {
    std::size_t source;
    Polarity polarity;
    std::size_t relation;
  };

  explicit CompiledGraph(const Framework& framework);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t relation_count() const noexcept { return relations_.size(); }
  const std::vector<ArgumentId>& ids() const noexcept { return ids_; }
  const std::vector<double>& base_scores() const noexcept { return base_; }
  const Relation& relation(std::size_t i) const { return relations_[i]; }
  std::size_t index_of(const ArgumentId& id) const;
  bool acyclic() const noexcept { return acyclic_; }

  struct Stats {
    std::size_t iterations = 0;
    bool converged = true;
  };

  /// Writes strengths of enabled arguments into `out` (disabled entries are
  /// left untouched). Empty masks mean "all enabled".
  Stats evaluate(SemanticsKind kind, const EvalConfig& config, std::span<const double> base,
                 std::span<const char> argument_on, std::span<const char> relation_on,
                 std::span<double> out) const;

private:
  double update(SemanticsKind kind, std::size_t v, std::span<const double> base, std::span<const char> argument_on,
                std::span<const char> relation_on, std::span<const double> strengths) const;

  std::vector<ArgumentId> ids_;
  std::map<ArgumentId, std::size_t> index_;
  std::vector<double> base_;
  std::vector<Relation> relations_;
  std::vector<std::vector<Edge>> incoming_;
  std::vector<std::size_t> topo_;
  bool acyclic_ = true;
};

/// Final strengths of the effectively active arguments.
StrengthMap evaluate(const Framework& framework, SemanticsKind kind = SemanticsKind::QuadraticEnergy,
                     const EvalConfig& config = {});

}  // namespace gradarg
