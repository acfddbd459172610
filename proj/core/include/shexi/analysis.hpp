#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "shexi/schema.hpp"

namespace shexi
{

class AnalysisError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// H_S: extendable labels with an edge child -> parent for every label in the
/// leading EXTENDS set of the child's definition.
struct ExtensionHierarchy
{
  std::set<LabelName> nodes;
  std::set<std::pair<LabelName, LabelName>> edges;

  std::vector<LabelName> parents(const LabelName & x) const;
  std::vector<LabelName> children(const LabelName & x) const;
};

ExtensionHierarchy build_hierarchy(const Schema & s);

/// A directed cycle as a closed label sequence (first == last), or empty.
std::vector<LabelName> find_cycle(const ExtensionHierarchy & h);
/// Like H_S, but with an edge z -> x' for every x' named in any EXTENDS
/// anywhere in def(z). Rule-18 evaluation recurses along these edges.
ExtensionHierarchy build_extends_reference_graph(const Schema & s);
bool is_acyclic(const ExtensionHierarchy & h);

/// Reflexive-transitive closures. Throw AnalysisError on a cyclic hierarchy.
std::set<LabelName> ancestors(const ExtensionHierarchy & h, const LabelName & x);
std::set<LabelName> descendants(const ExtensionHierarchy & h, const LabelName & x);
std::set<LabelName> ancestors_of_set(const ExtensionHierarchy & h, const std::set<LabelName> & xs);
/// Labels reachable from xs along parent edges (xs included); tolerates cycles.
std::set<LabelName> reachable_ancestors(const ExtensionHierarchy & h, const std::set<LabelName> & xs);

/// A syntactic sub-expression: either a shape expression or a triple expression node.
using SubExpr = std::variant<const ShapeExpr *, const TripleExpr *>;

/// Sub-expressions of s occurring under an odd number of NOT operators.
std::vector<SubExpr> neg_sub_expr(const ShapeExpr & s);

enum class DepKind { extends, dep, shape_neg, extra_neg };

std::string_view to_string(DepKind k);
inline bool is_negative(DepKind k) { return k == DepKind::shape_neg || k == DepKind::extra_neg; }

struct DepEdge
{
  LabelName from;
  LabelName to;
  DepKind kind;

  auto operator<=>(const DepEdge &) const = default;
};

/// D_S over Y ∪ X.
struct DependencyGraph
{
  std::set<LabelName> nodes;
  std::set<DepEdge> edges;

  bool has(const LabelName & from, const LabelName & to, DepKind kind) const
  {
    return edges.contains(DepEdge{from, to, kind});
  }
  std::vector<DepEdge> out_edges(const LabelName & from) const;
};

DependencyGraph build_dependency_graph(const Schema & s);

/// Strongly connected components of D_S in reverse topological order
/// (every edge leaves a component for the same or an earlier one).
std::vector<std::vector<LabelName>> strongly_connected_components(const DependencyGraph & d);

/// A closed label sequence (first == last). For dependency cycles `kinds[i]`
/// labels the edge labels[i] -> labels[i+1]; hierarchy cycles leave it empty.
struct Cycle
{
  std::vector<LabelName> labels;
  std::vector<DepKind> kinds;

  std::string to_string() const;
};

struct WellDefinedness
{
  enum class Verdict { ok, cyclic_hierarchy, negative_cycle };

  Verdict verdict = Verdict::ok;
  /// One cycle per offending edge; empty when ok.
  std::vector<Cycle> witnesses;

  bool ok() const { return verdict == Verdict::ok; }
  std::string describe() const;
};

std::string_view to_string(WellDefinedness::Verdict v);

WellDefinedness check_well_defined(const Schema & s);

struct Stratification
{
  std::map<LabelName, int> assignment;
  int stratum_count = 0;

  int operator()(const LabelName & z) const { return assignment.at(z); }
  std::vector<LabelName> labels_on(int stratum) const;

  bool operator==(const Stratification &) const = default;
};

enum class StratificationPolicy {
  /// Fewest strata: a component sits one above its highest negative target.
  minimal,
  /// One stratum per strongly connected component.
  finest
};

/// Throws AnalysisError when the schema is not well-defined.
Stratification stratify(const Schema & s, StratificationPolicy policy = StratificationPolicy::minimal);

/// Empty iff sigma is a stratification of s with active range [1..k].
std::vector<std::string> check_stratification(const Schema & s, const Stratification & sigma);

/// S^sigma_i: the schema restricted to labels on strata <= i.
Schema restrict_schema(const Schema & s, const Stratification & sigma, int i);

std::string hierarchy_dot(const ExtensionHierarchy & h);
std::string dependency_dot(const DependencyGraph & d);

}  // namespace shexi
