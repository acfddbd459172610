#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shexi/analysis.hpp"
#include "shexi/rdf.hpp"
#include "shexi/schema.hpp"

namespace shexi
{

/// A set of (node, label) assertions.
class Typing
{
public:
  using Pair = std::pair<RdfNode, LabelName>;

  Typing() = default;
  Typing(std::initializer_list<Pair> pairs) : pairs_(pairs) {}
  explicit Typing(std::set<Pair> pairs) : pairs_(std::move(pairs)) {}

  bool contains(const RdfNode & n, const LabelName & z) const { return pairs_.contains({n, z}); }
  bool insert(RdfNode n, LabelName z) { return pairs_.emplace(std::move(n), std::move(z)).second; }
  bool erase(const RdfNode & n, const LabelName & z) { return pairs_.erase({n, z}) > 0; }
  void merge(const Typing & other) { pairs_.insert(other.pairs_.begin(), other.pairs_.end()); }

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }
  const std::set<Pair> & pairs() const { return pairs_; }

  /// Labels assigned to n.
  std::set<LabelName> labels_of(const RdfNode & n) const;
  /// Nodes assigned to z.
  std::set<RdfNode> nodes_of(const LabelName & z) const;
  /// tau restricted to the given labels.
  Typing restricted_to(const std::set<LabelName> & labels) const;
  bool is_subset_of(const Typing & other) const;

  bool operator==(const Typing &) const = default;

private:
  std::set<Pair> pairs_;
};

struct MatchOptions
{
  /// Memoize (triple subset, expression) results inside one match.
  bool memoize = true;
};

/// M, tau |= e (triple-expression rules). M holds at most 64 triples.
bool sat_te(std::span<const Triple> m, const Typing & tau, const TripleExpr & e,
            MatchOptions options = {});

struct SplitMatching
{
  NeighbourhoodSet matching;      // M^e
  NeighbourhoodSet non_matching;  // M^¬e
};

/// Splits M into triples matching some triple constraint of e under tau, and
/// the remaining triples whose property occurs in e.
SplitMatching split_matching(std::span<const Triple> m, const Typing & tau, const TripleExpr & e);

/// Thrown when evaluation revisits a shape-with-extends call on the same
/// triple set along one recursion path. Only ill-defined schemas trigger it.
class RecursionGuardError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Evaluates the node and triple-set satisfiability relations against a
/// fixed graph and schema. Instances carry per-call scratch state: use one
/// per thread.
class Evaluator
{
public:
  Evaluator(const Graph & g, const Schema & s, MatchOptions options = {});

  /// n, tau |= s
  bool sat_node(const RdfNode & n, const Typing & tau, const ShapeExpr & s) const;

  /// M, tau |= s. `subject` is subject(M); it is passed explicitly so node
  /// constraints stay defined on the empty set.
  bool sat_set(const RdfNode & subject, std::span<const Triple> m, const Typing & tau,
               const ShapeExpr & s) const;

  const Graph & graph() const { return graph_; }
  const Schema & schema() const { return schema_; }
  const ExtensionHierarchy & hierarchy() const { return hierarchy_; }

  /// anc(X) for the bases of a shape with extends.
  const std::vector<LabelName> & ancestors_of(const se::ShapeWithExtends & t) const;

  /// Number of RecursionGuardError trips seen by this evaluator.
  std::size_t guard_trips() const { return guard_trips_; }

private:
  bool sat_shape(std::span<const Triple> m, const Typing & tau, const se::Shape & h) const;
  bool sat_extends(const RdfNode & subject, std::span<const Triple> m, const Typing & tau,
                   const se::ShapeWithExtends & t) const;

  struct GuardKey
  {
    const se::ShapeWithExtends * expr;
    RdfNode subject;
    std::vector<Triple> triples;

    bool operator==(const GuardKey &) const = default;
  };

  const Graph & graph_;
  const Schema & schema_;
  MatchOptions options_;
  ExtensionHierarchy hierarchy_;
  mutable std::map<const se::ShapeWithExtends *, std::vector<LabelName>> ancestor_cache_;
  mutable std::vector<GuardKey> path_;
  mutable std::size_t guard_trips_ = 0;
};

}  // namespace shexi
