#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "shexi/rdf.hpp"

namespace shexi
{

using LabelName = std::string;

enum class LabelKind { simple, extendable };

struct Label
{
  LabelName name;
  LabelKind kind = LabelKind::simple;

  auto operator<=>(const Label &) const = default;
};

// ---------------------------------------------------------------------------
// Node constraints: a closed facet language, evaluated as a conjunction.
// ---------------------------------------------------------------------------

namespace facet
{
struct AnyNode
{
  auto operator<=>(const AnyNode &) const = default;
};
struct KindIs
{
  NodeKind kind;
  auto operator<=>(const KindIs &) const = default;
};
struct DatatypeIs
{
  std::string datatype;
  auto operator<=>(const DatatypeIs &) const = default;
};
struct ValueEq
{
  RdfNode value;
  auto operator<=>(const ValueEq &) const = default;
};
struct ValueIn
{
  std::vector<RdfNode> values;
  auto operator<=>(const ValueIn &) const = default;
};
enum class RangeOp { less, less_eq, greater, greater_eq };
struct NumRange
{
  RangeOp op;
  long double bound;
  auto operator<=>(const NumRange &) const = default;
};
}  // namespace facet

using Facet = std::variant<
  facet::AnyNode, facet::KindIs, facet::DatatypeIs, facet::ValueEq, facet::ValueIn, facet::NumRange>;

struct NodeConstraint
{
  std::vector<Facet> facets;  // non-empty

  bool operator==(const NodeConstraint &) const = default;
};

/// True iff every facet holds on n. Numeric facets are false on non-numeric nodes.
bool eval_node_constraint(const NodeConstraint & c, const RdfNode & n);

// ---------------------------------------------------------------------------
// Triple expressions
// ---------------------------------------------------------------------------

struct TripleExpr;
using TripleExprPtr = std::shared_ptr<const TripleExpr>;

namespace te
{
struct Epsilon
{
};
struct TripleConstraint
{
  std::string predicate;
  LabelName label;
};
struct OneOf
{
  TripleExprPtr left, right;
};
struct EachOf
{
  TripleExprPtr left, right;
};
struct Star
{
  TripleExprPtr inner;
};

TripleExprPtr epsilon();
TripleExprPtr constraint(std::string predicate, LabelName label);
TripleExprPtr one_of(TripleExprPtr left, TripleExprPtr right);
TripleExprPtr each_of(TripleExprPtr left, TripleExprPtr right);
TripleExprPtr star(TripleExprPtr inner);
}  // namespace te

struct TripleExpr
{
  std::variant<te::Epsilon, te::TripleConstraint, te::OneOf, te::EachOf, te::Star> node;
};

/// Structural equality (ignores node identity).
bool equal(const TripleExpr & a, const TripleExpr & b);

// ---------------------------------------------------------------------------
// Shape expressions
// ---------------------------------------------------------------------------

struct ShapeExpr;
using ShapeExprPtr = std::shared_ptr<const ShapeExpr>;

namespace se
{
struct Constraint
{
  NodeConstraint constraint;
};
struct Ref
{
  LabelName label;
};
struct And
{
  ShapeExprPtr left, right;
};
struct Or
{
  ShapeExprPtr left, right;
};
struct Not
{
  ShapeExprPtr inner;
};
/// `[closed] [extra P] { e }`
struct Shape
{
  bool closed = false;
  std::set<std::string> extra;
  TripleExprPtr expr;
};
/// `extends X h`
struct ShapeWithExtends
{
  std::vector<LabelName> bases;
  Shape shape;
};

ShapeExprPtr constraint(NodeConstraint c);
ShapeExprPtr ref(LabelName label);
ShapeExprPtr and_(ShapeExprPtr left, ShapeExprPtr right);
ShapeExprPtr or_(ShapeExprPtr left, ShapeExprPtr right);
ShapeExprPtr not_(ShapeExprPtr inner);
ShapeExprPtr shape(TripleExprPtr expr, bool closed = false, std::set<std::string> extra = {});
ShapeExprPtr extends(std::vector<LabelName> bases, Shape shape);
ShapeExprPtr extends(std::vector<LabelName> bases, TripleExprPtr expr);
}  // namespace se

struct ShapeExpr
{
  std::variant<se::Constraint, se::Ref, se::And, se::Or, se::Not, se::Shape, se::ShapeWithExtends>
    node;
};

bool equal(const ShapeExpr & a, const ShapeExpr & b);

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

class SchemaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// S = (Y, X, def, A). Built once, then immutable.
class Schema
{
public:
  Schema() = default;

  /// Labels whose kind is extendable form X; `abstract_labels` should be a
  /// subset of them (check_schema_form reports it otherwise).
  Schema(std::map<LabelName, ShapeExprPtr> definitions, std::set<LabelName> extendable,
         std::set<LabelName> abstract_labels);

  const std::set<LabelName> & simple_labels() const { return simple_; }
  const std::set<LabelName> & extendable_labels() const { return extendable_; }
  const std::set<LabelName> & abstract_labels() const { return abstract_; }
  /// Y ∪ X in name order.
  std::vector<LabelName> labels() const;
  std::vector<Label> typed_labels() const;

  bool has_label(const LabelName & z) const { return definitions_.contains(z); }
  bool is_extendable(const LabelName & z) const { return extendable_.contains(z); }
  bool is_abstract(const LabelName & z) const { return abstract_.contains(z); }

  /// def(z); throws SchemaError on an unknown label.
  const ShapeExpr & definition(const LabelName & z) const;
  ShapeExprPtr definition_ptr(const LabelName & z) const;
  const std::map<LabelName, ShapeExprPtr> & definitions() const { return definitions_; }

  /// The leading `extends X h` of an extendable definition, or nullptr when
  /// the definition does not have the extendable form.
  const se::ShapeWithExtends * leading_extends(const LabelName & x) const;

private:
  std::map<LabelName, ShapeExprPtr> definitions_;
  std::set<LabelName> simple_;
  std::set<LabelName> extendable_;
  std::set<LabelName> abstract_;
};

/// Structural schema equality (same label sets and structurally equal definitions).
bool equal(const Schema & a, const Schema & b);

// ---------------------------------------------------------------------------
// Syntactic helpers
// ---------------------------------------------------------------------------

/// Triple-constraint sub-expressions of e, in left-to-right order (a node
/// occurring twice is listed once).
std::vector<const te::TripleConstraint *> tcs(const TripleExpr & e);

std::set<std::string> props_of_expr(const TripleExpr & e);
std::set<std::string> props_of_set(std::span<const Triple> m);

/// Triple expression of the leading shape of def(x). Throws if x is not extendable.
TripleExprPtr ext_te(const Schema & s, const LabelName & x);
/// Conjunct after `and` in def(x), when present. Throws if x is not extendable.
ShapeExprPtr restr(const Schema & s, const LabelName & x);

/// True iff s has the form `extends X h` or `extends X h and u`.
bool has_extendable_form(const ShapeExpr & s);

/// Every label referenced (by `@z` or in a triple constraint) anywhere in s.
std::set<LabelName> referenced_labels(const ShapeExpr & s);

struct Diagnostic
{
  LabelName label;
  std::string message;
};

/// Empty iff every schema invariant holds.
std::vector<Diagnostic> check_schema_form(const Schema & s);

}  // namespace shexi
