#include "shexi/schema.hpp"

#include <algorithm>
#include <functional>

namespace shexi
{

// ---------------------------------------------------------------------------
// Node constraints
// ---------------------------------------------------------------------------

namespace
{

bool eval_facet(const Facet & f, const RdfNode & n)
{
  return std::visit(
    [&](const auto & v) -> bool {
      using T = std::decay_t<decltype(v)>;
      if constexpr (std::is_same_v<T, facet::AnyNode>) {
        return true;
      } else if constexpr (std::is_same_v<T, facet::KindIs>) {
        return n.kind() == v.kind;
      } else if constexpr (std::is_same_v<T, facet::DatatypeIs>) {
        return n.is_literal() && n.datatype() == v.datatype;
      } else if constexpr (std::is_same_v<T, facet::ValueEq>) {
        return n == v.value;
      } else if constexpr (std::is_same_v<T, facet::ValueIn>) {
        return std::find(v.values.begin(), v.values.end(), n) != v.values.end();
      } else {
        long double x = 0;
        if (!numeric_value(n, x)) {
          return false;
        }
        switch (v.op) {
          case facet::RangeOp::less: return x < v.bound;
          case facet::RangeOp::less_eq: return x <= v.bound;
          case facet::RangeOp::greater: return x > v.bound;
          case facet::RangeOp::greater_eq: return x >= v.bound;
        }
        return false;
      }
    },
    f);
}

}  // namespace

bool eval_node_constraint(const NodeConstraint & c, const RdfNode & n)
{
  return std::all_of(
    c.facets.begin(), c.facets.end(), [&](const Facet & f) { return eval_facet(f, n); });
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

namespace te
{
TripleExprPtr epsilon() { return std::make_shared<const TripleExpr>(TripleExpr{Epsilon{}}); }

TripleExprPtr constraint(std::string predicate, LabelName label)
{
  return std::make_shared<const TripleExpr>(
    TripleExpr{TripleConstraint{std::move(predicate), std::move(label)}});
}

TripleExprPtr one_of(TripleExprPtr left, TripleExprPtr right)
{
  return std::make_shared<const TripleExpr>(TripleExpr{OneOf{std::move(left), std::move(right)}});
}

TripleExprPtr each_of(TripleExprPtr left, TripleExprPtr right)
{
  return std::make_shared<const TripleExpr>(TripleExpr{EachOf{std::move(left), std::move(right)}});
}

TripleExprPtr star(TripleExprPtr inner)
{
  return std::make_shared<const TripleExpr>(TripleExpr{Star{std::move(inner)}});
}
}  // namespace te

namespace se
{
ShapeExprPtr constraint(NodeConstraint c)
{
  if (c.facets.empty()) {
    throw std::invalid_argument("node constraint needs at least one facet");
  }
  return std::make_shared<const ShapeExpr>(ShapeExpr{Constraint{std::move(c)}});
}

ShapeExprPtr ref(LabelName label)
{
  return std::make_shared<const ShapeExpr>(ShapeExpr{Ref{std::move(label)}});
}

ShapeExprPtr and_(ShapeExprPtr left, ShapeExprPtr right)
{
  return std::make_shared<const ShapeExpr>(ShapeExpr{And{std::move(left), std::move(right)}});
}

ShapeExprPtr or_(ShapeExprPtr left, ShapeExprPtr right)
{
  return std::make_shared<const ShapeExpr>(ShapeExpr{Or{std::move(left), std::move(right)}});
}

ShapeExprPtr not_(ShapeExprPtr inner)
{
  return std::make_shared<const ShapeExpr>(ShapeExpr{Not{std::move(inner)}});
}

ShapeExprPtr shape(TripleExprPtr expr, bool closed, std::set<std::string> extra)
{
  return std::make_shared<const ShapeExpr>(
    ShapeExpr{Shape{closed, std::move(extra), std::move(expr)}});
}

ShapeExprPtr extends(std::vector<LabelName> bases, Shape shape)
{
  return std::make_shared<const ShapeExpr>(
    ShapeExpr{ShapeWithExtends{std::move(bases), std::move(shape)}});
}

ShapeExprPtr extends(std::vector<LabelName> bases, TripleExprPtr expr)
{
  return extends(std::move(bases), Shape{false, {}, std::move(expr)});
}
}  // namespace se

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

bool equal(const TripleExpr & a, const TripleExpr & b)
{
  if (a.node.index() != b.node.index()) {
    return false;
  }
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      const auto & y = std::get<T>(b.node);
      if constexpr (std::is_same_v<T, te::Epsilon>) {
        return true;
      } else if constexpr (std::is_same_v<T, te::TripleConstraint>) {
        return x.predicate == y.predicate && x.label == y.label;
      } else if constexpr (std::is_same_v<T, te::Star>) {
        return equal(*x.inner, *y.inner);
      } else {
        return equal(*x.left, *y.left) && equal(*x.right, *y.right);
      }
    },
    a.node);
}

namespace
{
bool equal_shape(const se::Shape & x, const se::Shape & y)
{
  return x.closed == y.closed && x.extra == y.extra && equal(*x.expr, *y.expr);
}
}  // namespace

bool equal(const ShapeExpr & a, const ShapeExpr & b)
{
  if (a.node.index() != b.node.index()) {
    return false;
  }
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      const auto & y = std::get<T>(b.node);
      if constexpr (std::is_same_v<T, se::Constraint>) {
        return x.constraint == y.constraint;
      } else if constexpr (std::is_same_v<T, se::Ref>) {
        return x.label == y.label;
      } else if constexpr (std::is_same_v<T, se::Not>) {
        return equal(*x.inner, *y.inner);
      } else if constexpr (std::is_same_v<T, se::Shape>) {
        return equal_shape(x, y);
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        return x.bases == y.bases && equal_shape(x.shape, y.shape);
      } else {
        return equal(*x.left, *y.left) && equal(*x.right, *y.right);
      }
    },
    a.node);
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

Schema::Schema(std::map<LabelName, ShapeExprPtr> definitions, std::set<LabelName> extendable,
               std::set<LabelName> abstract_labels)
: definitions_(std::move(definitions)),
  extendable_(std::move(extendable)),
  abstract_(std::move(abstract_labels))
{
  for (const auto & [name, def] : definitions_) {
    if (!def) {
      throw SchemaError("label '" + name + "' has a null definition");
    }
    if (!extendable_.contains(name)) {
      simple_.insert(name);
    }
  }
}

std::vector<LabelName> Schema::labels() const
{
  std::vector<LabelName> out;
  out.reserve(definitions_.size());
  for (const auto & [name, def] : definitions_) {
    out.push_back(name);
  }
  return out;
}

std::vector<Label> Schema::typed_labels() const
{
  std::vector<Label> out;
  for (const auto & [name, def] : definitions_) {
    out.push_back({name, is_extendable(name) ? LabelKind::extendable : LabelKind::simple});
  }
  return out;
}

const ShapeExpr & Schema::definition(const LabelName & z) const { return *definition_ptr(z); }

ShapeExprPtr Schema::definition_ptr(const LabelName & z) const
{
  auto it = definitions_.find(z);
  if (it == definitions_.end()) {
    throw SchemaError("unknown label '" + z + "'");
  }
  return it->second;
}

namespace
{
const se::ShapeWithExtends * leading_extends_of(const ShapeExpr & s)
{
  if (const auto * t = std::get_if<se::ShapeWithExtends>(&s.node)) {
    return t;
  }
  if (const auto * a = std::get_if<se::And>(&s.node)) {
    return std::get_if<se::ShapeWithExtends>(&a->left->node);
  }
  return nullptr;
}
}  // namespace

const se::ShapeWithExtends * Schema::leading_extends(const LabelName & x) const
{
  if (!is_extendable(x)) {
    return nullptr;
  }
  return leading_extends_of(definition(x));
}

bool equal(const Schema & a, const Schema & b)
{
  if (a.extendable_labels() != b.extendable_labels() ||
      a.abstract_labels() != b.abstract_labels() || a.labels() != b.labels()) {
    return false;
  }
  for (const auto & [name, def] : a.definitions()) {
    if (!equal(*def, b.definition(name))) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Syntactic helpers
// ---------------------------------------------------------------------------

namespace
{
void collect_tcs(const TripleExpr & e, std::vector<const te::TripleConstraint *> & out)
{
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, te::TripleConstraint>) {
        if (std::find(out.begin(), out.end(), &x) == out.end()) {
          out.push_back(&x);
        }
      } else if constexpr (std::is_same_v<T, te::Star>) {
        collect_tcs(*x.inner, out);
      } else if constexpr (std::is_same_v<T, te::OneOf> || std::is_same_v<T, te::EachOf>) {
        collect_tcs(*x.left, out);
        collect_tcs(*x.right, out);
      }
    },
    e.node);
}
}  // namespace

std::vector<const te::TripleConstraint *> tcs(const TripleExpr & e)
{
  std::vector<const te::TripleConstraint *> out;
  collect_tcs(e, out);
  return out;
}

std::set<std::string> props_of_expr(const TripleExpr & e)
{
  std::set<std::string> out;
  for (const auto * tc : tcs(e)) {
    out.insert(tc->predicate);
  }
  return out;
}

std::set<std::string> props_of_set(std::span<const Triple> m)
{
  std::set<std::string> out;
  for (const auto & t : m) {
    out.insert(t.predicate);
  }
  return out;
}

bool has_extendable_form(const ShapeExpr & s) { return leading_extends_of(s) != nullptr; }

namespace
{
const se::ShapeWithExtends & require_extends(const Schema & s, const LabelName & x)
{
  if (!s.is_extendable(x)) {
    throw SchemaError("label '" + x + "' is not extendable");
  }
  const auto * t = s.leading_extends(x);
  if (t == nullptr) {
    throw SchemaError("definition of '" + x + "' is not an extendable shape expression");
  }
  return *t;
}
}  // namespace

TripleExprPtr ext_te(const Schema & s, const LabelName & x) { return require_extends(s, x).shape.expr; }

ShapeExprPtr restr(const Schema & s, const LabelName & x)
{
  require_extends(s, x);
  if (const auto * a = std::get_if<se::And>(&s.definition(x).node)) {
    return a->right;
  }
  return nullptr;
}

namespace
{
void collect_te_refs(const TripleExpr & e, std::set<LabelName> & out)
{
  for (const auto * tc : tcs(e)) {
    out.insert(tc->label);
  }
}

void collect_refs(const ShapeExpr & s, std::set<LabelName> & out)
{
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Ref>) {
        out.insert(x.label);
      } else if constexpr (std::is_same_v<T, se::Not>) {
        collect_refs(*x.inner, out);
      } else if constexpr (std::is_same_v<T, se::And> || std::is_same_v<T, se::Or>) {
        collect_refs(*x.left, out);
        collect_refs(*x.right, out);
      } else if constexpr (std::is_same_v<T, se::Shape>) {
        collect_te_refs(*x.expr, out);
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        collect_te_refs(*x.shape.expr, out);
      }
    },
    s.node);
}

void collect_extends_bases(const ShapeExpr & s, std::vector<LabelName> & out)
{
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Not>) {
        collect_extends_bases(*x.inner, out);
      } else if constexpr (std::is_same_v<T, se::And> || std::is_same_v<T, se::Or>) {
        collect_extends_bases(*x.left, out);
        collect_extends_bases(*x.right, out);
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        out.insert(out.end(), x.bases.begin(), x.bases.end());
      }
    },
    s.node);
}
}  // namespace

std::set<LabelName> referenced_labels(const ShapeExpr & s)
{
  std::set<LabelName> out;
  collect_refs(s, out);
  return out;
}

std::vector<Diagnostic> check_schema_form(const Schema & s)
{
  std::vector<Diagnostic> out;
  for (const auto & x : s.extendable_labels()) {
    if (!s.has_label(x)) {
      out.push_back({x, "extendable label '" + x + "' has no definition"});
    }
  }
  for (const auto & a : s.abstract_labels()) {
    if (!s.is_extendable(a)) {
      out.push_back({a, "abstract label '" + a + "' is not an extendable label"});
    }
  }
  for (const auto & [z, def] : s.definitions()) {
    for (const auto & r : referenced_labels(*def)) {
      if (!s.has_label(r)) {
        out.push_back({z, "definition of '" + z + "' references undeclared label '" + r + "'"});
      }
    }
    std::vector<LabelName> bases;
    collect_extends_bases(*def, bases);
    for (const auto & b : bases) {
      if (!s.has_label(b)) {
        out.push_back({z, "definition of '" + z + "' extends undeclared label '" + b + "'"});
      } else if (!s.is_extendable(b)) {
        out.push_back({z, "definition of '" + z + "' extends simple label '" + b + "'"});
      }
    }
    if (s.is_extendable(z) && !has_extendable_form(*def)) {
      out.push_back(
        {z, "extendable label '" + z + "' must be defined as 'EXTENDS [..] { .. } [AND ..]'"});
    }
    if (!s.is_extendable(z) && std::holds_alternative<se::ShapeWithExtends>(def->node)) {
      out.push_back({z, "simple label '" + z + "' is defined by a bare shape with extends"});
    }
  }
  return out;
}

}  // namespace shexi
