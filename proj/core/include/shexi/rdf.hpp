#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <utility>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shexi
{

namespace xsd
{
inline constexpr std::string_view string_type = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view integer_type = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view decimal_type = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view double_type = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view float_type = "http://www.w3.org/2001/XMLSchema#float";
inline constexpr std::string_view boolean_type = "http://www.w3.org/2001/XMLSchema#boolean";
}  // namespace xsd

enum class NodeKind { iri, blank, literal };

/// An RDF term. Equality and ordering are structural; literals compare by
/// lexical form and datatype, never by value.
class RdfNode
{
public:
  static RdfNode iri(std::string value);
  static RdfNode blank(std::string label);
  static RdfNode literal(std::string lexical, std::string datatype = std::string(xsd::string_type));

  NodeKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == NodeKind::iri; }
  bool is_blank() const { return kind_ == NodeKind::blank; }
  bool is_literal() const { return kind_ == NodeKind::literal; }

  /// IRI string, blank label, or literal lexical form.
  const std::string & value() const { return value_; }
  /// Datatype IRI; empty for IRIs and blank nodes.
  const std::string & datatype() const { return datatype_; }

  /// N-Triples rendering (`<iri>`, `_:b`, `"lex"` or `"lex"^^<dt>`).
  std::string to_string() const;

  auto operator<=>(const RdfNode &) const = default;
  bool operator==(const RdfNode &) const = default;

private:
  RdfNode(NodeKind kind, std::string value, std::string datatype)
  : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype))
  {
  }

  NodeKind kind_ = NodeKind::iri;
  std::string value_;
  std::string datatype_;
};

struct Triple
{
  RdfNode subject;
  std::string predicate;
  RdfNode object;

  Triple(RdfNode s, std::string p, RdfNode o);

  auto operator<=>(const Triple &) const = default;
  bool operator==(const Triple &) const = default;
};

std::string to_string(const Triple & t);

/// A set of triples sharing one subject. The empty set has no subject.
using NeighbourhoodSet = std::vector<Triple>;

/// Immutable set of triples. Triples are kept sorted, so every
/// neighbourhood is a contiguous run.
class Graph
{
public:
  Graph() = default;
  explicit Graph(std::vector<Triple> triples);

  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  /// All subjects and objects, sorted.
  const std::vector<RdfNode> & nodes() const { return nodes_; }
  bool has_node(const RdfNode & n) const;

  /// neigh_G(n); empty when n is not a subject.
  std::span<const Triple> neighbourhood(const RdfNode & n) const;

  /// Nodes with a non-empty neighbourhood, sorted.
  std::vector<RdfNode> subjects() const;

private:
  std::vector<Triple> triples_;
  std::vector<RdfNode> nodes_;
  // subject -> (offset, count) into triples_; offsets keep copies valid.
  std::map<RdfNode, std::pair<std::size_t, std::size_t>> index_;
};

NeighbourhoodSet neighbourhood(const Graph & g, const RdfNode & n);

class ParseError : public std::runtime_error
{
public:
  ParseError(std::size_t line, std::size_t column, const std::string & message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// Line-oriented N-Triples subset: `<s> <p> <o> .`, `_:b` subjects and
/// objects, `"lex"`, `"lex"^^<dt>`, and bare integer/decimal objects.
Graph parse_graph(std::string_view text);

/// One statement per line in sorted triple order; parse_graph round-trips it.
std::string serialize_graph(const Graph & g);

/// Parses a single term in graph syntax (used by shape maps and schema
/// literals). Bare numerals become integer or decimal literals.
RdfNode parse_node_term(std::string_view token);

/// Numeric value of a literal with a numeric XSD datatype, if parseable.
bool numeric_value(const RdfNode & n, long double & out);

}  // namespace shexi
