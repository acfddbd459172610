#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shexi/rdf.hpp"
#include "shexi/schema.hpp"

namespace shexi
{

/// Schema text that parsed but violates the schema invariants.
class SchemaFormError : public std::runtime_error
{
public:
  explicit SchemaFormError(std::vector<Diagnostic> diagnostics);

  const std::vector<Diagnostic> & diagnostics() const { return diagnostics_; }

private:
  std::vector<Diagnostic> diagnostics_;
};

/// Bare predicate identifiers expand to `<urn:p:ident>`.
inline constexpr std::string_view bare_predicate_prefix = "urn:p:";

/// Parses `.shexi` text: one `[abstract] Name -> SE` definition per line.
/// X is every label whose definition starts with EXTENDS; A comes from `abstract`.
/// Throws ParseError on syntax errors and SchemaFormError on invariant violations.
Schema parse_schema(std::string_view text);

/// Canonical text form; parse_schema(serialize_schema(s)) is structurally equal to s.
std::string serialize_schema(const Schema & s);

std::string to_text(const ShapeExpr & s);
std::string to_text(const TripleExpr & e);
std::string to_text(const NodeConstraint & c);

struct ShapeMapRequest
{
  RdfNode node;
  /// nullopt stands for ALL.
  std::optional<LabelName> label;

  bool is_all() const { return !label.has_value(); }
};

/// One `node @ Label` or `node @ ALL` per line. Bare node tokens are IRIs.
std::vector<ShapeMapRequest> parse_shape_map(std::string_view text, const Schema & s);

}  // namespace shexi
