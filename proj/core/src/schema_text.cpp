#include "shexi/schema_text.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace shexi
{

SchemaFormError::SchemaFormError(std::vector<Diagnostic> diagnostics)
: std::runtime_error([&] {
    std::string msg = "schema is not well-formed:";
    for (const auto & d : diagnostics) {
      msg += "\n  " + d.message;
    }
    return msg;
  }()),
  diagnostics_(std::move(diagnostics))
{
}

namespace
{

const std::set<std::string, std::less<>> keywords = {
  "AND",   "OR",     "NOT",   "CLOSED", "EXTRA",  "EXTENDS", "EPSILON", "IRI",    "BNODE",
  "LITERAL", "VALUE", "IN",   "MININC", "MINEXC", "MAXINC",  "MAXEXC",  "DATATYPE", "ALL"};

const std::map<std::string, std::string_view, std::less<>> datatype_names = {
  {"string", xsd::string_type}, {"integer", xsd::integer_type}, {"decimal", xsd::decimal_type},
  {"boolean", xsd::boolean_type}, {"double", xsd::double_type}, {"float", xsd::float_type}};

enum class Tok { ident, keyword, iri, literal, punct, end };

struct Token
{
  Tok kind = Tok::end;
  std::string text;
  std::size_t column = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Token> tokenize_line(std::string_view line, std::size_t line_no)
{
  std::vector<Token> out;
  std::size_t i = 0;
  auto fail = [&](const std::string & msg) { throw ParseError(line_no, i + 1, msg); };
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      break;
    }
    Token tok;
    tok.column = i + 1;
    std::size_t start = i;
    if (c == '<') {
      auto end = line.find('>', i);
      if (end == std::string_view::npos) {
        fail("unterminated IRI");
      }
      tok.kind = Tok::iri;
      tok.text = std::string(line.substr(i + 1, end - i - 1));
      if (tok.text.empty() || tok.text.find_first_of(" \t\"{}|^`\\<") != std::string::npos) {
        fail("malformed IRI");
      }
      i = end + 1;
    } else if (c == '"') {
      ++i;
      while (i < line.size() && line[i] != '"') {
        i += line[i] == '\\' ? 2 : 1;
      }
      if (i >= line.size()) {
        fail("unterminated string literal");
      }
      ++i;
      if (line.substr(i, 3) == "^^<") {
        auto end = line.find('>', i);
        if (end == std::string_view::npos) {
          fail("unterminated datatype IRI");
        }
        i = end + 1;
      }
      tok.kind = Tok::literal;
      tok.text = std::string(line.substr(start, i - start));
    } else if (digit(c) || ((c == '-' || c == '+' || c == '.') && i + 1 < line.size() &&
                            digit(line[i + 1]))) {
      ++i;
      while (i < line.size() && digit(line[i])) {
        ++i;
      }
      if (i + 1 < line.size() && line[i] == '.' && digit(line[i + 1])) {
        ++i;
        while (i < line.size() && digit(line[i])) {
          ++i;
        }
      }
      tok.kind = Tok::literal;
      tok.text = std::string(line.substr(start, i - start));
    } else if (ident_start(c)) {
      while (i < line.size() && ident_char(line[i])) {
        ++i;
      }
      tok.text = std::string(line.substr(start, i - start));
      tok.kind = keywords.contains(tok.text) ? Tok::keyword : Tok::ident;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      tok.kind = Tok::punct;
      tok.text = "->";
      i += 2;
    } else if (std::string_view("@{}[]();|*?+,.").find(c) != std::string_view::npos) {
      tok.kind = Tok::punct;
      tok.text = std::string(1, c);
      ++i;
    } else {
      fail(std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.column = line.size() + 1;
  out.push_back(end);
  return out;
}

class LineParser
{
public:
  LineParser(std::vector<Token> tokens, std::size_t line_no)
  : tokens_(std::move(tokens)), line_(line_no)
  {
  }

  const Token & peek() const { return tokens_[pos_]; }
  bool at_end() const { return peek().kind == Tok::end; }

  bool is(Tok kind, std::string_view text) const
  {
    return peek().kind == kind && peek().text == text;
  }
  bool is_punct(std::string_view text) const { return is(Tok::punct, text); }
  bool is_keyword(std::string_view text) const { return is(Tok::keyword, text); }

  Token next() { return tokens_[pos_++]; }

  [[noreturn]] void fail(const std::string & message) const
  {
    throw ParseError(line_, peek().column, message);
  }

  void expect_punct(std::string_view text)
  {
    if (!is_punct(text)) {
      fail("expected '" + std::string(text) + "'");
    }
    ++pos_;
  }

  std::string expect_ident(std::string_view what)
  {
    if (peek().kind != Tok::ident) {
      fail("expected " + std::string(what));
    }
    return next().text;
  }

  // SE := or_expr
  ShapeExprPtr parse_shape_expr()
  {
    auto left = parse_and();
    if (is_keyword("OR")) {
      ++pos_;
      return se::or_(left, parse_shape_expr());
    }
    return left;
  }

  ShapeExprPtr parse_and()
  {
    auto left = parse_not();
    if (is_keyword("AND")) {
      ++pos_;
      return se::and_(left, parse_and());
    }
    return left;
  }

  ShapeExprPtr parse_not()
  {
    if (is_keyword("NOT")) {
      ++pos_;
      return se::not_(parse_not());
    }
    return parse_primary();
  }

  ShapeExprPtr parse_primary()
  {
    if (is_punct("(")) {
      ++pos_;
      auto inner = parse_shape_expr();
      expect_punct(")");
      return inner;
    }
    if (is_punct("@")) {
      ++pos_;
      return se::ref(expect_ident("label after '@'"));
    }
    if (is_keyword("EXTENDS")) {
      ++pos_;
      std::vector<LabelName> bases;
      expect_punct("[");
      if (!is_punct("]")) {
        bases.push_back(expect_ident("extended label"));
        while (is_punct(",")) {
          ++pos_;
          bases.push_back(expect_ident("extended label"));
        }
      }
      expect_punct("]");
      return se::extends(std::move(bases), parse_shape());
    }
    if (is_keyword("CLOSED") || is_keyword("EXTRA") || is_punct("{")) {
      se::Shape h = parse_shape();
      return se::shape(h.expr, h.closed, h.extra);
    }
    return se::constraint(parse_node_constraint());
  }

  se::Shape parse_shape()
  {
    se::Shape h;
    if (is_keyword("CLOSED")) {
      ++pos_;
      h.closed = true;
    }
    if (is_keyword("EXTRA")) {
      ++pos_;
      while (!is_punct("{")) {
        if (at_end()) {
          fail("expected '{'");
        }
        h.extra.insert(parse_predicate());
      }
    }
    expect_punct("{");
    if (is_punct("}")) {
      h.expr = te::epsilon();
    } else {
      h.expr = parse_triple_expr();
    }
    expect_punct("}");
    return h;
  }

  std::string parse_predicate()
  {
    const Token & t = peek();
    if (t.kind == Tok::iri) {
      return next().text;
    }
    if (t.kind == Tok::ident) {
      return std::string(bare_predicate_prefix) + next().text;
    }
    fail("expected a predicate");
  }

  // TE := each ('|' TE)?
  TripleExprPtr parse_triple_expr()
  {
    auto left = parse_each_of();
    if (is_punct("|")) {
      ++pos_;
      return te::one_of(left, parse_triple_expr());
    }
    return left;
  }

  TripleExprPtr parse_each_of()
  {
    auto left = parse_postfix();
    if (is_punct(";")) {
      ++pos_;
      return te::each_of(left, parse_each_of());
    }
    return left;
  }

  TripleExprPtr parse_postfix()
  {
    auto e = parse_te_primary();
    while (true) {
      if (is_punct("*")) {
        ++pos_;
        e = te::star(e);
      } else if (is_punct("?")) {
        ++pos_;
        e = te::one_of(e, te::epsilon());
      } else if (is_punct("+")) {
        ++pos_;
        e = te::each_of(e, te::star(e));
      } else {
        return e;
      }
    }
  }

  TripleExprPtr parse_te_primary()
  {
    if (is_punct("(")) {
      ++pos_;
      auto inner = parse_triple_expr();
      expect_punct(")");
      return inner;
    }
    if (is_keyword("EPSILON")) {
      ++pos_;
      return te::epsilon();
    }
    std::string p = parse_predicate();
    expect_punct("@");
    return te::constraint(std::move(p), expect_ident("label after '@'"));
  }

  RdfNode parse_literal_value()
  {
    const Token & t = peek();
    if (t.kind == Tok::literal) {
      try {
        return parse_node_term(next().text);
      } catch (const ParseError & e) {
        throw ParseError(line_, t.column, e.what());
      }
    }
    if (t.kind == Tok::iri) {
      return RdfNode::iri(next().text);
    }
    fail("expected a literal value");
  }

  long double parse_bound()
  {
    const Token & t = peek();
    if (t.kind != Tok::literal || t.text.front() == '"') {
      fail("expected a numeric bound");
    }
    return std::strtold(next().text.c_str(), nullptr);
  }

  std::string parse_datatype()
  {
    if (peek().kind == Tok::iri) {
      return next().text;
    }
    if (peek().kind == Tok::ident) {
      auto it = datatype_names.find(peek().text);
      if (it == datatype_names.end()) {
        fail("unknown datatype '" + peek().text + "'");
      }
      ++pos_;
      return std::string(it->second);
    }
    fail("expected a datatype");
  }

  bool at_facet() const
  {
    if (is_punct(".")) {
      return true;
    }
    if (peek().kind != Tok::keyword) {
      return false;
    }
    static const std::set<std::string, std::less<>> starts = {
      "IRI", "BNODE", "LITERAL", "VALUE", "IN", "MININC", "MINEXC", "MAXINC", "MAXEXC", "DATATYPE"};
    return starts.contains(peek().text);
  }

  NodeConstraint parse_node_constraint()
  {
    if (!at_facet()) {
      fail("expected a shape expression");
    }
    NodeConstraint c;
    while (at_facet()) {
      Token t = next();
      if (t.text == ".") {
        c.facets.emplace_back(facet::AnyNode{});
      } else if (t.text == "IRI") {
        c.facets.emplace_back(facet::KindIs{NodeKind::iri});
      } else if (t.text == "BNODE") {
        c.facets.emplace_back(facet::KindIs{NodeKind::blank});
      } else if (t.text == "LITERAL") {
        c.facets.emplace_back(facet::KindIs{NodeKind::literal});
        if (peek().kind == Tok::iri ||
            (peek().kind == Tok::ident && datatype_names.contains(peek().text))) {
          c.facets.emplace_back(facet::DatatypeIs{parse_datatype()});
        }
      } else if (t.text == "DATATYPE") {
        c.facets.emplace_back(facet::DatatypeIs{parse_datatype()});
      } else if (t.text == "VALUE") {
        c.facets.emplace_back(facet::ValueEq{parse_literal_value()});
      } else if (t.text == "IN") {
        expect_punct("(");
        facet::ValueIn in;
        while (!is_punct(")")) {
          if (at_end()) {
            fail("expected ')'");
          }
          in.values.push_back(parse_literal_value());
        }
        ++pos_;
        c.facets.emplace_back(std::move(in));
      } else {
        facet::RangeOp op = t.text == "MININC"   ? facet::RangeOp::greater_eq
                            : t.text == "MINEXC" ? facet::RangeOp::greater
                            : t.text == "MAXINC" ? facet::RangeOp::less_eq
                                                 : facet::RangeOp::less;
        c.facets.emplace_back(facet::NumRange{op, parse_bound()});
      }
    }
    return c;
  }

private:
  std::vector<Token> tokens_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> lines_of(std::string_view text)
{
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

}  // namespace

Schema parse_schema(std::string_view text)
{
  std::map<LabelName, ShapeExprPtr> definitions;
  std::set<LabelName> extendable;
  std::set<LabelName> abstract_labels;

  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    LineParser p(tokenize_line(lines[i], i + 1), i + 1);
    if (p.at_end()) {
      continue;
    }
    bool is_abstract = false;
    if (p.peek().kind == Tok::ident && (p.peek().text == "abstract" || p.peek().text == "ABSTRACT")) {
      p.next();
      is_abstract = true;
    }
    std::size_t name_column = p.peek().column;
    LabelName name = p.expect_ident("label name");
    p.expect_punct("->");
    ShapeExprPtr def = p.parse_shape_expr();
    if (!p.at_end()) {
      p.fail("unexpected '" + p.peek().text + "' after definition");
    }
    if (definitions.contains(name)) {
      throw ParseError(i + 1, name_column, "duplicate definition of label '" + name + "'");
    }
    if (has_extendable_form(*def)) {
      extendable.insert(name);
    }
    if (is_abstract) {
      abstract_labels.insert(name);
    }
    definitions.emplace(std::move(name), std::move(def));
  }
  if (definitions.empty()) {
    throw ParseError(1, 1, "empty schema: no definitions");
  }

  Schema schema(std::move(definitions), std::move(extendable), std::move(abstract_labels));
  auto diagnostics = check_schema_form(schema);
  if (!diagnostics.empty()) {
    throw SchemaFormError(std::move(diagnostics));
  }
  return schema;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace
{

std::string predicate_text(const std::string & p)
{
  if (p.starts_with(bare_predicate_prefix)) {
    std::string_view rest = std::string_view(p).substr(bare_predicate_prefix.size());
    bool ident = !rest.empty() && ident_start(rest.front()) && !keywords.contains(rest);
    for (char c : rest) {
      ident = ident && ident_char(c);
    }
    if (ident) {
      return std::string(rest);
    }
  }
  return "<" + p + ">";
}

std::string number_text(long double v)
{
  char buf[64];
  for (int precision = 1; precision <= 24; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*Lg", precision, v);
    if (std::strtold(buf, nullptr) == v) {
      break;
    }
  }
  std::string out(buf);
  // Exponent notation is not part of the token grammar.
  if (out.find_first_of("eE") != std::string::npos) {
    std::snprintf(buf, sizeof(buf), "%.24Lf", v);
    out = buf;
    while (out.back() == '0') {
      out.pop_back();
    }
    if (out.back() == '.') {
      out.pop_back();
    }
  }
  return out;
}

bool is_bare_number(const std::string & lex, bool decimal)
{
  std::size_t i = 0;
  if (i < lex.size() && (lex[i] == '+' || lex[i] == '-')) {
    ++i;
  }
  std::size_t digits = 0;
  while (i < lex.size() && digit(lex[i])) {
    ++i;
    ++digits;
  }
  if (!decimal) {
    return digits > 0 && i == lex.size();
  }
  if (i >= lex.size() || lex[i] != '.') {
    return false;
  }
  ++i;
  std::size_t frac = 0;
  while (i < lex.size() && digit(lex[i])) {
    ++i;
    ++frac;
  }
  return frac > 0 && i == lex.size();
}

std::string value_text(const RdfNode & n)
{
  if (n.is_literal()) {
    if (n.datatype() == xsd::integer_type && is_bare_number(n.value(), false)) {
      return n.value();
    }
    if (n.datatype() == xsd::decimal_type && is_bare_number(n.value(), true)) {
      return n.value();
    }
  }
  return n.to_string();
}

std::string datatype_text(const std::string & dt)
{
  for (const auto & [name, iri] : datatype_names) {
    if (iri == dt) {
      return name;
    }
  }
  return "<" + dt + ">";
}

enum class SePrec { or_ = 1, and_ = 2, not_ = 3, primary = 4 };

SePrec prec(const ShapeExpr & s)
{
  if (std::holds_alternative<se::Or>(s.node)) return SePrec::or_;
  if (std::holds_alternative<se::And>(s.node)) return SePrec::and_;
  if (std::holds_alternative<se::Not>(s.node)) return SePrec::not_;
  return SePrec::primary;
}

enum class TePrec { one_of = 1, each_of = 2, postfix = 3, primary = 4 };

TePrec prec(const TripleExpr & e)
{
  if (std::holds_alternative<te::OneOf>(e.node)) return TePrec::one_of;
  if (std::holds_alternative<te::EachOf>(e.node)) return TePrec::each_of;
  if (std::holds_alternative<te::Star>(e.node)) return TePrec::postfix;
  return TePrec::primary;
}

std::string wrap_te(const TripleExpr & e, bool parens)
{
  return parens ? "(" + to_text(e) + ")" : to_text(e);
}

std::string wrap_se(const ShapeExpr & s, bool parens)
{
  return parens ? "(" + to_text(s) + ")" : to_text(s);
}

std::string shape_text(const se::Shape & h)
{
  std::string out;
  if (h.closed) {
    out += "CLOSED ";
  }
  if (!h.extra.empty()) {
    out += "EXTRA";
    for (const auto & p : h.extra) {
      out += " " + predicate_text(p);
    }
    out += " ";
  }
  if (std::holds_alternative<te::Epsilon>(h.expr->node)) {
    return out + "{ }";
  }
  return out + "{ " + to_text(*h.expr) + " }";
}

}  // namespace

std::string to_text(const TripleExpr & e)
{
  return std::visit(
    [&](const auto & x) -> std::string {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, te::Epsilon>) {
        return "EPSILON";
      } else if constexpr (std::is_same_v<T, te::TripleConstraint>) {
        return predicate_text(x.predicate) + " @" + x.label;
      } else if constexpr (std::is_same_v<T, te::Star>) {
        return wrap_te(*x.inner, prec(*x.inner) < TePrec::postfix) + "*";
      } else if constexpr (std::is_same_v<T, te::EachOf>) {
        return wrap_te(*x.left, prec(*x.left) <= TePrec::each_of) + " ; " +
               wrap_te(*x.right, prec(*x.right) < TePrec::each_of);
      } else {
        return wrap_te(*x.left, prec(*x.left) <= TePrec::one_of) + " | " +
               wrap_te(*x.right, prec(*x.right) < TePrec::one_of);
      }
    },
    e.node);
}

std::string to_text(const NodeConstraint & c)
{
  std::string out;
  auto add = [&](const std::string & s) {
    if (!out.empty()) {
      out += ' ';
    }
    out += s;
  };
  for (std::size_t i = 0; i < c.facets.size(); ++i) {
    const Facet & f = c.facets[i];
    if (const auto * k = std::get_if<facet::KindIs>(&f)) {
      if (k->kind == NodeKind::literal) {
        std::string text = "LITERAL";
        if (i + 1 < c.facets.size()) {
          if (const auto * dt = std::get_if<facet::DatatypeIs>(&c.facets[i + 1])) {
            text += " " + datatype_text(dt->datatype);
            ++i;
          }
        }
        add(text);
      } else {
        add(k->kind == NodeKind::iri ? "IRI" : "BNODE");
      }
    } else if (std::holds_alternative<facet::AnyNode>(f)) {
      add(".");
    } else if (const auto * dt = std::get_if<facet::DatatypeIs>(&f)) {
      add("DATATYPE <" + dt->datatype + ">");
    } else if (const auto * eq = std::get_if<facet::ValueEq>(&f)) {
      add("VALUE " + value_text(eq->value));
    } else if (const auto * in = std::get_if<facet::ValueIn>(&f)) {
      std::string text = "IN (";
      for (const auto & v : in->values) {
        text += " " + value_text(v);
      }
      add(text + " )");
    } else if (const auto * r = std::get_if<facet::NumRange>(&f)) {
      const char * kw = r->op == facet::RangeOp::greater_eq ? "MININC"
                        : r->op == facet::RangeOp::greater  ? "MINEXC"
                        : r->op == facet::RangeOp::less_eq  ? "MAXINC"
                                                            : "MAXEXC";
      add(std::string(kw) + " " + number_text(r->bound));
    }
  }
  return out;
}

std::string to_text(const ShapeExpr & s)
{
  return std::visit(
    [&](const auto & x) -> std::string {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Constraint>) {
        return to_text(x.constraint);
      } else if constexpr (std::is_same_v<T, se::Ref>) {
        return "@" + x.label;
      } else if constexpr (std::is_same_v<T, se::Not>) {
        return "NOT " + wrap_se(*x.inner, prec(*x.inner) < SePrec::not_);
      } else if constexpr (std::is_same_v<T, se::Shape>) {
        return shape_text(x);
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        std::string bases;
        for (const auto & b : x.bases) {
          bases += (bases.empty() ? "" : ",") + b;
        }
        return "EXTENDS [" + bases + "] " + shape_text(x.shape);
      } else if constexpr (std::is_same_v<T, se::And>) {
        return wrap_se(*x.left, prec(*x.left) <= SePrec::and_) + " AND " +
               wrap_se(*x.right, prec(*x.right) < SePrec::and_);
      } else {
        return wrap_se(*x.left, prec(*x.left) <= SePrec::or_) + " OR " +
               wrap_se(*x.right, prec(*x.right) < SePrec::or_);
      }
    },
    s.node);
}

std::string serialize_schema(const Schema & s)
{
  std::ostringstream out;
  for (const auto & [name, def] : s.definitions()) {
    if (s.is_abstract(name)) {
      out << "abstract ";
    }
    out << name << " -> " << to_text(*def) << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Shape maps
// ---------------------------------------------------------------------------

std::vector<ShapeMapRequest> parse_shape_map(std::string_view text, const Schema & s)
{
  std::vector<ShapeMapRequest> out;
  auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      continue;
    }
    auto at = line.rfind('@');
    if (at == std::string_view::npos) {
      throw ParseError(i + 1, first + 1, "expected 'node @ Label'");
    }
    auto trim = [](std::string_view v) {
      auto b = v.find_first_not_of(" \t\r");
      auto e = v.find_last_not_of(" \t\r");
      return b == std::string_view::npos ? std::string_view{} : v.substr(b, e - b + 1);
    };
    std::string_view node_text = trim(line.substr(0, at));
    std::string_view label_text = trim(line.substr(at + 1));
    if (auto hash = label_text.find('#'); hash != std::string_view::npos) {
      label_text = trim(label_text.substr(0, hash));
    }
    if (node_text.empty()) {
      throw ParseError(i + 1, first + 1, "missing node");
    }

    std::optional<RdfNode> node;
    bool bare = ident_start(node_text.front()) && !node_text.starts_with("_:");
    for (char c : node_text) {
      bare = bare && (ident_char(c) || c == ':' || c == '/' || c == '.' || c == '-');
    }
    if (bare) {
      node = RdfNode::iri(std::string(node_text));
    } else {
      try {
        node = parse_node_term(node_text);
      } catch (const std::exception & e) {
        throw ParseError(i + 1, first + 1, std::string("unparseable node: ") + e.what());
      }
    }

    ShapeMapRequest req{*node, std::nullopt};
    if (label_text != "ALL") {
      if (!s.has_label(std::string(label_text))) {
        throw ParseError(i + 1, at + 2, "unknown label '" + std::string(label_text) + "'");
      }
      req.label = std::string(label_text);
    }
    out.push_back(std::move(req));
  }
  return out;
}

}  // namespace shexi
