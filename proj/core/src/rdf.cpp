#include "shexi/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>

namespace shexi
{

RdfNode RdfNode::iri(std::string value)
{
  if (value.empty()) {
    throw std::invalid_argument("IRI must be non-empty");
  }
  return RdfNode(NodeKind::iri, std::move(value), {});
}

RdfNode RdfNode::blank(std::string label)
{
  if (label.empty()) {
    throw std::invalid_argument("blank node label must be non-empty");
  }
  return RdfNode(NodeKind::blank, std::move(label), {});
}

RdfNode RdfNode::literal(std::string lexical, std::string datatype)
{
  if (datatype.empty()) {
    throw std::invalid_argument("literal datatype must be non-empty");
  }
  return RdfNode(NodeKind::literal, std::move(lexical), std::move(datatype));
}

namespace
{

std::string escape_lexical(const std::string & s)
{
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string RdfNode::to_string() const
{
  switch (kind_) {
    case NodeKind::iri: return "<" + value_ + ">";
    case NodeKind::blank: return "_:" + value_;
    case NodeKind::literal:
      if (datatype_ == xsd::string_type) {
        return "\"" + escape_lexical(value_) + "\"";
      }
      return "\"" + escape_lexical(value_) + "\"^^<" + datatype_ + ">";
  }
  return {};
}

Triple::Triple(RdfNode s, std::string p, RdfNode o)
: subject(std::move(s)), predicate(std::move(p)), object(std::move(o))
{
  if (subject.is_literal()) {
    throw std::invalid_argument("triple subject cannot be a literal");
  }
  if (predicate.empty()) {
    throw std::invalid_argument("triple predicate must be a non-empty IRI");
  }
}

std::string to_string(const Triple & t)
{
  return t.subject.to_string() + " <" + t.predicate + "> " + t.object.to_string() + " .";
}

Graph::Graph(std::vector<Triple> triples) : triples_(std::move(triples))
{
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  std::set<RdfNode> nodes;
  for (const auto & t : triples_) {
    nodes.insert(t.subject);
    nodes.insert(t.object);
  }
  nodes_.assign(nodes.begin(), nodes.end());

  std::size_t i = 0;
  while (i < triples_.size()) {
    std::size_t j = i;
    while (j < triples_.size() && triples_[j].subject == triples_[i].subject) {
      ++j;
    }
    index_.emplace(triples_[i].subject, std::make_pair(i, j - i));
    i = j;
  }
}

bool Graph::has_node(const RdfNode & n) const
{
  return std::binary_search(nodes_.begin(), nodes_.end(), n);
}

std::span<const Triple> Graph::neighbourhood(const RdfNode & n) const
{
  auto it = index_.find(n);
  if (it == index_.end()) {
    return {};
  }
  return std::span<const Triple>(triples_).subspan(it->second.first, it->second.second);
}

std::vector<RdfNode> Graph::subjects() const
{
  std::vector<RdfNode> out;
  out.reserve(index_.size());
  for (const auto & [n, range] : index_) {
    out.push_back(n);
  }
  return out;
}

NeighbourhoodSet neighbourhood(const Graph & g, const RdfNode & n)
{
  auto span = g.neighbourhood(n);
  return {span.begin(), span.end()};
}

ParseError::ParseError(std::size_t line, std::size_t column, const std::string & message)
: std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
  line_(line),
  column_(column)
{
}

bool numeric_value(const RdfNode & n, long double & out)
{
  if (!n.is_literal()) {
    return false;
  }
  const auto & dt = n.datatype();
  if (dt != xsd::integer_type && dt != xsd::decimal_type && dt != xsd::double_type &&
      dt != xsd::float_type) {
    return false;
  }
  const std::string & lex = n.value();
  if (lex.empty()) {
    return false;
  }
  char * end = nullptr;
  out = std::strtold(lex.c_str(), &end);
  return end == lex.c_str() + lex.size();
}

namespace
{

bool is_iri_char(char c)
{
  auto uc = static_cast<unsigned char>(c);
  if (uc <= 0x20) {
    return false;
  }
  switch (c) {
    case '<': case '>': case '"': case '{': case '}': case '|': case '^': case '`': case '\\':
      return false;
    default:
      return true;
  }
}

/// Cursor over one line of graph or shape-map text.
class TermReader
{
public:
  TermReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_space()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool at_end()
  {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  char peek()
  {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::size_t column() const { return pos_ + 1; }

  [[noreturn]] void fail(const std::string & message) const
  {
    throw ParseError(line_, pos_ + 1, message);
  }

  void expect(char c)
  {
    if (peek() != c) {
      fail(std::string("expected '") + c + "'");
    }
    ++pos_;
  }

  std::string read_iri()
  {
    expect('<');
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '>') {
      if (!is_iri_char(text_[pos_])) {
        fail("malformed IRI: illegal character");
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) {
      fail("malformed IRI: missing '>'");
    }
    std::string value(text_.substr(start, pos_ - start));
    ++pos_;
    if (value.empty()) {
      fail("malformed IRI: empty");
    }
    return value;
  }

  std::string read_blank_label()
  {
    skip_space();
    if (text_.substr(pos_, 2) != "_:") {
      fail("expected blank node");
    }
    pos_ += 2;
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            text_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) {
      fail("empty blank node label");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  RdfNode read_literal()
  {
    expect('"');
    std::string lexical;
    while (true) {
      if (pos_ >= text_.size()) {
        fail("unterminated string literal");
      }
      char c = text_[pos_++];
      if (c == '"') {
        break;
      }
      if (c == '\\') {
        if (pos_ >= text_.size()) {
          fail("unterminated escape");
        }
        char e = text_[pos_++];
        switch (e) {
          case 'n': lexical += '\n'; break;
          case 't': lexical += '\t'; break;
          case 'r': lexical += '\r'; break;
          case '"': lexical += '"'; break;
          case '\\': lexical += '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        lexical += c;
      }
    }
    if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      return RdfNode::literal(std::move(lexical), read_iri());
    }
    if (pos_ < text_.size() && text_[pos_] == '@') {
      fail("language-tagged literals are not supported");
    }
    return RdfNode::literal(std::move(lexical));
  }

  std::optional<RdfNode> try_read_number()
  {
    skip_space();
    std::size_t p = pos_;
    if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) {
      ++p;
    }
    std::size_t int_start = p;
    while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
      ++p;
    }
    std::size_t int_digits = p - int_start;
    bool decimal = false;
    if (p + 1 < text_.size() && text_[p] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[p + 1]))) {
      decimal = true;
      ++p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        ++p;
      }
    }
    if (int_digits == 0 && !decimal) {
      return std::nullopt;
    }
    std::string lexical(text_.substr(pos_, p - pos_));
    pos_ = p;
    return RdfNode::literal(
      std::move(lexical), std::string(decimal ? xsd::decimal_type : xsd::integer_type));
  }

  RdfNode read_term(bool allow_literal)
  {
    char c = peek();
    if (c == '<') {
      return RdfNode::iri(read_iri());
    }
    if (c == '_') {
      return RdfNode::blank(read_blank_label());
    }
    if (c == '"') {
      if (!allow_literal) {
        fail("literal not allowed in subject position");
      }
      return read_literal();
    }
    if (auto num = try_read_number()) {
      if (!allow_literal) {
        fail("literal not allowed in subject position");
      }
      return *num;
    }
    fail("expected an RDF term");
  }

  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }

private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::vector<std::string_view> split_lines(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

Graph parse_graph(std::string_view text)
{
  std::vector<Triple> triples;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    TermReader reader(lines[i], i + 1);
    if (reader.at_end()) {
      continue;
    }
    RdfNode subject = reader.read_term(false);
    if (reader.peek() != '<') {
      reader.fail("predicate must be an IRI");
    }
    std::string predicate = reader.read_iri();
    RdfNode object = reader.read_term(true);
    reader.expect('.');
    if (!reader.at_end()) {
      reader.fail("unexpected content after '.'");
    }
    triples.emplace_back(std::move(subject), std::move(predicate), std::move(object));
  }
  return Graph(std::move(triples));
}

std::string serialize_graph(const Graph & g)
{
  std::ostringstream out;
  for (const auto & t : g.triples()) {
    out << to_string(t) << '\n';
  }
  return out.str();
}

RdfNode parse_node_term(std::string_view token)
{
  TermReader reader(token, 1);
  RdfNode node = reader.read_term(true);
  if (!reader.at_end()) {
    reader.fail("unexpected content after term");
  }
  return node;
}

}  // namespace shexi
