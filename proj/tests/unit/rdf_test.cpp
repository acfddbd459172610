#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace shexi;
using namespace shexi::testing;

TEST(RdfNode, LiteralsCompareStructurally)
{
  EXPECT_EQ(integer(1), RdfNode::literal("1", std::string(xsd::integer_type)));
  EXPECT_NE(RdfNode::literal("01", std::string(xsd::integer_type)), integer(1));
  EXPECT_NE(str("1"), integer(1));
  EXPECT_NE(iri("a"), RdfNode::blank("a"));
}

TEST(RdfNode, NTriplesRendering)
{
  EXPECT_EQ(iri("f1").to_string(), "<f1>");
  EXPECT_EQ(RdfNode::blank("b0").to_string(), "_:b0");
  EXPECT_EQ(str("a \"q\"").to_string(), R"("a \"q\"")");
  EXPECT_EQ(integer(2).to_string(), "\"2\"^^<http://www.w3.org/2001/XMLSchema#integer>");
}

TEST(Triple, LiteralSubjectRejected)
{
  EXPECT_THROW(Triple(str("x"), pred("p"), iri("o")), std::invalid_argument);
}

TEST(Graph, SortsAndDeduplicates)
{
  Graph g({Triple(iri("b"), pred("p"), iri("a")), Triple(iri("a"), pred("p"), iri("b")),
           Triple(iri("a"), pred("p"), iri("b"))});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.triples()[0].subject, iri("a"));
  EXPECT_EQ(g.nodes(), (std::vector<RdfNode>{iri("a"), iri("b")}));
  EXPECT_EQ(g.subjects(), (std::vector<RdfNode>{iri("a"), iri("b")}));
}

TEST(Graph, NeighbourhoodOfNonSubjectIsEmpty)
{
  Graph g({Triple(iri("a"), pred("p"), integer(1))});
  EXPECT_TRUE(g.neighbourhood(integer(1)).empty());
  EXPECT_TRUE(g.neighbourhood(iri("zzz")).empty());
  EXPECT_TRUE(g.has_node(integer(1)));
  EXPECT_TRUE(Graph().nodes().empty());
}

TEST(Graph, CopiesOwnTheirNeighbourhoods)
{
  Graph copy;
  {
    Graph g({Triple(iri("a"), pred("p"), integer(1)), Triple(iri("b"), pred("q"), integer(2))});
    copy = g;
  }
  auto n = copy.neighbourhood(iri("b"));
  ASSERT_EQ(n.size(), 1u);
  EXPECT_EQ(n[0].object, integer(2));
}

TEST(Graph, FigureGraphHasSixteenTriples)
{
  Graph g = load_graph("fig2.nt");
  EXPECT_EQ(g.size(), 16u);
  EXPECT_EQ(g.neighbourhood(iri("f1")).size(), 3u);
  EXPECT_EQ(g.neighbourhood(iri("a2")).size(), 3u);
  long double v = 0;
  auto y = g.neighbourhood(iri("c2"));
  ASSERT_EQ(y.size(), 2u);
  ASSERT_TRUE(numeric_value(y[1].object, v));
  EXPECT_NEAR(static_cast<double>(v), -2.3, 1e-12);
}

// Neighbourhoods partition the triple set.
TEST(Graph, NeighbourhoodsAreDisjointAndCover)
{
  std::mt19937 rng(7);
  GenParams p;
  p.max_nodes = 6;
  p.max_triples = 20;
  for (int i = 0; i < 200; ++i) {
    Graph g = random_graph(rng, p);
    std::size_t total = 0;
    for (const auto & n : g.nodes()) {
      auto m = g.neighbourhood(n);
      for (const auto & t : m) EXPECT_EQ(t.subject, n);
      total += m.size();
    }
    EXPECT_EQ(total, g.size());
  }
}

TEST(Parse, RoundTrip)
{
  std::mt19937 rng(11);
  GenParams p;
  p.max_nodes = 5;
  p.max_triples = 12;
  for (int i = 0; i < 200; ++i) {
    Graph g = random_graph(rng, p);
    Graph back = parse_graph(serialize_graph(g));
    EXPECT_TRUE(std::equal(g.triples().begin(), g.triples().end(), back.triples().begin(), back.triples().end()));
  }
  Graph fig = load_graph("fig2.nt");
  Graph back = parse_graph(serialize_graph(fig));
  EXPECT_EQ(back.size(), fig.size());
  EXPECT_TRUE(std::equal(fig.triples().begin(), fig.triples().end(), back.triples().begin()));
}

TEST(Parse, TermsAndComments)
{
  Graph g = parse_graph("# header\n"
                        "_:b <urn:p:v> \"x\\ny\" . # trailing\n"
                        "<s> <urn:p:v> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
                        "<s> <urn:p:w> 4. \n"
                        "\n");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g.neighbourhood(RdfNode::blank("b"))[0].object, str("x\ny"));
  EXPECT_EQ(g.neighbourhood(iri("s"))[0].object, integer(5));
  EXPECT_EQ(g.neighbourhood(iri("s"))[1].object, integer(4));
}

TEST(Parse, ErrorsCarryPositions)
{
  try {
    parse_graph("<a> <urn:p:p> <b> .\n\"lit\" <urn:p:p> <b> .\n");
    FAIL() << "literal subject accepted";
  } catch (const ParseError & e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 1u);
  }
  EXPECT_THROW(parse_graph("<a> _:b <c> ."), ParseError);
  EXPECT_THROW(parse_graph("<a> <urn:p:p> <c> . <d>"), ParseError);
  EXPECT_THROW(parse_graph("<a> <urn:p:p> <c>"), ParseError);
  EXPECT_THROW(parse_graph("<a b> <urn:p:p> <c> ."), ParseError);
  EXPECT_THROW(parse_graph("<a> <urn:p:p> \"open ."), ParseError);
}

TEST(Parse, NodeTerms)
{
  EXPECT_EQ(parse_node_term("<x>"), iri("x"));
  EXPECT_EQ(parse_node_term("_:q"), RdfNode::blank("q"));
  EXPECT_EQ(parse_node_term("12"), integer(12));
  EXPECT_EQ(parse_node_term("1.5"), RdfNode::literal("1.5", std::string(xsd::decimal_type)));
  EXPECT_EQ(parse_node_term("\"a\""), str("a"));
  EXPECT_THROW(parse_node_term("<x> <y>"), std::exception);
}

TEST(Numeric, OnlyNumericDatatypes)
{
  long double v = 0;
  EXPECT_TRUE(numeric_value(integer(-3), v));
  EXPECT_EQ(v, -3);
  EXPECT_FALSE(numeric_value(str("3"), v));
  EXPECT_FALSE(numeric_value(iri("3"), v));
  EXPECT_FALSE(numeric_value(RdfNode::literal("x", std::string(xsd::integer_type)), v));
}
