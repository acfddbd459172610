#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace shexi;
using namespace shexi::testing;

namespace
{

std::set<LabelName> set_of(std::initializer_list<const char *> xs) { return {xs.begin(), xs.end()}; }

}  // namespace

TEST(SchemaText, FigureSchemaLabelSets)
{
  Schema s = load_schema("fig1.shexi");
  EXPECT_EQ(s.simple_labels(), set_of({"Coord", "T_any", "T_colour", "T_float", "T_radius", "T_str"}));
  EXPECT_EQ(s.extendable_labels(), set_of({"Attribute", "Circle", "Colour", "ColouredCircle", "ColouredFigure",
                                           "Figure", "Radius"}));
  EXPECT_EQ(s.abstract_labels(), set_of({"Figure"}));
  EXPECT_TRUE(check_schema_form(s).empty());
}

TEST(SchemaText, ExtTeAndRestr)
{
  Schema s = load_schema("fig1.shexi");
  EXPECT_EQ(to_text(*ext_te(s, "Colour")), "scope @T_str");
  ASSERT_TRUE(restr(s, "Colour"));
  EXPECT_EQ(to_text(*restr(s, "Colour")), "{ name @T_colour }");
  EXPECT_EQ(restr(s, "Circle"), nullptr);
  EXPECT_EQ(to_text(*ext_te(s, "Radius")), "EPSILON");
  EXPECT_THROW(ext_te(s, "Coord"), SchemaError);
  auto * t = s.leading_extends("ColouredCircle");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(t->bases, (std::vector<LabelName>{"Circle", "ColouredFigure"}));
}

TEST(SchemaText, Precedence)
{
  Schema s = parse_schema("a -> NOT { p @a } AND { q @a } OR { r @a }\n"
                          "b -> { p @a ; q @a | r @a * }\n");
  const auto & a = s.definition("a");
  ASSERT_TRUE(std::holds_alternative<se::Or>(a.node));
  const auto & left = *std::get<se::Or>(a.node).left;
  ASSERT_TRUE(std::holds_alternative<se::And>(left.node));
  EXPECT_TRUE(std::holds_alternative<se::Not>(std::get<se::And>(left.node).left->node));

  const auto & h = std::get<se::Shape>(s.definition("b").node);
  ASSERT_TRUE(std::holds_alternative<te::OneOf>(h.expr->node));
  const auto & one = std::get<te::OneOf>(h.expr->node);
  EXPECT_TRUE(std::holds_alternative<te::EachOf>(one.left->node));
  EXPECT_TRUE(std::holds_alternative<te::Star>(one.right->node));
}

TEST(SchemaText, PostfixSugar)
{
  Schema s = parse_schema("a -> { p @a ? ; q @a + }");
  auto expected = te::each_of(te::one_of(te::constraint(pred("p"), "a"), te::epsilon()),
                              te::each_of(te::constraint(pred("q"), "a"), te::star(te::constraint(pred("q"), "a"))));
  EXPECT_TRUE(equal(*std::get<se::Shape>(s.definition("a").node).expr, *expected));
}

TEST(SchemaText, FixturesRoundTrip)
{
  for (const char * name : {"fig1.shexi", "example2.shexi", "example3.shexi", "extends_x.shexi", "shapes.shexi",
                            "s1.shexi", "s2.shexi", "s3.shexi", "conjunction.shexi", "product.shexi",
                            "client.shexi", "cyclic_hierarchy.shexi"}) {
    Schema s = load_schema(name);
    Schema back = parse_schema(serialize_schema(s));
    EXPECT_TRUE(equal(s, back)) << name << "\n" << serialize_schema(s);
  }
}

TEST(SchemaText, RandomSchemasRoundTrip)
{
  std::mt19937 rng(3);
  GenParams p;
  p.max_labels = 6;
  p.max_strata = 100;
  for (int i = 0; i < 300; ++i) {
    Schema s = random_schema(rng, p);
    std::string text = serialize_schema(s);
    Schema back = parse_schema(text);
    EXPECT_TRUE(equal(s, back)) << text;
    EXPECT_EQ(serialize_schema(back), text);
  }
}

TEST(SchemaText, NodeConstraintsRoundTrip)
{
  Schema s = parse_schema("c1 -> LITERAL integer MININC 1 MAXEXC 10.5\n"
                          "c2 -> IN ( 1 \"x\" <urn:v> 2.5 )\n"
                          "c3 -> IRI OR BNODE\n"
                          "c4 -> DATATYPE <urn:dt> VALUE \"v\"^^<urn:dt>\n"
                          "c5 -> .\n");
  EXPECT_TRUE(equal(s, parse_schema(serialize_schema(s))));
  const auto & c1 = std::get<se::Constraint>(s.definition("c1").node).constraint;
  EXPECT_TRUE(eval_node_constraint(c1, integer(1)));
  EXPECT_TRUE(eval_node_constraint(c1, integer(10)));
  EXPECT_FALSE(eval_node_constraint(c1, integer(11)));
  EXPECT_FALSE(eval_node_constraint(c1, str("5")));
  const auto & c2 = std::get<se::Constraint>(s.definition("c2").node).constraint;
  EXPECT_TRUE(eval_node_constraint(c2, iri("urn:v")));
  EXPECT_TRUE(eval_node_constraint(c2, str("x")));
  EXPECT_FALSE(eval_node_constraint(c2, integer(3)));
  const auto & c5 = std::get<se::Constraint>(s.definition("c5").node).constraint;
  EXPECT_TRUE(eval_node_constraint(c5, RdfNode::blank("b")));
}

TEST(SchemaText, Errors)
{
  EXPECT_THROW(parse_schema(""), ParseError);
  EXPECT_THROW(parse_schema("# only a comment\n"), ParseError);
  EXPECT_THROW(parse_schema("a -> { p @a }\na -> { q @a }"), ParseError);
  EXPECT_THROW(parse_schema("a -> { p @a"), ParseError);
  EXPECT_THROW(parse_schema("a -> { p @ }"), ParseError);
  EXPECT_THROW(parse_schema("a { p @a }"), ParseError);
  EXPECT_THROW(parse_schema("a -> { p @b }"), SchemaFormError);
  EXPECT_THROW(parse_schema("abstract a -> { p @a }"), SchemaFormError);
  EXPECT_THROW(parse_schema("a -> EXTENDS [b] {}\nb -> { p @a }"), SchemaFormError);
  try {
    parse_schema("a -> {}\nb -> { p @a } AND\n");
    FAIL();
  } catch (const ParseError & e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(SchemaForm, DiagnosticsOnHandBuiltSchemas)
{
  // A simple label may not be defined by a bare shape with extends.
  Schema s1({{"a", se::extends({}, te::epsilon())}}, {}, {});
  EXPECT_FALSE(check_schema_form(s1).empty());
  // Abstract labels must be extendable.
  Schema s2({{"a", se::shape(te::epsilon())}}, {}, {"a"});
  EXPECT_FALSE(check_schema_form(s2).empty());
  // Extendable labels need the extendable form.
  Schema s3({{"a", se::shape(te::epsilon())}}, {"a"}, {});
  EXPECT_FALSE(check_schema_form(s3).empty());
  Schema ok({{"a", se::and_(se::extends({}, te::epsilon()), se::shape(te::epsilon()))}}, {"a"}, {"a"});
  EXPECT_TRUE(check_schema_form(ok).empty());
}

TEST(Syntax, TcsAndPropsAgree)
{
  std::mt19937 rng(5);
  const std::vector<std::string> preds = {pred("p"), pred("q"), pred("r")};
  const std::vector<LabelName> labels = {"a", "b"};
  for (int i = 0; i < 500; ++i) {
    auto e = random_te(rng, preds, labels, 4);
    std::set<std::string> from_tcs;
    for (auto * tc : tcs(*e)) from_tcs.insert(tc->predicate);
    EXPECT_EQ(from_tcs, props_of_expr(*e));
  }
}

TEST(Syntax, TcsKeepsDistinctNodes)
{
  auto tc = te::constraint(pred("p"), "a");
  auto e = te::each_of(tc, te::each_of(te::constraint(pred("p"), "a"), tc));
  EXPECT_EQ(tcs(*e).size(), 2u);
  EXPECT_TRUE(tcs(*te::epsilon()).empty());
}

TEST(Syntax, ReferencedLabels)
{
  Schema s = load_schema("fig1.shexi");
  EXPECT_EQ(referenced_labels(s.definition("Colour")), set_of({"T_str", "T_colour"}));
  EXPECT_EQ(referenced_labels(s.definition("Circle")), set_of({"Radius"}));
}

TEST(ShapeMap, ParsesNodesAndLabels)
{
  Schema s = load_schema("fig1.shexi");
  auto reqs = parse_shape_map("f1 @ ColouredCircle\n<urn:x> @Figure # note\n_:b @ ALL\n\n\"lit\" @ T_str\n", s);
  ASSERT_EQ(reqs.size(), 4u);
  EXPECT_EQ(reqs[0].node, iri("f1"));
  EXPECT_EQ(*reqs[0].label, "ColouredCircle");
  EXPECT_EQ(reqs[1].node, iri("urn:x"));
  EXPECT_TRUE(reqs[2].is_all());
  EXPECT_EQ(reqs[2].node, RdfNode::blank("b"));
  EXPECT_EQ(reqs[3].node, str("lit"));
  EXPECT_TRUE(parse_shape_map("", s).empty());
  EXPECT_THROW(parse_shape_map("f1 @ Nope", s), ParseError);
  EXPECT_THROW(parse_shape_map("f1 ColouredCircle", s), ParseError);
}
