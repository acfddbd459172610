#include "test_support.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#ifndef SHEXI_FIXTURES_DIR
#error "SHEXI_FIXTURES_DIR must be defined"
#endif

namespace shexi::testing
{

std::string fixture_path(const std::string & name) { return std::string(SHEXI_FIXTURES_DIR) + "/" + name; }

std::string read_fixture(const std::string & name)
{
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Schema load_schema(const std::string & name) { return parse_schema(read_fixture(name)); }
Graph load_graph(const std::string & name) { return parse_graph(read_fixture(name)); }

RdfNode iri(const std::string & v) { return RdfNode::iri(v); }
RdfNode integer(long v) { return RdfNode::literal(std::to_string(v), std::string(xsd::integer_type)); }
RdfNode str(const std::string & v) { return RdfNode::literal(v); }
std::string pred(const std::string & bare) { return std::string(bare_predicate_prefix) + bare; }

const NeighbourhoodSet & ExampleSets::by_name(const std::string & name) const
{
  if (name == "M24") return m24;
  if (name == "M246") return m246;
  if (name == "M2a") return m2a;
  if (name == "M24a") return m24a;
  throw std::invalid_argument("unknown set " + name);
}

ExampleSets example_sets()
{
  ExampleSets x;
  auto t = [&](const RdfNode & o) { return Triple(x.subject, pred("p"), o); };
  x.m24 = {t(integer(2)), t(integer(4))};
  x.m246 = {t(integer(2)), t(integer(4)), t(integer(6))};
  x.m2a = {t(integer(2)), t(str("a"))};
  x.m24a = {t(integer(2)), t(integer(4)), t(str("a"))};
  x.tau = Typing{{integer(2), "T_even"}, {integer(2), "T_lt5"}, {integer(4), "T_even"},
                 {integer(4), "T_lt5"},  {integer(6), "T_even"}, {integer(6), "T_gt5"},
                 {str("a"), "T_str"}};
  return x;
}

// ---------------------------------------------------------------------------
// Reference evaluators
// ---------------------------------------------------------------------------

namespace naive
{
namespace
{

// Calls f on every split of m into (left, right), keeping triple order.
bool any_split(const std::vector<Triple> & m,
               const std::function<bool(const std::vector<Triple> &, const std::vector<Triple> &)> & f)
{
  const std::size_t n = m.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<Triple> l, r;
    for (std::size_t i = 0; i < n; ++i) (mask >> i & 1 ? l : r).push_back(m[i]);
    if (f(l, r)) return true;
  }
  return false;
}

// Every set partition of m into non-empty blocks.
bool any_partition(const std::vector<Triple> & m, std::size_t i, std::vector<std::vector<Triple>> & blocks,
                   const std::function<bool(const std::vector<std::vector<Triple>> &)> & f)
{
  if (i == m.size()) return f(blocks);
  // Indices, not references: the recursion appends to blocks.
  for (std::size_t k = 0, n = blocks.size(); k < n; ++k) {
    blocks[k].push_back(m[i]);
    bool r = any_partition(m, i + 1, blocks, f);
    blocks[k].pop_back();
    if (r) return true;
  }
  blocks.push_back({m[i]});
  bool r = any_partition(m, i + 1, blocks, f);
  blocks.pop_back();
  return r;
}

}  // namespace

bool sat_te(const std::vector<Triple> & m, const Typing & tau, const TripleExpr & e)
{
  if (auto * tc = std::get_if<te::TripleConstraint>(&e.node))
    return m.size() == 1 && m[0].predicate == tc->predicate && tau.contains(m[0].object, tc->label);
  if (std::holds_alternative<te::Epsilon>(e.node)) return m.empty();
  if (auto * o = std::get_if<te::OneOf>(&e.node)) return sat_te(m, tau, *o->left) || sat_te(m, tau, *o->right);
  if (auto * a = std::get_if<te::EachOf>(&e.node))
    return any_split(m, [&](const auto & l, const auto & r) {
      return sat_te(l, tau, *a->left) && sat_te(r, tau, *a->right);
    });
  const auto & inner = *std::get<te::Star>(e.node).inner;
  if (m.empty()) return true;
  std::vector<std::vector<Triple>> blocks;
  return any_partition(m, 0, blocks, [&](const auto & bs) {
    for (const auto & b : bs)
      if (!sat_te(b, tau, inner)) return false;
    return true;
  });
}

bool sat_shape(const std::vector<Triple> & m, const Typing & tau, const se::Shape & h)
{
  std::set<std::string> props;
  std::vector<const te::TripleConstraint *> constraints;
  std::function<void(const TripleExpr &)> walk = [&](const TripleExpr & e) {
    std::visit(
      [&](const auto & n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, te::TripleConstraint>) {
          props.insert(n.predicate);
          constraints.push_back(&n);
        } else if constexpr (std::is_same_v<T, te::Star>) {
          walk(*n.inner);
        } else if constexpr (!std::is_same_v<T, te::Epsilon>) {
          walk(*n.left);
          walk(*n.right);
        }
      },
      e.node);
  };
  walk(*h.expr);

  std::vector<Triple> me;
  for (const auto & t : m) {
    bool matched = false;
    for (auto * tc : constraints) matched = matched || (t.predicate == tc->predicate && tau.contains(t.object, tc->label));
    if (matched)
      me.push_back(t);
    else if (props.contains(t.predicate) && !h.extra.contains(t.predicate))
      return false;
    if (h.closed && !props.contains(t.predicate) && !h.extra.contains(t.predicate)) return false;
  }
  return sat_te(me, tau, *h.expr);
}

std::set<LabelName> anc(const Schema & s, const std::vector<LabelName> & bases)
{
  std::set<LabelName> out;
  std::vector<LabelName> todo(bases.begin(), bases.end());
  while (!todo.empty()) {
    LabelName x = todo.back();
    todo.pop_back();
    if (!out.insert(x).second) continue;
    if (auto * t = s.leading_extends(x))
      for (const auto & b : t->bases) todo.push_back(b);
  }
  return out;
}

std::set<LabelName> desc(const Schema & s, const LabelName & x)
{
  std::set<LabelName> out;
  for (const auto & y : s.extendable_labels())
    if (anc(s, {y}).contains(x)) out.insert(y);
  return out;
}

bool sat_set(const Graph & g, const Schema & s, const RdfNode & subject, const std::vector<Triple> & m,
             const Typing & tau, const ShapeExpr & e)
{
  if (auto * c = std::get_if<se::Constraint>(&e.node)) return eval_node_constraint(c->constraint, subject);
  if (auto * r = std::get_if<se::Ref>(&e.node)) return tau.contains(subject, r->label);
  if (auto * a = std::get_if<se::And>(&e.node))
    return sat_set(g, s, subject, m, tau, *a->left) && sat_set(g, s, subject, m, tau, *a->right);
  if (auto * o = std::get_if<se::Or>(&e.node))
    return sat_set(g, s, subject, m, tau, *o->left) || sat_set(g, s, subject, m, tau, *o->right);
  if (auto * n = std::get_if<se::Not>(&e.node)) return !sat_set(g, s, subject, m, tau, *n->inner);
  if (auto * h = std::get_if<se::Shape>(&e.node)) return sat_shape(m, tau, *h);

  const auto & t = std::get<se::ShapeWithExtends>(e.node);
  auto anc_set = anc(s, t.bases);
  std::vector<LabelName> slots(anc_set.begin(), anc_set.end());
  const std::size_t k = slots.size();
  std::vector<std::size_t> assign(m.size(), 0);
  for (;;) {
    std::vector<std::vector<Triple>> buckets(k + 1);
    for (std::size_t i = 0; i < m.size(); ++i) buckets[assign[i]].push_back(m[i]);
    bool ok = sat_shape(buckets[0], tau, t.shape);
    for (std::size_t i = 0; ok && i < k; ++i) {
      const LabelName & x = slots[i];
      ok = sat_te(buckets[i + 1], tau, *s.leading_extends(x)->shape.expr);
      if (ok)
        if (auto u = restr(s, x)) {
          std::vector<Triple> joined;
          for (std::size_t j = 0; j < k; ++j)
            if (anc(s, {x}).contains(slots[j]))
              joined.insert(joined.end(), buckets[j + 1].begin(), buckets[j + 1].end());
          ok = sat_set(g, s, subject, joined, tau, *u);
        }
    }
    if (ok) return true;
    // Next assignment in base k + 1.
    std::size_t i = 0;
    while (i < assign.size() && ++assign[i] == k + 1) assign[i++] = 0;
    if (i == assign.size()) return false;
  }
}

bool sat_node(const Graph & g, const Schema & s, const RdfNode & n, const Typing & tau, const ShapeExpr & e)
{
  if (auto * c = std::get_if<se::Constraint>(&e.node)) return eval_node_constraint(c->constraint, n);
  if (auto * r = std::get_if<se::Ref>(&e.node)) return tau.contains(n, r->label);
  if (auto * a = std::get_if<se::And>(&e.node))
    return sat_node(g, s, n, tau, *a->left) && sat_node(g, s, n, tau, *a->right);
  if (auto * o = std::get_if<se::Or>(&e.node))
    return sat_node(g, s, n, tau, *o->left) || sat_node(g, s, n, tau, *o->right);
  if (auto * x = std::get_if<se::Not>(&e.node)) return !sat_node(g, s, n, tau, *x->inner);
  auto neigh = neighbourhood(g, n);
  return sat_set(g, s, n, neigh, tau, e);
}

bool correct(const Graph & g, const Schema & s, const Typing & tau, ConformanceMode mode)
{
  for (const auto & [n, z] : tau) {
    bool via_desc = mode == ConformanceMode::literal_def4 ? s.is_abstract(z) : s.is_extendable(z);
    bool ok = false;
    if (!via_desc) {
      ok = sat_node(g, s, n, tau, s.definition(z));
    } else {
      for (const auto & x : desc(s, z))
        if (!s.is_abstract(x) && sat_node(g, s, n, tau, s.definition(x))) {
          ok = true;
          break;
        }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace naive

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

namespace
{

int uniform(std::mt19937 & rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937 & rng, double p) { return std::bernoulli_distribution(p)(rng); }

NodeConstraint random_constraint(std::mt19937 & rng)
{
  switch (uniform(rng, 0, 5)) {
  case 0: return {{facet::KindIs{NodeKind::iri}}};
  case 1: return {{facet::KindIs{NodeKind::literal}}};
  case 2: return {{facet::ValueEq{integer(1)}}};
  case 3: return {{facet::AnyNode{}}};
  case 4: return {{facet::NumRange{facet::RangeOp::greater_eq, 1}}};
  default: return {{facet::ValueIn{{iri("n0"), str("x")}}}};
  }
}

se::Shape random_shape_body(std::mt19937 & rng, const std::vector<std::string> & preds,
                            const std::vector<LabelName> & labels, int te_depth)
{
  se::Shape h;
  h.closed = chance(rng, 0.2);
  if (chance(rng, 0.25)) h.extra.insert(preds[uniform(rng, 0, static_cast<int>(preds.size()) - 1)]);
  h.expr = random_te(rng, preds, labels, te_depth);
  return h;
}

ShapeExprPtr random_plain(std::mt19937 & rng, const GenParams & p, const std::vector<std::string> & preds,
                          const std::vector<LabelName> & labels, int depth)
{
  double r = std::uniform_real_distribution<double>(0, 1)(rng);
  if (depth > 0 && r < p.negation_rate)
    return se::not_(random_plain(rng, p, preds, labels, depth - 1));
  r = std::uniform_real_distribution<double>(0, 1)(rng);
  if (depth > 0 && r < 0.25) {
    auto l = random_plain(rng, p, preds, labels, depth - 1);
    auto rr = random_plain(rng, p, preds, labels, depth - 1);
    return chance(rng, 0.5) ? se::and_(l, rr) : se::or_(l, rr);
  }
  if (r < 0.35) return se::constraint(random_constraint(rng));
  if (r < 0.42) return se::ref(labels[uniform(rng, 0, static_cast<int>(labels.size()) - 1)]);
  auto h = random_shape_body(rng, preds, labels, p.max_te_depth);
  return se::shape(h.expr, h.closed, h.extra);
}

}  // namespace

TripleExprPtr random_te(std::mt19937 & rng, const std::vector<std::string> & preds,
                        const std::vector<LabelName> & labels, int depth)
{
  auto tc = [&] {
    return te::constraint(preds[uniform(rng, 0, static_cast<int>(preds.size()) - 1)],
                          labels[uniform(rng, 0, static_cast<int>(labels.size()) - 1)]);
  };
  int r = uniform(rng, 0, 99);
  if (depth <= 0) return r < 85 ? tc() : te::epsilon();
  if (r < 30) return tc();
  if (r < 55) return te::each_of(random_te(rng, preds, labels, depth - 1), random_te(rng, preds, labels, depth - 1));
  if (r < 75) return te::one_of(random_te(rng, preds, labels, depth - 1), random_te(rng, preds, labels, depth - 1));
  if (r < 95) return te::star(random_te(rng, preds, labels, depth - 1));
  return te::epsilon();
}

Graph random_graph(std::mt19937 & rng, const GenParams & p)
{
  int iris = uniform(rng, 1, std::max(1, p.max_nodes - 1));
  int literals = uniform(rng, 0, p.max_nodes - iris);
  std::vector<RdfNode> pool;
  for (int i = 0; i < iris; ++i) pool.push_back(iri("n" + std::to_string(i)));
  const RdfNode lits[] = {integer(1), str("x"), integer(2)};
  for (int i = 0; i < literals; ++i) pool.push_back(lits[i % 3]);
  const std::string preds[] = {pred("p"), pred("q")};
  std::vector<Triple> triples;
  int n = uniform(rng, 0, p.max_triples);
  for (int i = 0; i < n; ++i)
    triples.emplace_back(pool[uniform(rng, 0, iris - 1)], preds[uniform(rng, 0, 1)],
                         pool[uniform(rng, 0, static_cast<int>(pool.size()) - 1)]);
  return Graph(std::move(triples));
}

Schema random_schema(std::mt19937 & rng, const GenParams & p)
{
  const std::vector<std::string> preds = {pred("p"), pred("q")};
  for (;;) {
    int k = uniform(rng, 2, p.max_labels);
    std::vector<LabelName> labels;
    for (int i = 0; i < k; ++i) labels.push_back("L" + std::to_string(i));

    std::map<LabelName, ShapeExprPtr> defs;
    std::set<LabelName> extendable, abstract_labels;
    std::vector<int> depth(k, 0);
    for (int i = 0; i < k; ++i) {
      if (!chance(rng, p.extendable_rate)) {
        defs[labels[i]] = random_plain(rng, p, preds, labels, 2);
        continue;
      }
      std::vector<LabelName> bases;
      int d = 0;
      for (int j = 0; j < i; ++j)
        if (extendable.contains(labels[j]) && depth[j] < p.max_extends_depth && chance(rng, p.base_rate)) {
          bases.push_back(labels[j]);
          d = std::max(d, depth[j] + 1);
          if (bases.size() == 2) break;
        }
      depth[i] = d;
      auto ext = se::extends(bases, random_shape_body(rng, preds, labels, p.max_te_depth));
      if (chance(rng, 0.4)) ext = se::and_(ext, random_plain(rng, p, preds, labels, 1));
      defs[labels[i]] = ext;
      extendable.insert(labels[i]);
      if (chance(rng, 0.2)) abstract_labels.insert(labels[i]);
    }
    Schema s(defs, extendable, abstract_labels);
    if (!check_schema_form(s).empty()) continue;
    if (!check_well_defined(s).ok()) continue;
    if (stratify(s).stratum_count > p.max_strata) continue;
    return s;
  }
}

Instance random_instance(std::mt19937 & rng, const GenParams & p)
{
  Instance inst{random_graph(rng, p), random_schema(rng, p)};
  for (const auto & e : build_dependency_graph(inst.schema).edges)
    inst.has_negation = inst.has_negation || is_negative(e.kind);
  for (const auto & x : inst.schema.extendable_labels()) {
    auto * t = inst.schema.leading_extends(x);
    if (t && t->bases.size() >= 2) inst.has_multiple_inheritance = true;
    inst.max_depth = std::max(inst.max_depth, static_cast<int>(naive::anc(inst.schema, {x}).size()) - 1);
  }
  return inst;
}

std::string Instance::text() const { return serialize_schema(schema) + "---\n" + serialize_graph(graph); }

std::vector<Stratification> alternative_stratifications(const Schema & s, std::mt19937 & rng, int tries)
{
  std::vector<Stratification> out = {stratify(s, StratificationPolicy::minimal)};
  auto add = [&](const Stratification & x) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
  };
  Stratification cur = stratify(s, StratificationPolicy::finest);
  add(cur);
  for (int t = 0; t < tries && cur.stratum_count > 1; ++t) {
    int i = uniform(rng, 1, cur.stratum_count - 1);
    Stratification merged = cur;
    for (auto & [z, v] : merged.assignment)
      if (v > i) --v;
    merged.stratum_count--;
    if (check_stratification(s, merged).empty()) {
      cur = merged;
      add(cur);
    }
  }
  return out;
}

}  // namespace shexi::testing
