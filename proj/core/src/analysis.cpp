#include "shexi/analysis.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

namespace shexi
{

// ---------------------------------------------------------------------------
// Extension hierarchy
// ---------------------------------------------------------------------------

std::vector<LabelName> ExtensionHierarchy::parents(const LabelName & x) const
{
  std::vector<LabelName> out;
  for (auto it = edges.lower_bound({x, LabelName{}}); it != edges.end() && it->first == x; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::vector<LabelName> ExtensionHierarchy::children(const LabelName & x) const
{
  std::vector<LabelName> out;
  for (const auto & [child, parent] : edges) {
    if (parent == x) {
      out.push_back(child);
    }
  }
  return out;
}

ExtensionHierarchy build_hierarchy(const Schema & s)
{
  ExtensionHierarchy h;
  for (const auto & x : s.extendable_labels()) {
    h.nodes.insert(x);
    if (const auto * t = s.leading_extends(x)) {
      for (const auto & parent : t->bases) {
        h.edges.emplace(x, parent);
      }
    }
  }
  return h;
}

namespace
{

void visit_extends(const ShapeExpr & s, const std::function<void(const se::ShapeWithExtends &, bool)> & fn,
                   bool negated = false)
{
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Not>) {
        visit_extends(*x.inner, fn, !negated);
      } else if constexpr (std::is_same_v<T, se::And> || std::is_same_v<T, se::Or>) {
        visit_extends(*x.left, fn, negated);
        visit_extends(*x.right, fn, negated);
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        fn(x, negated);
      }
    },
    s.node);
}

}  // namespace

ExtensionHierarchy build_extends_reference_graph(const Schema & s)
{
  ExtensionHierarchy h;
  for (const auto & [z, def] : s.definitions()) {
    h.nodes.insert(z);
    visit_extends(*def, [&](const se::ShapeWithExtends & t, bool) {
      for (const auto & b : t.bases) {
        h.edges.emplace(z, b);
      }
    });
  }
  return h;
}

std::vector<LabelName> find_cycle(const ExtensionHierarchy & h)
{
  enum class Mark { white, grey, black };
  std::map<LabelName, Mark> mark;
  std::vector<LabelName> stack;
  std::vector<LabelName> cycle;

  std::function<bool(const LabelName &)> dfs = [&](const LabelName & x) {
    mark[x] = Mark::grey;
    stack.push_back(x);
    for (const auto & p : h.parents(x)) {
      if (mark[p] == Mark::grey) {
        auto it = std::find(stack.begin(), stack.end(), p);
        cycle.assign(it, stack.end());
        cycle.push_back(p);
        return true;
      }
      if (mark[p] == Mark::white && dfs(p)) {
        return true;
      }
    }
    stack.pop_back();
    mark[x] = Mark::black;
    return false;
  };

  std::set<LabelName> all = h.nodes;
  for (const auto & [a, b] : h.edges) {
    all.insert(a);
    all.insert(b);
  }
  for (const auto & x : all) {
    if (mark[x] == Mark::white && dfs(x)) {
      return cycle;
    }
  }
  return {};
}

bool is_acyclic(const ExtensionHierarchy & h) { return find_cycle(h).empty(); }

std::set<LabelName> reachable_ancestors(const ExtensionHierarchy & h, const std::set<LabelName> & xs)
{
  std::set<LabelName> seen(xs.begin(), xs.end());
  std::deque<LabelName> work(xs.begin(), xs.end());
  while (!work.empty()) {
    LabelName x = work.front();
    work.pop_front();
    for (const auto & p : h.parents(x)) {
      if (seen.insert(p).second) {
        work.push_back(p);
      }
    }
  }
  return seen;
}

namespace
{
void require_acyclic(const ExtensionHierarchy & h)
{
  if (auto cycle = find_cycle(h); !cycle.empty()) {
    std::string text;
    for (const auto & x : cycle) {
      text += (text.empty() ? "" : " -> ") + x;
    }
    throw AnalysisError("extension hierarchy is cyclic: " + text);
  }
}
}  // namespace

std::set<LabelName> ancestors(const ExtensionHierarchy & h, const LabelName & x)
{
  return ancestors_of_set(h, {x});
}

std::set<LabelName> ancestors_of_set(const ExtensionHierarchy & h, const std::set<LabelName> & xs)
{
  require_acyclic(h);
  return reachable_ancestors(h, xs);
}

std::set<LabelName> descendants(const ExtensionHierarchy & h, const LabelName & x)
{
  require_acyclic(h);
  std::set<LabelName> seen{x};
  std::deque<LabelName> work{x};
  while (!work.empty()) {
    LabelName cur = work.front();
    work.pop_front();
    for (const auto & c : h.children(cur)) {
      if (seen.insert(c).second) {
        work.push_back(c);
      }
    }
  }
  return seen;
}

// ---------------------------------------------------------------------------
// Negative sub-expressions
// ---------------------------------------------------------------------------

namespace
{

void collect_te_nodes(const TripleExpr & e, std::vector<SubExpr> & out)
{
  out.emplace_back(&e);
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, te::Star>) {
        collect_te_nodes(*x.inner, out);
      } else if constexpr (std::is_same_v<T, te::OneOf> || std::is_same_v<T, te::EachOf>) {
        collect_te_nodes(*x.left, out);
        collect_te_nodes(*x.right, out);
      }
    },
    e.node);
}

void collect_neg(const ShapeExpr & s, bool odd, std::vector<SubExpr> & out)
{
  if (odd) {
    out.emplace_back(&s);
  }
  std::visit(
    [&](const auto & x) {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Not>) {
        collect_neg(*x.inner, !odd, out);
      } else if constexpr (std::is_same_v<T, se::And> || std::is_same_v<T, se::Or>) {
        collect_neg(*x.left, odd, out);
        collect_neg(*x.right, odd, out);
      } else if constexpr (std::is_same_v<T, se::Shape>) {
        if (odd) {
          collect_te_nodes(*x.expr, out);
        }
      } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
        if (odd) {
          collect_te_nodes(*x.shape.expr, out);
        }
      }
    },
    s.node);
}

}  // namespace

std::vector<SubExpr> neg_sub_expr(const ShapeExpr & s)
{
  std::vector<SubExpr> out;
  collect_neg(s, false, out);
  return out;
}

// ---------------------------------------------------------------------------
// Dependency graph
// ---------------------------------------------------------------------------

std::string_view to_string(DepKind k)
{
  switch (k) {
    case DepKind::extends: return "dep-extends";
    case DepKind::dep: return "dep";
    case DepKind::shape_neg: return "dep-shape-neg";
    case DepKind::extra_neg: return "dep-extra-neg";
  }
  return "?";
}

std::vector<DepEdge> DependencyGraph::out_edges(const LabelName & from) const
{
  std::vector<DepEdge> out;
  for (auto it = edges.lower_bound(DepEdge{from, LabelName{}, DepKind::extends});
       it != edges.end() && it->from == from; ++it) {
    out.push_back(*it);
  }
  return out;
}

namespace
{

struct DepBuilder
{
  const Schema & schema;
  const ExtensionHierarchy & hierarchy;
  DependencyGraph & graph;
  LabelName from;

  void add(const LabelName & to, DepKind kind) { graph.edges.insert(DepEdge{from, to, kind}); }

  void shape(const se::Shape & h, bool negated)
  {
    for (const auto * tc : tcs(*h.expr)) {
      if (negated) {
        add(tc->label, DepKind::shape_neg);
      }
      if (h.extra.contains(tc->predicate)) {
        add(tc->label, DepKind::extra_neg);
      }
    }
  }

  void walk(const ShapeExpr & s, bool negated)
  {
    std::visit(
      [&](const auto & x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, se::Ref>) {
          if (negated) {
            add(x.label, DepKind::shape_neg);
          }
        } else if constexpr (std::is_same_v<T, se::Not>) {
          walk(*x.inner, !negated);
        } else if constexpr (std::is_same_v<T, se::And> || std::is_same_v<T, se::Or>) {
          walk(*x.left, negated);
          walk(*x.right, negated);
        } else if constexpr (std::is_same_v<T, se::Shape>) {
          shape(x, negated);
        } else if constexpr (std::is_same_v<T, se::ShapeWithExtends>) {
          shape(x.shape, negated);
          if (negated) {
            // A negated shape with extends also reads the typing through the
            // definitions of every ancestor it dereferences.
            std::set<LabelName> bases(x.bases.begin(), x.bases.end());
            for (const auto & a : reachable_ancestors(hierarchy, bases)) {
              if (!schema.has_label(a)) {
                continue;
              }
              for (const auto & r : referenced_labels(schema.definition(a))) {
                add(r, DepKind::dep);
                add(r, DepKind::shape_neg);
              }
            }
          }
        }
      },
      s.node);
  }
};

}  // namespace

DependencyGraph build_dependency_graph(const Schema & s)
{
  DependencyGraph d;
  for (const auto & z : s.labels()) {
    d.nodes.insert(z);
  }
  ExtensionHierarchy h = build_hierarchy(s);
  for (const auto & [child, parent] : h.edges) {
    d.edges.insert(DepEdge{child, parent, DepKind::extends});
    d.edges.insert(DepEdge{parent, child, DepKind::extends});
  }

  for (const auto & [z, def] : s.definitions()) {
    const se::ShapeWithExtends * leading = s.leading_extends(z);
    visit_extends(*def, [&](const se::ShapeWithExtends & t, bool) {
      if (&t == leading) {
        return;
      }
      for (const auto & b : t.bases) {
        d.edges.insert(DepEdge{z, b, DepKind::extends});
        d.edges.insert(DepEdge{b, z, DepKind::extends});
      }
    });

    for (const auto & r : referenced_labels(*def)) {
      d.edges.insert(DepEdge{z, r, DepKind::dep});
    }
    DepBuilder builder{s, h, d, z};
    builder.walk(*def, false);
  }
  return d;
}

std::vector<std::vector<LabelName>> strongly_connected_components(const DependencyGraph & d)
{
  // Tarjan; components come out sinks first.
  std::map<LabelName, int> index;
  std::map<LabelName, int> low;
  std::set<LabelName> on_stack;
  std::vector<LabelName> stack;
  std::vector<std::vector<LabelName>> out;
  int counter = 0;

  std::map<LabelName, std::set<LabelName>> succ;
  for (const auto & e : d.edges) {
    succ[e.from].insert(e.to);
  }

  std::function<void(const LabelName &)> connect = [&](const LabelName & v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto & w : succ[v]) {
      if (!index.contains(w)) {
        connect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.contains(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<LabelName> component;
      LabelName w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.push_back(w);
      } while (w != v);
      std::sort(component.begin(), component.end());
      out.push_back(std::move(component));
    }
  };

  std::set<LabelName> all = d.nodes;
  for (const auto & e : d.edges) {
    all.insert(e.from);
    all.insert(e.to);
  }
  for (const auto & v : all) {
    if (!index.contains(v)) {
      connect(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Well-definedness
// ---------------------------------------------------------------------------

std::string Cycle::to_string() const
{
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out += labels[i];
    if (i + 1 < labels.size()) {
      out += i < kinds.size() ? " -[" + std::string(shexi::to_string(kinds[i])) + "]-> " : " -> ";
    }
  }
  return out;
}

std::string_view to_string(WellDefinedness::Verdict v)
{
  switch (v) {
    case WellDefinedness::Verdict::ok: return "ok";
    case WellDefinedness::Verdict::cyclic_hierarchy: return "cyclic_hierarchy";
    case WellDefinedness::Verdict::negative_cycle: return "negative_cycle";
  }
  return "?";
}

std::string WellDefinedness::describe() const
{
  std::string out(to_string(verdict));
  for (const auto & c : witnesses) {
    out += "\n  " + c.to_string();
  }
  return out;
}

namespace
{

/// Shortest path from `start` to `goal` staying inside `component`.
std::optional<Cycle> shortest_path(const DependencyGraph & d, const std::set<LabelName> & component,
                                   const LabelName & start, const LabelName & goal)
{
  if (start == goal) {
    return Cycle{{start}, {}};
  }
  std::map<LabelName, DepEdge> came_from;
  std::deque<LabelName> work{start};
  std::set<LabelName> seen{start};
  while (!work.empty()) {
    LabelName v = work.front();
    work.pop_front();
    // Prefer plain dependency edges over extension edges when both exist.
    std::vector<DepEdge> out = d.out_edges(v);
    std::stable_sort(out.begin(), out.end(), [](const DepEdge & a, const DepEdge & b) {
      return static_cast<int>(a.kind == DepKind::extends) < static_cast<int>(b.kind == DepKind::extends);
    });
    for (const auto & e : out) {
      if (!component.contains(e.to) || seen.contains(e.to)) {
        continue;
      }
      seen.insert(e.to);
      came_from.emplace(e.to, e);
      if (e.to == goal) {
        Cycle path;
        LabelName cur = goal;
        while (cur != start) {
          const DepEdge & step = came_from.at(cur);
          path.labels.push_back(cur);
          path.kinds.push_back(step.kind);
          cur = step.from;
        }
        path.labels.push_back(start);
        std::reverse(path.labels.begin(), path.labels.end());
        std::reverse(path.kinds.begin(), path.kinds.end());
        return path;
      }
      work.push_back(e.to);
    }
  }
  return std::nullopt;
}

}  // namespace

WellDefinedness check_well_defined(const Schema & s)
{
  WellDefinedness result;

  for (const auto & graph : {build_hierarchy(s), build_extends_reference_graph(s)}) {
    if (auto cycle = find_cycle(graph); !cycle.empty()) {
      result.verdict = WellDefinedness::Verdict::cyclic_hierarchy;
      result.witnesses.push_back(Cycle{cycle, {}});
      return result;
    }
  }

  DependencyGraph d = build_dependency_graph(s);
  std::map<LabelName, std::size_t> component_of;
  auto components = strongly_connected_components(d);
  for (std::size_t i = 0; i < components.size(); ++i) {
    for (const auto & z : components[i]) {
      component_of[z] = i;
    }
  }

  for (const auto & e : d.edges) {
    if (!is_negative(e.kind) || component_of.at(e.from) != component_of.at(e.to)) {
      continue;
    }
    const auto & members = components[component_of.at(e.from)];
    std::set<LabelName> component(members.begin(), members.end());
    auto back = shortest_path(d, component, e.to, e.from);
    Cycle cycle;
    cycle.labels.push_back(e.from);
    cycle.kinds.push_back(e.kind);
    cycle.labels.insert(cycle.labels.end(), back->labels.begin(), back->labels.end());
    cycle.kinds.insert(cycle.kinds.end(), back->kinds.begin(), back->kinds.end());
    result.verdict = WellDefinedness::Verdict::negative_cycle;
    result.witnesses.push_back(std::move(cycle));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Stratification
// ---------------------------------------------------------------------------

std::vector<LabelName> Stratification::labels_on(int stratum) const
{
  std::vector<LabelName> out;
  for (const auto & [z, i] : assignment) {
    if (i == stratum) {
      out.push_back(z);
    }
  }
  return out;
}

Stratification stratify(const Schema & s, StratificationPolicy policy)
{
  WellDefinedness wd = check_well_defined(s);
  if (!wd.ok()) {
    throw AnalysisError("schema is not well-defined: " + wd.describe());
  }
  DependencyGraph d = build_dependency_graph(s);
  auto components = strongly_connected_components(d);

  Stratification sigma;
  for (std::size_t i = 0; i < components.size(); ++i) {
    int level = 1;
    if (policy == StratificationPolicy::finest) {
      level = static_cast<int>(i) + 1;
    } else {
      std::set<LabelName> members(components[i].begin(), components[i].end());
      for (const auto & z : components[i]) {
        for (const auto & e : d.out_edges(z)) {
          if (members.contains(e.to)) {
            continue;
          }
          level = std::max(level, sigma.assignment.at(e.to) + (is_negative(e.kind) ? 1 : 0));
        }
      }
    }
    for (const auto & z : components[i]) {
      sigma.assignment[z] = level;
    }
    sigma.stratum_count = std::max(sigma.stratum_count, level);
  }
  return sigma;
}

std::vector<std::string> check_stratification(const Schema & s, const Stratification & sigma)
{
  std::vector<std::string> problems;
  std::set<int> used;
  for (const auto & z : s.labels()) {
    auto it = sigma.assignment.find(z);
    if (it == sigma.assignment.end()) {
      problems.push_back("label '" + z + "' has no stratum");
      continue;
    }
    if (it->second < 1 || it->second > sigma.stratum_count) {
      problems.push_back("label '" + z + "' is outside [1.." + std::to_string(sigma.stratum_count) + "]");
    }
    used.insert(it->second);
  }
  for (int i = 1; i <= sigma.stratum_count; ++i) {
    if (!used.contains(i)) {
      problems.push_back("stratum " + std::to_string(i) + " is empty");
    }
  }
  if (!problems.empty()) {
    return problems;
  }
  for (const auto & e : build_dependency_graph(s).edges) {
    int from = sigma(e.from);
    int to = sigma(e.to);
    if (from < to) {
      problems.push_back(e.from + " -> " + e.to + " ascends");
    } else if (is_negative(e.kind) && from == to) {
      problems.push_back(e.from + " -> " + e.to + " is negative within one stratum");
    }
  }
  return problems;
}

Schema restrict_schema(const Schema & s, const Stratification & sigma, int i)
{
  if (i < 1 || i > sigma.stratum_count) {
    throw AnalysisError("stratum " + std::to_string(i) + " outside [1.." +
                        std::to_string(sigma.stratum_count) + "]");
  }
  std::map<LabelName, ShapeExprPtr> defs;
  std::set<LabelName> extendable;
  std::set<LabelName> abstract_labels;
  for (const auto & [z, def] : s.definitions()) {
    if (sigma(z) > i) {
      continue;
    }
    defs.emplace(z, def);
    if (s.is_extendable(z)) {
      extendable.insert(z);
    }
    if (s.is_abstract(z)) {
      abstract_labels.insert(z);
    }
  }
  return Schema(std::move(defs), std::move(extendable), std::move(abstract_labels));
}

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

std::string hierarchy_dot(const ExtensionHierarchy & h)
{
  std::ostringstream out;
  out << "digraph extension_hierarchy {\n";
  for (const auto & x : h.nodes) {
    out << "  \"" << x << "\";\n";
  }
  for (const auto & [child, parent] : h.edges) {
    out << "  \"" << child << "\" -> \"" << parent << "\";\n";
  }
  out << "}\n";
  return out.str();
}

std::string dependency_dot(const DependencyGraph & d)
{
  std::ostringstream out;
  out << "digraph dependencies {\n";
  for (const auto & z : d.nodes) {
    out << "  \"" << z << "\";\n";
  }
  for (const auto & e : d.edges) {
    out << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << to_string(e.kind) << "\"";
    if (is_negative(e.kind)) {
      out << ", style=dashed, color=red";
    } else if (e.kind == DepKind::extends) {
      out << ", style=dotted";
    }
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace shexi
