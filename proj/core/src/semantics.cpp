#include "shexi/semantics.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>
#include <unordered_set>

namespace shexi
{

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

std::set<LabelName> Typing::labels_of(const RdfNode & n) const
{
  std::set<LabelName> out;
  for (auto it = pairs_.lower_bound({n, LabelName{}}); it != pairs_.end() && it->first == n; ++it)
    out.insert(it->second);
  return out;
}

std::set<RdfNode> Typing::nodes_of(const LabelName & z) const
{
  std::set<RdfNode> out;
  for (const auto & [n, label] : pairs_)
    if (label == z) out.insert(n);
  return out;
}

Typing Typing::restricted_to(const std::set<LabelName> & labels) const
{
  Typing out;
  for (const auto & p : pairs_)
    if (labels.contains(p.second)) out.pairs_.insert(p);
  return out;
}

bool Typing::is_subset_of(const Typing & other) const
{
  return std::includes(other.pairs_.begin(), other.pairs_.end(), pairs_.begin(), pairs_.end());
}

// ---------------------------------------------------------------------------
// Triple-expression matching over bitmasks
// ---------------------------------------------------------------------------

namespace
{

using Mask = std::uint64_t;

constexpr std::size_t max_match_triples = 64;

Mask full_mask(std::size_t n) { return n >= 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

bool tc_matches(const Triple & t, const te::TripleConstraint & tc, const Typing & tau)
{
  return t.predicate == tc.predicate && tau.contains(t.object, tc.label);
}

// Scratch state for matching subsets of one fixed triple list.
class MatchArena
{
public:
  MatchArena(std::span<const Triple> triples, const Typing & tau, bool memoize)
  : triples_(triples), tau_(tau), memoize_(memoize)
  {
    if (triples.size() > max_match_triples)
      throw std::length_error("triple set too large for matching (more than 64 triples)");
  }

  Mask all() const { return full_mask(triples_.size()); }

  bool match(const TripleExpr & e, Mask m)
  {
    if (!memoize_) return compute(e, m);
    Key key{&e, m};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool r = compute(e, m);
    memo_.emplace(key, r);
    return r;
  }

  // Triples matched by some triple constraint of e.
  Mask cover(const TripleExpr & e)
  {
    if (auto it = cover_.find(&e); it != cover_.end()) return it->second;
    Mask c = std::visit(
      [&](const auto & n) -> Mask {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, te::Epsilon>)
          return 0;
        else if constexpr (std::is_same_v<T, te::TripleConstraint>)
          return tc_mask(n);
        else if constexpr (std::is_same_v<T, te::Star>)
          return cover(*n.inner);
        else
          return cover(*n.left) | cover(*n.right);
      },
      e.node);
    cover_.emplace(&e, c);
    return c;
  }

private:
  struct Key
  {
    const TripleExpr * e;
    Mask m;
    bool operator==(const Key &) const = default;
  };
  struct KeyHash
  {
    std::size_t operator()(const Key & k) const
    {
      return std::hash<const void *>{}(k.e) ^ (std::hash<Mask>{}(k.m) * 0x9e3779b97f4a7c15ULL);
    }
  };

  Mask tc_mask(const te::TripleConstraint & tc)
  {
    Mask out = 0;
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (tc_matches(triples_[i], tc, tau_)) out |= Mask{1} << i;
    return out;
  }

  bool compute(const TripleExpr & e, Mask m)
  {
    return std::visit(
      [&](const auto & n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, te::Epsilon>)
          return m == 0;
        else if constexpr (std::is_same_v<T, te::TripleConstraint>)
          return std::popcount(m) == 1 && (m & cover(e)) == m;
        else if constexpr (std::is_same_v<T, te::OneOf>)
          return match(*n.left, m) || match(*n.right, m);
        else if constexpr (std::is_same_v<T, te::EachOf>)
          return each_of(*n.left, *n.right, m);
        else
          return star(e, *n.inner, m);
      },
      e.node);
  }

  bool each_of(const TripleExpr & l, const TripleExpr & r, Mask m)
  {
    Mask cl = cover(l), cr = cover(r);
    // A triple outside cover(l) can only go right, and vice versa.
    Mask forced_left = m & ~cr;
    Mask forced_right = m & ~cl;
    if (forced_left & forced_right) return false;
    Mask free = m & cl & cr;
    for (Mask sub = free;; sub = (sub - 1) & free) {
      Mask left = forced_left | sub;
      if (match(l, left) && match(r, m ^ left)) return true;
      if (sub == 0) break;
    }
    return false;
  }

  bool star(const TripleExpr & self, const TripleExpr & inner, Mask m)
  {
    if (m == 0) return true;
    if (m & ~cover(inner)) return false;
    // The block holding the lowest triple is matched first; the rest recurses.
    Mask anchor = m & (~m + 1);
    Mask rest = m ^ anchor;
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      Mask block = anchor | sub;
      if (match(inner, block) && match(self, m ^ block)) return true;
      if (sub == 0) break;
    }
    return false;
  }

  std::span<const Triple> triples_;
  const Typing & tau_;
  bool memoize_;
  std::unordered_map<Key, bool, KeyHash> memo_;
  std::unordered_map<const TripleExpr *, Mask> cover_;
};

}  // namespace

bool sat_te(std::span<const Triple> m, const Typing & tau, const TripleExpr & e, MatchOptions options)
{
  MatchArena arena(m, tau, options.memoize);
  return arena.match(e, arena.all());
}

SplitMatching split_matching(std::span<const Triple> m, const Typing & tau, const TripleExpr & e)
{
  auto constraints = tcs(e);
  auto props = props_of_expr(e);
  SplitMatching out;
  for (const auto & t : m) {
    bool hit = std::any_of(constraints.begin(), constraints.end(),
                           [&](const te::TripleConstraint * tc) { return tc_matches(t, *tc, tau); });
    if (hit)
      out.matching.push_back(t);
    else if (props.contains(t.predicate))
      out.non_matching.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

namespace
{

constexpr std::size_t max_extends_depth = 4096;

std::vector<Triple> pick(std::span<const Triple> m, Mask mask)
{
  std::vector<Triple> out;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (mask & (Mask{1} << i)) out.push_back(m[i]);
  return out;
}

}  // namespace

Evaluator::Evaluator(const Graph & g, const Schema & s, MatchOptions options)
: graph_(g), schema_(s), options_(options), hierarchy_(build_hierarchy(s))
{
}

const std::vector<LabelName> & Evaluator::ancestors_of(const se::ShapeWithExtends & t) const
{
  if (auto it = ancestor_cache_.find(&t); it != ancestor_cache_.end()) return it->second;
  auto anc = reachable_ancestors(hierarchy_, {t.bases.begin(), t.bases.end()});
  return ancestor_cache_.emplace(&t, std::vector<LabelName>(anc.begin(), anc.end())).first->second;
}

bool Evaluator::sat_node(const RdfNode & n, const Typing & tau, const ShapeExpr & s) const
{
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Constraint>)
        return eval_node_constraint(x.constraint, n);
      else if constexpr (std::is_same_v<T, se::Ref>)
        return tau.contains(n, x.label);
      else if constexpr (std::is_same_v<T, se::And>)
        return sat_node(n, tau, *x.left) && sat_node(n, tau, *x.right);
      else if constexpr (std::is_same_v<T, se::Or>)
        return sat_node(n, tau, *x.left) || sat_node(n, tau, *x.right);
      else if constexpr (std::is_same_v<T, se::Not>)
        return !sat_node(n, tau, *x.inner);
      else
        return sat_set(n, graph_.neighbourhood(n), tau, s);
    },
    s.node);
}

bool Evaluator::sat_set(const RdfNode & subject, std::span<const Triple> m, const Typing & tau,
                        const ShapeExpr & s) const
{
  return std::visit(
    [&](const auto & x) -> bool {
      using T = std::decay_t<decltype(x)>;
      if constexpr (std::is_same_v<T, se::Constraint>)
        return eval_node_constraint(x.constraint, subject);
      else if constexpr (std::is_same_v<T, se::Ref>)
        return tau.contains(subject, x.label);
      else if constexpr (std::is_same_v<T, se::And>)
        return sat_set(subject, m, tau, *x.left) && sat_set(subject, m, tau, *x.right);
      else if constexpr (std::is_same_v<T, se::Or>)
        return sat_set(subject, m, tau, *x.left) || sat_set(subject, m, tau, *x.right);
      else if constexpr (std::is_same_v<T, se::Not>)
        return !sat_set(subject, m, tau, *x.inner);
      else if constexpr (std::is_same_v<T, se::Shape>)
        return sat_shape(m, tau, x);
      else
        return sat_extends(subject, m, tau, x);
    },
    s.node);
}

bool Evaluator::sat_shape(std::span<const Triple> m, const Typing & tau, const se::Shape & h) const
{
  const TripleExpr & e = *h.expr;
  auto [matching, non_matching] = split_matching(m, tau, e);
  for (const auto & t : non_matching)
    if (!h.extra.contains(t.predicate)) return false;
  if (h.closed) {
    auto props = props_of_expr(e);
    for (const auto & t : m)
      if (!props.contains(t.predicate) && !h.extra.contains(t.predicate)) return false;
  }
  return sat_te(matching, tau, e, options_);
}

bool Evaluator::sat_extends(const RdfNode & subject, std::span<const Triple> m, const Typing & tau,
                            const se::ShapeWithExtends & t) const
{
  GuardKey key{&t, subject, {m.begin(), m.end()}};
  if (std::find(path_.begin(), path_.end(), key) != path_.end() || path_.size() >= max_extends_depth) {
    ++guard_trips_;
    throw RecursionGuardError("recursive extends evaluation on " + subject.to_string() + " with " +
                              std::to_string(m.size()) + " triple(s); the extension hierarchy is cyclic");
  }
  path_.push_back(std::move(key));
  struct Pop
  {
    std::vector<GuardKey> & p;
    ~Pop() { p.pop_back(); }
  } pop{path_};

  if (m.size() > max_match_triples)
    throw std::length_error("neighbourhood too large for extends matching (more than 64 triples)");

  const std::vector<LabelName> & anc = ancestors_of(t);
  const std::size_t k = anc.size();
  const Mask all = full_mask(m.size());

  // Per-slot candidate masks: a triple may go to slot x only if some triple
  // constraint of ext_te(x) matches it.
  std::vector<TripleExprPtr> slot_expr(k);
  std::vector<MatchArena> arenas;
  arenas.reserve(k);
  std::vector<Mask> slot_cand(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (!schema_.is_extendable(anc[i]) || !schema_.leading_extends(anc[i]))
      throw SchemaError("extends names a label without an extendable definition: " + anc[i]);
    slot_expr[i] = ext_te(schema_, anc[i]);
    arenas.emplace_back(m, tau, options_.memoize);
    slot_cand[i] = arenas.back().cover(*slot_expr[i]);
  }

  // Local slot: a triple is admissible iff the plain shape check would not reject it on its own.
  const se::Shape & h = t.shape;
  const TripleExpr & e = *h.expr;
  MatchArena local(m, tau, options_.memoize);
  const Mask local_match = local.cover(e);
  const auto props = props_of_expr(e);
  Mask local_cand = 0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto & p = m[j].predicate;
    bool ok;
    if (props.contains(p))
      ok = (local_match >> j & 1) || h.extra.contains(p);
    else
      ok = !h.closed || h.extra.contains(p);
    if (ok) local_cand |= Mask{1} << j;
  }

  Mask any_cand = local_cand;
  for (Mask c : slot_cand) any_cand |= c;
  if (any_cand != all) return false;

  // Labels with a restriction, together with the slots of their ancestors.
  struct Restriction
  {
    ShapeExprPtr expr;
    std::vector<std::size_t> slots;
    std::map<Mask, bool> memo;
  };
  std::vector<Restriction> restrictions;
  for (std::size_t i = 0; i < k; ++i) {
    auto u = restr(schema_, anc[i]);
    if (!u) continue;
    auto up = reachable_ancestors(hierarchy_, {anc[i]});
    Restriction r{u, {}, {}};
    for (std::size_t j = 0; j < k; ++j)
      if (up.contains(anc[j])) r.slots.push_back(j);
    restrictions.push_back(std::move(r));
  }

  // Later slots are tried in order of increasing candidate count; suffix[i]
  // is the union of candidates for slots order[i..] plus the local slot.
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::popcount(slot_cand[a]) < std::popcount(slot_cand[b]);
  });
  std::vector<Mask> suffix(k + 1, local_cand);
  for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] | slot_cand[order[i]];

  std::vector<Mask> assigned(k, 0);

  auto finish = [&](Mask remaining) -> bool {
    if (remaining & ~local_cand) return false;
    if (!local.match(e, remaining & local_match)) return false;
    for (auto & r : restrictions) {
      Mask u = 0;
      for (std::size_t j : r.slots) u |= assigned[j];
      auto it = r.memo.find(u);
      if (it == r.memo.end()) {
        auto sub = pick(m, u);
        it = r.memo.emplace(u, sat_set(subject, sub, tau, *r.expr)).first;
      }
      if (!it->second) return false;
    }
    return true;
  };

  // Without restrictions a search state is determined by (depth, remaining),
  // so failed states can be remembered.
  const bool memo_failures = restrictions.empty() && options_.memoize;
  std::vector<std::unordered_set<Mask>> failed(k + 1);

  auto search = [&](auto & self, std::size_t depth, Mask remaining) -> bool {
    if (remaining & ~suffix[depth]) return false;
    if (depth == k) return finish(remaining);
    if (memo_failures && failed[depth].contains(remaining)) return false;
    std::size_t slot = order[depth];
    Mask avail = remaining & slot_cand[slot];
    for (Mask sub = avail;; sub = (sub - 1) & avail) {
      if (arenas[slot].match(*slot_expr[slot], sub)) {
        assigned[slot] = sub;
        if (self(self, depth + 1, remaining ^ sub)) return true;
      }
      if (sub == 0) break;
    }
    assigned[slot] = 0;
    if (memo_failures) failed[depth].insert(remaining);
    return false;
  };

  return search(search, 0, all);
}

}  // namespace shexi
