#include "shexi/engine.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

namespace shexi
{

std::string_view to_string(ConformanceMode m)
{
  return m == ConformanceMode::literal_def4 ? "literal-def4" : "descendant-closure";
}

std::optional<ConformanceMode> parse_conformance_mode(std::string_view text)
{
  if (text == "descendant-closure") return ConformanceMode::descendant_closure;
  if (text == "literal-def4") return ConformanceMode::literal_def4;
  return std::nullopt;
}

namespace
{

// Labels whose definition may justify z.
std::vector<LabelName> justifying_labels(const Schema & s, const ExtensionHierarchy & h,
                                         const LabelName & z, ConformanceMode mode)
{
  bool via_descendants = mode == ConformanceMode::literal_def4 ? s.is_abstract(z) : s.is_extendable(z);
  if (!via_descendants) return {z};
  std::vector<LabelName> out;
  for (const auto & x : descendants(h, z))
    if (!s.is_abstract(x)) out.push_back(x);
  return out;
}

// Checks (n, z) against a fixed tau, sharing sat_node results per (n, x).
class Justifier
{
public:
  Justifier(const Graph & g, const Schema & s, ConformanceMode mode, MatchOptions match)
  : schema_(s), ev_(g, s, match), mode_(mode)
  {
  }

  bool check(const RdfNode & n, const LabelName & z, const Typing & tau)
  {
    auto it = witnesses_.find(z);
    if (it == witnesses_.end())
      it = witnesses_.emplace(z, justifying_labels(schema_, ev_.hierarchy(), z, mode_)).first;
    for (const auto & x : it->second) {
      auto key = std::make_pair(n, x);
      auto m = memo_.find(key);
      if (m != memo_.end()) {
        ++hits;
        if (m->second) return true;
        continue;
      }
      ++evaluations;
      bool r = ev_.sat_node(n, tau, schema_.definition(x));
      memo_.emplace(std::move(key), r);
      if (r) return true;
    }
    return false;
  }

  void reset() { memo_.clear(); }

  std::size_t evaluations = 0;
  std::size_t hits = 0;

private:
  const Schema & schema_;
  Evaluator ev_;
  ConformanceMode mode_;
  std::map<LabelName, std::vector<LabelName>> witnesses_;
  std::map<std::pair<RdfNode, LabelName>, bool> memo_;
};

void check_labels(const Schema & s, const Typing & tau)
{
  for (const auto & [n, z] : tau)
    if (!s.has_label(z)) throw SchemaError("typing mentions unknown label: " + z);
}

}  // namespace

bool conforms(const Evaluator & ev, const RdfNode & n, const LabelName & z, const Typing & tau,
              ConformanceMode mode)
{
  for (const auto & x : justifying_labels(ev.schema(), ev.hierarchy(), z, mode))
    if (ev.sat_node(n, tau, ev.schema().definition(x))) return true;
  return false;
}

bool is_correct_typing(const Graph & g, const Schema & s, const Typing & tau, ConformanceMode mode)
{
  check_labels(s, tau);
  Justifier j(g, s, mode, {});
  for (const auto & [n, z] : tau)
    if (!j.check(n, z, tau)) return false;
  return true;
}

Typing maximal_typing(const Graph & g, const Schema & s, const Stratification & sigma,
                      const TypingOptions & options, RefinementStats * stats)
{
  if (auto wd = check_well_defined(s); !wd.ok()) throw AnalysisError(wd.describe());
  if (auto problems = check_stratification(s, sigma); !problems.empty())
    throw AnalysisError("invalid stratification: " + problems.front());

  const unsigned workers = std::max(1u, options.threads);
  std::vector<Justifier> justifiers;
  justifiers.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) justifiers.emplace_back(g, s, options.mode, options.match);

  Typing tau;
  for (int i = 1; i <= sigma.stratum_count; ++i) {
    std::vector<Typing::Pair> live;
    for (const auto & z : sigma.labels_on(i))
      for (const auto & n : g.nodes()) {
        tau.insert(n, z);
        live.emplace_back(n, z);
      }
    std::vector<std::size_t> sizes{tau.size()};

    for (;;) {
      for (auto & j : justifiers) j.reset();
      std::vector<char> keep(live.size(), 1);
      const Typing & snapshot = tau;
      auto run = [&](unsigned w) {
        for (std::size_t p = w; p < live.size(); p += workers)
          keep[p] = justifiers[w].check(live[p].first, live[p].second, snapshot);
      };
      if (workers == 1 || live.size() < 2) {
        for (unsigned w = 0; w < workers; ++w) run(w);
      } else {
        std::vector<std::exception_ptr> errors(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
          pool.emplace_back([&, w] {
            try {
              run(w);
            } catch (...) {
              errors[w] = std::current_exception();
            }
          });
        for (auto & t : pool) t.join();
        for (auto & e : errors)
          if (e) std::rethrow_exception(e);
      }

      // Simultaneous deletion of every unjustified pair.
      std::vector<Typing::Pair> next;
      for (std::size_t p = 0; p < live.size(); ++p) {
        if (keep[p])
          next.push_back(std::move(live[p]));
        else
          tau.erase(live[p].first, live[p].second);
      }
      bool changed = next.size() != live.size();
      live = std::move(next);
      if (!changed) break;
      sizes.push_back(tau.size());
    }
    if (stats) stats->sizes.push_back(std::move(sizes));
  }
  if (stats)
    for (const auto & j : justifiers) {
      stats->evaluations += j.evaluations;
      stats->memo_hits += j.hits;
    }
  return tau;
}

Typing maximal_typing(const Graph & g, const Schema & s, const TypingOptions & options,
                      RefinementStats * stats)
{
  return maximal_typing(g, s, stratify(s), options, stats);
}

Typing brute_force_maximal_typing(const Graph & g, const Schema & s, ConformanceMode mode,
                                  std::size_t bound)
{
  const auto labels = s.labels();
  if (g.nodes().size() * labels.size() > bound)
    throw OracleBoundError("instance too large for the exhaustive oracle: " +
                           std::to_string(g.nodes().size()) + " nodes x " +
                           std::to_string(labels.size()) + " labels exceeds " + std::to_string(bound));
  // The result does not depend on the stratification; the finest one keeps
  // each enumeration down to one strongly connected component.
  const Stratification sigma = stratify(s, StratificationPolicy::finest);

  Typing previous;
  for (int i = 1; i <= sigma.stratum_count; ++i) {
    const Schema si = restrict_schema(s, sigma, i);
    Evaluator ev(g, si);
    std::vector<Typing::Pair> cand;
    for (const auto & z : sigma.labels_on(i))
      for (const auto & n : g.nodes()) cand.emplace_back(n, z);
    if (cand.size() > 30)
      throw OracleBoundError("exhaustive oracle limited to 30 candidate pairs per stratum, got " +
                             std::to_string(cand.size()));

    std::map<LabelName, std::vector<LabelName>> justifiers;
    for (const auto & z : si.labels()) justifiers[z] = justifying_labels(si, ev.hierarchy(), z, mode);
    auto justified = [&](const RdfNode & n, const LabelName & z, const Typing & t) {
      for (const auto & x : justifiers.at(z))
        if (ev.sat_node(n, t, si.definition(x))) return true;
      return false;
    };

    Typing result = previous;
    const std::uint64_t subsets = std::uint64_t{1} << cand.size();
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      Typing t = previous;
      for (std::size_t b = 0; b < cand.size(); ++b)
        if (mask >> b & 1) t.insert(cand[b].first, cand[b].second);
      bool correct = true;
      for (const auto & [n, z] : t)
        if (!justified(n, z, t)) {
          correct = false;
          break;
        }
      if (correct) result.merge(t);
    }
    previous = std::move(result);
  }
  return previous;
}

bool ValidationReport::all_conformant() const
{
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict & v) { return v.conformant; });
}

ValidationReport validate(const Graph & g, const Schema & s, const std::vector<ShapeMapRequest> & requests,
                          const ValidateOptions & options)
{
  auto start = std::chrono::steady_clock::now();
  ValidationReport r;
  r.mode = options.typing.mode;
  for (const auto & d : check_schema_form(s)) r.diagnostics.push_back(d.label + ": " + d.message);
  r.strata = stratify(s);

  for (const auto & q : requests)
    if (q.label && !s.has_label(*q.label)) throw SchemaError("shape map names unknown label: " + *q.label);

  Typing tau = maximal_typing(g, s, r.strata, options.typing);
  for (const auto & q : requests) {
    if (!g.has_node(q.node)) r.diagnostics.push_back("node not in graph: " + q.node.to_string());
    std::vector<LabelName> targets = q.label ? std::vector<LabelName>{*q.label} : s.labels();
    for (auto & z : targets) {
      bool ok = tau.contains(q.node, z);
      r.verdicts.push_back({q.node, std::move(z), ok});
    }
  }
  if (options.dump_typing) r.typing = std::move(tau);
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string to_json(const ValidationReport & r, int indent)
{
  nlohmann::ordered_json j;
  j["mode"] = std::string(to_string(r.mode));
  nlohmann::ordered_json strata = nlohmann::ordered_json::object();
  for (const auto & [z, i] : r.strata.assignment) strata[z] = i;
  j["strata"] = std::move(strata);
  j["stratum_count"] = r.strata.stratum_count;
  auto verdicts = nlohmann::ordered_json::array();
  for (const auto & v : r.verdicts)
    verdicts.push_back({{"node", v.node.to_string()}, {"label", v.label}, {"conformant", v.conformant}});
  j["verdicts"] = std::move(verdicts);
  if (r.typing) {
    auto typing = nlohmann::ordered_json::array();
    for (const auto & [n, z] : *r.typing) typing.push_back({{"node", n.to_string()}, {"label", z}});
    j["typing"] = std::move(typing);
  }
  j["diagnostics"] = r.diagnostics;
  j["elapsed_ms"] = r.elapsed_ms;
  return j.dump(indent);
}

}  // namespace shexi
