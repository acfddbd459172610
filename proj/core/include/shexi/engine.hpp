#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shexi/analysis.hpp"
#include "shexi/schema_text.hpp"
#include "shexi/semantics.hpp"

namespace shexi
{

/// How a label z is checked on a node n.
enum class ConformanceMode {
  /// z must be satisfied through some non-abstract descendant of z (z itself
  /// included); simple labels are checked against their own definition.
  descendant_closure,
  /// Non-abstract labels are checked against their own definition only;
  /// abstract ones through a non-abstract descendant.
  literal_def4
};

std::string_view to_string(ConformanceMode m);
/// Accepts "descendant-closure" and "literal-def4"; nullopt otherwise.
std::optional<ConformanceMode> parse_conformance_mode(std::string_view text);

/// Whether (n, z) is justified by tau under the given mode.
bool conforms(const Evaluator & ev, const RdfNode & n, const LabelName & z, const Typing & tau,
              ConformanceMode mode);

/// True iff every (n, z) in tau is justified by tau. Throws SchemaError when
/// tau mentions a label outside s.
bool is_correct_typing(const Graph & g, const Schema & s, const Typing & tau,
                       ConformanceMode mode = ConformanceMode::descendant_closure);

struct RefinementStats
{
  /// |tau| after seeding and after each round, per stratum.
  std::vector<std::vector<std::size_t>> sizes;
  std::size_t evaluations = 0;
  std::size_t memo_hits = 0;
};

struct TypingOptions
{
  ConformanceMode mode = ConformanceMode::descendant_closure;
  /// Worker threads per refinement round (1 = sequential).
  unsigned threads = 1;
  MatchOptions match;
};

/// The maximal correct typing, built stratum by stratum by deleting
/// unjustified pairs until a fixed point. Throws AnalysisError on an
/// ill-defined schema.
Typing maximal_typing(const Graph & g, const Schema & s, const Stratification & sigma,
                      const TypingOptions & options = {}, RefinementStats * stats = nullptr);
Typing maximal_typing(const Graph & g, const Schema & s, const TypingOptions & options = {},
                      RefinementStats * stats = nullptr);

class OracleBoundError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive reference: per stratum, the union of all correct typings of the
/// restricted schema that extend the previous stratum's result. Throws
/// OracleBoundError when |nodes| * |labels| exceeds `bound`.
Typing brute_force_maximal_typing(const Graph & g, const Schema & s,
                                  ConformanceMode mode = ConformanceMode::descendant_closure,
                                  std::size_t bound = 20);

struct Verdict
{
  RdfNode node;
  LabelName label;
  bool conformant;
};

struct ValidationReport
{
  ConformanceMode mode = ConformanceMode::descendant_closure;
  Stratification strata;
  std::vector<Verdict> verdicts;
  std::optional<Typing> typing;
  std::vector<std::string> diagnostics;
  double elapsed_ms = 0;

  bool all_conformant() const;
};

struct ValidateOptions
{
  TypingOptions typing;
  bool dump_typing = false;
};

/// Answers each request (ALL expands to every label) against the maximal typing.
ValidationReport validate(const Graph & g, const Schema & s, const std::vector<ShapeMapRequest> & requests,
                          const ValidateOptions & options = {});

/// JSON rendering: {mode, strata, stratum_count, verdicts, typing?, diagnostics, elapsed_ms}.
std::string to_json(const ValidationReport & r, int indent = 2);

}  // namespace shexi
