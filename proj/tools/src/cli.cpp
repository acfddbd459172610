#include "shexi_cli/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "shexi/analysis.hpp"
#include "shexi/engine.hpp"
#include "shexi/schema_text.hpp"

namespace shexi::cli
{
namespace
{

struct InputError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string located(const std::string & path, const ParseError & e)
{
  return path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what();
}

// Loads a schema, reporting syntax and invariant problems on err.
std::optional<Schema> load_schema(const std::string & path, std::ostream & err)
{
  std::string text = read_file(path);
  try {
    return parse_schema(text);
  } catch (const ParseError & e) {
    err << located(path, e) << "\n";
  } catch (const SchemaFormError & e) {
    for (const auto & d : e.diagnostics()) err << path << ": " << d.label << ": " << d.message << "\n";
  }
  return std::nullopt;
}

void print_well_definedness(const WellDefinedness & wd, std::ostream & os)
{
  os << "well-defined: " << (wd.ok() ? "yes" : "no") << " (" << to_string(wd.verdict) << ")\n";
  for (const auto & c : wd.witnesses) os << "  witness: " << c.to_string() << "\n";
}

int cmd_check(const std::string & schema_path, std::ostream & out, std::ostream & err)
{
  auto s = load_schema(schema_path, err);
  if (!s) return input_error;
  out << "labels: " << s->labels().size() << " (" << s->extendable_labels().size() << " extendable, "
      << s->abstract_labels().size() << " abstract)\n";
  auto wd = check_well_defined(*s);
  print_well_definedness(wd, out);
  if (!wd.ok()) {
    err << wd.describe() << "\n";
    return ill_defined;
  }
  return ok;
}

int cmd_stratify(const std::string & schema_path, const std::string & policy_name, std::ostream & out,
                 std::ostream & err)
{
  auto s = load_schema(schema_path, err);
  if (!s) return input_error;
  auto wd = check_well_defined(*s);
  if (!wd.ok()) {
    print_well_definedness(wd, err);
    return ill_defined;
  }
  auto policy = policy_name == "finest" ? StratificationPolicy::finest : StratificationPolicy::minimal;
  auto sigma = stratify(*s, policy);
  out << "strata: " << sigma.stratum_count << "\n";
  for (int i = 1; i <= sigma.stratum_count; ++i) {
    out << "  " << i << ":";
    for (const auto & z : sigma.labels_on(i)) out << " " << z;
    out << "\n";
  }
  out << "\n" << hierarchy_dot(build_hierarchy(*s)) << "\n" << dependency_dot(build_dependency_graph(*s));
  return ok;
}

struct ValidateArgs
{
  std::string schema;
  std::string data;
  std::string map;
  std::string mode = "descendant-closure";
  std::string output;
  bool dump_typing = false;
  bool oracle_check = false;
  std::size_t oracle_bound = 20;
  unsigned threads = 1;
};

int cmd_validate(const ValidateArgs & a, std::ostream & out, std::ostream & err)
{
  auto mode = parse_conformance_mode(a.mode);
  if (!mode) {
    err << "unknown mode: " << a.mode << " (expected descendant-closure or literal-def4)\n";
    return input_error;
  }
  auto s = load_schema(a.schema, err);
  if (!s) return input_error;
  auto wd = check_well_defined(*s);
  if (!wd.ok()) {
    print_well_definedness(wd, err);
    return ill_defined;
  }

  Graph g;
  try {
    g = parse_graph(read_file(a.data));
  } catch (const ParseError & e) {
    err << located(a.data, e) << "\n";
    return input_error;
  }

  // --map takes a file path, or the shape map text itself.
  std::error_code ec;
  bool is_file = !a.map.empty() && std::filesystem::is_regular_file(a.map, ec);
  std::string map_text = is_file ? read_file(a.map) : a.map;
  std::vector<ShapeMapRequest> requests;
  try {
    requests = parse_shape_map(map_text, *s);
  } catch (const ParseError & e) {
    err << located(is_file ? a.map : std::string("<map>"), e) << "\n";
    return input_error;
  }

  ValidateOptions opts;
  opts.typing.mode = *mode;
  opts.typing.threads = a.threads;
  opts.dump_typing = a.dump_typing || a.oracle_check;
  ValidationReport report = validate(g, *s, requests, opts);

  bool mismatch = false;
  if (a.oracle_check) {
    try {
      Typing expected = brute_force_maximal_typing(g, *s, *mode, a.oracle_bound);
      mismatch = expected != *report.typing;
      report.diagnostics.push_back(mismatch ? "oracle check: refinement and exhaustive oracle disagree"
                                            : "oracle check: agreement");
    } catch (const OracleBoundError & e) {
      report.diagnostics.push_back(std::string("oracle check skipped: ") + e.what());
    }
    if (!a.dump_typing) report.typing.reset();
  }

  std::string json = to_json(report) + "\n";
  if (a.output.empty()) {
    out << json;
  } else {
    std::ofstream f(a.output, std::ios::binary);
    if (!f) throw InputError("cannot write " + a.output);
    f << json;
  }
  for (const auto & d : report.diagnostics) err << d << "\n";
  if (mismatch) return oracle_mismatch;
  return report.all_conformant() ? ok : non_conformant;
}

}  // namespace

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"shexi: shape expressions with inheritance for RDF graphs", "shexi"};
  app.require_subcommand(1);

  std::string schema_path;
  auto * check = app.add_subcommand("check", "Report schema diagnostics and well-definedness");
  check->add_option("schema", schema_path, "Schema file (.shexi)")->required();

  std::string policy = "minimal";
  auto * strat = app.add_subcommand("stratify", "Print strata and DOT graphs for the hierarchy and dependencies");
  strat->add_option("schema", schema_path, "Schema file (.shexi)")->required();
  strat->add_option("--policy", policy, "minimal or finest")->check(CLI::IsMember({"minimal", "finest"}));

  ValidateArgs v;
  auto * val = app.add_subcommand("validate", "Validate a shape map against a graph");
  val->add_option("--schema", v.schema, "Schema file (.shexi)")->required();
  val->add_option("--data", v.data, "Graph file (N-Triples subset)")->required();
  val->add_option("--map", v.map, "Shape map file, or inline `node @ Label` lines")->required();
  val->add_option("--mode", v.mode, "descendant-closure (default) or literal-def4");
  val->add_flag("--dump-typing", v.dump_typing, "Include the maximal typing in the report");
  val->add_flag("--oracle-check", v.oracle_check, "Cross-check against the exhaustive oracle");
  val->add_option("--oracle-bound", v.oracle_bound, "Largest |nodes| x |labels| the oracle accepts");
  val->add_option("--threads", v.threads, "Worker threads per refinement round")->check(CLI::Range(1u, 256u));
  val->add_option("-o,--output", v.output, "Write the report here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError & e) {
    int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  try {
    if (*check) return cmd_check(schema_path, out, err);
    if (*strat) return cmd_stratify(schema_path, policy, out, err);
    return cmd_validate(v, out, err);
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return input_error;
  }
}

}  // namespace shexi::cli
