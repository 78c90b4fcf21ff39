// Copyright (c) the sdsi-names authors. All rights reserved.
// Licensed under the Apache 2.0 License.

#include "names/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "names/axioms.hpp"
#include "names/check.hpp"
#include "names/core.hpp"
#include "names/datalog.hpp"
#include "names/decision.hpp"
#include "names/parser.hpp"
#include "names/resolver.hpp"
#include "names/semantics.hpp"

namespace names::cli {

namespace {

// Input problems that are usage-level rather than semantic: unreadable
// files, malformed environment values.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

World load_world(const std::string& path) {
  return parse_world(read_file(path));
}

// Accepts "#k1" or "k1"; anything that is not a single key is rejected.
Key key_argument(const std::string& text) {
  const std::string spelled = !text.empty() && text[0] == '#' ? text
                                                              : "#" + text;
  ExprPtr e = parse_expr(spelled);
  if (e->kind() != PrincipalExpr::Kind::Key) {
    throw SemanticError("expected a key, got an expression: " + text);
  }
  return e->key_name();
}

std::uint64_t effective_budget(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NAMES_BUDGET")) {
    const std::string text(env);
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(text, &used);
    } catch (const std::exception&) {
      throw UsageError("NAMES_BUDGET is not a number: " + text);
    }
    if (used != text.size()) {
      throw UsageError("NAMES_BUDGET is not a number: " + text);
    }
    return value;
  }
  return SearchLimits{}.node_budget;
}

KeyUniverse universe_from_flags(const std::vector<std::string>& key_args) {
  if (key_args.empty()) return KeyUniverse::unbounded();
  KeySet keys;
  for (const std::string& t : key_args) keys.insert(key_argument(t));
  return KeyUniverse::finite(keys);
}

void print_key_set(const KeySet& keys, std::ostream& out) {
  if (keys.empty()) {
    out << "(empty)\n";
    return;
  }
  for (const Key& k : keys) out << "#" << k.id << "\n";
}

std::string render_constant(const Constant& c) {
  switch (c.space) {
    case Constant::Space::Key:
      return "#" + c.id;
    case Constant::Space::Global:
      return "!" + c.id;
    case Constant::Space::Local:
      return c.id;
    case Constant::Space::Self:
      return "self";
  }
  return c.id;
}

struct ResolveArgs {
  std::string world_path, as_text, expr_text, engine;
};

int run_resolve(const ResolveArgs& a, std::ostream& out, std::ostream& err) {
  World w = load_world(a.world_path);
  ExprPtr e = parse_expr(a.expr_text);
  w.declare_keys(keys_of(*e));
  const Key as = key_argument(a.as_text);
  if (w.declared_keys.count(as) == 0) {
    throw SemanticError("viewpoint key #" + as.id +
                        " is not declared in the world");
  }

  if (a.engine == "ref2") {
    print_key_set(ref2_all(as, w, e), out);
    return 0;
  }
  if (a.engine == "fixpoint") {
    print_key_set(interpret(e, w, minimal_assignment(w), as), out);
    return 0;
  }
  if (a.engine == "datalog") {
    print_key_set(resolve_via_datalog(as, w, e), out);
    return 0;
  }

  // Default: run all three independent engines and require agreement.
  const KeySet by_ref2 = ref2_all(as, w, e);
  const KeySet by_fixpoint = interpret(e, w, minimal_assignment(w), as);
  const KeySet by_datalog = resolve_via_datalog(as, w, e);
  if (by_ref2 != by_fixpoint || by_ref2 != by_datalog) {
    err << "internal error: resolution engines disagree on " << render(e)
        << " from #" << as.id << "\n";
    auto dump = [&err](const char* label, const KeySet& ks) {
      err << "  " << label << ":";
      for (const Key& k : ks) err << " #" << k.id;
      err << "\n";
    };
    dump("ref2", by_ref2);
    dump("fixpoint", by_fixpoint);
    dump("datalog", by_datalog);
    return 4;
  }
  print_key_set(by_ref2, out);
  return 0;
}

struct TraceArgs {
  std::string world_path, as_text, expr_text, target_text;
};

int run_trace(const TraceArgs& a, std::ostream& out) {
  World w = load_world(a.world_path);
  ExprPtr e = parse_expr(a.expr_text);
  w.declare_keys(keys_of(*e));
  const Key as = key_argument(a.as_text);
  if (w.declared_keys.count(as) == 0) {
    throw SemanticError("viewpoint key #" + as.id +
                        " is not declared in the world");
  }
  const Key target = key_argument(a.target_text);
  std::optional<ComputationTree> tree = ref2_trace(as, w, e, target);
  if (!tree) {
    out << "ABSENT\n";
    return 0;
  }
  NAMES_CHECK(validate_tree(*tree, w), "produced computation tree is invalid");
  out << render_tree(*tree);
  return 0;
}

struct CheckArgs {
  std::string world_path, as_text, formula_text, semantics, lna_path;
};

int run_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  World w = load_world(a.world_path);
  FormulaPtr f = parse_formula(a.formula_text);
  w.declare_keys(keys_of(*f));
  const Key as = key_argument(a.as_text);
  if (w.declared_keys.count(as) == 0) {
    throw SemanticError("viewpoint key #" + as.id +
                        " is not declared in the world");
  }
  if (a.semantics == "closed") {
    out << (models_closed(w, as, *f) ? "TRUE" : "FALSE") << "\n";
    return 0;
  }
  if (a.lna_path.empty()) {
    err << "check --semantics open requires --lna <file>\n";
    return 1;
  }
  const WitnessDoc doc = parse_witness(read_file(a.lna_path));
  switch (models_open(w, doc.lna, as, *f)) {
    case OpenOutcome::True:
      out << "TRUE\n";
      break;
    case OpenOutcome::False:
      out << "FALSE\n";
      break;
    case OpenOutcome::InconsistentAssignment:
      out << "INCONSISTENT-LNA\n";
      break;
  }
  return 0;
}

struct DecisionArgs {
  std::string formula_text;
  std::vector<std::string> key_args;
  std::optional<std::uint64_t> budget;
};

int run_sat(const DecisionArgs& a, std::ostream& out) {
  FormulaPtr f = parse_formula(a.formula_text);
  SearchLimits limits{effective_budget(a.budget)};
  try {
    SatResult r = satisfiable(f, universe_from_flags(a.key_args), limits);
    if (!r.witness) {
      out << "UNSAT\n";
      return 0;
    }
    out << "SAT\n"
        << render_witness(r.witness->world, r.witness->assignment,
                          r.witness->viewpoint);
    return 0;
  } catch (const ResourceLimitError&) {
    out << "BUDGET-EXCEEDED\n";
    return 3;
  }
}

int run_valid(const DecisionArgs& a, std::ostream& out) {
  FormulaPtr f = parse_formula(a.formula_text);
  SearchLimits limits{effective_budget(a.budget)};
  try {
    ValidityResult r = valid_check(f, universe_from_flags(a.key_args), limits);
    if (r.is_valid()) {
      out << "VALID\n";
      return 0;
    }
    out << "INVALID\n"
        << render_witness(r.countermodel->world, r.countermodel->assignment,
                          r.countermodel->viewpoint);
    return 0;
  } catch (const ResourceLimitError&) {
    out << "BUDGET-EXCEEDED\n";
    return 3;
  }
}

struct QueryArgs {
  std::string world_path, query_text;
};

int run_query(const QueryArgs& a, std::ostream& out) {
  World w = load_world(a.world_path);
  const std::vector<Atom> atoms = parse_query(a.query_text);
  for (const Atom& atom : atoms) {
    for (const Term* t : {&atom.principal, &atom.name, &atom.value}) {
      if (const auto* c = std::get_if<Constant>(t)) {
        if (c->space == Constant::Space::Key) w.declare_key(Key{c->id});
      }
    }
  }
  const FactSet model = minimal_model(world_to_program(w));
  for (const Substitution& sub : answer_query(model, atoms)) {
    if (sub.empty()) {
      out << "()\n";  // a ground query that holds
      continue;
    }
    bool first = true;
    for (const auto& [var, value] : sub) {
      if (!first) out << "\t";
      first = false;
      out << var.name << "=" << render_constant(value);
    }
    out << "\n";
  }
  return 0;
}

void run_list_schemas(std::ostream& out) {
  for (const Schema& s : schema_registry()) {
    out << s.name << ": " << s.display << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{
      "Resolution and reasoning over linked local name spaces: resolve "
      "names three independent ways, trace derivations, check formulas, "
      "decide satisfiability and validity, and export worlds as logic "
      "programs."};
  app.name("sdsi-names");

  bool list_flag = false;
  app.add_flag("--list-schemas", list_flag,
               "List the registered formula schemas and exit");

  ResolveArgs resolve_args;
  CLI::App* resolve_cmd = app.add_subcommand(
      "resolve", "Resolve a name expression to the set of keys it denotes");
  resolve_cmd->add_option("world", resolve_args.world_path, "World file")
      ->required();
  resolve_cmd->add_option("--as", resolve_args.as_text, "Viewpoint key")
      ->required();
  resolve_cmd
      ->add_option("--expr", resolve_args.expr_text, "Principal expression")
      ->required();
  resolve_cmd
      ->add_option("--engine", resolve_args.engine,
                   "Use one engine instead of cross-checking all three")
      ->check(CLI::IsMember({"ref2", "fixpoint", "datalog"}));

  TraceArgs trace_args;
  CLI::App* trace_cmd = app.add_subcommand(
      "trace", "Show a derivation tree for one resolved key, or ABSENT");
  trace_cmd->add_option("world", trace_args.world_path, "World file")
      ->required();
  trace_cmd->add_option("--as", trace_args.as_text, "Viewpoint key")
      ->required();
  trace_cmd->add_option("--expr", trace_args.expr_text, "Principal expression")
      ->required();
  trace_cmd->add_option("--target", trace_args.target_text, "Key to explain")
      ->required();

  CheckArgs check_args;
  check_args.semantics = "closed";
  CLI::App* check_cmd =
      app.add_subcommand("check", "Evaluate a formula against a world");
  check_cmd->add_option("world", check_args.world_path, "World file")
      ->required();
  check_cmd->add_option("--as", check_args.as_text, "Viewpoint key")
      ->required();
  check_cmd->add_option("--formula", check_args.formula_text, "Formula")
      ->required();
  check_cmd
      ->add_option("--semantics", check_args.semantics,
                   "closed (default) or open")
      ->check(CLI::IsMember({"closed", "open"}));
  check_cmd->add_option(
      "--lna", check_args.lna_path,
      "File with local-name assignment lines (open semantics)");

  DecisionArgs sat_args;
  CLI::App* sat_cmd =
      app.add_subcommand("sat", "Decide satisfiability of a formula");
  sat_cmd->add_option("formula", sat_args.formula_text, "Formula")->required();
  CLI::Option* sat_keys =
      sat_cmd
          ->add_option("--keys", sat_args.key_args,
                       "Fix a finite key universe (keys as #k1 #k2 ...)")
          ->expected(-1);
  bool sat_unbounded = false;
  sat_cmd
      ->add_flag("--unbounded", sat_unbounded,
                 "Unbounded key universe (the default)")
      ->excludes(sat_keys);
  sat_cmd->add_option("--budget", sat_args.budget,
                      "Search node budget (default 10000000, or NAMES_BUDGET)");

  DecisionArgs valid_args;
  CLI::App* valid_cmd =
      app.add_subcommand("valid", "Decide validity of a formula");
  valid_cmd->add_option("formula", valid_args.formula_text, "Formula")
      ->required();
  CLI::Option* valid_keys =
      valid_cmd
          ->add_option("--keys", valid_args.key_args,
                       "Fix a finite key universe (keys as #k1 #k2 ...)")
          ->expected(-1);
  bool valid_unbounded = false;
  valid_cmd
      ->add_flag("--unbounded", valid_unbounded,
                 "Unbounded key universe (the default)")
      ->excludes(valid_keys);
  valid_cmd->add_option(
      "--budget", valid_args.budget,
      "Search node budget (default 10000000, or NAMES_BUDGET)");

  QueryArgs query_args;
  CLI::App* query_cmd = app.add_subcommand(
      "query", "Answer a conjunctive query against a world's logic program");
  query_cmd->add_option("world", query_args.world_path, "World file")
      ->required();
  query_cmd
      ->add_option("--q", query_args.query_text,
                   "Comma-separated name(t, t, t) atoms; variables start "
                   "uppercase; one line per answer, a ground query that "
                   "holds prints ()")
      ->required();

  CLI::App* emit_cmd = app.add_subcommand(
      "emit-datalog", "Print the world's logic program");
  std::string emit_world_path;
  emit_cmd->add_option("world", emit_world_path, "World file")->required();

  CLI::App* list_cmd = app.add_subcommand(
      "list-schemas", "List the registered formula schemas");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  try {
    if (list_flag || list_cmd->parsed()) {
      run_list_schemas(out);
      return 0;
    }
    if (resolve_cmd->parsed()) return run_resolve(resolve_args, out, err);
    if (trace_cmd->parsed()) return run_trace(trace_args, out);
    if (check_cmd->parsed()) return run_check(check_args, out, err);
    if (sat_cmd->parsed()) return run_sat(sat_args, out);
    if (valid_cmd->parsed()) return run_valid(valid_args, out);
    if (query_cmd->parsed()) return run_query(query_args, out);
    if (emit_cmd->parsed()) {
      out << emit_program(world_to_program(load_world(emit_world_path)));
      return 0;
    }
    err << app.help();
    return 1;
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const ResourceLimitError& e) {
    err << e.what() << "\n";
    return 3;
  } catch (const SemanticError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace names::cli
