// spanline: command-line front end for the spanner engine.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spanline/spanline.hpp"

namespace fs = std::filesystem;
using namespace spanline;

namespace {

struct SpannerArg {
  std::string value;
  bool force_regex = false;
  bool force_va = false;
};

struct DocArg {
  std::string file;
  std::optional<std::string> text;
  std::string alphabet;
};

bool looks_like_va_file(const std::string& v) {
  if (!fs::is_regular_file(v)) return false;
  if (fs::path(v).extension() == ".json") return true;
  auto body = read_file(v);
  auto p = body.find_first_not_of(" \t\r\n");
  return p != std::string::npos && body[p] == '{';
}

Alphabet alphabet_of(const std::string& s) { return Alphabet(s.begin(), s.end()); }

VarSetAutomaton load_spanner(const SpannerArg& a, const Alphabet& sigma, const Alphabet& letters) {
  bool as_va = a.force_va || (!a.force_regex && looks_like_va_file(a.value));
  if (as_va) {
    auto va = load_automaton(a.value);
    auto report = check_sequential(va);
    if (!report.sequential) throw ValidationError("automaton in " + a.value + " is not sequential");
    va.flags.sequential = true;
    return va;
  }
  return compile(parse_regex(a.value, sigma.empty() ? std::nullopt : std::optional<Alphabet>(sigma), letters), sigma);
}

Document load_document(const DocArg& d) {
  std::string text;
  if (d.text) {
    text = *d.text;
  } else if (!d.file.empty()) {
    text = read_file(d.file);
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  } else {
    throw ValidationError("a document is required: give a file or --doc");
  }
  if (!d.alphabet.empty()) return Document(text, alphabet_of(d.alphabet));
  return Document(text);
}

void print_mappings(const MappingSet& ms, const VarSet& vars) {
  for (const auto& m : ms) std::cout << to_json(m, vars).dump() << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << text;
}

void emit_json(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(path, j.dump(2) + "\n");
  }
}

std::uint64_t seed_from_env() {
  const char* s = std::getenv("SPANLINE_SEED");
  if (!s || !*s) return 1;
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ValidationError(std::string("SPANLINE_SEED is not a number: ") + s);
  }
}

VarSet split_vars(const std::string& csv) {
  VarSet out;
  std::string cur;
  for (char c : csv + ",") {
    if (c == ',') {
      if (!cur.empty()) {
        if (!is_valid_variable_name(cur)) throw ValidationError("invalid variable name: " + cur);
        out.insert(cur);
      }
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    }
  }
  return out;
}

void add_spanner(CLI::App* cmd, SpannerArg& s) {
  cmd->add_option("spanner", s.value, "regex formula or VA JSON file")->required();
  cmd->add_flag("--regex", s.force_regex, "treat the spanner argument as a regex formula");
  cmd->add_flag("--va", s.force_va, "treat the spanner argument as a VA JSON file");
}

void add_document(CLI::App* cmd, DocArg& d) {
  cmd->add_option("document", d.file, "document file");
  cmd->add_option("--doc", d.text, "document text");
  cmd->add_option("--alphabet", d.alphabet, "declared alphabet, as a string of letters");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spanline: regex formulas, variable-set automata and skyline extraction"};
  app.require_subcommand(1);

  // compile
  std::string regex_src, out_path, alphabet;
  auto* c_compile = app.add_subcommand("compile", "compile a regex formula to a VA (JSON)");
  c_compile->add_option("regex", regex_src, "regex formula")->required();
  c_compile->add_option("-o,--output", out_path, "output file (default stdout)");
  c_compile->add_option("--alphabet", alphabet, "declared alphabet");

  // eval
  SpannerArg e_sp;
  DocArg e_doc;
  auto* c_eval = app.add_subcommand("eval", "evaluate a spanner on a document (JSON Lines)");
  add_spanner(c_eval, e_sp);
  add_document(c_eval, e_doc);

  // skyline
  SpannerArg s_sp;
  DocArg s_doc;
  std::string s_rule = "varinc", s_mode = "direct", s_manifest;
  bool s_stats = false, s_fast = false;
  unsigned s_threads = 1;
  auto* c_sky = app.add_subcommand("skyline", "maximal mappings under a domination rule (JSON Lines)");
  c_sky->add_option("spanner", s_sp.value, "regex formula or VA JSON file");
  c_sky->add_flag("--regex", s_sp.force_regex, "treat the spanner argument as a regex formula");
  c_sky->add_flag("--va", s_sp.force_va, "treat the spanner argument as a VA JSON file");
  add_document(c_sky, s_doc);
  c_sky->add_option("--rule", s_rule, "self | varinc | spaninc | ltr | spanlen | file:<path>");
  c_sky->add_option("--mode", s_mode, "direct | compiled")->check(CLI::IsMember({"direct", "compiled"}));
  c_sky->add_flag("--stats", s_stats, "print a stats object on stderr");
  c_sky->add_flag("--fast", s_fast, "use native comparators for built-in rules in direct mode");
  c_sky->add_option("--threads", s_threads, "worker threads for the direct filter")->check(CLI::PositiveNumber);
  c_sky->add_option("--manifest", s_manifest, "reduction manifest supplying spanner, document and rule");

  // analyze-rule
  std::string a_rule;
  DocArg a_doc;
  auto* c_an = app.add_subcommand("analyze-rule", "strict domination pairs, k_p and k_h of a single-variable rule");
  c_an->add_option("rule", a_rule, "rule name")->required();
  add_document(c_an, a_doc);

  // nrobp
  SpannerArg n_sp;
  DocArg n_doc;
  std::string n_dot;
  bool n_count = false;
  auto* c_nrobp = app.add_subcommand("nrobp", "branching program of the Boolean abstraction");
  add_spanner(c_nrobp, n_sp);
  add_document(c_nrobp, n_doc);
  c_nrobp->add_option("--dot", n_dot, "write DOT to this file");
  c_nrobp->add_flag("--count", n_count, "count models");

  // reduce
  std::string r_kind, r_input, r_dir = ".";
  auto* c_reduce = app.add_subcommand("reduce", "emit a reduction instance");
  c_reduce->add_option("kind", r_kind, "sat-skyline")->required()->check(CLI::IsMember({"sat-skyline"}));
  c_reduce->add_option("input", r_input, "DIMACS CNF file")->required();
  c_reduce->add_option("-o,--output-dir", r_dir, "output directory");

  // va
  std::string v_op, v_a, v_b, v_vars, v_out;
  auto* c_va = app.add_subcommand("va", "automaton-level operations on VA JSON files");
  c_va->add_option("op", v_op,
                   "union | concat | product | join | intersection | difference | project | dagger | trim | "
                   "eliminate-epsilon | order | determinize | decompose | stats")
      ->required()
      ->check(CLI::IsMember({"union", "concat", "product", "join", "intersection", "difference", "project", "dagger",
                             "trim", "eliminate-epsilon", "order", "determinize", "decompose", "stats"}));
  c_va->add_option("a", v_a, "first operand")->required();
  c_va->add_option("b", v_b, "second operand");
  c_va->add_option("--vars", v_vars, "projection variables, comma separated");
  c_va->add_option("-o,--output", v_out, "output file (default stdout)");

  // validate-rule
  std::string vr_rule, vr_vars;
  DocArg vr_doc;
  bool vr_relation = false;
  auto* c_vr = app.add_subcommand("validate-rule", "check the partial-order axioms of a rule on a document");
  c_vr->add_option("rule", vr_rule, "rule name")->required();
  add_document(c_vr, vr_doc);
  c_vr->add_option("--vars", vr_vars, "variables to enumerate (default: x)");
  c_vr->add_flag("--relation", vr_relation, "check only the support of the materialized relation (explicit rules)");

  // gen
  std::string g_kind;
  int g_states = 6, g_vars = 3, g_len = 4, g_cnf_vars = 3, g_cnf_clauses = 3;
  auto* c_gen = app.add_subcommand("gen", "random instances, seeded by SPANLINE_SEED");
  c_gen->add_option("kind", g_kind, "va | doc | cnf | cubic")->required()->check(CLI::IsMember({"va", "doc", "cnf", "cubic"}));
  c_gen->add_option("--states", g_states, "maximum states (va)");
  c_gen->add_option("--variables", g_vars, "maximum variables (va)");
  c_gen->add_option("--length", g_len, "document length (doc) or vertex count (cubic)");
  c_gen->add_option("--cnf-vars", g_cnf_vars, "CNF variables");
  c_gen->add_option("--cnf-clauses", g_cnf_clauses, "CNF clauses");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_compile) {
      auto a = compile(parse_regex(regex_src, alphabet.empty() ? std::nullopt : std::optional(alphabet_of(alphabet))),
                       alphabet_of(alphabet));
      emit_json(to_json(a), out_path);
    } else if (*c_eval) {
      auto doc = load_document(e_doc);
      auto a = load_spanner(e_sp, alphabet_of(e_doc.alphabet), doc.alphabet());
      print_mappings(evaluate(a, doc), a.variables);
    } else if (*c_sky) {
      Document doc;
      VarSetAutomaton a;
      if (!s_manifest.empty()) {
        auto m = parse_json_text(read_file(s_manifest), s_manifest);
        try {
          auto base = fs::path(s_manifest).parent_path();
          doc = Document(m.at("document").get<std::string>());
          a = load_automaton((base / m.at("va").get<std::string>()).string());
          if (c_sky->count("--rule") == 0) s_rule = m.at("rule").get<std::string>();
        } catch (const Json::exception& ex) {
          throw ValidationError(std::string("malformed manifest: ") + ex.what());
        }
      } else {
        if (s_sp.value.empty()) throw ValidationError("a spanner or --manifest is required");
        doc = load_document(s_doc);
        a = load_spanner(s_sp, alphabet_of(s_doc.alphabet), doc.alphabet());
      }
      auto rule = parse_rule(s_rule, s_fast && s_mode == "direct");
      Json stats{{"mode", s_mode}, {"rule", s_rule}};
      MappingSet out;
      if (s_mode == "direct") {
        auto all = evaluate(a, doc);
        stats["input_count"] = all.size();
        out = skyline_filter(all, doc, rule, s_threads);
      } else {
        SkylineBuildStats bs;
        auto b = skyline_compiled(a, rule, &bs);
        stats["input_count"] = evaluate(a, doc).size();
        stats["constructed_states"] = bs.output_states;
        stats["constructed_transitions"] = bs.output_transitions;
        out = evaluate(b, doc);
      }
      stats["output_count"] = out.size();
      print_mappings(out, a.variables);
      if (s_stats) std::cerr << stats.dump() << "\n";
    } else if (*c_an) {
      auto doc = load_document(a_doc);
      std::cout << to_json(analyze_rule(parse_rule(a_rule), doc)).dump(2) << "\n";
    } else if (*c_nrobp) {
      auto doc = load_document(n_doc);
      auto a = load_spanner(n_sp, alphabet_of(n_doc.alphabet), doc.alphabet());
      auto p = to_nrobp(a, doc);
      Json j{{"nodes", p.num_nodes},
             {"edges", p.edges.size()},
             {"variables", p.variables},
             {"acyclic", is_acyclic(p)},
             {"read_once", check_read_once(p)}};
      if (n_count) j["models"] = count_models(p);
      if (!n_dot.empty()) write_text(n_dot, to_dot(p));
      std::cout << j.dump(2) << "\n";
    } else if (*c_reduce) {
      auto f = parse_dimacs(read_file(r_input));
      auto red = sat_to_skyline(f);
      fs::create_directories(r_dir);
      write_text((fs::path(r_dir) / "va.json").string(), to_json(red.automaton).dump(2) + "\n");
      Json manifest{{"document", red.document.text()},
                    {"threshold", red.threshold},
                    {"rule", red.rule},
                    {"va", "va.json"},
                    {"formula", red.formula}};
      write_text((fs::path(r_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
      std::cout << manifest.dump(2) << "\n";
    } else if (*c_va) {
      auto a = load_automaton(v_a);
      auto need_b = [&] {
        if (v_b.empty()) throw ValidationError("operation " + v_op + " needs two operands");
        return load_automaton(v_b);
      };
      if (v_op == "stats") {
        emit_json(to_json(stats(a)), v_out);
      } else if (v_op == "decompose") {
        Json parts = Json::array();
        for (const auto& p : decompose(a)) parts.push_back({{"domain", p.domain}, {"automaton", to_json(p.automaton)}});
        emit_json(parts, v_out);
      } else {
        VarSetAutomaton r;
        if (v_op == "union") r = union_(a, need_b());
        else if (v_op == "concat") r = concat(a, need_b());
        else if (v_op == "product") r = cartesian_product(a, need_b());
        else if (v_op == "join") r = join(a, need_b());
        else if (v_op == "intersection") r = intersection(a, need_b());
        else if (v_op == "difference") r = difference(a, need_b());
        else if (v_op == "project") r = project(a, split_vars(v_vars));
        else if (v_op == "dagger") r = rename_dagger(a);
        else if (v_op == "trim") r = trim(a);
        else if (v_op == "eliminate-epsilon") r = eliminate_epsilon(a);
        else if (v_op == "order") r = order_markers(a);
        else r = determinize_refwords(a);
        emit_json(to_json(r), v_out);
      }
    } else if (*c_vr) {
      auto doc = load_document(vr_doc);
      auto rule = parse_rule(vr_rule);
      RuleValidation v;
      if (vr_relation) {
        const auto* reg = std::get_if<RegularRule>(&rule);
        if (!reg) throw ValidationError("relation mode needs an explicit rule");
        v = validate_relation(*reg, doc);
      } else {
        v = vr_vars.empty() ? validate_rule(rule, doc) : validate_rule(rule, doc, split_vars(vr_vars));
      }
      Json j{{"rule", vr_rule},         {"reflexive", v.reflexive},   {"antisymmetric", v.antisymmetric},
             {"transitive", v.transitive}, {"elements", v.elements}, {"related_pairs", v.related_pairs},
             {"violations", v.violations}};
      std::cout << j.dump(2) << "\n";
      return v.ok() ? 0 : 4;
    } else if (*c_gen) {
      auto seed = seed_from_env();
      if (g_kind == "va") {
        RandomVaLimits lim;
        lim.max_states = g_states;
        lim.max_variables = g_vars;
        std::cout << to_json(random_va(seed, lim)).dump(2) << "\n";
      } else if (g_kind == "doc") {
        std::cout << random_doc(seed, static_cast<std::size_t>(g_len)).text() << "\n";
      } else if (g_kind == "cnf") {
        std::cout << to_dimacs(random_cnf(seed, g_cnf_vars, g_cnf_clauses));
      } else {
        std::cout << to_dimacs(graph_to_cnf(random_cubic_graph(g_len, seed)));
      }
    }
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
