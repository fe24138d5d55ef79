#ifndef SPANLINE_DOMINATION_HPP
#define SPANLINE_DOMINATION_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eval.hpp"
#include "json_io.hpp"
#include "regex.hpp"

namespace spanline {

/// A rule given as a spanner over X ∪ X†.
struct RegularRule {
  std::string name;
  VarSetAutomaton spanner;
  VarSet domain;
};

/// A single-variable template over {x, x†}, applied to every variable.
/// The template may depend on the alphabet (for Σ*).
struct VariableWiseRule {
  std::string name;
  std::function<Regex(const Alphabet&)> make_template;
  /// Target variables; empty means the variables of the compared mappings.
  VarSet domain;
};

/// A comparator predicate: predicate(d, m1, m2) is m1 ⪯ m2.
struct NativeRule {
  std::string name;
  std::function<bool(const Document&, const Mapping&, const Mapping&)> predicate;
  VarSet domain;
};

using DominationRule = std::variant<RegularRule, VariableWiseRule, NativeRule>;

/// The template variable and its dagger copy.
inline const std::string kTemplateVar = "x";
inline const std::string kTemplateDagger = dagger(kTemplateVar);

inline std::string rule_name(const DominationRule& r) {
  return std::visit([](const auto& x) { return x.name; }, r);
}

inline const VarSet& rule_domain(const DominationRule& r) {
  return std::visit([](const auto& x) -> const VarSet& { return x.domain; }, r);
}

inline DominationRule with_domain(DominationRule r, const VarSet& domain) {
  std::visit([&](auto& x) { x.domain = domain; }, r);
  return r;
}

// ---------------------------------------------------------------------------
// Built-in templates

namespace templates {

/// Σ* x†{x{Σ*}} Σ* | Σ*
inline Regex self(const Alphabet& s) {
  using namespace re;
  return alt(concat_all({sigma_star(s), capture(kTemplateDagger, capture(kTemplateVar, sigma_star(s))), sigma_star(s)}),
             sigma_star(s));
}

/// Σ* x†{Σ*} Σ* | self
inline Regex var_inc(const Alphabet& s) {
  using namespace re;
  return alt(concat_all({sigma_star(s), capture(kTemplateDagger, sigma_star(s)), sigma_star(s)}), self(s));
}

/// Σ* x†{Σ* x{Σ*} Σ*} Σ* | Σ*
inline Regex span_inc(const Alphabet& s) {
  using namespace re;
  auto inner = concat_all({sigma_star(s), capture(kTemplateVar, sigma_star(s)), sigma_star(s)});
  return alt(concat_all({sigma_star(s), capture(kTemplateDagger, inner), sigma_star(s)}), sigma_star(s));
}

/// Σ* x†{x{Σ*} Σ*} Σ* | Σ*
inline Regex ltr(const Alphabet& s) {
  using namespace re;
  auto inner = concat(capture(kTemplateVar, sigma_star(s)), sigma_star(s));
  return alt(concat_all({sigma_star(s), capture(kTemplateDagger, inner), sigma_star(s)}), sigma_star(s));
}

}  // namespace templates

namespace native {

inline bool self(const Document&, const Mapping& m1, const Mapping& m2) { return m1 == m2; }

inline bool var_inc(const Document&, const Mapping& m1, const Mapping& m2) {
  return std::all_of(m1.begin(), m1.end(), [&](const auto& kv) { return m2.get(kv.first) == kv.second; });
}

inline bool same_domain(const Mapping& m1, const Mapping& m2) {
  if (m1.size() != m2.size()) return false;
  return std::all_of(m1.begin(), m1.end(), [&](const auto& kv) { return m2.assigns(kv.first); });
}

inline bool span_inc(const Document&, const Mapping& m1, const Mapping& m2) {
  if (!same_domain(m1, m2)) return false;
  return std::all_of(m1.begin(), m1.end(), [&](const auto& kv) { return span_included(kv.second, *m2.get(kv.first)); });
}

inline bool ltr(const Document&, const Mapping& m1, const Mapping& m2) {
  if (!same_domain(m1, m2)) return false;
  return std::all_of(m1.begin(), m1.end(), [&](const auto& kv) {
    auto s2 = *m2.get(kv.first);
    return kv.second.begin == s2.begin && kv.second.end <= s2.end;
  });
}

/// Same domain and no span gets shorter. Distinct mappings whose lengths are
/// all equal are incomparable.
inline bool span_len(const Document&, const Mapping& m1, const Mapping& m2) {
  if (m1 == m2) return true;
  if (!same_domain(m1, m2)) return false;
  bool all_equal = true;
  for (const auto& [v, s1] : m1) {
    auto s2 = *m2.get(v);
    if (s2.length() < s1.length()) return false;
    if (s2.length() != s1.length()) all_equal = false;
  }
  return !all_equal;
}

}  // namespace native

inline DominationRule variable_wise(std::string name, std::function<Regex(const Alphabet&)> make) {
  return VariableWiseRule{std::move(name), std::move(make), {}};
}

inline DominationRule native_rule(std::string name,
                                  std::function<bool(const Document&, const Mapping&, const Mapping&)> pred) {
  return NativeRule{std::move(name), std::move(pred), {}};
}

/// Built-in rule by CLI name. self/varinc/spaninc/ltr are the regular
/// variable-wise templates, spanlen is native. With `fast`, the first four
/// use their native comparators instead.
inline DominationRule builtin_rule(const std::string& name, bool fast = false) {
  if (name == "self") return fast ? native_rule(name, native::self) : variable_wise(name, templates::self);
  if (name == "varinc") return fast ? native_rule(name, native::var_inc) : variable_wise(name, templates::var_inc);
  if (name == "spaninc") return fast ? native_rule(name, native::span_inc) : variable_wise(name, templates::span_inc);
  if (name == "ltr") return fast ? native_rule(name, native::ltr) : variable_wise(name, templates::ltr);
  if (name == "spanlen") return native_rule(name, native::span_len);
  throw ValidationError("unknown rule: " + name);
}

inline const std::vector<std::string>& builtin_rule_names() {
  static const std::vector<std::string> names{"self", "varinc", "spaninc", "ltr", "spanlen"};
  return names;
}

/// Compiled template of a variable-wise rule over the given alphabet.
inline VarSetAutomaton template_automaton(const VariableWiseRule& r, const Alphabet& sigma) {
  auto e = r.make_template(sigma);
  auto vars = capture_variables(e);
  for (const auto& v : vars)
    if (v != kTemplateVar && v != kTemplateDagger)
      throw ValidationError("variable-wise template may only use " + kTemplateVar + " and " + kTemplateDagger);
  Alphabet full = sigma;
  auto letters = regex_letters(e);
  full.insert(letters.begin(), letters.end());
  auto a = compile(e, full);
  a.variables.insert(kTemplateVar);
  a.variables.insert(kTemplateDagger);
  return a;
}

/// The spanner accepting every document with the empty mapping.
inline VarSetAutomaton universal_automaton(const Alphabet& sigma) {
  VarSetAutomaton a(sigma, {});
  a.finals[0] = true;
  for (char c : sigma) a.add_transition(0, Symbol::letter_of(c), 0);
  a.flags = {true, true, true, true};
  return a;
}

/// ⨉_{y∈X} of renamed copies of a single-variable template.
inline VarSetAutomaton instantiate_variable_wise(const VarSetAutomaton& tmpl, const VarSet& target) {
  VarSetAutomaton out = universal_automaton(tmpl.alphabet);
  bool first = true;
  for (const auto& y : target) {
    auto copy = rename_variables(tmpl, {{kTemplateVar, y}, {kTemplateDagger, dagger(y)}});
    copy.flags.sequential = true;
    out = first ? copy : cartesian_product(out, copy);
    first = false;
  }
  out.flags.sequential = true;
  return out;
}

inline RegularRule instantiate_variable_wise(const VariableWiseRule& r, const VarSet& target, const Alphabet& sigma) {
  auto tmpl = template_automaton(r, sigma);
  auto spanner = instantiate_variable_wise(tmpl, target);
  spanner.variables.clear();
  for (const auto& y : target) {
    spanner.variables.insert(y);
    spanner.variables.insert(dagger(y));
  }
  return RegularRule{r.name, std::move(spanner), target};
}

/// Variables of X for a spanner over X ∪ X†.
inline VarSet base_variables(const VarSet& vars) {
  VarSet out;
  for (const auto& v : vars) out.insert(is_dagger(v) ? undagger(v) : v);
  return out;
}

inline RegularRule make_regular_rule(std::string name, VarSetAutomaton spanner) {
  auto dom = base_variables(spanner.variables);
  return RegularRule{std::move(name), std::move(spanner), std::move(dom)};
}

// ---------------------------------------------------------------------------
// Comparison

/// m1 ⪯ m2 under a rule on a fixed document. Caches the compiled template
/// and per-variable verdicts; one instance per thread.
class Dominance {
 public:
  Dominance(const DominationRule& rule, const Document& d) : rule_(rule), doc_(d) {
    if (const auto* vw = std::get_if<VariableWiseRule>(&rule_)) tmpl_ = template_automaton(*vw, d.alphabet());
  }

  bool operator()(const Mapping& m1, const Mapping& m2) {
    check_domain(m1);
    check_domain(m2);
    if (const auto* reg = std::get_if<RegularRule>(&rule_)) return contains(reg->spanner, doc_, merge(m1, dagger(m2)));
    if (const auto* nat = std::get_if<NativeRule>(&rule_)) return nat->predicate(doc_, m1, m2);
    const auto& dom = rule_domain(rule_);
    if (!dom.empty()) {
      for (const auto& y : dom)
        if (!single(m1.get(y), m2.get(y))) return false;
      return true;
    }
    // walk the union of both domains in order
    auto i = m1.begin(), j = m2.begin();
    while (i != m1.end() || j != m2.end()) {
      std::optional<Span> s1, s2;
      if (j == m2.end() || (i != m1.end() && i->first < j->first)) {
        s1 = (i++)->second;
      } else if (i == m1.end() || j->first < i->first) {
        s2 = (j++)->second;
      } else {
        s1 = (i++)->second;
        s2 = (j++)->second;
      }
      if (!single(s1, s2)) return false;
    }
    return true;
  }

  /// Verdict of a variable-wise template on one variable's pair of spans.
  bool single(const std::optional<Span>& s1, const std::optional<Span>& s2) {
    if (!tmpl_) throw InvariantError("single-variable test on a rule without a template");
    auto key = std::make_pair(s1, s2);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Mapping m;
    if (s1) m.assign(kTemplateVar, *s1);
    if (s2) m.assign(kTemplateDagger, *s2);
    bool v = contains(*tmpl_, doc_, m);
    cache_.emplace(key, v);
    return v;
  }

  const Document& document() const { return doc_; }
  const DominationRule& rule() const { return rule_; }

 private:
  void check_domain(const Mapping& m) const {
    if (!m.fits(doc_)) throw DomainError("mapping " + to_string(m) + " does not fit the document");
    const auto& dom = rule_domain(rule_);
    if (dom.empty()) return;
    for (const auto& [v, _] : m)
      if (!dom.contains(v)) throw DomainError("variable " + v + " is outside the rule's variable set");
  }

  DominationRule rule_;
  Document doc_;
  std::optional<VarSetAutomaton> tmpl_;
  std::map<std::pair<std::optional<Span>, std::optional<Span>>, bool> cache_;
};

inline bool dominates(const DominationRule& rule, const Document& d, const Mapping& m1, const Mapping& m2) {
  return Dominance(rule, d)(m1, m2);
}

// ---------------------------------------------------------------------------
// Validation

struct RuleValidation {
  bool reflexive = true;
  bool antisymmetric = true;
  bool transitive = true;
  std::size_t elements = 0;
  std::size_t related_pairs = 0;
  std::vector<std::string> violations;

  bool ok() const { return reflexive && antisymmetric && transitive; }
};

namespace detail {

inline constexpr std::size_t kMaxReportedViolations = 20;

inline void note_violation(RuleValidation& r, std::string msg) {
  if (r.violations.size() < kMaxReportedViolations) r.violations.push_back(std::move(msg));
}

/// Checks the partial-order axioms on a relation over `elems`.
inline RuleValidation check_partial_order(const std::vector<Mapping>& elems,
                                          const std::vector<std::vector<std::uint64_t>>& rel) {
  RuleValidation r;
  const auto n = elems.size();
  r.elements = n;
  auto get = [&](std::size_t i, std::size_t j) { return (rel[i][j / 64] >> (j % 64)) & 1u; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!get(i, i)) {
      r.reflexive = false;
      note_violation(r, "not reflexive at " + to_string(elems[i]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!get(i, j)) continue;
      ++r.related_pairs;
      if (j > i && get(j, i)) {
        r.antisymmetric = false;
        note_violation(r, "not antisymmetric: " + to_string(elems[i]) + " and " + to_string(elems[j]));
      }
      if (i == j) continue;
      // i ⪯ j requires rel[j] ⊆ rel[i].
      for (std::size_t w = 0; w < rel[j].size(); ++w) {
        auto missing = rel[j][w] & ~rel[i][w];
        if (!missing) continue;
        r.transitive = false;
        auto k = w * 64 + static_cast<std::size_t>(std::countr_zero(missing));
        note_violation(r, "not transitive: " + to_string(elems[i]) + " <= " + to_string(elems[j]) + " <= " +
                              to_string(elems[k]));
        break;
      }
    }
  }
  return r;
}

}  // namespace detail

/// All mappings over `vars` whose spans fit a document of length n.
inline std::vector<Mapping> all_mappings(const VarSet& vars, std::size_t n) {
  std::vector<Mapping> out{Mapping{}};
  auto spans = all_spans(n);
  for (const auto& v : vars) {
    std::vector<Mapping> next;
    for (const auto& m : out) {
      next.push_back(m);
      for (const auto& s : spans) {
        auto ext = m;
        ext.assign(v, s);
        next.push_back(std::move(ext));
      }
    }
    out = std::move(next);
  }
  return out;
}

/// Exhaustive mode: the axioms over every mapping on `vars` (all spans of d
/// plus unassigned).
inline RuleValidation validate_rule(const DominationRule& rule, const Document& d, const VarSet& vars) {
  auto elems = all_mappings(vars, d.size());
  Dominance dom(rule, d);
  const auto n = elems.size();
  std::vector<std::vector<std::uint64_t>> rel(n, std::vector<std::uint64_t>((n + 63) / 64, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (dom(elems[i], elems[j])) rel[i][j / 64] |= std::uint64_t{1} << (j % 64);
  return detail::check_partial_order(elems, rel);
}

/// Exhaustive mode on the rule's natural variables: {x} for templates and
/// native rules without a domain.
inline RuleValidation validate_rule(const DominationRule& rule, const Document& d) {
  VarSet vars = rule_domain(rule);
  if (vars.empty()) vars = {kTemplateVar};
  return validate_rule(rule, d, vars);
}

/// Relation mode: the axioms on the support of the materialized relation of
/// a regular rule.
inline RuleValidation validate_relation(const RegularRule& rule, const Document& d) {
  std::vector<std::pair<Mapping, Mapping>> pairs;
  std::set<Mapping> support;
  VarSet daggers;
  for (const auto& v : rule.domain) daggers.insert(dagger(v));
  for (const auto& m : evaluate(rule.spanner, d)) {
    Mapping lhs = m.restrict(rule.domain), rhs;
    for (const auto& [v, s] : m)
      if (is_dagger(v)) rhs.assign(undagger(v), s);
    support.insert(lhs);
    support.insert(rhs);
    pairs.emplace_back(std::move(lhs), std::move(rhs));
  }
  std::vector<Mapping> elems(support.begin(), support.end());
  const auto n = elems.size();
  std::vector<std::vector<std::uint64_t>> rel(n, std::vector<std::uint64_t>((n + 63) / 64, 0));
  auto pos = [&](const Mapping& m) {
    return static_cast<std::size_t>(std::lower_bound(elems.begin(), elems.end(), m) - elems.begin());
  };
  for (const auto& [l, r] : pairs) {
    auto j = pos(r);
    rel[pos(l)][j / 64] |= std::uint64_t{1} << (j % 64);
  }
  return detail::check_partial_order(elems, rel);
}

// ---------------------------------------------------------------------------
// Rule files

/// Loads "file:<path>" rules. The first line is "variable-wise" (a regex
/// over x and x! follows) or "explicit" (a regex over X ∪ X† or a VA JSON
/// follows).
inline DominationRule load_rule_file(const std::string& path) {
  auto text = read_file(path);
  auto nl = text.find('\n');
  std::string header = text.substr(0, nl);
  while (!header.empty() && std::isspace(static_cast<unsigned char>(header.back()))) header.pop_back();
  std::string body = nl == std::string::npos ? "" : text.substr(nl + 1);
  auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw ValidationError("rule file has no body: " + path);
  if (header == "variable-wise") {
    auto e = parse_regex(body);
    auto vars = capture_variables(e);
    for (const auto& v : vars)
      if (v != kTemplateVar && v != kTemplateDagger)
        throw ValidationError("variable-wise rule may only use " + kTemplateVar + " and " + kTemplateDagger);
    return variable_wise("file:" + path, [e](const Alphabet&) { return e; });
  }
  if (header == "explicit") {
    if (body[first] == '{') return make_regular_rule("file:" + path, automaton_from_json(parse_json_text(body, path)));
    return make_regular_rule("file:" + path, compile(parse_regex(body)));
  }
  throw ValidationError("rule file header must be 'variable-wise' or 'explicit': " + path);
}

/// Rule by CLI name: a built-in name or file:<path>.
inline DominationRule parse_rule(const std::string& name, bool fast = false) {
  if (name.rfind("file:", 0) == 0) return load_rule_file(name.substr(5));
  return builtin_rule(name, fast);
}

}  // namespace spanline

#endif  // SPANLINE_DOMINATION_HPP
