#ifndef SPANLINE_SKYLINE_HPP
#define SPANLINE_SKYLINE_HPP

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "domination.hpp"

namespace spanline {

/// The skyline construction needs a regular rule.
class NonRegularRule : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---------------------------------------------------------------------------
// Direct evaluation

/// Maximal elements of `mappings` under the rule on d: every m for which no
/// other m' satisfies m ⪯ m'.
inline MappingSet skyline_filter(const MappingSet& mappings, const Document& d, const DominationRule& rule,
                                 unsigned threads = 1) {
  std::vector<Mapping> elems(mappings.begin(), mappings.end());
  std::vector<char> dominated(elems.size(), 0);
  auto work = [&](std::size_t lo, std::size_t hi) {
    Dominance dom(rule, d);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < elems.size(); ++j) {
        if (i != j && dom(elems[i], elems[j])) {
          dominated[i] = 1;
          break;
        }
      }
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(elems.size(), 1))));
  if (threads == 1) {
    work(0, elems.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (elems.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      auto lo = std::min(elems.size(), t * chunk), hi = std::min(elems.size(), (t + 1) * chunk);
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  MappingSet out;
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (!dominated[i]) out.insert(elems[i]);
  return out;
}

inline MappingSet skyline_direct(const VarSetAutomaton& a, const Document& d, const DominationRule& rule,
                                 unsigned threads = 1) {
  return skyline_filter(evaluate(a, d), d, rule, threads);
}

// ---------------------------------------------------------------------------
// Compiled construction

struct SkylineBuildStats {
  int input_states = 0;
  int strict_rule_states = 0;
  int dominated_states = 0;
  int output_states = 0;
  std::size_t output_transitions = 0;
};

/// Builds P_sky = P − π_X((P × P†) ∩ (D − D_self)). The strict part D − D_self
/// depends only on the rule, X and the alphabet and is cached.
class SkylineCompiler {
 public:
  VarSetAutomaton compile(const VarSetAutomaton& a, const DominationRule& rule, SkylineBuildStats* stats = nullptr) {
    if (std::holds_alternative<NativeRule>(rule))
      throw NonRegularRule("rule " + rule_name(rule) + " is not regular; use the direct mode");
    VarSet x = a.variables;
    Alphabet sigma = a.alphabet;
    if (const auto* reg = std::get_if<RegularRule>(&rule)) {
      for (const auto& v : a.variables)
        if (!reg->domain.contains(v)) throw DomainError("rule variables do not cover variable " + v);
      x = reg->domain;
      sigma.insert(reg->spanner.alphabet.begin(), reg->spanner.alphabet.end());
    }
    const auto& strict = strict_part(rule, x, sigma);
    auto pairs = cartesian_product(a, rename_dagger(a));
    auto dominated = project(intersection(pairs, strict), x);
    auto out = difference(a, dominated);
    out.variables = a.variables;
    out.alphabet.insert(a.alphabet.begin(), a.alphabet.end());
    out.flags.sequential = true;
    if (stats) {
      stats->input_states = a.num_states;
      stats->strict_rule_states = strict.num_states;
      stats->dominated_states = dominated.num_states;
      stats->output_states = out.num_states;
      stats->output_transitions = out.transitions.size();
    }
    return out;
  }

  /// D − D_self over X ∪ X†, with D_self instantiated variable-wise on X.
  const VarSetAutomaton& strict_part(const DominationRule& rule, const VarSet& x, const Alphabet& sigma) {
    auto key = std::make_tuple(rule_name(rule), x, sigma);
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    VarSetAutomaton d;
    if (const auto* reg = std::get_if<RegularRule>(&rule)) {
      d = reg->spanner;
    } else {
      d = instantiate_variable_wise(std::get<VariableWiseRule>(rule), x, sigma).spanner;
    }
    VariableWiseRule self{"self", templates::self, {}};
    auto d_self = instantiate_variable_wise(self, x, sigma).spanner;
    auto strict = difference(d, d_self);
    for (const auto& v : x) {
      strict.variables.insert(v);
      strict.variables.insert(dagger(v));
    }
    return cache_.emplace(key, std::move(strict)).first->second;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<std::string, VarSet, Alphabet>, VarSetAutomaton> cache_;
};

inline VarSetAutomaton skyline_compiled(const VarSetAutomaton& a, const DominationRule& rule,
                                        SkylineBuildStats* stats = nullptr) {
  SkylineCompiler c;
  return c.compile(a, rule, stats);
}

// ---------------------------------------------------------------------------
// Rule analysis

/// A span of one variable, or unassigned.
using MaybeSpan = std::optional<Span>;

inline std::string to_string(const MaybeSpan& s) { return s ? to_string(*s) : "-"; }

struct StrictDominationPair {
  MaybeSpan lhs;
  MaybeSpan rhs;
  Span covering;
};

/// Smallest span containing both sides; unassigned is contained in every span.
inline Span covering_span(const MaybeSpan& a, const MaybeSpan& b) {
  if (!a && !b) throw DomainError("covering of two unassigned sides is undefined");
  if (!a) return *b;
  if (!b) return *a;
  return Span(std::min(a->begin, b->begin), std::max(a->end, b->end));
}

/// Size of a largest pairwise disjoint subfamily. Empty spans are disjoint
/// from everything; the rest is interval scheduling by earliest end.
inline std::size_t max_disjoint(std::vector<Span> coverings) {
  std::size_t count = 0;
  std::vector<Span> solid;
  for (const auto& s : coverings) {
    if (s.empty()) ++count;
    else solid.push_back(s);
  }
  std::sort(solid.begin(), solid.end(), [](const Span& a, const Span& b) {
    return std::tie(a.end, a.begin) < std::tie(b.end, b.begin);
  });
  std::size_t last_end = 0;
  bool any = false;
  for (const auto& s : solid) {
    if (!any || s.begin >= last_end) {
      ++count;
      last_end = s.end;
      any = true;
    }
  }
  return count;
}

/// Minimum number of unit intervals [i,i+1) such that every span contains
/// one of them, by greedy point stabbing. Spans must be non-empty.
inline std::size_t hitting_number(std::vector<Span> spans) {
  for (const auto& s : spans)
    if (s.empty()) throw DomainError("empty span cannot be hit by a unit interval");
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return std::tie(a.end, a.begin) < std::tie(b.end, b.begin);
  });
  std::size_t count = 0;
  std::optional<std::size_t> point;
  for (const auto& s : spans) {
    if (point && s.begin <= *point && *point < s.end) continue;
    point = s.end - 1;
    ++count;
  }
  return count;
}

struct RuleAnalysis {
  std::vector<StrictDominationPair> pairs;
  std::size_t max_disjoint = 0;
  std::optional<std::size_t> hitting_number;
  bool variable_inclusion_like = true;
  bool has_empty_rhs = false;
};

/// Materializes the strict pairs of a single-variable rule over all spans of
/// d plus unassigned, then measures k_p and, where defined, k_h.
inline RuleAnalysis analyze_rule(const DominationRule& rule, const Document& d) {
  std::string var = kTemplateVar;
  const auto& dom = rule_domain(rule);
  if (dom.size() > 1) throw DomainError("rule analysis needs a single-variable rule");
  if (dom.size() == 1) var = *dom.begin();
  std::vector<MaybeSpan> values{std::nullopt};
  for (const auto& s : all_spans(d.size())) values.emplace_back(s);
  auto as_mapping = [&](const MaybeSpan& s) {
    Mapping m;
    if (s) m.assign(var, *s);
    return m;
  };
  Dominance cmp(rule, d);
  RuleAnalysis r;
  std::vector<Span> coverings;
  std::vector<Span> rhs_spans;
  for (const auto& a : values) {
    for (const auto& b : values) {
      if (a == b || !cmp(as_mapping(a), as_mapping(b))) continue;
      auto cov = covering_span(a, b);
      r.pairs.push_back({a, b, cov});
      coverings.push_back(cov);
      if (a) r.variable_inclusion_like = false;
      if (b && b->empty()) r.has_empty_rhs = true;
      if (b) rhs_spans.push_back(*b);
    }
  }
  r.max_disjoint = max_disjoint(coverings);
  if (r.variable_inclusion_like && !r.has_empty_rhs) r.hitting_number = hitting_number(rhs_spans);
  return r;
}

inline Json to_json(const RuleAnalysis& r) {
  Json j;
  j["pairs"] = Json::array();
  for (const auto& p : r.pairs) {
    j["pairs"].push_back({{"lhs", p.lhs ? to_json(*p.lhs) : Json(nullptr)},
                          {"rhs", p.rhs ? to_json(*p.rhs) : Json(nullptr)},
                          {"covering", to_json(p.covering)}});
  }
  j["max_disjoint"] = r.max_disjoint;
  j["hitting_number"] = r.hitting_number ? Json(*r.hitting_number) : Json(nullptr);
  j["variable_inclusion_like"] = r.variable_inclusion_like;
  j["has_empty_rhs"] = r.has_empty_rhs;
  return j;
}

}  // namespace spanline

#endif  // SPANLINE_SKYLINE_HPP
