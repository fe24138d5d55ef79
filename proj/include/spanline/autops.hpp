#ifndef SPANLINE_AUTOPS_HPP
#define SPANLINE_AUTOPS_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "automaton.hpp"

namespace spanline {

/// Operand variable sets overlap where the operation needs them disjoint.
class VariableClash : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

namespace detail {

inline std::vector<std::vector<StateId>> successor_lists(const VarSetAutomaton& a) {
  std::vector<std::vector<StateId>> succ(static_cast<std::size_t>(a.num_states));
  for (const auto& t : a.transitions) succ[static_cast<std::size_t>(t.from)].push_back(t.to);
  return succ;
}

inline std::vector<bool> reachable_from(const std::vector<std::vector<StateId>>& succ, const std::vector<StateId>& roots) {
  std::vector<bool> seen(succ.size(), false);
  std::vector<StateId> stack;
  for (auto r : roots) {
    if (!seen[static_cast<std::size_t>(r)]) {
      seen[static_cast<std::size_t>(r)] = true;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    auto q = stack.back();
    stack.pop_back();
    for (auto r : succ[static_cast<std::size_t>(q)]) {
      if (!seen[static_cast<std::size_t>(r)]) {
        seen[static_cast<std::size_t>(r)] = true;
        stack.push_back(r);
      }
    }
  }
  return seen;
}

/// States lying on some initial-to-final path.
inline std::vector<bool> useful_states(const VarSetAutomaton& a) {
  auto succ = successor_lists(a);
  std::vector<std::vector<StateId>> pred(succ.size());
  for (const auto& t : a.transitions) pred[static_cast<std::size_t>(t.to)].push_back(t.from);
  std::vector<StateId> finals;
  for (StateId q = 0; q < a.num_states; ++q)
    if (a.is_final(q)) finals.push_back(q);
  auto fwd = reachable_from(succ, {a.initial});
  auto bwd = reachable_from(pred, finals);
  std::vector<bool> useful(succ.size());
  for (std::size_t i = 0; i < useful.size(); ++i) useful[i] = fwd[i] && bwd[i];
  return useful;
}

/// Variables indexed densely for bitmask bookkeeping.
class VarIndex {
 public:
  explicit VarIndex(const VarSet& vars) : names_(vars.begin(), vars.end()) {
    if (names_.size() > 64) throw DomainError("at most 64 variables are supported per automaton");
  }
  int index(const std::string& v) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), v);
    if (it == names_.end() || *it != v) throw InvariantError("unknown variable " + v);
    return static_cast<int>(it - names_.begin());
  }
  std::uint64_t bit(const std::string& v) const { return std::uint64_t{1} << index(v); }
  std::uint64_t all() const { return names_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << names_.size()) - 1; }
  VarSet names_of(std::uint64_t mask) const {
    VarSet out;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (mask & (std::uint64_t{1} << i)) out.insert(names_[i]);
    return out;
  }
  std::uint64_t mask_of(const VarSet& vars) const {
    std::uint64_t m = 0;
    for (const auto& v : vars) m |= bit(v);
    return m;
  }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

inline VarSet all_variables(const VarSetAutomaton& a) {
  VarSet vars = a.variables;
  auto mv = a.marker_variables();
  vars.insert(mv.begin(), mv.end());
  return vars;
}

template <typename T>
std::set<T> set_union(const std::set<T>& x, const std::set<T>& y) {
  std::set<T> out = x;
  out.insert(y.begin(), y.end());
  return out;
}

template <typename T>
std::set<T> set_intersection(const std::set<T>& x, const std::set<T>& y) {
  std::set<T> out;
  for (const auto& e : x)
    if (y.contains(e)) out.insert(e);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Normalization

/// Removes every state that is not on an accepting run. If no accepting run
/// exists, returns the canonical empty automaton.
inline VarSetAutomaton trim(const VarSetAutomaton& a) {
  auto useful = detail::useful_states(a);
  if (!useful[static_cast<std::size_t>(a.initial)]) {
    auto e = empty_automaton(a.alphabet, a.variables);
    e.flags.functional = a.flags.functional;
    e.flags.deterministic = a.flags.deterministic;
    return e;
  }
  std::vector<StateId> renum(static_cast<std::size_t>(a.num_states), -1);
  VarSetAutomaton out(a.alphabet, a.variables);
  out.num_states = 0;
  out.finals.clear();
  for (StateId q = 0; q < a.num_states; ++q)
    if (useful[static_cast<std::size_t>(q)]) renum[static_cast<std::size_t>(q)] = out.add_state(a.is_final(q));
  out.initial = renum[static_cast<std::size_t>(a.initial)];
  for (const auto& t : a.transitions) {
    auto f = renum[static_cast<std::size_t>(t.from)], g = renum[static_cast<std::size_t>(t.to)];
    if (f >= 0 && g >= 0) out.transitions.push_back({f, t.label, g});
  }
  out.dedupe_transitions();
  out.flags = a.flags;
  return out;
}

/// Removes epsilon transitions without adding states: a state becomes final
/// when an epsilon path reaches a final state, and every letter or marker
/// transition is pulled back across the epsilon paths leading to its source.
inline VarSetAutomaton eliminate_epsilon(const VarSetAutomaton& a) {
  if (!a.has_epsilon()) return a;
  const auto n = static_cast<std::size_t>(a.num_states);
  std::vector<std::vector<StateId>> eps(n);
  std::vector<std::vector<const Transition*>> solid(n);
  for (const auto& t : a.transitions) {
    if (t.label.is_eps())
      eps[static_cast<std::size_t>(t.from)].push_back(t.to);
    else
      solid[static_cast<std::size_t>(t.from)].push_back(&t);
  }
  VarSetAutomaton out(a.alphabet, a.variables);
  out.num_states = a.num_states;
  out.initial = a.initial;
  out.finals.assign(n, false);
  // only the initial state and targets of solid transitions stay reachable
  std::vector<bool> entry(n, false);
  entry[static_cast<std::size_t>(a.initial)] = true;
  for (const auto& t : a.transitions)
    if (!t.label.is_eps()) entry[static_cast<std::size_t>(t.to)] = true;
  std::vector<std::size_t> stamp(n, 0);
  std::vector<StateId> stack;
  for (StateId q = 0; q < a.num_states; ++q) {
    if (!entry[static_cast<std::size_t>(q)]) continue;
    const auto mark = static_cast<std::size_t>(q) + 1;
    stack.assign(1, q);
    stamp[static_cast<std::size_t>(q)] = mark;
    while (!stack.empty()) {
      auto r = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      if (a.is_final(static_cast<StateId>(r))) out.finals[static_cast<std::size_t>(q)] = true;
      for (const auto* t : solid[r]) out.transitions.push_back({q, t->label, t->to});
      for (auto s : eps[r])
        if (stamp[static_cast<std::size_t>(s)] != mark) {
          stamp[static_cast<std::size_t>(s)] = mark;
          stack.push_back(s);
        }
    }
  }
  out.dedupe_transitions();
  out.flags = a.flags;
  out.flags.deterministic.reset();
  return out;
}

/// Epsilon elimination followed by trimming.
inline VarSetAutomaton normalize(const VarSetAutomaton& a) { return trim(eliminate_epsilon(a)); }

// ---------------------------------------------------------------------------
// Checks

struct SequentialityReport {
  bool sequential = false;
  /// Per input state: the variables open whenever the state is visited on an
  /// accepting run; nullopt for states on no accepting run.
  std::vector<std::optional<VarSet>> open_sets;
  bool annotation_unique = true;
};

/// Decides whether every accepting run is valid: explores (state, per-variable
/// status) configurations over the useful states and fails on any reachable
/// invalid marker action or on an accepting state with a variable left open.
inline SequentialityReport check_sequential(const VarSetAutomaton& a) {
  SequentialityReport report;
  report.open_sets.resize(static_cast<std::size_t>(a.num_states));
  auto useful = detail::useful_states(a);
  if (!useful[static_cast<std::size_t>(a.initial)]) {
    report.sequential = true;
    return report;
  }
  detail::VarIndex idx(detail::all_variables(a));
  std::vector<std::vector<const Transition*>> out(static_cast<std::size_t>(a.num_states));
  for (const auto& t : a.transitions)
    if (useful[static_cast<std::size_t>(t.from)] && useful[static_cast<std::size_t>(t.to)])
      out[static_cast<std::size_t>(t.from)].push_back(&t);

  using Config = std::tuple<StateId, std::uint64_t, std::uint64_t>;  // state, open, closed
  std::set<Config> seen{{a.initial, 0, 0}};
  std::vector<Config> stack{{a.initial, 0, 0}};
  while (!stack.empty()) {
    auto [q, open, closed] = stack.back();
    stack.pop_back();
    auto& slot = report.open_sets[static_cast<std::size_t>(q)];
    auto open_names = idx.names_of(open);
    if (!slot) slot = open_names;
    else if (*slot != open_names) report.annotation_unique = false;
    if (a.is_final(q) && open != 0) return report;
    for (const auto* t : out[static_cast<std::size_t>(q)]) {
      auto o = open, c = closed;
      if (t->label.kind == Symbol::Kind::Open) {
        auto b = idx.bit(t->label.variable);
        if ((o | c) & b) return report;
        o |= b;
      } else if (t->label.kind == Symbol::Kind::Close) {
        auto b = idx.bit(t->label.variable);
        if (!(o & b)) return report;
        o &= ~b;
        c |= b;
      }
      Config next{t->to, o, c};
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  report.sequential = true;
  return report;
}

inline bool is_sequential(const VarSetAutomaton& a) { return check_sequential(a).sequential; }

/// True iff every accepting run assigns every declared variable. Assumes a
/// sequential input.
inline bool check_functional(const VarSetAutomaton& a) {
  auto useful = detail::useful_states(a);
  if (!useful[static_cast<std::size_t>(a.initial)]) return true;
  detail::VarIndex idx(detail::all_variables(a));
  const auto want = idx.mask_of(a.variables);
  auto succ = a.out_edges();
  std::set<std::pair<StateId, std::uint64_t>> seen{{a.initial, 0}};
  std::vector<std::pair<StateId, std::uint64_t>> stack{{a.initial, 0}};
  while (!stack.empty()) {
    auto [q, mask] = stack.back();
    stack.pop_back();
    if (a.is_final(q) && mask != want) return false;
    for (const auto& [label, r] : succ[static_cast<std::size_t>(q)]) {
      if (!useful[static_cast<std::size_t>(r)]) continue;
      auto m = mask;
      if (label.kind == Symbol::Kind::Open) m |= idx.bit(label.variable);
      if (seen.insert({r, m}).second) stack.push_back({r, m});
    }
  }
  return true;
}

/// True iff every contiguous marker block of every accepted ref-word follows
/// the canonical marker order.
inline bool check_ordered(const VarSetAutomaton& a) {
  auto b = normalize(a);
  std::vector<std::vector<Marker>> incoming(static_cast<std::size_t>(b.num_states));
  for (const auto& t : b.transitions)
    if (t.label.is_marker()) incoming[static_cast<std::size_t>(t.to)].push_back(t.label.marker());
  for (const auto& t : b.transitions) {
    if (!t.label.is_marker()) continue;
    auto mk = t.label.marker();
    for (const auto& prev : incoming[static_cast<std::size_t>(t.from)])
      if (!(prev < mk)) return false;
  }
  return true;
}

/// No epsilon transitions and at most one successor per (state, label).
inline bool check_deterministic(const VarSetAutomaton& a) {
  if (a.has_epsilon()) return false;
  std::set<std::pair<StateId, Symbol>> seen;
  std::set<Transition> distinct(a.transitions.begin(), a.transitions.end());
  for (const auto& t : distinct)
    if (!seen.insert({t.from, t.label}).second) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Renaming

inline VarSetAutomaton rename_variables(const VarSetAutomaton& a, const std::map<std::string, std::string>& renaming) {
  auto rn = [&](const std::string& v) {
    auto it = renaming.find(v);
    return it == renaming.end() ? v : it->second;
  };
  VarSetAutomaton out = a;
  out.variables.clear();
  for (const auto& v : a.variables) out.variables.insert(rn(v));
  for (auto& t : out.transitions)
    if (t.label.is_marker()) t.label.variable = rn(t.label.variable);
  if (out.variables.size() != a.variables.size()) throw VariableClash("renaming merges variables");
  out.dedupe_transitions();
  out.flags.ordered.reset();
  return out;
}

/// Every variable x replaced by its dagger copy x†.
inline VarSetAutomaton rename_dagger(const VarSetAutomaton& a) {
  std::map<std::string, std::string> r;
  for (const auto& v : detail::all_variables(a)) r[v] = dagger(v);
  return rename_variables(a, r);
}

// ---------------------------------------------------------------------------
// Ordering and determinization

/// Rewrites a sequential VA so that every maximal marker block is read in the
/// canonical marker order. Letter transitions are duplicated onto a primed
/// copy of the states; every marker-only path q1 ~> q2 is replaced by a sorted
/// path from q1 to the primed copy of q2, so a block cannot be continued
/// without reading a letter first. Sorted paths leaving the same state share
/// their prefixes.
inline VarSetAutomaton order_markers(const VarSetAutomaton& input) {
  auto a = normalize(input);
  const StateId n = a.num_states;
  VarSetAutomaton out(a.alphabet, a.variables);
  out.num_states = 0;
  out.finals.clear();
  for (StateId q = 0; q < n; ++q) out.add_state(a.is_final(q));
  for (StateId q = 0; q < n; ++q) out.add_state(a.is_final(q));
  out.initial = a.initial;
  auto primed = [n](StateId q) { return q + n; };

  std::vector<std::vector<std::pair<Marker, StateId>>> marker_out(static_cast<std::size_t>(n));
  for (const auto& t : a.transitions) {
    if (t.label.is_letter()) {
      out.transitions.push_back({t.from, t.label, t.to});
      out.transitions.push_back({primed(t.from), t.label, t.to});
    } else if (t.label.is_marker()) {
      marker_out[static_cast<std::size_t>(t.from)].emplace_back(t.label.marker(), t.to);
    }
  }

  for (StateId q = 0; q < n; ++q) {
    if (marker_out[static_cast<std::size_t>(q)].empty()) continue;
    // Marker-only paths from q, identified by (end state, marker set).
    using Node = std::pair<StateId, std::set<Marker>>;
    std::set<Node> visited;
    std::vector<Node> stack{{q, {}}};
    std::set<std::pair<std::vector<Marker>, StateId>> blocks;
    while (!stack.empty()) {
      auto [r, ms] = stack.back();
      stack.pop_back();
      for (const auto& [mk, s] : marker_out[static_cast<std::size_t>(r)]) {
        if (ms.contains(mk)) continue;
        auto next = ms;
        next.insert(mk);
        blocks.insert({std::vector<Marker>(next.begin(), next.end()), s});
        Node node{s, std::move(next)};
        if (visited.insert(node).second) stack.push_back(std::move(node));
      }
    }
    std::map<std::vector<Marker>, StateId> trie{{{}, q}};
    for (const auto& [seq, target] : blocks) {
      StateId cur = q;
      std::vector<Marker> prefix;
      for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        prefix.push_back(seq[i]);
        auto it = trie.find(prefix);
        if (it == trie.end()) {
          auto fresh = out.add_state(false);
          out.transitions.push_back({cur, Symbol::of(seq[i]), fresh});
          it = trie.emplace(prefix, fresh).first;
        }
        cur = it->second;
      }
      out.transitions.push_back({cur, Symbol::of(seq.back()), primed(target)});
    }
  }
  out.dedupe_transitions();
  auto result = trim(out);
  result.flags = {input.flags.sequential, input.flags.functional, true, std::nullopt};
  return result;
}

namespace detail {

/// Dense symbol numbering local to one construction.
class SymbolTable {
 public:
  explicit SymbolTable(const std::set<Symbol>& symbols) : symbols_(symbols.begin(), symbols.end()) {}
  int id(const Symbol& s) const {
    auto it = std::lower_bound(symbols_.begin(), symbols_.end(), s);
    if (it == symbols_.end() || *it != s) return -1;
    return static_cast<int>(it - symbols_.begin());
  }
  const Symbol& symbol(int id) const { return symbols_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return symbols_.size(); }

 private:
  std::vector<Symbol> symbols_;
};

}  // namespace detail

/// Subset construction over Σ ∪ markers, completed with a sink so that every
/// (state, symbol) pair has exactly one successor. `extra_symbols` widens the
/// completion alphabet (for products with another automaton).
inline VarSetAutomaton determinize_refwords(const VarSetAutomaton& input, const std::set<Symbol>& extra_symbols = {}) {
  auto a = eliminate_epsilon(input);
  auto symbols = a.symbols();
  symbols.insert(extra_symbols.begin(), extra_symbols.end());
  symbols.erase(Symbol::eps());
  detail::SymbolTable table(symbols);

  std::vector<std::vector<std::pair<int, StateId>>> out_by_sym(static_cast<std::size_t>(a.num_states));
  for (const auto& t : a.transitions) out_by_sym[static_cast<std::size_t>(t.from)].emplace_back(table.id(t.label), t.to);

  VarSetAutomaton out(a.alphabet, a.variables);
  for (const auto& s : symbols) {
    if (s.is_letter()) out.alphabet.insert(s.letter);
    if (s.is_marker()) out.variables.insert(s.variable);
  }
  out.num_states = 0;
  out.finals.clear();

  StateIndex<std::vector<StateId>> index;
  std::deque<StateId> queue;
  auto intern = [&](std::vector<StateId> subset) {
    auto [id, inserted] = index.intern(subset);
    if (inserted) {
      bool fin = std::any_of(subset.begin(), subset.end(), [&](StateId q) { return a.is_final(q); });
      out.add_state(fin);
      queue.push_back(id);
    }
    return id;
  };
  out.initial = intern({a.initial});
  std::vector<std::vector<StateId>> buckets(table.size());
  while (!queue.empty()) {
    auto id = queue.front();
    queue.pop_front();
    auto subset = index.key(id);
    for (auto& b : buckets) b.clear();
    for (auto q : subset)
      for (const auto& [sym, r] : out_by_sym[static_cast<std::size_t>(q)]) buckets[static_cast<std::size_t>(sym)].push_back(r);
    for (std::size_t sym = 0; sym < table.size(); ++sym) {
      auto& b = buckets[sym];
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      auto target = intern(b);
      out.transitions.push_back({id, table.symbol(static_cast<int>(sym)), target});
    }
  }
  out.flags = {input.flags.sequential, input.flags.functional, input.flags.ordered, true};
  return out;
}

// ---------------------------------------------------------------------------
// Spanner algebra

/// Union of several automata: a fresh initial state copies the outgoing
/// transitions of every operand's initial state.
inline VarSetAutomaton union_all(const std::vector<VarSetAutomaton>& parts) {
  VarSetAutomaton out;
  out.num_states = 1;
  out.finals = {false};
  out.initial = 0;
  for (const auto& raw : parts) {
    auto p = eliminate_epsilon(raw);
    out.alphabet.insert(p.alphabet.begin(), p.alphabet.end());
    out.variables.insert(p.variables.begin(), p.variables.end());
    const StateId offset = out.num_states;
    for (StateId q = 0; q < p.num_states; ++q) out.add_state(p.is_final(q));
    if (p.is_final(p.initial)) out.finals[0] = true;
    for (const auto& t : p.transitions) {
      out.transitions.push_back({t.from + offset, t.label, t.to + offset});
      if (t.from == p.initial) out.transitions.push_back({0, t.label, t.to + offset});
    }
  }
  auto r = trim(out);
  r.flags = {};
  if (std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p.flags.sequential.value_or(false); }))
    r.flags.sequential = true;
  return r;
}

inline VarSetAutomaton union_(const VarSetAutomaton& a, const VarSetAutomaton& b) { return union_all({a, b}); }

/// Split-matches: a run of `a` on a prefix followed by a run of `b` on the
/// rest. Variable sets must be disjoint.
inline VarSetAutomaton concat(const VarSetAutomaton& a0, const VarSetAutomaton& b0) {
  if (!detail::set_intersection(a0.variables, b0.variables).empty())
    throw VariableClash("concatenation operands share variables");
  auto a = eliminate_epsilon(a0);
  auto b = eliminate_epsilon(b0);
  VarSetAutomaton out(detail::set_union(a.alphabet, b.alphabet), detail::set_union(a.variables, b.variables));
  out.num_states = 0;
  out.finals.clear();
  for (StateId q = 0; q < a.num_states; ++q) out.add_state(false);
  const StateId offset = out.num_states;
  for (StateId q = 0; q < b.num_states; ++q) out.add_state(b.is_final(q));
  out.initial = a.initial;
  for (const auto& t : a.transitions) out.transitions.push_back(t);
  for (const auto& t : b.transitions) out.transitions.push_back({t.from + offset, t.label, t.to + offset});
  for (StateId q = 0; q < a.num_states; ++q)
    if (a.is_final(q)) out.transitions.push_back({q, Symbol::eps(), b.initial + offset});
  auto r = normalize(out);
  r.flags = {};
  if (a0.flags.sequential.value_or(false) && b0.flags.sequential.value_or(false)) r.flags.sequential = true;
  return r;
}

/// Cartesian product of spanners with disjoint variables: letters are read
/// jointly, marker transitions interleave one side at a time, and within a
/// marker block the left operand's markers come first.
inline VarSetAutomaton cartesian_product(const VarSetAutomaton& a0, const VarSetAutomaton& b0) {
  if (!detail::set_intersection(detail::all_variables(a0), detail::all_variables(b0)).empty())
    throw VariableClash("cartesian product operands share variables");
  auto a = normalize(a0);
  auto b = normalize(b0);
  auto ao = a.out_edges();
  auto bo = b.out_edges();
  VarSetAutomaton out(detail::set_union(a.alphabet, b.alphabet), detail::set_union(a.variables, b.variables));
  out.num_states = 0;
  out.finals.clear();

  using Key = std::tuple<StateId, StateId, bool>;  // right side already moved in this block
  StateIndex<Key> index;
  std::vector<StateId> queue;
  auto intern = [&](const Key& k) {
    auto [id, inserted] = index.intern(k);
    if (inserted) {
      out.add_state(a.is_final(std::get<0>(k)) && b.is_final(std::get<1>(k)));
      queue.push_back(id);
    }
    return id;
  };
  out.initial = intern({a.initial, b.initial, false});
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    auto [qa, qb, right_moved] = index.key(id);
    for (const auto& [la, ra] : ao[static_cast<std::size_t>(qa)]) {
      if (la.is_letter()) {
        auto [lo, hi] = edges_on(bo[static_cast<std::size_t>(qb)], la);
        for (auto it = lo; it != hi; ++it) out.transitions.push_back({id, la, intern({ra, it->second, false})});
      } else if (!right_moved) {
        out.transitions.push_back({id, la, intern({ra, qb, false})});
      }
    }
    for (const auto& [lb, rb] : bo[static_cast<std::size_t>(qb)])
      if (lb.is_marker()) out.transitions.push_back({id, lb, intern({qa, rb, true})});
  }
  auto r = trim(out);
  r.flags = {};
  if (a0.flags.sequential.value_or(false) && b0.flags.sequential.value_or(false)) r.flags.sequential = true;
  return r;
}

struct DecomposedPart {
  VarSet domain;
  VarSetAutomaton automaton;
};

/// Splits a sequential VA into functional VAs, one per variable set X that
/// is the exact domain of some accepted mapping; the part for X defines the
/// mappings of the input whose domain is exactly X. Built from the product of
/// the input with the set of variables opened so far.
inline std::vector<DecomposedPart> decompose(const VarSetAutomaton& input) {
  auto a = normalize(input);
  std::vector<DecomposedPart> parts;
  if (a.transitions.empty() && !a.is_final(a.initial)) return parts;
  detail::VarIndex idx(detail::all_variables(a));
  auto succ = a.out_edges();

  using Config = std::pair<StateId, std::uint64_t>;
  StateIndex<Config> index;
  std::vector<Transition> edges;
  std::vector<StateId> queue;
  auto intern = [&](const Config& c) {
    auto [id, inserted] = index.intern(c);
    if (inserted) queue.push_back(id);
    return id;
  };
  intern({a.initial, 0});
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    auto [q, seen] = index.key(id);
    for (const auto& [label, r] : succ[static_cast<std::size_t>(q)]) {
      auto s = seen;
      if (label.kind == Symbol::Kind::Open) s |= idx.bit(label.variable);
      edges.push_back({id, label, intern({r, s})});
    }
  }
  std::set<std::uint64_t> domains;
  for (std::size_t id = 0; id < index.size(); ++id) {
    const auto& [q, seen] = index.key(static_cast<StateId>(id));
    if (a.is_final(q)) domains.insert(seen);
  }
  for (auto dom : domains) {
    VarSetAutomaton part(a.alphabet, idx.names_of(dom));
    part.num_states = static_cast<int>(index.size());
    part.finals.assign(index.size(), false);
    part.initial = 0;
    for (std::size_t id = 0; id < index.size(); ++id) {
      const auto& [q, seen] = index.key(static_cast<StateId>(id));
      part.finals[id] = a.is_final(q) && seen == dom;
    }
    for (const auto& e : edges) {
      if ((index.key(e.from).second & ~dom) || (index.key(e.to).second & ~dom)) continue;
      part.transitions.push_back(e);
    }
    auto trimmed = trim(part);
    trimmed.flags = {true, true, input.flags.ordered, std::nullopt};
    parts.push_back({idx.names_of(dom), std::move(trimmed)});
  }
  return parts;
}

namespace detail {

/// Product of two ordered functional VAs with domains `da`, `db`: letters and
/// shared-variable markers fire jointly, private markers move one side, and
/// the merged marker block must be strictly increasing in canonical order.
inline VarSetAutomaton join_ordered_parts(const VarSetAutomaton& a, const VarSet& da, const VarSetAutomaton& b,
                                          const VarSet& db) {
  auto all = set_union(da, db);
  std::vector<Marker> order;
  for (const auto& v : all) {
    order.push_back({MarkerKind::Open, v});
    order.push_back({MarkerKind::Close, v});
  }
  std::sort(order.begin(), order.end());
  auto rank = [&](const Marker& m) {
    return static_cast<int>(std::lower_bound(order.begin(), order.end(), m) - order.begin());
  };
  auto ao = a.out_edges();
  auto bo = b.out_edges();
  VarSetAutomaton out(set_union(a.alphabet, b.alphabet), all);
  out.num_states = 0;
  out.finals.clear();

  using Key = std::tuple<StateId, StateId, int>;  // last marker rank in the current block, -1 after a letter
  StateIndex<Key> index;
  std::vector<StateId> queue;
  auto intern = [&](const Key& k) {
    auto [id, inserted] = index.intern(k);
    if (inserted) {
      out.add_state(a.is_final(std::get<0>(k)) && b.is_final(std::get<1>(k)));
      queue.push_back(id);
    }
    return id;
  };
  out.initial = intern({a.initial, b.initial, -1});
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    auto [qa, qb, last] = index.key(id);
    for (const auto& [la, ra] : ao[static_cast<std::size_t>(qa)]) {
      if (la.is_letter()) {
        auto [lo, hi] = edges_on(bo[static_cast<std::size_t>(qb)], la);
        for (auto it = lo; it != hi; ++it) out.transitions.push_back({id, la, intern({ra, it->second, -1})});
        continue;
      }
      int r = rank(la.marker());
      if (r <= last) continue;
      if (db.contains(la.variable)) {
        auto [lo, hi] = edges_on(bo[static_cast<std::size_t>(qb)], la);
        for (auto it = lo; it != hi; ++it) out.transitions.push_back({id, la, intern({ra, it->second, r})});
      } else {
        out.transitions.push_back({id, la, intern({ra, qb, r})});
      }
    }
    for (const auto& [lb, rb] : bo[static_cast<std::size_t>(qb)]) {
      if (!lb.is_marker() || da.contains(lb.variable)) continue;
      int r = rank(lb.marker());
      if (r <= last) continue;
      out.transitions.push_back({id, lb, intern({qa, rb, r})});
    }
  }
  auto res = trim(out);
  res.flags = {true, true, true, std::nullopt};
  return res;
}

}  // namespace detail

/// Natural join built from parts: both operands are split into functional
/// parts, each part is ordered, and every pair of parts is combined by a
/// synchronized product. Quadratic in the number of parts.
inline VarSetAutomaton join_by_decomposition(const VarSetAutomaton& a, const VarSetAutomaton& b) {
  auto pa = decompose(a);
  auto pb = decompose(b);
  for (auto& p : pa) p.automaton = order_markers(p.automaton);
  for (auto& p : pb) p.automaton = order_markers(p.automaton);
  std::vector<VarSetAutomaton> pieces;
  for (const auto& x : pa)
    for (const auto& y : pb) pieces.push_back(detail::join_ordered_parts(x.automaton, x.domain, y.automaton, y.domain));
  VarSetAutomaton out = pieces.empty() ? empty_automaton() : union_all(pieces);
  out.alphabet = detail::set_union(a.alphabet, b.alphabet);
  out.variables = detail::set_union(a.variables, b.variables);
  out.flags.sequential = true;
  return out;
}

/// Natural join: unions of compatible mapping pairs. Both operands are
/// ordered and run in one synchronized product. Each shared variable is
/// tracked as unseen, joint (both sides assign it, markers fire together),
/// left-only or right-only (the other side may not assign it any more).
inline VarSetAutomaton join(const VarSetAutomaton& a0, const VarSetAutomaton& b0) {
  auto a = order_markers(a0);
  auto b = order_markers(b0);
  auto all = detail::set_union(detail::all_variables(a), detail::all_variables(b));
  auto shared_vars = detail::set_intersection(detail::all_variables(a), detail::all_variables(b));
  detail::VarIndex sidx(shared_vars);
  std::vector<Marker> order;
  for (const auto& v : all) {
    order.push_back({MarkerKind::Open, v});
    order.push_back({MarkerKind::Close, v});
  }
  std::sort(order.begin(), order.end());
  auto rank = [&](const Marker& m) {
    return static_cast<int>(std::lower_bound(order.begin(), order.end(), m) - order.begin());
  };
  auto ao = a.out_edges();
  auto bo = b.out_edges();
  VarSetAutomaton out(detail::set_union(a0.alphabet, b0.alphabet), detail::set_union(a0.variables, b0.variables));
  out.num_states = 0;
  out.finals.clear();

  // (qa, qb, last marker rank in the block, joint, left-only, right-only)
  using Key = std::tuple<StateId, StateId, int, std::uint64_t, std::uint64_t, std::uint64_t>;
  StateIndex<Key> index;
  std::vector<StateId> queue;
  auto intern = [&](const Key& k) {
    auto [id, inserted] = index.intern(k);
    if (inserted) {
      out.add_state(a.is_final(std::get<0>(k)) && b.is_final(std::get<1>(k)));
      queue.push_back(id);
    }
    return id;
  };
  out.initial = intern({a.initial, b.initial, -1, 0, 0, 0});
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    const auto [qa, qb, last, joint, left, right] = index.key(id);
    const auto& ea = ao[static_cast<std::size_t>(qa)];
    const auto& eb = bo[static_cast<std::size_t>(qb)];
    for (const auto& [la, ra] : ea) {
      if (la.is_letter()) {
        auto [lo, hi] = edges_on(eb, la);
        for (auto it = lo; it != hi; ++it)
          out.transitions.push_back({id, la, intern({ra, it->second, -1, joint, left, right})});
        continue;
      }
      int r = rank(la.marker());
      if (r <= last) continue;
      if (!shared_vars.contains(la.variable)) {
        out.transitions.push_back({id, la, intern({ra, qb, r, joint, left, right})});
        continue;
      }
      auto bit = sidx.bit(la.variable);
      if (la.kind == Symbol::Kind::Open) {
        if ((joint | left | right) & bit) continue;
        out.transitions.push_back({id, la, intern({ra, qb, r, joint, left | bit, right})});
        auto [lo, hi] = edges_on(eb, la);
        for (auto it = lo; it != hi; ++it)
          out.transitions.push_back({id, la, intern({ra, it->second, r, joint | bit, left, right})});
      } else if (left & bit) {
        out.transitions.push_back({id, la, intern({ra, qb, r, joint, left, right})});
      } else if (joint & bit) {
        auto [lo, hi] = edges_on(eb, la);
        for (auto it = lo; it != hi; ++it)
          out.transitions.push_back({id, la, intern({ra, it->second, r, joint, left, right})});
      }
    }
    for (const auto& [lb, rb] : eb) {
      if (!lb.is_marker()) continue;
      int r = rank(lb.marker());
      if (r <= last) continue;
      if (!shared_vars.contains(lb.variable)) {
        out.transitions.push_back({id, lb, intern({qa, rb, r, joint, left, right})});
        continue;
      }
      auto bit = sidx.bit(lb.variable);
      if (lb.kind == Symbol::Kind::Open) {
        if ((joint | left | right) & bit) continue;
        out.transitions.push_back({id, lb, intern({qa, rb, r, joint, left, right | bit})});
      } else if (right & bit) {
        out.transitions.push_back({id, lb, intern({qa, rb, r, joint, left, right})});
      }
    }
  }
  auto res = trim(out);
  res.flags = {true, std::nullopt, true, std::nullopt};
  return res;
}

/// Set intersection: parts with equal domains are joined pairwise.
inline VarSetAutomaton intersection(const VarSetAutomaton& a, const VarSetAutomaton& b) {
  auto pa = decompose(a);
  auto pb = decompose(b);
  std::vector<VarSetAutomaton> pieces;
  for (auto& x : pa) {
    for (auto& y : pb) {
      if (x.domain != y.domain) continue;
      pieces.push_back(detail::join_ordered_parts(order_markers(x.automaton), x.domain, order_markers(y.automaton),
                                                  y.domain));
    }
  }
  VarSetAutomaton out = pieces.empty() ? empty_automaton() : union_all(pieces);
  out.alphabet = detail::set_union(a.alphabet, b.alphabet);
  out.variables = detail::set_union(a.variables, b.variables);
  out.flags.sequential = true;
  return out;
}

/// Set difference: both operands are ordered, the right one is completed and
/// determinized, and the product keeps runs accepted on the left and
/// rejected on the right.
inline VarSetAutomaton difference(const VarSetAutomaton& a0, const VarSetAutomaton& b0) {
  auto a = order_markers(a0);
  auto b = order_markers(b0);
  auto det = determinize_refwords(b, a.symbols());
  detail::SymbolTable table(det.symbols());
  std::vector<std::vector<StateId>> delta(static_cast<std::size_t>(det.num_states),
                                          std::vector<StateId>(table.size(), -1));
  for (const auto& t : det.transitions)
    delta[static_cast<std::size_t>(t.from)][static_cast<std::size_t>(table.id(t.label))] = t.to;

  auto ao = a.out_edges();
  VarSetAutomaton out(detail::set_union(a0.alphabet, b0.alphabet), a0.variables);
  out.variables.insert(a.variables.begin(), a.variables.end());
  out.num_states = 0;
  out.finals.clear();
  StateIndex<std::pair<StateId, StateId>> index;
  std::vector<StateId> queue;
  auto intern = [&](StateId qa, StateId qd) {
    auto [id, inserted] = index.intern({qa, qd});
    if (inserted) {
      out.add_state(a.is_final(qa) && !det.is_final(qd));
      queue.push_back(id);
    }
    return id;
  };
  out.initial = intern(a.initial, det.initial);
  while (!queue.empty()) {
    auto id = queue.back();
    queue.pop_back();
    auto [qa, qd] = index.key(id);
    for (const auto& [label, ra] : ao[static_cast<std::size_t>(qa)]) {
      int sym = table.id(label);
      if (sym < 0) throw InvariantError("difference: symbol missing from completed automaton");
      auto rd = delta[static_cast<std::size_t>(qd)][static_cast<std::size_t>(sym)];
      out.transitions.push_back({id, label, intern(ra, rd)});
    }
  }
  auto r = trim(out);
  r.flags = {a0.flags.sequential, std::nullopt, true, std::nullopt};
  return r;
}

/// π_Y: markers of variables outside Y become epsilon and are eliminated.
inline VarSetAutomaton project(const VarSetAutomaton& a, const VarSet& keep) {
  for (const auto& v : keep)
    if (!a.variables.contains(v)) throw DomainError("projection variable " + v + " is not a variable of the automaton");
  VarSetAutomaton out = a;
  out.variables = keep;
  for (auto& t : out.transitions)
    if (t.label.is_marker() && !keep.contains(t.label.variable)) t.label = Symbol::eps();
  auto r = normalize(out);
  r.flags = {a.flags.sequential, std::nullopt, std::nullopt, std::nullopt};
  return r;
}

// ---------------------------------------------------------------------------
// Statistics

struct AutomatonStats {
  int states = 0;
  std::size_t transitions = 0;
  std::size_t finals = 0;
  std::size_t variables = 0;
  bool sequential = false;
  bool functional = false;
  bool ordered = false;
  bool deterministic = false;
};

inline AutomatonStats stats(const VarSetAutomaton& a) {
  AutomatonStats s;
  s.states = a.num_states;
  s.transitions = a.transitions.size();
  s.finals = a.num_finals();
  s.variables = a.variables.size();
  s.sequential = check_sequential(a).sequential;
  s.functional = s.sequential && check_functional(a);
  s.ordered = s.sequential && check_ordered(a);
  s.deterministic = check_deterministic(a);
  return s;
}

}  // namespace spanline

#endif  // SPANLINE_AUTOPS_HPP
