#ifndef SPANLINE_AUTOMATON_HPP
#define SPANLINE_AUTOMATON_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spancore.hpp"

namespace spanline {

using StateId = int;

struct Transition {
  StateId from;
  Symbol label;
  StateId to;

  friend auto operator<=>(const Transition&, const Transition&) = default;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Properties a construction guarantees for its output. Unset means unknown.
struct AutomatonFlags {
  std::optional<bool> sequential;
  std::optional<bool> functional;
  std::optional<bool> ordered;
  std::optional<bool> deterministic;
};

/// A variable-set automaton over letters and variable markers, optionally
/// with epsilon transitions. States are the dense range [0, num_states).
struct VarSetAutomaton {
  Alphabet alphabet;
  VarSet variables;
  int num_states = 1;
  StateId initial = 0;
  std::vector<bool> finals = std::vector<bool>(1, false);
  std::vector<Transition> transitions;
  AutomatonFlags flags;

  VarSetAutomaton() = default;
  VarSetAutomaton(Alphabet sigma, VarSet vars) : alphabet(std::move(sigma)), variables(std::move(vars)) {}

  StateId add_state(bool is_final = false) {
    finals.push_back(is_final);
    return num_states++;
  }

  void add_transition(StateId from, Symbol label, StateId to) {
    if (from < 0 || from >= num_states || to < 0 || to >= num_states)
      throw InvariantError("transition endpoint out of range");
    if (label.is_letter()) alphabet.insert(label.letter);
    if (label.is_marker()) variables.insert(label.variable);
    transitions.push_back({from, std::move(label), to});
  }

  bool is_final(StateId q) const { return finals[static_cast<std::size_t>(q)]; }

  std::size_t num_finals() const { return static_cast<std::size_t>(std::count(finals.begin(), finals.end(), true)); }

  bool has_epsilon() const {
    return std::any_of(transitions.begin(), transitions.end(), [](const Transition& t) { return t.label.is_eps(); });
  }

  /// Variables whose markers occur on some transition.
  VarSet marker_variables() const {
    VarSet out;
    for (const auto& t : transitions)
      if (t.label.is_marker()) out.insert(t.label.variable);
    return out;
  }

  /// All letters of the alphabet and all markers of the declared variables.
  std::set<Symbol> symbols() const {
    std::set<Symbol> out;
    for (char c : alphabet) out.insert(Symbol::letter_of(c));
    for (const auto& v : variables) {
      out.insert(Symbol::open(v));
      out.insert(Symbol::close(v));
    }
    return out;
  }

  /// Outgoing transition lists, each sorted by label.
  std::vector<std::vector<std::pair<Symbol, StateId>>> out_edges() const {
    std::vector<std::vector<std::pair<Symbol, StateId>>> out(static_cast<std::size_t>(num_states));
    for (const auto& t : transitions) out[static_cast<std::size_t>(t.from)].emplace_back(t.label, t.to);
    for (auto& v : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
  }

  std::vector<std::vector<std::pair<Symbol, StateId>>> in_edges() const {
    std::vector<std::vector<std::pair<Symbol, StateId>>> in(static_cast<std::size_t>(num_states));
    for (const auto& t : transitions) in[static_cast<std::size_t>(t.to)].emplace_back(t.label, t.from);
    return in;
  }

  void dedupe_transitions() {
    std::sort(transitions.begin(), transitions.end());
    transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
  }
};

/// The canonical empty spanner: one non-final initial state, no transitions.
inline VarSetAutomaton empty_automaton(Alphabet alphabet = {}, VarSet variables = {}) {
  VarSetAutomaton a(std::move(alphabet), std::move(variables));
  a.flags = {true, std::nullopt, true, std::nullopt};
  return a;
}

/// Sorted outgoing edges on `label` from the result of out_edges().
inline auto edges_on(const std::vector<std::pair<Symbol, StateId>>& sorted, const Symbol& label) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), std::pair<Symbol, StateId>{label, INT32_MIN});
  auto hi = lo;
  while (hi != sorted.end() && hi->first == label) ++hi;
  return std::make_pair(lo, hi);
}

/// Dense renumbering helper for product-style constructions: maps keys to
/// fresh state ids in discovery order.
template <typename Key>
class StateIndex {
 public:
  /// Returns (id, inserted).
  std::pair<StateId, bool> intern(const Key& k) {
    auto [it, inserted] = ids_.try_emplace(k, static_cast<StateId>(keys_.size()));
    if (inserted) keys_.push_back(k);
    return {it->second, inserted};
  }
  const Key& key(StateId id) const { return keys_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::map<Key, StateId> ids_;
  std::vector<Key> keys_;
};

/// Automaton accepting exactly the valid ref-words with erasure `d` whose
/// markers encode `m`. At each position the due markers may appear in any
/// order, except that a variable's opening marker precedes its closing one.
/// The result is deterministic over Σ ∪ markers.
inline VarSetAutomaton refwords_of(const Document& d, const Mapping& m) {
  if (!m.fits(d)) throw std::out_of_range("mapping " + to_string(m) + " does not fit the document");
  VarSetAutomaton a(d.alphabet(), m.domain());
  a.num_states = 0;
  a.finals.clear();

  std::vector<std::vector<Marker>> due(d.size() + 1);
  for (const auto& [v, s] : m) {
    due[s.begin].push_back({MarkerKind::Open, v});
    due[s.end].push_back({MarkerKind::Close, v});
  }
  // One state per (position, subset of due markers already read).
  std::vector<StateId> first_state(d.size() + 1);
  for (std::size_t pos = 0; pos <= d.size(); ++pos) {
    auto& ms = due[pos];
    std::sort(ms.begin(), ms.end());
    if (ms.size() > 20) throw DomainError("too many markers at one position for ref-word expansion");
    first_state[pos] = a.num_states;
    const std::uint32_t count = 1u << ms.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) a.add_state(pos == d.size() && mask == count - 1);
  }
  for (std::size_t pos = 0; pos <= d.size(); ++pos) {
    const auto& ms = due[pos];
    const std::uint32_t count = 1u << ms.size();
    for (std::uint32_t mask = 0; mask < count; ++mask) {
      for (std::size_t k = 0; k < ms.size(); ++k) {
        if (mask & (1u << k)) continue;
        if (ms[k].kind == MarkerKind::Close) {
          // The matching open, if due here, must already be read.
          auto open_it = std::find(ms.begin(), ms.end(), Marker{MarkerKind::Open, ms[k].variable});
          if (open_it != ms.end() && !(mask & (1u << (open_it - ms.begin())))) continue;
        }
        a.add_transition(first_state[pos] + static_cast<StateId>(mask), Symbol::of(ms[k]),
                         first_state[pos] + static_cast<StateId>(mask | (1u << k)));
      }
    }
    if (pos < d.size()) {
      a.add_transition(first_state[pos] + static_cast<StateId>(count - 1), Symbol::letter_of(d[pos]),
                       first_state[pos + 1]);
    }
  }
  a.initial = first_state[0];
  a.flags = {true, true, std::nullopt, true};
  return a;
}

}  // namespace spanline

#endif  // SPANLINE_AUTOMATON_HPP
