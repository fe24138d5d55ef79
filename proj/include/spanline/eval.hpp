#ifndef SPANLINE_EVAL_HPP
#define SPANLINE_EVAL_HPP

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "autops.hpp"

namespace spanline {

using BoolAssignment = std::map<std::string, bool>;
using BoolSet = std::set<BoolAssignment>;

namespace detail {

/// coreach[pos][q]: an accepting configuration is reachable from (q, pos).
inline std::vector<std::vector<bool>> coreachable(const VarSetAutomaton& a, const Document& d,
                                                  const std::vector<std::vector<std::pair<Symbol, StateId>>>& out) {
  const auto n = static_cast<std::size_t>(a.num_states);
  std::vector<std::vector<StateId>> marker_pred(n);
  for (const auto& t : a.transitions)
    if (t.label.is_marker()) marker_pred[static_cast<std::size_t>(t.to)].push_back(t.from);
  std::vector<std::vector<bool>> co(d.size() + 1, std::vector<bool>(n, false));
  for (std::size_t p = d.size() + 1; p-- > 0;) {
    std::vector<StateId> stack;
    for (StateId q = 0; q < a.num_states; ++q) {
      bool seed = false;
      if (p == d.size()) {
        seed = a.is_final(q);
      } else {
        auto [lo, hi] = edges_on(out[static_cast<std::size_t>(q)], Symbol::letter_of(d[p]));
        for (auto it = lo; it != hi && !seed; ++it) seed = co[p + 1][static_cast<std::size_t>(it->second)];
      }
      if (seed) {
        co[p][static_cast<std::size_t>(q)] = true;
        stack.push_back(q);
      }
    }
    while (!stack.empty()) {
      auto q = stack.back();
      stack.pop_back();
      for (auto r : marker_pred[static_cast<std::size_t>(q)]) {
        if (!co[p][static_cast<std::size_t>(r)]) {
          co[p][static_cast<std::size_t>(r)] = true;
          stack.push_back(r);
        }
      }
    }
  }
  return co;
}

}  // namespace detail

/// All mappings P_A(d). Runs that are not valid are ignored, so the result is
/// exact for sequential inputs.
inline MappingSet evaluate(const VarSetAutomaton& input, const Document& d) {
  const auto a = eliminate_epsilon(input);
  const auto out = a.out_edges();
  const auto co = detail::coreachable(a, d, out);
  MappingSet result;
  if (!co[0][static_cast<std::size_t>(a.initial)]) return result;

  const std::vector<std::string> vars(a.variables.begin(), a.variables.end());
  detail::VarIndex idx(detail::all_variables(a));
  const std::size_t budget = 2 * idx.size();
  // Per variable: begin and end position, -1 while unset.
  using Partial = std::vector<long>;
  using Config = std::tuple<StateId, std::size_t, Partial, std::size_t>;
  std::set<std::tuple<StateId, std::size_t, Partial>> visited;
  std::vector<Config> stack;
  stack.emplace_back(a.initial, 0, Partial(2 * idx.size(), -1), 0);
  std::vector<std::string> names(idx.size());
  for (const auto& v : detail::all_variables(a)) names[static_cast<std::size_t>(idx.index(v))] = v;

  while (!stack.empty()) {
    auto [q, pos, partial, markers] = std::move(stack.back());
    stack.pop_back();
    if (!visited.emplace(q, pos, partial).second) continue;
    if (pos == d.size() && a.is_final(q)) {
      bool complete = true;
      Mapping m;
      for (std::size_t i = 0; i < idx.size(); ++i) {
        auto b = partial[2 * i], e = partial[2 * i + 1];
        if (b >= 0 && e < 0) complete = false;
        if (b >= 0 && e >= 0) m.assign(names[i], Span(static_cast<std::size_t>(b), static_cast<std::size_t>(e)));
      }
      if (complete) result.insert(std::move(m));
    }
    for (const auto& [label, r] : out[static_cast<std::size_t>(q)]) {
      if (label.is_letter()) {
        if (pos < d.size() && label.letter == d[pos] && co[pos + 1][static_cast<std::size_t>(r)])
          stack.emplace_back(r, pos + 1, partial, 0);
        continue;
      }
      if (!co[pos][static_cast<std::size_t>(r)]) continue;
      if (markers + 1 > budget) throw InvariantError("marker budget exceeded at position " + std::to_string(pos));
      auto i = static_cast<std::size_t>(idx.index(label.variable));
      Partial next = partial;
      if (label.kind == Symbol::Kind::Open) {
        if (next[2 * i] >= 0) continue;
        next[2 * i] = static_cast<long>(pos);
      } else {
        if (next[2 * i] < 0 || next[2 * i + 1] >= 0) continue;
        next[2 * i + 1] = static_cast<long>(pos);
      }
      stack.emplace_back(r, pos, std::move(next), markers + 1);
    }
  }
  return result;
}

/// m ∈ P_A(d), decided on the product of A with the ref-words of (d, m).
inline bool contains(const VarSetAutomaton& input, const Document& d, const Mapping& m) {
  if (!m.fits(d)) return false;
  for (const auto& [v, _] : m)
    if (!input.variables.contains(v)) return false;
  const auto a = eliminate_epsilon(input);
  const auto r = refwords_of(d, m);
  const auto ao = a.out_edges();
  const auto ro = r.out_edges();
  std::set<std::pair<StateId, StateId>> seen{{a.initial, r.initial}};
  std::vector<std::pair<StateId, StateId>> stack{{a.initial, r.initial}};
  while (!stack.empty()) {
    auto [qa, qr] = stack.back();
    stack.pop_back();
    if (a.is_final(qa) && r.is_final(qr)) return true;
    for (const auto& [label, tr] : ro[static_cast<std::size_t>(qr)]) {
      auto [lo, hi] = edges_on(ao[static_cast<std::size_t>(qa)], label);
      for (auto it = lo; it != hi; ++it)
        if (seen.insert({it->second, tr}).second) stack.push_back({it->second, tr});
    }
  }
  return false;
}

/// The indicator of dom(m) over the variables of A, for each m ∈ P_A(d).
inline BoolAssignment bool_of(const Mapping& m, const VarSet& vars) {
  BoolAssignment b;
  for (const auto& v : vars) b[v] = m.assigns(v);
  return b;
}

inline BoolSet bool_abstraction(const VarSetAutomaton& a, const Document& d) {
  BoolSet out;
  for (const auto& m : evaluate(a, d)) out.insert(bool_of(m, a.variables));
  return out;
}

inline std::string to_string(const BoolAssignment& b) {
  std::string out;
  for (const auto& [v, val] : b) {
    if (!out.empty()) out += " ";
    out += v + "=" + (val ? "1" : "0");
  }
  return "{" + out + "}";
}

}  // namespace spanline

#endif  // SPANLINE_EVAL_HPP
