#ifndef SPANLINE_NROBP_HPP
#define SPANLINE_NROBP_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eval.hpp"

namespace spanline {

struct Literal {
  std::string variable;
  bool positive = true;

  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

inline std::string to_string(const Literal& l) { return (l.positive ? "" : "!") + l.variable; }

struct NrobpEdge {
  int from = 0;
  int to = 0;
  std::optional<Literal> label;
};

/// A source-to-sink DAG whose edges optionally carry literals.
struct Nrobp {
  int num_nodes = 2;
  int source = 0;
  int sink = 1;
  std::vector<NrobpEdge> edges;
  VarSet variables;

  int add_node() { return num_nodes++; }
};

/// Nodes in topological order, or nullopt if the graph has a cycle.
inline std::optional<std::vector<int>> topological_order(const Nrobp& p) {
  std::vector<int> indeg(static_cast<std::size_t>(p.num_nodes), 0);
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(p.num_nodes));
  for (const auto& e : p.edges) {
    succ[static_cast<std::size_t>(e.from)].push_back(e.to);
    ++indeg[static_cast<std::size_t>(e.to)];
  }
  std::vector<int> order, ready;
  for (int u = 0; u < p.num_nodes; ++u)
    if (indeg[static_cast<std::size_t>(u)] == 0) ready.push_back(u);
  while (!ready.empty()) {
    int u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (int v : succ[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  if (order.size() != static_cast<std::size_t>(p.num_nodes)) return std::nullopt;
  return order;
}

inline bool is_acyclic(const Nrobp& p) { return topological_order(p).has_value(); }

namespace detail {

/// Nodes on some source-to-sink path.
inline std::vector<bool> nrobp_useful(const Nrobp& p) {
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(p.num_nodes)), pred(succ.size());
  for (const auto& e : p.edges) {
    succ[static_cast<std::size_t>(e.from)].push_back(e.to);
    pred[static_cast<std::size_t>(e.to)].push_back(e.from);
  }
  auto fwd = reachable_from(succ, {p.source});
  auto bwd = reachable_from(pred, {p.sink});
  std::vector<bool> out(succ.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd[i] && bwd[i];
  return out;
}

}  // namespace detail

/// True iff no source-to-sink path carries two literals of one variable.
/// Each node gets the variables labelling some path from the source; an edge
/// whose variable is already in its tail's set closes a repeating path.
inline bool check_read_once(const Nrobp& p) {
  auto order = topological_order(p);
  if (!order) return false;
  auto useful = detail::nrobp_useful(p);
  std::vector<VarSet> seen(static_cast<std::size_t>(p.num_nodes));
  std::vector<std::vector<const NrobpEdge*>> out(static_cast<std::size_t>(p.num_nodes));
  for (const auto& e : p.edges)
    if (useful[static_cast<std::size_t>(e.from)] && useful[static_cast<std::size_t>(e.to)])
      out[static_cast<std::size_t>(e.from)].push_back(&e);
  for (int u : *order) {
    for (const auto* e : out[static_cast<std::size_t>(u)]) {
      auto& target = seen[static_cast<std::size_t>(e->to)];
      const auto& here = seen[static_cast<std::size_t>(u)];
      target.insert(here.begin(), here.end());
      if (e->label) {
        if (here.contains(e->label->variable)) return false;
        target.insert(e->label->variable);
      }
    }
  }
  return true;
}

namespace detail {

/// Per node: the reachable (mentioned, value) bitmask pairs.
inline std::vector<std::set<std::pair<std::uint64_t, std::uint64_t>>> nrobp_partials(const Nrobp& p,
                                                                                   const VarIndex& idx) {
  auto order = topological_order(p);
  if (!order) throw InvariantError("branching program has a cycle");
  std::vector<std::vector<const NrobpEdge*>> out(static_cast<std::size_t>(p.num_nodes));
  for (const auto& e : p.edges) out[static_cast<std::size_t>(e.from)].push_back(&e);
  std::vector<std::set<std::pair<std::uint64_t, std::uint64_t>>> at(static_cast<std::size_t>(p.num_nodes));
  at[static_cast<std::size_t>(p.source)].insert({0, 0});
  for (int u : *order) {
    for (const auto& [mentioned, values] : at[static_cast<std::size_t>(u)]) {
      for (const auto* e : out[static_cast<std::size_t>(u)]) {
        auto m = mentioned, v = values;
        if (e->label) {
          auto b = idx.bit(e->label->variable);
          bool want = e->label->positive;
          if (m & b) {
            if (((v & b) != 0) != want) continue;
          } else {
            m |= b;
            if (want) v |= b;
          }
        }
        at[static_cast<std::size_t>(e->to)].insert({m, v});
      }
    }
  }
  return at;
}

}  // namespace detail

/// Assignments over p.variables admitting a satisfied source-to-sink path.
/// Variables a path does not mention are free.
inline BoolSet models(const Nrobp& p) {
  detail::VarIndex idx(p.variables);
  auto at = detail::nrobp_partials(p, idx);
  std::set<std::uint64_t> full;
  for (const auto& [mentioned, values] : at[static_cast<std::size_t>(p.sink)]) {
    auto free = idx.all() & ~mentioned;
    // Enumerate all subsets of the free variables.
    for (std::uint64_t sub = free;; sub = (sub - 1) & free) {
      full.insert(values | sub);
      if (sub == 0) break;
    }
  }
  BoolSet out;
  for (auto v : full) {
    BoolAssignment b;
    for (const auto& name : p.variables) b[name] = (v & idx.bit(name)) != 0;
    out.insert(std::move(b));
  }
  return out;
}

inline std::size_t count_models(const Nrobp& p) { return models(p).size(); }

/// Erases the literals of variables outside `keep`.
inline Nrobp project(const Nrobp& p, const VarSet& keep) {
  Nrobp out = p;
  out.variables = keep;
  for (auto& e : out.edges)
    if (e.label && !keep.contains(e.label->variable)) e.label.reset();
  return out;
}

inline std::string to_dot(const Nrobp& p) {
  std::ostringstream os;
  os << "digraph nrobp {\n";
  os << "  n" << p.source << " [shape=box,label=\"s\"];\n";
  os << "  n" << p.sink << " [shape=box,label=\"t\"];\n";
  for (const auto& e : p.edges) {
    os << "  n" << e.from << " -> n" << e.to;
    if (e.label) os << " [label=\"" << to_string(*e.label) << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

namespace detail {

/// Merges the states of every strongly connected component of the epsilon
/// graph.
inline VarSetAutomaton contract_epsilon_cycles(const VarSetAutomaton& a) {
  const auto n = static_cast<std::size_t>(a.num_states);
  std::vector<std::vector<StateId>> eps(n);
  for (const auto& t : a.transitions)
    if (t.label.is_eps()) eps[static_cast<std::size_t>(t.from)].push_back(t.to);
  std::vector<std::vector<bool>> reach(n);
  for (std::size_t q = 0; q < n; ++q) reach[q] = reachable_from(eps, {static_cast<StateId>(q)});
  std::vector<StateId> rep(n);
  for (std::size_t q = 0; q < n; ++q) {
    rep[q] = static_cast<StateId>(q);
    for (std::size_t r = 0; r < q; ++r) {
      if (reach[q][r] && reach[r][q]) {
        rep[q] = rep[r];
        break;
      }
    }
  }
  std::vector<StateId> renum(n, -1);
  VarSetAutomaton out(a.alphabet, a.variables);
  out.num_states = 0;
  out.finals.clear();
  for (std::size_t q = 0; q < n; ++q)
    if (rep[q] == static_cast<StateId>(q)) renum[q] = out.add_state(false);
  for (std::size_t q = 0; q < n; ++q) {
    auto r = renum[static_cast<std::size_t>(rep[q])];
    if (a.is_final(static_cast<StateId>(q))) out.finals[static_cast<std::size_t>(r)] = true;
  }
  out.initial = renum[static_cast<std::size_t>(rep[static_cast<std::size_t>(a.initial)])];
  for (const auto& t : a.transitions) {
    auto f = renum[static_cast<std::size_t>(rep[static_cast<std::size_t>(t.from)])];
    auto g = renum[static_cast<std::size_t>(rep[static_cast<std::size_t>(t.to)])];
    if (t.label.is_eps() && f == g) continue;
    out.transitions.push_back({f, t.label, g});
  }
  out.dedupe_transitions();
  return out;
}

}  // namespace detail

/// The branching program of Bool(P_A, d): the product of A with d, where an
/// opening marker of x becomes the literal x and every other move is
/// unlabelled, completed so that every source-to-sink path mentions each
/// variable exactly once.
inline Nrobp to_nrobp(const VarSetAutomaton& input, const Document& d) {
  Nrobp p;
  p.variables = detail::all_variables(input);
  detail::VarIndex idx(p.variables);

  auto a = detail::contract_epsilon_cycles(input);
  const StateId final_state = a.add_state(true);
  for (StateId q = 0; q < final_state; ++q) {
    if (a.is_final(q)) {
      a.finals[static_cast<std::size_t>(q)] = false;
      a.transitions.push_back({q, Symbol::eps(), final_state});
    }
  }
  auto useful = detail::useful_states(a);
  if (!useful[static_cast<std::size_t>(a.initial)]) return p;
  a = trim(a);
  StateId fin = -1;
  for (StateId q = 0; q < a.num_states; ++q)
    if (a.is_final(q)) fin = q;

  // Product with the document.
  struct RawEdge {
    StateId from, to;
    std::optional<Literal> label;
  };
  StateIndex<std::pair<StateId, std::size_t>> index;
  std::vector<RawEdge> raw;
  std::vector<StateId> stack;
  auto intern = [&](StateId q, std::size_t pos) {
    auto [id, inserted] = index.intern({q, pos});
    if (inserted) stack.push_back(id);
    return id;
  };
  auto out_edges = a.out_edges();
  intern(a.initial, 0);
  while (!stack.empty()) {
    auto id = stack.back();
    stack.pop_back();
    auto [q, pos] = index.key(id);
    for (const auto& [label, r] : out_edges[static_cast<std::size_t>(q)]) {
      if (label.is_letter()) {
        if (pos < d.size() && label.letter == d[pos]) raw.push_back({id, intern(r, pos + 1), std::nullopt});
      } else if (label.kind == Symbol::Kind::Open) {
        raw.push_back({id, intern(r, pos), Literal{label.variable, true}});
      } else {
        raw.push_back({id, intern(r, pos), std::nullopt});
      }
    }
  }
  auto [sink_id, sink_new] = index.intern({fin, d.size()});
  if (sink_new) return p;

  // Prune to source-to-sink nodes.
  Nrobp g;
  g.num_nodes = static_cast<int>(index.size());
  g.source = 0;
  g.sink = sink_id;
  for (const auto& e : raw) g.edges.push_back({e.from, e.to, e.label});
  auto keep = detail::nrobp_useful(g);
  std::vector<int> renum(index.size(), -1);
  int count = 0;
  for (std::size_t u = 0; u < index.size(); ++u)
    if (keep[u]) renum[u] = count++;
  Nrobp pruned;
  pruned.num_nodes = count;
  pruned.source = renum[static_cast<std::size_t>(g.source)];
  pruned.sink = renum[static_cast<std::size_t>(g.sink)];
  pruned.variables = p.variables;
  for (const auto& e : g.edges) {
    auto f = renum[static_cast<std::size_t>(e.from)], t = renum[static_cast<std::size_t>(e.to)];
    if (f >= 0 && t >= 0) pruned.edges.push_back({f, t, e.label});
  }
  auto order = topological_order(pruned);
  if (!order) throw InvariantError("product of automaton and document is cyclic");

  // V(u): variables labelling some path from the source to u.
  std::vector<std::uint64_t> seen(static_cast<std::size_t>(pruned.num_nodes), 0);
  std::vector<std::vector<const NrobpEdge*>> outgoing(static_cast<std::size_t>(pruned.num_nodes));
  for (const auto& e : pruned.edges) outgoing[static_cast<std::size_t>(e.from)].push_back(&e);
  for (int u : *order) {
    for (const auto* e : outgoing[static_cast<std::size_t>(u)]) {
      auto s = seen[static_cast<std::size_t>(u)];
      if (e->label) s |= idx.bit(e->label->variable);
      seen[static_cast<std::size_t>(e->to)] |= s;
    }
  }

  // Completion: an edge u -> v gets a chain of negative literals for the
  // variables of V(v) it misses. Chains are shared per (v, missing set).
  Nrobp out = pruned;
  out.edges.clear();
  std::map<std::pair<int, std::uint64_t>, int> chain_head;
  auto chain_to = [&](int v, std::uint64_t missing) {
    if (missing == 0) return v;
    auto it = chain_head.find({v, missing});
    if (it != chain_head.end()) return it->second;
    auto names = idx.names_of(missing);
    int head = out.add_node();
    int cur = head;
    std::size_t i = 0;
    for (const auto& y : names) {
      int next = ++i == names.size() ? v : out.add_node();
      out.edges.push_back({cur, next, Literal{y, false}});
      cur = next;
    }
    chain_head.emplace(std::make_pair(v, missing), head);
    return head;
  };
  for (const auto& e : pruned.edges) {
    auto have = seen[static_cast<std::size_t>(e.from)];
    if (e.label) have |= idx.bit(e.label->variable);
    auto missing = seen[static_cast<std::size_t>(e.to)] & ~have;
    out.edges.push_back({e.from, chain_to(e.to, missing), e.label});
  }
  auto never = idx.all() & ~seen[static_cast<std::size_t>(out.sink)];
  if (never) {
    int new_sink = out.add_node();
    int head = chain_to(new_sink, never);
    out.edges.push_back({out.sink, head, std::nullopt});
    out.sink = new_sink;
  }
  return out;
}

}  // namespace spanline

#endif  // SPANLINE_NROBP_HPP
