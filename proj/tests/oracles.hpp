// Brute-force reference implementations used by the tests and the acceptance
// runner. None of these go through the automaton constructions.
#ifndef SPANLINE_TESTS_ORACLES_HPP
#define SPANLINE_TESTS_ORACLES_HPP

#include <algorithm>
#include <bit>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spanline/spanline.hpp"

namespace oracle {

using namespace spanline;

// ---------------------------------------------------------------------------
// Regex matching by recursion on the formula

using Partial = std::set<std::pair<std::size_t, Mapping>>;

inline bool disjoint_domains(const Mapping& a, const Mapping& b) {
  for (const auto& [v, _] : a)
    if (b.assigns(v)) return false;
  return true;
}

inline Partial match_from(const Regex& e, const Document& d, std::size_t i);

inline Partial extend(const Partial& prefix, const Regex& e, const Document& d) {
  Partial out;
  for (const auto& [k, m1] : prefix)
    for (const auto& [j, m2] : match_from(e, d, k))
      if (disjoint_domains(m1, m2)) out.emplace(j, merge(m1, m2));
  return out;
}

/// All (j, m) such that e matches d[i, j) while assigning m.
inline Partial match_from(const Regex& e, const Document& d, std::size_t i) {
  using K = RegexNode::Kind;
  Partial out;
  switch (e->kind) {
    case K::Empty:
      break;
    case K::Epsilon:
      out.emplace(i, Mapping{});
      break;
    case K::Letter:
      if (i < d.size() && d[i] == e->letter) out.emplace(i + 1, Mapping{});
      break;
    case K::Concat:
      out = extend(match_from(e->left, d, i), e->right, d);
      break;
    case K::Alt: {
      out = match_from(e->left, d, i);
      auto r = match_from(e->right, d, i);
      out.insert(r.begin(), r.end());
      break;
    }
    case K::Star: {
      out.emplace(i, Mapping{});
      Partial frontier = out;
      while (!frontier.empty()) {
        Partial next;
        for (const auto& item : extend(frontier, e->left, d))
          if (out.insert(item).second) next.insert(item);
        frontier = std::move(next);
      }
      break;
    }
    case K::Capture:
      for (const auto& [j, m] : match_from(e->left, d, i)) {
        if (m.assigns(e->variable)) continue;
        Mapping mm = m;
        mm.assign(e->variable, Span(i, j));
        out.emplace(j, mm);
      }
      break;
  }
  return out;
}

inline MappingSet regex_matches(const Regex& e, const Document& d) {
  MappingSet out;
  for (const auto& [j, m] : match_from(e, d, 0))
    if (j == d.size()) out.insert(m);
  return out;
}

// ---------------------------------------------------------------------------
// VA evaluation by brute force: try every mapping and every ordering of the
// markers due at each position.

inline std::set<StateId> eps_closure(const VarSetAutomaton& a, std::set<StateId> s) {
  std::vector<StateId> stack(s.begin(), s.end());
  while (!stack.empty()) {
    auto q = stack.back();
    stack.pop_back();
    for (const auto& t : a.transitions)
      if (t.from == q && t.label.is_eps() && s.insert(t.to).second) stack.push_back(t.to);
  }
  return s;
}

inline std::set<StateId> step(const VarSetAutomaton& a, const std::set<StateId>& s, const Symbol& sym) {
  std::set<StateId> out;
  for (const auto& t : a.transitions)
    if (s.contains(t.from) && t.label == sym) out.insert(t.to);
  return eps_closure(a, out);
}

inline void marker_orders(const std::vector<Marker>& due, std::vector<Marker>& cur, std::vector<bool>& used,
                          std::vector<std::vector<Marker>>& out) {
  if (cur.size() == due.size()) {
    out.push_back(cur);
    return;
  }
  for (std::size_t i = 0; i < due.size(); ++i) {
    if (used[i]) continue;
    // a close may only follow the open of the same variable
    if (due[i].kind == MarkerKind::Close) {
      bool open_pending = false;
      for (std::size_t k = 0; k < due.size(); ++k)
        if (!used[k] && due[k].kind == MarkerKind::Open && due[k].variable == due[i].variable) open_pending = true;
      if (open_pending) continue;
    }
    used[i] = true;
    cur.push_back(due[i]);
    marker_orders(due, cur, used, out);
    cur.pop_back();
    used[i] = false;
  }
}

inline bool accepts_mapping(const VarSetAutomaton& a, const Document& d, const Mapping& m) {
  std::set<StateId> cur = eps_closure(a, {a.initial});
  for (std::size_t pos = 0; pos <= d.size() && !cur.empty(); ++pos) {
    std::vector<Marker> due;
    for (const auto& [v, s] : m) {
      if (s.begin == pos) due.push_back({MarkerKind::Open, v});
      if (s.end == pos) due.push_back({MarkerKind::Close, v});
    }
    std::vector<std::vector<Marker>> orders;
    std::vector<Marker> tmp;
    std::vector<bool> used(due.size(), false);
    marker_orders(due, tmp, used, orders);
    std::set<StateId> next;
    for (const auto& order : orders) {
      auto s = cur;
      for (const auto& mk : order) s = step(a, s, Symbol::of(mk));
      next.insert(s.begin(), s.end());
    }
    cur = std::move(next);
    if (pos < d.size()) cur = step(a, cur, Symbol::letter_of(d[pos]));
  }
  return std::any_of(cur.begin(), cur.end(), [&](StateId q) { return a.is_final(q); });
}

inline MappingSet brute_evaluate(const VarSetAutomaton& a, const Document& d) {
  MappingSet out;
  for (const auto& m : all_mappings(a.variables, d.size()))
    if (accepts_mapping(a, d, m)) out.insert(m);
  return out;
}

// ---------------------------------------------------------------------------
// Set-level algebra

inline MappingSet set_union(const MappingSet& a, const MappingSet& b) {
  MappingSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

inline MappingSet set_join(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m1 : a)
    for (const auto& m2 : b)
      if (compatible(m1, m2)) out.insert(merge(m1, m2));
  return out;
}

inline MappingSet set_intersection(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m : a)
    if (b.contains(m)) out.insert(m);
  return out;
}

inline MappingSet set_difference(const MappingSet& a, const MappingSet& b) {
  MappingSet out;
  for (const auto& m : a)
    if (!b.contains(m)) out.insert(m);
  return out;
}

inline MappingSet set_project(const MappingSet& a, const VarSet& keep) {
  MappingSet out;
  for (const auto& m : a) out.insert(m.restrict(keep));
  return out;
}

inline MappingSet skyline(const MappingSet& p, const std::function<bool(const Mapping&, const Mapping&)>& leq) {
  MappingSet out;
  for (const auto& m : p) {
    bool dominated = false;
    for (const auto& o : p)
      if (o != m && leq(m, o)) dominated = true;
    if (!dominated) out.insert(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Span set optima

/// Largest pairwise disjoint subfamily, by subset enumeration.
inline std::size_t brute_max_disjoint(const std::vector<Span>& s) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << s.size()); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < s.size() && ok; ++i)
      for (std::size_t j = i + 1; j < s.size() && ok; ++j)
        if ((mask >> i & 1u) && (mask >> j & 1u) && !spans_disjoint(s[i], s[j])) ok = false;
    if (ok) best = std::max<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

/// Fewest unit intervals [p,p+1) hitting every (non-empty) span.
inline std::size_t brute_hitting(const std::vector<Span>& s) {
  std::size_t n = 0;
  for (const auto& x : s) n = std::max(n, x.end);
  std::size_t best = n + 1;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = std::all_of(s.begin(), s.end(), [&](const Span& x) {
      for (std::size_t p = x.begin; p < x.end; ++p)
        if (mask >> p & 1u) return true;
      return false;
    });
    if (ok) best = std::min<std::size_t>(best, static_cast<std::size_t>(std::popcount(mask)));
  }
  return best;
}

// ---------------------------------------------------------------------------
// SAT

inline bool brute_sat(const Cnf& f) {
  for (std::uint64_t a = 0; a < (1ull << f.num_vars); ++a) {
    bool all = true;
    for (const auto& c : f.clauses) {
      bool any = false;
      for (int lit : c) {
        bool v = (a >> (std::abs(lit) - 1)) & 1u;
        if ((lit > 0) == v) any = true;
      }
      if (!any) all = false;
    }
    if (all) return true;
  }
  return false;
}

/// Every CNF over n variables with exactly c clauses, clauses being nonempty
/// sets of literals taken as a multiset.
inline std::vector<Cnf> all_cnfs(int n, int c) {
  std::vector<std::vector<int>> clause_pool;
  int lits = 2 * n;
  for (int mask = 1; mask < (1 << lits); ++mask) {
    std::vector<int> cl;
    for (int i = 0; i < n; ++i) {
      if (mask >> (2 * i) & 1) cl.push_back(i + 1);
      if (mask >> (2 * i + 1) & 1) cl.push_back(-(i + 1));
    }
    clause_pool.push_back(cl);
  }
  std::vector<Cnf> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(c), 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t from) {
    if (k == idx.size()) {
      Cnf f;
      f.num_vars = n;
      for (auto i : idx) f.clauses.push_back(clause_pool[i]);
      out.push_back(f);
      return;
    }
    for (std::size_t i = from; i < clause_pool.size(); ++i) {
      idx[k] = i;
      rec(k + 1, i);
    }
  };
  rec(0, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Random formulas

inline Regex random_regex(std::mt19937_64& rng, int budget, const std::vector<std::string>& vars) {
  std::uniform_int_distribution<int> pick(0, 9);
  if (budget <= 1) {
    int k = pick(rng);
    if (k == 0) return re::eps();
    return re::letter(k % 2 ? 'a' : 'b');
  }
  int k = pick(rng);
  if (k < 3) {
    int l = 1 + static_cast<int>(rng() % static_cast<unsigned>(budget - 1));
    return re::concat(random_regex(rng, l, vars), random_regex(rng, budget - l, vars));
  }
  if (k < 5) {
    int l = 1 + static_cast<int>(rng() % static_cast<unsigned>(budget - 1));
    return re::alt(random_regex(rng, l, vars), random_regex(rng, budget - l, vars));
  }
  if (k < 7) return re::star(random_regex(rng, budget - 1, vars));
  if (!vars.empty()) return re::capture(vars[rng() % vars.size()], random_regex(rng, budget - 1, vars));
  return random_regex(rng, budget - 1, vars);
}

}  // namespace oracle

#endif  // SPANLINE_TESTS_ORACLES_HPP
