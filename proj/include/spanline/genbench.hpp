#ifndef SPANLINE_GENBENCH_HPP
#define SPANLINE_GENBENCH_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "regex.hpp"
#include "skyline.hpp"

namespace spanline {

// ---------------------------------------------------------------------------
// CNF

/// Clauses of signed 1-based variable indices.
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;

  std::size_t num_clauses() const { return clauses.size(); }

  /// Clauses (0-based) where variable i (1-based) occurs positively.
  std::vector<std::size_t> positive_in(int i) const { return occurrences(i); }
  std::vector<std::size_t> negative_in(int i) const { return occurrences(-i); }

  void validate() const {
    for (const auto& c : clauses)
      for (int lit : c)
        if (lit == 0 || std::abs(lit) > num_vars) throw ValidationError("literal out of range: " + std::to_string(lit));
  }

  bool satisfied_by(std::uint64_t assignment) const {
    return std::all_of(clauses.begin(), clauses.end(), [&](const auto& c) {
      return std::any_of(c.begin(), c.end(), [&](int lit) {
        bool val = (assignment >> (std::abs(lit) - 1)) & 1u;
        return lit > 0 ? val : !val;
      });
    });
  }

 private:
  std::vector<std::size_t> occurrences(int lit) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < clauses.size(); ++j)
      if (std::find(clauses[j].begin(), clauses[j].end(), lit) != clauses[j].end()) out.push_back(j);
    return out;
  }
};

inline Cnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Cnf f;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<int> current;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c" || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> f.num_vars >> declared_clauses) || fmt != "cnf" || f.num_vars < 0)
        throw ValidationError("malformed DIMACS header: " + line);
      header = true;
      continue;
    }
    if (!header) throw ValidationError("DIMACS clause before header");
    std::istringstream all(line);
    long lit;
    while (all >> lit) {
      if (lit == 0) {
        f.clauses.push_back(current);
        current.clear();
      } else {
        current.push_back(static_cast<int>(lit));
      }
    }
    if (!all.eof()) throw ValidationError("malformed DIMACS clause line: " + line);
  }
  if (!header) throw ValidationError("missing DIMACS header");
  if (!current.empty()) f.clauses.push_back(current);
  if (f.clauses.size() != declared_clauses)
    throw ValidationError("DIMACS header declares " + std::to_string(declared_clauses) + " clauses, found " +
                          std::to_string(f.clauses.size()));
  f.validate();
  return f;
}

inline std::string to_dimacs(const Cnf& f) {
  std::ostringstream os;
  os << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  for (const auto& c : f.clauses) {
    for (int lit : c) os << lit << " ";
    os << "0\n";
  }
  return os.str();
}

/// Satisfiability by enumerating all assignments.
inline bool sat(const Cnf& f) {
  if (f.num_vars > 24) throw DomainError("brute-force SAT supports at most 24 variables");
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << f.num_vars); ++a)
    if (f.satisfied_by(a)) return true;
  return false;
}

/// Models over x1..xn as Boolean assignments.
inline BoolSet cnf_models(const Cnf& f, const std::string& prefix = "x") {
  if (f.num_vars > 24) throw DomainError("model enumeration supports at most 24 variables");
  BoolSet out;
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << f.num_vars); ++a) {
    if (!f.satisfied_by(a)) continue;
    BoolAssignment b;
    for (int i = 1; i <= f.num_vars; ++i) b[prefix + std::to_string(i)] = (a >> (i - 1)) & 1u;
    out.insert(std::move(b));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs

using Graph = std::pair<int, std::vector<std::pair<int, int>>>;  // vertex count, edges (1-based)

inline int max_degree(const Graph& g) {
  std::vector<int> deg(static_cast<std::size_t>(g.first) + 1, 0);
  for (auto [u, v] : g.second) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

/// F_G: one clause (x_u ∨ x_v) per edge.
inline Cnf graph_to_cnf(const Graph& g) {
  if (max_degree(g) > 3) throw DomainError("graph has a vertex of degree above 3");
  Cnf f;
  f.num_vars = g.first;
  for (auto [u, v] : g.second) f.clauses.push_back({u, v});
  return f;
}

/// A uniformly paired simple cubic graph on n vertices (n even), by
/// repeated configuration-model sampling.
inline Graph random_cubic_graph(int n, std::uint64_t seed) {
  if (n < 4 || n % 2) throw DomainError("cubic graphs need an even vertex count of at least 4");
  std::mt19937_64 rng(seed);
  for (;;) {
    std::vector<int> stubs;
    for (int v = 1; v <= n; ++v)
      for (int k = 0; k < 3; ++k) stubs.push_back(v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::set<std::pair<int, int>> edges;
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      auto u = std::min(stubs[i], stubs[i + 1]), v = std::max(stubs[i], stubs[i + 1]);
      if (u == v || !edges.insert({u, v}).second) {
        simple = false;
        break;
      }
    }
    if (simple) return {n, std::vector<std::pair<int, int>>(edges.begin(), edges.end())};
  }
}

/// True iff every clause has two positive literals and each variable occurs
/// at most three times.
inline bool is_read3_monotone_2cnf(const Cnf& f) {
  std::vector<int> occ(static_cast<std::size_t>(f.num_vars) + 1, 0);
  for (const auto& c : f.clauses) {
    if (c.size() != 2) return false;
    for (int lit : c) {
      if (lit <= 0) return false;
      if (++occ[static_cast<std::size_t>(lit)] > 3) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomVaLimits {
  int max_states = 6;
  int max_variables = 3;
  Alphabet alphabet{'a', 'b'};
  double letter_probability = 0.7;
  double marker_probability = 0.8;
  double final_probability = 0.9;
};

/// A random trimmed sequential VA. Each state carries a per-variable status
/// (unseen, open, closed): statuses are drawn along a random walk of marker
/// steps, letter transitions join states of equal status, marker transitions
/// join states one step apart, and only states without open variables may be
/// final. Rejection sampling discards empty results most of the time.
inline VarSetAutomaton random_va(std::uint64_t seed, const RandomVaLimits& lim = {}) {
  std::mt19937_64 rng(seed);
  const int n = std::uniform_int_distribution<int>(1, lim.max_states)(rng);
  const int k = std::uniform_int_distribution<int>(0, lim.max_variables)(rng);
  for (int attempt = 0;; ++attempt) {
    std::vector<std::string> vlist;
    for (int i = 0; i < k; ++i) vlist.emplace_back(1, static_cast<char>('x' + i));
    VarSetAutomaton a(lim.alphabet, VarSet(vlist.begin(), vlist.end()));
    a.num_states = 0;
    a.finals.clear();
    std::bernoulli_distribution fin(lim.final_probability), letter(lim.letter_probability),
        marker(lim.marker_probability), coin(0.5);
    // status[q][v]: 0 unseen, 1 open, 2 closed
    std::vector<std::vector<int>> status;
    status.emplace_back(static_cast<std::size_t>(k), 0);
    for (int q = 1; q < n; ++q) {
      auto parent = coin(rng) ? status.size() - 1 : std::uniform_int_distribution<std::size_t>(0, status.size() - 1)(rng);
      auto s = status[parent];
      int steps = k == 0 ? 0 : std::uniform_int_distribution<int>(1, 2)(rng);
      for (int t = 0; t < steps; ++t) {
        auto v = std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(k) - 1)(rng);
        if (s[v] < 2) ++s[v];
      }
      status.push_back(s);
    }
    auto open_free = [](const std::vector<int>& s) { return std::none_of(s.begin(), s.end(), [](int x) { return x == 1; }); };
    for (int q = 0; q < n; ++q) a.add_state(open_free(status[static_cast<std::size_t>(q)]) && fin(rng));
    for (int q = 0; q < n; ++q) {
      for (int r = 0; r < n; ++r) {
        const auto& sq = status[static_cast<std::size_t>(q)];
        const auto& sr = status[static_cast<std::size_t>(r)];
        if (sq == sr) {
          for (char c : lim.alphabet)
            if (letter(rng)) a.add_transition(q, Symbol::letter_of(c), r);
          continue;
        }
        int diff = -1, count = 0;
        for (int v = 0; v < k; ++v) {
          if (sq[static_cast<std::size_t>(v)] == sr[static_cast<std::size_t>(v)]) continue;
          ++count;
          diff = v;
        }
        if (count != 1 || sr[static_cast<std::size_t>(diff)] != sq[static_cast<std::size_t>(diff)] + 1) continue;
        if (!marker(rng)) continue;
        const auto& v = vlist[static_cast<std::size_t>(diff)];
        a.add_transition(q, sr[static_cast<std::size_t>(diff)] == 1 ? Symbol::open(v) : Symbol::close(v), r);
      }
    }
    a.dedupe_transitions();
    a = trim(a);
    if (!check_sequential(a).sequential) continue;
    // Mostly keep automata whose variables survive trimming; let an
    // occasional trivial or marker-free one through.
    bool trivial = a.transitions.empty();
    if (trivial && attempt % 16 != 15) continue;
    if (k > 0 && a.marker_variables().empty() && attempt % 64 != 63) continue;
    a.flags.sequential = true;
    return a;
  }
}

inline Document random_doc(std::uint64_t seed, std::size_t len, const Alphabet& sigma = {'a', 'b'}) {
  std::mt19937_64 rng(seed);
  const std::vector<char> letters(sigma.begin(), sigma.end());
  std::string text;
  for (std::size_t i = 0; i < len; ++i)
    text.push_back(letters[std::uniform_int_distribution<std::size_t>(0, letters.size() - 1)(rng)]);
  return Document(text, sigma);
}

/// Random CNF with clauses of 1..max_width distinct variables.
inline Cnf random_cnf(std::uint64_t seed, int num_vars, int num_clauses, int max_width = 3) {
  std::mt19937_64 rng(seed);
  Cnf f;
  f.num_vars = num_vars;
  for (int j = 0; j < num_clauses; ++j) {
    int w = std::uniform_int_distribution<int>(1, std::min(max_width, num_vars))(rng);
    std::vector<int> vars(static_cast<std::size_t>(num_vars));
    for (int i = 0; i < num_vars; ++i) vars[static_cast<std::size_t>(i)] = i + 1;
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<int> clause;
    for (int i = 0; i < w; ++i) clause.push_back(std::bernoulli_distribution(0.5)(rng) ? vars[static_cast<std::size_t>(i)] : -vars[static_cast<std::size_t>(i)]);
    f.clauses.push_back(clause);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Reductions

struct SkylineReduction {
  std::string formula;
  VarSetAutomaton automaton;
  Document document;
  std::size_t threshold = 0;
  std::string rule = "varinc";
};

namespace detail {

inline std::string occurrence_var(int i, std::size_t j) { return "v" + std::to_string(i) + "_" + std::to_string(j + 1); }

inline std::string eps_capture(const std::string& v) { return v + "{eps}"; }

inline std::string concat_text(const std::vector<std::string>& parts) {
  if (parts.empty()) return "eps";
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

inline std::string alt_text(const std::vector<std::string>& parts) {
  if (parts.empty()) return "empty";
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "(" : " | (") + p + ")";
  return out;
}

}  // namespace detail

/// F ↦ (r_valid | r_mask, ε, n_c): F is satisfiable iff the variable
/// inclusion skyline on ε has at least n_c + 1 mappings.
inline SkylineReduction sat_to_skyline(const Cnf& f) {
  f.validate();
  std::vector<std::string> valid;
  std::vector<std::pair<int, std::size_t>> occurrences;
  for (int i = 1; i <= f.num_vars; ++i) {
    std::vector<std::string> pos, neg;
    for (auto j : f.positive_in(i)) pos.push_back(detail::eps_capture(detail::occurrence_var(i, j)));
    for (auto j : f.negative_in(i)) neg.push_back(detail::eps_capture(detail::occurrence_var(i, j)));
    valid.push_back(detail::alt_text({detail::concat_text(pos), detail::concat_text(neg)}));
    std::set<std::size_t> js;
    for (auto j : f.positive_in(i)) js.insert(j);
    for (auto j : f.negative_in(i)) js.insert(j);
    for (auto j : js) occurrences.emplace_back(i, j);
  }
  std::vector<std::string> masks;
  for (std::size_t k = 0; k < f.num_clauses(); ++k) {
    std::vector<std::string> parts;
    for (auto [i, j] : occurrences)
      if (j != k) parts.push_back(detail::eps_capture(detail::occurrence_var(i, j)));
    masks.push_back(detail::concat_text(parts));
  }
  std::vector<std::string> valid_parts;
  for (const auto& v : valid) valid_parts.push_back("(" + v + ")");
  std::string r_valid = detail::concat_text(valid_parts);
  std::string r_mask = "a{eps} (" + detail::alt_text(masks) + ")";
  SkylineReduction out;
  out.formula = "(" + r_valid + ") | (" + r_mask + ")";
  out.automaton = compile(out.formula);
  out.document = Document("", {});
  out.threshold = f.num_clauses();
  return out;
}

struct JoinBlowup {
  std::string left;   // r_=
  std::string right;  // r_C
};

/// Gadgets for a read-3 monotone 2-CNF: on "a", the join of the two formulas
/// keeps the mappings where every clause has an occurrence variable left
/// unassigned by the left side.
inline JoinBlowup join_blowup_family(const Cnf& f) {
  if (!is_read3_monotone_2cnf(f)) throw DomainError("expected a read-3 monotone 2-CNF");
  auto xv = [](int i, int p) { return "x" + std::to_string(i) + "_" + std::to_string(p); };
  std::vector<std::string> left;
  for (int i = 1; i <= f.num_vars; ++i)
    left.push_back("(" + xv(i, 1) + "{eps} " + xv(i, 2) + "{eps} " + xv(i, 3) + "{eps} | eps)");
  left.push_back("a");
  std::vector<int> seen(static_cast<std::size_t>(f.num_vars) + 1, 0);
  std::vector<std::string> right{"a"};
  for (const auto& c : f.clauses) {
    int p1 = ++seen[static_cast<std::size_t>(c[0])];
    int p2 = ++seen[static_cast<std::size_t>(c[1])];
    right.push_back("(" + xv(c[0], p1) + "{eps} | " + xv(c[1], p2) + "{eps})");
  }
  return {detail::concat_text(left), detail::concat_text(right)};
}

/// r_valid | r_mask for a read-3 monotone 2-CNF: on ε, the variable
/// inclusion skyline projected to x1..xn has exactly the models of F.
inline std::string skyline_blowup_family(const Cnf& f) {
  if (!is_read3_monotone_2cnf(f)) throw DomainError("expected a read-3 monotone 2-CNF");
  auto x = [](int i) { return "x" + std::to_string(i); };
  auto xbar = [](int i) { return "xbar" + std::to_string(i); };
  std::vector<std::string> valid;
  for (int i = 1; i <= f.num_vars; ++i) {
    std::vector<std::string> on{x(i) + "{eps}"};
    for (auto j : f.positive_in(i)) on.push_back(detail::eps_capture(detail::occurrence_var(i, j)));
    valid.push_back("((" + detail::concat_text(on) + ") | " + xbar(i) + "{eps})");
  }
  std::vector<std::string> masks;
  for (std::size_t k = 0; k < f.num_clauses(); ++k) {
    std::vector<std::string> parts;
    for (int i = 1; i <= f.num_vars; ++i) {
      parts.push_back(x(i) + "{" + xbar(i) + "{eps}}");
      for (auto j : f.positive_in(i))
        if (j != k) parts.push_back(detail::eps_capture(detail::occurrence_var(i, j)));
    }
    masks.push_back(detail::concat_text(parts));
  }
  return "(" + detail::concat_text(valid) + ") | (" + detail::alt_text(masks) + ")";
}

// ---------------------------------------------------------------------------
// Reduction from a rule with disjoint strict pairs

using SpanPair = std::pair<MaybeSpan, MaybeSpan>;

struct UmdsdpReduction {
  VarSetAutomaton automaton;
  /// Pairs in block order; pair i drives variables v{i+1}_*.
  std::vector<SpanPair> pairs;
};

namespace detail {

/// Linear automaton reading w with the markers of m (positions relative to
/// w) in canonical order.
inline VarSetAutomaton linear_refword_automaton(const Document& w, const Mapping& m, const VarSet& vars) {
  auto word = canonical_refword(w, m);
  VarSetAutomaton a(w.alphabet(), vars);
  for (const auto& s : word) {
    auto next = a.add_state(false);
    a.add_transition(next - 1, s, next);
  }
  a.finals[static_cast<std::size_t>(a.num_states - 1)] = true;
  a.flags = {true, std::nullopt, true, true};
  return a;
}

inline MaybeSpan shift(const MaybeSpan& s, std::size_t offset) {
  if (!s) return s;
  return Span(s->begin - offset, s->end - offset);
}

}  // namespace detail

/// Builds the valid and mask mappings over variables v{i}_{j} (variable i of
/// F, clause j) on d: block i of d carries pair i, a valid mapping sends
/// v{i}_{j} to the upper side of the pair iff assigning x_i as chosen
/// satisfies clause j, and mask j sends v{i}_{j} low and all other variables
/// high. Pairs are sorted by covering; they must be separable by cut points.
inline UmdsdpReduction umdsdp_reduction(const Document& d, std::vector<SpanPair> pairs, const Cnf& f) {
  f.validate();
  if (pairs.size() != static_cast<std::size_t>(f.num_vars))
    throw DomainError("need one strict pair per CNF variable");
  std::sort(pairs.begin(), pairs.end(), [](const SpanPair& a, const SpanPair& b) {
    auto ca = covering_span(a.first, a.second), cb = covering_span(b.first, b.second);
    return std::tie(ca.end, ca.begin) < std::tie(cb.end, cb.begin);
  });
  std::vector<std::size_t> cuts{0};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto c = covering_span(pairs[i].first, pairs[i].second);
    if (c.end > d.size()) throw DomainError("pair does not fit the document");
    if (c.begin < cuts.back()) throw DomainError("pairs are not separable along the document");
    cuts.push_back(i + 1 == pairs.size() ? d.size() : c.end);
  }
  if (pairs.empty()) cuts.push_back(d.size());
  const std::size_t nc = f.num_clauses();
  auto var = [](std::size_t i, std::size_t j) { return detail::occurrence_var(static_cast<int>(i + 1), j); };
  VarSet all_vars;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t j = 0; j < nc; ++j) all_vars.insert(var(i, j));

  // side(i, j) in {1, 2}: which side of pair i variable v_{i,j} follows.
  auto block = [&](std::size_t i, const std::function<int(std::size_t)>& side) {
    const std::size_t lo = cuts[i], hi = cuts[i + 1];
    Document w(d.text().substr(lo, hi - lo), d.alphabet());
    Mapping m;
    VarSet vars;
    for (std::size_t j = 0; j < nc; ++j) {
      vars.insert(var(i, j));
      const auto& s = side(j) == 2 ? pairs[i].second : pairs[i].first;
      if (s) m.assign(var(i, j), *detail::shift(s, lo));
    }
    return detail::linear_refword_automaton(w, m, vars);
  };
  auto concat_blocks = [&](const std::function<VarSetAutomaton(std::size_t)>& make) {
    if (pairs.empty()) return detail::linear_refword_automaton(d, {}, {});
    VarSetAutomaton out = make(0);
    for (std::size_t i = 1; i < pairs.size(); ++i) out = concat(out, make(i));
    return out;
  };

  auto valid = concat_blocks([&](std::size_t i) {
    auto t = f.positive_in(static_cast<int>(i + 1)), fl = f.negative_in(static_cast<int>(i + 1));
    auto in = [](const std::vector<std::size_t>& v, std::size_t j) { return std::find(v.begin(), v.end(), j) != v.end(); };
    auto m_true = block(i, [&](std::size_t j) { return in(t, j) ? 2 : 1; });
    auto m_false = block(i, [&](std::size_t j) { return in(fl, j) ? 2 : 1; });
    return union_(m_true, m_false);
  });
  std::vector<VarSetAutomaton> parts{valid};
  for (std::size_t k = 0; k < nc; ++k)
    parts.push_back(concat_blocks([&](std::size_t i) { return block(i, [&](std::size_t j) { return j == k ? 1 : 2; }); }));
  auto a = union_all(parts);
  a.variables = all_vars;
  a.alphabet.insert(d.alphabet().begin(), d.alphabet().end());
  a.flags.sequential = true;
  return {std::move(a), std::move(pairs)};
}

/// True iff some mapping sends, for every clause j, some v{i}_{j} to the
/// upper side of pair i.
inline bool umdsdp_satisfying_pattern(const MappingSet& skyline, const UmdsdpReduction& r, const Cnf& f) {
  for (const auto& m : skyline) {
    bool ok = true;
    for (std::size_t j = 0; j < f.num_clauses() && ok; ++j) {
      bool hit = false;
      for (std::size_t i = 0; i < r.pairs.size() && !hit; ++i)
        hit = m.get(detail::occurrence_var(static_cast<int>(i + 1), j)) == r.pairs[i].second;
      ok = hit;
    }
    if (ok) return true;
  }
  return false;
}

/// Greedily picks up to k pairwise disjoint strict pairs of an analysis that
/// are separable along the document.
inline std::vector<SpanPair> select_disjoint_pairs(const RuleAnalysis& an, std::size_t k) {
  std::vector<const StrictDominationPair*> sorted;
  for (const auto& p : an.pairs) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) {
    return std::tie(a->covering.end, a->covering.begin) < std::tie(b->covering.end, b->covering.begin);
  });
  std::vector<SpanPair> out;
  std::optional<std::size_t> last_end;
  for (const auto* p : sorted) {
    if (out.size() == k) break;
    if (last_end && p->covering.begin < *last_end) continue;
    out.emplace_back(p->lhs, p->rhs);
    last_end = p->covering.end;
  }
  return out;
}

}  // namespace spanline

#endif  // SPANLINE_GENBENCH_HPP
