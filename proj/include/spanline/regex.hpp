#ifndef SPANLINE_REGEX_HPP
#define SPANLINE_REGEX_HPP

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autops.hpp"

namespace spanline {

class SyntaxError : public ValidationError {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : ValidationError("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Some accepting path of the compiled formula assigns a variable twice.
class NonSequentialFormula : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct RegexNode;
using Regex = std::shared_ptr<const RegexNode>;

struct RegexNode {
  enum class Kind { Empty, Epsilon, Letter, Concat, Alt, Star, Capture };
  Kind kind = Kind::Empty;
  char letter = 0;
  std::string variable;
  Regex left;
  Regex right;
};

namespace re {

inline Regex empty() { return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Empty, 0, {}, {}, {}}); }
inline Regex eps() { return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Epsilon, 0, {}, {}, {}}); }
inline Regex letter(char c) { return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Letter, c, {}, {}, {}}); }
inline Regex concat(Regex l, Regex r) {
  return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Concat, 0, {}, std::move(l), std::move(r)});
}
inline Regex alt(Regex l, Regex r) {
  return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Alt, 0, {}, std::move(l), std::move(r)});
}
inline Regex star(Regex e) {
  return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Star, 0, {}, std::move(e), {}});
}
inline Regex capture(std::string var, Regex e) {
  if (!is_valid_variable_name(var)) throw ValidationError("invalid variable name: " + var);
  return std::make_shared<RegexNode>(RegexNode{RegexNode::Kind::Capture, 0, std::move(var), std::move(e), {}});
}

/// Left-nested concatenation; eps for an empty list.
inline Regex concat_all(const std::vector<Regex>& parts) {
  if (parts.empty()) return eps();
  Regex out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = concat(out, parts[i]);
  return out;
}

/// Left-nested alternation; empty for an empty list.
inline Regex alt_all(const std::vector<Regex>& parts) {
  if (parts.empty()) return empty();
  Regex out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = alt(out, parts[i]);
  return out;
}

/// (a1 | ... | ak)* over the given alphabet.
inline Regex sigma_star(const Alphabet& sigma) {
  std::vector<Regex> letters;
  for (char c : sigma) letters.push_back(letter(c));
  return star(alt_all(letters));
}

}  // namespace re

inline bool structurally_equal(const Regex& a, const Regex& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->letter != b->letter || a->variable != b->variable) return false;
  return structurally_equal(a->left, b->left) && structurally_equal(a->right, b->right);
}

inline std::size_t regex_size(const Regex& e) {
  if (!e) return 0;
  return 1 + regex_size(e->left) + regex_size(e->right);
}

inline void collect_captures(const Regex& e, VarSet& out) {
  if (!e) return;
  if (e->kind == RegexNode::Kind::Capture) out.insert(e->variable);
  collect_captures(e->left, out);
  collect_captures(e->right, out);
}

inline VarSet capture_variables(const Regex& e) {
  VarSet out;
  collect_captures(e, out);
  return out;
}

inline void collect_letters(const Regex& e, Alphabet& out) {
  if (!e) return;
  if (e->kind == RegexNode::Kind::Letter) out.insert(e->letter);
  collect_letters(e->left, out);
  collect_letters(e->right, out);
}

inline Alphabet regex_letters(const Regex& e) {
  Alphabet out;
  collect_letters(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_meta(char c) {
  return c == '|' || c == '*' || c == '(' || c == ')' || c == '{' || c == '}' || c == '\\' || c == '!';
}

class RegexParser {
 public:
  RegexParser(std::string_view src, const std::optional<Alphabet>& sigma, Alphabet hint = {})
      : src_(src), sigma_(sigma), split_(sigma ? *sigma : std::move(hint)) {}

  Regex parse() {
    auto e = parse_alt();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }
  bool at_atom_start() {
    skip_ws();
    if (pos_ >= src_.size()) return false;
    char c = src_[pos_];
    return c == '(' || c == '\\' || !is_meta(c);
  }

  Regex parse_alt() {
    auto e = parse_cat();
    while (peek('|')) {
      ++pos_;
      e = re::alt(e, parse_cat());
    }
    return e;
  }

  Regex parse_cat() {
    if (!at_atom_start()) fail(pos_ >= src_.size() ? "unexpected end of input" : "expected an expression");
    std::vector<Regex> parts;
    while (at_atom_start()) {
      auto atoms = parse_atoms();
      while (peek('*')) {
        ++pos_;
        atoms.back() = re::star(atoms.back());
      }
      parts.insert(parts.end(), atoms.begin(), atoms.end());
    }
    return re::concat_all(parts);
  }

  Regex make_letter(char c, std::size_t at) {
    if (sigma_ && !sigma_->contains(c)) throw SyntaxError("letter '" + std::string(1, c) + "' is not in the alphabet", at);
    return re::letter(c);
  }

  /// One atom, or the letters of an identifier that is neither a keyword nor
  /// a capture. Postfix stars apply to the last returned atom.
  std::vector<Regex> parse_atoms() {
    skip_ws();
    const std::size_t start = pos_;
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_alt();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return {e};
    }
    if (c == '\\') {
      ++pos_;
      if (pos_ >= src_.size()) fail("dangling escape");
      return {make_letter(src_[pos_++], start)};
    }
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      std::size_t var_begin = pos_;
      while (var_begin < end && split_.contains(src_[var_begin])) ++var_begin;
      if (var_begin == end || !is_ident_start(src_[var_begin])) var_begin = pos_;
      std::string name(src_.substr(var_begin, end - var_begin));
      std::size_t after = end;
      if (after < src_.size() && src_[after] == '!') {
        name += "!";
        ++after;
      }
      std::size_t look = after;
      while (look < src_.size() && std::isspace(static_cast<unsigned char>(src_[look]))) ++look;
      if (look < src_.size() && src_[look] == '{') {
        std::vector<Regex> out;
        for (std::size_t i = pos_; i < var_begin; ++i) out.push_back(make_letter(src_[i], i));
        pos_ = look + 1;
        auto inner = parse_alt();
        if (!peek('}')) fail("expected '}'");
        ++pos_;
        out.push_back(re::capture(name, inner));
        return out;
      }
      if (name == "empty") {
        pos_ = end;
        return {re::empty()};
      }
      if (name == "eps") {
        pos_ = end;
        return {re::eps()};
      }
      std::vector<Regex> letters;
      for (std::size_t i = pos_; i < end; ++i) letters.push_back(make_letter(src_[i], i));
      pos_ = end;
      return letters;
    }
    ++pos_;
    return {make_letter(c, start)};
  }

  std::string_view src_;
  std::optional<Alphabet> sigma_;
  Alphabet split_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a formula. With `sigma` given, letters outside it are rejected.
/// A run like `bx{` is split into the letter b and the capture x when b is a
/// letter of `sigma` (or of `letters` if no sigma is given) and x is not; with
/// neither set the whole run names the variable.
inline Regex parse_regex(std::string_view src, const std::optional<Alphabet>& sigma = std::nullopt,
                         const Alphabet& letters = {}) {
  return detail::RegexParser(src, sigma, letters).parse();
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string print_letter(char c) {
  if (is_ident_char(c)) return std::string(1, c);
  return "\\" + std::string(1, c);
}

// Precedence: 0 alternation, 1 concatenation, 2 star and atoms.
inline std::string print_regex(const Regex& e, int context) {
  using K = RegexNode::Kind;
  std::string out;
  int prec = 2;
  switch (e->kind) {
    case K::Empty: out = "empty"; break;
    case K::Epsilon: out = "eps"; break;
    case K::Letter: out = print_letter(e->letter); break;
    case K::Capture: out = e->variable + "{" + print_regex(e->left, 0) + "}"; break;
    case K::Star: out = print_regex(e->left, 2) + "*"; break;
    case K::Concat:
      prec = 1;
      out = print_regex(e->left, 1) + " " + print_regex(e->right, 2);
      break;
    case K::Alt:
      prec = 0;
      out = print_regex(e->left, 0) + " | " + print_regex(e->right, 1);
      break;
  }
  return prec < context ? "(" + out + ")" : out;
}

}  // namespace detail

/// Prints a formula so that parse_regex returns a structurally equal tree.
inline std::string to_string(const Regex& e) { return detail::print_regex(e, 0); }

// ---------------------------------------------------------------------------
// Compilation

namespace detail {

struct Fragment {
  StateId start;
  StateId end;
};

inline Fragment thompson(const Regex& e, VarSetAutomaton& a) {
  using K = RegexNode::Kind;
  switch (e->kind) {
    case K::Empty: return {a.add_state(), a.add_state()};
    case K::Epsilon: {
      Fragment f{a.add_state(), a.add_state()};
      a.add_transition(f.start, Symbol::eps(), f.end);
      return f;
    }
    case K::Letter: {
      Fragment f{a.add_state(), a.add_state()};
      a.add_transition(f.start, Symbol::letter_of(e->letter), f.end);
      return f;
    }
    case K::Concat: {
      auto l = thompson(e->left, a);
      auto r = thompson(e->right, a);
      a.add_transition(l.end, Symbol::eps(), r.start);
      return {l.start, r.end};
    }
    case K::Alt: {
      auto l = thompson(e->left, a);
      auto r = thompson(e->right, a);
      Fragment f{a.add_state(), a.add_state()};
      a.add_transition(f.start, Symbol::eps(), l.start);
      a.add_transition(f.start, Symbol::eps(), r.start);
      a.add_transition(l.end, Symbol::eps(), f.end);
      a.add_transition(r.end, Symbol::eps(), f.end);
      return f;
    }
    case K::Star: {
      auto inner = thompson(e->left, a);
      Fragment f{a.add_state(), a.add_state()};
      a.add_transition(f.start, Symbol::eps(), inner.start);
      a.add_transition(f.start, Symbol::eps(), f.end);
      a.add_transition(inner.end, Symbol::eps(), inner.start);
      a.add_transition(inner.end, Symbol::eps(), f.end);
      return f;
    }
    case K::Capture: {
      auto inner = thompson(e->left, a);
      Fragment f{a.add_state(), a.add_state()};
      a.add_transition(f.start, Symbol::open(e->variable), inner.start);
      a.add_transition(inner.end, Symbol::close(e->variable), f.end);
      return f;
    }
  }
  throw InvariantError("unknown regex node");
}

}  // namespace detail

/// The raw structural translation, epsilon transitions included.
inline VarSetAutomaton thompson_automaton(const Regex& e, const Alphabet& sigma = {}) {
  VarSetAutomaton a(sigma, capture_variables(e));
  a.num_states = 0;
  a.finals.clear();
  auto f = detail::thompson(e, a);
  a.initial = f.start;
  a.finals[static_cast<std::size_t>(f.end)] = true;
  return a;
}

/// Compiles a formula to a trimmed, epsilon-free sequential VA.
inline VarSetAutomaton compile(const Regex& e, const Alphabet& sigma = {}) {
  auto a = normalize(thompson_automaton(e, sigma));
  if (!check_sequential(a).sequential)
    throw NonSequentialFormula("formula " + to_string(e) + " may assign a variable more than once");
  a.flags.sequential = true;
  a.flags.functional = check_functional(a);
  a.flags.ordered = check_ordered(a);
  a.flags.deterministic = check_deterministic(a);
  return a;
}

inline VarSetAutomaton compile(std::string_view src, const Alphabet& sigma = {}) {
  return compile(parse_regex(src, sigma.empty() ? std::nullopt : std::optional<Alphabet>(sigma)), sigma);
}

}  // namespace spanline

#endif  // SPANLINE_REGEX_HPP
