#ifndef SPANLINE_SPANCORE_HPP
#define SPANLINE_SPANCORE_HPP

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spanline {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed user input (documents, formulas, files). CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A broken internal invariant. CLI exit code 3.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// ---------------------------------------------------------------------------
// Variables

/// Suffix marking the dagger copy x† of a variable x.
inline constexpr std::string_view kDaggerSuffix = "!";

inline bool is_dagger(std::string_view var) {
  return var.size() > kDaggerSuffix.size() && var.ends_with(kDaggerSuffix);
}

inline std::string dagger(std::string_view var) {
  return std::string(var) + std::string(kDaggerSuffix);
}

inline std::string undagger(std::string_view var) {
  if (!is_dagger(var)) throw DomainError("variable is not a dagger copy: " + std::string(var));
  return std::string(var.substr(0, var.size() - kDaggerSuffix.size()));
}

inline bool is_valid_variable_name(std::string_view name) {
  if (is_dagger(name)) name = name.substr(0, name.size() - kDaggerSuffix.size());
  if (name.empty()) return false;
  auto head = name.front();
  if (!(std::isalpha(static_cast<unsigned char>(head)) || head == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

using VarSet = std::set<std::string>;

// ---------------------------------------------------------------------------
// Documents

using Alphabet = std::set<char>;

/// A word over a declared alphabet.
class Document {
 public:
  Document() = default;
  Document(std::string text, Alphabet alphabet) : text_(std::move(text)), alphabet_(std::move(alphabet)) {
    for (std::size_t i = 0; i < text_.size(); ++i) {
      if (!alphabet_.contains(text_[i])) {
        throw ValidationError("document letter '" + std::string(1, text_[i]) + "' at position " +
                              std::to_string(i) + " is not in the alphabet");
      }
    }
  }
  /// Alphabet inferred from the text itself.
  explicit Document(std::string text) : text_(std::move(text)), alphabet_(text_.begin(), text_.end()) {}

  const std::string& text() const { return text_; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return text_.size(); }
  char operator[](std::size_t i) const { return text_[i]; }

  friend bool operator==(const Document&, const Document&) = default;

 private:
  std::string text_;
  Alphabet alphabet_;
};

// ---------------------------------------------------------------------------
// Spans

/// Half-open interval [begin, end) of document positions.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  Span() = default;
  Span(std::size_t b, std::size_t e) : begin(b), end(e) {
    if (b > e) throw DomainError("span begin " + std::to_string(b) + " exceeds end " + std::to_string(e));
  }

  std::size_t length() const { return end - begin; }
  bool empty() const { return begin == end; }

  friend auto operator<=>(const Span&, const Span&) = default;
  friend bool operator==(const Span&, const Span&) = default;
};

inline std::string to_string(const Span& s) {
  return "[" + std::to_string(s.begin) + "," + std::to_string(s.end) + ">";
}

inline bool fits(const Span& s, const Document& d) { return s.end <= d.size(); }

inline std::string substring(const Document& d, const Span& s) {
  if (!fits(s, d)) {
    throw std::out_of_range("span " + to_string(s) + " exceeds document of length " + std::to_string(d.size()));
  }
  return d.text().substr(s.begin, s.length());
}

/// True iff `inner` is included in `outer`.
inline bool span_included(const Span& inner, const Span& outer) {
  return outer.begin <= inner.begin && outer.end >= inner.end;
}

/// Two spans are disjoint when no non-empty span is included in both. An
/// empty span is therefore disjoint from every span.
inline bool spans_disjoint(const Span& a, const Span& b) {
  return std::max(a.begin, b.begin) >= std::min(a.end, b.end);
}

/// All spans of a document of length n, ordered by (begin, end).
inline std::vector<Span> all_spans(std::size_t n) {
  std::vector<Span> out;
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = i; j <= n; ++j) out.emplace_back(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// Mappings

/// A finite partial function from variables to spans.
class Mapping {
 public:
  using Storage = std::map<std::string, Span>;

  Mapping() = default;
  Mapping(std::initializer_list<std::pair<const std::string, Span>> init) : assignments_(init) {}
  explicit Mapping(Storage s) : assignments_(std::move(s)) {}

  std::optional<Span> get(const std::string& var) const {
    auto it = assignments_.find(var);
    if (it == assignments_.end()) return std::nullopt;
    return it->second;
  }
  bool assigns(const std::string& var) const { return assignments_.contains(var); }
  void assign(const std::string& var, Span s) { assignments_[var] = s; }
  void unassign(const std::string& var) { assignments_.erase(var); }

  VarSet domain() const {
    VarSet out;
    for (const auto& [v, _] : assignments_) out.insert(v);
    return out;
  }
  std::size_t size() const { return assignments_.size(); }
  bool empty() const { return assignments_.empty(); }
  const Storage& assignments() const { return assignments_; }
  auto begin() const { return assignments_.begin(); }
  auto end() const { return assignments_.end(); }

  bool fits(const Document& d) const {
    return std::all_of(assignments_.begin(), assignments_.end(),
                       [&](const auto& kv) { return spanline::fits(kv.second, d); });
  }

  /// Restriction to the variables of `vars`.
  Mapping restrict(const VarSet& vars) const {
    Mapping out;
    for (const auto& [v, s] : assignments_)
      if (vars.contains(v)) out.assignments_.emplace(v, s);
    return out;
  }

  friend auto operator<=>(const Mapping&, const Mapping&) = default;
  friend bool operator==(const Mapping&, const Mapping&) = default;

 private:
  Storage assignments_;
};

using MappingSet = std::set<Mapping>;

inline std::string to_string(const Mapping& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [v, s] : m) {
    if (!first) out += ", ";
    first = false;
    out += v + ":" + to_string(s);
  }
  return out + "}";
}

/// m1 ~ m2: agreement on every shared variable.
inline bool compatible(const Mapping& m1, const Mapping& m2) {
  for (const auto& [v, s] : m1) {
    auto other = m2.get(v);
    if (other && *other != s) return false;
  }
  return true;
}

/// Union of two compatible mappings.
inline Mapping merge(const Mapping& m1, const Mapping& m2) {
  if (!compatible(m1, m2)) throw DomainError("cannot merge incompatible mappings");
  Mapping out = m1;
  for (const auto& [v, s] : m2) out.assign(v, s);
  return out;
}

/// m† : every variable x renamed to its dagger copy.
inline Mapping dagger(const Mapping& m) {
  Mapping out;
  for (const auto& [v, s] : m) out.assign(dagger(v), s);
  return out;
}

// ---------------------------------------------------------------------------
// Markers and symbols

enum class MarkerKind { Open, Close };

struct Marker {
  MarkerKind kind;
  std::string variable;

  /// Canonical order: every opening marker precedes every closing marker;
  /// within a kind, lexicographic by variable.
  friend auto operator<=>(const Marker&, const Marker&) = default;
  friend bool operator==(const Marker&, const Marker&) = default;
};

/// A transition label: a letter, a marker, or epsilon.
struct Symbol {
  enum class Kind { Letter, Open, Close, Eps };

  Kind kind = Kind::Eps;
  char letter = 0;
  std::string variable;

  static Symbol letter_of(char c) { return Symbol{Kind::Letter, c, {}}; }
  static Symbol open(std::string v) { return Symbol{Kind::Open, 0, std::move(v)}; }
  static Symbol close(std::string v) { return Symbol{Kind::Close, 0, std::move(v)}; }
  static Symbol eps() { return Symbol{}; }
  static Symbol of(const Marker& m) { return m.kind == MarkerKind::Open ? open(m.variable) : close(m.variable); }

  bool is_letter() const { return kind == Kind::Letter; }
  bool is_marker() const { return kind == Kind::Open || kind == Kind::Close; }
  bool is_eps() const { return kind == Kind::Eps; }

  Marker marker() const {
    if (!is_marker()) throw InvariantError("symbol is not a marker");
    return Marker{kind == Kind::Open ? MarkerKind::Open : MarkerKind::Close, variable};
  }

  // Letters sort before markers; markers follow the canonical marker order.
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

inline std::string to_string(const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::Letter: return std::string(1, s.letter);
    case Symbol::Kind::Open: return "|-" + s.variable;
    case Symbol::Kind::Close: return "-|" + s.variable;
    case Symbol::Kind::Eps: return "eps";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Ref-words

using RefWord = std::vector<Symbol>;

/// Valid iff, per variable, either no markers occur or exactly one opening
/// marker occurs before exactly one closing marker. Epsilon is not allowed.
inline bool is_valid_refword(const RefWord& w) {
  std::map<std::string, int> status;  // 1 open, 2 closed
  for (const auto& s : w) {
    if (s.is_eps()) return false;
    if (!s.is_marker()) continue;
    int& st = status[s.variable];
    if (s.kind == Symbol::Kind::Open) {
      if (st != 0) return false;
      st = 1;
    } else {
      if (st != 1) return false;
      st = 2;
    }
  }
  return std::all_of(status.begin(), status.end(), [](const auto& kv) { return kv.second == 2; });
}

/// Splits a valid ref-word into its erasure and the mapping its markers encode.
inline std::pair<std::string, Mapping> decode_refword(const RefWord& w) {
  if (!is_valid_refword(w)) throw ValidationError("invalid ref-word");
  std::string text;
  std::map<std::string, std::size_t> opened;
  Mapping m;
  for (const auto& s : w) {
    if (s.is_letter()) {
      text.push_back(s.letter);
    } else if (s.kind == Symbol::Kind::Open) {
      opened[s.variable] = text.size();
    } else {
      m.assign(s.variable, Span(opened.at(s.variable), text.size()));
    }
  }
  return {text, m};
}

/// The ref-word of (d, m) whose marker blocks follow the canonical order.
inline RefWord canonical_refword(const Document& d, const Mapping& m) {
  if (!m.fits(d)) throw std::out_of_range("mapping does not fit the document");
  RefWord w;
  for (std::size_t pos = 0; pos <= d.size(); ++pos) {
    std::vector<Marker> due;
    for (const auto& [v, s] : m) {
      if (s.begin == pos) due.push_back({MarkerKind::Open, v});
      if (s.end == pos) due.push_back({MarkerKind::Close, v});
    }
    std::sort(due.begin(), due.end());
    for (const auto& mk : due) w.push_back(Symbol::of(mk));
    if (pos < d.size()) w.push_back(Symbol::letter_of(d[pos]));
  }
  return w;
}

}  // namespace spanline

#endif  // SPANLINE_SPANCORE_HPP
