#ifndef SPANLINE_JSON_IO_HPP
#define SPANLINE_JSON_IO_HPP

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "autops.hpp"
#include "eval.hpp"

namespace spanline {

using Json = nlohmann::json;

inline Json to_json(const Span& s) { return Json::array({s.begin, s.end}); }

inline Span span_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned())
    throw ValidationError("span must be [begin, end] with non-negative integers");
  return Span(j[0].get<std::size_t>(), j[1].get<std::size_t>());
}

/// Mapping as {var: [b,e] | null}; variables of `universe` not assigned by m
/// are written as null.
inline Json to_json(const Mapping& m, const VarSet& universe = {}) {
  Json j = Json::object();
  for (const auto& v : universe) j[v] = nullptr;
  for (const auto& [v, s] : m) j[v] = to_json(s);
  return j;
}

inline Mapping mapping_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("mapping must be a JSON object");
  Mapping m;
  for (const auto& [v, s] : j.items()) {
    if (!is_valid_variable_name(v)) throw ValidationError("invalid variable name: " + v);
    if (!s.is_null()) m.assign(v, span_from_json(s));
  }
  return m;
}

inline Json to_json(const BoolAssignment& b) {
  Json j = Json::object();
  for (const auto& [v, val] : b) j[v] = val;
  return j;
}

inline Json label_to_json(const Symbol& s) {
  switch (s.kind) {
    case Symbol::Kind::Letter: return {{"type", "letter"}, {"value", std::string(1, s.letter)}};
    case Symbol::Kind::Open: return {{"type", "open"}, {"value", s.variable}};
    case Symbol::Kind::Close: return {{"type", "close"}, {"value", s.variable}};
    case Symbol::Kind::Eps: return {{"type", "eps"}, {"value", ""}};
  }
  return {};
}

inline Symbol label_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw ValidationError("transition label must have a type");
  auto type = j.at("type").get<std::string>();
  auto value = j.value("value", std::string{});
  if (type == "eps") return Symbol::eps();
  if (type == "letter") {
    if (value.size() != 1) throw ValidationError("letter label must be a single character");
    return Symbol::letter_of(value[0]);
  }
  if (!is_valid_variable_name(value)) throw ValidationError("invalid variable name in label: " + value);
  if (type == "open") return Symbol::open(value);
  if (type == "close") return Symbol::close(value);
  throw ValidationError("unknown label type: " + type);
}

inline Json to_json(const VarSetAutomaton& a) {
  Json j;
  j["alphabet"] = Json::array();
  for (char c : a.alphabet) j["alphabet"].push_back(std::string(1, c));
  j["variables"] = Json::array();
  for (const auto& v : a.variables) j["variables"].push_back(v);
  j["states"] = a.num_states;
  j["initial"] = a.initial;
  j["finals"] = Json::array();
  for (StateId q = 0; q < a.num_states; ++q)
    if (a.is_final(q)) j["finals"].push_back(q);
  j["transitions"] = Json::array();
  for (const auto& t : a.transitions)
    j["transitions"].push_back({{"from", t.from}, {"label", label_to_json(t.label)}, {"to", t.to}});
  return j;
}

inline VarSetAutomaton automaton_from_json(const Json& j) {
  try {
    VarSetAutomaton a;
    for (const auto& c : j.at("alphabet")) {
      auto s = c.get<std::string>();
      if (s.size() != 1) throw ValidationError("alphabet entries must be single characters");
      a.alphabet.insert(s[0]);
    }
    for (const auto& v : j.at("variables")) {
      auto s = v.get<std::string>();
      if (!is_valid_variable_name(s)) throw ValidationError("invalid variable name: " + s);
      a.variables.insert(s);
    }
    auto n = j.at("states").get<int>();
    if (n < 1) throw ValidationError("an automaton needs at least one state");
    a.num_states = n;
    a.finals.assign(static_cast<std::size_t>(n), false);
    a.initial = j.at("initial").get<int>();
    if (a.initial < 0 || a.initial >= n) throw ValidationError("initial state out of range");
    for (const auto& f : j.at("finals")) {
      auto q = f.get<int>();
      if (q < 0 || q >= n) throw ValidationError("final state out of range");
      a.finals[static_cast<std::size_t>(q)] = true;
    }
    for (const auto& t : j.at("transitions")) {
      auto from = t.at("from").get<int>(), to = t.at("to").get<int>();
      if (from < 0 || from >= n || to < 0 || to >= n) throw ValidationError("transition endpoint out of range");
      a.add_transition(from, label_from_json(t.at("label")), to);
    }
    a.dedupe_transitions();
    return a;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed automaton JSON: ") + e.what());
  }
}

inline Json to_json(const AutomatonStats& s) {
  return {{"states", s.states},         {"transitions", s.transitions}, {"finals", s.finals},
          {"variables", s.variables},   {"sequential", s.sequential},   {"functional", s.functional},
          {"ordered", s.ordered},       {"deterministic", s.deterministic}};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw ValidationError("malformed JSON in " + what + ": " + e.what());
  }
}

inline VarSetAutomaton load_automaton(const std::string& path) {
  return automaton_from_json(parse_json_text(read_file(path), path));
}

}  // namespace spanline

#endif  // SPANLINE_JSON_IO_HPP
