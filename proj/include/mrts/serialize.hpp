#pragma once

// Wire formats for tree shapes:
//   compact text  "t1,...,tK|l1,...,lK"   (ASCII, no whitespace)
//   JSON          {"t":[...],"l":[...]}

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mrts/error.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

inline std::string to_text(const StringRepr& s) {
  std::string out;
  auto put = [&out](const std::vector<int>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(v[i]);
    }
  };
  put(s.t);
  out += '|';
  put(s.l);
  return out;
}

inline std::string to_text(const TreeShape& s) { return to_text(s.repr()); }

inline nlohmann::json to_json(const TreeShape& s) {
  return nlohmann::json{{"t", s.t()}, {"l", s.l()}};
}

namespace detail {

class TextCursor {
 public:
  explicit TextCursor(std::string_view text) : text_(text) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }

  int number() {
    const std::size_t start = pos_;
    long long value = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1'000'000'000) throw ParseError("integer too large", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError("expected a nonnegative integer", pos_);
    return static_cast<int>(value);
  }

  void expect(char c) {
    if (peek() != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  std::vector<int> list() {
    std::vector<int> v{number()};
    while (peek() == ',') {
      ++pos_;
      v.push_back(number());
    }
    return v;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Parses the compact form without validating tree constraints.
inline StringRepr parse_string_repr(std::string_view text) {
  detail::TextCursor cur(text);
  StringRepr s;
  s.t = cur.list();
  cur.expect('|');
  s.l = cur.list();
  if (!cur.done()) throw ParseError("trailing characters", cur.pos());
  if (s.t.size() != s.l.size()) {
    throw ParseError("t and l have different lengths", text.find('|'));
  }
  return s;
}

// Parse + validate. Malformed text raises ParseError; a well-formed string
// that violates S1..S4 raises DomainError.
inline TreeShape from_text(std::string_view text) {
  return TreeShape(parse_string_repr(text));
}

inline TreeShape from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("t") || !j.contains("l")) {
    throw ParseError("JSON shape needs \"t\" and \"l\" arrays", 0);
  }
  StringRepr s;
  try {
    s.t = j.at("t").get<std::vector<int>>();
    s.l = j.at("l").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad JSON shape: ") + e.what(), 0);
  }
  if (s.t.size() != s.l.size()) {
    throw StructuralError("t and l have different lengths");
  }
  return TreeShape(std::move(s));
}

inline TreeShape from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  return from_json(j);
}

// Accepts either a compact-text line or a JSON object line.
inline TreeShape parse_shape_line(std::string_view line) {
  std::size_t first = 0;
  while (first < line.size() &&
         std::isspace(static_cast<unsigned char>(line[first]))) {
    ++first;
  }
  std::size_t last = line.size();
  while (last > first &&
         std::isspace(static_cast<unsigned char>(line[last - 1]))) {
    --last;
  }
  const auto body = line.substr(first, last - first);
  if (!body.empty() && body.front() == '{') return from_json_text(body);
  try {
    return from_text(body);
  } catch (const ParseError& e) {
    throw ParseError(e.reason(), e.offset() + first);
  }
}

}  // namespace mrts
