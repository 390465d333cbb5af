#pragma once

// The structured-text layer shared by scene manifests and simulation
// scripts: JSON extended with `//` line comments, parsed into a value tree
// that remembers where every value and key was written.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mural2scene/diagnostic.hpp"

namespace mural2scene::text {

enum class Kind { Null, Bool, Number, String, Array, Object };

const char *kind_name(Kind k);

class Value {
 public:
  Value() = default;

  static Value null();
  static Value boolean(bool b);
  static Value number(double d);
  static Value integer(std::int64_t i);
  static Value string(std::string s);
  static Value array();
  static Value object();

  Kind kind() const { return kind_; }
  SourceLoc loc() const { return loc_; }
  void set_loc(SourceLoc loc) { loc_ = loc; }

  bool is_integer() const { return kind_ == Kind::Number && integral_; }
  bool as_bool() const { return bool_; }
  double as_double() const { return number_; }
  std::int64_t as_int() const { return int_; }
  const std::string &as_string() const { return string_; }

  const std::vector<Value> &items() const { return items_; }
  std::vector<Value> &items() { return items_; }
  void push(Value v) { items_.push_back(std::move(v)); }

  /// Object members in document order.
  const std::vector<std::pair<std::string, Value>> &members() const {
    return members_;
  }
  const std::vector<SourceLoc> &key_locs() const { return key_locs_; }
  const Value *find(std::string_view key) const;
  Value &set(std::string key, Value v, SourceLoc key_loc = {});

 private:
  Kind kind_ = Kind::Null;
  SourceLoc loc_;
  bool bool_ = false;
  bool integral_ = false;
  double number_ = 0.0;
  std::int64_t int_ = 0;
  std::string string_;
  std::vector<Value> items_;
  std::vector<std::pair<std::string, Value>> members_;
  std::vector<SourceLoc> key_locs_;
};

struct ParseOutcome {
  std::optional<Value> value;
  Diagnostics diagnostics;
};

inline constexpr std::size_t kMaxNestingDepth = 64;

/// Parses a whole document. On failure returns exactly one SYNTAX_ERROR
/// (or INVALID_UTF8 / NUMBER_OUT_OF_RANGE / DUPLICATE_KEY) diagnostic
/// tagged with `doc_path` and the offending line/column.
ParseOutcome parse(std::string_view doc, const std::string &doc_path);

/// Pretty-prints with two-space indentation. Arrays whose elements are all
/// scalars are written on one line. Doubles use the shortest representation
/// that reads back to the identical value.
std::string write(const Value &v);

/// Shortest round-trip decimal form of `d` (always finite input).
std::string format_double(double d);

}  // namespace mural2scene::text
