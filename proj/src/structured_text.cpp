#include "mural2scene/structured_text.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

namespace mural2scene::text {

const char *kind_name(Kind k) {
  switch (k) {
    case Kind::Null: return "null";
    case Kind::Bool: return "boolean";
    case Kind::Number: return "number";
    case Kind::String: return "string";
    case Kind::Array: return "array";
    case Kind::Object: return "object";
  }
  return "?";
}

Value Value::null() { return Value{}; }

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.bool_ = b;
  return v;
}

Value Value::number(double d) {
  Value v;
  v.kind_ = Kind::Number;
  v.number_ = d;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::Number;
  v.integral_ = true;
  v.int_ = i;
  v.number_ = static_cast<double>(i);
  return v;
}

Value Value::string(std::string s) {
  Value v;
  v.kind_ = Kind::String;
  v.string_ = std::move(s);
  return v;
}

Value Value::array() {
  Value v;
  v.kind_ = Kind::Array;
  return v;
}

Value Value::object() {
  Value v;
  v.kind_ = Kind::Object;
  return v;
}

const Value *Value::find(std::string_view key) const {
  for (const auto &[k, v] : members_) {
    if (k == key) return &v;
  }
  return nullptr;
}

Value &Value::set(std::string key, Value v, SourceLoc key_loc) {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i].first == key) {
      members_[i].second = std::move(v);
      key_locs_[i] = key_loc;
      return members_[i].second;
    }
  }
  members_.emplace_back(std::move(key), std::move(v));
  key_locs_.push_back(key_loc);
  return members_.back().second;
}

namespace {

/// Returns the byte offset of the first malformed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto n = s.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

class Parser {
 public:
  Parser(std::string_view doc, const std::string &path)
      : doc_(doc), path_(path) {}

  ParseOutcome run() {
    ParseOutcome out;
    const auto bad = find_invalid_utf8(doc_);
    if (bad != std::string_view::npos) {
      advance_to(bad);
      out.diagnostics.push_back(make_error(
          "INVALID_UTF8", "document is not valid UTF-8", path_, here()));
      return out;
    }
    // A leading byte-order mark is tolerated.
    if (doc_.substr(0, 3) == "\xEF\xBB\xBF") advance_to(3);

    skip_space();
    Value v;
    if (!parse_value(v, 0)) {
      out.diagnostics.push_back(std::move(error_));
      return out;
    }
    skip_space();
    if (!failed_ && pos_ < doc_.size()) {
      fail("SYNTAX_ERROR", "unexpected trailing content");
    }
    if (failed_) {
      out.diagnostics.push_back(std::move(error_));
      return out;
    }
    out.value = std::move(v);
    return out;
  }

 private:
  std::string_view doc_;
  const std::string &path_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  bool failed_ = false;
  Diagnostic error_;

  SourceLoc here() const { return SourceLoc{line_, col_}; }

  bool at_end() const { return pos_ >= doc_.size(); }
  char peek() const { return at_end() ? '\0' : doc_[pos_]; }

  void bump() {
    const auto c = static_cast<unsigned char>(doc_[pos_]);
    ++pos_;
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else if ((c & 0xC0) != 0x80) {
      // Columns count code points, not continuation bytes.
      ++col_;
    }
  }

  void advance_to(std::size_t target) {
    while (pos_ < target && pos_ < doc_.size()) bump();
  }

  bool fail(const char *code, std::string message) {
    return fail_at(code, std::move(message), here());
  }

  bool fail_at(const char *code, std::string message, SourceLoc loc) {
    if (!failed_) {
      failed_ = true;
      error_ = make_error(code, std::move(message), path_, loc);
    }
    return false;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        bump();
      } else if (c == '/' && pos_ + 1 < doc_.size() && doc_[pos_ + 1] == '/') {
        while (!at_end() && peek() != '\n') bump();
      } else {
        break;
      }
    }
  }

  bool expect(char c) {
    if (peek() != c) {
      if (at_end()) {
        return fail("SYNTAX_ERROR",
                    std::string("expected '") + c + "' but reached end of document");
      }
      return fail("SYNTAX_ERROR", std::string("expected '") + c + "'");
    }
    bump();
    return true;
  }

  bool parse_value(Value &out, std::size_t depth) {
    if (depth > kMaxNestingDepth) {
      return fail("SYNTAX_ERROR", "nesting deeper than " +
                                      std::to_string(kMaxNestingDepth) +
                                      " levels");
    }
    const SourceLoc start = here();
    if (at_end()) return fail("SYNTAX_ERROR", "unexpected end of document");
    const char c = peek();
    bool ok = false;
    if (c == '{') {
      ok = parse_object(out, depth);
    } else if (c == '[') {
      ok = parse_array(out, depth);
    } else if (c == '"') {
      std::string s;
      ok = parse_string(s);
      if (ok) out = Value::string(std::move(s));
    } else if (c == '-' || (c >= '0' && c <= '9')) {
      ok = parse_number(out);
    } else if (match_word("true")) {
      out = Value::boolean(true);
      ok = true;
    } else if (match_word("false")) {
      out = Value::boolean(false);
      ok = true;
    } else if (match_word("null")) {
      out = Value::null();
      ok = true;
    } else {
      return fail("SYNTAX_ERROR", "unexpected character");
    }
    if (ok) out.set_loc(start);
    return ok;
  }

  bool match_word(std::string_view w) {
    if (doc_.substr(pos_, w.size()) != w) return false;
    const auto after = pos_ + w.size();
    if (after < doc_.size()) {
      const char n = doc_[after];
      if ((n >= 'a' && n <= 'z') || (n >= 'A' && n <= 'Z') ||
          (n >= '0' && n <= '9') || n == '_') {
        return false;
      }
    }
    advance_to(after);
    return true;
  }

  bool parse_object(Value &out, std::size_t depth) {
    out = Value::object();
    bump();  // '{'
    skip_space();
    if (peek() == '}') {
      bump();
      return true;
    }
    while (true) {
      skip_space();
      if (peek() != '"') return fail("SYNTAX_ERROR", "expected a quoted key");
      const SourceLoc key_loc = here();
      std::string key;
      if (!parse_string(key)) return false;
      if (out.find(key) != nullptr) {
        return fail_at("DUPLICATE_KEY", "key \"" + key + "\" appears twice",
                       key_loc);
      }
      skip_space();
      if (!expect(':')) return false;
      skip_space();
      Value v;
      if (!parse_value(v, depth + 1)) return false;
      out.set(std::move(key), std::move(v), key_loc);
      skip_space();
      if (peek() == ',') {
        bump();
        continue;
      }
      if (peek() == '}') {
        bump();
        return true;
      }
      return fail("SYNTAX_ERROR", at_end() ? "unterminated object"
                                           : "expected ',' or '}'");
    }
  }

  bool parse_array(Value &out, std::size_t depth) {
    out = Value::array();
    bump();  // '['
    skip_space();
    if (peek() == ']') {
      bump();
      return true;
    }
    while (true) {
      skip_space();
      Value v;
      if (!parse_value(v, depth + 1)) return false;
      out.push(std::move(v));
      skip_space();
      if (peek() == ',') {
        bump();
        continue;
      }
      if (peek() == ']') {
        bump();
        return true;
      }
      return fail("SYNTAX_ERROR", at_end() ? "unterminated array"
                                           : "expected ',' or ']'");
    }
  }

  static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  bool read_hex4(std::uint32_t &cp) {
    cp = 0;
    for (int i = 0; i < 4; ++i) {
      const int h = at_end() ? -1 : hex_digit(peek());
      if (h < 0) return fail("SYNTAX_ERROR", "bad \\u escape");
      cp = cp * 16 + static_cast<std::uint32_t>(h);
      bump();
    }
    return true;
  }

  static void append_utf8(std::string &s, std::uint32_t cp) {
    if (cp < 0x80) {
      s += static_cast<char>(cp);
    } else if (cp < 0x800) {
      s += static_cast<char>(0xC0 | (cp >> 6));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      s += static_cast<char>(0xE0 | (cp >> 12));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      s += static_cast<char>(0xF0 | (cp >> 18));
      s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      s += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }

  bool parse_string(std::string &out) {
    bump();  // opening quote
    while (true) {
      if (at_end()) return fail("SYNTAX_ERROR", "unterminated string");
      const char c = peek();
      if (c == '"') {
        bump();
        return true;
      }
      if (static_cast<unsigned char>(c) < 0x20) {
        return fail("SYNTAX_ERROR", "control character inside string");
      }
      if (c != '\\') {
        out += c;
        bump();
        continue;
      }
      bump();
      if (at_end()) return fail("SYNTAX_ERROR", "unterminated string");
      const char e = peek();
      switch (e) {
        case '"': out += '"'; bump(); break;
        case '\\': out += '\\'; bump(); break;
        case '/': out += '/'; bump(); break;
        case 'b': out += '\b'; bump(); break;
        case 'f': out += '\f'; bump(); break;
        case 'n': out += '\n'; bump(); break;
        case 'r': out += '\r'; bump(); break;
        case 't': out += '\t'; bump(); break;
        case 'u': {
          bump();
          std::uint32_t cp = 0;
          if (!read_hex4(cp)) return false;
          if (cp >= 0xD800 && cp <= 0xDBFF) {
            if (doc_.substr(pos_, 2) != "\\u") {
              return fail("SYNTAX_ERROR", "unpaired surrogate escape");
            }
            bump();
            bump();
            std::uint32_t lo = 0;
            if (!read_hex4(lo)) return false;
            if (lo < 0xDC00 || lo > 0xDFFF) {
              return fail("SYNTAX_ERROR", "unpaired surrogate escape");
            }
            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
          } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
            return fail("SYNTAX_ERROR", "unpaired surrogate escape");
          }
          append_utf8(out, cp);
          break;
        }
        default:
          return fail("SYNTAX_ERROR", "unknown escape sequence");
      }
    }
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  bool parse_number(Value &out) {
    const SourceLoc start = here();
    const std::size_t begin = pos_;
    std::size_t i = pos_;
    const auto n = doc_.size();
    bool integral = true;
    if (i < n && doc_[i] == '-') ++i;
    if (i >= n || !is_digit(doc_[i])) {
      advance_to(i);
      return fail("SYNTAX_ERROR", "malformed number");
    }
    if (doc_[i] == '0') {
      ++i;
    } else {
      while (i < n && is_digit(doc_[i])) ++i;
    }
    if (i < n && doc_[i] == '.') {
      integral = false;
      ++i;
      if (i >= n || !is_digit(doc_[i])) {
        advance_to(i);
        return fail("SYNTAX_ERROR", "malformed number");
      }
      while (i < n && is_digit(doc_[i])) ++i;
    }
    if (i < n && (doc_[i] == 'e' || doc_[i] == 'E')) {
      integral = false;
      ++i;
      if (i < n && (doc_[i] == '+' || doc_[i] == '-')) ++i;
      if (i >= n || !is_digit(doc_[i])) {
        advance_to(i);
        return fail("SYNTAX_ERROR", "malformed number");
      }
      while (i < n && is_digit(doc_[i])) ++i;
    }
    const char *first = doc_.data() + begin;
    const char *last = doc_.data() + i;
    advance_to(i);

    if (integral) {
      std::int64_t iv = 0;
      const auto r = std::from_chars(first, last, iv);
      if (r.ec == std::errc{} && r.ptr == last) {
        out = Value::integer(iv);
        return true;
      }
      // Too large for int64: fall through and keep it as a real.
    }
    double d = 0.0;
    const auto r = std::from_chars(first, last, d);
    if (r.ec != std::errc{} || !std::isfinite(d)) {
      return fail_at("NUMBER_OUT_OF_RANGE", "number is out of range", start);
    }
    out = Value::number(d);
    return true;
  }
};

bool all_scalar(const Value &v) {
  for (const auto &item : v.items()) {
    if (item.kind() == Kind::Array || item.kind() == Kind::Object) return false;
  }
  return true;
}

void write_string(std::string &out, const std::string &s) {
  out += '"';
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (c < 0x20) {
          static const char *hex = "0123456789abcdef";
          out += "\\u00";
          out += hex[c >> 4];
          out += hex[c & 0xF];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

void write_value(std::string &out, const Value &v, int indent);

void write_scalar(std::string &out, const Value &v) {
  switch (v.kind()) {
    case Kind::Null: out += "null"; break;
    case Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Kind::Number:
      out += v.is_integer() ? std::to_string(v.as_int())
                            : format_double(v.as_double());
      break;
    case Kind::String: write_string(out, v.as_string()); break;
    default: break;
  }
}

void newline(std::string &out, int indent) {
  out += '\n';
  out.append(static_cast<std::size_t>(indent) * 2, ' ');
}

void write_value(std::string &out, const Value &v, int indent) {
  if (v.kind() == Kind::Array) {
    if (v.items().empty()) {
      out += "[]";
      return;
    }
    if (all_scalar(v)) {
      out += '[';
      for (std::size_t i = 0; i < v.items().size(); ++i) {
        if (i) out += ", ";
        write_scalar(out, v.items()[i]);
      }
      out += ']';
      return;
    }
    out += '[';
    for (std::size_t i = 0; i < v.items().size(); ++i) {
      if (i) out += ',';
      newline(out, indent + 1);
      write_value(out, v.items()[i], indent + 1);
    }
    newline(out, indent);
    out += ']';
    return;
  }
  if (v.kind() == Kind::Object) {
    if (v.members().empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto &[k, child] : v.members()) {
      if (!first) out += ',';
      first = false;
      newline(out, indent + 1);
      write_string(out, k);
      out += ": ";
      write_value(out, child, indent + 1);
    }
    newline(out, indent);
    out += '}';
    return;
  }
  write_scalar(out, v);
}

}  // namespace

ParseOutcome parse(std::string_view doc, const std::string &doc_path) {
  return Parser(doc, doc_path).run();
}

std::string format_double(double d) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), d);
  std::string s(buf, r.ptr);
  // Keep reals visibly real so integer-typed fields never accept them.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string write(const Value &v) {
  std::string out;
  write_value(out, v, 0);
  out += '\n';
  return out;
}

}  // namespace mural2scene::text
