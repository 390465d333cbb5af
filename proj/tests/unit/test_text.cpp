#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "mural2scene/structured_text.hpp"

using namespace mural2scene;

TEST_CASE("comments and nesting parse with locations") {
  const std::string doc =
      "// header\n"
      "{\n"
      "  \"a\": 1, // trailing\n"
      "  \"b\": [true, null, \"x\\u00e9\"],\n"
      "  \"c\": {\"d\": -2.5e3}\n"
      "}\n";
  const auto r = text::parse(doc, "doc.scene");
  REQUIRE(r.value);
  const auto &v = *r.value;
  CHECK(v.kind() == text::Kind::Object);
  REQUIRE(v.find("a"));
  CHECK(v.find("a")->is_integer());
  CHECK(v.find("a")->as_int() == 1);
  CHECK(v.find("a")->loc().line == 3);
  CHECK(v.find("a")->loc().column == 8);
  const auto &b = *v.find("b");
  REQUIRE(b.items().size() == 3);
  CHECK(b.items()[2].as_string() == "x\xc3\xa9");
  CHECK(v.find("c")->find("d")->as_double() == -2500.0);
}

TEST_CASE("syntax errors carry one located diagnostic") {
  const auto r = text::parse("{\n  \"a\": 1,\n  \"b\" 2\n}", "bad.scene");
  CHECK_FALSE(r.value);
  REQUIRE(r.diagnostics.size() == 1);
  const auto &d = r.diagnostics[0];
  CHECK(d.code == "SYNTAX_ERROR");
  CHECK(d.path == "bad.scene");
  CHECK(d.loc.line == 3);
  CHECK(d.loc.column == 7);
}

TEST_CASE("duplicate keys are rejected") {
  const auto r = text::parse(R"({"a": 1, "a": 2})", "d");
  REQUIRE_FALSE(r.value);
  CHECK(r.diagnostics[0].code == "DUPLICATE_KEY");
}

TEST_CASE("out of range numbers and invalid UTF-8") {
  CHECK(text::parse("[1e999]", "n").diagnostics.at(0).code == "NUMBER_OUT_OF_RANGE");
  CHECK(text::parse("\"\xff\"", "u").diagnostics.at(0).code == "INVALID_UTF8");
}

TEST_CASE("nesting beyond the depth limit is an error, not a crash") {
  std::string deep(text::kMaxNestingDepth + 10, '[');
  deep += std::string(text::kMaxNestingDepth + 10, ']');
  const auto r = text::parse(deep, "deep");
  CHECK_FALSE(r.value);
  CHECK(r.diagnostics.size() == 1);
}

TEST_CASE("trailing garbage and empty input") {
  CHECK_FALSE(text::parse("{} x", "t").value);
  CHECK_FALSE(text::parse("", "t").value);
  CHECK_FALSE(text::parse("// only a comment\n", "t").value);
}

TEST_CASE("write then parse reproduces the tree") {
  auto obj = text::Value::object();
  obj.set("name", text::Value::string("quote\" and \\ and \n"));
  obj.set("n", text::Value::integer(-7));
  auto arr = text::Value::array();
  arr.push(text::Value::number(0.1));
  arr.push(text::Value::boolean(false));
  arr.push(text::Value::null());
  obj.set("arr", arr);
  const std::string out = text::write(obj);
  const auto r = text::parse(out, "w");
  REQUIRE(r.value);
  CHECK(text::write(*r.value) == out);
  CHECK(r.value->find("name")->as_string() == "quote\" and \\ and \n");
  CHECK(r.value->find("arr")->items()[0].as_double() == 0.1);
}

TEST_CASE("format_double is shortest and exact") {
  CHECK(text::format_double(0.1) == "0.1");
  CHECK(text::format_double(-3.0) == "-3.0");
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double d = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const auto r = text::parse(text::format_double(d), "f");
    REQUIRE(r.value);
    CHECK(r.value->as_double() == d);
  }
}
