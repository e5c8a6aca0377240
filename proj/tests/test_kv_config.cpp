#include <doctest.h>

#include <sstream>

#include "causal/errors.hpp"
#include "causal/kv_config.hpp"

using namespace causal;

namespace {

KeyValueConfig parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, "test");
}

}  // namespace

TEST_CASE("parse key-value text") {
  const auto kv = parse("# comment\n d_H_bar = 0.056 \n\nname=pong # trailing\nlist = 1, 2,3\n");
  CHECK(kv.get_double("d_H_bar") == 0.056);
  CHECK(kv.get("name") == "pong");
  CHECK(kv.get_doubles("list") == std::vector<double>{1, 2, 3});
  CHECK(kv.get_double("missing", 7.5) == 7.5);
  CHECK(kv.get_int("missing", -3) == -3);
}

TEST_CASE("typed getters reject malformed values") {
  const auto kv = parse("a = 1.5x\nb = 2.5\nc = maybe\nd = -1\ne = 1,,2\n");
  CHECK_THROWS_AS(kv.get_double("a"), ConfigError);
  CHECK_THROWS_AS(kv.get_int("b", 0), ConfigError);
  CHECK_THROWS_AS(kv.get_bool("c", false), ConfigError);
  CHECK_THROWS_AS(kv.get_uint("d", 0), ConfigError);
  CHECK_THROWS_AS(kv.get_doubles("e"), ConfigError);
  CHECK_THROWS_AS(kv.get("zzz"), ConfigError);
}

TEST_CASE("syntax errors") {
  CHECK_THROWS_AS(parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse("= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("unknown keys are rejected") {
  const auto kv = parse("a = 1\nb = 2\n");
  CHECK_NOTHROW(kv.reject_unknown({"a", "b", "c"}));
  CHECK_THROWS_AS(kv.reject_unknown({"a"}), ConfigError);
}

TEST_CASE("write then parse preserves every double exactly") {
  KeyValueConfig kv;
  const std::vector<double> values{0.1, 1.0 / 3.0, -0.017, 1e-300, 123456789.125, 5e-324};
  for (std::size_t i = 0; i < values.size(); ++i) kv.set("v" + std::to_string(i), values[i]);
  kv.set("n", std::int64_t{-42});
  std::stringstream io;
  kv.write(io);
  const auto back = KeyValueConfig::parse(io);
  for (std::size_t i = 0; i < values.size(); ++i) {
    CHECK(back.get_double("v" + std::to_string(i)) == values[i]);
  }
  CHECK(back.get_int("n", 0) == -42);
}

TEST_CASE("missing file is an I/O error") {
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/params.cfg"), IoError);
}
