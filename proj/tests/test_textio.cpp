#include "qsatlink/textio.hpp"

#include "doctest.h"
#include "qsatlink/error.hpp"

using namespace qsatlink;

TEST_CASE("exact formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 6.5421e-7, 40.0000000000081, -2.5e9}) {
    auto s = textio::format_exact(v);
    CHECK(textio::parse_double(s, 0) == v);
  }
}

TEST_CASE("percent formatting uses two significant digits") {
  CHECK(textio::format_percent(14.0 / 214.0) == "6.5%");
  CHECK(textio::format_percent(0.5) == "50%");
  CHECK(textio::format_percent(0.0053) == "0.53%");
  CHECK(textio::format_percent(0.104) == "10%");
}

TEST_CASE("strict parsing rejects trailing junk") {
  CHECK(textio::parse_double(" 1.5 ", 3) == 1.5);
  CHECK_THROWS_AS(textio::parse_double("1.5x", 3), ParseError);
  CHECK_THROWS_AS(textio::parse_double("", 3), ParseError);
  CHECK_THROWS_AS(textio::parse_uint("-2", 3), ParseError);
  try {
    textio::parse_double("abc", 17);
    FAIL("expected throw");
  } catch (const ParseError& e) {
    CHECK(e.line() == 17);
  }
}

TEST_CASE("split keeps empty fields") {
  auto fields = textio::split("a,,b", ',');
  REQUIRE(fields.size() == 3);
  CHECK(fields[1].empty());
}
