#include <catch2/catch.hpp>

#include "kitchen/io.hpp"
#include "kitchen/rng.hpp"
#include "kitchen/validator.hpp"

using namespace kitchen;

namespace {

// Split kitchen: agent 0 owns the onion side, agent 1 the pot/plate/delivery
// side. The wall at (2,3) borders both regions and enables hand-offs.
const std::string kSplit =
    "WWWWWWW\n"
    "O  W  P\n"
    "W AW  W\n"
    "W  WA B\n"
    "W  W  X\n"
    "WWWWWWW";

Rule failed(const std::string& text) {
  const ValidationReport rep = validate_text(text);
  REQUIRE_FALSE(rep.accepted);
  return *rep.failed_rule;
}

}  // namespace

TEST_CASE("open kitchen with one of each station is accepted") {
  const std::string text =
      "WWWWPWW\n"
      "W     O\n"
      "W  A  W\n"
      "B     W\n"
      "W  A  W\n"
      "W     W\n"
      "WWWXWWW";
  const ValidationReport rep = validate_text(text);
  REQUIRE(rep.accepted);
  REQUIRE_FALSE(rep.failed_rule.has_value());
  // Both agents roam the whole 5x5 interior.
  REQUIRE(rep.reach[0].size() == 25);
  REQUIRE(rep.reach[1].size() == 25);
}

TEST_CASE("R1: ragged rows and unknown characters") {
  REQUIRE(failed("WWPWW\nOA AO\nW  W\nWBWXW") == Rule::R1);
  REQUIRE(failed("WWPWW\nOA?AO\nW   W\nWBWXW") == Rule::R1);
  REQUIRE(failed("") == Rule::R1);
}

TEST_CASE("R2: every required symbol must appear") {
  REQUIRE(failed("WWW\nWAW\nWWW") == Rule::R2);            // missing X O B P + one A
  REQUIRE(failed("WWPWW\nOA AO\nW   W\nWBWWW") == Rule::R2);  // no delivery
  REQUIRE(failed("WWPWW\nWA AW\nW   W\nWBWXW") == Rule::R2);  // no onion pile
  REQUIRE(failed("WWPWW\nOA AO\nW   W\nWWWXW") == Rule::R2);  // no plate pile
  REQUIRE(failed("WWWWW\nOA AO\nW   W\nWBWXW") == Rule::R2);  // no pot
  REQUIRE(failed("XXPXX\nOA AO\nX   X\nXBXXX") == Rule::R2);  // no wall
  REQUIRE(failed("WWPWW\nOAAAO\nW   W\nWBWXW") == Rule::R2);  // three agents
  REQUIRE(failed("WWPWW\nOA  O\nW   W\nWBWXW") == Rule::R2);  // one agent
}

TEST_CASE("R3: border integrity") {
  REQUIRE(failed("WWPW \nOA AO\nW   W\nWBWXW") == Rule::R3);
}

TEST_CASE("R4: walled-in stations and agents") {
  // Pot fully enclosed by walls.
  REQUIRE(failed("WWWWWW\nOA AOW\nW   WW\nWBWXWW\nWWWWPW\nWWWWWW") == Rule::R4);
  // Agent sealed into a wall pocket.
  REQUIRE(failed("WWPWWWW\nOA  OWW\nW   WWW\nWBWXWAW\nWWWWWWW") == Rule::R4);
}

TEST_CASE("R5-R7: station families must be adjacent to some reach region") {
  // Onion pile behind a wall pocket no agent can reach.
  REQUIRE(failed("WWPWWWW\n"
                 "WA AWWW\n"
                 "W   W O\n"
                 "WBWXW W\n"
                 "WWWWWWW") == Rule::R5);
  // Pot unreachable instead.
  REQUIRE(failed("WWOWWWW\n"
                 "WA AWWW\n"
                 "W   W P\n"
                 "WBWXW W\n"
                 "WWWWWWW") == Rule::R6);
  // Delivery unreachable.
  REQUIRE(failed("WWOWWWW\n"
                 "WA AWWW\n"
                 "W   W X\n"
                 "WBWPW W\n"
                 "WWWWWWW") == Rule::R7);
}

TEST_CASE("split kitchen: accepted through the shared hand-off counter") {
  const ValidationReport rep = validate_text(kSplit);
  REQUIRE(rep.accepted);
}

TEST_CASE("split kitchen: doubling the dividing wall severs the hand-off") {
  // Same fixture, one column wider with a second wall column: no wall cell
  // touches both regions.
  const std::string doubled =
      "WWWWWWWW\n"
      "O  WW  P\n"
      "W AWW  W\n"
      "W  WWA B\n"
      "W  WW  X\n"
      "WWWWWWWW";
  REQUIRE(failed(doubled) == Rule::R10);
}

TEST_CASE("R8: an agent with no station access and no shared wall is useless") {
  // Agent 1 lives in a two-cell pocket whose walls touch no cell of agent
  // 0's region: no direct interaction and no hand-off possible.
  const std::string text =
      "WWPWWWWWW\n"
      "OA  WWWWW\n"
      "W   WWWWW\n"
      "WBWXWW AW\n"
      "WWWWWWWWW";
  REQUIRE(failed(text) == Rule::R8);
}

TEST_CASE("validation is stable across a serialize round trip") {
  for (const std::string text :
       {kSplit, std::string("WWPWW\nOA AO\nW   W\nWBWXW")}) {
    const ValidationReport a = validate_text(text);
    const Layout layout = parse_layout(text);
    const ValidationReport b = validate_text(serialize_layout(layout));
    REQUIRE(a.accepted == b.accepted);
  }
}

TEST_CASE("removing an interior wall never flips R5-R7 back to fail") {
  const std::string base = kSplit;
  const ValidationReport before = validate_text(base);
  REQUIRE(before.accepted);

  const auto rows_before = detail::split_rows(base);
  for (std::size_t r = 1; r + 1 < rows_before.size(); ++r)
    for (std::size_t c = 1; c + 1 < rows_before[r].size(); ++c) {
      if (rows_before[r][c] != 'W') continue;
      auto rows = rows_before;
      rows[r][c] = ' ';
      std::string text;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) text += '\n';
        text += rows[i];
      }
      const ValidationReport rep = validate_text(text);
      if (!rep.accepted) {
        CAPTURE(r, c, rule_name(*rep.failed_rule));
        REQUIRE(*rep.failed_rule != Rule::R5);
        REQUIRE(*rep.failed_rule != Rule::R6);
        REQUIRE(*rep.failed_rule != Rule::R7);
      }
    }
}

TEST_CASE("wrong agent count maps to R2 even when otherwise playable") {
  REQUIRE(failed("WWPWW\nOA  O\nW   W\nWBWXW") == Rule::R2);
}
