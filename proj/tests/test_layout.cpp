#include <catch2/catch.hpp>

#include "kitchen/io.hpp"
#include "kitchen/layout.hpp"
#include "kitchen/validator.hpp"

using namespace kitchen;

namespace {
const std::string kSeven =
    "WWWWPWW\n"
    "W     O\n"
    "W  A  W\n"
    "B     W\n"
    "W  A  W\n"
    "W     W\n"
    "WWWXWWW";
}

TEST_CASE("hand-built 7x7 layout parses with the right dimensions") {
  const Layout layout = parse_layout(kSeven, "seven");
  REQUIRE(layout.width() == 7);
  REQUIRE(layout.height() == 7);
  REQUIRE(layout.name() == "seven");
  REQUIRE(layout.agent_starts()[0] == Coord{2, 3});
  REQUIRE(layout.agent_starts()[1] == Coord{4, 3});
  REQUIRE(layout.at(0, 4) == Tile::Pot);
  REQUIRE(layout.at(3, 0) == Tile::PlatePile);
  REQUIRE(layout.at(1, 6) == Tile::OnionPile);
  REQUIRE(layout.at(6, 3) == Tile::Delivery);
  REQUIRE(layout.cells_of(Tile::Pot).size() == 1);
}

TEST_CASE("serialize then parse is the identity on accepted text") {
  const auto texts = {kSeven, std::string("WWPWW\nOA AO\nW   W\nWBWXW")};
  for (const std::string& text : texts) {
    const Layout layout = parse_layout(text);
    REQUIRE(serialize_layout(layout) == text);
    const Layout again = parse_layout(serialize_layout(layout));
    REQUIRE(serialize_layout(again) == text);
  }
}

TEST_CASE("parse rejects malformed grids") {
  // Missing stations.
  REQUIRE_THROWS_AS(parse_layout("WWW\nWAW\nWWW"), ParseError);
  // Unknown character.
  REQUIRE_THROWS_AS(parse_layout("WWPWW\nOA ZO\nW   W\nWBWXW"), ParseError);
  // Non-rectangular.
  REQUIRE_THROWS_AS(parse_layout("WWPWW\nOA AO\nW  W\nWBWXW"), ParseError);
  // Wrong agent count.
  REQUIRE_THROWS_AS(parse_layout("WWPWW\nOA  O\nW   W\nWBWXW"), ParseError);
  REQUIRE_THROWS_AS(parse_layout("WWPWW\nOAAAO\nW   W\nWBWXW"), ParseError);
  // Floor on the border.
  REQUIRE_THROWS_AS(parse_layout("WWPW \nOA AO\nW   W\nWBWXW"), ParseError);
  // Empty input.
  REQUIRE_THROWS_AS(parse_layout(""), ParseError);
}

TEST_CASE("parse tolerates one trailing newline") {
  const Layout a = parse_layout(kSeven + "\n");
  REQUIRE(serialize_layout(a) == kSeven);
}

TEST_CASE("all five shipped classic layouts load and validate") {
  const char* names[] = {"cramped_room", "asymm_advantages", "coord_ring",
                         "forced_coord", "counter_circuit"};
  for (const char* name : names) {
    const Layout layout =
        load_layout_file(std::string(KITCHEN_DATA_DIR) + "/layouts/" + name + ".txt");
    CAPTURE(name);
    REQUIRE(layout.agent_starts()[0] != layout.agent_starts()[1]);
    REQUIRE(layout.at(layout.agent_starts()[0]) == Tile::Floor);
    REQUIRE(layout.at(layout.agent_starts()[1]) == Tile::Floor);
    const ValidationReport rep = validate(layout);
    REQUIRE(rep.accepted);
  }
}
