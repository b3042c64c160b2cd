#include <catch2/catch.hpp>

#include "kitchen/observation.hpp"
#include "kitchen/step.hpp"

using namespace kitchen;

namespace {

std::shared_ptr<const Layout> five() {
  // Pot top, onion left, plate right, delivery bottom.
  return std::make_shared<const Layout>(
      parse_layout("WWPWW\nO A W\nW A W\nW   B\nWWXWW", "five"));
}

float at(const std::vector<float>& obs, const ObsSpec& spec, int r, int c, int ch) {
  return obs[(static_cast<std::size_t>(r) * spec.pad_width + c) * kObsChannels + ch];
}

}  // namespace

TEST_CASE("padding cells carry only the wall channel") {
  auto layout = five();
  const EnvState s = reset(layout);
  ObsSpec spec{11, 11, 400};
  const auto obs = encode_observation(s, 0, spec);
  REQUIRE(static_cast<int>(obs.size()) == 11 * 11 * 26);

  int padded_cells = 0;
  for (int r = 0; r < 11; ++r)
    for (int c = 0; c < 11; ++c) {
      if (r < 5 && c < 5) continue;
      ++padded_cells;
      REQUIRE(at(obs, spec, r, c, 10) == 1.0f);
      for (int ch = 0; ch < kObsChannels; ++ch)
        if (ch != 10) REQUIRE(at(obs, spec, r, c, ch) == 0.0f);
    }
  REQUIRE(padded_cells == 11 * 11 - 25);
}

TEST_CASE("static channels mark stations and the time plane") {
  auto layout = five();
  EnvState s = reset(layout);
  ObsSpec spec{5, 5, 400};
  auto obs = encode_observation(s, 0, spec);

  REQUIRE(at(obs, spec, 0, 2, 13) == 1.0f);  // pot
  REQUIRE(at(obs, spec, 1, 0, 11) == 1.0f);  // onion pile
  REQUIRE(at(obs, spec, 3, 4, 12) == 1.0f);  // plate pile
  REQUIRE(at(obs, spec, 4, 2, 14) == 1.0f);  // delivery
  REQUIRE(at(obs, spec, 0, 0, 10) == 1.0f);  // wall
  REQUIRE(at(obs, spec, 2, 2, 25) == 1.0f);  // constant plane
  REQUIRE(at(obs, spec, 2, 2, 24) == 1.0f);  // full time remaining at t=0

  step_in_place(s, {Action::Stay, Action::Stay}, 0.0);
  obs = encode_observation(s, 0, spec);
  REQUIRE(at(obs, spec, 2, 2, 24) == Approx(399.0f / 400.0f));
}

TEST_CASE("fresh state has all held-item and pot-progress channels zero") {
  auto layout = five();
  const EnvState s = reset(layout);
  ObsSpec spec{5, 5, 400};
  const auto obs = encode_observation(s, 0, spec);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      for (int ch : {15, 16, 17, 18, 19, 20, 21, 22, 23})
        REQUIRE(at(obs, spec, r, c, ch) == 0.0f);
}

TEST_CASE("dynamic channels track pots, holdings, and loose items") {
  auto layout = five();
  EnvState s = reset(layout);
  s.pots[0].onions = 2;
  s.agents[0].held = Item::Onion;
  s.agents[1].held = Item::Soup;
  s.counter_items[layout->cell_index({3, 0})] = Item::Plate;
  ObsSpec spec{5, 5, 400};
  const auto obs = encode_observation(s, 0, spec);

  REQUIRE(at(obs, spec, 0, 2, 15) == Approx(2.0f / 3.0f));
  REQUIRE(at(obs, spec, 0, 2, 16) == 0.0f);  // not cooking yet
  REQUIRE(at(obs, spec, 1, 2, 21) == 1.0f);  // agent 0 holds onion
  REQUIRE(at(obs, spec, 2, 2, 23) == 1.0f);  // agent 1 holds soup
  REQUIRE(at(obs, spec, 3, 0, 19) == 1.0f);  // loose plate on counter

  EnvState cooking = s;
  cooking.pots[0].onions = 3;
  cooking.pots[0].timer = 15;
  const auto obs2 = encode_observation(cooking, 0, spec);
  REQUIRE(at(obs2, spec, 0, 2, 16) == Approx(15.0f / 20.0f));
  REQUIRE(at(obs2, spec, 0, 2, 17) == 0.0f);

  cooking.pots[0].timer = 0;
  const auto obs3 = encode_observation(cooking, 0, spec);
  REQUIRE(at(obs3, spec, 0, 2, 17) == 1.0f);
  REQUIRE(at(obs3, spec, 0, 2, 16) == 0.0f);
}

TEST_CASE("the two agents' encodings differ exactly by the self/other swap") {
  auto layout = five();
  EnvState s = reset(layout);
  s.agents[0].dir = Direction::Left;
  s.agents[1].dir = Direction::Right;
  s.agents[0].held = Item::Plate;
  ObsSpec spec{5, 5, 400};
  const auto a = encode_observation(s, 0, spec);
  const auto b = encode_observation(s, 1, spec);

  auto swapped_channel = [](int ch) {
    if (ch == 0) return 1;
    if (ch == 1) return 0;
    if (ch >= 2 && ch <= 5) return ch + 4;
    if (ch >= 6 && ch <= 9) return ch - 4;
    return ch;
  };
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      for (int ch = 0; ch < kObsChannels; ++ch)
        REQUIRE(at(a, spec, r, c, ch) == at(b, spec, r, c, swapped_channel(ch)));

  // Orientation one-hots land at the agents' own cells.
  REQUIRE(at(a, spec, 1, 2, 2 + static_cast<int>(Direction::Left)) == 1.0f);
  REQUIRE(at(a, spec, 2, 2, 6 + static_cast<int>(Direction::Right)) == 1.0f);
}

TEST_CASE("padding smaller than the layout is rejected") {
  auto layout = five();
  const EnvState s = reset(layout);
  REQUIRE_THROWS_AS(encode_observation(s, 0, ObsSpec{4, 5, 400}), Error);
  REQUIRE_THROWS_AS(encode_observation(s, 0, ObsSpec{5, 4, 400}), Error);
}
