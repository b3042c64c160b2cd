#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "kitchen/state.hpp"

namespace kitchen {

// Fixed 26-channel feature grid, cell-major (row, col, channel). Channels:
//   0 self position            1 other position
//   2..5 self orientation one-hot (Up, Down, Left, Right)
//   6..9 other orientation one-hot
//   10 walls (padding cells included)
//   11 onion piles   12 plate piles   13 pots   14 delivery
//   15 pot onion count / 3
//   16 pot cook timer remaining / 20 (0 unless cooking)
//   17 pot ready
//   18 loose onion   19 loose plate   20 loose soup
//   21 held onion map   22 held plate map   23 held soup map
//   24 time remaining / horizon (real cells)
//   25 constant one (real cells)
inline constexpr int kObsChannels = 26;

struct ObsSpec {
  int pad_height = 0;
  int pad_width = 0;
  int horizon = kDefaultHorizon;

  int size() const { return pad_height * pad_width * kObsChannels; }
};

inline void encode_observation_into(const EnvState& s, int agent_index,
                                    const ObsSpec& spec, std::span<float> out) {
  const Layout& layout = *s.layout;
  if (spec.pad_height < layout.height() || spec.pad_width < layout.width())
    throw Error("observation padding smaller than layout");
  if (static_cast<int>(out.size()) != spec.size())
    throw Error("observation buffer size mismatch");

  const int W = spec.pad_width;
  auto at = [&](int r, int c, int ch) -> float& {
    return out[(static_cast<std::size_t>(r) * W + c) * kObsChannels + ch];
  };

  std::fill(out.begin(), out.end(), 0.0f);
  // Padding carries only the wall channel.
  for (int r = 0; r < spec.pad_height; ++r)
    for (int c = 0; c < spec.pad_width; ++c)
      if (r >= layout.height() || c >= layout.width()) at(r, c, 10) = 1.0f;

  const float time_left =
      static_cast<float>(spec.horizon - s.t) / static_cast<float>(spec.horizon);
  for (int r = 0; r < layout.height(); ++r)
    for (int c = 0; c < layout.width(); ++c) {
      switch (layout.at(r, c)) {
        case Tile::Wall: at(r, c, 10) = 1.0f; break;
        case Tile::OnionPile: at(r, c, 11) = 1.0f; break;
        case Tile::PlatePile: at(r, c, 12) = 1.0f; break;
        case Tile::Pot: at(r, c, 13) = 1.0f; break;
        case Tile::Delivery: at(r, c, 14) = 1.0f; break;
        case Tile::Floor: break;
      }
      at(r, c, 24) = time_left;
      at(r, c, 25) = 1.0f;
    }

  for (std::size_t i = 0; i < s.pots.size(); ++i) {
    const Coord cc = layout.pot_cells()[i];
    const PotState& pot = s.pots[i];
    at(cc.row, cc.col, 15) = static_cast<float>(pot.onions) / 3.0f;
    if (pot.cooking())
      at(cc.row, cc.col, 16) = static_cast<float>(pot.timer) / 20.0f;
    if (pot.ready()) at(cc.row, cc.col, 17) = 1.0f;
  }

  for (int r = 0; r < layout.height(); ++r)
    for (int c = 0; c < layout.width(); ++c) {
      switch (s.counter_items[layout.cell_index({r, c})]) {
        case Item::Onion: at(r, c, 18) = 1.0f; break;
        case Item::Plate: at(r, c, 19) = 1.0f; break;
        case Item::Soup: at(r, c, 20) = 1.0f; break;
        case Item::Nothing: break;
      }
    }

  for (int k = 0; k < 2; ++k) {
    const AgentState& a = s.agents[k];
    const bool self = (k == agent_index);
    at(a.pos.row, a.pos.col, self ? 0 : 1) = 1.0f;
    at(a.pos.row, a.pos.col, (self ? 2 : 6) + static_cast<int>(a.dir)) = 1.0f;
    switch (a.held) {
      case Item::Onion: at(a.pos.row, a.pos.col, 21) = 1.0f; break;
      case Item::Plate: at(a.pos.row, a.pos.col, 22) = 1.0f; break;
      case Item::Soup: at(a.pos.row, a.pos.col, 23) = 1.0f; break;
      case Item::Nothing: break;
    }
  }
}

inline std::vector<float> encode_observation(const EnvState& s, int agent_index,
                                             const ObsSpec& spec) {
  std::vector<float> out(static_cast<std::size_t>(spec.size()));
  encode_observation_into(s, agent_index, spec, out);
  return out;
}

}  // namespace kitchen
