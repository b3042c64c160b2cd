#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "kitchen/layout.hpp"

namespace kitchen {

enum class Direction : std::uint8_t { Up, Down, Left, Right };
enum class Item : std::uint8_t { Nothing, Onion, Plate, Soup };
enum class Action : std::uint8_t { Up, Down, Left, Right, Stay, Interact };

inline constexpr int kNumActions = 6;
inline constexpr int kCookTime = 20;
inline constexpr int kDefaultHorizon = 400;

constexpr Coord direction_delta(Direction d) {
  switch (d) {
    case Direction::Up: return {-1, 0};
    case Direction::Down: return {1, 0};
    case Direction::Left: return {0, -1};
    case Direction::Right: return {0, 1};
  }
  return {0, 0};
}

constexpr bool is_move_action(Action a) {
  return a == Action::Up || a == Action::Down || a == Action::Left ||
         a == Action::Right;
}

constexpr Direction action_direction(Action a) {
  return static_cast<Direction>(static_cast<std::uint8_t>(a));
}

struct AgentState {
  Coord pos;
  Direction dir = Direction::Up;
  Item held = Item::Nothing;
  friend bool operator==(const AgentState&, const AgentState&) = default;
};

// timer semantics: kIdleTimer while fewer than 3 onions are in the pot,
// 20..1 while cooking, 0 with 3 onions once the soup is ready.
struct PotState {
  static constexpr std::uint8_t kIdleTimer = 255;
  std::uint8_t onions = 0;
  std::uint8_t timer = kIdleTimer;

  bool cooking() const { return onions == 3 && timer > 0 && timer != kIdleTimer; }
  bool ready() const { return onions == 3 && timer == 0; }
  friend bool operator==(const PotState&, const PotState&) = default;
};

struct RewardConfig {
  double r_deliver = 20.0;
  double r_onion = 3.0;
  double r_plate = 3.0;
  double r_soup = 5.0;
  double shaping_horizon = 2.5e6;

  static RewardConfig dense() { return {}; }
  static RewardConfig sparse() { return {20.0, 0.0, 0.0, 0.0, 2.5e6}; }
};

// Dynamic episode state. Counter items live in a dense per-cell array (only
// wall cells ever hold one); pots mirror layout.pot_cells() by index.
struct EnvState {
  std::shared_ptr<const Layout> layout;
  std::array<AgentState, 2> agents;
  std::vector<PotState> pots;             // parallel to layout->pot_cells()
  std::vector<Item> counter_items;        // size layout->cell_count()
  int t = 0;

  friend bool operator==(const EnvState&, const EnvState&) = default;
};

inline EnvState reset(std::shared_ptr<const Layout> layout) {
  EnvState s;
  s.agents[0] = {layout->agent_starts()[0], Direction::Up, Item::Nothing};
  s.agents[1] = {layout->agent_starts()[1], Direction::Up, Item::Nothing};
  s.pots.assign(layout->pot_cells().size(), PotState{});
  s.counter_items.assign(static_cast<std::size_t>(layout->cell_count()),
                         Item::Nothing);
  s.t = 0;
  s.layout = std::move(layout);
  return s;
}

}  // namespace kitchen
