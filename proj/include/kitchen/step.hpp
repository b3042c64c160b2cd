#pragma once

#include <utility>

#include "kitchen/state.hpp"

namespace kitchen {

struct StepResult {
  double team_reward = 0.0;
  int soups_delivered = 0;
  // Each agent's own shaped contribution (already scaled); their sum plus
  // the delivery term equals team_reward.
  std::array<double, 2> shaped{0.0, 0.0};
};

// Simultaneous-move transition, applied in place. Order within a step:
// pot cook ticks, then movement resolution, then interactions (agent 0
// first), then the timestep increment. Pure given (state, actions, scale).
inline StepResult step_in_place(EnvState& s, std::array<Action, 2> actions,
                                double shaping_scale,
                                const RewardConfig& cfg = RewardConfig::dense()) {
  const Layout& layout = *s.layout;

  for (PotState& pot : s.pots)
    if (pot.cooking()) --pot.timer;

  // Movement: propose target cells, then resolve same-target and swap
  // conflicts by reverting both agents. Orientation updates even when the
  // move is blocked or reverted.
  std::array<Coord, 2> proposed;
  const std::array<Coord, 2> original{s.agents[0].pos, s.agents[1].pos};
  for (int i = 0; i < 2; ++i) {
    AgentState& a = s.agents[i];
    proposed[i] = a.pos;
    if (!is_move_action(actions[i])) continue;
    a.dir = action_direction(actions[i]);
    const Coord delta = direction_delta(a.dir);
    const Coord target{a.pos.row + delta.row, a.pos.col + delta.col};
    if (layout.in_bounds(target) && layout.at(target) == Tile::Floor)
      proposed[i] = target;
  }
  const bool same_target = proposed[0] == proposed[1];
  const bool swap = proposed[0] == original[1] && proposed[1] == original[0] &&
                    !(proposed[0] == original[0]);
  if (!same_target && !swap) {
    s.agents[0].pos = proposed[0];
    s.agents[1].pos = proposed[1];
  }

  int deliveries = 0;
  std::array<double, 2> shaped_raw{0.0, 0.0};
  for (int i = 0; i < 2; ++i) {
    if (actions[i] != Action::Interact) continue;
    AgentState& a = s.agents[i];
    const Coord delta = direction_delta(a.dir);
    const Coord face{a.pos.row + delta.row, a.pos.col + delta.col};
    if (!layout.in_bounds(face)) continue;
    switch (layout.at(face)) {
      case Tile::OnionPile:
        if (a.held == Item::Nothing) a.held = Item::Onion;
        break;
      case Tile::PlatePile:
        if (a.held == Item::Nothing) {
          a.held = Item::Plate;
          shaped_raw[i] += cfg.r_plate;
        }
        break;
      case Tile::Pot: {
        PotState& pot = s.pots[layout.pot_slot(face)];
        if (a.held == Item::Onion && pot.onions < 3 && !pot.cooking()) {
          a.held = Item::Nothing;
          ++pot.onions;
          shaped_raw[i] += cfg.r_onion;
          if (pot.onions == 3) pot.timer = kCookTime;
        } else if (a.held == Item::Plate && pot.ready()) {
          a.held = Item::Soup;  // plate consumed
          pot = PotState{};
          shaped_raw[i] += cfg.r_soup;
        }
        break;
      }
      case Tile::Delivery:
        if (a.held == Item::Soup) {
          a.held = Item::Nothing;
          ++deliveries;
        }
        break;
      case Tile::Wall: {
        Item& slot = s.counter_items[layout.cell_index(face)];
        if (a.held != Item::Nothing && slot == Item::Nothing) {
          slot = a.held;
          a.held = Item::Nothing;
        } else if (a.held == Item::Nothing && slot != Item::Nothing) {
          a.held = slot;
          slot = Item::Nothing;
        }
        break;
      }
      case Tile::Floor:
        break;
    }
  }

  ++s.t;
  StepResult out;
  out.soups_delivered = deliveries;
  out.shaped[0] = shaping_scale * shaped_raw[0];
  out.shaped[1] = shaping_scale * shaped_raw[1];
  out.team_reward = cfg.r_deliver * deliveries + out.shaped[0] + out.shaped[1];
  return out;
}

inline std::pair<EnvState, StepResult> step(
    const EnvState& state, std::array<Action, 2> actions, double shaping_scale,
    const RewardConfig& cfg = RewardConfig::dense()) {
  EnvState next = state;
  StepResult r = step_in_place(next, actions, shaping_scale, cfg);
  return {std::move(next), r};
}

}  // namespace kitchen
