#pragma once

#include <optional>
#include <vector>

#include "kitchen/layout.hpp"
#include "kitchen/state.hpp"

namespace kitchen {

struct EstimationError : Error {
  using Error::Error;
};

// Single-agent cook-deliver cycle estimate. Constants are fixed so that
// normalized scores stay comparable across runs: 20 cook steps, 9
// interactions at 2 steps each.
struct CycleEstimate {
  int d_onion = 0;
  int d_plate = 0;
  int d_goal = 0;
  int c_move = 0;
  int t_cycle = 0;
  int n_max = 0;
  int r_max = 0;
  int horizon = 0;
};

inline constexpr int kInteractionOverhead = 18;  // 9 interactions x 2 steps

// Walkable 4-neighbours of every tile of the family. Empty when the family
// is absent or fully enclosed.
inline std::vector<Coord> station_neighbourhood(const Layout& layout, Tile family) {
  std::vector<bool> mark(static_cast<std::size_t>(layout.cell_count()), false);
  std::vector<Coord> out;
  for (const Coord& cc : layout.cells_of(family)) {
    const Coord candidates[4] = {{cc.row - 1, cc.col},
                                 {cc.row + 1, cc.col},
                                 {cc.row, cc.col - 1},
                                 {cc.row, cc.col + 1}};
    for (const Coord& n : candidates) {
      if (!layout.in_bounds(n) || layout.at(n) != Tile::Floor) continue;
      const int idx = layout.cell_index(n);
      if (!mark[idx]) {
        mark[idx] = true;
        out.push_back(n);
      }
    }
  }
  return out;
}

// Shortest walkable path length between any a in A and b in B via
// multi-source breadth-first search; 0 when the sets intersect, nullopt
// when no path exists.
inline std::optional<int> set_distance(const Layout& layout,
                                       const std::vector<Coord>& from,
                                       const std::vector<Coord>& to) {
  if (from.empty() || to.empty()) return std::nullopt;
  const int n = layout.cell_count();
  std::vector<bool> target(static_cast<std::size_t>(n), false);
  for (const Coord& cc : to) target[layout.cell_index(cc)] = true;

  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<int> queue;
  queue.reserve(static_cast<std::size_t>(n));
  for (const Coord& cc : from) {
    const int idx = layout.cell_index(cc);
    if (dist[idx] < 0) {
      dist[idx] = 0;
      queue.push_back(idx);
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int idx = queue[head];
    if (target[idx]) return dist[idx];
    const int r = idx / layout.width(), c = idx % layout.width();
    const Coord neighbours[4] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const Coord& ncc : neighbours) {
      if (!layout.in_bounds(ncc) || layout.at(ncc) != Tile::Floor) continue;
      const int nidx = layout.cell_index(ncc);
      if (dist[nidx] < 0) {
        dist[nidx] = dist[idx] + 1;
        queue.push_back(nidx);
      }
    }
  }
  return std::nullopt;
}

inline CycleEstimate estimate_cycle(const Layout& layout, int horizon = kDefaultHorizon) {
  const auto onions = station_neighbourhood(layout, Tile::OnionPile);
  const auto plates = station_neighbourhood(layout, Tile::PlatePile);
  const auto pots = station_neighbourhood(layout, Tile::Pot);
  const auto goals = station_neighbourhood(layout, Tile::Delivery);

  const auto d_onion = set_distance(layout, onions, pots);
  const auto d_plate = set_distance(layout, plates, pots);
  const auto d_goal = set_distance(layout, pots, goals);
  if (!d_onion || !d_plate || !d_goal)
    throw EstimationError("no single-agent cook-deliver path in layout '" +
                          layout.name() + "'");

  CycleEstimate est;
  est.horizon = horizon;
  est.d_onion = *d_onion;
  est.d_plate = *d_plate;
  est.d_goal = *d_goal;
  est.c_move = 3 * est.d_onion + est.d_plate + 1 + est.d_goal + 3;
  est.t_cycle = est.c_move + kCookTime + kInteractionOverhead;
  est.n_max = horizon / est.t_cycle;
  est.r_max = 20 * est.n_max;
  return est;
}

// Soups delivered relative to the single-agent bound; may exceed 1 when the
// team outperforms the solo estimate.
inline double normalize_score(double soups_delivered, const CycleEstimate& est) {
  if (est.n_max < 1)
    throw EstimationError("normalization undefined: layout bound is zero soups");
  return soups_delivered / static_cast<double>(est.n_max);
}

}  // namespace kitchen
