#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "kitchen/estimator.hpp"
#include "kitchen/layout.hpp"
#include "kitchen/rng.hpp"
#include "kitchen/validator.hpp"

namespace kitchen {

struct GenerationError : Error {
  using Error::Error;
};

struct GenParams {
  std::uint64_t seed = 0;
  int h_min = 6, h_max = 7;
  int w_min = 6, w_max = 7;
  double wall_density = 0.15;
  int n_agents = 2;
  int max_attempts = 2000;
};

struct DifficultyPreset {
  int level = 1;
  int side_min = 6, side_max = 7;
  double wall_density = 0.15;

  // L1: sides 6-7, 15% obstacles. L2: 8-9, 25%. L3: 10-11, 35%.
  static DifficultyPreset for_level(int level) {
    switch (level) {
      case 1: return {1, 6, 7, 0.15};
      case 2: return {2, 8, 9, 0.25};
      case 3: return {3, 10, 11, 0.35};
      default: throw Error("difficulty level must be 1, 2 or 3");
    }
  }

  GenParams params(std::uint64_t seed) const {
    GenParams p;
    p.seed = seed;
    p.h_min = p.w_min = side_min;
    p.h_max = p.w_max = side_max;
    p.wall_density = wall_density;
    return p;
  }
};

struct GenOutcome {
  Layout layout;
  int attempts = 0;  // attempts consumed, including the successful one
};

namespace detail {

inline std::vector<std::pair<int, int>> floor_cells(
    const std::vector<std::string>& grid) {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < static_cast<int>(grid.size()); ++r)
    for (int c = 0; c < static_cast<int>(grid[r].size()); ++c)
      if (grid[r][c] == ' ') out.emplace_back(r, c);
  return out;
}

inline int floor_neighbours(const std::vector<std::string>& grid, int r, int c,
                            int skip_r, int skip_c) {
  const int h = static_cast<int>(grid.size());
  const int w = static_cast<int>(grid[0].size());
  int n = 0;
  for (auto [dr, dc] : kDirs4) {
    const int nr = r + dr, nc = c + dc;
    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
    if (nr == skip_r && nc == skip_c) continue;
    if (grid[nr][nc] == ' ' || grid[nr][nc] == 'A') ++n;
  }
  return n;
}

// Occupying (r,c) must not strand a neighbouring station, and a station
// itself needs a walkable neighbour to be usable at all.
inline bool placement_keeps_access(const std::vector<std::string>& grid, int r,
                                   int c, bool needs_access) {
  if (needs_access && floor_neighbours(grid, r, c, -1, -1) == 0) return false;
  const int h = static_cast<int>(grid.size());
  const int w = static_cast<int>(grid[0].size());
  for (auto [dr, dc] : kDirs4) {
    const int nr = r + dr, nc = c + dc;
    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
    if (is_interactive_char(grid[nr][nc]) &&
        floor_neighbours(grid, nr, nc, r, c) == 0)
      return false;
  }
  return true;
}

// True when turning (r,c) into an obstacle leaves the remaining floor cells
// in a single connected component.
inline bool placement_keeps_connectivity(const std::vector<std::string>& grid,
                                         int r, int c) {
  const int h = static_cast<int>(grid.size());
  const int w = static_cast<int>(grid[0].size());
  int floor_count = 0;
  std::pair<int, int> start{-1, -1};
  for (int rr = 0; rr < h; ++rr)
    for (int cc = 0; cc < w; ++cc) {
      if (grid[rr][cc] != ' ' || (rr == r && cc == c)) continue;
      ++floor_count;
      start = {rr, cc};
    }
  if (floor_count == 0) return true;
  std::vector<bool> seen(static_cast<std::size_t>(h) * w, false);
  std::vector<std::pair<int, int>> queue{start};
  seen[static_cast<std::size_t>(start.first) * w + start.second] = true;
  int reached = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [qr, qc] = queue[head];
    for (auto [dr, dc] : kDirs4) {
      const int nr = qr + dr, nc = qc + dc;
      if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
      if (grid[nr][nc] != ' ' || (nr == r && nc == c)) continue;
      const std::size_t idx = static_cast<std::size_t>(nr) * w + nc;
      if (seen[idx]) continue;
      seen[idx] = true;
      ++reached;
      queue.emplace_back(nr, nc);
    }
  }
  return reached == floor_count;
}

// Stamp `count` copies of `sym` on uniformly drawn floor cells that keep
// every placed station locally usable. Stations additionally must not
// fragment the floor; density walls may. False when no candidate survives.
inline bool place_random(std::vector<std::string>& grid, char sym, int count,
                         Rng& rng) {
  const bool is_station = is_interactive_char(sym);
  const bool is_obstacle = is_station || sym == 'W';
  for (int i = 0; i < count; ++i) {
    std::vector<std::pair<int, int>> candidates;
    for (const auto& [r, c] : floor_cells(grid)) {
      if (is_obstacle && !placement_keeps_access(grid, r, c, is_station)) continue;
      if (is_station && !placement_keeps_connectivity(grid, r, c)) continue;
      candidates.emplace_back(r, c);
    }
    if (candidates.empty()) return false;
    const auto [r, c] =
        candidates[rng.uniform_int(0, static_cast<int>(candidates.size()) - 1)];
    grid[r][c] = sym;
  }
  return true;
}

// Floor connectivity summary of an agent-free grid: per-component cells,
// touched station families, and which component pairs share a hand-off wall.
struct FloorComponents {
  std::vector<std::vector<std::pair<int, int>>> cells;
  std::vector<int> family_mask;        // bit per family in "XOBP" order
  std::vector<std::vector<bool>> bridged;
  std::vector<int> component_of;       // per cell index, -1 for non-floor
};

inline int family_bit(char ch) {
  switch (ch) {
    case 'X': return 1;
    case 'O': return 2;
    case 'B': return 4;
    case 'P': return 8;
  }
  return 0;
}

inline FloorComponents analyze_floor(const std::vector<std::string>& grid) {
  const int h = static_cast<int>(grid.size());
  const int w = static_cast<int>(grid[0].size());
  FloorComponents fc;
  fc.component_of.assign(static_cast<std::size_t>(h) * w, -1);

  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (grid[r][c] != ' ' || fc.component_of[static_cast<std::size_t>(r) * w + c] >= 0)
        continue;
      const int id = static_cast<int>(fc.cells.size());
      fc.cells.emplace_back();
      fc.family_mask.push_back(0);
      std::vector<std::pair<int, int>> queue{{r, c}};
      fc.component_of[static_cast<std::size_t>(r) * w + c] = id;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto [qr, qc] = queue[head];
        fc.cells[id].emplace_back(qr, qc);
        for (auto [dr, dc] : kDirs4) {
          const int nr = qr + dr, nc = qc + dc;
          if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
          const char ch = grid[nr][nc];
          if (is_interactive_char(ch)) fc.family_mask[id] |= family_bit(ch);
          if (ch != ' ') continue;
          const std::size_t idx = static_cast<std::size_t>(nr) * w + nc;
          if (fc.component_of[idx] >= 0) continue;
          fc.component_of[idx] = id;
          queue.emplace_back(nr, nc);
        }
      }
    }

  const int k = static_cast<int>(fc.cells.size());
  fc.bridged.assign(k, std::vector<bool>(k, false));
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (grid[r][c] != 'W') continue;
      int touched[4], n = 0;
      for (auto [dr, dc] : kDirs4) {
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
        const int id = fc.component_of[static_cast<std::size_t>(nr) * w + nc];
        if (id >= 0) touched[n++] = id;
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) fc.bridged[touched[i]][touched[j]] = true;
    }
  return fc;
}

// Replace floor cells unreachable from every agent with walls, then demote
// stations that lost all reachable neighbours.
inline void prune_unreachable(std::vector<std::string>& grid) {
  CharGrid g;
  g.rows = grid;
  g.h = static_cast<int>(grid.size());
  g.w = static_cast<int>(grid[0].size());
  std::vector<bool> reach(static_cast<std::size_t>(g.h) * g.w, false);
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c)
      if (g.at(r, c) == 'A') {
        const auto part = flood_from(g, r, c);
        for (std::size_t i = 0; i < part.size(); ++i)
          if (part[i]) reach[i] = true;
      }
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * g.w + c;
      const char ch = grid[r][c];
      if (ch == ' ' && !reach[idx]) grid[r][c] = 'W';
      if (is_interactive_char(ch)) {
        bool touched = false;
        for (auto [dr, dc] : kDirs4) {
          const int nr = r + dr, nc = c + dc;
          if (g.in_bounds(nr, nc) && reach[static_cast<std::size_t>(nr) * g.w + nc])
            touched = true;
        }
        if (!touched) grid[r][c] = 'W';
      }
    }
}

}  // namespace detail

// Seeded kitchen generation with a retry loop. Each attempt: draw size,
// stamp stations with multiplicity 1-2 (skipping cells that would strand a
// station), top up walls to the density target, place agents, validate,
// prune unreachable tiles, re-validate. Agent placement is redrawn up to 20
// times within an attempt before the attempt itself is abandoned.
inline GenOutcome generate_layout_detailed(const GenParams& params) {
  if (params.h_min < 4 || params.w_min < 4)
    throw GenerationError("layout sides must be at least 4");
  if (params.h_max < params.h_min || params.w_max < params.w_min)
    throw GenerationError("invalid size range");
  if (params.wall_density < 0.0 || params.wall_density >= 1.0)
    throw GenerationError("wall density must lie in [0, 1)");
  if (params.n_agents != 2)
    throw GenerationError("only two-agent kitchens are supported");
  if (params.max_attempts < 1) throw GenerationError("max_attempts must be >= 1");

  Rng rng(params.seed);
  for (int attempt = 1; attempt <= params.max_attempts; ++attempt) {
    const int h = rng.uniform_int(params.h_min, params.h_max);
    const int w = rng.uniform_int(params.w_min, params.w_max);

    std::vector<std::string> grid(static_cast<std::size_t>(h), std::string(w, ' '));
    for (int c = 0; c < w; ++c) grid[0][c] = grid[h - 1][c] = 'W';
    for (int r = 0; r < h; ++r) grid[r][0] = grid[r][w - 1] = 'W';

    bool ok = true;
    for (char sym : {'X', 'P', 'O', 'B'}) {
      const int m = rng.uniform_int(1, 2);
      if (!detail::place_random(grid, sym, m, rng)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    int unpassable = 0;
    for (int r = 1; r < h - 1; ++r)
      for (int c = 1; c < w - 1; ++c)
        if (grid[r][c] != ' ') ++unpassable;
    const int n_target =
        static_cast<int>(std::llround(params.wall_density * (h - 2) * (w - 2)));
    const int n_add = std::max(0, n_target - unpassable);
    if (!detail::place_random(grid, 'W', n_add, rng)) continue;

    // Agents are drawn uniformly over the cell pairs that satisfy the
    // reachability rules, derived from the floor components of the fixed
    // station/wall geometry. Attempts whose geometry admits no valid pair
    // are abandoned.
    const detail::FloorComponents fc = detail::analyze_floor(grid);
    const int k = static_cast<int>(fc.cells.size());
    constexpr int kAllFamilies = 15;
    auto pair_valid = [&](int a, int b) {
      if (fc.cells[a].size() < 2 || fc.cells[b].size() < 2) return false;
      if ((fc.family_mask[a] | fc.family_mask[b]) != kAllFamilies) return false;
      if (a == b) return true;
      const bool bridge = fc.bridged[a][b];
      if (fc.family_mask[a] == 0 && !bridge) return false;
      if (fc.family_mask[b] == 0 && !bridge) return false;
      if ((fc.family_mask[a] != kAllFamilies || fc.family_mask[b] != kAllFamilies) &&
          !bridge)
        return false;
      return true;
    };

    std::uint64_t total_pairs = 0;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        if (!pair_valid(a, b)) continue;
        const std::uint64_t na = fc.cells[a].size(), nb = fc.cells[b].size();
        total_pairs += (a == b) ? na * (nb - 1) : na * nb;
      }
    if (total_pairs == 0) continue;

    std::uint64_t pick = rng.uniform_u64(0, total_pairs - 1);
    std::vector<std::string> placed = grid;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if (!pair_valid(a, b)) continue;
        const std::uint64_t na = fc.cells[a].size(), nb = fc.cells[b].size();
        const std::uint64_t count = (a == b) ? na * (nb - 1) : na * nb;
        if (pick >= count) {
          pick -= count;
          continue;
        }
        const std::uint64_t ia = pick / ((a == b) ? nb - 1 : nb);
        std::uint64_t ib = pick % ((a == b) ? nb - 1 : nb);
        if (a == b && ib >= ia) ++ib;  // skip agent 0's cell
        const auto [r0, c0] = fc.cells[a][static_cast<std::size_t>(ia)];
        const auto [r1, c1] = fc.cells[b][static_cast<std::size_t>(ib)];
        placed[r0][c0] = 'A';
        placed[r1][c1] = 'A';
        a = k;
        break;
      }
    }

    std::string text;
    for (int r = 0; r < h; ++r) {
      if (r > 0) text.push_back('\n');
      text += placed[r];
    }
    if (!validate_text(text).accepted) continue;

    detail::prune_unreachable(placed);
    std::string pruned;
    for (int r = 0; r < h; ++r) {
      if (r > 0) pruned.push_back('\n');
      pruned += placed[r];
    }
    if (!validate_text(pruned).accepted) continue;

    char name[32];
    std::snprintf(name, sizeof name, "gen-%016llx",
                  static_cast<unsigned long long>(params.seed));
    return {parse_layout(pruned, name), attempt};
  }
  throw GenerationError("layout generation failed after " +
                        std::to_string(params.max_attempts) + " attempts");
}

inline Layout generate_layout(const GenParams& params) {
  return generate_layout_detailed(params).layout;
}

struct TaskSpec {
  Layout layout;
  std::uint64_t seed = 0;  // child seed that produced the layout
};

struct TaskSequence {
  std::uint64_t master_seed = 0;
  int level = 0;
  std::vector<TaskSpec> tasks;
};

// Deterministic curriculum: the k-th generation draw uses child seed
// derive_seed(master, k). Duplicate layout texts are re-drawn, and layouts
// without a finite single-agent cycle bound are skipped so every task can
// be score-normalized.
inline TaskSequence make_sequence(std::uint64_t master_seed,
                                  const DifficultyPreset& preset, int n_tasks,
                                  int horizon = kDefaultHorizon) {
  if (n_tasks < 1) throw GenerationError("a sequence needs at least one task");
  TaskSequence seq;
  seq.master_seed = master_seed;
  seq.level = preset.level;

  std::set<std::string> used;
  std::uint64_t draw = 0;
  const std::uint64_t draw_budget = static_cast<std::uint64_t>(n_tasks) * 100;
  while (static_cast<int>(seq.tasks.size()) < n_tasks) {
    if (draw >= draw_budget)
      throw GenerationError("could not assemble " + std::to_string(n_tasks) +
                            " distinct tasks within the draw budget");
    const std::uint64_t child = derive_seed(master_seed, draw++);
    Layout layout = generate_layout(preset.params(child));
    const std::string text = serialize_layout(layout);
    if (used.contains(text)) continue;
    try {
      if (estimate_cycle(layout, horizon).n_max < 1) continue;
    } catch (const EstimationError&) {
      continue;
    }
    used.insert(text);
    seq.tasks.push_back({std::move(layout), child});
  }
  return seq;
}

}  // namespace kitchen
