#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kitchen/layout.hpp"

namespace kitchen {

enum class Rule { R1 = 1, R2, R3, R4, R5, R6, R7, R8, R9, R10 };

inline std::string rule_name(Rule r) {
  return "R" + std::to_string(static_cast<int>(r));
}

struct ValidationReport {
  bool accepted = false;
  std::optional<Rule> failed_rule;
  // Cells reachable from each agent start (floor and agent cells only).
  std::array<std::vector<Coord>, 2> reach;
};

namespace detail {

struct CharGrid {
  std::vector<std::string> rows;
  int h = 0, w = 0;
  char at(int r, int c) const { return rows[r][c]; }
  bool in_bounds(int r, int c) const { return r >= 0 && r < h && c >= 0 && c < w; }
};

inline constexpr std::array<std::pair<int, int>, 4> kDirs4{
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

inline bool is_walkable_char(char ch) { return ch == ' ' || ch == 'A'; }
inline bool is_interactive_char(char ch) {
  return ch == 'X' || ch == 'O' || ch == 'B' || ch == 'P';
}

// Iterative breadth-first flood fill over floor/agent cells.
inline std::vector<bool> flood_from(const CharGrid& g, int r0, int c0) {
  std::vector<bool> seen(static_cast<std::size_t>(g.h) * g.w, false);
  std::vector<std::pair<int, int>> queue{{r0, c0}};
  seen[static_cast<std::size_t>(r0) * g.w + c0] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto [r, c] = queue[head];
    for (auto [dr, dc] : kDirs4) {
      const int nr = r + dr, nc = c + dc;
      if (!g.in_bounds(nr, nc)) continue;
      const std::size_t idx = static_cast<std::size_t>(nr) * g.w + nc;
      if (seen[idx] || !is_walkable_char(g.at(nr, nc))) continue;
      seen[idx] = true;
      queue.emplace_back(nr, nc);
    }
  }
  return seen;
}


inline bool reach_touches(const CharGrid& g, const std::vector<bool>& reach,
                          char family) {
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      if (g.at(r, c) != family) continue;
      for (auto [dr, dc] : kDirs4) {
        const int nr = r + dr, nc = c + dc;
        if (g.in_bounds(nr, nc) && reach[static_cast<std::size_t>(nr) * g.w + nc])
          return true;
      }
    }
  return false;
}

inline bool wall_adjacent_to(const CharGrid& g, int r, int c,
                             const std::vector<bool>& reach) {
  for (auto [dr, dc] : kDirs4) {
    const int nr = r + dr, nc = c + dc;
    if (g.in_bounds(nr, nc) && reach[static_cast<std::size_t>(nr) * g.w + nc])
      return true;
  }
  return false;
}

// A plain wall cell bordering both reach regions, usable for item hand-offs.
inline bool handoff_wall_exists(const CharGrid& g, const std::vector<bool>& r1,
                                const std::vector<bool>& r2) {
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c)
      if (g.at(r, c) == 'W' && wall_adjacent_to(g, r, c, r1) &&
          wall_adjacent_to(g, r, c, r2))
        return true;
  return false;
}

}  // namespace detail

// Ten-rule solvability check over raw grid text. Rules are evaluated in
// order and the first failure is reported:
//   R1 rectangular grid of known characters
//   R2 every required symbol present, exactly two agents
//   R3 border cells are walls or stations
//   R4 every station/agent has a walkable 4-neighbour
//   R5/R6/R7 onion pile, pot, delivery each touched by some agent's region
//   R8 each agent interacts directly or borders a shared hand-off wall
//   R9 the union of reach regions touches every station family
//   R10 an agent missing some family requires a hand-off wall bridging
//       both regions
inline ValidationReport validate_text(std::string_view text) {
  ValidationReport report;
  auto fail = [&](Rule r) {
    report.accepted = false;
    report.failed_rule = r;
    return report;
  };

  detail::CharGrid g;
  g.rows = detail::split_rows(text);
  if (g.rows.empty() || g.rows[0].empty()) return fail(Rule::R1);
  g.h = static_cast<int>(g.rows.size());
  g.w = static_cast<int>(g.rows[0].size());

  // R1: rectangularity and character set.
  for (const std::string& row : g.rows) {
    if (static_cast<int>(row.size()) != g.w) return fail(Rule::R1);
    for (char ch : row)
      if (ch != ' ' && ch != 'W' && ch != 'X' && ch != 'O' && ch != 'B' &&
          ch != 'P' && ch != 'A')
        return fail(Rule::R1);
  }

  // R2: required symbols, two agents.
  int counts[128] = {0};
  for (const std::string& row : g.rows)
    for (char ch : row) ++counts[static_cast<unsigned char>(ch)];
  for (char required : {'W', 'X', 'O', 'B', 'P', 'A'})
    if (counts[static_cast<unsigned char>(required)] == 0) return fail(Rule::R2);
  if (counts[static_cast<unsigned char>('A')] != 2) return fail(Rule::R2);

  // R3: border integrity.
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      if (r != 0 && r != g.h - 1 && c != 0 && c != g.w - 1) continue;
      const char ch = g.at(r, c);
      if (ch != 'W' && !detail::is_interactive_char(ch)) return fail(Rule::R3);
    }

  // R4: interactivity access.
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) {
      const char ch = g.at(r, c);
      if (!detail::is_interactive_char(ch) && ch != 'A') continue;
      bool ok = false;
      for (auto [dr, dc] : detail::kDirs4) {
        const int nr = r + dr, nc = c + dc;
        if (g.in_bounds(nr, nc) && detail::is_walkable_char(g.at(nr, nc))) ok = true;
      }
      if (!ok) return fail(Rule::R4);
    }

  // Reach regions.
  std::vector<std::pair<int, int>> agents;
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c)
      if (g.at(r, c) == 'A') agents.emplace_back(r, c);
  const auto reach1 = detail::flood_from(g, agents[0].first, agents[0].second);
  const auto reach2 = detail::flood_from(g, agents[1].first, agents[1].second);
  std::vector<bool> reach_union(reach1.size());
  for (std::size_t i = 0; i < reach1.size(); ++i)
    reach_union[i] = reach1[i] || reach2[i];

  for (int k = 0; k < 2; ++k) {
    const auto& reach = (k == 0) ? reach1 : reach2;
    for (int r = 0; r < g.h; ++r)
      for (int c = 0; c < g.w; ++c)
        if (reach[static_cast<std::size_t>(r) * g.w + c])
          report.reach[k].push_back({r, c});
  }

  if (!detail::reach_touches(g, reach_union, 'O')) return fail(Rule::R5);
  if (!detail::reach_touches(g, reach_union, 'P')) return fail(Rule::R6);
  if (!detail::reach_touches(g, reach_union, 'X')) return fail(Rule::R7);

  // R8: agent usefulness.
  for (int k = 0; k < 2; ++k) {
    const auto& mine = (k == 0) ? reach1 : reach2;
    const auto& other = (k == 0) ? reach2 : reach1;
    bool direct = false;
    for (char family : {'X', 'O', 'B', 'P'})
      if (detail::reach_touches(g, mine, family)) direct = true;
    if (!direct && !detail::handoff_wall_exists(g, mine, other))
      return fail(Rule::R8);
  }

  // R9: family coverage by the union.
  for (char family : {'X', 'O', 'B', 'P'})
    if (!detail::reach_touches(g, reach_union, family)) return fail(Rule::R9);

  // R10: hand-off requirement when an agent cannot reach all families alone.
  bool someone_incomplete = false;
  for (int k = 0; k < 2; ++k) {
    const auto& mine = (k == 0) ? reach1 : reach2;
    for (char family : {'X', 'O', 'B', 'P'})
      if (!detail::reach_touches(g, mine, family)) someone_incomplete = true;
  }
  if (someone_incomplete && !detail::handoff_wall_exists(g, reach1, reach2))
    return fail(Rule::R10);

  report.accepted = true;
  return report;
}

inline ValidationReport validate(const Layout& layout) {
  return validate_text(serialize_layout(layout));
}

}  // namespace kitchen
