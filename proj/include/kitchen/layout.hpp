#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kitchen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

enum class Tile : std::uint8_t { Floor, Wall, OnionPile, PlatePile, Pot, Delivery };

constexpr char tile_char(Tile t) {
  switch (t) {
    case Tile::Floor: return ' ';
    case Tile::Wall: return 'W';
    case Tile::OnionPile: return 'O';
    case Tile::PlatePile: return 'B';
    case Tile::Pot: return 'P';
    case Tile::Delivery: return 'X';
  }
  return '?';
}

constexpr bool tile_passable(Tile t) { return t == Tile::Floor; }
constexpr bool tile_interactive(Tile t) {
  return t == Tile::OnionPile || t == Tile::PlatePile || t == Tile::Pot ||
         t == Tile::Delivery;
}

struct Coord {
  int row = 0;
  int col = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Immutable kitchen grid. Agent start cells are Floor in the grid; the 'A'
// marker only exists in the text form.
class Layout {
 public:
  Layout() = default;
  Layout(int height, int width, std::vector<Tile> grid,
         std::array<Coord, 2> agent_starts, std::string name)
      : height_(height),
        width_(width),
        grid_(std::move(grid)),
        agent_starts_(agent_starts),
        name_(std::move(name)) {
    index_stations();
  }

  int height() const { return height_; }
  int width() const { return width_; }
  const std::string& name() const { return name_; }
  const std::array<Coord, 2>& agent_starts() const { return agent_starts_; }

  bool in_bounds(Coord c) const {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  int cell_index(Coord c) const { return c.row * width_ + c.col; }
  Tile at(Coord c) const { return grid_[cell_index(c)]; }
  Tile at(int row, int col) const { return grid_[row * width_ + col]; }
  int cell_count() const { return height_ * width_; }

  const std::vector<Coord>& cells_of(Tile t) const {
    switch (t) {
      case Tile::OnionPile: return onion_cells_;
      case Tile::PlatePile: return plate_cells_;
      case Tile::Pot: return pot_cells_;
      case Tile::Delivery: return delivery_cells_;
      default: throw Error("cells_of: only station tiles are indexed");
    }
  }
  const std::vector<Coord>& pot_cells() const { return pot_cells_; }

  // Dense index of a pot cell into pot_cells(), -1 when not a pot.
  int pot_slot(Coord c) const {
    for (std::size_t i = 0; i < pot_cells_.size(); ++i)
      if (pot_cells_[i] == c) return static_cast<int>(i);
    return -1;
  }

 private:
  void index_stations() {
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const Coord cc{r, c};
        switch (at(cc)) {
          case Tile::OnionPile: onion_cells_.push_back(cc); break;
          case Tile::PlatePile: plate_cells_.push_back(cc); break;
          case Tile::Pot: pot_cells_.push_back(cc); break;
          case Tile::Delivery: delivery_cells_.push_back(cc); break;
          default: break;
        }
      }
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<Tile> grid_;
  std::array<Coord, 2> agent_starts_{};
  std::string name_;
  std::vector<Coord> onion_cells_, plate_cells_, pot_cells_, delivery_cells_;
};

namespace detail {

inline std::vector<std::string> split_rows(std::string_view text) {
  std::vector<std::string> rows;
  std::string current;
  for (char ch : text) {
    if (ch == '\n') {
      rows.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) rows.push_back(current);
  return rows;
}

}  // namespace detail

// Accepted characters: W wall, X delivery, O onion pile, B plate pile,
// P pot, A agent, space floor. Rows joined by '\n'; a single trailing
// newline is tolerated on input and never emitted on output.
inline Layout parse_layout(std::string_view text, std::string name = "") {
  const auto rows = detail::split_rows(text);
  if (rows.empty()) throw ParseError("empty layout text");
  const int height = static_cast<int>(rows.size());
  const int width = static_cast<int>(rows[0].size());
  if (width == 0) throw ParseError("empty layout row");

  std::vector<Tile> grid;
  grid.reserve(static_cast<std::size_t>(height) * width);
  std::vector<Coord> agents;
  bool has[6] = {false, false, false, false, false, false};

  for (int r = 0; r < height; ++r) {
    if (static_cast<int>(rows[r].size()) != width)
      throw ParseError("non-rectangular layout: row " + std::to_string(r));
    for (int c = 0; c < width; ++c) {
      Tile t;
      switch (rows[r][c]) {
        case ' ': t = Tile::Floor; break;
        case 'W': t = Tile::Wall; break;
        case 'O': t = Tile::OnionPile; break;
        case 'B': t = Tile::PlatePile; break;
        case 'P': t = Tile::Pot; break;
        case 'X': t = Tile::Delivery; break;
        case 'A':
          t = Tile::Floor;
          agents.push_back({r, c});
          break;
        default:
          throw ParseError(std::string("unknown layout character '") + rows[r][c] + "'");
      }
      has[static_cast<int>(t)] = true;
      grid.push_back(t);
    }
  }

  if (agents.size() != 2)
    throw ParseError("layout must contain exactly 2 agents, found " +
                     std::to_string(agents.size()));
  for (Tile required : {Tile::Wall, Tile::OnionPile, Tile::PlatePile, Tile::Pot,
                        Tile::Delivery}) {
    if (!has[static_cast<int>(required)])
      throw ParseError(std::string("missing required tile '") +
                       tile_char(required) + "'");
  }
  // Border must be wall or station, never floor (agents included).
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      if (r != 0 && r != height - 1 && c != 0 && c != width - 1) continue;
      if (grid[static_cast<std::size_t>(r) * width + c] == Tile::Floor)
        throw ParseError("border cell (" + std::to_string(r) + "," +
                         std::to_string(c) + ") is not wall or station");
    }

  return Layout(height, width, std::move(grid), {agents[0], agents[1]},
                std::move(name));
}

inline std::string serialize_layout(const Layout& layout) {
  std::string out;
  out.reserve(static_cast<std::size_t>(layout.cell_count()) + layout.height());
  for (int r = 0; r < layout.height(); ++r) {
    if (r > 0) out.push_back('\n');
    for (int c = 0; c < layout.width(); ++c) {
      const Coord cc{r, c};
      char ch = tile_char(layout.at(cc));
      if (cc == layout.agent_starts()[0] || cc == layout.agent_starts()[1]) ch = 'A';
      out.push_back(ch);
    }
  }
  return out;
}

}  // namespace kitchen
