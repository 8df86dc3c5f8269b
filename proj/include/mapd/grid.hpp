#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mapd {

// x is the column, y the row; row 0 is the top of the map.
struct Cell {
  int x = 0;
  int y = 0;

  auto operator<=>(const Cell&) const = default;
};

std::string to_string(Cell c);

enum class CellKind : std::uint8_t { Corridor, Shelf, Delivery };

enum class Move : std::uint8_t { Wait, Up, Down, Left, Right };

inline constexpr Move kAllMoves[] = {Move::Wait, Move::Up, Move::Down, Move::Left,
                                     Move::Right};

Cell apply_move(Cell c, Move m);
const char* to_string(Move m);

// Move that takes `from` to `to`; throws if they are not equal or 4-adjacent.
Move move_between(Cell from, Cell to);

inline int manhattan(Cell a, Cell b) {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

enum class MapErrorKind {
  Empty,
  RaggedRows,
  IllegalCharacter,
  DeliveryRowIncomplete,
  DeliveryOffBottomRow,
  ShelfNotAccessible,
  DisconnectedCorridors,
  Io,
};

class MapError : public std::runtime_error {
 public:
  MapError(MapErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  MapErrorKind kind() const { return kind_; }

 private:
  MapErrorKind kind_;
};

class WarehouseMap {
 public:
  WarehouseMap() = default;
  WarehouseMap(int width, int height, std::vector<CellKind> cells, std::string name);

  int width() const { return width_; }
  int height() const { return height_; }
  int area() const { return width_ * height_; }
  const std::string& name() const { return name_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }
  CellKind kind(Cell c) const { return cells_[static_cast<std::size_t>(index(c))]; }

  // Corridor or Delivery.
  bool is_open(Cell c) const { return in_bounds(c) && kind(c) != CellKind::Shelf; }

  std::vector<Cell> cells_of(CellKind kind) const;

  bool operator==(const WarehouseMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<CellKind> cells_;
  std::string name_;
};

// Parses the ASCII map format: optional leading '#' comment lines, then rows
// over {'.', 'S', 'D'}. Throws MapError on malformed or invalid maps.
WarehouseMap load_map(std::string_view text, std::string name = "custom");
WarehouseMap load_map_file(const std::string& path);

// Rows joined by '\n', with a trailing newline, no comments.
std::string serialize_map(const WarehouseMap& map);

// The shipped fixtures: "small", "medium", "large".
bool is_builtin_map(std::string_view name);
WarehouseMap builtin_map(std::string_view name);
std::string_view builtin_map_text(std::string_view name);

// A builtin name or a path to a map file.
WarehouseMap resolve_map(const std::string& name_or_path);

}  // namespace mapd

template <>
struct std::hash<mapd::Cell> {
  std::size_t operator()(const mapd::Cell& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                      static_cast<std::uint32_t>(c.y));
  }
};
