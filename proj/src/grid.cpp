#include "mapd/grid.hpp"

#include <fstream>
#include <queue>
#include <sstream>

#include "builtin_maps.inc"

namespace mapd {

std::string to_string(Cell c) {
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

Cell apply_move(Cell c, Move m) {
  switch (m) {
    case Move::Wait: return c;
    case Move::Up: return {c.x, c.y - 1};
    case Move::Down: return {c.x, c.y + 1};
    case Move::Left: return {c.x - 1, c.y};
    case Move::Right: return {c.x + 1, c.y};
  }
  return c;
}

const char* to_string(Move m) {
  switch (m) {
    case Move::Wait: return "wait";
    case Move::Up: return "up";
    case Move::Down: return "down";
    case Move::Left: return "left";
    case Move::Right: return "right";
  }
  return "?";
}

Move move_between(Cell from, Cell to) {
  for (Move m : kAllMoves) {
    if (apply_move(from, m) == to) return m;
  }
  throw std::invalid_argument("cells " + to_string(from) + " and " + to_string(to) +
                              " are not adjacent");
}

WarehouseMap::WarehouseMap(int width, int height, std::vector<CellKind> cells,
                           std::string name)
    : width_(width), height_(height), cells_(std::move(cells)), name_(std::move(name)) {}

std::vector<Cell> WarehouseMap::cells_of(CellKind k) const {
  std::vector<Cell> out;
  for (int i = 0; i < area(); ++i) {
    if (cells_[static_cast<std::size_t>(i)] == k) out.push_back(cell(i));
  }
  return out;
}

namespace {

void validate(const WarehouseMap& map) {
  const int w = map.width();
  const int h = map.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Cell c{x, y};
      const bool bottom = y == h - 1;
      if (bottom && map.kind(c) != CellKind::Delivery) {
        throw MapError(MapErrorKind::DeliveryRowIncomplete,
                       "bottom row must be all delivery cells; " + to_string(c) + " is not");
      }
      if (!bottom && map.kind(c) == CellKind::Delivery) {
        throw MapError(MapErrorKind::DeliveryOffBottomRow,
                       "delivery cell " + to_string(c) + " is not on the bottom row");
      }
    }
  }

  for (Cell s : map.cells_of(CellKind::Shelf)) {
    bool ok = false;
    for (Move m : kAllMoves) {
      const Cell n = apply_move(s, m);
      if (m != Move::Wait && map.in_bounds(n) && map.kind(n) == CellKind::Corridor) ok = true;
    }
    if (!ok) {
      throw MapError(MapErrorKind::ShelfNotAccessible,
                     "shelf " + to_string(s) + " has no adjacent corridor cell");
    }
  }

  // Corridor graph: Corridor and Delivery cells, 4-connected.
  std::vector<char> seen(static_cast<std::size_t>(map.area()), 0);
  int open = 0;
  int start = -1;
  for (int i = 0; i < map.area(); ++i) {
    if (map.is_open(map.cell(i))) {
      ++open;
      if (start < 0) start = i;
    }
  }
  if (start < 0) return;
  std::queue<int> q;
  q.push(start);
  seen[static_cast<std::size_t>(start)] = 1;
  int reached = 0;
  while (!q.empty()) {
    const Cell c = map.cell(q.front());
    q.pop();
    ++reached;
    for (Move m : kAllMoves) {
      if (m == Move::Wait) continue;
      const Cell n = apply_move(c, m);
      if (!map.is_open(n)) continue;
      auto& s = seen[static_cast<std::size_t>(map.index(n))];
      if (!s) {
        s = 1;
        q.push(map.index(n));
      }
    }
  }
  if (reached != open) {
    throw MapError(MapErrorKind::DisconnectedCorridors,
                   "corridor graph is disconnected: " + std::to_string(reached) + " of " +
                       std::to_string(open) + " open cells reachable");
  }
}

}  // namespace

WarehouseMap load_map(std::string_view text, std::string name) {
  std::vector<std::string_view> rows;
  bool header = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (header && !line.empty() && line.front() == '#') continue;
    header = false;
    rows.push_back(line);
  }
  // A trailing newline leaves no empty final row; any other empty line is a ragged row.
  if (rows.empty() || rows.front().empty()) {
    throw MapError(MapErrorKind::Empty, "map has no rows");
  }

  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  std::vector<CellKind> cells;
  cells.reserve(static_cast<std::size_t>(width * height));
  for (int y = 0; y < height; ++y) {
    const auto& row = rows[static_cast<std::size_t>(y)];
    if (static_cast<int>(row.size()) != width) {
      throw MapError(MapErrorKind::RaggedRows, "row " + std::to_string(y) + " has " +
                                                   std::to_string(row.size()) +
                                                   " cells, expected " + std::to_string(width));
    }
    for (int x = 0; x < width; ++x) {
      switch (row[static_cast<std::size_t>(x)]) {
        case '.': cells.push_back(CellKind::Corridor); break;
        case 'S': cells.push_back(CellKind::Shelf); break;
        case 'D': cells.push_back(CellKind::Delivery); break;
        default:
          throw MapError(MapErrorKind::IllegalCharacter,
                         std::string("illegal character '") + row[static_cast<std::size_t>(x)] +
                             "' at " + to_string(Cell{x, y}));
      }
    }
  }

  WarehouseMap map(width, height, std::move(cells), std::move(name));
  validate(map);
  return map;
}

WarehouseMap load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError(MapErrorKind::Io, "cannot open map file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_map(ss.str(), path);
}

std::string serialize_map(const WarehouseMap& map) {
  std::string out;
  out.reserve(static_cast<std::size_t>((map.width() + 1) * map.height()));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      switch (map.kind({x, y})) {
        case CellKind::Corridor: out += '.'; break;
        case CellKind::Shelf: out += 'S'; break;
        case CellKind::Delivery: out += 'D'; break;
      }
    }
    out += '\n';
  }
  return out;
}

bool is_builtin_map(std::string_view name) {
  return name == "small" || name == "medium" || name == "large";
}

std::string_view builtin_map_text(std::string_view name) {
  if (name == "small") return kSmallMap;
  if (name == "medium") return kMediumMap;
  if (name == "large") return kLargeMap;
  throw std::invalid_argument("unknown builtin map: " + std::string(name));
}

WarehouseMap builtin_map(std::string_view name) {
  return load_map(builtin_map_text(name), std::string(name));
}

WarehouseMap resolve_map(const std::string& name_or_path) {
  if (is_builtin_map(name_or_path)) return builtin_map(name_or_path);
  return load_map_file(name_or_path);
}

}  // namespace mapd
