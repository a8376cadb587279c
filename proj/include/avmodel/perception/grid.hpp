#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace avm::perception {

/// Cell coordinates: x grows rightward, y grows downward.
struct Pos {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const Pos&, const Pos&) = default;
};

enum class Direction : std::uint8_t { up, down, left, right, none, random };

inline constexpr std::array<Direction, 4> kAxisMoves{Direction::up, Direction::down, Direction::left, Direction::right};

const char* to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view text);

struct ObstacleRec {
    std::string kind;
    Pos anchor;  // top-left cell
    int w = 1;
    int h = 1;
    unsigned speed = 0;
    bool transparent = false;
    bool cyclic = false;
    std::vector<Direction> moves;
};

/// Ground truth: every cell is free, the car, or part of an obstacle.
class GridMap {
public:
    enum class CellKind : std::uint8_t { free, car_pos, occupied };
    struct Cell {
        CellKind kind = CellKind::free;
        int owner = -1;  // index into obstacles() when occupied
    };

    explicit GridMap(int width = 10, int height = 10);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(Pos p) const { return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_; }
    const Cell& at(Pos p) const { return cells_.at(static_cast<std::size_t>(p.y * width_ + p.x)); }

    /// Writes the obstacle's rectangle. Throws std::invalid_argument naming
    /// both actors on overlap, or when the rectangle leaves the map.
    int add_obstacle(const ObstacleRec& o);
    /// Moves an obstacle's rectangle without checks beyond bounds.
    void move_obstacle(int owner, Pos anchor);
    void place_car(Pos p);

    const std::vector<ObstacleRec>& obstacles() const { return obstacles_; }
    const std::optional<Pos>& car() const { return car_; }

private:
    Cell& cell(Pos p) { return cells_.at(static_cast<std::size_t>(p.y * width_ + p.x)); }

    int width_;
    int height_;
    std::vector<Cell> cells_;
    std::vector<ObstacleRec> obstacles_;
    std::optional<Pos> car_;
};

/// Position after one move of `speed` cells, or nullopt outside the map.
std::optional<Pos> step_position(Pos p, Direction d, unsigned speed, int width, int height);

/// The obstacle's rectangle after the move stays on the map and covers only
/// free cells or cells it already owns.
bool valid_move(const GridMap& m, int owner, Direction d, unsigned speed);

unsigned manhattan(Pos a, Pos b);

/// Within `dist_min` of the car any direction is allowed; farther away only
/// directions that strictly reduce the Manhattan distance.
bool move_allowed(Pos car, Pos obst_prev, Direction d, unsigned speed, unsigned dist_min);

/// Car-centered 5x5 view. Codes: C car, F free, O opaque, M newly opaque,
/// T transparent, N newly transparent, U unknown (off-map or hidden).
struct PerceptionGrid {
    static constexpr int size = 5;
    static constexpr int half = 2;
    std::array<char, 25> cells{};
    Pos anchor;  // absolute position of the center cell

    char at(int col, int row) const { return cells[static_cast<std::size_t>(row * size + col)]; }
    /// Code of an absolute map cell, if it lies in this grid.
    std::optional<char> at_absolute(Pos p) const;
    std::vector<std::string> rows() const;
};

/// Cells crossed by the segment between the centers of a and b, including
/// both cells touched when it passes exactly through a corner.
std::vector<Pos> supercover(Pos a, Pos b);

PerceptionGrid compute_perception(const GridMap& m, const PerceptionGrid* prev, Pos car);
/// One character per cell: `.` free, `C` car, `X` car on an obstacle, `#` opaque, `t` transparent.
/// One character per cell: `.` free, `C` car, `#` opaque, `t` transparent.
std::string render_ascii(const GridMap& m);

}  // namespace avm::perception
