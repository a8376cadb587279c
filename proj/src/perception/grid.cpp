#include "avmodel/perception/grid.hpp"

#include <cstdlib>
#include <stdexcept>

namespace avm::perception {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::up: return "up";
        case Direction::down: return "down";
        case Direction::left: return "left";
        case Direction::right: return "right";
        case Direction::none: return "none";
        case Direction::random: return "random";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view text) {
    for (auto d : {Direction::up, Direction::down, Direction::left, Direction::right, Direction::none, Direction::random})
        if (text == to_string(d)) return d;
    return std::nullopt;
}

GridMap::GridMap(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("map dimensions must be positive");
    cells_.resize(static_cast<std::size_t>(width * height));
}

int GridMap::add_obstacle(const ObstacleRec& o) {
    if (o.w < 1 || o.h < 1) throw std::invalid_argument(o.kind + " has an empty extent");
    if (!in_bounds(o.anchor) || !in_bounds({o.anchor.x + o.w - 1, o.anchor.y + o.h - 1}))
        throw std::invalid_argument(o.kind + " does not fit on the map");
    for (int y = o.anchor.y; y < o.anchor.y + o.h; ++y)
        for (int x = o.anchor.x; x < o.anchor.x + o.w; ++x) {
            const auto& c = at({x, y});
            if (c.kind == CellKind::occupied)
                throw std::invalid_argument(o.kind + " overlaps " + obstacles_[static_cast<std::size_t>(c.owner)].kind);
            if (c.kind == CellKind::car_pos) throw std::invalid_argument(o.kind + " overlaps the car");
        }
    int owner = static_cast<int>(obstacles_.size());
    obstacles_.push_back(o);
    for (int y = o.anchor.y; y < o.anchor.y + o.h; ++y)
        for (int x = o.anchor.x; x < o.anchor.x + o.w; ++x) cell({x, y}) = {CellKind::occupied, owner};
    return owner;
}

void GridMap::move_obstacle(int owner, Pos anchor) {
    auto& o = obstacles_.at(static_cast<std::size_t>(owner));
    if (!in_bounds(anchor) || !in_bounds({anchor.x + o.w - 1, anchor.y + o.h - 1}))
        throw std::invalid_argument(o.kind + " would leave the map");
    for (int y = o.anchor.y; y < o.anchor.y + o.h; ++y)
        for (int x = o.anchor.x; x < o.anchor.x + o.w; ++x)
            if (cell({x, y}).owner == owner) cell({x, y}) = {};
    o.anchor = anchor;
    for (int y = anchor.y; y < anchor.y + o.h; ++y)
        for (int x = anchor.x; x < anchor.x + o.w; ++x) cell({x, y}) = {CellKind::occupied, owner};
    if (car_ && at(*car_).kind == CellKind::free) cell(*car_).kind = CellKind::car_pos;
}

void GridMap::place_car(Pos p) {
    if (!in_bounds(p)) throw std::invalid_argument("car position is off the map");
    if (car_ && at(*car_).kind == CellKind::car_pos) cell(*car_) = {};
    car_ = p;
    // On a collision the obstacle keeps the cell.
    if (at(p).kind == CellKind::free) cell(p).kind = CellKind::car_pos;
}

std::optional<Pos> step_position(Pos p, Direction d, unsigned speed, int width, int height) {
    const int k = static_cast<int>(speed);
    switch (d) {
        case Direction::up: p.y -= k; break;
        case Direction::down: p.y += k; break;
        case Direction::left: p.x -= k; break;
        case Direction::right: p.x += k; break;
        case Direction::none: break;
        case Direction::random: throw std::invalid_argument("random must be resolved before stepping");
    }
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) return std::nullopt;
    return p;
}

bool valid_move(const GridMap& m, int owner, Direction d, unsigned speed) {
    const auto& o = m.obstacles().at(static_cast<std::size_t>(owner));
    auto to = step_position(o.anchor, d, speed, m.width(), m.height());
    if (!to || !m.in_bounds({to->x + o.w - 1, to->y + o.h - 1})) return false;
    for (int y = to->y; y < to->y + o.h; ++y)
        for (int x = to->x; x < to->x + o.w; ++x) {
            const auto& c = m.at({x, y});
            if (c.kind == GridMap::CellKind::car_pos) return false;
            if (c.kind == GridMap::CellKind::occupied && c.owner != owner) return false;
        }
    return true;
}

unsigned manhattan(Pos a, Pos b) { return static_cast<unsigned>(std::abs(a.x - b.x) + std::abs(a.y - b.y)); }

bool move_allowed(Pos car, Pos obst_prev, Direction d, unsigned speed, unsigned dist_min) {
    auto before = manhattan(car, obst_prev);
    if (before <= dist_min) return true;
    Pos next = obst_prev;
    const int k = static_cast<int>(speed);
    switch (d) {
        case Direction::up: next.y -= k; break;
        case Direction::down: next.y += k; break;
        case Direction::left: next.x -= k; break;
        case Direction::right: next.x += k; break;
        default: return false;
    }
    return manhattan(car, next) < before;
}

std::optional<char> PerceptionGrid::at_absolute(Pos p) const {
    int col = p.x - anchor.x + half, row = p.y - anchor.y + half;
    if (col < 0 || row < 0 || col >= size || row >= size) return std::nullopt;
    return at(col, row);
}

std::vector<std::string> PerceptionGrid::rows() const {
    std::vector<std::string> out;
    for (int r = 0; r < size; ++r) out.emplace_back(cells.begin() + r * size, cells.begin() + (r + 1) * size);
    return out;
}

std::vector<Pos> supercover(Pos a, Pos b) {
    const int nx = std::abs(b.x - a.x), ny = std::abs(b.y - a.y);
    const int sx = b.x > a.x ? 1 : -1, sy = b.y > a.y ? 1 : -1;
    std::vector<Pos> out{a};
    Pos p = a;
    for (int ix = 0, iy = 0; ix < nx || iy < ny;) {
        // Compare where the segment next crosses a vertical vs horizontal cell edge.
        long decision = static_cast<long>(1 + 2 * ix) * ny - static_cast<long>(1 + 2 * iy) * nx;
        if (decision == 0) {
            out.push_back({p.x + sx, p.y});
            out.push_back({p.x, p.y + sy});
            p.x += sx;
            p.y += sy;
            ++ix;
            ++iy;
        } else if (decision < 0) {
            p.x += sx;
            ++ix;
        } else {
            p.y += sy;
            ++iy;
        }
        out.push_back(p);
    }
    return out;
}

namespace {

bool opaque_at(const GridMap& m, Pos p) {
    if (!m.in_bounds(p)) return false;
    const auto& c = m.at(p);
    return c.kind == GridMap::CellKind::occupied && !m.obstacles()[static_cast<std::size_t>(c.owner)].transparent;
}

}  // namespace

PerceptionGrid compute_perception(const GridMap& m, const PerceptionGrid* prev, Pos car) {
    PerceptionGrid g;
    g.anchor = car;
    for (int row = 0; row < PerceptionGrid::size; ++row)
        for (int col = 0; col < PerceptionGrid::size; ++col) {
            Pos p{car.x + col - PerceptionGrid::half, car.y + row - PerceptionGrid::half};
            char& out = g.cells[static_cast<std::size_t>(row * PerceptionGrid::size + col)];
            if (p == car) {
                out = 'C';
                continue;
            }
            if (!m.in_bounds(p)) {
                out = 'U';
                continue;
            }
            auto ray = supercover(car, p);
            bool hidden = false;
            for (const auto& q : ray)
                if (q != car && q != p && opaque_at(m, q)) hidden = true;
            if (hidden) {
                out = 'U';
                continue;
            }
            const auto& c = m.at(p);
            if (c.kind != GridMap::CellKind::occupied) {
                out = 'F';
                continue;
            }
            bool transparent = m.obstacles()[static_cast<std::size_t>(c.owner)].transparent;
            bool was_free = prev && prev->at_absolute(p) == 'F';
            out = transparent ? (was_free ? 'N' : 'T') : (was_free ? 'M' : 'O');
        }
    return g;
}

std::string render_ascii(const GridMap& m) {
    std::string out;
    for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
            const auto& c = m.at({x, y});
            if (m.car() && *m.car() == Pos{x, y})
                out += c.kind == GridMap::CellKind::occupied ? 'X' : 'C';
            else if (c.kind == GridMap::CellKind::occupied)
                out += m.obstacles()[static_cast<std::size_t>(c.owner)].transparent ? 't' : '#';
            else
                out += '.';
        }
        out += '\n';
    }
    return out;
}

}  // namespace avm::perception
