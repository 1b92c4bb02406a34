#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace roadbench {

// Dense zero-based vertex id. Original input labels are kept in a side table.
using Vertex = std::uint32_t;
// Edge weight in integer travel-time units.
using Weight = std::uint32_t;
// Accumulated distances are 64-bit so sums of 32-bit weights cannot overflow.
using Dist = std::uint64_t;

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();
// Sentinel larger than any realizable path length, with headroom so that
// inf + weight never wraps.
inline constexpr Dist kInfDist = std::numeric_limits<Dist>::max() / 4;

struct Coord {
    std::int64_t x = 0;
    std::int64_t y = 0;

    bool operator==(const Coord&) const = default;
};

struct BoundingBox {
    std::int64_t min_x = std::numeric_limits<std::int64_t>::max();
    std::int64_t min_y = std::numeric_limits<std::int64_t>::max();
    std::int64_t max_x = std::numeric_limits<std::int64_t>::min();
    std::int64_t max_y = std::numeric_limits<std::int64_t>::min();

    void expand(const Coord& c) {
        min_x = c.x < min_x ? c.x : min_x;
        min_y = c.y < min_y ? c.y : min_y;
        max_x = c.x > max_x ? c.x : max_x;
        max_y = c.y > max_y ? c.y : max_y;
    }
    bool valid() const { return min_x <= max_x && min_y <= max_y; }
    std::uint64_t span_x() const { return static_cast<std::uint64_t>(max_x - min_x); }
    std::uint64_t span_y() const { return static_cast<std::uint64_t>(max_y - min_y); }
    std::uint64_t longer_span() const { return span_x() > span_y() ? span_x() : span_y(); }
    bool contains(const Coord& c) const {
        return c.x >= min_x && c.x <= max_x && c.y >= min_y && c.y <= max_y;
    }
};

// A walk s..t over original edges; length is the sum of edge weights.
// A single-vertex path has k() == 0 and length 0.
struct Path {
    std::vector<Vertex> vertices;
    Dist length = 0;

    std::size_t k() const { return vertices.empty() ? 0 : vertices.size() - 1; }
    bool empty() const { return vertices.empty(); }
    Vertex front() const { return vertices.front(); }
    Vertex back() const { return vertices.back(); }
};

// Input data that cannot be turned into a valid network / index.
class data_error : public std::runtime_error {
  public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed text input; carries the 1-based line number.
class parse_error : public data_error {
  public:
    parse_error(std::size_t line, const std::string& what)
        : data_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

// Joins two paths sharing an endpoint: a = s..u, b = u..t.
inline Path path_concat(const Path& a, const Path& b) {
    if (a.vertices.empty()) return b;
    if (b.vertices.empty()) return a;
    if (a.vertices.back() != b.vertices.front())
        throw std::invalid_argument("path_concat: endpoint mismatch");
    Path out;
    out.vertices.reserve(a.vertices.size() + b.vertices.size() - 1);
    out.vertices = a.vertices;
    out.vertices.insert(out.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
    out.length = a.length + b.length;
    return out;
}

}  // namespace roadbench
