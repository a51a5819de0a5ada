#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace covplan {

/// Row/column address of a grid cell. Row i spans y in [i*cs, (i+1)*cs).
struct CellIndex {
  int row = 0;
  int col = 0;

  friend constexpr auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

struct CellIndexHash {
  std::size_t operator()(const CellIndex& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.row)) << 32) |
                                      static_cast<std::uint32_t>(c.col));
  }
};

enum class Zone : std::uint8_t { Coverage, NoCoverage };

struct CellState {
  Zone zone = Zone::Coverage;
  int lifetime = 0;  // seconds
  int age = 0;       // seconds since last coverage

  friend constexpr bool operator==(const CellState&, const CellState&) = default;
};

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decaying priority grid. Coverage cells hold p = lifetime - age, which drops
/// by one each second until the cell is covered again. No-coverage cells carry
/// lifetime = age = 0 and never change.
class CoverageMap {
 public:
  CoverageMap() = default;
  /// All cells start as coverage cells with the given lifetime and age 0.
  CoverageMap(int width, int height, double cell_size, int lifetime = 0);

  [[nodiscard]] int width() const noexcept { return width_; }
  [[nodiscard]] int height() const noexcept { return height_; }
  [[nodiscard]] double cell_size() const noexcept { return cell_size_; }
  [[nodiscard]] std::int64_t clock() const noexcept { return clock_; }
  [[nodiscard]] std::size_t cell_count() const noexcept { return cells_.size(); }

  [[nodiscard]] bool in_bounds(CellIndex c) const noexcept {
    return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_;
  }
  [[nodiscard]] bool contains_point(double x, double y) const noexcept;
  /// Cell containing a metric point, or nullopt when outside the map.
  [[nodiscard]] std::optional<CellIndex> cell_at(double x, double y) const noexcept;

  [[nodiscard]] const CellState& cell(CellIndex c) const;
  /// Unchecked-by-zone setter used by loaders and generators.
  void set_cell(CellIndex c, const CellState& state);

  [[nodiscard]] bool in_coverage_zone(CellIndex c) const;
  /// Throws MapError for out-of-bounds or no-coverage cells.
  [[nodiscard]] int priority(CellIndex c) const;
  [[nodiscard]] int lifetime(CellIndex c) const { return cell(c).lifetime; }

  /// Ages every coverage cell by dt seconds and advances the clock.
  void decay(int dt);
  /// Resets the age of every coverage cell in the set; other cells are ignored.
  void mark_covered(std::span<const CellIndex> cells);

  [[nodiscard]] std::size_t coverage_cell_count() const noexcept;
  /// Smallest priority over coverage cells, or 0 when none exist.
  [[nodiscard]] int min_priority() const noexcept;
  [[nodiscard]] std::int64_t total_priority() const noexcept;

  friend bool operator==(const CoverageMap&, const CoverageMap&) = default;

 private:
  [[nodiscard]] std::size_t offset(CellIndex c) const;

  int width_ = 0;
  int height_ = 0;
  double cell_size_ = 1.0;
  std::int64_t clock_ = 0;
  std::vector<CellState> cells_;
};

/// Free-function forms returning a new snapshot.
[[nodiscard]] CoverageMap decayed(CoverageMap map, int dt);
[[nodiscard]] CoverageMap covered(CoverageMap map, std::span<const CellIndex> cells);

// `ccmap v1 <width> <height> <cell_size_m> <clock>` followed by `height` rows of
// `NC` or `<lifetime>:<age>` tokens.
void write_map(std::ostream& out, const CoverageMap& map);
[[nodiscard]] CoverageMap read_map(std::istream& in);
[[nodiscard]] CoverageMap load_map(const std::string& path);
void save_map(const std::string& path, const CoverageMap& map);

}  // namespace covplan
