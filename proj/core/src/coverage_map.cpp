#include "covplan/coverage_map.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace covplan {

CoverageMap::CoverageMap(int width, int height, double cell_size, int lifetime)
    : width_(width), height_(height), cell_size_(cell_size) {
  if (width <= 0 || height <= 0) throw MapError("map dimensions must be positive");
  if (!(cell_size > 0.0)) throw MapError("cell size must be positive");
  if (lifetime < 0) throw MapError("lifetime must be non-negative");
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                CellState{Zone::Coverage, lifetime, 0});
}

bool CoverageMap::contains_point(double x, double y) const noexcept {
  return x >= 0.0 && y >= 0.0 && x < width_ * cell_size_ && y < height_ * cell_size_;
}

std::optional<CellIndex> CoverageMap::cell_at(double x, double y) const noexcept {
  if (!contains_point(x, y)) return std::nullopt;
  CellIndex c{static_cast<int>(std::floor(y / cell_size_)), static_cast<int>(std::floor(x / cell_size_))};
  if (!in_bounds(c)) return std::nullopt;
  return c;
}

std::size_t CoverageMap::offset(CellIndex c) const {
  if (!in_bounds(c)) {
    throw MapError("cell (" + std::to_string(c.row) + ", " + std::to_string(c.col) + ") out of bounds");
  }
  return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.col);
}

const CellState& CoverageMap::cell(CellIndex c) const { return cells_[offset(c)]; }

void CoverageMap::set_cell(CellIndex c, const CellState& state) {
  if (state.lifetime < 0 || state.age < 0) throw MapError("lifetime and age must be non-negative");
  CellState s = state;
  if (s.zone == Zone::NoCoverage) s.lifetime = s.age = 0;
  cells_[offset(c)] = s;
}

bool CoverageMap::in_coverage_zone(CellIndex c) const { return cell(c).zone == Zone::Coverage; }

int CoverageMap::priority(CellIndex c) const {
  const CellState& s = cell(c);
  if (s.zone != Zone::Coverage) {
    throw MapError("priority requested for no-coverage cell (" + std::to_string(c.row) + ", " +
                   std::to_string(c.col) + ")");
  }
  return s.lifetime - s.age;
}

void CoverageMap::decay(int dt) {
  if (dt < 0) throw MapError("decay step must be non-negative");
  if (dt == 0) return;
  for (CellState& s : cells_) {
    if (s.zone == Zone::Coverage) s.age += dt;
  }
  clock_ += dt;
}

void CoverageMap::mark_covered(std::span<const CellIndex> cells) {
  for (CellIndex c : cells) {
    CellState& s = cells_[offset(c)];
    if (s.zone == Zone::Coverage) s.age = 0;
  }
}

std::size_t CoverageMap::coverage_cell_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(cells_.begin(), cells_.end(), [](const CellState& s) { return s.zone == Zone::Coverage; }));
}

int CoverageMap::min_priority() const noexcept {
  int lo = std::numeric_limits<int>::max();
  for (const CellState& s : cells_) {
    if (s.zone == Zone::Coverage) lo = std::min(lo, s.lifetime - s.age);
  }
  return lo == std::numeric_limits<int>::max() ? 0 : lo;
}

std::int64_t CoverageMap::total_priority() const noexcept {
  std::int64_t sum = 0;
  for (const CellState& s : cells_) {
    if (s.zone == Zone::Coverage) sum += s.lifetime - s.age;
  }
  return sum;
}

CoverageMap decayed(CoverageMap map, int dt) {
  map.decay(dt);
  return map;
}

CoverageMap covered(CoverageMap map, std::span<const CellIndex> cells) {
  map.mark_covered(cells);
  return map;
}

void write_map(std::ostream& out, const CoverageMap& map) {
  std::ostringstream cs;
  cs << std::setprecision(17) << map.cell_size();
  out << "ccmap v1 " << map.width() << ' ' << map.height() << ' ' << cs.str() << ' ' << map.clock() << '\n';
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      const CellState& s = map.cell({r, c});
      if (c > 0) out << ' ';
      if (s.zone == Zone::NoCoverage) {
        out << "NC";
      } else {
        out << s.lifetime << ':' << s.age;
      }
    }
    out << '\n';
  }
}

namespace {

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
  throw MapError("ccmap:" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
}

bool parse_int(std::string_view text, long long& value) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

}  // namespace

CoverageMap read_map(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) parse_fail(1, 1, "missing header");
  auto header = tokenize(line);
  if (header.size() != 6 || header[0].text != "ccmap") parse_fail(1, 1, "expected 'ccmap v1 <w> <h> <cell_size> <clock>'");
  if (header[1].text != "v1") parse_fail(1, header[1].column, "unsupported version '" + std::string(header[1].text) + "'");
  long long w = 0, h = 0, clock = 0;
  if (!parse_int(header[2].text, w) || w <= 0 || w > 100000) parse_fail(1, header[2].column, "bad width");
  if (!parse_int(header[3].text, h) || h <= 0 || h > 100000) parse_fail(1, header[3].column, "bad height");
  double cell_size = 0.0;
  {
    const std::string cs_text(header[4].text);
    char* end = nullptr;
    cell_size = std::strtod(cs_text.c_str(), &end);
    if (end != cs_text.c_str() + cs_text.size() || !(cell_size > 0.0) || !std::isfinite(cell_size)) {
      parse_fail(1, header[4].column, "bad cell size");
    }
  }
  if (!parse_int(header[5].text, clock) || clock < 0) parse_fail(1, header[5].column, "bad clock");

  CoverageMap map(static_cast<int>(w), static_cast<int>(h), cell_size);
  map.decay(static_cast<int>(clock));  // only sets the clock; every cell is overwritten below

  for (long long r = 0; r < h; ++r) {
    const std::size_t line_no = static_cast<std::size_t>(r) + 2;
    if (!std::getline(in, line)) parse_fail(line_no, 1, "missing row");
    auto tokens = tokenize(line);
    if (static_cast<long long>(tokens.size()) != w) {
      parse_fail(line_no, 1, "expected " + std::to_string(w) + " cells, got " + std::to_string(tokens.size()));
    }
    for (long long c = 0; c < w; ++c) {
      const Token& t = tokens[static_cast<std::size_t>(c)];
      CellIndex idx{static_cast<int>(r), static_cast<int>(c)};
      if (t.text == "NC") {
        map.set_cell(idx, {Zone::NoCoverage, 0, 0});
        continue;
      }
      auto colon = t.text.find(':');
      long long life = 0, age = 0;
      if (colon == std::string_view::npos || !parse_int(t.text.substr(0, colon), life) ||
          !parse_int(t.text.substr(colon + 1), age) || life < 0 || age < 0 ||
          life > std::numeric_limits<int>::max() || age > std::numeric_limits<int>::max()) {
        parse_fail(line_no, t.column, "malformed cell token '" + std::string(t.text) + "'");
      }
      map.set_cell(idx, {Zone::Coverage, static_cast<int>(life), static_cast<int>(age)});
    }
  }
  while (std::getline(in, line)) {
    if (!tokenize(line).empty()) parse_fail(static_cast<std::size_t>(h) + 2, 1, "trailing data after last row");
  }
  return map;
}

CoverageMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file '" + path + "'");
  return read_map(in);
}

void save_map(const std::string& path, const CoverageMap& map) {
  std::ofstream out(path);
  if (!out) throw MapError("cannot write map file '" + path + "'");
  write_map(out, map);
  if (!out) throw MapError("write failed for '" + path + "'");
}

}  // namespace covplan
