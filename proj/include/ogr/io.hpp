#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "ogr/field.hpp"
#include "ogr/gsolver.hpp"
#include "ogr/young.hpp"

namespace ogr::io {

using nlohmann::json;

/// Parses a JSON document; syntax errors become ParseError naming the line.
json parse(const std::string& text, const std::string& source = "config");
json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const json& j);

// Typed getters that report the key path on failure.
double get_number(const json& j, const std::string& key, const std::string& path);
double get_number(const json& j, const std::string& key, const std::string& path, double fallback);
int get_int(const json& j, const std::string& key, const std::string& path, int fallback);
std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback);
Point get_point(const json& j, const std::string& key, const std::string& path, Point fallback);

/// {family, p, quad_tol} plus {t, g} for tabulated functions.
json to_json(const YoungFunction& F);
YoungFunction young_from_json(const json& j, const std::string& path = "young");

/// {dim, h, origin, nodes}, or {dim, h, lo, hi} for a box.
json to_json(const Grid& g);
Grid grid_from_json(const json& j, const std::string& path = "grid");

/// Regions serialize by constructor parameters; bitmaps list their cells.
json to_json(const Region& r);
Region region_from_json(const json& j, const Grid& g, const std::string& path = "region");

/// {grid, values}
json to_json(const ScalarField& u);
ScalarField field_from_json(const json& j, const std::string& path = "field");

/// Minimal CSV writer: header row, ',' separator, round-trip doubles.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(const std::string& s);
  CsvWriter& operator<<(long long v);
  CsvWriter& operator<<(int v) { return *this << static_cast<long long>(v); }
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  std::size_t columns_;
  std::size_t col_ = 0;
};

std::string format_double(double v);

/// x (and y) coordinate columns followed by the value.
void write_field_csv(std::ostream& out, const ScalarField& u);
/// iter, stage, energy, residual, step
void write_solver_log_csv(std::ostream& out, const std::vector<IterationLog>& log);

/// 64-bit FNV-1a of a string, as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

}  // namespace ogr::io
