#include "ogr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "ogr/error.hpp"

namespace ogr::io {

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json* find(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

std::vector<double> number_array(const json& j, const std::string& key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ParseError(join(path, key), "missing array");
  if (!v->is_array()) throw ParseError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v->size());
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) {
      throw ParseError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    }
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

}  // namespace

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    for (std::size_t i = 0; i < upto; ++i) line += text[i] == '\n';
    throw ParseError(source + ":" + std::to_string(line), e.what());
  }
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) throw ParseError(join(path, key), "missing number");
  if (!v->is_number()) throw ParseError(join(path, key), "expected a number");
  return v->get<double>();
}

double get_number(const json& j, const std::string& key, const std::string& path, double fallback) {
  return find(j, key) ? get_number(j, key, path) : fallback;
}

int get_int(const json& j, const std::string& key, const std::string& path, int fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ParseError(join(path, key), "expected an integer");
  return v->get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path,
                       const std::string& fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ParseError(join(path, key), "expected a string");
  return v->get<std::string>();
}

Point get_point(const json& j, const std::string& key, const std::string& path, Point fallback) {
  if (!find(j, key)) return fallback;
  const auto v = number_array(j, key, path);
  if (v.empty() || v.size() > 2) throw ParseError(join(path, key), "expected 1 or 2 coordinates");
  return {v[0], v.size() == 2 ? v[1] : 0.0};
}

json to_json(const YoungFunction& F) {
  json j;
  j["family"] = to_string(F.family());
  if (F.family() != YoungFamily::Tabulated) j["p"] = F.p();
  j["quad_tol"] = F.quad_tol();
  if (F.family() == YoungFamily::Tabulated) {
    j["t"] = std::vector<double>(F.table_t().begin(), F.table_t().end());
    j["g"] = std::vector<double>(F.table_g().begin(), F.table_g().end());
  }
  return j;
}

YoungFunction young_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const std::string fam = get_string(j, "family", path, "power");
  YoungFamily family;
  try {
    family = young_family_from_string(fam);
  } catch (const Error& e) {
    throw ParseError(join(path, "family"), e.what());
  }
  const double tol = get_number(j, "quad_tol", path, 1e-12);
  switch (family) {
    case YoungFamily::Power: return YoungFunction::power(get_number(j, "p", path), tol);
    case YoungFamily::PLog: return YoungFunction::plog(get_number(j, "p", path), tol);
    case YoungFamily::Tabulated:
      return YoungFunction::tabulated(number_array(j, "t", path), number_array(j, "g", path), tol);
  }
  throw ParseError(join(path, "family"), "unknown family");
}

json to_json(const Grid& g) {
  json j;
  j["dim"] = g.dim();
  j["h"] = g.h();
  j["origin"] = g.dim() == 2 ? json{g.origin()[0], g.origin()[1]} : json{g.origin()[0]};
  j["nodes"] = g.dim() == 2 ? json{g.nodes(0), g.nodes(1)} : json{g.nodes(0)};
  return j;
}

Grid grid_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const int dim = get_int(j, "dim", path, 2);
  if (dim != 1 && dim != 2) throw ParseError(join(path, "dim"), "must be 1 or 2");
  const double h = get_number(j, "h", path);
  if (!(h > 0.0)) throw ParseError(join(path, "h"), "must be positive");
  if (find(j, "nodes")) {
    const auto n = number_array(j, "nodes", path);
    if (n.size() != static_cast<std::size_t>(dim)) throw ParseError(join(path, "nodes"), "one count per axis");
    const Point o = get_point(j, "origin", path, {0.0, 0.0});
    return Grid(dim, h, o, {static_cast<std::size_t>(n[0]), dim == 2 ? static_cast<std::size_t>(n[1]) : 1});
  }
  const Point lo = get_point(j, "lo", path, {-1.0, -1.0});
  const Point hi = get_point(j, "hi", path, {1.0, 1.0});
  try {
    return Grid::box(dim, h, lo, hi);
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
}

json to_json(const Region& r) {
  json j;
  j["kind"] = to_string(r.kind());
  auto pt = [](const Point& p) { return json{p[0], p[1]}; };
  switch (r.kind()) {
    case RegionKind::Full: break;
    case RegionKind::Ball:
      j["center"] = pt(r.center());
      j["radius"] = r.radius();
      break;
    case RegionKind::Annulus:
      j["center"] = pt(r.center());
      j["r_in"] = r.inner_radius();
      j["r_out"] = r.radius();
      break;
    case RegionKind::Box:
      j["lo"] = pt(r.lo());
      j["hi"] = pt(r.hi());
      break;
    case RegionKind::Bitmap:
      j["cells"] = std::vector<std::size_t>(r.cells().begin(), r.cells().end());
      break;
  }
  return j;
}

Region region_from_json(const json& j, const Grid& g, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
  const std::string kind = get_string(j, "kind", path, "full");
  if (kind == "full") return Region::full(g);
  if (kind == "ball") {
    return Region::ball(g, get_point(j, "center", path, {0.0, 0.0}), get_number(j, "radius", path));
  }
  if (kind == "annulus") {
    return Region::annulus(g, get_point(j, "center", path, {0.0, 0.0}), get_number(j, "r_in", path),
                           get_number(j, "r_out", path));
  }
  if (kind == "box") {
    return Region::box(g, get_point(j, "lo", path, g.origin()), get_point(j, "hi", path, g.upper()));
  }
  if (kind == "bitmap") {
    std::vector<std::size_t> cells;
    for (double c : number_array(j, "cells", path)) {
      if (c < 0.0 || c >= static_cast<double>(g.cell_count()) || c != std::floor(c)) {
        throw ParseError(join(path, "cells"), "cell index out of range");
      }
      cells.push_back(static_cast<std::size_t>(c));
    }
    return Region::bitmap(g, std::move(cells));
  }
  throw ParseError(join(path, "kind"), "unknown region kind '" + kind + "'");
}

json to_json(const ScalarField& u) {
  json j;
  j["grid"] = to_json(u.grid());
  j["values"] = std::vector<double>(u.values().begin(), u.values().end());
  return j;
}

ScalarField field_from_json(const json& j, const std::string& path) {
  const json* gj = find(j, "grid");
  if (!gj) throw ParseError(join(path, "grid"), "missing grid");
  Grid g = grid_from_json(*gj, join(path, "grid"));
  auto v = number_array(j, "values", path);
  if (v.size() != g.node_count()) {
    throw ParseError(join(path, "values"), "expected " + std::to_string(g.node_count()) + " values, got " +
                                               std::to_string(v.size()));
  }
  return ScalarField(std::move(g), std::move(v));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::sep() {
  if (col_ == columns_) throw PreconditionError("CsvWriter: too many columns in a row");
  if (col_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
  sep();
  if (s.find_first_of(",\"\n") == std::string::npos) {
    out_ << s;
  } else {
    out_ << '"';
    for (char c : s) out_ << (c == '"' ? "\"\"" : std::string(1, c));
    out_ << '"';
  }
  return *this;
}

CsvWriter& CsvWriter::operator<<(long long v) {
  sep();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != columns_) throw PreconditionError("CsvWriter: short row");
  out_ << '\n';
  col_ = 0;
}

void write_field_csv(std::ostream& out, const ScalarField& u) {
  const Grid& g = u.grid();
  std::vector<std::string> header{"x"};
  if (g.dim() == 2) header.push_back("y");
  header.push_back("u");
  CsvWriter w(out, header);
  for (std::size_t n = 0; n < g.node_count(); ++n) {
    const Point x = g.node_point(n);
    w << x[0];
    if (g.dim() == 2) w << x[1];
    w << u[n];
    w.end_row();
  }
}

void write_solver_log_csv(std::ostream& out, const std::vector<IterationLog>& log) {
  CsvWriter w(out, {"iter", "stage", "energy", "residual", "step"});
  for (const auto& e : log) {
    w << e.iter << e.stage << e.energy << e.residual << e.step;
    w.end_row();
  }
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ogr::io
