#pragma once
//------------------------------------------------------------------------------
// Problem files (JSON), matrices (CSV) and fixed-width tables.
//
// Problem JSON:
//   { "A": [[...], ...], "b": [...],            inequalities A x <= b
//     "eqA": [[...]], "eqb": [...],              optional equalities
//     "tol_active": 1e-8, "tol_feas": 1e-9,      optional
//     "p": [...], "start": [...], "interior": [...] }   optional points
//------------------------------------------------------------------------------

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polyproj/image.hpp"
#include "polyproj/polyhedron.hpp"

namespace polyproj {

using Json = nlohmann::json;

struct ProblemFile {
  PolyhedronH poly;
  std::optional<Vector> p;
  std::optional<Vector> start;
  std::optional<Vector> interior;
};

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ParseError, "field \"" + field + "\": " + why);
}

inline double json_number(const Json& j, const std::string& field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(field, "value is not finite");
  return v;
}

}  // namespace detail

inline Vector json_vector(const Json& j, const std::string& field) {
  if (!j.is_array()) detail::parse_fail(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = detail::json_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

/// `cols` < 0 accepts any consistent width.
inline Matrix json_matrix(const Json& j, const std::string& field, Index cols = -1) {
  if (!j.is_array()) detail::parse_fail(field, "expected an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows > 0 && cols < 0) {
    if (!j[0].is_array()) detail::parse_fail(field + "[0]", "expected an array of numbers");
    cols = static_cast<Index>(j[0].size());
  }
  Matrix m(rows, std::max<Index>(cols, 0));
  for (Index i = 0; i < rows; ++i) {
    const std::string name = field + "[" + std::to_string(i) + "]";
    const Vector r = json_vector(j[static_cast<std::size_t>(i)], name);
    if (r.size() != cols) detail::parse_fail(name, "row has " + std::to_string(r.size()) + " entries, expected " + std::to_string(cols));
    m.row(i) = r.transpose();
  }
  return m;
}

inline Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Index i = 0; i < m.rows(); ++i) j.push_back(to_json(Vector(m.row(i).transpose())));
  return j;
}

inline Json to_json(const IndexList& l) {
  Json j = Json::array();
  for (Index i : l) j.push_back(i);
  return j;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

inline std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline ProblemFile parse_problem(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "problem must be a JSON object");
  if (!j.contains("A")) detail::parse_fail("A", "missing");
  if (!j.contains("b")) detail::parse_fail("b", "missing");
  Matrix a = json_matrix(j["A"], "A");
  if (a.cols() == 0) detail::parse_fail("A", "needs at least one column");
  Vector b = json_vector(j["b"], "b");
  if (b.size() != a.rows()) detail::parse_fail("b", "length " + std::to_string(b.size()) + " does not match " + std::to_string(a.rows()) + " rows of A");

  Tolerances tol;
  if (j.contains("tol_active")) tol.active = detail::json_number(j["tol_active"], "tol_active");
  if (j.contains("tol_feas")) tol.feas = detail::json_number(j["tol_feas"], "tol_feas");

  auto point = [&](const char* key) -> std::optional<Vector> {
    if (!j.contains(key)) return std::nullopt;
    Vector v = json_vector(j[key], key);
    if (v.size() != a.cols()) detail::parse_fail(key, "expected " + std::to_string(a.cols()) + " coordinates");
    return v;
  };

  const bool has_eq = j.contains("eqA") || j.contains("eqb");
  if (has_eq && !(j.contains("eqA") && j.contains("eqb"))) detail::parse_fail(j.contains("eqA") ? "eqb" : "eqA", "missing");
  std::optional<Vector> p = point("p"), start = point("start"), interior = point("interior");
  if (has_eq) {
    Matrix ea = json_matrix(j["eqA"], "eqA", a.cols());
    Vector eb = json_vector(j["eqb"], "eqb");
    if (eb.size() != ea.rows()) detail::parse_fail("eqb", "length does not match rows of eqA");
    return {PolyhedronH(std::move(a), std::move(b), std::move(ea), std::move(eb), tol), p, start, interior};
  }
  return {PolyhedronH(std::move(a), std::move(b), tol), p, start, interior};
}

inline Json problem_to_json(const PolyhedronH& poly) {
  Json j;
  j["A"] = to_json(poly.a());
  j["b"] = to_json(poly.b());
  if (poly.has_equalities()) {
    j["eqA"] = to_json(poly.eq_a());
    j["eqb"] = to_json(poly.eq_b());
  }
  j["tol_active"] = poly.tol_active();
  j["tol_feas"] = poly.tol_feas();
  return j;
}

/// Comma separated numbers, one row per line; blank lines and '#' lines skipped.
inline Matrix parse_csv_matrix(const std::string& text, const std::string& source = "csv") {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t\r", used) != std::string::npos || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, source + " line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ParseError, source + " line " + std::to_string(lineno) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, source + ": no data rows");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
  }
  return m;
}

inline Matrix read_csv_matrix(const std::string& path) { return parse_csv_matrix(read_text(path), path); }

//------------------------------------------------------------------------------
// Tables
//------------------------------------------------------------------------------

enum class NumberStyle { fixed, scientific };

/// 4-place fixed, or a.bcde×10^k.
inline std::string format_number(double x, NumberStyle style = NumberStyle::fixed, int places = 4) {
  char buf[64];
  if (style == NumberStyle::fixed) {
    std::snprintf(buf, sizeof buf, "%.*f", places, x);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);  // no "-0.0000"
    return s;
  }
  if (x == 0.0) {
    std::snprintf(buf, sizeof buf, "%.*f", places, 0.0);
    return buf;
  }
  int e = static_cast<int>(std::floor(std::log10(std::abs(x))));
  double m = x / std::pow(10.0, e);
  std::snprintf(buf, sizeof buf, "%.*f", places, m);
  if (std::abs(std::stod(buf)) >= 10.0) {
    ++e;
    m = x / std::pow(10.0, e);
    std::snprintf(buf, sizeof buf, "%.*f", places, m);
  }
  std::string s = buf;
  if (e != 0) s += "×10^" + std::to_string(e);
  return s;
}

struct RenderedTable {
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> r) {
    if (r.size() != headers.size()) throw Error(ErrorCode::InvalidInput, "table row width differs from header");
    rows.push_back(std::move(r));
  }
};

namespace detail {
// Display width; counts UTF-8 code points.
inline std::size_t text_width(const std::string& s) {
  std::size_t w = 0;
  for (unsigned char ch : s) w += (ch & 0xC0) != 0x80;
  return w;
}
}  // namespace detail

inline std::string render(const RenderedTable& t) {
  std::vector<std::size_t> w(t.headers.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = detail::text_width(t.headers[c]);
    for (const auto& r : t.rows) w[c] = std::max(w[c], detail::text_width(r[c]));
  }
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) l += "  ";
      l += std::string(w[c] - detail::text_width(cells[c]), ' ') + cells[c];
    }
    out += l + "\n";
  };
  line(t.headers);
  std::size_t total = 0;
  for (auto x : w) total += x;
  out += std::string(total + 2 * (w.empty() ? 0 : w.size() - 1), '-') + "\n";
  for (const auto& r : t.rows) line(r);
  return out;
}

inline std::string render_csv(const RenderedTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) out += (c ? "," : "") + cells[c];
    out += "\n";
  };
  line(t.headers);
  for (const auto& r : t.rows) line(r);
  return out;
}

/// Rows of the system as "  1.0000 z0 - 2.0000 z1 <= 3.0000".
inline std::string render_system(const IneqSystem& s, const std::string& var = "z", NumberStyle style = NumberStyle::fixed) {
  if (s.empty_marker) return "(no constraints)\n";
  RenderedTable t;
  for (Index k = 0; k < s.vars(); ++k) t.headers.push_back(var + std::to_string(k));
  t.headers.push_back("<=");
  t.headers.push_back("rhs");
  for (Index i = 0; i < s.rows(); ++i) {
    std::vector<std::string> r;
    for (Index k = 0; k < s.vars(); ++k) r.push_back(format_number(s.b(i, k), style));
    r.push_back("<=");
    r.push_back(format_number(s.c(i), style));
    t.add_row(std::move(r));
  }
  return render(t);
}

inline std::string render_matrix(const Matrix& m, NumberStyle style = NumberStyle::fixed) {
  RenderedTable t;
  for (Index k = 0; k < m.cols(); ++k) t.headers.push_back("c" + std::to_string(k));
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<std::string> r;
    for (Index k = 0; k < m.cols(); ++k) r.push_back(format_number(m(i, k), style));
    t.add_row(std::move(r));
  }
  return render(t);
}

}  // namespace polyproj
