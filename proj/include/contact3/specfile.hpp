#pragma once

// Reader and writer for the .cmm manifold spec format: a line-oriented,
// sectioned text file describing a chart and either a frame or a tensor
// presentation of a contact metric structure.
//
//   # comment lines and trailing comments start with '#'
//   [manifold]
//   name = example3
//   coords = x y z                     (optional, default "x y z")
//   box = -1 1 -1 1 0.25 2             (optional, lo/hi per coordinate)
//   positive = z                       (repeatable domain constraint)
//   nonzero = x^2 - 1                  (repeatable domain constraint)
//
//   [frame]
//   xi = 1, 0, 0
//   e = -2*y, 2*x*z - 1, 1
//   phie = 0, 1, 0
//
// or, instead of [frame]:
//
//   [tensor]
//   g = 1, 0, 0, 1, 0, 1               (g11, g12, g13, g22, g23, g33)
//   phi = 0, 0, 0, 0, 0, -1, 0, 1, 0   (row-major)
//   xi = 0, 0, 1
//
// Values after '=' are expression strings in the declared coordinates;
// they may use any coordinate regardless of where the key sits in the file.

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "contact3/structure.hpp"

namespace contact3 {

class SpecError : public std::runtime_error {
 public:
  SpecError(int line, int column, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) +
                                          ", column " + std::to_string(column) +
                                          ": " + message
                                    : message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class SpecMode { Frame, Tensor };

struct ManifoldSpec {
  std::string name;
  ChartSpec chart;
  SpecMode mode = SpecMode::Frame;
  // Frame mode: all three fields. Tensor mode: xi plus g and phi.
  VectorField xi{};
  VectorField e{};
  VectorField phie{};
  Mat3 g{};
  TensorField11 phi{};
};

namespace detail {

struct RawEntry {
  int line = 0;
  int value_column = 0;  // 1-based column where the value text starts
  std::string section;
  std::string key;
  std::string value;
};

inline std::string trim(const std::string& s, int* leading = nullptr) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) {
    if (leading) *leading = static_cast<int>(s.size());
    return "";
  }
  std::size_t e = s.find_last_not_of(" \t");
  if (leading) *leading = static_cast<int>(b);
  return s.substr(b, e - b + 1);
}

inline Expr parse_spec_expr(const std::string& text, const CoordNames& coords,
                            int line, int column) {
  try {
    return parse(text, coords);
  } catch (const ParseError& pe) {
    int col = column + static_cast<int>(pe.position()) - 1;
    throw SpecError(line, col, pe.what());
  }
}

// Splits a comma-separated list, recording the column of each piece.
inline std::vector<std::pair<std::string, int>> split_list(
    const std::string& value, int column) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = value.find(',', start);
    std::string piece = value.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    int lead = 0;
    std::string trimmed = trim(piece, &lead);
    out.emplace_back(trimmed, column + static_cast<int>(start) + lead);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline void parse_expr_list(const RawEntry& entry, const CoordNames& coords,
                            std::size_t want, Expr* out) {
  auto pieces = split_list(entry.value, entry.value_column);
  if (pieces.size() != want) {
    throw SpecError(entry.line, entry.value_column,
                    "'" + entry.key + "' needs " + std::to_string(want) +
                        " comma-separated expressions, got " +
                        std::to_string(pieces.size()));
  }
  for (std::size_t i = 0; i < want; ++i) {
    if (pieces[i].first.empty())
      throw SpecError(entry.line, pieces[i].second,
                      "empty expression in '" + entry.key + "'");
    out[i] = parse_spec_expr(pieces[i].first, coords, entry.line,
                             pieces[i].second);
  }
}

}  // namespace detail

inline ManifoldSpec parse_manifold_spec(const std::string& text) {
  // Structural pass: sections and key/value entries with positions.
  std::vector<detail::RawEntry> entries;
  std::string section;
  int manifold_line = 0, frame_line = 0, tensor_line = 0;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    int lead = 0;
    std::string body = detail::trim(line, &lead);
    if (body.empty()) continue;

    if (body.front() == '[') {
      if (body.back() != ']')
        throw SpecError(line_no, lead + 1, "unterminated section header");
      section = body.substr(1, body.size() - 2);
      if (section == "manifold") {
        if (manifold_line) throw SpecError(line_no, lead + 1, "duplicate [manifold] section");
        manifold_line = line_no;
      } else if (section == "frame") {
        if (frame_line) throw SpecError(line_no, lead + 1, "duplicate [frame] section");
        frame_line = line_no;
      } else if (section == "tensor") {
        if (tensor_line) throw SpecError(line_no, lead + 1, "duplicate [tensor] section");
        tensor_line = line_no;
      } else {
        throw SpecError(line_no, lead + 1, "unknown section [" + section + "]");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw SpecError(line_no, lead + 1, "expected 'key = value'");
    if (section.empty())
      throw SpecError(line_no, lead + 1, "entry before any section header");

    detail::RawEntry entry;
    entry.line = line_no;
    entry.section = section;
    entry.key = detail::trim(line.substr(0, eq));
    if (entry.key.empty())
      throw SpecError(line_no, lead + 1, "missing key before '='");
    int vlead = 0;
    entry.value = detail::trim(line.substr(eq + 1), &vlead);
    entry.value_column = static_cast<int>(eq) + 2 + vlead;
    if (entry.value.empty())
      throw SpecError(line_no, entry.value_column, "missing value for '" + entry.key + "'");
    entries.push_back(entry);
  }

  if (!manifold_line) throw SpecError(line_no, 1, "missing [manifold] section");
  if (frame_line && tensor_line)
    throw SpecError(tensor_line, 1, "[frame] and [tensor] are mutually exclusive");
  if (!frame_line && !tensor_line)
    throw SpecError(line_no, 1, "missing [frame] or [tensor] section");

  ManifoldSpec spec;
  spec.mode = frame_line ? SpecMode::Frame : SpecMode::Tensor;

  // Coordinates first: every expression value depends on them.
  for (const auto& e : entries) {
    if (e.section != "manifold" || e.key != "coords") continue;
    std::istringstream cs(e.value);
    std::vector<std::string> names;
    std::string n;
    while (cs >> n) names.push_back(n);
    if (names.size() != kDim)
      throw SpecError(e.line, e.value_column,
                      "'coords' needs exactly 3 names, got " +
                          std::to_string(names.size()));
    for (int i = 0; i < kDim; ++i) spec.chart.coords[i] = names[i];
    if (names[0] == names[1] || names[0] == names[2] || names[1] == names[2])
      throw SpecError(e.line, e.value_column, "coordinate names must be distinct");
  }

  std::map<std::string, int> seen;
  for (const auto& e : entries) {
    std::string slot = e.section + "." + e.key;
    if (e.key != "nonzero" && e.key != "positive") {
      if (seen.count(slot))
        throw SpecError(e.line, 1, "duplicate key '" + e.key + "' in [" + e.section + "]");
      seen[slot] = e.line;
    }

    if (e.section == "manifold") {
      if (e.key == "name") {
        spec.name = e.value;
      } else if (e.key == "coords") {
        // handled above
      } else if (e.key == "box") {
        std::istringstream bs(e.value);
        std::vector<double> vals;
        double v;
        while (bs >> v) vals.push_back(v);
        if (!bs.eof() || vals.size() != 2 * kDim)
          throw SpecError(e.line, e.value_column,
                          "'box' needs 6 numbers (lo hi per coordinate)");
        for (int i = 0; i < kDim; ++i) {
          spec.chart.box[i].lo = vals[2 * i];
          spec.chart.box[i].hi = vals[2 * i + 1];
          if (!(vals[2 * i] < vals[2 * i + 1]))
            throw SpecError(e.line, e.value_column,
                            "box interval " + std::to_string(i + 1) +
                                " must have lo < hi");
        }
      } else if (e.key == "nonzero" || e.key == "positive") {
        DomainConstraint c;
        c.expr = detail::parse_spec_expr(e.value, spec.chart.coords, e.line,
                                         e.value_column);
        c.kind = e.key == "nonzero" ? ConstraintKind::NonZero
                                    : ConstraintKind::Positive;
        spec.chart.constraints.push_back(c);
      } else {
        throw SpecError(e.line, 1, "unknown key '" + e.key + "' in [manifold]");
      }
    } else if (e.section == "frame") {
      if (e.key == "xi") {
        detail::parse_expr_list(e, spec.chart.coords, 3, spec.xi.data());
      } else if (e.key == "e") {
        detail::parse_expr_list(e, spec.chart.coords, 3, spec.e.data());
      } else if (e.key == "phie") {
        detail::parse_expr_list(e, spec.chart.coords, 3, spec.phie.data());
      } else {
        throw SpecError(e.line, 1, "unknown key '" + e.key + "' in [frame]");
      }
    } else {  // tensor
      if (e.key == "g") {
        Expr sym[6];
        detail::parse_expr_list(e, spec.chart.coords, 6, sym);
        spec.g[0][0] = sym[0];
        spec.g[0][1] = spec.g[1][0] = sym[1];
        spec.g[0][2] = spec.g[2][0] = sym[2];
        spec.g[1][1] = sym[3];
        spec.g[1][2] = spec.g[2][1] = sym[4];
        spec.g[2][2] = sym[5];
      } else if (e.key == "phi") {
        Expr rows[9];
        detail::parse_expr_list(e, spec.chart.coords, 9, rows);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) spec.phi[i][j] = rows[3 * i + j];
      } else if (e.key == "xi") {
        detail::parse_expr_list(e, spec.chart.coords, 3, spec.xi.data());
      } else {
        throw SpecError(e.line, 1, "unknown key '" + e.key + "' in [tensor]");
      }
    }
  }

  if (spec.name.empty())
    throw SpecError(manifold_line, 1, "[manifold] section needs a 'name'");
  auto require = [&](const char* key, int section_line, const char* section_name) {
    if (!seen.count(std::string(section_name) + "." + key))
      throw SpecError(section_line, 1,
                      std::string("[") + section_name + "] section needs '" +
                          key + "'");
  };
  if (spec.mode == SpecMode::Frame) {
    require("xi", frame_line, "frame");
    require("e", frame_line, "frame");
    require("phie", frame_line, "frame");
  } else {
    require("g", tensor_line, "tensor");
    require("phi", tensor_line, "tensor");
    require("xi", tensor_line, "tensor");
  }
  return spec;
}

inline ManifoldSpec load_manifold_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(0, 0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifold_spec(buf.str());
}

inline std::string serialize_manifold_spec(const ManifoldSpec& spec) {
  std::ostringstream out;
  const CoordNames& coords = spec.chart.coords;
  auto expr_list = [&](const Expr* es, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      if (i) s += ", ";
      s += to_string(es[i], coords);
    }
    return s;
  };

  out << "[manifold]\n";
  out << "name = " << spec.name << "\n";
  out << "coords = " << coords[0] << " " << coords[1] << " " << coords[2]
      << "\n";
  out << "box =";
  for (int i = 0; i < kDim; ++i)
    out << " " << detail::format_double(spec.chart.box[i].lo) << " "
        << detail::format_double(spec.chart.box[i].hi);
  out << "\n";
  for (const auto& c : spec.chart.constraints) {
    out << (c.kind == ConstraintKind::NonZero ? "nonzero = " : "positive = ")
        << to_string(c.expr, coords) << "\n";
  }
  out << "\n";

  if (spec.mode == SpecMode::Frame) {
    out << "[frame]\n";
    out << "xi = " << expr_list(spec.xi.data(), 3) << "\n";
    out << "e = " << expr_list(spec.e.data(), 3) << "\n";
    out << "phie = " << expr_list(spec.phie.data(), 3) << "\n";
  } else {
    out << "[tensor]\n";
    Expr sym[6] = {spec.g[0][0], spec.g[0][1], spec.g[0][2],
                   spec.g[1][1], spec.g[1][2], spec.g[2][2]};
    out << "g = " << expr_list(sym, 6) << "\n";
    Expr rows[9];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) rows[3 * i + j] = spec.phi[i][j];
    out << "phi = " << expr_list(rows, 9) << "\n";
    out << "xi = " << expr_list(spec.xi.data(), 3) << "\n";
  }
  return out.str();
}

inline void save_manifold_spec(const ManifoldSpec& spec,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecError(0, 0, "cannot write '" + path + "'");
  out << serialize_manifold_spec(spec);
}

inline ContactStructure build_structure(const ManifoldSpec& spec) {
  if (spec.mode == SpecMode::Frame)
    return build_from_frame(spec.chart, spec.xi, spec.e, spec.phie);
  return build_from_tensors(spec.chart, spec.g, spec.phi, spec.xi);
}

}  // namespace contact3
