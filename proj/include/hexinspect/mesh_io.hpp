#pragma once

// Import of MEDIT (.mesh) and legacy ASCII VTK (.vtk) hexahedral meshes, zipped
// collections of them, and OBJ/PLY export of extracted surfaces.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/hex_mesh.hpp"
#include "hexinspect/surface_mesh.hpp"
#include "hexinspect/zip.hpp"

namespace hexinspect {

enum class MeshFormat { Auto, Medit, Vtk };

struct MeshSource {
  std::string bytes;
  MeshFormat format = MeshFormat::Auto;
  std::string origin;
};

namespace io_detail {

struct Token {
  std::string_view text;
  std::size_t line;
};

/// Whitespace tokenizer that tracks line numbers. `comment` starts a comment
/// running to end of line when it begins a token (0 disables comments).
class Tokenizer {
 public:
  Tokenizer(std::string_view src, std::string origin, char comment)
      : src_(src), origin_(std::move(origin)), comment_(comment) {}

  bool next(Token& t) {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (comment_ != 0 && c == comment_) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        t = {src_.substr(start, pos_ - start), line_};
        last_line_ = line_;
        return true;
      }
    }
    return false;
  }

  Token expect(std::string_view what) {
    Token t;
    if (!next(t)) {
      if (!context_.empty()) fail(line_, "truncated section '" + context_ + "': expected " + std::string(what));
      fail(line_, "unexpected end of file, expected " + std::string(what));
    }
    return t;
  }

  /// Section name reported when input ends prematurely.
  void set_context(std::string_view section) { context_ = section; }

  /// Rest of the current line, without the trailing newline; positions after it.
  std::string_view rest_of_line() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    std::string_view s = src_.substr(start, pos_ - start);
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (pos_ < src_.size()) {
      ++pos_;
      ++line_;
    }
    return s;
  }

  double number(std::string_view what) {
    const Token t = expect(what);
    double v = 0.0;
    const auto* first = t.text.data();
    const auto* last = first + t.text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
      fail(t.line, "expected " + std::string(what) + ", got '" + std::string(t.text) + "'");
    return v;
  }

  long long integer(std::string_view what) {
    const Token t = expect(what);
    long long v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
      fail(t.line, "expected " + std::string(what) + ", got '" + std::string(t.text) + "'");
    return v;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw ParseError(origin_, line, msg); }
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t last_line() const { return last_line_; }
  [[nodiscard]] const std::string& origin() const { return origin_; }

 private:
  std::string_view src_;
  std::string origin_;
  char comment_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t last_line_ = 1;
  std::string context_;
};

inline std::string lower(std::string_view s) {
  std::string r(s);
  std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return r;
}

inline bool has_duplicate(const Cell& c) {
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j)
      if (c[i] == c[j]) return true;
  return false;
}

inline std::string extension_of(std::string_view name) {
  const auto slash = name.find_last_of("/\\");
  const auto base = slash == std::string_view::npos ? name : name.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  return dot == std::string_view::npos ? std::string{} : lower(base.substr(dot + 1));
}

}  // namespace io_detail

/// Parses a MEDIT ASCII mesh. Non-hexahedral sections are read and dropped.
inline HexMesh parse_medit(std::string_view text, const std::string& origin = {}) {
  using io_detail::lower;
  io_detail::Tokenizer tk(text, origin, '#');
  HexMesh mesh;
  mesh.name = origin;

  io_detail::Token t;
  if (!tk.next(t) || lower(t.text) != "meshversionformatted")
    tk.fail(tk.last_line(), "malformed header: expected 'MeshVersionFormatted'");
  const long long version = tk.integer("format version");
  if (version < 1 || version > 4) tk.fail(tk.last_line(), "unsupported MEDIT version " + std::to_string(version));

  int dimension = 0;
  struct PendingCell {
    Cell cell;
    std::size_t line;
  };
  std::vector<PendingCell> pending;
  bool saw_vertices = false;
  std::vector<std::string> skipped;

  // Entries per element for sections we recognise but do not keep.
  static const std::map<std::string, int> kSkipped = {
      {"edges", 3},          {"triangles", 4},          {"quadrilaterals", 5},
      {"tetrahedra", 5},     {"prisms", 7},             {"pyramids", 6},
      {"corners", 1},        {"ridges", 1},             {"requiredvertices", 1},
      {"requirededges", 1},  {"requiredtriangles", 1},  {"requiredquadrilaterals", 1},
      {"normals", 3},        {"tangents", 3},           {"normalatvertices", 2},
      {"tangentatvertices", 2}, {"tangentatedges", 3},  {"normalattrianglevertices", 3},
      {"normalatquadrilateralvertices", 3},
  };

  while (tk.next(t)) {
    const std::string key = lower(t.text);
    const std::size_t key_line = t.line;
    if (key == "end") break;
    if (key == "dimension") {
      const long long d = tk.integer("dimension");
      if (d != 3) tk.fail(key_line, "only 3D meshes are supported (Dimension " + std::to_string(d) + ")");
      dimension = 3;
      continue;
    }
    if (dimension == 0) tk.fail(key_line, "malformed header: 'Dimension' must precede section '" + std::string(t.text) + "'");

    tk.set_context(t.text);
    const long long count = tk.integer("element count");
    if (count < 0) tk.fail(key_line, "negative element count in section '" + std::string(t.text) + "'");

    if (key == "vertices") {
      saw_vertices = true;
      mesh.vertices.reserve(mesh.vertices.size() + static_cast<std::size_t>(count));
      for (long long i = 0; i < count; ++i) {
        Vec3 p;
        p.x = tk.number("vertex coordinate");
        p.y = tk.number("vertex coordinate");
        p.z = tk.number("vertex coordinate");
        tk.integer("vertex reference");
        mesh.vertices.push_back(p);
      }
    } else if (key == "hexahedra") {
      pending.reserve(pending.size() + static_cast<std::size_t>(count));
      for (long long i = 0; i < count; ++i) {
        PendingCell pc{};
        for (int k = 0; k < 8; ++k) {
          const long long idx = tk.integer("hexahedron vertex index");
          if (k == 0) pc.line = tk.last_line();
          if (idx < 1 || idx > 0xFFFFFFFFLL)
            tk.fail(tk.last_line(), "hexahedron vertex index " + std::to_string(idx) + " out of range");
          pc.cell[k] = static_cast<VertexId>(idx - 1);
        }
        tk.integer("hexahedron reference");
        pending.push_back(pc);
      }
    } else if (auto it = kSkipped.find(key); it != kSkipped.end()) {
      for (long long i = 0; i < count * it->second; ++i) tk.expect("element entry");
      skipped.emplace_back(t.text);
    } else {
      tk.fail(key_line, "unknown section '" + std::string(t.text) + "'");
    }
  }
  if (dimension == 0) tk.fail(tk.last_line(), "malformed header: missing 'Dimension'");
  if (!saw_vertices) tk.fail(tk.last_line(), "missing 'Vertices' section");

  mesh.cells.reserve(pending.size());
  for (const auto& pc : pending) {
    for (VertexId v : pc.cell)
      if (v >= mesh.vertices.size())
        tk.fail(pc.line, "hexahedron vertex index " + std::to_string(v + 1) + " out of range (" +
                             std::to_string(mesh.vertices.size()) + " vertices)");
    if (io_detail::has_duplicate(pc.cell)) tk.fail(pc.line, "hexahedron repeats a vertex index");
    mesh.cells.push_back(pc.cell);
  }
  for (const auto& s : skipped) mesh.warnings.push_back("skipped section '" + s + "'");
  if (mesh.cells.empty()) mesh.warnings.emplace_back("no hexahedra");
  return mesh;
}

/// Parses a legacy ASCII VTK unstructured grid, keeping cells of type 12.
inline HexMesh parse_vtk(std::string_view text, const std::string& origin = {}) {
  using io_detail::lower;
  io_detail::Tokenizer tk(text, origin, 0);
  HexMesh mesh;
  mesh.name = origin;

  const std::string_view header = tk.rest_of_line();
  if (lower(header).rfind("# vtk datafile version", 0) != 0)
    tk.fail(1, "malformed header: expected '# vtk DataFile Version'");
  tk.rest_of_line();  // title
  io_detail::Token t = tk.expect("ASCII or BINARY");
  const std::string encoding = lower(t.text);
  if (encoding == "binary") tk.fail(t.line, "binary VTK files are not supported (ASCII only)");
  if (encoding != "ascii") tk.fail(t.line, "expected 'ASCII', got '" + std::string(t.text) + "'");
  t = tk.expect("DATASET");
  if (lower(t.text) != "dataset") tk.fail(t.line, "expected 'DATASET'");
  t = tk.expect("dataset type");
  if (lower(t.text) != "unstructured_grid")
    tk.fail(t.line, "unsupported dataset '" + std::string(t.text) + "' (UNSTRUCTURED_GRID only)");

  std::vector<std::vector<long long>> cells;
  std::vector<std::size_t> cell_lines;
  bool have_cells = false;
  bool have_points = false;
  long long type_count = -1;
  std::size_t types_line = 0;
  std::vector<long long> types;

  while (tk.next(t)) {
    const std::string key = lower(t.text);
    const std::size_t key_line = t.line;
    tk.set_context(t.text);
    if (key == "points") {
      const long long n = tk.integer("point count");
      tk.expect("point data type");
      if (n < 0) tk.fail(key_line, "negative point count");
      mesh.vertices.reserve(static_cast<std::size_t>(n));
      for (long long i = 0; i < n; ++i) {
        Vec3 p;
        p.x = tk.number("coordinate");
        p.y = tk.number("coordinate");
        p.z = tk.number("coordinate");
        mesh.vertices.push_back(p);
      }
      have_points = true;
    } else if (key == "cells") {
      const long long n = tk.integer("cell count");
      const long long size = tk.integer("cell list size");
      if (n < 0 || size < 0) tk.fail(key_line, "negative CELLS header");
      io_detail::Token peek;
      // VTK >= 5.1 writes OFFSETS/CONNECTIVITY arrays instead of counted lists.
      if (n > 0 || size > 0) {
        if (!tk.next(peek)) tk.fail(key_line, "truncated CELLS section");
        if (lower(peek.text) == "offsets") {
          tk.expect("offsets type");
          std::vector<long long> offsets(static_cast<std::size_t>(n));
          for (auto& o : offsets) o = tk.integer("offset");
          io_detail::Token c = tk.expect("CONNECTIVITY");
          if (lower(c.text) != "connectivity") tk.fail(c.line, "expected 'CONNECTIVITY'");
          tk.expect("connectivity type");
          std::vector<long long> conn(static_cast<std::size_t>(size));
          for (auto& v : conn) v = tk.integer("vertex index");
          for (long long i = 0; i + 1 < n; ++i) {
            const long long a = offsets[static_cast<std::size_t>(i)];
            const long long b = offsets[static_cast<std::size_t>(i + 1)];
            if (a < 0 || b < a || b > size) tk.fail(key_line, "invalid OFFSETS entry");
            cells.emplace_back(conn.begin() + a, conn.begin() + b);
            cell_lines.push_back(key_line);
          }
        } else {
          long long consumed = 0;
          for (long long i = 0; i < n; ++i) {
            long long k = 0;
            std::size_t line = 0;
            if (i == 0) {
              const auto res = std::from_chars(peek.text.data(), peek.text.data() + peek.text.size(), k);
              if (res.ec != std::errc{}) tk.fail(peek.line, "expected cell vertex count");
              line = peek.line;
            } else {
              k = tk.integer("cell vertex count");
              line = tk.last_line();
            }
            if (k < 0 || k > 1000) tk.fail(line, "invalid cell vertex count " + std::to_string(k));
            std::vector<long long> ids(static_cast<std::size_t>(k));
            for (auto& v : ids) v = tk.integer("vertex index");
            consumed += k + 1;
            cells.push_back(std::move(ids));
            cell_lines.push_back(line);
          }
          if (consumed != size)
            tk.fail(key_line, "CELLS list size " + std::to_string(size) + " does not match content (" +
                                  std::to_string(consumed) + ")");
        }
      }
      have_cells = true;
    } else if (key == "cell_types") {
      type_count = tk.integer("cell type count");
      types_line = key_line;
      if (type_count < 0) tk.fail(key_line, "negative cell type count");
      types.resize(static_cast<std::size_t>(type_count));
      for (auto& ty : types) ty = tk.integer("cell type");
    } else if (key == "cell_data" || key == "point_data" || key == "field" || key == "metadata") {
      break;  // attribute arrays are not imported
    } else {
      tk.fail(key_line, "unknown keyword '" + std::string(t.text) + "'");
    }
  }
  if (!have_points) tk.fail(tk.last_line(), "missing POINTS section");
  if (!have_cells) tk.fail(tk.last_line(), "missing CELLS section");
  if (type_count < 0) tk.fail(tk.last_line(), "missing CELL_TYPES section");
  if (static_cast<std::size_t>(type_count) != cells.size())
    tk.fail(types_line, "CELL_TYPES declares " + std::to_string(type_count) + " cells but CELLS holds " +
                            std::to_string(cells.size()));

  std::size_t ignored = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (types[i] != 12) {
      ++ignored;
      continue;
    }
    if (cells[i].size() != 8) tk.fail(cell_lines[i], "hexahedron with " + std::to_string(cells[i].size()) + " vertices");
    Cell c{};
    for (int k = 0; k < 8; ++k) {
      const long long v = cells[i][static_cast<std::size_t>(k)];
      if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertices.size())
        tk.fail(cell_lines[i], "hexahedron vertex index " + std::to_string(v) + " out of range (" +
                                   std::to_string(mesh.vertices.size()) + " points)");
      c[k] = static_cast<VertexId>(v);
    }
    if (io_detail::has_duplicate(c)) tk.fail(cell_lines[i], "hexahedron repeats a vertex index");
    mesh.cells.push_back(c);
  }
  if (ignored > 0) mesh.warnings.push_back("ignored " + std::to_string(ignored) + " non-hexahedral cells");
  if (mesh.cells.empty()) mesh.warnings.emplace_back("no hexahedra");
  return mesh;
}

/// Format from the origin's extension, else from the leading token.
inline MeshFormat detect_format(const MeshSource& src) {
  if (src.format != MeshFormat::Auto) return src.format;
  const std::string ext = io_detail::extension_of(src.origin);
  if (ext == "mesh") return MeshFormat::Medit;
  if (ext == "vtk") return MeshFormat::Vtk;
  std::string_view s = src.bytes;
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos) {
    s.remove_prefix(first);
    if (io_detail::lower(s.substr(0, 22)) == "# vtk datafile version") return MeshFormat::Vtk;
    // skip MEDIT comment lines
    while (!s.empty() && s.front() == '#') {
      const auto nl = s.find('\n');
      s = nl == std::string_view::npos ? std::string_view{} : s.substr(nl + 1);
      const auto f = s.find_first_not_of(" \t\r\n");
      s = f == std::string_view::npos ? std::string_view{} : s.substr(f);
    }
    if (io_detail::lower(s.substr(0, 20)) == "meshversionformatted") return MeshFormat::Medit;
  }
  return MeshFormat::Auto;
}

inline HexMesh load_mesh(const MeshSource& src) {
  switch (detect_format(src)) {
    case MeshFormat::Medit: return parse_medit(src.bytes, src.origin);
    case MeshFormat::Vtk: return parse_vtk(src.bytes, src.origin);
    case MeshFormat::Auto: break;
  }
  throw FormatError("unrecognized mesh format for '" + (src.origin.empty() ? std::string("<input>") : src.origin) +
                    "' (expected .mesh or .vtk)");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path + "'");
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create '" + path + "'");
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write '" + path + "'");
}

inline void write_file(const std::string& path, const Bytes& data) { write_file(path, as_text(data)); }

inline HexMesh load_mesh_file(const std::string& path) {
  return load_mesh({read_file(path), MeshFormat::Auto, path});
}

inline bool is_supported_mesh_name(std::string_view name) {
  const std::string ext = io_detail::extension_of(name);
  return ext == "mesh" || ext == "vtk";
}

struct NamedMesh {
  std::string name;
  HexMesh mesh;
};

struct ArchiveContents {
  std::vector<NamedMesh> meshes;     ///< lexicographic by entry name
  std::vector<std::string> skipped;  ///< unsupported entries
  struct Failure {
    std::string name;
    std::string error;
  };
  std::vector<Failure> failures;     ///< supported entries that failed to parse
};

/// Every `.mesh`/`.vtk` entry of a zip archive, in entry-name order.
inline ArchiveContents read_archive(std::span<const std::uint8_t> zip) {
  auto entries = zip_read(zip);
  std::sort(entries.begin(), entries.end(), [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });
  ArchiveContents out;
  for (auto& e : entries) {
    if (!is_supported_mesh_name(e.name)) {
      out.skipped.push_back("skipped unsupported entry '" + e.name + "'");
      continue;
    }
    try {
      out.meshes.push_back({e.name, load_mesh({std::string(as_text(e.data)), MeshFormat::Auto, e.name})});
    } catch (const Error& err) {
      out.failures.push_back({e.name, err.what()});
    }
  }
  if (out.meshes.empty()) throw ArchiveError("archive contains no parseable meshes");
  return out;
}

enum class SurfaceFormat { Obj, Ply };

namespace io_detail {
inline void put(std::string& out, const char* fmt, double a, double b, double c) {
  char buf[128];
  const int n = std::snprintf(buf, sizeof buf, fmt, a, b, c);
  out.append(buf, static_cast<std::size_t>(n));
}
inline int to_byte(double c) { return static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }
}  // namespace io_detail

/// Text serialisation of a surface with per-vertex normals and colours.
inline std::string write_surface(const SurfaceMesh& s, SurfaceFormat format) {
  if (s.empty()) throw ValidationError("write_surface: empty surface");
  std::string out;
  if (format == SurfaceFormat::Obj) {
    out += "# hexinspect surface\n";
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      io_detail::put(out, "v %.17g %.17g %.17g", s.positions[i].x, s.positions[i].y, s.positions[i].z);
      io_detail::put(out, " %.6g %.6g %.6g\n", s.colors[i].r, s.colors[i].g, s.colors[i].b);
    }
    for (const auto& n : s.normals) io_detail::put(out, "vn %.17g %.17g %.17g\n", n.x, n.y, n.z);
    for (const auto& t : s.triangles) {
      out += "f";
      for (auto v : t) out += " " + std::to_string(v + 1) + "//" + std::to_string(v + 1);
      out += "\n";
    }
    return out;
  }
  out += "ply\nformat ascii 1.0\ncomment hexinspect surface\n";
  out += "element vertex " + std::to_string(s.positions.size()) + "\n";
  out += "property double x\nproperty double y\nproperty double z\n";
  out += "property double nx\nproperty double ny\nproperty double nz\n";
  out += "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out += "element face " + std::to_string(s.triangles.size()) + "\n";
  out += "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < s.positions.size(); ++i) {
    io_detail::put(out, "%.17g %.17g %.17g", s.positions[i].x, s.positions[i].y, s.positions[i].z);
    io_detail::put(out, " %.17g %.17g %.17g", s.normals[i].x, s.normals[i].y, s.normals[i].z);
    out += " " + std::to_string(io_detail::to_byte(s.colors[i].r)) + " " +
           std::to_string(io_detail::to_byte(s.colors[i].g)) + " " + std::to_string(io_detail::to_byte(s.colors[i].b)) +
           "\n";
  }
  for (const auto& t : s.triangles)
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  return out;
}

/// Reads back the ASCII PLY subset produced by `write_surface`.
inline SurfaceMesh read_ply(std::string_view text, const std::string& origin = {}) {
  io_detail::Tokenizer tk(text, origin, 0);
  io_detail::Token t = tk.expect("ply");
  if (t.text != "ply") tk.fail(t.line, "not a PLY file");
  std::size_t nv = 0, nf = 0;
  std::vector<std::string> props;
  for (;;) {
    t = tk.expect("header");
    if (t.text == "end_header") break;
    if (t.text == "format") {
      if (tk.expect("format").text != "ascii") tk.fail(t.line, "only ASCII PLY is supported");
      tk.expect("version");
    } else if (t.text == "comment") {
      tk.rest_of_line();
    } else if (t.text == "element") {
      const auto kind = tk.expect("element name");
      const auto n = static_cast<std::size_t>(tk.integer("element count"));
      (kind.text == "vertex" ? nv : nf) = n;
    } else if (t.text == "property") {
      const auto type = tk.expect("property type");
      if (type.text == "list") {
        tk.expect("list count type");
        tk.expect("list item type");
      }
      const auto name = tk.expect("property name");
      if (type.text != "list") props.emplace_back(name.text);
    }
  }
  SurfaceMesh s;
  for (std::size_t i = 0; i < nv; ++i) {
    Vec3 p, n;
    Rgb c{1, 1, 1};
    for (const auto& pr : props) {
      const double v = tk.number("vertex property");
      if (pr == "x") p.x = v;
      else if (pr == "y") p.y = v;
      else if (pr == "z") p.z = v;
      else if (pr == "nx") n.x = v;
      else if (pr == "ny") n.y = v;
      else if (pr == "nz") n.z = v;
      else if (pr == "red") c.r = v / 255.0;
      else if (pr == "green") c.g = v / 255.0;
      else if (pr == "blue") c.b = v / 255.0;
    }
    s.add_vertex(p, n, c, kInvalid);
  }
  for (std::size_t i = 0; i < nf; ++i) {
    const auto k = tk.integer("face size");
    if (k != 3) tk.fail(tk.last_line(), "only triangular faces are supported");
    std::array<std::uint32_t, 3> tri{};
    for (auto& v : tri) {
      const auto idx = tk.integer("face index");
      if (idx < 0 || static_cast<std::size_t>(idx) >= nv) tk.fail(tk.last_line(), "face index out of range");
      v = static_cast<std::uint32_t>(idx);
    }
    s.add_triangle(tri, kInvalid, kInvalid);
  }
  return s;
}

/// MEDIT text for a hex mesh (used by tools and tests to produce fixtures).
inline std::string write_medit(const HexMesh& m) {
  std::string out = "MeshVersionFormatted 2\nDimension 3\nVertices\n" + std::to_string(m.vertices.size()) + "\n";
  for (const auto& p : m.vertices) {
    io_detail::put(out, "%.17g %.17g %.17g", p.x, p.y, p.z);
    out += " 0\n";
  }
  out += "Hexahedra\n" + std::to_string(m.cells.size()) + "\n";
  for (const auto& c : m.cells) {
    for (VertexId v : c) out += std::to_string(v + 1) + " ";
    out += "0\n";
  }
  out += "End\n";
  return out;
}

}  // namespace hexinspect
