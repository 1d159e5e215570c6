#include "handvox/io.hpp"

#include "handvox/error.hpp"

#include "json.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

namespace handvox::io {

namespace {

constexpr std::uint8_t kFieldKind = 2;
// magic(4) version(2) dims(12) origin(12) voxel_size(4)
constexpr std::size_t kKindOffset = 34;

class Writer {
 public:
  void raw(const char* s, std::size_t n) { out_.insert(out_.end(), s, s + n); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      std::ostringstream msg;
      msg << "truncated data at byte " << pos_ << ": expected " << n << " bytes of " << what << ", found "
          << remaining();
      throw FormatError(msg.str());
    }
  }
  std::string raw(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail_at(std::size_t offset, const std::string& what) {
  std::ostringstream msg;
  msg << what << " (byte " << offset << ")";
  throw FormatError(msg.str());
}

void write_header(Writer& w, const char* magic, const GridGeometry& g, std::uint8_t kind) {
  w.raw(magic, 4);
  w.u16(kFormatVersion);
  for (int d : g.dims) w.u32(static_cast<std::uint32_t>(d));
  for (int a = 0; a < 3; ++a) w.f32(static_cast<float>(g.origin[a]));
  w.f32(static_cast<float>(g.voxel_size));
  w.u8(kind);
}

struct Header {
  GridGeometry geometry;
  std::uint8_t kind = 0;
};

Header read_header(Reader& r, const char* magic) {
  const std::size_t start = r.offset();
  if (r.raw(4, "magic") != magic) fail_at(start, std::string("bad magic, expected \"") + magic + "\"");
  const std::size_t vpos = r.offset();
  const std::uint16_t version = r.u16("version");
  if (version != kFormatVersion) fail_at(vpos, "unsupported format version " + std::to_string(version));
  Header h;
  for (int a = 0; a < 3; ++a) {
    const std::size_t pos = r.offset();
    const std::uint32_t d = r.u32("dimension");
    if (d == 0) fail_at(pos, "zero grid dimension");
    if (d > static_cast<std::uint32_t>(kMaxGridDim)) {
      fail_at(pos, "grid dimension " + std::to_string(d) + " exceeds " + std::to_string(kMaxGridDim));
    }
    h.geometry.dims[a] = static_cast<int>(d);
  }
  const std::size_t opos = r.offset();
  for (int a = 0; a < 3; ++a) h.geometry.origin[a] = r.f32("origin");
  if (!h.geometry.origin.allFinite()) fail_at(opos, "non-finite origin");
  const std::size_t spos = r.offset();
  h.geometry.voxel_size = r.f32("voxel size");
  if (!(h.geometry.voxel_size > 0.0) || !std::isfinite(h.geometry.voxel_size)) {
    fail_at(spos, "voxel size must be positive");
  }
  h.kind = r.u8("kind");
  return h;
}

VoxelGrid read_grid_block(Reader& r) {
  const std::size_t start = r.offset();
  const Header h = read_header(r, "VGRD");
  if (h.kind > 1) fail_at(start + kKindOffset, "unknown grid kind " + std::to_string(h.kind));
  VoxelGrid g;
  g.geometry = h.geometry;
  g.kind = static_cast<GridKind>(h.kind);
  const std::size_t n = g.geometry.count();
  g.data.resize(n);
  if (g.kind == GridKind::Occupancy) {
    r.need(n, "occupancy payload");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = r.offset();
      const std::uint8_t v = r.u8("occupancy value");
      if (v > 1) fail_at(pos, "occupancy value " + std::to_string(v) + " is not 0 or 1");
      g.data[i] = v;
    }
  } else {
    r.need(4 * n, "probability payload");
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = r.offset();
      const float v = r.f32("probability value");
      if (!(v >= 0.0f && v <= 1.0f)) fail_at(pos, "probability value outside [0,1]");
      g.data[i] = v;
    }
  }
  return g;
}

void write_grid_block(Writer& w, const VoxelGrid& grid) {
  grid.validate();
  write_header(w, "VGRD", grid.geometry, static_cast<std::uint8_t>(grid.kind));
  for (float v : grid.data) {
    if (grid.kind == GridKind::Occupancy) {
      w.u8(v != 0.0f ? 1 : 0);
    } else {
      w.f32(v);
    }
  }
}

void expect_end(const Reader& r) {
  if (r.remaining() != 0) fail_at(r.offset(), std::to_string(r.remaining()) + " trailing bytes");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw FormatError("line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& tok, std::size_t line) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  const auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) fail_line(line, "bad number \"" + tok + "\"");
  return v;
}

}  // namespace

Bytes write_grid(const VoxelGrid& grid) {
  Writer w;
  write_grid_block(w, grid);
  return w.take();
}

VoxelGrid read_grid(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  VoxelGrid g = read_grid_block(r);
  expect_end(r);
  return g;
}

Bytes write_field(const DisplacementField& field) {
  field.validate();
  Writer w;
  write_header(w, "VDSP", field.geometry, kFieldKind);
  for (const auto& v : field.vectors) {
    for (int a = 0; a < 3; ++a) w.f32(v[a]);
  }
  return w.take();
}

DisplacementField read_field(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const Header h = read_header(r, "VDSP");
  if (h.kind != kFieldKind) fail_at(kKindOffset, "displacement field kind must be 2");
  if (!h.geometry.is_cubic()) fail_at(6, "displacement field grid must be cubic");
  DisplacementField f;
  f.geometry = h.geometry;
  const std::size_t n = f.geometry.count();
  r.need(12 * n, "vector payload");
  f.vectors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t pos = r.offset();
    for (int a = 0; a < 3; ++a) f.vectors[i][a] = r.f32("vector component");
    if (!f.vectors[i].allFinite()) fail_at(pos, "non-finite displacement");
  }
  expect_end(r);
  return f;
}

Bytes write_heatmaps(const HeatmapStack& stack) {
  stack.validate();
  Writer w;
  w.u32(static_cast<std::uint32_t>(stack.size()));
  w.f32(static_cast<float>(stack.sigma));
  for (const auto& m : stack.maps) write_grid_block(w, m);
  return w.take();
}

HeatmapStack read_heatmaps(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  HeatmapStack s;
  const std::uint32_t n = r.u32("map count");
  const std::size_t spos = r.offset();
  s.sigma = r.f32("sigma");
  if (!(s.sigma > 0.0) || !std::isfinite(s.sigma)) fail_at(spos, "sigma must be positive");
  // Each block carries at least a 23-byte header and one value.
  if (static_cast<std::uint64_t>(n) * 24 > r.remaining()) fail_at(0, "map count exceeds available data");
  s.maps.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::size_t pos = r.offset();
    VoxelGrid g = read_grid_block(r);
    if (g.kind != GridKind::Probability) fail_at(pos, "heatmap block is not a probability grid");
    if (!s.maps.empty() && !(g.geometry == s.maps.front().geometry)) fail_at(pos, "heatmap blocks differ in geometry");
    s.maps.push_back(std::move(g));
  }
  expect_end(r);
  return s;
}

std::string write_mesh(const Mesh& mesh) {
  mesh.validate();
  std::string out;
  for (const auto& v : mesh.vertices) {
    out += "v " + format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z()) + "\n";
  }
  for (const auto& f : mesh.faces) {
    out += "f " + std::to_string(f.v[0] + 1) + " " + std::to_string(f.v[1] + 1) + " " + std::to_string(f.v[2] + 1) +
           "\n";
  }
  return out;
}

Mesh read_mesh(const std::string& text) {
  Mesh m;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::size_t, Triangle>> faces;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (tag == "v") {
      if (toks.size() < 3 || toks.size() > 4) fail_line(lineno, "vertex record needs 3 coordinates");
      m.vertices.emplace_back(parse_double(toks[0], lineno), parse_double(toks[1], lineno),
                              parse_double(toks[2], lineno));
    } else if (tag == "f") {
      if (toks.size() != 3) fail_line(lineno, "only triangular faces are supported");
      Triangle t;
      for (int i = 0; i < 3; ++i) {
        const std::string idx = toks[i].substr(0, toks[i].find('/'));
        long value = 0;
        const auto res = std::from_chars(idx.data(), idx.data() + idx.size(), value);
        if (res.ec != std::errc() || res.ptr != idx.data() + idx.size()) {
          fail_line(lineno, "bad face index \"" + toks[i] + "\"");
        }
        if (value < 1) fail_line(lineno, "face index " + std::to_string(value) + " (indices are 1-based)");
        if (value > std::numeric_limits<int>::max()) fail_line(lineno, "face index out of range");
        t.v[i] = static_cast<int>(value - 1);
      }
      faces.emplace_back(lineno, t);
    }
    // Other record types (vn, vt, o, g, s, usemtl, ...) carry nothing we keep.
  }
  const int k = static_cast<int>(m.vertices.size());
  for (const auto& [ln, t] : faces) {
    for (int i : t.v) {
      if (i >= k) fail_line(ln, "face index " + std::to_string(i + 1) + " exceeds vertex count " + std::to_string(k));
    }
    if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2]) fail_line(ln, "degenerate face");
    m.faces.push_back(t);
  }
  return m;
}

Bytes write_depth(const DepthMap& depth) {
  depth.validate();
  const std::string header = "P5\n" + std::to_string(depth.width) + " " + std::to_string(depth.height) + "\n65535\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + 2 * depth.depth.size());
  for (double d : depth.depth) {
    const double r = std::round(d);
    if (r > 65535.0) throw ValidationError("depth map: value exceeds 16-bit range");
    const auto v = static_cast<std::uint16_t>(r);
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

DepthMap read_depth(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* what) -> long {
    skip_space();
    const std::size_t start = pos;
    long v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000) fail_at(start, std::string("PGM ") + what + " too large");
      ++pos;
    }
    if (pos == start) fail_at(start, std::string("PGM header: expected ") + what);
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') fail_at(0, "bad magic, expected binary PGM \"P5\"");
  pos = 2;
  const long w = number("width");
  const long h = number("height");
  const long maxval = number("maxval");
  if (w < 1 || h < 1) fail_at(pos, "PGM dimensions must be positive");
  if (maxval < 1 || maxval > 65535) fail_at(pos, "PGM maxval must lie in [1, 65535]");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) fail_at(pos, "PGM header must end with one whitespace byte");
  ++pos;
  const std::size_t sample = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * sample;
  if (bytes.size() - pos != need) {
    fail_at(pos, "PGM payload holds " + std::to_string(bytes.size() - pos) + " bytes, expected " + std::to_string(need));
  }
  DepthMap d(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < d.depth.size(); ++i) {
    d.depth[i] = sample == 2 ? static_cast<double>((bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1])
                             : static_cast<double>(bytes[pos + i]);
  }
  return d;
}

std::string write_points(const std::vector<Vec3>& points) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : points) arr.push_back({p.x(), p.y(), p.z()});
  return arr.dump() + "\n";
}

std::vector<Vec3> read_points(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("JSON: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("JSON: expected an array of [x, y, z]");
  std::vector<Vec3> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    if (!e.is_array() || e.size() != 3) throw FormatError("JSON: element " + std::to_string(i) + " is not [x, y, z]");
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
      if (!e[a].is_number()) throw FormatError("JSON: element " + std::to_string(i) + " has a non-numeric coordinate");
      p[a] = e[a].get<double>();
    }
    out.push_back(p);
  }
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return b;
}

std::string read_text_file(const std::filesystem::path& path) {
  const Bytes b = read_file(path);
  return std::string(b.begin(), b.end());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace handvox::io
