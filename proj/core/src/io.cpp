#include "pfcg/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace pfcg {

namespace {

constexpr char kMagic[4] = {'P', 'F', '3', 'D'};

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    U out = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      out = static_cast<U>((out << 8) | (v & 0xff));
      v = static_cast<U>(v >> 8);
    }
    return out;
  } else {
    return v;
  }
}

class Writer {
 public:
  void bytes(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void u32(std::uint32_t v) {
    v = to_little(v);
    char b[4];
    std::memcpy(b, &v, 4);
    bytes(b, 4);
  }
  void f64(double d) {
    std::uint64_t v = to_little(std::bit_cast<std::uint64_t>(d));
    char b[8];
    std::memcpy(b, &v, 8);
    bytes(b, 8);
  }
  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    if (!out) throw IoError("write failed: " + path.string());
  }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> buf) : buf_(std::move(buf)) {}
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n) throw TruncatedError("file truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, buf_.data() + pos_, 4);
    pos_ += 4;
    return to_little(v);
  }
  double f64() {
    need(8);
    std::uint64_t v;
    std::memcpy(&v, buf_.data() + pos_, 8);
    pos_ += 8;
    return std::bit_cast<double>(to_little(v));
  }
  const char* take(std::size_t n) {
    need(n);
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string fmt_double(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

void check_coords(const std::vector<double>& file, std::span<const double> grid, const char* axis) {
  for (std::size_t n = 0; n < file.size(); ++n)
    if (std::abs(file[n] - grid[n]) > 1e-12 * (1.0 + std::abs(grid[n])))
      throw DimensionMismatchError(std::string("map ") + axis + " coordinates differ from grid");
}

}  // namespace

void write_field_file(const std::filesystem::path& path, const FieldFile& f) {
  if (f.dims.size() != 2 && f.dims.size() != 3) throw MalformedError("ndim must be 2 or 3");
  if (f.coords.size() != f.dims.size()) throw MalformedError("one coordinate array per axis");
  std::size_t total = 1;
  for (std::size_t a = 0; a < f.dims.size(); ++a) {
    if (f.dims[a] == 0 || f.coords[a].size() != f.dims[a])
      throw MalformedError("coordinate array length must equal its dimension");
    total *= f.dims[a];
  }
  if (f.payload.size() != total) throw MalformedError("payload length must equal product of dims");

  Writer w;
  w.bytes(kMagic, 4);
  w.u32(kFieldFileVersion);
  w.u32(static_cast<std::uint32_t>(f.dims.size()));
  for (auto d : f.dims) w.u32(d);
  for (const auto& c : f.coords)
    for (double v : c) w.f64(v);
  for (double v : f.payload) w.f64(v);
  w.save(path);
}

FieldFile read_field_file(const std::filesystem::path& path) {
  Reader r(slurp(path));
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw BadMagicError("not a PF3D file: " + path.string());
  const std::uint32_t version = r.u32();
  if (version != kFieldFileVersion)
    throw UnsupportedVersionError("unsupported PF3D version " + std::to_string(version));
  const std::uint32_t ndim = r.u32();
  if (ndim != 2 && ndim != 3) throw MalformedError("PF3D ndim must be 2 or 3");
  FieldFile f;
  std::uint64_t total = 1, coord_total = 0;
  for (std::uint32_t a = 0; a < ndim; ++a) {
    const std::uint32_t d = r.u32();
    if (d == 0) throw MalformedError("PF3D dimension must be positive");
    f.dims.push_back(d);
    total *= d;
    coord_total += d;
  }
  // Size check up front so a corrupt header cannot trigger a huge allocation.
  if (r.remaining() < (coord_total + total) * 8) throw TruncatedError("PF3D payload truncated");
  for (auto d : f.dims) {
    std::vector<double> c(d);
    for (double& v : c) v = r.f64();
    f.coords.push_back(std::move(c));
  }
  f.payload.resize(total);
  for (double& v : f.payload) v = r.f64();
  if (r.remaining() != 0) throw MalformedError("trailing bytes after PF3D payload");
  return f;
}

void write_map(const std::filesystem::path& path, const ScalarMap2D& map) {
  FieldFile f;
  f.dims = {static_cast<std::uint32_t>(map.nt), static_cast<std::uint32_t>(map.np)};
  f.coords = {map.theta, map.phi};
  f.payload = map.values;
  write_field_file(path, f);
}

ScalarMap2D read_map(const std::filesystem::path& path) {
  FieldFile f = read_field_file(path);
  if (f.dims.size() != 2) throw DimensionMismatchError("expected a 2D map");
  ScalarMap2D m;
  m.nt = static_cast<int>(f.dims[0]);
  m.np = static_cast<int>(f.dims[1]);
  m.theta = std::move(f.coords[0]);
  m.phi = std::move(f.coords[1]);
  m.values = std::move(f.payload);
  for (double v : m.values)
    if (!std::isfinite(v)) throw MalformedError("map contains non-finite values");
  return m;
}

ScalarMap2D read_map(const std::filesystem::path& path, const Grid3D& grid) {
  ScalarMap2D m = read_map(path);
  if (m.nt != grid.t.size() || m.np != grid.p.size())
    throw DimensionMismatchError("map is " + std::to_string(m.nt) + "x" + std::to_string(m.np) +
                                 ", grid is " + std::to_string(grid.t.size()) + "x" +
                                 std::to_string(grid.p.size()));
  check_coords(m.theta, std::span(grid.t.centers).subspan(1, m.nt), "theta");
  check_coords(m.phi, std::span(grid.p.centers).subspan(1, m.np), "phi");
  return m;
}

void write_field(const std::filesystem::path& path, const Grid3D& grid,
                 std::span<const double> values) {
  const Extent3 d = grid.dims();
  if (values.size() != d.size()) throw DimensionError("write_field: size mismatch");
  FieldFile f;
  f.dims = {static_cast<std::uint32_t>(d.nr), static_cast<std::uint32_t>(d.nt),
            static_cast<std::uint32_t>(d.np)};
  f.coords = {{grid.r.centers.begin() + 1, grid.r.centers.end() - 1},
              {grid.t.centers.begin() + 1, grid.t.centers.end() - 1},
              {grid.p.centers.begin() + 1, grid.p.centers.end() - 1}};
  f.payload.assign(values.begin(), values.end());
  write_field_file(path, f);
}

std::vector<double> read_field(const std::filesystem::path& path, const Grid3D& grid) {
  FieldFile f = read_field_file(path);
  const Extent3 d = grid.dims();
  if (f.dims.size() != 3 || f.dims[0] != static_cast<std::uint32_t>(d.nr) ||
      f.dims[1] != static_cast<std::uint32_t>(d.nt) || f.dims[2] != static_cast<std::uint32_t>(d.np))
    throw DimensionMismatchError("field dimensions differ from grid");
  return std::move(f.payload);
}

std::filesystem::path history_path_for(const std::filesystem::path& stats_path) {
  std::filesystem::path p = stats_path;
  p.replace_filename(stats_path.stem().string() + "_history.csv");
  return p;
}

void write_history_csv(std::span<const double> history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "iteration,relative_residual\n";
  for (std::size_t it = 0; it < history.size(); ++it) out << it << ',' << fmt_double(history[it]) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_stats_csv(const SolveStats& stats, const std::filesystem::path& path,
                     std::optional<double> io_seconds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "category,seconds\n";
  for (std::size_t t = 0; t < kNumTimers; ++t)
    out << kTimerNames[t] << ',' << fmt_double(stats.timers.seconds()[t]) << '\n';
  out << "sum," << fmt_double(stats.timers.category_sum()) << '\n';
  if (io_seconds) out << "io," << fmt_double(*io_seconds) << '\n';
  out << "iterations," << stats.iterations << '\n';
  out << "converged," << (stats.converged ? 1 : 0) << '\n';
  out << "final_residual," << fmt_double(stats.final_residual()) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
  out.close();
  write_history_csv(stats.residual_history, history_path_for(path));
}

}  // namespace pfcg
