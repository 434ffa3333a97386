#include "glpin/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "glpin/errors.hpp"

namespace glpin {

namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {

fs::path with_ext(const fs::path& stem, const char* ext) {
  fs::path p = stem;
  p += ext;
  return p;
}

void write_header(const fs::path& stem, const Grid& g, const char* kind) {
  json j = {{"nx", g.nx}, {"ny", g.ny}, {"h", g.h}, {"origin", {g.origin.x, g.origin.y}}, {"kind", kind}};
  std::ofstream os(with_ext(stem, ".json"));
  if (!os) throw Error("cannot write " + with_ext(stem, ".json").string());
  os << j.dump(2) << "\n";
}

void write_raw(const fs::path& stem, const void* data, std::size_t bytes) {
  std::ofstream os(with_ext(stem, ".bin"), std::ios::binary);
  if (!os) throw Error("cannot write " + with_ext(stem, ".bin").string());
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
}

std::vector<double> read_raw(const fs::path& stem, std::size_t count) {
  std::ifstream is(with_ext(stem, ".bin"), std::ios::binary);
  if (!is) throw ValidationError("cannot read " + with_ext(stem, ".bin").string());
  std::vector<double> v(count);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (is.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw ValidationError(with_ext(stem, ".bin").string() + ": truncated payload");
  return v;
}

void check_header(const FieldHeader& hd, const Grid& g, const std::string& kind, const fs::path& stem) {
  if (hd.nx != g.nx || hd.ny != g.ny || std::abs(hd.h - g.h) > 1e-12 * g.h)
    throw ValidationError(stem.string() + ": field dimensions do not match the configured grid");
  if (hd.kind != kind) throw ValidationError(stem.string() + ": expected kind '" + kind + "'");
}

}  // namespace

void write_field(const fs::path& stem, const ScalarField& f) {
  write_header(stem, *f.grid, "real");
  write_raw(stem, f.values.data(), f.values.size() * sizeof(double));
}

void write_field(const fs::path& stem, const ComplexField& f) {
  write_header(stem, *f.grid, "complex");
  write_raw(stem, f.values.data(), f.values.size() * sizeof(cplx));
}

void write_field(const fs::path& stem, const EdgeField& a) {
  fs::path sx = stem, sy = stem;
  sx += "_ax";
  sy += "_ay";
  write_header(sx, *a.grid, "real");
  write_raw(sx, a.ax.data(), a.ax.size() * sizeof(double));
  write_header(sy, *a.grid, "real");
  write_raw(sy, a.ay.data(), a.ay.size() * sizeof(double));
}

FieldHeader read_field_header(const fs::path& stem) {
  std::ifstream is(with_ext(stem, ".json"));
  if (!is) throw ValidationError("cannot read " + with_ext(stem, ".json").string());
  json j;
  try {
    is >> j;
    FieldHeader h;
    h.nx = j.at("nx").get<int>();
    h.ny = j.at("ny").get<int>();
    h.h = j.at("h").get<double>();
    h.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
    h.kind = j.at("kind").get<std::string>();
    return h;
  } catch (const json::exception& e) {
    throw ValidationError(with_ext(stem, ".json").string() + ": " + e.what());
  }
}

ScalarField read_scalar_field(const fs::path& stem, GridPtr grid) {
  check_header(read_field_header(stem), *grid, "real", stem);
  ScalarField f(grid);
  f.values = read_raw(stem, grid->size());
  return f;
}

ComplexField read_complex_field(const fs::path& stem, GridPtr grid) {
  check_header(read_field_header(stem), *grid, "complex", stem);
  const auto raw = read_raw(stem, 2 * static_cast<std::size_t>(grid->size()));
  ComplexField f(grid);
  for (std::size_t k = 0; k < f.values.size(); ++k) f.values[k] = {raw[2 * k], raw[2 * k + 1]};
  return f;
}

EdgeField read_edge_field(const fs::path& stem, GridPtr grid) {
  fs::path sx = stem, sy = stem;
  sx += "_ax";
  sy += "_ay";
  EdgeField e(grid);
  e.ax = read_scalar_field(sx, grid).values;
  e.ay = read_scalar_field(sy, grid).values;
  return e;
}

}  // namespace glpin
