#pragma once

#include <filesystem>
#include <string>

#include "glpin/field.hpp"

namespace glpin {

// Raw little-endian f64 payload `<stem>.bin`, row-major, complex interleaved,
// with a sidecar `<stem>.json` {nx, ny, h, origin, kind}.
void write_field(const std::filesystem::path& stem, const ScalarField& f);
void write_field(const std::filesystem::path& stem, const ComplexField& f);
void write_field(const std::filesystem::path& stem, const EdgeField& a);  // stem_ax, stem_ay

struct FieldHeader {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  Point2 origin;
  std::string kind;
};

FieldHeader read_field_header(const std::filesystem::path& stem);
// The grid is rebuilt by the caller; header dimensions must match it.
ScalarField read_scalar_field(const std::filesystem::path& stem, GridPtr grid);
ComplexField read_complex_field(const std::filesystem::path& stem, GridPtr grid);
EdgeField read_edge_field(const std::filesystem::path& stem, GridPtr grid);

}  // namespace glpin
