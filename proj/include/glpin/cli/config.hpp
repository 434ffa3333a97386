#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glpin/critical_fields.hpp"
#include "glpin/errors.hpp"
#include "glpin/geometry.hpp"
#include "glpin/gl_sim.hpp"
#include "glpin/london.hpp"
#include "glpin/pinning.hpp"

namespace glpin::cli {

using nlohmann::json;

// Validation failure with the offending field path and, when the config came
// from a file, the line where that field appears.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct SweepSpec {
  double from = 0.0;
  double to = 0.0;
  int steps = 1;
  bool relative = false;  // values are multiples of the first crossing field

  std::vector<double> values() const;
};

struct RunConfig {
  DomainSpec domain = DomainSpec::disk(1.0);
  int resolution = 256;
  int coarse_resolution = 0;  // > 0: minimise there first, then prolong
  PinningSpec pinning;
  std::optional<double> hex;
  std::optional<SweepSpec> sweep;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::optional<SyntheticXi0> synthetic_xi0;
  VortexConfig seed_vortices;
  MinimizeOptions minimize;
  FieldsOptions fields;
  double window = 0.0;

  json source;       // the validated document, defaults not filled in
  std::string hash;  // FNV-1a of source.dump()
};

// text: JSON document; origin names it in diagnostics (a file name).
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& file);
// Re-validate an edited source document (command line overrides).
RunConfig reparse(const json& source);

// [{"x":..,"y":..,"degree":..}, ...]
VortexConfig vortices_from_json(const json& j, const std::string& path = "seed_vortices");
json vortices_to_json(const VortexConfig& c);

std::string fnv1a_hex(const std::string& bytes);
std::string toolkit_version();

}  // namespace glpin::cli
