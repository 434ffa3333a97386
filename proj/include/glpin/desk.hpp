#pragma once

#include <string>
#include <vector>

#include "glpin/critical_fields.hpp"
#include "glpin/gl_sim.hpp"
#include "glpin/vortex_analysis.hpp"

namespace glpin {

// Desk-scale experiment: predicted ladder plus direct minimisation, coarse
// level first, then the fine level started from the prolonged state.
struct DeskOptions {
  DomainSpec domain = DomainSpec::disk(1.0);
  PinningSpec pinning;
  int coarse = 256;
  int fine = 512;  // 0: single level at `coarse`
  MinimizeOptions minimize;
  FieldsOptions fields;
  double window = 0.0;  // predictor ambiguity half-width
};

struct Desk {
  DeskOptions options;
  DeskLevel coarse;
  DeskLevel fine;
  FieldsResult fields;

  const DeskLevel& finest() const { return options.fine > 0 ? fine : coarse; }
};

// Fields are computed from the London solution of the finest level.
Desk prepare_desk(const DeskOptions& opt);

// Seed positions for d vortices: Lambda points plus meso offsets, moved into
// the nearest inclusion at the micro minimiser. Empty if they cannot be
// placed 8 eps apart.
VortexConfig predicted_configuration(const Desk& desk, const ClusterDegrees& D, double hex);

struct SeedOutcome {
  std::string label;
  int seed_degree = 0;
  double energy = 0.0;
  int sweeps = 0;
  bool converged = false;
};

struct DeskRun {
  double hex = 0.0;
  Prediction prediction;
  int expansion_d = 0;  // argmin of predicted_energy over the tabulated d
  std::vector<SeedOutcome> seeds;
  int chosen = 0;
  GLState state;
  MinimizeReport report;  // of the chosen seed on the finest level
  double energy = 0.0;
  double min_abs_v = 0.0;
  DefectReport defects;
  Comparison comparison;
};

// Vortex count minimising predicted_energy over d = 0 and the wbar table.
int expansion_argmin(const FieldsResult& fields, double hex);

// Minimises from the vortex-free state, from the expansion argmin (at least
// one vortex) and from a single vortex; the lowest final energy wins.
DeskRun run_desk_point(const Desk& desk, double hex);

// min |v| over lattice nodes inside the domain
double min_abs_v(const ComplexField& v);

}  // namespace glpin
