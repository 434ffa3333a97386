#pragma once

#include <optional>
#include <vector>

#include "glpin/critical_fields.hpp"
#include "glpin/field.hpp"
#include "glpin/london.hpp"
#include "glpin/pinning.hpp"

namespace glpin {

// Winding number of v along a closed node loop (last node connects back to
// the first). Throws ValidationError if |v| < 0.1 on the loop or the sum of
// principal phase steps is more than 0.2 away from a multiple of 2 pi.
int degree(const ComplexField& v, const std::vector<int>& loop);

// Counter-clockwise square loop of nodes with half-width ~r (at least one
// step) around the node nearest c. Empty if it leaves the grid.
std::vector<int> square_loop(const Grid& g, Point2 c, double r);

struct Defect {
  Point2 center;
  double radius = 0.0;
  int degree = 0;
  bool degree_defined = true;
  bool touches_boundary = false;
  int nodes = 0;
  double min_abs = 0.0;
  std::optional<Point2> inclusion_center;
  std::optional<Point2> micro_coord;  // (z - y) / (lambda delta)
};

// Connected components of {|v| < threshold} over lattice nodes in the domain.
// Components whose contour would leave the domain get degree 0 and the
// boundary flag.
std::vector<Defect> detect_defects(const ComplexField& v, double threshold);

struct SeparatedDisks {
  std::vector<int> J;
  double kappa = 1.0;
  bool covering = false;    // union B(x_i, eta) inside union_J B(x_j, kappa eta)
  bool separated = false;   // |x_i - x_j| >= (P - 1) kappa eta on J
};

SeparatedDisks separate_disks(const std::vector<Point2>& centers, double eta, double P);

struct ClusterEntry {
  int k = 0;
  Point2 p;
  int D = 0;
  std::vector<int> members;       // defect indices
  std::vector<Point2> meso;       // (z - p) / l, l = sqrt(D / hex)
};

struct DefectReport {
  double hex = 0.0;
  std::vector<Defect> defects;
  std::vector<ClusterEntry> clusters;  // one per point of Lambda

  ClusterDegrees D() const;
  int total_degree() const;
};

// Pinning may be null (no inclusions to attach).
DefectReport cluster_report(std::vector<Defect> defects, const LondonData& london, double hex,
                            const PinningField* pinning);

struct Comparison {
  int observed_d = 0;
  int predicted_d = 0;
  bool count_ok = false;       // inside the predictor's [d_lo, d_hi]
  bool D_allowed = false;
  bool all_degree_one = false;
  bool all_pinned = false;
  double min_separation = 0.0;         // raw, 0 with fewer than 2 defects
  double separation_scaled = 0.0;      // min_separation * hex / ln hex
  double max_lambda_distance = 0.0;
  double lambda_distance_scaled = 0.0; // max_lambda_distance * sqrt(hex) / ln hex
};

Comparison compare(const DefectReport& report, const Prediction& prediction);

}  // namespace glpin
