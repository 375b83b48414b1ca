#pragma once

// Continuation of the spectrum along paths in the b-plane, the loops around
// level crossings and the permutations they induce.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qes/error.hpp"
#include "qes/polycore.hpp"

namespace qes {

struct CrossingSet;

struct LinePiece {
  Complex from;
  Complex to;
};

/// Circular arc from angle `start` through `sweep` radians (positive is
/// counter-clockwise).
struct ArcPiece {
  Complex center;
  double radius = 0.0;
  double start = 0.0;
  double sweep = 0.0;
};

using PathPiece = std::variant<LinePiece, ArcPiece>;

class PlanePath {
 public:
  PlanePath() = default;
  /// Throws InvalidArgument if consecutive pieces do not join.
  PlanePath(std::vector<PathPiece> pieces, double max_step = 0.02);

  const std::vector<PathPiece>& pieces() const { return pieces_; }
  double max_step() const { return max_step_; }
  bool empty() const { return pieces_.empty(); }

  Complex start() const;
  Complex end() const;
  double length() const;
  bool is_closed(double tol = 1e-12) const;
  /// Point at arclength s, clamped to [0, length].
  Complex at(double s) const;
  /// Points at most `step` apart, including both ends.
  std::vector<Complex> sample(double step) const;
  /// Closest distance from the path to z.
  double distance_to(Complex z) const;
  /// Winding number about z; the path must be closed and avoid z.
  int winding_number(Complex z) const;

  PlanePath reversed() const;
  /// This path followed by `next`, which must start where this one ends.
  PlanePath then(const PlanePath& next) const;

 private:
  std::vector<PathPiece> pieces_;
  std::vector<double> lengths_;
  double max_step_ = 0.02;
};

/// Straight path from a to b.
PlanePath line_path(Complex a, Complex b, double max_step = 0.02);

/// Closed polygon through the vertices, returning to the first.
PlanePath polygon_loop(std::span<const Complex> vertices, double max_step = 0.02);

/// Loop based at the real point Re(crossing) + offset: straight up to the
/// circle of the given radius about the crossing, once around it
/// counter-clockwise, and back down. For a crossing on the imaginary axis
/// a zero offset is replaced by the radius. Throws InvalidArgument if
/// |offset| > radius, or if the circle encloses or the path meets a
/// crossing in `others` (the offending crossing is named).
PlanePath build_loop(Complex crossing, double radius, double offset = 0.0, std::span<const Complex> others = {},
                     double max_step = 0.02);

struct BraidStep {
  Complex b;
  /// Eigenvalues in label order.
  std::vector<Complex> eigenvalues;
};

struct Braid {
  int m = 0;
  std::vector<BraidStep> steps;
  /// One-line notation on labels 1..m+1: the eigenvalue starting with label
  /// i ends where label permutation[i-1] sits at the end point.
  std::vector<int> permutation;
};

struct TrackOptions {
  /// Largest step in b; the path's own max_step applies too.
  double max_step = 0.02;
  /// Steps are halved until every eigenvalue moves less than this fraction
  /// of the smallest gap between eigenvalues.
  double gap_fraction = 0.5;
  double min_step = 1e-6;
  /// Minimum distance to the crossing set, checked when crossings are given.
  double clearance = 0.0;
  /// Keep one snapshot per accepted step (otherwise only the ends).
  bool keep_steps = true;
};

/// A path came closer to a crossing than the requested clearance.
class PathTooClose : public InvalidArgument {
 public:
  PathTooClose(const std::string& what, Complex crossing) : InvalidArgument(what), crossing_(crossing) {}
  Complex crossing() const { return crossing_; }

 private:
  Complex crossing_;
};

/// Minimal-cost assignment: result[i] is the column given to row i.
std::vector<int> hungarian_assignment(const std::vector<std::vector<double>>& cost);

/// Labels at the start are the ascending positions of the spectrum (by real
/// part, ties by imaginary part). Throws NumericalFailure when the step
/// falls below min_step, PathTooClose when the path comes closer than
/// opts.clearance to a crossing in `crossings`.
Braid track_path(int m, const PlanePath& path, const TrackOptions& opts = {},
                 std::span<const Complex> crossings = {});

/// Composition of one-line permutations: (second after first)[i] = second[first[i]].
std::vector<int> compose(const std::vector<int>& first, const std::vector<int>& second);
std::vector<int> inverse(const std::vector<int>& perm);
/// The two moved labels, ascending, if perm is a transposition.
std::optional<std::pair<int, int>> as_transposition(const std::vector<int>& perm);

/// Conjectured transposition (m+2-l-k, m+2-k) for row l, position k.
std::pair<int, int> conjectured_transposition(int m, int row, int position);

using TranspositionTable = std::map<std::pair<int, int>, std::pair<int, int>>;

/// Every (row, position) of the triangle with its conjectured transposition.
TranspositionTable conjecture_table(int m);

class MonodromyViolation : public ConjectureViolation {
 public:
  MonodromyViolation(const std::string& what, Braid braid) : ConjectureViolation(what), braid_(std::move(braid)) {}
  const Braid& braid() const { return braid_; }

 private:
  Braid braid_;
};

struct MonodromyOptions {
  /// Loop radius as a fraction of the distance to the nearest other crossing.
  double radius_fraction = 0.05;
  /// Offset of the legs for crossings on the imaginary axis, in radii.
  double offset_radii = 1.0;
  TrackOptions track;
};

struct MonodromyResult {
  int row = 0;
  int position = 0;
  Complex crossing;
  std::pair<int, int> transposition;
  Braid braid;
};

/// Tracks the loop around the crossing at (row, position) of crossing_set(m).
/// Throws MonodromyViolation when the permutation is not a transposition.
MonodromyResult monodromy_permutation(int m, int row, int position, const MonodromyOptions& opts = {});
/// Same on a precomputed crossing set.
MonodromyResult monodromy_permutation(const CrossingSet& cs, int row, int position, const MonodromyOptions& opts = {});

/// Measured table for every upper crossing.
std::vector<MonodromyResult> measured_table(int m, const MonodromyOptions& opts = {});
std::vector<MonodromyResult> measured_table(const CrossingSet& cs, const MonodromyOptions& opts = {});

/// {"m", "permutation", "steps": [{"re_b", "im_b", "eigenvalues": [[re, im], ...]}]}
std::string braid_json(const Braid& braid);

/// Eigenvalue trajectories in the lambda-plane, one polyline per label, with
/// start and end marked.
std::string braid_svg(const Braid& braid, int width = 640, int height = 480);

}  // namespace qes
