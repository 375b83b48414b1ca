#pragma once

// Limit behaviour of the scaled spectra: the segment family whose union
// carries the limiting root measure, the nodal cubic traced by the segment
// endpoints, its foci, the averaged Cauchy transform and the horizontal
// trajectories of the quadratic differential attached to a limiting
// eigenvalue.

#include <array>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qes/polycore.hpp"

namespace qes {

/// Endpoints 4 tau b +- 8 sqrt(tau^2 (1 - tau)) of the segment at parameter tau.
std::pair<Complex, Complex> segment_endpoints(Complex b, double tau);

struct SegmentFamily {
  struct Sample {
    double tau;
    Complex first;
    Complex second;
  };
  Complex b;
  std::vector<Sample> samples;
};

/// Segments at `count` equally spaced tau in [0, 1].
SegmentFamily segment_family(Complex b, int count);

/// Union of the segments for real b, as (left, right). Its ends are the two
/// nonzero foci for |b| <= 2; beyond that the origin and one focus.
std::pair<double, double> support_interval_real(double b);

/// Density of the limiting root measure at x for real b: the tau-average of
/// arcsine densities on the segments. Zero outside the support.
double density_real(double b, double x);

struct CubicOval {
  Complex b;
  /// Parameter range (the two roots in (-1, 1) of the bracketing quartic).
  double nu_begin = 0.0;
  double nu_end = 0.0;
  std::vector<double> nu;
  std::vector<Complex> points;
  /// 0 followed by the nonzero foci, "+" branch first.
  std::array<Complex, 3> foci;
};

/// (x - u y / v)^2 - (4v - y) y^2 / v^3 at the point x + iy; zero on the cubic.
double cubic_residual(Complex b, Complex point);

/// Point of the cubic at rational parameter nu.
Complex cubic_point(Complex b, double nu);

/// Samples of the closed oval of the nodal cubic for non-real b.
CubicOval gamma_oval(Complex b, int samples);

/// {0, f+, f-} with f = (2/27)(36b - b^3 +- sqrt((12 + b^2)^3)), principal root.
std::array<Complex, 3> foci(Complex b);

/// 27 f^2 + 4 f (b^3 - 36 b) - 16 (4 - b^2)^2, the nonzero-foci factor.
Complex foci_quadratic(Complex b, Complex f);

/// Values of L at which Theta (Theta + b)^2 - 4 Theta - L has a double root in
/// Theta, from the discriminant of that cubic.
std::array<Complex, 2> critical_lambdas(Complex b);

struct CauchyOptions {
  double tolerance = 1e-12;
  int max_depth = 20;
  /// Closest admissible distance from z to a segment.
  double branch_guard = 1e-10;
};

/// Tau-average of 1 / sqrt((z - 4 tau b)^2 - 64 tau^2 (1 - tau)), each root
/// taken on the branch asymptotic to z - 4 tau b. Throws NumericalFailure
/// when z lies within branch_guard of a segment.
Complex cauchy_transform(Complex b, Complex z, const CauchyOptions& opts = {});

/// Distance from z to the nearest segment of the family.
double segment_distance(Complex b, Complex z);

// ---------------------------------------------------------------------------
// Quadratic differential -P(Theta)/Theta dTheta^2 with
// P(Theta) = Theta (Theta + b)^2 - 4 Theta - L.
// ---------------------------------------------------------------------------

/// The three roots of P.
std::array<Complex, 3> differential_zeros(Complex b, Complex lambda);

/// Integrates the horizontal direction field of q(Theta) dTheta^2 from
/// `start`, initially along `direction`, by RK4 in Euclidean arclength with
/// the step given at each point by `step`, until `max_length` is covered.
/// The sign of the field is kept continuous along the path. `stop` is
/// consulted after every step.
std::vector<Complex> trace_horizontal(const std::function<Complex(Complex)>& q, Complex start,
                                      Complex direction, const std::function<double(Complex)>& step,
                                      double max_length, const std::function<bool(Complex)>& stop = {});

/// Fixed-step form.
std::vector<Complex> trace_horizontal(const std::function<Complex(Complex)>& q, Complex start,
                                      Complex direction, double step, int max_steps,
                                      const std::function<bool(Complex)>& stop = {});

struct TrajectoryOptions {
  /// Step as a fraction of the largest distance between critical points.
  /// Within five steps of a critical point the step drops to a fifth of the
  /// distance to it.
  double step_fraction = 1e-3;
  /// Capture radius in steps, reduced to a fifth of the distance to the
  /// nearest other critical point where that is smaller.
  double capture_steps = 5.0;
  /// Misses closer than this many capture radii are ambiguous.
  double ambiguity_factor = 2.0;
  /// The two connection masses must add up to 1 within this tolerance for
  /// the measure they carry to be positive.
  double mass_tolerance = 0.01;
  /// Maximal ray length, in units of the characteristic scale.
  double max_length = 20.0;
  /// Rays moving outward beyond this multiple of (1 + largest critical point
  /// modulus) escape.
  double escape_factor = 2.5;
  bool keep_paths = false;
};

struct TrajectoryRay {
  enum class Outcome { captured, escaped, exhausted };
  /// Critical point indices: 0..2 are the zeros, 3 is the pole.
  int origin = 0;
  Outcome outcome = Outcome::exhausted;
  int target = -1;
  /// Closest approach to a critical point other than the origin.
  double closest_miss = 0.0;
  /// Closest approach to each critical point (infinite for the origin).
  std::array<double, 4> approach{};
  /// Signed transversal offset from each zero: the real part of the integral
  /// of (P/Theta)^{1/2} dTheta from the closest point to the zero, with the root
  /// continued along the ray. It vanishes when the ray ends at that zero and
  /// changes sign as the ray sweeps across it.
  std::array<double, 4> offset{};
  /// Mass of the ray up to its closest approach to each critical point, with
  /// the remaining gap closed by the local power law.
  std::array<double, 4> mass_to{};
  /// (1/2pi) times the integral of |P/Theta|^{1/2} |dTheta| along the ray, with the
  /// gaps at both ends closed by the local power laws. For a connection this
  /// is the mass the limiting measure puts on it, up to sign.
  double mass = 0.0;
  std::vector<Complex> path;
};

struct TrajectoryConnection {
  int from;
  int to;
  double mass = 0.0;
  bool to_pole() const { return to == 3 || from == 3; }
};

struct TrajectoryTopology {
  Complex b;
  Complex lambda;
  std::array<Complex, 3> zeros;
  Complex pole = 0.0;
  /// Nominal step and capture radius.
  double step = 0.0;
  double capture_radius = 0.0;
  std::vector<TrajectoryRay> rays;
  /// Distinct connections, at most one per pair.
  std::vector<TrajectoryConnection> connections;
  bool zero_zero = false;
  bool zero_pole = false;
  /// A ray passed within ambiguity_factor capture radii of a critical point
  /// without being captured.
  bool ambiguous = false;
  /// Two critical points are closer than one nominal step.
  bool degenerate = false;
  /// Sum of the connection masses.
  double total_mass = 0.0;
  bool in_support = false;
};

TrajectoryTopology trace_horizontal_trajectories(Complex b, Complex lambda,
                                                 const TrajectoryOptions& opts = {});

struct ScanRegion {
  Complex lower_left;
  Complex upper_right;
  int columns = 40;
  int rows = 40;
};

/// Grid points of the region whose trajectory topology is classified as in
/// the support. Degenerate points are classified from four perturbations.
std::vector<Complex> support_scan(Complex b, const ScanRegion& region,
                                  const TrajectoryOptions& opts = {});

/// Scan of the box spanned by 0 and the nonzero foci, widened by `margin`,
/// with the distance from each of {0, f+, f-} to the nearest support point.
/// Distances come from a finer local scan of half-width `local_half` about
/// each end, so they resolve below the coarse grid step.
struct SupportGeometry {
  Complex b;
  ScanRegion region;
  double step = 0.0;
  std::vector<Complex> points;
  /// Support points of the local scans.
  std::vector<Complex> local_points;
  std::array<Complex, 3> ends;
  std::array<double, 3> distance{};

  /// Which of {0, f+, f-} the support reaches within tol.
  std::array<bool, 3> reached(double tol) const;
  /// Three ends reached, or the origin and exactly one focus.
  int legs(double tol) const;
};

SupportGeometry support_geometry(Complex b, int grid = 30, double margin = 0.5, double local_half = 0.2,
                                 int local_grid = 17, const TrajectoryOptions& opts = {});

// ---------------------------------------------------------------------------
// Eigenpolynomial root measures
// ---------------------------------------------------------------------------

struct ResidualStats {
  double median = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

struct LimitMeasureProbe {
  int m = 0;
  Complex b;
  /// The scaled eigenvalue selected (closest to the requested target).
  Complex lambda;
  /// Roots of the eigenpolynomial divided by sqrt(m).
  std::vector<Complex> scaled_roots;
};

/// Eigenpolynomial of the scaled family at scaled b, for the eigenvalue of
/// the scaled matrix nearest `target`.
LimitMeasureProbe limit_probe(int m, Complex b, Complex target);

/// |Theta C^2 - Theta (Theta + b) C + Theta + L/4| with C the empirical
/// Cauchy transform of the probe's roots. Throws InvalidArgument for test
/// points closer than 0.05 cloud diameters to a root.
ResidualStats omega_quadratic_residual(Complex b, Complex lambda, const LimitMeasureProbe& probe,
                                       std::span<const Complex> test_points);

}  // namespace qes
