#pragma once

// Level crossings: the zeros in b of the discriminant of the characteristic
// polynomial, their row structure, lattice statistics and the map to the
// quartic oscillator parameter.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qes/polycore.hpp"

namespace qes {

/// Discriminant in lambda of D_m(lambda, b), an integer polynomial of
/// degree m(m+1) in b. D_m is monic in lambda, so this is
/// (-1)^{n(n-1)/2} Res_lambda(D_m, dD_m/dlambda) with n = m + 1; for m = 1
/// it is 16 b^2 + 32.
ExactUnivariatePoly discriminant_poly(int m);

struct RowPartition {
  /// Indices into the input points, rows from lowest to highest, each sorted
  /// by real part.
  std::vector<std::vector<int>> rows;
  /// Row sizes are m, m-1, ..., 1.
  bool matches_expected = false;
};

/// Splits points at the m-1 largest gaps between consecutive imaginary parts.
/// Throws InvalidArgument unless there are m(m+1)/2 points.
RowPartition cluster_rows(std::span<const Complex> upper, int m);

struct Crossing {
  Complex b;
  int multiplicity = 1;
  /// Row 1 is the lowest; positions count from 1 left to right. Points in
  /// the lower half plane carry the labels of their conjugates.
  int row = 0;
  int position = 0;
};

struct CrossingSet {
  int m = 0;
  ExactUnivariatePoly discriminant;
  /// Distinct crossings; multiplicities add up to m(m+1).
  std::vector<Crossing> points;
  /// Indices into points of the upper half plane crossings, by row.
  std::vector<std::vector<int>> rows;
  bool rows_match = false;
  /// Empty unless the structure departs from the expected one (real roots,
  /// unpaired conjugates, row sizes).
  std::vector<std::string> warnings;
  long precision = 0;

  std::vector<Complex> upper() const;
};

struct CrossingOptions {
  /// Roots closer than this (relative to the largest root) are merged.
  double merge_tol = 1e-8;
};

CrossingSet crossing_set(int m, const CrossingOptions& opts = {});
/// Same from a precomputed discriminant.
CrossingSet crossing_set(int m, const ExactUnivariatePoly& discriminant, const CrossingOptions& opts = {});

/// Upper half plane first, each half by row then position.
std::vector<Crossing> ordered_points(const CrossingSet& cs);

/// Columns m, re_b, im_b, row, position, multiplicity with a header line.
std::string crossings_csv(std::span<const CrossingSet> sets);

struct RhombusStats {
  int m = 0;
  /// Upper and lower crossings divided by sqrt(m).
  std::vector<Complex> scaled_points;
  double max_abs_re_scaled = 0.0;
  double max_im_scaled = 0.0;
  /// Symmetrized nearest-neighbour graph on scaled_points, i < j.
  std::vector<std::pair<int, int>> nn_edges;
};

RhombusStats rhombus_stats(const CrossingSet& cs);

/// Distance to the farthest point of the set from its own negation and
/// conjugate.
double symmetry_defect(std::span<const Complex> points);

/// Directions of the edges to the k nearest neighbours of every point whose
/// k-neighbourhood lies inside the convex region |Re| / re_max + |Im| / im_max
/// <= interior, folded into [0, pi) and binned.
std::vector<int> neighbour_angle_histogram(std::span<const Complex> points, int k, int bins, double re_max,
                                           double im_max, double interior);

/// Mean over the same interior points of |(1/k) sum exp(6 i theta)| over the
/// edges to the k nearest neighbours: 1 on a triangular lattice, about
/// 1/sqrt(k) for scattered points.
double hexatic_order(std::span<const Complex> points, int k, double re_max, double im_max, double interior);

/// 2 (b / sqrt(n) - 1) n^{2/3} with n = 4m + 3.
Complex quartic_beta(int m, Complex b);

struct QuarticMap {
  int m = 0;
  int n = 0;
  std::vector<Complex> betas;
};

QuarticMap quartic_map(const CrossingSet& cs);

/// Median over the `count` points of `from` nearest beta = 0 of the distance
/// to the nearest point of `to`.
double beta_drift(std::span<const Complex> from, std::span<const Complex> to, int count);

}  // namespace qes
