#pragma once

// Serialization shared by the command-line tool and the HTTP service, so both
// emit identical bytes for identical inputs.

#include <span>
#include <string>
#include <vector>

#include "qes/crossings.hpp"
#include "qes/monodromy.hpp"
#include "qes/spectrum.hpp"

namespace qes {

/// Parses "re,im" (or a bare real "re"). Throws InvalidArgument.
Complex parse_complex(const std::string& text);

/// Sum of the eigenvalues against the matrix trace.
struct TraceCheck {
  Complex trace;
  Complex sum;
  /// |sum - trace| / max(1, sum of |eigenvalue|).
  double relative_error = 0.0;
};

TraceCheck trace_check(int m, Complex b, bool scaled, const Spectrum& s);

/// {"m", "b": [re, im], "scaled", "eigenvalues": [[re, im], ...], "min_gap",
///  "trace_check": {"trace", "sum", "relative_error"}}
std::string spectrum_json(int m, Complex b, bool scaled, const Spectrum& s);

/// Columns index, re, im, residual, multiplicity with a header line.
std::string spectrum_csv(const Spectrum& s);

/// {"m", "count", "discriminant_degree", "rows_match", "row_sizes", "precision",
///  "warnings", "points": [{"re_b", "im_b", "row", "position", "multiplicity"}]}
/// Points follow the order of crossings_csv.
std::string crossings_json(const CrossingSet& cs);

/// One JSON object per line: the steps of the braid, then a final line
/// {"m", "permutation", "steps"} carrying the permutation.
std::vector<std::string> braid_ndjson(const Braid& braid);

struct ScatterLayer {
  std::vector<Complex> points;
  std::string color = "#1f77b4";
  double radius = 2.5;
  std::string label;
};

/// Self-contained SVG scatter plot of the layers on common square axes.
std::string scatter_svg(std::span<const ScatterLayer> layers, const std::string& title, int width = 640,
                        int height = 640);

/// Polyline plot: each curve is drawn as one polyline.
std::string curves_svg(std::span<const std::vector<Complex>> curves, std::span<const ScatterLayer> markers,
                       const std::string& title, int width = 640, int height = 640);

struct TrackRequest {
  int m = 0;
  PlanePath path;
  TrackOptions options;
};

/// Parses {"m", "waypoints": [[re, im], ...], "segments": [...], "options":
/// {"clearance", "max_step"}}. Segments are "line" or {"type": "arc",
/// "center": [re, im], "clockwise": false}; an arc between equal waypoints is
/// a full turn. Missing segments are lines. Throws InvalidArgument.
TrackRequest parse_track_request(const std::string& body);

}  // namespace qes
