#include "qes/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qes/crossings.hpp"
#include "json_steps.hpp"
#include "qes/spectrum.hpp"

namespace qes {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double piece_length(const PathPiece& p) {
  if (const auto* l = std::get_if<LinePiece>(&p)) return std::abs(l->to - l->from);
  const auto& a = std::get<ArcPiece>(p);
  return a.radius * std::abs(a.sweep);
}

Complex piece_at(const PathPiece& p, double t) {
  if (const auto* l = std::get_if<LinePiece>(&p)) return l->from + t * (l->to - l->from);
  const auto& a = std::get<ArcPiece>(p);
  return a.center + std::polar(a.radius, a.start + t * a.sweep);
}

double piece_distance(const PathPiece& p, Complex z) {
  if (const auto* l = std::get_if<LinePiece>(&p)) {
    const Complex d = l->to - l->from;
    const double len2 = std::norm(d);
    const double t = len2 > 0.0 ? std::clamp(((z - l->from) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
    return std::abs(z - (l->from + t * d));
  }
  const auto& a = std::get<ArcPiece>(p);
  const double to_ends = std::min(std::abs(z - piece_at(p, 0.0)), std::abs(z - piece_at(p, 1.0)));
  if (std::abs(a.sweep) >= kTwoPi || z == a.center) return std::min(to_ends, std::abs(std::abs(z - a.center) - a.radius));
  // Angle of z measured from the start in the sweep direction.
  double rel = std::arg(z - a.center) - a.start;
  if (a.sweep < 0.0) rel = -rel;
  rel = std::fmod(std::fmod(rel, kTwoPi) + kTwoPi, kTwoPi);
  if (rel <= std::abs(a.sweep)) return std::abs(std::abs(z - a.center) - a.radius);
  return to_ends;
}

PathPiece piece_reversed(const PathPiece& p) {
  if (const auto* l = std::get_if<LinePiece>(&p)) return LinePiece{l->to, l->from};
  const auto& a = std::get<ArcPiece>(p);
  return ArcPiece{a.center, a.radius, a.start + a.sweep, -a.sweep};
}

}  // namespace

PlanePath::PlanePath(std::vector<PathPiece> pieces, double max_step) : pieces_(std::move(pieces)), max_step_(max_step) {
  if (!(max_step > 0.0)) throw InvalidArgument("PlanePath: max_step must be positive");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (const auto* a = std::get_if<ArcPiece>(&pieces_[k]); a && !(a->radius > 0.0))
      throw InvalidArgument("PlanePath: arc radius must be positive");
    if (k > 0) {
      const Complex prev = piece_at(pieces_[k - 1], 1.0), next = piece_at(pieces_[k], 0.0);
      if (std::abs(prev - next) > 1e-9 * std::max(1.0, std::abs(prev)))
        throw InvalidArgument("PlanePath: pieces do not join");
    }
    lengths_.push_back(piece_length(pieces_[k]));
  }
}

Complex PlanePath::start() const {
  if (pieces_.empty()) throw InvalidArgument("PlanePath: empty path");
  return piece_at(pieces_.front(), 0.0);
}

Complex PlanePath::end() const {
  if (pieces_.empty()) throw InvalidArgument("PlanePath: empty path");
  return piece_at(pieces_.back(), 1.0);
}

double PlanePath::length() const { return std::accumulate(lengths_.begin(), lengths_.end(), 0.0); }

bool PlanePath::is_closed(double tol) const {
  return !pieces_.empty() && std::abs(start() - end()) <= tol * std::max(1.0, std::abs(start()));
}

Complex PlanePath::at(double s) const {
  if (pieces_.empty()) throw InvalidArgument("PlanePath: empty path");
  s = std::max(0.0, s);
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (s <= lengths_[k] || k + 1 == pieces_.size())
      return piece_at(pieces_[k], lengths_[k] > 0.0 ? std::min(1.0, s / lengths_[k]) : 1.0);
    s -= lengths_[k];
  }
  return end();
}

std::vector<Complex> PlanePath::sample(double step) const {
  if (!(step > 0.0)) throw InvalidArgument("PlanePath::sample: step must be positive");
  std::vector<Complex> out{start()};
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const int n = std::max(1, static_cast<int>(std::ceil(lengths_[k] / step)));
    for (int i = 1; i <= n; ++i) out.push_back(piece_at(pieces_[k], double(i) / n));
  }
  return out;
}

double PlanePath::distance_to(Complex z) const {
  double best = INFINITY;
  for (const auto& p : pieces_) best = std::min(best, piece_distance(p, z));
  return best;
}

int PlanePath::winding_number(Complex z) const {
  if (!is_closed(1e-9)) throw InvalidArgument("winding_number: path is not closed");
  const double d = distance_to(z);
  if (!(d > 0.0)) throw InvalidArgument("winding_number: point lies on the path");
  // Steps well below the distance keep every angle increment under pi.
  const auto pts = sample(std::min(0.25 * d, max_step_));
  double total = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) total += std::arg((pts[k] - z) / (pts[k - 1] - z));
  return static_cast<int>(std::lround(total / kTwoPi));
}

PlanePath PlanePath::reversed() const {
  std::vector<PathPiece> out;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) out.push_back(piece_reversed(*it));
  return PlanePath(std::move(out), max_step_);
}

PlanePath PlanePath::then(const PlanePath& next) const {
  std::vector<PathPiece> out = pieces_;
  out.insert(out.end(), next.pieces_.begin(), next.pieces_.end());
  return PlanePath(std::move(out), std::min(max_step_, next.max_step_));
}

PlanePath line_path(Complex a, Complex b, double max_step) { return PlanePath({LinePiece{a, b}}, max_step); }

PlanePath polygon_loop(std::span<const Complex> vertices, double max_step) {
  if (vertices.size() < 2) throw InvalidArgument("polygon_loop: need at least two vertices");
  std::vector<PathPiece> pieces;
  for (std::size_t k = 0; k < vertices.size(); ++k)
    pieces.push_back(LinePiece{vertices[k], vertices[(k + 1) % vertices.size()]});
  return PlanePath(std::move(pieces), max_step);
}

PlanePath build_loop(Complex crossing, double radius, double offset, std::span<const Complex> others,
                     double max_step) {
  if (!(radius > 0.0)) throw InvalidArgument("build_loop: radius must be positive");
  if (crossing.imag() == 0.0) throw InvalidArgument("build_loop: crossing on the real axis");
  if (offset == 0.0 && std::abs(crossing.real()) <= 1e-12 * std::abs(crossing)) offset = radius;
  if (std::abs(offset) > radius) throw InvalidArgument("build_loop: offset exceeds the radius");
  const double base = crossing.real() + offset;
  // Enter the circle on the side facing the real axis.
  const double rise = std::sqrt(radius * radius - offset * offset);
  const double side = crossing.imag() > 0.0 ? -1.0 : 1.0;
  const Complex entry(base, crossing.imag() + side * rise);
  const double angle = std::arg(entry - crossing);
  PlanePath path({LinePiece{base, entry}, ArcPiece{crossing, radius, angle, kTwoPi}, LinePiece{entry, base}},
                 max_step);
  for (const auto& o : others) {
    if (std::abs(o - crossing) <= 1e-12 * std::max(1.0, std::abs(crossing))) continue;
    const bool enclosed = std::abs(o - crossing) <= radius;
    if (enclosed || path.distance_to(o) <= 1e-9 * std::max(1.0, std::abs(o))) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "build_loop: the loop %s the crossing %.12g%+.12gi",
                    enclosed ? "encloses" : "passes through", o.real(), o.imag());
      throw InvalidArgument(buf);
    }
  }
  return path;
}

std::vector<int> hungarian_assignment(const std::vector<std::vector<double>>& cost) {
  // Shortest augmenting paths with row and column potentials.
  const int n = static_cast<int>(cost.size());
  for (const auto& row : cost)
    if (static_cast<int>(row.size()) != n) throw InvalidArgument("hungarian_assignment: matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> owner(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = owner[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const int j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> result(n, -1);
  for (int j = 1; j <= n; ++j)
    if (owner[j] > 0) result[owner[j] - 1] = j - 1;
  return result;
}

namespace {

double min_gap(const std::vector<Complex>& e) {
  double gap = INFINITY;
  for (std::size_t i = 0; i < e.size(); ++i)
    for (std::size_t j = i + 1; j < e.size(); ++j) gap = std::min(gap, std::abs(e[i] - e[j]));
  return gap;
}

/// 1-based rank of each value in ascending (real, imaginary) order.
std::vector<int> ascending_ranks(const std::vector<Complex>& e) {
  std::vector<int> order(e.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return e[a].real() != e[b].real() ? e[a].real() < e[b].real() : e[a].imag() < e[b].imag();
  });
  std::vector<int> rank(e.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = static_cast<int>(k) + 1;
  return rank;
}

}  // namespace

Braid track_path(int m, const PlanePath& path, const TrackOptions& opts, std::span<const Complex> crossings) {
  if (path.empty()) throw InvalidArgument("track_path: empty path");
  if (opts.clearance > 0.0)
    for (const auto& c : crossings)
      if (path.distance_to(c) < opts.clearance) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "track_path: path within clearance of the crossing %.12g%+.12gi", c.real(),
                      c.imag());
        throw PathTooClose(buf, c);
      }
  const SexticProblem prob(m);
  Braid braid;
  braid.m = m;
  std::vector<Complex> current = eigenvalues(prob, path.start()).eigenvalues;  // sorted: labels 1..m+1
  braid.steps.push_back({path.start(), current});

  const double length = path.length();
  const double max_step = std::min(opts.max_step, path.max_step());
  double s = 0.0, h = max_step;
  const std::size_t n = current.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  while (s < length) {
    const double target = std::min(length, s + h);
    const Complex b = path.at(target);
    const std::vector<Complex> next = eigenvalues(prob, b).eigenvalues;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cost[i][j] = std::abs(current[i] - next[j]);
    const auto assign = hungarian_assignment(cost);
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, cost[i][assign[i]]);
    // Each eigenvalue stays inside its own half-gap disc, so the matching is
    // the unique nearest-neighbour one.
    if (moved <= opts.gap_fraction * min_gap(current)) {
      for (std::size_t i = 0; i < n; ++i) current[i] = next[assign[i]];
      s = target;
      if (opts.keep_steps || s >= length) braid.steps.push_back({b, current});
      h = std::min(max_step, 2.0 * h);
      continue;
    }
    h *= 0.5;
    if (h < opts.min_step) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "track_path: step fell below %.1e near b = %.12g%+.12gi (eigenvalue gap %.3e)",
                    opts.min_step, b.real(), b.imag(), min_gap(current));
      throw NumericalFailure(buf);
    }
  }
  braid.permutation = ascending_ranks(current);
  return braid;
}

std::vector<int> compose(const std::vector<int>& first, const std::vector<int>& second) {
  if (first.size() != second.size()) throw InvalidArgument("compose: size mismatch");
  std::vector<int> out(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) out[i] = second[first[i] - 1];
  return out;
}

std::vector<int> inverse(const std::vector<int>& perm) {
  std::vector<int> out(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i] - 1] = static_cast<int>(i) + 1;
  return out;
}

std::optional<std::pair<int, int>> as_transposition(const std::vector<int>& perm) {
  std::vector<int> moved;
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != static_cast<int>(i) + 1) moved.push_back(static_cast<int>(i) + 1);
  if (moved.size() != 2 || perm[moved[0] - 1] != moved[1]) return std::nullopt;
  return std::make_pair(moved[0], moved[1]);
}

std::pair<int, int> conjectured_transposition(int m, int row, int position) {
  if (m < 1 || row < 1 || row > m || position < 1 || position > m + 1 - row)
    throw InvalidArgument("conjectured_transposition: no such crossing");
  return {m + 2 - row - position, m + 2 - position};
}

TranspositionTable conjecture_table(int m) {
  if (m < 1) throw InvalidArgument("conjecture_table: m must be at least 1");
  TranspositionTable table;
  for (int l = 1; l <= m; ++l)
    for (int k = 1; k <= m + 1 - l; ++k) table[{l, k}] = conjectured_transposition(m, l, k);
  return table;
}

namespace {

MonodromyResult loop_result(int m, const CrossingSet& cs, int index, const MonodromyOptions& opts) {
  const Complex c = cs.points[index].b;
  double nearest = INFINITY;
  std::vector<Complex> all;
  for (const auto& p : cs.points) {
    all.push_back(p.b);
    if (&p != &cs.points[index]) nearest = std::min(nearest, std::abs(p.b - c));
  }
  if (!std::isfinite(nearest)) nearest = std::abs(c);
  const double radius = opts.radius_fraction * nearest;
  const bool on_axis = std::abs(c.real()) <= 1e-12 * std::abs(c);
  const PlanePath loop = build_loop(c, radius, on_axis ? opts.offset_radii * radius : 0.0, all,
                                    std::min(opts.track.max_step, radius));
  Braid braid = track_path(m, loop, opts.track);
  const auto t = as_transposition(braid.permutation);
  const int row = cs.points[index].row, position = cs.points[index].position;
  if (!t) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "monodromy at row %d, position %d is not a transposition", row, position);
    throw MonodromyViolation(buf, std::move(braid));
  }
  return {row, position, c, *t, std::move(braid)};
}

}  // namespace

MonodromyResult monodromy_permutation(const CrossingSet& cs, int row, int position, const MonodromyOptions& opts) {
  for (std::size_t i = 0; i < cs.points.size(); ++i)
    if (cs.points[i].b.imag() > 0.0 && cs.points[i].row == row && cs.points[i].position == position)
      return loop_result(cs.m, cs, static_cast<int>(i), opts);
  throw InvalidArgument("monodromy_permutation: no crossing with that row and position");
}

MonodromyResult monodromy_permutation(int m, int row, int position, const MonodromyOptions& opts) {
  return monodromy_permutation(crossing_set(m), row, position, opts);
}

std::vector<MonodromyResult> measured_table(const CrossingSet& cs, const MonodromyOptions& opts) {
  std::vector<MonodromyResult> out;
  for (const auto& row : cs.rows)
    for (const int i : row) out.push_back(loop_result(cs.m, cs, i, opts));
  return out;
}

std::vector<MonodromyResult> measured_table(int m, const MonodromyOptions& opts) {
  return measured_table(crossing_set(m), opts);
}

std::string braid_json(const Braid& braid) {
  nlohmann::json j;
  j["m"] = braid.m;
  j["permutation"] = braid.permutation;
  auto& steps = j["steps"] = nlohmann::json::array();
  for (const auto& s : braid.steps) steps.push_back(detail::step_object(s));
  return j.dump();
}

std::string braid_svg(const Braid& braid, int width, int height) {
  if (braid.steps.empty()) throw InvalidArgument("braid_svg: empty braid");
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : braid.steps)
    for (const auto& z : s.eigenvalues) {
      x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
      y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
    }
  const double pad = 20.0;
  const double span = std::max({x1 - x0, y1 - y0, 1e-12});
  const double scale = std::min(width - 2 * pad, height - 2 * pad) / span;
  auto px = [&](Complex z) {
    return std::make_pair(pad + (z.real() - x0) * scale, height - pad - (z.imag() - y0) * scale);
  };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::size_t labels = braid.steps.front().eigenvalues.size();
  char buf[96];
  for (std::size_t k = 0; k < labels; ++k) {
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colors[k % 10] << "\" points=\"";
    for (const auto& s : braid.steps) {
      const auto [x, y] = px(s.eigenvalues[k]);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
      out << buf;
    }
    out << "\"/>\n";
    const auto [sx, sy] = px(braid.steps.front().eigenvalues[k]);
    const auto [ex, ey] = px(braid.steps.back().eigenvalues[k]);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"", sx, sy);
    out << buf << colors[k % 10] << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%.2f\" y=\"%.2f\" width=\"6\" height=\"6\" fill=\"none\" stroke=\"", ex - 3,
                  ey - 3);
    out << buf << colors[k % 10] << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" font-size=\"11\">%zu</text>\n", sx + 4, sy - 4, k + 1);
    out << buf;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace qes
