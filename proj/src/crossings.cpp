#include "qes/crossings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "qes/multiprecision.hpp"
#include "qes/spectrum.hpp"

namespace qes {

ExactUnivariatePoly discriminant_poly(int m) {
  if (m < 1) throw InvalidArgument("discriminant_poly: m must be at least 1");
  const ExactBivariatePoly d = charpoly_exact(SexticProblem(m));
  ExactUnivariatePoly res = resultant(d, d.derivative_lambda(), Variable::Lambda);
  const long n = m + 1;
  if ((n * (n - 1) / 2) % 2 == 1) res = ExactUnivariatePoly({}, Variable::B) - res;
  return res;
}

RowPartition cluster_rows(std::span<const Complex> upper, int m) {
  const std::size_t expected = static_cast<std::size_t>(m) * (m + 1) / 2;
  if (m < 1 || upper.size() != expected) throw InvalidArgument("cluster_rows: expected m(m+1)/2 points");
  std::vector<int> order(upper.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return upper[a].imag() < upper[b].imag(); });

  // Cut after the m-1 largest gaps.
  std::vector<int> gaps(order.size() > 0 ? order.size() - 1 : 0);
  std::iota(gaps.begin(), gaps.end(), 0);
  std::sort(gaps.begin(), gaps.end(), [&](int a, int b) {
    return upper[order[a + 1]].imag() - upper[order[a]].imag() > upper[order[b + 1]].imag() - upper[order[b]].imag();
  });
  std::vector<int> cuts(gaps.begin(), gaps.begin() + (m - 1));
  std::sort(cuts.begin(), cuts.end());

  RowPartition out;
  std::size_t begin = 0;
  cuts.push_back(static_cast<int>(order.size()) - 1);
  for (const int cut : cuts) {
    std::vector<int> row(order.begin() + begin, order.begin() + cut + 1);
    std::sort(row.begin(), row.end(), [&](int a, int b) { return upper[a].real() < upper[b].real(); });
    out.rows.push_back(std::move(row));
    begin = cut + 1;
  }
  out.matches_expected = true;
  for (int l = 0; l < m; ++l)
    if (out.rows[l].size() != static_cast<std::size_t>(m - l)) out.matches_expected = false;
  return out;
}

std::vector<Complex> CrossingSet::upper() const {
  std::vector<Complex> out;
  for (const auto& row : rows)
    for (const int i : row) out.push_back(points[i].b);
  return out;
}

namespace {

/// Groups points closer than tol into clusters represented by their mean.
std::vector<Crossing> merge_clusters(const std::vector<Complex>& roots, const std::vector<int>& mult, double tol) {
  std::vector<Crossing> out;
  std::vector<char> used(roots.size(), 0);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    used[i] = 1;
    Complex sum = roots[i];
    int count = 1;
    if (mult[i] > 1)
      for (std::size_t j = i + 1; j < roots.size(); ++j)
        if (!used[j] && std::abs(roots[j] - roots[i]) <= tol) {
          used[j] = 1;
          sum += roots[j];
          ++count;
        }
    out.push_back({sum / double(count), count, 0, 0});
  }
  return out;
}

}  // namespace

CrossingSet crossing_set(int m, const CrossingOptions& opts) { return crossing_set(m, discriminant_poly(m), opts); }

CrossingSet crossing_set(int m, const ExactUnivariatePoly& disc, const CrossingOptions& opts) {
  if (m < 1) throw InvalidArgument("crossing_set: m must be at least 1");
  CrossingSet cs;
  cs.m = m;
  cs.discriminant = disc;
  const int degree = disc.degree();
  if (degree != m * (m + 1)) cs.warnings.push_back("discriminant degree differs from m(m+1)");

  // An even polynomial is solved in b^2.
  bool even = true;
  for (int k = 1; k <= degree && even; k += 2) even = sgn(disc.coeff(k)) == 0;
  std::vector<Complex> roots;
  std::vector<int> mult;
  if (even && degree >= 2) {
    std::vector<BigInt> half;
    for (int k = 0; k <= degree; k += 2) half.push_back(disc.coeff(k));
    const auto rs = mp::exact_poly_roots(ExactUnivariatePoly(half, Variable::B));
    cs.precision = rs.precision;
    const auto& ws = rs.roots.roots;
    double wscale = 1.0;
    for (const auto& w : ws) wscale = std::max(wscale, std::abs(w));
    for (std::size_t i = 0; i < ws.size(); ++i) {
      // A root that is its own conjugate partner is real; snapping it puts
      // the pair exactly on an axis.
      Complex w = ws[i];
      double other = INFINITY;
      for (std::size_t j = 0; j < ws.size(); ++j)
        if (j != i) other = std::min(other, std::abs(ws[j] - std::conj(w)));
      if (2.0 * std::abs(w.imag()) <= opts.merge_tol * wscale && 2.0 * std::abs(w.imag()) < other) w = w.real();
      const Complex r = w.imag() == 0.0 ? (w.real() < 0.0 ? Complex(0.0, std::sqrt(-w.real())) : std::sqrt(w.real()))
                                        : std::sqrt(w);
      roots.push_back(r);
      roots.push_back(Complex(r.real() == 0.0 ? 0.0 : -r.real(), r.imag() == 0.0 ? 0.0 : -r.imag()));
      mult.push_back(rs.roots.multiplicity[i]);
      mult.push_back(rs.roots.multiplicity[i]);
    }
  } else {
    const auto rs = mp::exact_poly_roots(disc);
    cs.precision = rs.precision;
    roots = rs.roots.roots;
    mult = rs.roots.multiplicity;
  }

  double scale = 1.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  cs.points = merge_clusters(roots, mult, opts.merge_tol * scale);

  std::vector<int> upper_idx;
  int real_count = 0;
  for (std::size_t i = 0; i < cs.points.size(); ++i) {
    const Complex b = cs.points[i].b;
    if (std::abs(b.imag()) <= 1e-9 * scale) {
      ++real_count;
      continue;
    }
    if (b.imag() > 0.0) upper_idx.push_back(static_cast<int>(i));
  }
  if (real_count > 0) cs.warnings.push_back(std::to_string(real_count) + " real crossing(s)");

  // Pair every upper point with its conjugate.
  std::vector<int> partner(cs.points.size(), -1);
  for (const int i : upper_idx) {
    double best = INFINITY;
    int arg = -1;
    for (std::size_t j = 0; j < cs.points.size(); ++j) {
      if (cs.points[j].b.imag() >= 0.0 || partner[j] >= 0) continue;
      const double d = std::abs(cs.points[j].b - std::conj(cs.points[i].b));
      if (d < best) best = d, arg = static_cast<int>(j);
    }
    if (arg < 0 || best > 1e-9 * scale || cs.points[arg].multiplicity != cs.points[i].multiplicity) {
      cs.warnings.push_back("unpaired conjugate crossing");
      continue;
    }
    partner[arg] = i;
    partner[i] = arg;
  }

  std::vector<Complex> upper;
  for (const int i : upper_idx) upper.push_back(cs.points[i].b);
  if (upper.size() == static_cast<std::size_t>(m) * (m + 1) / 2) {
    const RowPartition rp = cluster_rows(upper, m);
    cs.rows_match = rp.matches_expected;
    for (std::size_t l = 0; l < rp.rows.size(); ++l) {
      std::vector<int> row;
      for (std::size_t p = 0; p < rp.rows[l].size(); ++p) {
        const int i = upper_idx[rp.rows[l][p]];
        row.push_back(i);
        for (const int k : {i, partner[i]}) {
          if (k < 0) continue;
          cs.points[k].row = static_cast<int>(l) + 1;
          cs.points[k].position = static_cast<int>(p) + 1;
        }
      }
      cs.rows.push_back(std::move(row));
    }
    if (!cs.rows_match) cs.warnings.push_back("row sizes differ from m, m-1, ..., 1");
  } else {
    cs.warnings.push_back("upper half plane holds " + std::to_string(upper.size()) + " distinct crossings, not m(m+1)/2");
  }
  return cs;
}

std::vector<Crossing> ordered_points(const CrossingSet& cs) {
  std::vector<Crossing> pts = cs.points;
  std::stable_sort(pts.begin(), pts.end(), [](const Crossing& a, const Crossing& b) {
    if ((a.b.imag() > 0.0) != (b.b.imag() > 0.0)) return a.b.imag() > 0.0;
    if (a.row != b.row) return a.row < b.row;
    return a.position < b.position;
  });
  return pts;
}

std::string crossings_csv(std::span<const CrossingSet> sets) {
  std::ostringstream out;
  out << "m,re_b,im_b,row,position,multiplicity\n";
  char buf[128];
  for (const auto& cs : sets)
    for (const auto& c : ordered_points(cs)) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%d,%d\n", cs.m, c.b.real(), c.b.imag(), c.row, c.position,
                    c.multiplicity);
      out << buf;
    }
  return out.str();
}

RhombusStats rhombus_stats(const CrossingSet& cs) {
  RhombusStats st;
  st.m = cs.m;
  const double s = std::sqrt(static_cast<double>(cs.m));
  for (const auto& c : cs.points) {
    st.scaled_points.push_back(c.b / s);
    st.max_abs_re_scaled = std::max(st.max_abs_re_scaled, std::abs(c.b.real()) / s);
    st.max_im_scaled = std::max(st.max_im_scaled, std::abs(c.b.imag()) / s);
  }
  std::set<std::pair<int, int>> edges;
  const auto& p = st.scaled_points;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double best = INFINITY;
    int arg = -1;
    for (std::size_t j = 0; j < p.size(); ++j)
      if (j != i && std::abs(p[j] - p[i]) < best) best = std::abs(p[j] - p[i]), arg = static_cast<int>(j);
    if (arg >= 0) edges.insert({std::min<int>(i, arg), std::max<int>(i, arg)});
  }
  st.nn_edges.assign(edges.begin(), edges.end());
  return st;
}

double symmetry_defect(std::span<const Complex> points) {
  double worst = 0.0;
  for (const auto& p : points)
    for (const Complex image : {-p, std::conj(p)}) {
      double best = INFINITY;
      for (const auto& q : points) best = std::min(best, std::abs(q - image));
      worst = std::max(worst, best);
    }
  return worst;
}

namespace {

/// Directions to the k nearest neighbours of each interior point.
std::vector<std::vector<double>> neighbour_angles(std::span<const Complex> points, int k, double re_max,
                                                  double im_max, double interior) {
  std::vector<std::vector<double>> out;
  if (k < 1 || points.size() <= static_cast<std::size_t>(k)) return out;
  auto inside = [&](Complex z) { return std::abs(z.real()) / re_max + std::abs(z.imag()) / im_max <= interior; };
  std::vector<std::pair<double, int>> dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!inside(points[i])) continue;
    for (std::size_t j = 0; j < points.size(); ++j) dist[j] = {j == i ? INFINITY : std::abs(points[j] - points[i]), int(j)};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::vector<double> angles;
    bool keep = true;
    for (int q = 0; q < k && keep; ++q) {
      keep = inside(points[dist[q].second]);
      angles.push_back(std::arg(points[dist[q].second] - points[i]));
    }
    if (keep) out.push_back(std::move(angles));
  }
  return out;
}

}  // namespace

std::vector<int> neighbour_angle_histogram(std::span<const Complex> points, int k, int bins, double re_max,
                                           double im_max, double interior) {
  if (bins < 1) throw InvalidArgument("neighbour_angle_histogram: bins must be positive");
  std::vector<int> hist(bins, 0);
  for (const auto& angles : neighbour_angles(points, k, re_max, im_max, interior))
    for (double a : angles) {
      a = std::fmod(a + 2.0 * std::numbers::pi, std::numbers::pi);
      hist[std::min(bins - 1, static_cast<int>(a / std::numbers::pi * bins))]++;
    }
  return hist;
}

double hexatic_order(std::span<const Complex> points, int k, double re_max, double im_max, double interior) {
  const auto all = neighbour_angles(points, k, re_max, im_max, interior);
  if (all.empty()) return 0.0;
  double total = 0.0;
  for (const auto& angles : all) {
    Complex sum = 0.0;
    for (const double a : angles) sum += std::polar(1.0, 6.0 * a);
    total += std::abs(sum) / static_cast<double>(angles.size());
  }
  return total / static_cast<double>(all.size());
}

Complex quartic_beta(int m, Complex b) {
  const double n = 4.0 * m + 3.0;
  return 2.0 * (b / std::sqrt(n) - 1.0) * std::pow(n, 2.0 / 3.0);
}

QuarticMap quartic_map(const CrossingSet& cs) {
  QuarticMap qm;
  qm.m = cs.m;
  qm.n = 4 * cs.m + 3;
  for (const auto& c : cs.points) qm.betas.push_back(quartic_beta(cs.m, c.b));
  return qm;
}

double beta_drift(std::span<const Complex> from, std::span<const Complex> to, int count) {
  if (count < 1 || from.size() < static_cast<std::size_t>(count) || to.empty())
    throw InvalidArgument("beta_drift: not enough points");
  std::vector<Complex> near(from.begin(), from.end());
  std::partial_sort(near.begin(), near.begin() + count, near.end(),
                    [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  std::vector<double> d;
  for (int i = 0; i < count; ++i) {
    double best = INFINITY;
    for (const auto& q : to) best = std::min(best, std::abs(q - near[i]));
    d.push_back(best);
  }
  std::nth_element(d.begin(), d.begin() + count / 2, d.end());
  return d[count / 2];
}

}  // namespace qes
