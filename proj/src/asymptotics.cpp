#include "qes/asymptotics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "qes/error.hpp"
#include "qes/spectrum.hpp"

namespace qes {

namespace {

double segment_radius(double tau) { return 8.0 * tau * std::sqrt(std::max(0.0, 1.0 - tau)); }

/// Stable roots of a x^2 + b x + c.
std::array<Complex, 2> quadratic_roots(Complex a, Complex b, Complex c) {
  const Complex d = std::sqrt(b * b - 4.0 * a * c);
  const Complex q = std::abs(b + d) >= std::abs(b - d) ? -0.5 * (b + d) : -0.5 * (b - d);
  if (q == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
  return {q / a, c / q};
}

}  // namespace

std::pair<Complex, Complex> segment_endpoints(Complex b, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidArgument("segment_endpoints: tau must lie in [0, 1]");
  const Complex centre = 4.0 * tau * b;
  const double r = segment_radius(tau);
  return {centre + r, centre - r};
}

SegmentFamily segment_family(Complex b, int count) {
  if (count < 2) throw InvalidArgument("segment_family: need at least two samples");
  SegmentFamily family{b, {}};
  family.samples.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double tau = static_cast<double>(k) / (count - 1);
    const auto [first, second] = segment_endpoints(b, tau);
    family.samples.push_back({tau, first, second});
  }
  return family;
}

std::pair<double, double> support_interval_real(double b) {
  const double root = std::sqrt(std::pow(12.0 + b * b, 3));
  const double centre = 36.0 * b - b * b * b;
  double left = 2.0 / 27.0 * (centre - root), right = 2.0 / 27.0 * (centre + root);
  // Past |b| = 2 every segment lies on one side of the origin, which then
  // replaces the focus that has crossed it.
  if (b > 2.0) left = 0.0;
  if (b < -2.0) right = 0.0;
  return {left, right};
}

double density_real(double b, double x) {
  const auto value = [&](double tau) {
    return 64.0 * tau * tau * (1.0 - tau) - (x - 4.0 * tau * b) * (x - 4.0 * tau * b);
  };
  // The cubic in tau is monotone between its critical points, the roots of
  // -192 tau^2 + (128 - 32 b^2) tau + 8 b x.
  std::vector<double> pieces{0.0, 1.0};
  const double qa = -192.0, qb = 128.0 - 32.0 * b * b, qc = 8.0 * b * x;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc >= 0.0) {
    for (const double s : {-1.0, 1.0}) {
      const double c = (-qb + s * std::sqrt(disc)) / (2.0 * qa);
      if (c > 0.0 && c < 1.0) pieces.push_back(c);
    }
  }
  std::sort(pieces.begin(), pieces.end());
  std::vector<double> cuts = pieces;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    const double lo = pieces[k], hi = pieces[k + 1];
    const double flo = value(lo), fhi = value(hi);
    if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) == (fhi < 0.0)) continue;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(value, lo, hi, flo, fhi,
                                                     boost::math::tools::eps_tolerance<double>(52), iters);
    cuts.push_back(0.5 * (r.first + r.second));
  }
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    if (hi - lo <= 0.0 || value(0.5 * (lo + hi)) <= 0.0) continue;
    total += integrator.integrate(
        [&](double tau) {
          const double v = value(tau);
          return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
        },
        lo, hi);
  }
  return total / std::numbers::pi;
}

double cubic_residual(Complex b, Complex point) {
  const double u = b.real(), v = b.imag();
  const double x = point.real(), y = point.imag();
  const double lhs = x - u * y / v;
  return lhs * lhs - (4.0 * v - y) * y * y / (v * v * v);
}

Complex cubic_point(Complex b, double nu) {
  const double u = b.real(), v = b.imag();
  const double w = 1.0 - nu * nu;
  if (w == 0.0) throw InvalidArgument("cubic_point: parameter at a pole");
  const double t = 2.0 * v * nu - u * w;
  const double g = 4.0 * w * w - t * t;
  return {2.0 * v * nu * g / (w * w * w), v * g / (w * w)};
}

CubicOval gamma_oval(Complex b, int samples) {
  if (b.imag() == 0.0) throw InvalidArgument("gamma_oval: b must be non-real");
  if (samples < 8) throw InvalidArgument("gamma_oval: need at least 8 samples");
  const double u = b.real(), v = b.imag();
  // With s = 2 nu / (1 - nu^2) the bracketing quartic is (1 - nu^2)^2 (4 - (v s - u)^2),
  // so its roots in (-1, 1) come from s = (u -+ 2) / v.
  auto nu_of = [](double s) { return s / (1.0 + std::sqrt(1.0 + s * s)); };
  double lo = nu_of((u - 2.0) / v), hi = nu_of((u + 2.0) / v);
  if (lo > hi) std::swap(lo, hi);
  auto quartic = [&](double nu) {
    const double w = 1.0 - nu * nu;
    const double t = 2.0 * v * nu - u * w;
    return 4.0 * w * w - t * t;
  };
  const double scale = 4.0 + (std::abs(u) + std::abs(v)) * (std::abs(u) + std::abs(v));
  if (std::abs(quartic(lo)) > 1e-9 * scale || std::abs(quartic(hi)) > 1e-9 * scale ||
      !(quartic(0.5 * (lo + hi)) > 0.0))
    throw NumericalFailure("gamma_oval: could not bracket the oval parameter range");
  CubicOval oval;
  oval.b = b;
  oval.nu_begin = lo;
  oval.nu_end = hi;
  oval.foci = foci(b);
  for (int k = 0; k < samples; ++k) {
    const double nu = lo + (hi - lo) * k / (samples - 1);
    oval.nu.push_back(nu);
    oval.points.push_back(cubic_point(b, nu));
  }
  return oval;
}

std::array<Complex, 3> foci(Complex b) {
  const Complex w = 12.0 + b * b;
  const Complex root = std::sqrt(w * w * w);
  const Complex centre = 36.0 * b - b * b * b;
  return {Complex(0.0), 2.0 / 27.0 * (centre + root), 2.0 / 27.0 * (centre - root)};
}

Complex foci_quadratic(Complex b, Complex f) {
  const Complex s = 4.0 - b * b;
  return 27.0 * f * f + 4.0 * f * (b * b * b - 36.0 * b) - 16.0 * s * s;
}

std::array<Complex, 2> critical_lambdas(Complex b) {
  // Discriminant of x^3 + B x^2 + C x + D with D = -L, as a quadratic in L.
  const Complex B = 2.0 * b, C = b * b - 4.0;
  const Complex constant = B * B * C * C - 4.0 * C * C * C;
  const Complex linear = 4.0 * B * B * B - 18.0 * B * C;
  return quadratic_roots(Complex(-27.0), linear, constant);
}

double segment_distance(Complex b, Complex z) {
  auto dist = [&](double tau) {
    const Complex w = z - 4.0 * tau * b;
    const double excess = std::max(0.0, std::abs(w.real()) - segment_radius(tau));
    return std::hypot(w.imag(), excess);
  };
  constexpr int grid = 2048;
  int best = 0;
  double best_d = dist(0.0);
  for (int k = 1; k <= grid; ++k) {
    const double d = dist(static_cast<double>(k) / grid);
    if (d < best_d) best_d = d, best = k;
  }
  // Golden-section refinement around the best grid point.
  double lo = std::max(0, best - 1) / static_cast<double>(grid);
  double hi = std::min(grid, best + 1) / static_cast<double>(grid);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double a = hi - ratio * (hi - lo), c = lo + ratio * (hi - lo);
    if (dist(a) < dist(c)) hi = c;
    else lo = a;
  }
  return std::min(best_d, dist(0.5 * (lo + hi)));
}

Complex cauchy_transform(Complex b, Complex z, const CauchyOptions& opts) {
  if (segment_distance(b, z) < opts.branch_guard)
    throw NumericalFailure("cauchy_transform: z lies on the segment family; the branch is ambiguous");
  auto integrand = [&](double tau) -> Complex {
    const Complex w = z - 4.0 * tau * b;
    const double r = segment_radius(tau);
    return 1.0 / (w * std::sqrt(1.0 - r * r / (w * w)));
  };
  // The integrand jumps where z crosses the line carrying a segment.
  std::vector<double> cuts{0.0, 1.0};
  if (b.imag() != 0.0) {
    const double tau = z.imag() / (4.0 * b.imag());
    if (tau > 0.0 && tau < 1.0) cuts.insert(cuts.begin() + 1, tau);
  }
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
  Complex total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double error = 0.0;
    total += Quadrature::integrate(integrand, cuts[k], cuts[k + 1], opts.max_depth, opts.tolerance, &error);
    if (!std::isfinite(error) || error > 1e3 * opts.tolerance * std::max(1.0, std::abs(total)))
      throw NumericalFailure("cauchy_transform: quadrature did not converge");
  }
  return total;
}

std::array<Complex, 3> differential_zeros(Complex b, Complex lambda) {
  const ComplexPoly p({-lambda, b * b - 4.0, 2.0 * b, Complex(1.0)});
  const auto roots = aberth_roots(p).roots;
  return {roots[0], roots[1], roots[2]};
}

std::vector<Complex> trace_horizontal(const std::function<Complex(Complex)>& q, Complex start,
                                      Complex direction, const std::function<double(Complex)>& step,
                                      double max_length, const std::function<bool(Complex)>& stop) {
  std::vector<Complex> path{start};
  Complex heading = direction / std::abs(direction);
  auto field = [&](Complex z, bool& ok) -> Complex {
    const Complex d = 1.0 / std::sqrt(q(z));
    const double n = std::abs(d);
    if (!std::isfinite(n) || n == 0.0) {
      ok = false;
      return heading;
    }
    Complex unit = d / n;
    if ((unit * std::conj(heading)).real() < 0.0) unit = -unit;
    return unit;
  };
  Complex z = start;
  double length = 0.0;
  while (true) {
    const double h = step(z);
    if (!(h > 0.0) || length + 0.5 * h > max_length) break;
    bool ok = true;
    const Complex k1 = field(z, ok);
    const Complex k2 = field(z + 0.5 * h * k1, ok);
    const Complex k3 = field(z + 0.5 * h * k2, ok);
    const Complex k4 = field(z + h * k3, ok);
    if (!ok) break;
    const Complex move = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    z += h * move;
    length += h;
    heading = move / std::abs(move);
    path.push_back(z);
    if (stop && stop(z)) break;
  }
  return path;
}

std::vector<Complex> trace_horizontal(const std::function<Complex(Complex)>& q, Complex start,
                                      Complex direction, double step, int max_steps,
                                      const std::function<bool(Complex)>& stop) {
  return trace_horizontal(q, start, direction, [step](Complex) { return step; }, step * max_steps, stop);
}

TrajectoryTopology trace_horizontal_trajectories(Complex b, Complex lambda, const TrajectoryOptions& opts) {
  TrajectoryTopology topo;
  topo.b = b;
  topo.lambda = lambda;
  topo.zeros = differential_zeros(b, lambda);
  const std::array<Complex, 4> critical{topo.zeros[0], topo.zeros[1], topo.zeros[2], Complex(0.0)};

  double scale = 0.0, reach = 0.0;
  std::array<double, 4> separation;
  separation.fill(std::numeric_limits<double>::infinity());
  for (int i = 0; i < 4; ++i) {
    reach = std::max(reach, std::abs(critical[i]));
    for (int j = 0; j < 4; ++j)
      if (j != i) {
        scale = std::max(scale, std::abs(critical[i] - critical[j]));
        separation[i] = std::min(separation[i], std::abs(critical[i] - critical[j]));
      }
  }
  scale = std::max(scale, 1e-6);
  topo.step = opts.step_fraction * scale;
  topo.capture_radius = opts.capture_steps * topo.step;
  topo.degenerate = *std::min_element(separation.begin(), separation.end()) < topo.step;
  if (topo.degenerate) return topo;

  // Points closer to each other than the nominal capture radius get a
  // proportionally smaller one, and the step shrinks towards every critical point.
  std::array<double, 4> capture;
  for (int k = 0; k < 4; ++k) capture[k] = std::min(topo.capture_radius, 0.2 * separation[k]);
  const double min_step = 0.01 * topo.step;
  const std::function<double(Complex)> step_rule = [&](Complex z) {
    double near = std::numeric_limits<double>::infinity();
    for (const auto& c : critical) near = std::min(near, std::abs(z - c));
    return std::clamp(0.2 * near, min_step, topo.step);
  };

  auto P = [&](Complex t) { return t * (t + b) * (t + b) - 4.0 * t - lambda; };
  auto dP = [&](Complex t) { return 3.0 * t * t + 4.0 * b * t + b * b - 4.0; };
  const std::function<Complex(Complex)> q = [&](Complex t) { return -P(t) / t; };

  const double escape = opts.escape_factor * (1.0 + reach);
  const double max_length = opts.max_length * scale;

  // Near a zero |S| ~ (|P'(z)/z| r)^{1/2}, near the pole |S| ~ (|lambda| / r)^{1/2}.
  auto end_gap = [&](int k, double r) {
    if (k == 3) return 2.0 * std::sqrt(std::abs(lambda) * r);
    return 2.0 / 3.0 * std::sqrt(std::abs(dP(critical[k]) / critical[k])) * std::pow(r, 1.5);
  };
  auto root = [&](Complex t, Complex previous) {
    const Complex v = std::sqrt(P(t) / t);
    return std::abs(v - previous) <= std::abs(v + previous) ? v : -v;
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double two_pi = 2.0 * std::numbers::pi;

  auto run_ray = [&](int origin, double angle) {
    TrajectoryRay ray;
    ray.origin = origin;
    ray.closest_miss = inf;
    ray.approach.fill(inf);
    ray.offset.fill(std::numeric_limits<double>::quiet_NaN());
    ray.mass_to.fill(inf);
    const Complex dir = std::polar(1.0, angle);
    const double launch = 2.0 * capture[origin];
    const Complex start = critical[origin] + launch * dir;
    // Branch of S = (P/Theta)^{1/2} with S dTheta on the positive imaginary axis.
    Complex branch = std::sqrt(P(start) / start);
    if ((branch * dir).imag() < 0.0) branch = -branch;
    Complex previous = start;
    double running = end_gap(origin, launch);
    std::array<Complex, 4> closest_point{}, closest_branch{};
    std::array<double, 4> closest_running{};
    bool left_home = false;
    auto stop = [&](Complex z) {
      const Complex next = root(z, branch);
      running += 0.5 * (std::abs(branch) + std::abs(next)) * std::abs(z - previous);
      const bool outward = (std::conj(z) * (z - previous)).real() > 0.0;
      branch = next;
      previous = z;
      // Far out the trajectories are hyperbolas Re Theta^2 = const: once moving
      // outward they do not return.
      if (std::abs(z) > escape && outward) {
        ray.outcome = TrajectoryRay::Outcome::escaped;
        return true;
      }
      for (int k = 0; k < 4; ++k) {
        double d = std::abs(z - critical[k]);
        if (k == 3) {
          // Trajectories near the pole are parabolas Im 2 (lambda t)^{1/2} = h that pass
          // within h^2 / 4|lambda| of it; only h = 0 ends there.
          const double h = 2.0 * std::sqrt(lambda * z).imag();
          d = std::max(d, h * h / std::abs(lambda));
        }
        if (k == origin) {
          if (d > 4.0 * capture[k]) left_home = true;
          if (!left_home || d >= capture[k]) continue;
        } else {
          ray.closest_miss = std::min(ray.closest_miss, d);
          if (d < ray.approach[k]) {
            ray.approach[k] = d;
            closest_point[k] = z;
            closest_branch[k] = branch;
            closest_running[k] = running;
          }
          if (d >= capture[k]) continue;
        }
        ray.outcome = TrajectoryRay::Outcome::captured;
        ray.target = k;
        return true;
      }
      return false;
    };
    auto path = trace_horizontal(q, start, dir, step_rule, max_length, stop);
    ray.mass = running;
    if (ray.outcome == TrajectoryRay::Outcome::captured)
      ray.mass += end_gap(ray.target, std::abs(previous - critical[ray.target]));
    ray.mass /= two_pi;

    static const std::array<double, 8> nodes{0.0198550717512319, 0.1016667612931866, 0.2372337950418355,
                                             0.4082826787521751, 0.5917173212478249, 0.7627662049581645,
                                             0.8983332387068134, 0.9801449282487681};
    static const std::array<double, 8> weights{0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                               0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                               0.1111905172266872, 0.0506142681451881};
    for (int k = 0; k < 4; ++k) {
      if (k == origin || !std::isfinite(ray.approach[k])) continue;
      const Complex gap = closest_point[k] - critical[k];
      ray.mass_to[k] = (closest_running[k] + end_gap(k, std::abs(gap))) / two_pi;
      if (k == 3) continue;
      // Theta = z_k + s^2 gap removes the square-root endpoint behaviour; the root
      // is continued from the closest point (s = 1) inwards.
      Complex s_branch = closest_branch[k], integral = 0.0;
      for (int n = 7; n >= 0; --n) {
        const double sv = nodes[n];
        s_branch = root(critical[k] + sv * sv * gap, s_branch);
        integral += weights[n] * s_branch * 2.0 * sv * gap;
      }
      ray.offset[k] = -integral.real();
    }
    if (opts.keep_paths) ray.path = std::move(path);
    return ray;
  };

  for (int k = 0; k < 3; ++k) {
    // Near a simple zero q ~ q'(z0)(t - z0): three directions with q dt^2 > 0.
    const Complex slope = -dP(critical[k]) / critical[k];
    for (int j = 0; j < 3; ++j)
      topo.rays.push_back(run_ray(k, (-std::arg(slope) + 2.0 * std::numbers::pi * j) / 3.0));
  }
  // Near the pole q ~ lambda / t: a single direction.
  topo.rays.push_back(run_ray(3, -std::arg(lambda)));

  for (const auto& ray : topo.rays) {
    if (ray.outcome == TrajectoryRay::Outcome::captured && ray.target != ray.origin) {
      const int a = std::min(ray.origin, ray.target), c = std::max(ray.origin, ray.target);
      const bool seen = std::any_of(topo.connections.begin(), topo.connections.end(),
                                    [&](const TrajectoryConnection& e) { return e.from == a && e.to == c; });
      if (!seen) topo.connections.push_back({a, c, ray.mass});
    } else if (ray.outcome != TrajectoryRay::Outcome::captured) {
      for (int k = 0; k < 4; ++k)
        if (k != ray.origin && ray.approach[k] < opts.ambiguity_factor * capture[k]) topo.ambiguous = true;
    }
  }
  for (const auto& e : topo.connections) {
    (e.to_pole() ? topo.zero_pole : topo.zero_zero) = true;
    topo.total_mass += e.mass;
  }
  topo.in_support = topo.connections.size() == 2 && topo.zero_zero && topo.zero_pole &&
                    std::abs(topo.total_mass - 1.0) <= opts.mass_tolerance;
  return topo;
}

namespace {

/// The closest pass of a ray from one zero by another, seen from one grid point.
struct NearConnection {
  Complex from;
  Complex to;
  double offset;
  double approach;
  double mass;
};

struct ScanSample {
  bool in_support = false;
  double scale = 0.0;
  double pole_mass = 0.0;
  double pole_approach = 0.0;
  std::vector<NearConnection> near;
};

ScanSample sample_point(Complex b, Complex lambda, const TrajectoryOptions& opts, double nudge) {
  ScanSample sample;
  const auto topo = trace_horizontal_trajectories(b, lambda, opts);
  if (topo.degenerate) {
    int votes = 0;
    for (const Complex d : {Complex(nudge), Complex(-nudge), Complex(0.0, nudge), Complex(0.0, -nudge)})
      votes += trace_horizontal_trajectories(b, lambda + d, opts).in_support ? 1 : 0;
    sample.in_support = votes >= 2;
    return sample;
  }
  sample.in_support = topo.in_support;
  sample.scale = topo.step / opts.step_fraction;
  const TrajectoryRay& pole = topo.rays.back();
  if (pole.outcome == TrajectoryRay::Outcome::captured) {
    sample.pole_mass = pole.mass;
  } else {
    int nearest = 0;
    for (int k = 1; k < 3; ++k)
      if (pole.approach[k] < pole.approach[nearest]) nearest = k;
    sample.pole_mass = pole.mass_to[nearest];
    sample.pole_approach = pole.approach[nearest];
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const TrajectoryRay* best = nullptr;
      for (const auto& ray : topo.rays)
        if (ray.origin == i && std::isfinite(ray.approach[j]) && (!best || ray.approach[j] < best->approach[j]))
          best = &ray;
      if (best)
        sample.near.push_back({topo.zeros[i], topo.zeros[j], best->offset[j], best->approach[j], best->mass_to[j]});
    }
  return sample;
}

}  // namespace

std::vector<Complex> support_scan(Complex b, const ScanRegion& region, const TrajectoryOptions& opts) {
  if (region.columns < 1 || region.rows < 1) throw InvalidArgument("support_scan: empty grid");
  const double x0 = region.lower_left.real(), y0 = region.lower_left.imag();
  const double x1 = region.upper_right.real(), y1 = region.upper_right.imag();
  if (!(x1 >= x0 && y1 >= y0)) throw InvalidArgument("support_scan: region corners are not ordered");
  const int cols = region.columns, rows = region.rows;
  const double dx = cols > 1 ? (x1 - x0) / (cols - 1) : 0.0;
  const double dy = rows > 1 ? (y1 - y0) / (rows - 1) : 0.0;
  const double nudge = 0.25 * std::max({dx, dy, 1e-6});
  auto point = [&](std::size_t idx) {
    return Complex(x0 + dx * static_cast<double>(idx % cols), y0 + dy * static_cast<double>(idx / cols));
  };

  const std::size_t total = static_cast<std::size_t>(cols) * rows;
  std::vector<ScanSample> samples(total);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t idx = w; idx < total; idx += workers) samples[idx] = sample_point(b, point(idx), opts, nudge);
    });
  for (auto& t : pool) t.join();

  std::vector<char> inside(total, 0);
  for (std::size_t idx = 0; idx < total; ++idx) inside[idx] = samples[idx].in_support ? 1 : 0;

  // A connection curve crossing a grid edge shows up as a sign change of the
  // transversal offset of the same pair of zeros at both ends. The nearer end
  // is marked when the measure carried by the two connections is positive.
  auto cross_edge = [&](std::size_t a, std::size_t c) {
    const ScanSample& A = samples[a];
    const ScanSample& C = samples[c];
    if (A.near.empty() || C.near.empty()) return;
    const double window = 0.1 * std::max(A.scale, C.scale);
    for (const auto& na : A.near) {
      if (!(na.approach < window)) continue;
      const NearConnection* match = nullptr;
      for (const auto& nc : C.near)
        if (!match || std::abs(nc.from - na.from) + std::abs(nc.to - na.to) <
                          std::abs(match->from - na.from) + std::abs(match->to - na.to))
          match = &nc;
      if (!(match->approach < window) || !(na.offset * match->offset < 0.0)) continue;
      const bool a_nearer = std::abs(na.offset) <= std::abs(match->offset);
      if (!((a_nearer ? A : C).pole_approach < 0.5 * window)) continue;
      const double mass = a_nearer ? na.mass + A.pole_mass : match->mass + C.pole_mass;
      if (std::abs(mass - 1.0) > 2.0 * opts.mass_tolerance) continue;
      inside[a_nearer ? a : c] = 1;
    }
  };
  for (int r = 0; r < rows; ++r)
    for (int k = 0; k < cols; ++k) {
      const std::size_t idx = static_cast<std::size_t>(r) * cols + k;
      if (k + 1 < cols) cross_edge(idx, idx + 1);
      if (r + 1 < rows) cross_edge(idx, idx + cols);
    }

  std::vector<Complex> result;
  for (std::size_t idx = 0; idx < total; ++idx)
    if (inside[idx]) result.push_back(point(idx));
  return result;
}

std::array<bool, 3> SupportGeometry::reached(double tol) const {
  return {distance[0] <= tol, distance[1] <= tol, distance[2] <= tol};
}

int SupportGeometry::legs(double tol) const {
  const auto r = reached(tol);
  if (r[0] && r[1] && r[2]) return 3;
  if (r[0] && (r[1] != r[2])) return 1;
  return 0;
}

SupportGeometry support_geometry(Complex b, int grid, double margin, double local_half, int local_grid,
                                 const TrajectoryOptions& opts) {
  if (grid < 2 || local_grid < 2)
    throw InvalidArgument("support_geometry: grids must have at least two points per side");
  SupportGeometry g;
  g.b = b;
  g.ends = foci(b);
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
  for (const auto& f : g.ends) {
    x0 = std::min(x0, f.real()), x1 = std::max(x1, f.real());
    y0 = std::min(y0, f.imag()), y1 = std::max(y1, f.imag());
  }
  g.region = ScanRegion{Complex(x0 - margin, y0 - margin), Complex(x1 + margin, y1 + margin), grid, grid};
  g.step = std::max(x1 - x0, y1 - y0) / (grid - 1) + 2.0 * margin / (grid - 1);
  g.points = support_scan(b, g.region, opts);
  for (int k = 0; k < 3; ++k) {
    const Complex h(local_half, local_half);
    const auto local = support_scan(b, ScanRegion{g.ends[k] - h, g.ends[k] + h, local_grid, local_grid}, opts);
    g.local_points.insert(g.local_points.end(), local.begin(), local.end());
    double d = INFINITY;
    for (const auto& p : g.points) d = std::min(d, std::abs(p - g.ends[k]));
    for (const auto& p : local) d = std::min(d, std::abs(p - g.ends[k]));
    g.distance[k] = d;
  }
  return g;
}

LimitMeasureProbe limit_probe(int m, Complex b, Complex target) {
  const SexticProblem prob(m);
  const Spectrum spec = scaled_eigenvalues(prob, b);
  std::size_t best = 0;
  for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - target) < std::abs(spec.eigenvalues[best] - target)) best = i;
  LimitMeasureProbe probe;
  probe.m = m;
  probe.b = b;
  probe.lambda = spec.eigenvalues[best];
  const double root_m = std::sqrt(static_cast<double>(m));
  const auto roots = eigenpolynomial_roots(prob, b * root_m, probe.lambda * std::pow(root_m, 3));
  probe.scaled_roots.reserve(roots.size());
  for (const auto& r : roots) probe.scaled_roots.push_back(r / root_m);
  return probe;
}

ResidualStats omega_quadratic_residual(Complex b, Complex lambda, const LimitMeasureProbe& probe,
                                       std::span<const Complex> test_points) {
  const auto& roots = probe.scaled_roots;
  double diameter = 0.0;
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j) diameter = std::max(diameter, std::abs(roots[i] - roots[j]));
  std::vector<double> values;
  values.reserve(test_points.size());
  for (const Complex t : test_points) {
    for (const auto& r : roots)
      if (std::abs(t - r) < 0.05 * diameter)
        throw InvalidArgument("omega_quadratic_residual: test point too close to the root cloud");
    const Complex c = empirical_cauchy(roots, t);
    values.push_back(std::abs(t * c * c - t * (t + b) * c + t + lambda / 4.0));
  }
  ResidualStats stats;
  stats.count = values.size();
  if (values.empty()) return stats;
  for (double v : values) stats.mean += v, stats.max = std::max(stats.max, v);
  stats.mean /= static_cast<double>(values.size());
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  stats.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return stats;
}

}  // namespace qes
