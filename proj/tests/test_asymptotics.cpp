#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qes/asymptotics.hpp"
#include "qes/error.hpp"
#include "qes/spectrum.hpp"

using namespace qes;

namespace {

const double kEdge = 16.0 / (3.0 * std::sqrt(3.0));

double set_distance(std::span<const Complex> a, std::span<const Complex> b) {
  double worst = 0.0;
  for (const auto& x : a) {
    double best = INFINITY;
    for (const auto& y : b) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

double nearest(std::span<const Complex> points, Complex z) {
  double best = INFINITY;
  for (const auto& p : points) best = std::min(best, std::abs(p - z));
  return best;
}

/// Density at b = 0 in the variable normalised to [-1, 1]:
/// (C/pi) int dtau / sqrt(64 tau (1 - tau)^2 - C^2 x^2), over the tau where the
/// radicand is positive. Brackets come from bisection on the radicand.
double normalised_density_zero(double x) {
  const double C = kEdge;
  auto radicand = [&](double t) { return 64.0 * t * (1.0 - t) * (1.0 - t) - C * C * x * x; };
  // The radicand peaks at tau = 1/3 with value C^2.
  if (radicand(1.0 / 3.0) <= 0.0) return 0.0;
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  double lo = 0.0, hi = 1.0 / 3.0;
  if (radicand(0.0) < 0.0) {
    const auto r = boost::math::tools::bisect(radicand, 0.0, 1.0 / 3.0, tol, iters);
    lo = 0.5 * (r.first + r.second);
  }
  iters = 200;
  const auto r = boost::math::tools::bisect(radicand, 1.0 / 3.0, 1.0, tol, iters);
  hi = 0.5 * (r.first + r.second);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double value = integrator.integrate(
      [&](double t) {
        const double v = radicand(t);
        return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0;
      },
      lo, hi);
  return C / std::numbers::pi * value;
}

}  // namespace

TEST_CASE("segment endpoints") {
  auto [a, b] = segment_endpoints(Complex(0.3, -1.2), 0.0);
  CHECK(a == Complex(0.0));
  CHECK(b == Complex(0.0));
  std::tie(a, b) = segment_endpoints(Complex(2.0, 1.0), 1.0);
  CHECK(std::abs(a - Complex(8.0, 4.0)) < 1e-15);
  CHECK(std::abs(b - Complex(8.0, 4.0)) < 1e-15);
  std::tie(a, b) = segment_endpoints(0.0, 0.5);
  CHECK(std::abs(a - 2.0 * std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(b + 2.0 * std::sqrt(2.0)) < 1e-14);
  CHECK_THROWS_AS(segment_endpoints(1.0, 1.5), InvalidArgument);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0), t(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const Complex bb(u(rng), u(rng));
    const double tau = t(rng);
    const auto [p, q] = segment_endpoints(bb, tau);
    for (const Complex z : {p, q}) {
      const Complex w = z - 4.0 * tau * bb;
      CHECK(std::abs(w * w - 64.0 * tau * tau * (1.0 - tau)) < 1e-12 * std::max(1.0, std::norm(z)));
    }
  }
  const auto fam = segment_family(Complex(1.0, 1.0), 11);
  REQUIRE(fam.samples.size() == 11);
  CHECK(fam.samples[10].tau == 1.0);
}

TEST_CASE("real support interval") {
  auto [l, r] = support_interval_real(0.0);
  CHECK(std::abs(l + kEdge) < 1e-13);
  CHECK(std::abs(r - kEdge) < 1e-13);
  std::tie(l, r) = support_interval_real(1.0);
  CHECK(std::abs(l - 2.0 / 27.0 * (35.0 - std::sqrt(2197.0))) < 1e-13);
  CHECK(std::abs(r - 2.0 / 27.0 * (35.0 + std::sqrt(2197.0))) < 1e-13);
  CHECK(std::abs(l + 0.87942) < 1e-5);
  CHECK(std::abs(r - 6.06460) < 1e-5);

  // The union of the segments: extremes of 4 tau b +- 8 tau sqrt(1 - tau) over tau.
  for (double b : {-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 4.0}) {
    std::tie(l, r) = support_interval_real(b);
    auto upper = [&](double t) { return -(4.0 * t * b + 8.0 * t * std::sqrt(1.0 - t)); };
    auto lower = [&](double t) { return 4.0 * t * b - 8.0 * t * std::sqrt(1.0 - t); };
    const auto hi = boost::math::tools::brent_find_minima(upper, 0.0, 1.0, 52);
    const auto lo = boost::math::tools::brent_find_minima(lower, 0.0, 1.0, 52);
    const double right = std::max({-hi.second, -upper(0.0), -upper(1.0)});
    const double left = std::min({lo.second, lower(0.0), lower(1.0)});
    CHECK(std::abs(right - r) < 1e-9);
    CHECK(std::abs(left - l) < 1e-9);
  }
}

TEST_CASE("limiting density for real b") {
  // At b = 0 the library density in x and the normalised formula in x / C agree.
  for (double x : {-2.2, 0.01, 0.3, 1.0, 2.0, 2.9, 3.05}) {
    const double expected = normalised_density_zero(x / kEdge) / kEdge;
    CHECK(std::abs(density_real(0.0, x) - expected) < 1e-7 * std::max(1.0, expected));
  }
  CHECK(density_real(0.0, 3.2) == 0.0);
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double b : {0.0, 1.0}) {
    const auto [l, r] = support_interval_real(b);
    // Logarithmic singularity at the origin.
    const auto density = [&](double x) { return density_real(b, x); };
    const double total = integrator.integrate(density, l, 0.0) + integrator.integrate(density, 0.0, r);
    CHECK(std::abs(total - 1.0) < 1e-6);
  }
}

TEST_CASE("nodal cubic oval") {
  CHECK_THROWS_AS(gamma_oval(1.0, 16), InvalidArgument);
  CHECK_THROWS_AS(gamma_oval(Complex(1.0, 1.0), 4), InvalidArgument);
  for (const Complex b : {Complex(0.75, 1.0), Complex(1.5, 2.0), Complex(-2.5, 0.4), Complex(3.0, -1.0)}) {
    const auto oval = gamma_oval(b, 64);
    REQUIRE(oval.points.size() == 64);
    for (const auto& p : oval.points) CHECK(std::abs(cubic_residual(b, p)) < 1e-9 * std::max(1.0, std::norm(p)));
    // Both ends of the parameter range are the node.
    CHECK(std::abs(oval.points.front()) < 1e-12);
    CHECK(std::abs(oval.points.back()) < 1e-12);
    CHECK(oval.foci[0] == Complex(0.0));
  }

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0), v(0.2, 3.0), t(0.0, 1.0), sign(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Complex b(u(rng), sign(rng) < 0.0 ? -v(rng) : v(rng));
    const auto [p, q] = segment_endpoints(b, t(rng));
    CHECK(std::abs(cubic_residual(b, p)) < 1e-9 * std::max(1.0, std::norm(p)));
    CHECK(std::abs(cubic_residual(b, q)) < 1e-9 * std::max(1.0, std::norm(q)));
  }

  // The eigenvalue cloud of the scaled matrix ends near the foci.
  const Complex b(0.75, 1.0);
  const auto cloud = scaled_eigenvalues(SexticProblem(100), b).eigenvalues;
  for (const auto& f : foci(b)) CHECK(nearest(cloud, f) < 0.1);
}

TEST_CASE("foci") {
  auto f = foci(0.0);
  CHECK(f[0] == Complex(0.0));
  CHECK(std::abs(f[1] - 16.0 * std::sqrt(3.0) / 9.0) < 1e-13);
  CHECK(std::abs(f[2] + 16.0 * std::sqrt(3.0) / 9.0) < 1e-13);
  for (double b : {-2.0, -0.5, 1.0, 2.0}) {
    const auto [l, r] = support_interval_real(b);
    f = foci(b);
    CHECK(f[1].real() == r);
    CHECK(f[2].real() == l);
  }
  // Beyond |b| = 2 one focus has crossed the origin and the origin is the end.
  for (double b : {-4.0, -2.5, 3.0}) {
    const auto [l, r] = support_interval_real(b);
    f = foci(b);
    CHECK(std::min(l * l, r * r) == 0.0);
    CHECK(std::min(std::abs(f[1].real() - (l + r)), std::abs(f[2].real() - (l + r))) < 1e-12 * std::abs(l + r));
  }
  // At b = 2 the constant term of the quadratic factor vanishes, so 0 is a focus.
  CHECK(std::abs(foci_quadratic(2.0, 0.0)) == 0.0);
  f = foci(2.0);
  CHECK(std::min(std::abs(f[1]), std::abs(f[2])) < 1e-13);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Complex b(u(rng), u(rng));
    f = foci(b);
    for (int j = 1; j < 3; ++j) CHECK(std::abs(foci_quadratic(b, f[j])) < 1e-10 * std::max(1.0, std::norm(f[j])) * 100);
    auto neg = foci(-b), conj = foci(std::conj(b));
    std::array<Complex, 3> flipped{-neg[0], -neg[1], -neg[2]};
    std::array<Complex, 3> mirrored{std::conj(conj[0]), std::conj(conj[1]), std::conj(conj[2])};
    CHECK(set_distance(f, flipped) < 1e-10 * std::max(1.0, std::abs(f[1])));
    CHECK(set_distance(f, mirrored) < 1e-10 * std::max(1.0, std::abs(f[1])));
  }
}

TEST_CASE("critical values of the cubic") {
  auto c = critical_lambdas(0.0);
  const std::array<Complex, 2> edge{Complex(kEdge), Complex(-kEdge)};
  CHECK(set_distance(c, edge) < 1e-12);

  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const Complex b(u(rng), u(rng));
    c = critical_lambdas(b);
    const auto f = foci(b);
    const std::array<Complex, 2> nonzero{f[1], f[2]};
    const double scale = std::max(1.0, std::abs(f[1]) + std::abs(f[2]));
    CHECK(set_distance(c, nonzero) < 1e-10 * scale);
    CHECK(set_distance(nonzero, c) < 1e-10 * scale);
    // Critical values of t -> t (t + b)^2 - 4t at the roots of its derivative.
    const Complex d = std::sqrt(16.0 * b * b - 12.0 * (b * b - 4.0));
    std::array<Complex, 2> values;
    for (int s = 0; s < 2; ++s) {
      const Complex t = (-4.0 * b + (s ? d : -d)) / 6.0;
      values[s] = t * (t + b) * (t + b) - 4.0 * t;
    }
    CHECK(set_distance(c, values) < 1e-10 * scale);
  }
  // At b = 2 the value 0 is critical: t ((t + 2)^2 - 4) = t^2 (t + 4).
  c = critical_lambdas(2.0);
  CHECK(std::min(std::abs(c[0]), std::abs(c[1])) < 1e-13);
}

TEST_CASE("Cauchy transform of the limiting measure") {
  const Complex far(1e4, 0.0);
  CHECK(std::abs(far * cauchy_transform(Complex(1.0, 1.0), far) - 1.0) <= 1e-3);

  // The z^-2 coefficient is the mean, int_0^1 4 tau b dtau = 2b, and is
  // insensitive to the quadrature tolerance.
  const Complex b(0.75, 1.0);
  for (const Complex z : {Complex(300.0, 200.0), Complex(-500.0, 100.0)}) {
    CauchyOptions loose;
    loose.tolerance = 1e-8;
    const Complex fine = z * z * (cauchy_transform(b, z) - 1.0 / z);
    const Complex coarse = z * z * (cauchy_transform(b, z, loose) - 1.0 / z);
    CHECK(std::abs(fine - 2.0 * b) < 0.05 * std::abs(2.0 * b));
    CHECK(std::abs(fine - coarse) < 1e-3 * std::abs(fine));
  }

  const auto cloud = scaled_eigenvalues(SexticProblem(100), b).eigenvalues;
  for (const Complex z : {Complex(10.0, 0.0), Complex(0.0, 8.0), Complex(-6.0, -3.0), Complex(7.0, 7.0)}) {
    const Complex limit = cauchy_transform(b, z);
    CHECK(std::abs(limit - empirical_cauchy(cloud, z)) <= 0.05 * std::abs(limit));
  }

  // b = 0, z = 5: against the density integrated directly.
  const Complex value = cauchy_transform(0.0, 5.0);
  CHECK(std::abs(value.imag()) < 1e-14);
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double direct = integrator.integrate(
      [](double x) { return normalised_density_zero(x / kEdge) / kEdge / (5.0 - x); }, -kEdge, kEdge);
  CHECK(std::abs(value.real() - direct) < 1e-3);

  CHECK_THROWS_AS(cauchy_transform(0.0, 1.0), NumericalFailure);
  CHECK(segment_distance(0.0, Complex(1.0, 0.5)) == doctest::Approx(0.5));
}

TEST_CASE("horizontal trajectory tracer") {
  // q = 1: horizontal lines.
  const auto path = trace_horizontal([](Complex) { return Complex(1.0); }, Complex(0.3, 0.7), Complex(1.0, 0.2),
                                     0.01, 500);
  REQUIRE(path.size() == 501);
  for (const auto& z : path) CHECK(std::abs(z.imag() - 0.7) < 1e-12);
  CHECK(std::abs(path.back().real() - 5.3) < 1e-9);
  // q = -1: vertical lines.
  const auto vertical =
      trace_horizontal([](Complex) { return Complex(-1.0); }, Complex(0.0), Complex(0.1, 1.0), 0.01, 100);
  for (const auto& z : vertical) CHECK(std::abs(z.real()) < 1e-12);
}

TEST_CASE("trajectory topology") {
  // Three simple zeros of P and a simple pole at 0.
  const Complex b(0.75, 1.0);
  const auto zeros = differential_zeros(b, Complex(1.0, 2.0));
  for (const auto& t : zeros) {
    CHECK(std::abs(t * (t + b) * (t + b) - 4.0 * t - Complex(1.0, 2.0)) < 1e-12);
    CHECK(std::abs(t) > 1e-3);
  }
  CHECK(std::abs(zeros[0] - zeros[1]) > 1e-3);
  CHECK(std::abs(zeros[1] - zeros[2]) > 1e-3);
  CHECK(std::abs(zeros[0] - zeros[2]) > 1e-3);

  // Real b, real L inside the support: both connections lie on the real axis.
  for (const double lambda : {-2.9, -1.0, 0.5, 1.0, 2.5}) {
    const auto topo = trace_horizontal_trajectories(0.0, lambda);
    CHECK(topo.connections.size() == 2);
    CHECK(topo.in_support);
    CHECK(std::abs(topo.total_mass - 1.0) < 1e-3);
  }
  // Outside, the connections on the axis carry a measure with a negative part.
  for (const double lambda : {3.5, 5.0, -4.0}) CHECK_FALSE(trace_horizontal_trajectories(0.0, lambda).in_support);

  // Far from the support.
  for (const Complex lambda : {Complex(30.0, 20.0), Complex(-20.0, 5.0), Complex(0.0, -15.0), Complex(10.0, -10.0)}) {
    const auto topo = trace_horizontal_trajectories(b, lambda);
    CHECK(topo.connections.size() <= 1);
    CHECK_FALSE(topo.in_support);
  }

  // Critical values collide two zeros.
  CHECK(trace_horizontal_trajectories(b, foci(b)[1]).degenerate);

  // Eigenvalues of the m = 100 scaled matrix away from the leg ends. They sit
  // off the limiting legs by an amount that decays with m, so the capture
  // radius is widened from the default 5 steps.
  TrajectoryOptions opts;
  opts.capture_steps = 12.0;
  const auto cloud = scaled_eigenvalues(SexticProblem(100), b).eigenvalues;
  const auto f = foci(b);
  const Complex junction(0.25, 1.65);
  int tried = 0, inside = 0;
  for (const auto& e : cloud) {
    if (nearest(f, e) < 0.3 || std::abs(e - junction) < 0.4) continue;
    ++tried;
    const auto topo = trace_horizontal_trajectories(b, e, opts);
    if (topo.in_support && topo.connections.size() == 2) ++inside;
  }
  CHECK(tried > 50);
  CHECK(inside == tried);
}

TEST_CASE("support scan for real b") {
  for (const double b : {0.0, 1.0}) {
    const auto [l, r] = support_interval_real(b);
    ScanRegion region{Complex(l - 1.0, -0.6), Complex(r + 1.0, 0.6), 41, 13};
    const auto points = support_scan(b, region);
    const double step = (r - l + 2.0) / 40.0;
    REQUIRE_FALSE(points.empty());
    double out = 0.0;
    for (const auto& p : points)
      out = std::max(out, std::hypot(std::max({0.0, l - p.real(), p.real() - r}), p.imag()));
    double missed = 0.0;
    for (int k = 0; k <= 200; ++k) missed = std::max(missed, nearest(points, Complex(l + (r - l) * k / 200.0, 0.0)));
    CHECK(out <= step + 0.05);
    CHECK(missed <= step + 0.05);
  }
}

TEST_CASE("support scan for complex b") {
  auto scan = [](Complex b, int n) {
    const auto f = foci(b);
    const double x0 = std::min({0.0, f[1].real(), f[2].real()}) - 0.5;
    const double x1 = std::max({0.0, f[1].real(), f[2].real()}) + 0.5;
    const double y0 = std::min({0.0, f[1].imag(), f[2].imag()}) - 0.5;
    const double y1 = std::max({0.0, f[1].imag(), f[2].imag()}) + 0.5;
    const double step = std::max((x1 - x0), (y1 - y0)) / (n - 1);
    return std::make_pair(support_scan(b, ScanRegion{Complex(x0, y0), Complex(x1, y1), n, n}), step);
  };

  SUBCASE("three legs") {
    const Complex b(0.75, 1.0);
    const auto [points, step] = scan(b, 30);
    for (const auto& f : foci(b)) CHECK(nearest(points, f) <= 2.0 * step);
    const auto cloud = scaled_eigenvalues(SexticProblem(100), b).eigenvalues;
    for (const auto& p : points) CHECK(nearest(cloud, p) <= 2.0 * step);
  }
  SUBCASE("one leg") {
    const Complex b(1.5, 2.0);
    const auto [points, step] = scan(b, 30);
    const auto f = foci(b);
    CHECK(nearest(points, 0.0) <= 2.0 * step);
    const double d1 = nearest(points, f[1]), d2 = nearest(points, f[2]);
    CHECK(std::min(d1, d2) <= 2.0 * step);
    CHECK(std::max(d1, d2) > 4.0 * step);
    const auto cloud = scaled_eigenvalues(SexticProblem(100), b).eigenvalues;
    for (const auto& p : points) CHECK(nearest(cloud, p) <= 2.0 * step);
  }
}

TEST_CASE("support geometry summary") {
  // For real b the support is the interval between the nonzero foci, which
  // contains the origin.
  const auto g = support_geometry(1.0, 12, 0.5, 0.2, 9);
  const auto [l, r] = support_interval_real(1.0);
  CHECK(std::abs(g.ends[1].real() - r) < 1e-10);
  CHECK(std::abs(g.ends[2].real() - l) < 1e-10);
  for (const double d : g.distance) CHECK(d <= 0.06);
  CHECK(g.legs(0.1) == 3);
  CHECK(g.reached(0.1) == std::array<bool, 3>{true, true, true});
  CHECK(g.step > 0.0);
  CHECK_THROWS_AS(support_geometry(1.0, 1), InvalidArgument);
}

TEST_CASE("eigenpolynomial root measure") {
  const Complex b(0.75, 1.0);
  const int m = 100;
  const auto probe = limit_probe(m, b, Complex(2.4, 2.46));
  REQUIRE(probe.scaled_roots.size() == static_cast<std::size_t>(m));

  // Scaling: roots of p_m at b sqrt(m), lambda m^{3/2}, divided by sqrt(m).
  const double rm = std::sqrt(double(m));
  const auto raw = eigenpolynomial_roots(SexticProblem(m), b * rm, probe.lambda * rm * rm * rm);
  std::vector<Complex> scaled;
  for (const auto& r : raw) scaled.push_back(r / rm);
  CHECK(set_distance(scaled, probe.scaled_roots) < 1e-9);

  Complex centre = 0.0;
  double diameter = 0.0;
  for (const auto& r : probe.scaled_roots) {
    centre += r;
    for (const auto& s : probe.scaled_roots) diameter = std::max(diameter, std::abs(r - s));
  }
  centre /= double(m);
  std::vector<Complex> ring, distant;
  for (int k = 0; k < 16; ++k) {
    ring.push_back(centre + 2.0 * diameter * std::polar(1.0, 2.0 * std::numbers::pi * k / 16));
    distant.push_back(centre + 1e4 * diameter * std::polar(1.0, 2.0 * std::numbers::pi * k / 16));
  }
  const auto near = omega_quadratic_residual(b, probe.lambda, probe, ring);
  CHECK(near.count == 16);
  CHECK(near.median <= 0.1);
  // At large Theta the balance C ~ 1/Theta leaves the mean of the roots minus
  // (L/4 - b), which is O(1/m).
  const auto farther = omega_quadratic_residual(b, probe.lambda, probe, distant);
  CHECK(farther.max <= 0.05);
  CHECK_THROWS_AS(omega_quadratic_residual(b, probe.lambda, probe, std::vector<Complex>{probe.scaled_roots[3]}),
                  InvalidArgument);
}
