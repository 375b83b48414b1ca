#include "qes/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace qes {

SexticProblem::SexticProblem(int m) : m_(m) {
  if (m < 1) throw InvalidArgument("SexticProblem: m must be a positive integer");
}

Complex TridiagonalMatrix::operator()(int i, int j) const {
  if (i == j) return diag[static_cast<std::size_t>(i)];
  if (j == i + 1) return super[static_cast<std::size_t>(i)];
  if (i == j + 1) return sub[static_cast<std::size_t>(j)];
  return 0.0;
}

TridiagonalMatrix build_matrix(const SexticProblem& prob, Complex b) {
  TridiagonalMatrix t;
  const int n = prob.size();
  for (int i = 0; i < n; ++i) t.diag.push_back(static_cast<double>(prob.diag_factor(i)) * b);
  for (int i = 0; i + 1 < n; ++i) {
    t.super.emplace_back(static_cast<double>(prob.super(i)));
    t.sub.emplace_back(static_cast<double>(prob.sub(i)));
  }
  return t;
}

TridiagonalMatrix build_scaled_matrix(const SexticProblem& prob, Complex b) {
  const double m = prob.m();
  const double s = std::pow(m, 1.5);
  TridiagonalMatrix t = build_matrix(prob, b * std::sqrt(m));
  for (auto& x : t.diag) x /= s;
  for (auto& x : t.super) x /= s;
  for (auto& x : t.sub) x /= s;
  return t;
}

std::vector<ExactBivariatePoly> principal_minors_exact(const SexticProblem& prob) {
  std::vector<ExactBivariatePoly> minors;
  minors.push_back(ExactBivariatePoly::constant(1));
  const ExactBivariatePoly lambda = ExactBivariatePoly::lambda();
  const ExactBivariatePoly b = ExactBivariatePoly::b();
  for (int i = 1; i <= prob.size(); ++i) {
    const ExactBivariatePoly factor = lambda - BigInt(4 * i - 3) * b;
    ExactBivariatePoly next = factor * minors.back();
    if (i >= 2) next = next - BigInt(prob.coupling(i)) * minors[static_cast<std::size_t>(i - 2)];
    minors.push_back(std::move(next));
  }
  return minors;
}

ExactBivariatePoly charpoly_exact(const SexticProblem& prob) { return principal_minors_exact(prob).back(); }

std::vector<ComplexPoly> principal_minors_numeric(const SexticProblem& prob, Complex b) {
  std::vector<std::vector<Complex>> minors{{1.0}};
  for (int i = 1; i <= prob.size(); ++i) {
    const auto& prev = minors.back();
    std::vector<Complex> next(prev.size() + 1, 0.0);
    const Complex shift = static_cast<double>(4 * i - 3) * b;
    for (std::size_t k = 0; k < prev.size(); ++k) {
      next[k + 1] += prev[k];
      next[k] -= shift * prev[k];
    }
    if (i >= 2) {
      const double c = static_cast<double>(prob.coupling(i));
      const auto& prev2 = minors[static_cast<std::size_t>(i - 2)];
      for (std::size_t k = 0; k < prev2.size(); ++k) next[k] -= c * prev2[k];
    }
    minors.push_back(std::move(next));
  }
  std::vector<ComplexPoly> out;
  out.reserve(minors.size());
  for (auto& c : minors) out.emplace_back(std::move(c));
  return out;
}

ComplexPoly charpoly_numeric(const SexticProblem& prob, Complex b) { return principal_minors_numeric(prob, b).back(); }

CharpolyJet charpoly_jet(const SexticProblem& prob, Complex lambda, Complex b) {
  // index 0 holds minor i-2, index 1 holds minor i-1
  Complex v[2] = {0.0, 1.0}, dl[2] = {0.0, 0.0}, dl2[2] = {0.0, 0.0}, db[2] = {0.0, 0.0}, dlb[2] = {0.0, 0.0};
  double mag[2] = {0.0, 1.0};
  long exponent = 0;
  const double alam = std::abs(lambda), ab = std::abs(b);
  for (int i = 1; i <= prob.size(); ++i) {
    const double a = static_cast<double>(4 * i - 3);
    const double c = i >= 2 ? static_cast<double>(prob.coupling(i)) : 0.0;
    const Complex f = lambda - a * b;
    const Complex nv = f * v[1] - c * v[0];
    const Complex ndl = v[1] + f * dl[1] - c * dl[0];
    const Complex ndl2 = 2.0 * dl[1] + f * dl2[1] - c * dl2[0];
    const Complex ndb = -a * v[1] + f * db[1] - c * db[0];
    const Complex ndlb = db[1] - a * dl[1] + f * dlb[1] - c * dlb[0];
    const double nmag = (alam + a * ab) * mag[1] + c * mag[0];
    v[0] = v[1], v[1] = nv;
    dl[0] = dl[1], dl[1] = ndl;
    dl2[0] = dl2[1], dl2[1] = ndl2;
    db[0] = db[1], db[1] = ndb;
    dlb[0] = dlb[1], dlb[1] = ndlb;
    mag[0] = mag[1], mag[1] = nmag;
    if (nmag > 1e150) {
      int e = 0;
      std::frexp(nmag, &e);
      const double s = std::ldexp(1.0, -e);
      for (int k = 0; k < 2; ++k) {
        v[k] *= s, dl[k] *= s, dl2[k] *= s, db[k] *= s, dlb[k] *= s, mag[k] *= s;
      }
      exponent += e;
    }
  }
  return {v[1], dl[1], dl2[1], db[1], dlb[1], mag[1], exponent};
}

double charpoly_residual(const SexticProblem& prob, Complex lambda, Complex b) {
  const CharpolyJet jet = charpoly_jet(prob, lambda, b);
  return jet.magnitude > 0 ? std::abs(jet.value) / jet.magnitude : 0.0;
}

void sort_spectrum(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

namespace {

struct RecurrenceValue {
  Complex correction;
  double residual = 0.0;
  /// Forward error estimate of the root at this point per unit rounding.
  double sensitivity = 0.0;
};

// The recurrence only tracks a few values per step, so the Newton
// correction D/D' is cheap and never needs the monomial coefficients.
RecurrenceValue recurrence_step(const SexticProblem& prob, Complex b, Complex lambda) {
  Complex v0 = 0.0, v1 = 1.0, d0 = 0.0, d1 = 0.0;
  double m0 = 0.0, m1 = 1.0;
  const double alam = std::abs(lambda), ab = std::abs(b);
  for (int i = 1; i <= prob.size(); ++i) {
    const double a = static_cast<double>(4 * i - 3);
    const double c = i >= 2 ? static_cast<double>(prob.coupling(i)) : 0.0;
    const Complex f = lambda - a * b;
    const Complex nv = f * v1 - c * v0;
    const Complex nd = v1 + f * d1 - c * d0;
    const double nm = (alam + a * ab) * m1 + c * m0;
    v0 = v1, v1 = nv, d0 = d1, d1 = nd, m0 = m1, m1 = nm;
    if (nm > 1e150) {
      v0 *= 1e-150, v1 *= 1e-150, d0 *= 1e-150, d1 *= 1e-150, m0 *= 1e-150, m1 *= 1e-150;
    }
  }
  RecurrenceValue out;
  out.residual = m1 > 0 ? std::abs(v1) / m1 : 0.0;
  out.sensitivity = std::abs(d1) > 0 ? m1 / std::abs(d1) : std::numeric_limits<double>::infinity();
  if (v1 == Complex(0.0)) return out;
  out.correction = d1 == Complex(0.0) ? Complex(std::numeric_limits<double>::infinity(), 0.0) : v1 / d1;
  return out;
}

class RecurrenceEvaluator final : public mp::MpNewtonEvaluator {
 public:
  RecurrenceEvaluator(const SexticProblem& prob, Complex b) : prob_(prob), b_(b) {}

  mp::MpStep step(Complex z, long precision) override {
    const mp::MpComplex b(b_, precision), lambda(z, precision);
    mp::MpComplex value(precision), deriv(precision);
    charpoly_mp(prob_, b, lambda, value, deriv);
    // magnitude bound of the same recurrence, in log2
    double m0 = -std::numeric_limits<double>::infinity(), m1 = 0.0;
    const double alam = std::abs(z), ab = std::abs(b_);
    for (int i = 1; i <= prob_.size(); ++i) {
      const double a = static_cast<double>(4 * i - 3);
      const double c = i >= 2 ? static_cast<double>(prob_.coupling(i)) : 0.0;
      const double lf = std::log2(alam + a * ab);
      const double nm = mp::log2_add(lf + m1, c > 0 ? std::log2(c) + m0 : -std::numeric_limits<double>::infinity());
      m0 = m1, m1 = nm;
    }
    const mp::Scaled vs = value.scaled(), ds = deriv.scaled();
    mp::MpStep s;
    s.correction = vs.is_zero() ? Complex(0.0) : mp::ratio(vs, ds);
    s.residual = vs.is_zero() ? 0.0 : std::exp2(std::min(0.0, vs.log2_abs() - m1));
    s.log2_sensitivity = m1 - ds.log2_abs();
    return s;
  }
  int length() const override { return 4 * prob_.size(); }

 private:
  SexticProblem prob_;
  Complex b_;
};

Spectrum finish_spectrum(const SexticProblem& prob, Complex b, std::vector<Complex> roots, std::vector<double> residuals,
                         double cluster_tol, long precision) {
  std::vector<std::size_t> order(roots.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&roots](std::size_t x, std::size_t y) {
    if (roots[x].real() != roots[y].real()) return roots[x].real() < roots[y].real();
    return roots[x].imag() < roots[y].imag();
  });
  Spectrum s;
  for (std::size_t k : order) {
    s.eigenvalues.push_back(roots[k]);
    s.residuals.push_back(residuals.empty() ? recurrence_step(prob, b, roots[k]).residual : residuals[k]);
  }
  s.multiplicity = cluster_multiplicities<double>(s.eigenvalues, cluster_tol);
  s.min_gap = s.eigenvalues.size() < 2 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i)
    for (std::size_t j = i + 1; j < s.eigenvalues.size(); ++j)
      s.min_gap = std::min(s.min_gap, std::abs(s.eigenvalues[i] - s.eigenvalues[j]));
  s.precision = precision;
  return s;
}

}  // namespace

void charpoly_mp(const SexticProblem& prob, const mp::MpComplex& b, const mp::MpComplex& lambda, mp::MpComplex& value,
                 mp::MpComplex& d_lambda) {
  const long prec = lambda.precision();
  mp::MpComplex v0(prec), v1(Complex(1.0), prec), d0(prec), d1(prec), f(prec), t(prec), nv(prec), nd(prec);
  for (int i = 1; i <= prob.size(); ++i) {
    const double a = static_cast<double>(4 * i - 3);
    const double c = i >= 2 ? static_cast<double>(prob.coupling(i)) : 0.0;
    f.assign(b).mul(-a).add(lambda);
    // nd = v1 + f d1 - c d0
    nd.assign(f).mul(d1).add(v1);
    t.assign(d0).mul(c);
    nd.sub(t);
    // nv = f v1 - c v0
    nv.assign(f).mul(v1);
    t.assign(v0).mul(c);
    nv.sub(t);
    std::swap(v0, v1);
    std::swap(v1, nv);
    std::swap(d0, d1);
    std::swap(d1, nd);
  }
  value = v1;
  d_lambda = d1;
}

Spectrum eigenvalues(const SexticProblem& prob, Complex b, const SpectrumOptions& opts) {
  const int n = prob.size();
  const Complex center = static_cast<double>(2 * prob.m() + 1) * b;
  // Gershgorin radius around the mean eigenvalue
  const TridiagonalMatrix t = build_matrix(prob, b);
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = std::abs(t.diag[static_cast<std::size_t>(i)] - center);
    if (i + 1 < n) r += std::abs(t.super[static_cast<std::size_t>(i)]);
    if (i > 0) r += std::abs(t.sub[static_cast<std::size_t>(i - 1)]);
    radius = std::max(radius, r);
  }
  radius = std::max(radius, 1.0);
  std::vector<Complex> start;
  start.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    start.push_back(center + std::polar(radius, 2.0 * std::numbers::pi * (k + 0.5) / n + 0.35));

  NewtonEvaluator<double> eval = [&prob, b](Complex z) -> NewtonStep<double> {
    const RecurrenceValue r = recurrence_step(prob, b, z);
    return {r.correction, r.residual};
  };
  RootSet roots;
  bool converged = true;
  try {
    roots = aberth_iterate<double>(eval, std::move(start), opts.aberth);
  } catch (const RootFindingFailure& e) {
    roots = e.best();
    converged = false;
  }

  double spectral_radius = 1.0;
  for (const auto& z : roots.roots) spectral_radius = std::max(spectral_radius, std::abs(z));
  bool accurate = converged && !opts.force_multiprecision;
  if (accurate) {
    const double unit = std::numeric_limits<double>::epsilon() * 4.0 * n;
    for (std::size_t i = 0; i < roots.roots.size() && accurate; ++i) {
      if (roots.multiplicity[i] > 1) continue;
      accurate = recurrence_step(prob, b, roots.roots[i]).sensitivity * unit <= opts.accuracy * spectral_radius;
    }
  }
  if (accurate) return finish_spectrum(prob, b, std::move(roots.roots), {}, opts.aberth.cluster_tol, 53);

  RecurrenceEvaluator mp_eval(prob, b);
  mp::AdaptiveAberthOptions mopts;
  mopts.aberth = opts.aberth;
  mopts.max_precision = opts.max_precision;
  mopts.scale_floor = spectral_radius;
  mp::AdaptiveRootSet ar = mp::aberth_adaptive(mp_eval, std::move(roots.roots), mopts);
  return finish_spectrum(prob, b, std::move(ar.roots.roots), std::move(ar.roots.residuals), opts.aberth.cluster_tol,
                         ar.precision);
}

Spectrum scaled_eigenvalues(const SexticProblem& prob, Complex b, const SpectrumOptions& opts) {
  const double m = prob.m();
  Spectrum s = eigenvalues(prob, b * std::sqrt(m), opts);
  const double scale = std::pow(m, 1.5);
  for (auto& z : s.eigenvalues) z /= scale;
  s.min_gap /= scale;
  return s;
}

std::vector<mp::MpComplex> eigenpolynomial_mp(const SexticProblem& prob, Complex b, Complex lambda, long precision) {
  const mp::MpComplex bm(b, precision);
  mp::MpComplex lam(lambda, precision), value(precision), deriv(precision);
  // Newton refinement of the eigenvalue to the working precision
  for (int it = 0; it < 64; ++it) {
    charpoly_mp(prob, bm, lam, value, deriv);
    if (value.is_zero() || deriv.is_zero()) break;
    value.div(deriv);
    lam.sub(value);
    if (value.log2_abs() < lam.log2_abs() - static_cast<double>(precision) + 4.0) break;
  }

  // Q's coefficients are a null vector of M^T - lambda I: the operator maps
  // t^k to row k of M. Twisted factorization: forward and backward pivots,
  // twist where the combined pivot is smallest.
  const int n = prob.size();
  const auto N = static_cast<std::size_t>(n);
  std::vector<mp::MpComplex> d, up, lo;
  for (int i = 0; i < n; ++i) {
    mp::MpComplex x(bm);
    x.mul(static_cast<double>(prob.diag_factor(i))).sub(lam);
    d.push_back(std::move(x));
  }
  for (int i = 0; i + 1 < n; ++i) {
    up.emplace_back(Complex(static_cast<double>(prob.sub(i))), precision);
    lo.emplace_back(Complex(static_cast<double>(prob.super(i))), precision);
  }
  mp::MpComplex t(precision);
  // exact zero pivots are replaced by a value at the rounding level
  auto guard = [precision](mp::MpComplex& x, const mp::MpComplex& ref) {
    if (!x.is_zero()) return;
    x.assign(ref).mul(std::ldexp(1.0, -static_cast<int>(precision)));
    if (x.is_zero()) x.assign(Complex(std::ldexp(1.0, -static_cast<int>(precision))));
  };
  std::vector<mp::MpComplex> fwd(d), bwd(d);
  guard(fwd[0], lam);
  for (std::size_t k = 1; k < N; ++k) {
    t.assign(lo[k - 1]).mul(up[k - 1]).div(fwd[k - 1]);
    fwd[k].sub(t);
    guard(fwd[k], lam);
  }
  guard(bwd[N - 1], lam);
  for (std::size_t k = N - 1; k-- > 0;) {
    t.assign(up[k]).mul(lo[k]).div(bwd[k + 1]);
    bwd[k].sub(t);
    guard(bwd[k], lam);
  }
  std::size_t twist = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < N; ++k) {
    t.assign(fwd[k]).add(bwd[k]).sub(d[k]);
    const double g = t.log2_abs();
    if (g < best) best = g, twist = k;
  }
  std::vector<mp::MpComplex> q(N, mp::MpComplex(precision));
  q[twist].assign(Complex(1.0));
  for (std::size_t k = twist; k-- > 0;) q[k].assign(up[k]).mul(q[k + 1]).div(fwd[k]).neg();
  for (std::size_t k = twist + 1; k < N; ++k) q[k].assign(lo[k - 1]).mul(q[k - 1]).div(bwd[k]).neg();
  return q;
}

EigenPolynomial eigenpolynomial(const SexticProblem& prob, Complex b, Complex lambda,
                                const EigenPolynomialOptions& opts) {
  const Spectrum spec = eigenvalues(prob, b);
  double radius = 1.0;
  for (const auto& z : spec.eigenvalues) radius = std::max(radius, std::abs(z));
  std::size_t best = 0;
  for (std::size_t i = 1; i < spec.eigenvalues.size(); ++i)
    if (std::abs(spec.eigenvalues[i] - lambda) < std::abs(spec.eigenvalues[best] - lambda)) best = i;
  if (std::abs(spec.eigenvalues[best] - lambda) > opts.match_tol * radius)
    throw InvalidArgument("eigenpolynomial: value is not an eigenvalue of M_m(b)");
  bool defective = spec.multiplicity[best] > 1;
  for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i)
    if (i != best && std::abs(spec.eigenvalues[i] - spec.eigenvalues[best]) <= opts.defective_tol * radius)
      defective = true;
  if (defective)
    throw DefectiveEigenvalue("eigenpolynomial: eigenvalue is multiple (level crossing); no eigenbasis");
  const Complex ev = spec.eigenvalues[best];

  const std::vector<mp::MpComplex> qm = eigenpolynomial_mp(prob, b, ev, std::max<long>(spec.precision, 64) + 64);
  std::size_t arg = 0;
  for (std::size_t k = 1; k < qm.size(); ++k)
    if (qm[k].log2_abs() > qm[arg].log2_abs()) arg = k;
  std::vector<Complex> q;
  for (const auto& c : qm) {
    mp::MpComplex x(c);
    q.push_back(x.div(qm[arg]).to_complex());
  }

  EigenPolynomial out;
  out.eigenvalue = ev;
  out.coeffs = q;
  const auto r = heun_operator_residual(prob, b, ev, q);
  double rmax = 0.0;
  for (const auto& x : r) rmax = std::max(rmax, std::abs(x));
  const TridiagonalMatrix t = build_matrix(prob, b);
  double opnorm = 0.0;
  for (int i = 0; i < prob.size(); ++i) {
    double row = std::abs(t.diag[static_cast<std::size_t>(i)]);
    if (i + 1 < prob.size()) row += std::abs(t.super[static_cast<std::size_t>(i)]);
    if (i > 0) row += std::abs(t.sub[static_cast<std::size_t>(i - 1)]);
    opnorm = std::max(opnorm, row);
  }
  out.residual = rmax / (opnorm + std::abs(ev));
  if (out.residual > opts.residual_tol)
    throw NumericalFailure("eigenpolynomial: residual " + std::to_string(out.residual) + " above tolerance");
  return out;
}

std::vector<Complex> eigenpolynomial_roots(const SexticProblem& prob, Complex b, Complex lambda) {
  const Spectrum spec = eigenvalues(prob, b);
  long precision = std::max<long>(spec.precision, 64) + 64;
  for (;;) {
    std::vector<mp::MpComplex> q = eigenpolynomial_mp(prob, b, lambda, precision);
    mp::AdaptiveAberthOptions opts;
    opts.max_precision = precision;
    opts.min_precision = std::min<long>(precision, 128);
    try {
      return mp::mp_poly_roots(std::move(q), opts).roots.roots;
    } catch (const RootFindingFailure&) {
      if (precision >= (1L << 14)) throw;
      precision *= 2;
    }
  }
}

std::vector<Complex> heun_operator_residual(const SexticProblem& prob, Complex b, Complex lambda,
                                            std::span<const Complex> q) {
  // -4t Q'' + (4t^2 + 4bt - 2) Q' - (4mt - b) Q - lambda Q, coefficientwise
  const int n = static_cast<int>(q.size());
  std::vector<Complex> r(static_cast<std::size_t>(n + 1), 0.0);
  const double m = prob.m();
  for (int k = 0; k < n; ++k) {
    const Complex c = q[static_cast<std::size_t>(k)];
    const double kk = k;
    if (k >= 1) r[static_cast<std::size_t>(k - 1)] += c * (-4.0 * kk * (kk - 1.0) - 2.0 * kk);
    r[static_cast<std::size_t>(k + 1)] += c * (4.0 * kk - 4.0 * m);
    r[static_cast<std::size_t>(k)] += c * (4.0 * kk * b + b - lambda);
  }
  return r;
}

Complex empirical_cauchy(std::span<const Complex> points, Complex z) {
  if (points.empty()) throw InvalidArgument("empirical_cauchy: empty point set");
  Complex acc = 0.0;
  for (const auto& p : points) {
    if (z == p) throw InvalidArgument("empirical_cauchy: evaluation point coincides with a support point");
    acc += 1.0 / (z - p);
  }
  return acc / static_cast<double>(points.size());
}

}  // namespace qes
