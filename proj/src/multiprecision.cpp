#include "qes/multiprecision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace qes::mp {

namespace {

constexpr mpfr_rnd_t kRound = MPFR_RNDN;

// Temporaries for the in-place complex operations; resized on demand.
struct Scratch {
  mpfr_t t[6];
  Scratch() {
    for (auto& x : t) mpfr_init2(x, 64);
  }
  ~Scratch() {
    for (auto& x : t) mpfr_clear(x);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;

  mpfr_ptr get(int i, mpfr_prec_t p) {
    if (mpfr_get_prec(t[i]) != p) mpfr_set_prec(t[i], p);
    return t[i];
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

double parts_log2(double re_m, long re_e, double im_m, long im_e) {
  const double a = re_m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(std::abs(re_m)) + re_e;
  const double b = im_m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log2(std::abs(im_m)) + im_e;
  return 0.5 * log2_add(2 * a, 2 * b);
}

}  // namespace

double log2_add(double x, double y) {
  if (x < y) std::swap(x, y);
  if (y == -std::numeric_limits<double>::infinity()) return x;
  return x + std::log2(1.0 + std::exp2(y - x));
}

double Scaled::log2_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log2(std::abs(mantissa)) + static_cast<double>(exponent);
}

Complex Scaled::to_complex() const {
  const int e = static_cast<int>(std::clamp<long>(exponent, -100000, 100000));
  return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

Complex ratio(const Scaled& a, const Scaled& b) {
  if (b.is_zero()) return {std::numeric_limits<double>::infinity(), 0.0};
  const Complex q = a.mantissa / b.mantissa;
  const int e = static_cast<int>(std::clamp<long>(a.exponent - b.exponent, -100000, 100000));
  return {std::ldexp(q.real(), e), std::ldexp(q.imag(), e)};
}

MpComplex::MpComplex(long precision) {
  mpfr_init2(re_, precision);
  mpfr_init2(im_, precision);
  mpfr_set_zero(re_, 1);
  mpfr_set_zero(im_, 1);
}

MpComplex::MpComplex(Complex z, long precision) : MpComplex(precision) { assign(z); }

MpComplex::MpComplex(const MpComplex& other) {
  mpfr_init2(re_, mpfr_get_prec(other.re_));
  mpfr_init2(im_, mpfr_get_prec(other.im_));
  mpfr_set(re_, other.re_, kRound);
  mpfr_set(im_, other.im_, kRound);
}

MpComplex::MpComplex(MpComplex&& other) noexcept : MpComplex(mpfr_get_prec(other.re_)) {
  mpfr_swap(re_, other.re_);
  mpfr_swap(im_, other.im_);
}

MpComplex& MpComplex::operator=(const MpComplex& other) {
  if (this != &other) {
    mpfr_set_prec(re_, mpfr_get_prec(other.re_));
    mpfr_set_prec(im_, mpfr_get_prec(other.im_));
    mpfr_set(re_, other.re_, kRound);
    mpfr_set(im_, other.im_, kRound);
  }
  return *this;
}

MpComplex& MpComplex::operator=(MpComplex&& other) noexcept {
  mpfr_swap(re_, other.re_);
  mpfr_swap(im_, other.im_);
  return *this;
}

MpComplex::~MpComplex() {
  mpfr_clear(re_);
  mpfr_clear(im_);
}

void MpComplex::set_precision(long precision) {
  mpfr_prec_round(re_, precision, kRound);
  mpfr_prec_round(im_, precision, kRound);
}

MpComplex& MpComplex::assign(Complex z) {
  mpfr_set_d(re_, z.real(), kRound);
  mpfr_set_d(im_, z.imag(), kRound);
  return *this;
}

MpComplex& MpComplex::assign(const BigInt& x) {
  mpfr_set_z(re_, x.get_mpz_t(), kRound);
  mpfr_set_zero(im_, 1);
  return *this;
}

MpComplex& MpComplex::assign(const MpComplex& z) {
  mpfr_set(re_, z.re_, kRound);
  mpfr_set(im_, z.im_, kRound);
  return *this;
}

MpComplex& MpComplex::set_zero() {
  mpfr_set_zero(re_, 1);
  mpfr_set_zero(im_, 1);
  return *this;
}

MpComplex& MpComplex::add(const MpComplex& z) {
  mpfr_add(re_, re_, z.re_, kRound);
  mpfr_add(im_, im_, z.im_, kRound);
  return *this;
}

MpComplex& MpComplex::sub(const MpComplex& z) {
  mpfr_sub(re_, re_, z.re_, kRound);
  mpfr_sub(im_, im_, z.im_, kRound);
  return *this;
}

MpComplex& MpComplex::mul(const MpComplex& z) {
  Scratch& s = scratch();
  const mpfr_prec_t p = mpfr_get_prec(re_);
  mpfr_ptr ac = s.get(0, p), bd = s.get(1, p), ad = s.get(2, p), bc = s.get(3, p);
  mpfr_mul(ac, re_, z.re_, kRound);
  mpfr_mul(bd, im_, z.im_, kRound);
  mpfr_mul(ad, re_, z.im_, kRound);
  mpfr_mul(bc, im_, z.re_, kRound);
  mpfr_sub(re_, ac, bd, kRound);
  mpfr_add(im_, ad, bc, kRound);
  return *this;
}

MpComplex& MpComplex::mul(double x) {
  mpfr_mul_d(re_, re_, x, kRound);
  mpfr_mul_d(im_, im_, x, kRound);
  return *this;
}

MpComplex& MpComplex::div(const MpComplex& z) {
  Scratch& s = scratch();
  const mpfr_prec_t p = mpfr_get_prec(re_);
  mpfr_ptr den = s.get(0, p), t1 = s.get(1, p), t2 = s.get(2, p), nr = s.get(3, p), ni = s.get(4, p);
  mpfr_sqr(den, z.re_, kRound);
  mpfr_sqr(t1, z.im_, kRound);
  mpfr_add(den, den, t1, kRound);
  mpfr_mul(t1, re_, z.re_, kRound);
  mpfr_mul(t2, im_, z.im_, kRound);
  mpfr_add(nr, t1, t2, kRound);
  mpfr_mul(t1, im_, z.re_, kRound);
  mpfr_mul(t2, re_, z.im_, kRound);
  mpfr_sub(ni, t1, t2, kRound);
  mpfr_div(re_, nr, den, kRound);
  mpfr_div(im_, ni, den, kRound);
  return *this;
}

MpComplex& MpComplex::neg() {
  mpfr_neg(re_, re_, kRound);
  mpfr_neg(im_, im_, kRound);
  return *this;
}

MpComplex& MpComplex::mul_add(const MpComplex& z, const MpComplex& c) {
  mul(z);
  return add(c);
}

Scaled MpComplex::scaled() const {
  long er = 0, ei = 0;
  const double mr = mpfr_zero_p(re_) ? 0.0 : mpfr_get_d_2exp(&er, re_, kRound);
  const double mi = mpfr_zero_p(im_) ? 0.0 : mpfr_get_d_2exp(&ei, im_, kRound);
  if (mr == 0.0 && mi == 0.0) return {};
  long e = mr == 0.0 ? ei : (mi == 0.0 ? er : std::max(er, ei));
  const auto shift = [e](double m, long ex) {
    return m == 0.0 ? 0.0 : std::ldexp(m, static_cast<int>(std::max<long>(ex - e, -2000)));
  };
  return {Complex(shift(mr, er), shift(mi, ei)), e};
}

double MpComplex::log2_abs() const {
  long er = 0, ei = 0;
  const double mr = mpfr_zero_p(re_) ? 0.0 : mpfr_get_d_2exp(&er, re_, kRound);
  const double mi = mpfr_zero_p(im_) ? 0.0 : mpfr_get_d_2exp(&ei, im_, kRound);
  return parts_log2(mr, er, mi, ei);
}

Complex MpComplex::to_complex() const { return {mpfr_get_d(re_, kRound), mpfr_get_d(im_, kRound)}; }

// ---------------------------------------------------------------------------

namespace {

// Horner for p and p' with the coefficient magnitude bound sum |a_k| |z|^k.
template <class Coeff>
MpStep horner_step(const std::vector<Coeff>& coeffs, const std::vector<double>& log2_abs_coeffs, Complex z,
                   long precision) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  MpComplex zz(z, precision), p(precision), d(precision);
  p.assign(coeffs[static_cast<std::size_t>(n)]);
  for (int k = n - 1; k >= 0; --k) {
    d.mul_add(zz, p);
    p.mul_add(zz, coeffs[static_cast<std::size_t>(k)]);
  }
  const double lz = z == Complex(0.0) ? -std::numeric_limits<double>::infinity() : std::log2(std::abs(z));
  double bound = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    const double term = log2_abs_coeffs[static_cast<std::size_t>(k)] + (k == 0 ? 0.0 : k * lz);
    bound = log2_add(bound, term);
  }
  MpStep step;
  const Scaled ps = p.scaled(), ds = d.scaled();
  step.correction = ps.is_zero() ? Complex(0.0) : ratio(ps, ds);
  step.residual = ps.is_zero() ? 0.0 : std::exp2(std::min(0.0, ps.log2_abs() - bound));
  step.log2_sensitivity = bound - ds.log2_abs();
  return step;
}

}  // namespace

ExactPolyEvaluator::ExactPolyEvaluator(const ExactUnivariatePoly& p) : coeffs_(p.coeffs()) {
  if (p.degree() < 1) throw InvalidArgument("ExactPolyEvaluator: degree must be at least 1");
  for (const auto& c : coeffs_) {
    if (c == 0) {
      log2_abs_coeffs_.push_back(-std::numeric_limits<double>::infinity());
    } else {
      long e = 0;
      const double m = mpz_get_d_2exp(&e, c.get_mpz_t());
      log2_abs_coeffs_.push_back(std::log2(std::abs(m)) + static_cast<double>(e));
    }
  }
}

void ExactPolyEvaluator::prepare(long precision) {
  if (precision == precision_) return;
  mp_coeffs_.clear();
  mp_coeffs_.reserve(coeffs_.size());
  for (const auto& c : coeffs_) {
    MpComplex x(precision);
    x.assign(c);
    mp_coeffs_.push_back(std::move(x));
  }
  precision_ = precision;
}

MpStep ExactPolyEvaluator::step(Complex z, long precision) {
  prepare(precision);
  return horner_step(mp_coeffs_, log2_abs_coeffs_, z, precision);
}

MpPolyEvaluator::MpPolyEvaluator(std::vector<MpComplex> coeffs) : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
  if (coeffs_.size() < 2) throw InvalidArgument("MpPolyEvaluator: degree must be at least 1");
  for (const auto& c : coeffs_) log2_abs_coeffs_.push_back(c.log2_abs());
}

MpStep MpPolyEvaluator::step(Complex z, long precision) {
  return horner_step(coeffs_, log2_abs_coeffs_, z, precision);
}

// ---------------------------------------------------------------------------

AdaptiveRootSet aberth_adaptive(MpNewtonEvaluator& eval, std::vector<Complex> start, const AdaptiveAberthOptions& opts) {
  const std::size_t n = start.size();
  long precision = std::max<long>(opts.min_precision, 53);
  std::vector<Complex> z = std::move(start);
  const double ops_bits = std::log2(4.0 * std::max(eval.length(), 1));
  for (;;) {
    const double noise = std::exp2(ops_bits - static_cast<double>(precision));
    NewtonEvaluator<double> f = [&](Complex x) -> NewtonStep<double> {
      const MpStep s = eval.step(x, precision);
      const double scale = std::max(std::abs(x), opts.scale_floor);
      return {s.correction, s.residual <= noise ? 0.0 : std::abs(s.correction) / scale};
    };
    RootSet rs;
    bool converged = true;
    AberthOptions inner = opts.aberth;
    inner.polish_sweeps = 0;
    try {
      rs = aberth_iterate<double>(f, z, inner);
    } catch (const RootFindingFailure& e) {
      rs = e.best();
      converged = false;
    }

    std::vector<double> sensitivity(n);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const MpStep s = eval.step(rs.roots[i], precision);
      sensitivity[i] = s.log2_sensitivity - std::log2(std::max(std::abs(rs.roots[i]), opts.scale_floor));
      if (rs.multiplicity[i] == 1) worst = std::max(worst, sensitivity[i]);
    }
    const long needed = static_cast<long>(std::ceil(std::max(worst, 0.0) + 53.0 + ops_bits)) + opts.guard_bits;

    if (converged && needed <= precision) {
      AdaptiveRootSet out;
      for (std::size_t i = 0; i < n; ++i) {
        if (rs.multiplicity[i] != 1) continue;
        const MpStep s = eval.step(rs.roots[i], precision);
        if (std::isfinite(s.correction.real()) && std::isfinite(s.correction.imag())) rs.roots[i] -= s.correction;
      }
      for (std::size_t i = 0; i < n; ++i) rs.residuals[i] = eval.step(rs.roots[i], precision).residual;
      rs.multiplicity = cluster_multiplicities<double>(rs.roots, opts.aberth.cluster_tol);
      out.roots = std::move(rs);
      out.precision = precision;
      out.log2_sensitivity = std::move(sensitivity);
      return out;
    }
    if (precision >= opts.max_precision) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "adaptive Aberth iteration failed at %ld bits (needed %ld)", precision, needed);
      throw RootFindingFailure(buf, std::move(rs));
    }
    precision = std::min(opts.max_precision, converged ? std::max(needed, precision + 32) : std::max(needed, 2 * precision));
    z = std::move(rs.roots);
  }
}

AdaptiveRootSet exact_poly_roots(const ExactUnivariatePoly& p, const AdaptiveAberthOptions& opts) {
  if (p.degree() < 1) throw InvalidArgument("exact_poly_roots: degree must be at least 1");
  const ScaledPoly sp = to_scaled_complex_poly(p);
  std::vector<Complex> start;
  for (const auto& w : aberth_initial_points<long double>(sp.poly)) {
    const auto s = static_cast<int>(sp.shift);
    start.emplace_back(std::ldexp(static_cast<double>(w.real()), s), std::ldexp(static_cast<double>(w.imag()), s));
  }
  ExactPolyEvaluator eval(p);
  return aberth_adaptive(eval, std::move(start), opts);
}

AdaptiveRootSet mp_poly_roots(std::vector<MpComplex> coeffs, const AdaptiveAberthOptions& opts) {
  // Starting points from a double image of the coefficients rescaled by a
  // common binary exponent; only their magnitudes matter.
  while (!coeffs.empty() && coeffs.back().is_zero()) coeffs.pop_back();
  if (coeffs.size() < 2) throw InvalidArgument("mp_poly_roots: degree must be at least 1");
  long top = std::numeric_limits<long>::min();
  std::vector<Scaled> sc;
  for (const auto& c : coeffs) {
    sc.push_back(c.scaled());
    if (!sc.back().is_zero()) top = std::max(top, sc.back().exponent);
  }
  std::vector<std::complex<long double>> approx;
  for (const auto& s : sc) {
    const long double f = std::ldexp(1.0L, static_cast<int>(std::max<long>(s.exponent - top, -16000)));
    approx.emplace_back(static_cast<long double>(s.mantissa.real()) * f, static_cast<long double>(s.mantissa.imag()) * f);
  }
  ExtendedComplexPoly guess(std::move(approx));
  if (guess.degree() != static_cast<int>(coeffs.size()) - 1)
    throw NumericalFailure("mp_poly_roots: coefficient range exceeds the starting-point heuristic");
  std::vector<Complex> start;
  for (const auto& w : aberth_initial_points<long double>(guess))
    start.emplace_back(static_cast<double>(w.real()), static_cast<double>(w.imag()));
  MpPolyEvaluator eval(std::move(coeffs));
  return aberth_adaptive(eval, std::move(start), opts);
}

}  // namespace qes::mp
