#pragma once

// Complex arithmetic in MPFR and an Aberth driver whose Newton corrections
// are evaluated at a working precision raised until it covers the
// conditioning of every root.

#include <mpfr.h>

#include <memory>
#include <span>
#include <vector>

#include "qes/polycore.hpp"

namespace qes::mp {

/// A double mantissa with a separate binary exponent: value = mantissa * 2^exponent.
/// Lets magnitudes far outside the double range be compared and divided.
struct Scaled {
  Complex mantissa;
  long exponent = 0;

  bool is_zero() const { return mantissa == Complex(0.0); }
  double log2_abs() const;
  Complex to_complex() const;
};

/// a / b as a plain double complex; infinite when b is zero.
Complex ratio(const Scaled& a, const Scaled& b);

/// log2(2^x + 2^y) without overflow.
double log2_add(double x, double y);

class MpComplex {
 public:
  explicit MpComplex(long precision = 128);
  MpComplex(Complex z, long precision);
  MpComplex(const MpComplex& other);
  MpComplex(MpComplex&& other) noexcept;
  MpComplex& operator=(const MpComplex& other);
  MpComplex& operator=(MpComplex&& other) noexcept;
  ~MpComplex();

  long precision() const { return static_cast<long>(mpfr_get_prec(re_)); }
  /// Changes the precision, rounding the current value.
  void set_precision(long precision);

  MpComplex& assign(Complex z);
  MpComplex& assign(const BigInt& x);
  MpComplex& assign(const MpComplex& z);
  MpComplex& set_zero();

  MpComplex& add(const MpComplex& z);
  MpComplex& sub(const MpComplex& z);
  MpComplex& mul(const MpComplex& z);
  MpComplex& mul(double x);
  MpComplex& div(const MpComplex& z);
  MpComplex& neg();
  /// this = this * z + c
  MpComplex& mul_add(const MpComplex& z, const MpComplex& c);

  bool is_zero() const { return mpfr_zero_p(re_) && mpfr_zero_p(im_); }
  double log2_abs() const;
  Scaled scaled() const;
  Complex to_complex() const;

  mpfr_ptr re() { return re_; }
  mpfr_ptr im() { return im_; }
  mpfr_srcptr re() const { return re_; }
  mpfr_srcptr im() const { return im_; }

 private:
  mpfr_t re_;
  mpfr_t im_;
};

/// Newton correction p/p' at a point, the backward residual |p|/bound and
/// log2 of bound/|p'|, which converts a rounding level into a forward
/// error: |error| <~ 2^(log2_sensitivity - precision).
struct MpStep {
  Complex correction;
  double residual = 0.0;
  double log2_sensitivity = 0.0;
};

class MpNewtonEvaluator {
 public:
  virtual ~MpNewtonEvaluator() = default;
  virtual MpStep step(Complex z, long precision) = 0;
  /// Number of rounding operations per evaluation, used to size the noise
  /// floor of the residual.
  virtual int length() const = 0;
};

/// Exact integer polynomial evaluated by Horner's rule in MPFR.
class ExactPolyEvaluator final : public MpNewtonEvaluator {
 public:
  explicit ExactPolyEvaluator(const ExactUnivariatePoly& p);
  MpStep step(Complex z, long precision) override;
  int length() const override { return static_cast<int>(coeffs_.size()); }

 private:
  void prepare(long precision);

  std::vector<BigInt> coeffs_;
  std::vector<double> log2_abs_coeffs_;
  std::vector<MpComplex> mp_coeffs_;
  long precision_ = 0;
};

/// Polynomial with MPFR complex coefficients.
class MpPolyEvaluator final : public MpNewtonEvaluator {
 public:
  explicit MpPolyEvaluator(std::vector<MpComplex> coeffs);
  MpStep step(Complex z, long precision) override;
  int length() const override { return static_cast<int>(coeffs_.size()); }

 private:
  std::vector<MpComplex> coeffs_;
  std::vector<double> log2_abs_coeffs_;
};

struct AdaptiveAberthOptions {
  AberthOptions aberth;
  long min_precision = 64;
  long max_precision = 1L << 15;
  /// Extra bits beyond the double mantissa and the measured sensitivity.
  long guard_bits = 24;
  /// Relative steps are measured against max(|z|, scale_floor).
  double scale_floor = 1.0;
};

struct AdaptiveRootSet {
  RootSet roots;
  long precision = 0;
  /// log2 of the condition estimate for each root.
  std::vector<double> log2_sensitivity;
};

/// Aberth iteration in double with Newton corrections from `eval`.
/// Throws RootFindingFailure when max_precision does not suffice.
AdaptiveRootSet aberth_adaptive(MpNewtonEvaluator& eval, std::vector<Complex> start,
                                const AdaptiveAberthOptions& opts = {});

/// Roots of an exact integer polynomial, accurate to double precision
/// however ill-conditioned the coefficient representation is.
AdaptiveRootSet exact_poly_roots(const ExactUnivariatePoly& p, const AdaptiveAberthOptions& opts = {});

/// Roots of a polynomial with MPFR coefficients.
AdaptiveRootSet mp_poly_roots(std::vector<MpComplex> coeffs, const AdaptiveAberthOptions& opts = {});

}  // namespace qes::mp
