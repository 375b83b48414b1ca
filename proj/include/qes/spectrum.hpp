#pragma once

// The (m+1)x(m+1) tridiagonal matrix of the sextic operator on even
// polynomials of degree <= 2m, its characteristic polynomials and spectra.

#include <span>
#include <vector>

#include "qes/multiprecision.hpp"
#include "qes/polycore.hpp"

namespace qes {

/// Even-parity sextic with polynomial-degree parameter m (m >= 1).
class SexticProblem {
 public:
  explicit SexticProblem(int m);
  int m() const { return m_; }
  int size() const { return m_ + 1; }

  /// Diagonal coefficient of row i (0-based) as a multiple of b: 4i+1.
  long diag_factor(int i) const { return 4L * i + 1; }
  /// Entry (i, i+1): 4i - 4m.
  long super(int i) const { return 4L * i - 4L * m_; }
  /// Entry (i+1, i): -(2i+1)(2i+2).
  long sub(int i) const { return -(2L * i + 1) * (2L * i + 2); }
  /// Off-diagonal product entering the recurrence for the i-th minor
  /// (1-based): 4(2i-2)(2i-3)(m+2-i).
  long coupling(int i) const { return 4L * (2 * i - 2) * (2 * i - 3) * (m_ + 2 - i); }

 private:
  int m_;
};

struct TridiagonalMatrix {
  std::vector<Complex> diag;
  std::vector<Complex> super;
  std::vector<Complex> sub;

  int size() const { return static_cast<int>(diag.size()); }
  Complex operator()(int i, int j) const;
};

TridiagonalMatrix build_matrix(const SexticProblem& prob, Complex b);
/// M_m(b sqrt(m)) / m^{3/2}.
TridiagonalMatrix build_scaled_matrix(const SexticProblem& prob, Complex b);

/// Principal minors det(lambda I_i - M_i), i = 0..m+1, exactly.
std::vector<ExactBivariatePoly> principal_minors_exact(const SexticProblem& prob);
/// D_m(lambda, b), the last principal minor.
ExactBivariatePoly charpoly_exact(const SexticProblem& prob);

/// Principal minors at fixed b as complex coefficient polynomials in lambda.
/// Coefficients overflow double for large m; intended for small m.
std::vector<ComplexPoly> principal_minors_numeric(const SexticProblem& prob, Complex b);
ComplexPoly charpoly_numeric(const SexticProblem& prob, Complex b);

/// Value and low-order partial derivatives of D_m at (lambda, b), computed by
/// the three-term recurrence. All fields share the factor 2^-exponent so
/// they stay finite for large m; ratios are unaffected.
struct CharpolyJet {
  Complex value;
  Complex d_lambda;
  Complex d_lambda2;
  Complex d_b;
  Complex d_lambda_b;
  /// Same recurrence run on magnitudes; bounds the rounding error of value.
  double magnitude = 0.0;
  long exponent = 0;
};

CharpolyJet charpoly_jet(const SexticProblem& prob, Complex lambda, Complex b);

/// |D_m(lambda, b)| relative to its running magnitude bound.
double charpoly_residual(const SexticProblem& prob, Complex lambda, Complex b);

struct Spectrum {
  /// Sorted by (real part, imaginary part).
  std::vector<Complex> eigenvalues;
  std::vector<double> residuals;
  /// Close-root cluster size of each eigenvalue.
  std::vector<int> multiplicity;
  double min_gap = 0.0;
  /// Working precision in bits of the final Newton corrections (53 when
  /// double sufficed).
  long precision = 53;
};

struct SpectrumOptions {
  AberthOptions aberth;
  /// Required absolute accuracy as a fraction of the spectral radius. For
  /// non-real b the matrix is far from normal and the eigenvalues become
  /// too sensitive for double precision as m grows; the recurrence is then
  /// re-evaluated in multiprecision.
  double accuracy = 1e-11;
  long max_precision = 1L << 14;
  bool force_multiprecision = false;
};

/// Roots of D_m(., b) by Aberth iteration on the recurrence.
Spectrum eigenvalues(const SexticProblem& prob, Complex b, const SpectrumOptions& opts = {});
/// Spectrum of the scaled matrix: eigenvalues(prob, b sqrt(m)) / m^{3/2}.
Spectrum scaled_eigenvalues(const SexticProblem& prob, Complex b, const SpectrumOptions& opts = {});

/// D_m and dD_m/dlambda by the recurrence in multiprecision at the
/// precision of `lambda`.
void charpoly_mp(const SexticProblem& prob, const mp::MpComplex& b, const mp::MpComplex& lambda, mp::MpComplex& value,
                 mp::MpComplex& d_lambda);

/// Sorting convention shared by every spectrum: ascending real part, ties
/// broken by imaginary part.
void sort_spectrum(std::vector<Complex>& values);

class DefectiveEigenvalue : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Coefficients of the polynomial Q(t) = sum q_k t^k solving the Heun-type
/// equation for the given eigenvalue, normalized so max |q_k| = 1.
struct EigenPolynomial {
  std::vector<Complex> coeffs;
  Complex eigenvalue;
  /// Max-norm of the operator residual relative to the operator scale.
  double residual = 0.0;
};

struct EigenPolynomialOptions {
  /// Accepted distance to the nearest computed eigenvalue, relative to
  /// max(1, spectral radius).
  double match_tol = 1e-8;
  double residual_tol = 1e-8;
  /// A second eigenvalue this close (same scale) marks the target as
  /// numerically defective. A double root with a Jordan block splits by
  /// about sqrt(eps) under rounding, so this sits well above that.
  double defective_tol = 1e-6;
};

/// Throws InvalidArgument if `lambda` is not an eigenvalue and
/// DefectiveEigenvalue if it sits in a multiplicity cluster (a crossing).
EigenPolynomial eigenpolynomial(const SexticProblem& prob, Complex b, Complex lambda,
                                const EigenPolynomialOptions& opts = {});

/// Coefficients of Q in multiprecision for an eigenvalue already known to
/// double accuracy; the eigenvalue is refined to the working precision
/// first. Unnormalized.
std::vector<mp::MpComplex> eigenpolynomial_mp(const SexticProblem& prob, Complex b, Complex lambda, long precision);

/// The m roots of Q (in t) for the given eigenvalue. Coefficient precision
/// is raised until the root finder's sensitivity requirement is met.
std::vector<Complex> eigenpolynomial_roots(const SexticProblem& prob, Complex b, Complex lambda);

/// Coefficients of dQ - lambda Q where d is the operator
/// -4t Q'' + (4t^2 + 4bt - 2) Q' - (4mt - b) Q.
std::vector<Complex> heun_operator_residual(const SexticProblem& prob, Complex b, Complex lambda,
                                            std::span<const Complex> coeffs);

/// (1/N) sum 1/(z - p_i). Throws InvalidArgument when z hits a point.
Complex empirical_cauchy(std::span<const Complex> points, Complex z);

}  // namespace qes
