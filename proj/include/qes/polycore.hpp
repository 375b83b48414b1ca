#pragma once

// Exact integer polynomials, resultants, interpolation and the Aberth
// simultaneous root finder shared by every other module.

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qes/error.hpp"

namespace qes {

using BigInt = mpz_class;
using BigRational = mpq_class;
using Complex = std::complex<double>;

enum class Variable { Lambda, B };

std::string_view variable_name(Variable v);

// ---------------------------------------------------------------------------
// Exact polynomials
// ---------------------------------------------------------------------------

/// Integer polynomial in one variable, coefficients in ascending degree.
/// Trailing zero coefficients are stripped, so the zero polynomial has no
/// coefficients and degree -1.
class ExactUnivariatePoly {
 public:
  ExactUnivariatePoly() = default;
  explicit ExactUnivariatePoly(std::vector<BigInt> coeffs, Variable var = Variable::B);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Variable var() const { return var_; }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }

  /// Coefficient of x^k; zero outside the stored range.
  BigInt coeff(int k) const;
  const BigInt& leading() const;

  BigInt operator()(const BigInt& x) const;
  /// Evaluation in long double; overflows for large coefficients, so
  /// callers that need root finding should use `to_complex_poly` scaling.
  std::complex<long double> evaluate(std::complex<long double> z) const;

  ExactUnivariatePoly derivative() const;
  /// p(-x)
  ExactUnivariatePoly reflected() const;

  /// Human readable form, e.g. "-16*b^2 - 32".
  std::string to_string() const;

  friend bool operator==(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b) {
    return a.coeffs_ == b.coeffs_;
  }
  friend ExactUnivariatePoly operator+(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b);
  friend ExactUnivariatePoly operator-(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b);
  friend ExactUnivariatePoly operator*(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b);

 private:
  void trim();

  std::vector<BigInt> coeffs_;
  Variable var_ = Variable::B;
};

/// Dense integer polynomial in (lambda, b); coeff(i, j) multiplies
/// lambda^i * b^j.
class ExactBivariatePoly {
 public:
  ExactBivariatePoly() = default;
  ExactBivariatePoly(int deg_lambda, int deg_b);

  static ExactBivariatePoly constant(const BigInt& c);
  static ExactBivariatePoly lambda();
  static ExactBivariatePoly b();

  /// -1 for the zero polynomial.
  int degree_lambda() const;
  int degree_b() const;
  int total_degree() const;
  bool is_zero() const { return degree_lambda() < 0; }

  BigInt coeff(int i, int j) const;
  void set_coeff(int i, int j, const BigInt& value);

  /// Polynomial in lambda obtained by fixing b.
  ExactUnivariatePoly specialize_b(const BigInt& b0) const;
  /// Polynomial in b obtained by fixing lambda.
  ExactUnivariatePoly specialize_lambda(const BigInt& lambda0) const;
  /// Coefficient of lambda^i as a polynomial in b.
  ExactUnivariatePoly lambda_coefficient(int i) const;

  ExactBivariatePoly derivative_lambda() const;
  ExactBivariatePoly derivative_b() const;
  /// Swaps the roles of the two variables.
  ExactBivariatePoly transposed() const;

  std::complex<double> evaluate(std::complex<double> lambda, std::complex<double> b) const;

  friend bool operator==(const ExactBivariatePoly& a, const ExactBivariatePoly& b);
  friend ExactBivariatePoly operator+(const ExactBivariatePoly& a, const ExactBivariatePoly& b);
  friend ExactBivariatePoly operator-(const ExactBivariatePoly& a, const ExactBivariatePoly& b);
  friend ExactBivariatePoly operator*(const ExactBivariatePoly& a, const ExactBivariatePoly& b);
  friend ExactBivariatePoly operator*(const BigInt& c, const ExactBivariatePoly& a);

 private:
  void trim();

  // rows indexed by lambda degree, columns by b degree
  std::vector<std::vector<BigInt>> coeffs_;
};

// ---------------------------------------------------------------------------
// Floating-point polynomials and root finding
// ---------------------------------------------------------------------------

template <class T>
class BasicComplexPoly {
 public:
  using value_type = std::complex<T>;

  BasicComplexPoly() = default;
  /// Throws InvalidArgument on non-finite coefficients. Trailing exact zeros
  /// are stripped.
  explicit BasicComplexPoly(std::vector<value_type> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<value_type>& coeffs() const { return coeffs_; }
  value_type operator()(value_type z) const;
  BasicComplexPoly derivative() const;

  /// Monic polynomial with the given roots.
  static BasicComplexPoly from_roots(std::span<const value_type> roots);

 private:
  std::vector<value_type> coeffs_;
};

using ComplexPoly = BasicComplexPoly<double>;
using ExtendedComplexPoly = BasicComplexPoly<long double>;

/// Converts q(w) = p(2^shift * w) / 2^norm to floating point, with the
/// shift chosen so that the constant and leading coefficients have equal
/// magnitude and `norm` so the largest coefficient is near 1. Roots of p
/// are 2^shift times roots of q.
struct ScaledPoly {
  ExtendedComplexPoly poly;
  long shift = 0;
};
ScaledPoly to_scaled_complex_poly(const ExactUnivariatePoly& p);

template <class T>
struct BasicRootSet {
  std::vector<std::complex<T>> roots;
  /// |p(root)| divided by the running magnitude bound of the evaluation.
  std::vector<double> residuals;
  /// Size of the close-root cluster each root belongs to (1 = isolated).
  std::vector<int> multiplicity;
  int iterations = 0;
};

using RootSet = BasicRootSet<double>;

struct AberthOptions {
  double tol = 1e-12;
  int max_iterations = 200;
  /// Roots closer than cluster_tol * max(1, max|root|) are one cluster.
  double cluster_tol = 1e-8;
  /// Residual-decreasing sweeps run after every root has converged.
  int polish_sweeps = 12;
};

/// Newton correction p/p' at a point plus the relative residual there.
template <class T>
struct NewtonStep {
  std::complex<T> correction;
  double residual = 0.0;
};

template <class T>
using NewtonEvaluator = std::function<NewtonStep<T>(std::complex<T>)>;

class RootFindingFailure : public NumericalFailure {
 public:
  RootFindingFailure(const std::string& what, RootSet best)
      : NumericalFailure(what), best_(std::move(best)) {}
  const RootSet& best() const { return best_; }

 private:
  RootSet best_;
};

/// Aberth-Ehrlich iteration (Gauss-Seidel sweeps) from the given starting
/// points, one root per point. Throws RootFindingFailure carrying the best
/// iterate if some residual stays above opts.tol after max_iterations.
template <class T>
BasicRootSet<T> aberth_iterate(const NewtonEvaluator<T>& eval,
                               std::vector<std::complex<T>> start,
                               const AberthOptions& opts);

/// 2 * max_k |a_{n-k}/a_n|^{1/k} (last term halved): bounds every root.
template <class T>
T fujiwara_bound(const BasicComplexPoly<T>& p);

/// Starting points on circles whose radii come from the upper convex hull
/// of (k, log|a_k|); each radius is clamped to the Fujiwara bound.
template <class T>
std::vector<std::complex<T>> aberth_initial_points(const BasicComplexPoly<T>& p);

RootSet aberth_roots(const ComplexPoly& p, const AberthOptions& opts = {});
BasicRootSet<long double> aberth_roots(const ExtendedComplexPoly& p, const AberthOptions& opts = {});

/// Multiplicity of the cluster each point belongs to.
template <class T>
std::vector<int> cluster_multiplicities(std::span<const std::complex<T>> points, double tol);

// ---------------------------------------------------------------------------
// Resultants and interpolation
// ---------------------------------------------------------------------------

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> matrix);

/// Sylvester matrix of p and q taken with formal degrees deg_p, deg_q
/// (which may exceed the true degrees).
std::vector<std::vector<BigInt>> sylvester_matrix(const ExactUnivariatePoly& p, int deg_p,
                                                  const ExactUnivariatePoly& q, int deg_q);

/// Exact Sylvester resultant by fraction-free elimination.
BigInt resultant(const ExactUnivariatePoly& p, const ExactUnivariatePoly& q);
BigInt resultant(const ExactUnivariatePoly& p, int deg_p, const ExactUnivariatePoly& q, int deg_q);

enum class ResultantMethod {
  /// Exact node values when the Sylvester matrix is small, multimodular
  /// otherwise.
  Auto,
  /// Exact Sylvester determinants at integer nodes, rational interpolation.
  ExactNodes,
  /// Node values and interpolation modulo word-sized primes, lifted by the
  /// Chinese remainder theorem up to a rigorous coefficient bound.
  Multimodular,
};

/// Upper bound on the degree of Res(p, q) in the surviving variable.
int resultant_degree_bound(const ExactBivariatePoly& p, const ExactBivariatePoly& q, Variable eliminated);

/// Res_{eliminated}(p, q) as a polynomial in the other variable, by
/// evaluation at degree_bound + 1 consecutive integer nodes centered at 0
/// and exact interpolation. The formal degrees in the eliminated variable
/// are those of p and q, so vanishing leading coefficients at a node are
/// handled correctly.
ExactUnivariatePoly resultant(const ExactBivariatePoly& p, const ExactBivariatePoly& q,
                              Variable eliminated, ResultantMethod method = ResultantMethod::Auto);

/// Consecutive integers centered at zero: 0, -1, 1, -2, 2, ... sorted.
std::vector<BigInt> centered_nodes(int count);

/// Unique polynomial of degree <= degree_bound through the samples, via
/// Newton divided differences over the rationals. Throws IntegrityFailure
/// if a coefficient is not an integer.
ExactUnivariatePoly interpolate_exact(std::span<const BigInt> nodes, std::span<const BigInt> values,
                                      int degree_bound, Variable var = Variable::B);

namespace modular {

/// Primes just below 2^62, largest first.
std::vector<std::uint64_t> primes(std::size_t count);

std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t inverse(std::uint64_t a, std::uint64_t p);
std::uint64_t reduce(const BigInt& x, std::uint64_t p);

/// Resultant of polynomials over Z/p with formal degrees given by the
/// vector sizes minus one (leading entries may be zero).
std::uint64_t resultant(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b, std::uint64_t p);

/// Coefficients (ascending) of the interpolant through (nodes, values) mod p.
std::vector<std::uint64_t> interpolate(std::span<const std::int64_t> nodes,
                                       std::span<const std::uint64_t> values, std::uint64_t p);

}  // namespace modular

}  // namespace qes
