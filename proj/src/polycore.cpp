#include "qes/polycore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <sstream>

namespace qes {

std::string_view variable_name(Variable v) { return v == Variable::Lambda ? "lambda" : "b"; }

namespace {

long double to_long_double(const BigInt& x) {
  if (x == 0) return 0.0L;
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::ldexp(static_cast<long double>(mant), static_cast<int>(exp));
}

// log2 |x| for x != 0
double log2_abs(const BigInt& x) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

}  // namespace

// ---------------------------------------------------------------------------
// ExactUnivariatePoly
// ---------------------------------------------------------------------------

ExactUnivariatePoly::ExactUnivariatePoly(std::vector<BigInt> coeffs, Variable var)
    : coeffs_(std::move(coeffs)), var_(var) {
  trim();
}

void ExactUnivariatePoly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt ExactUnivariatePoly::coeff(int k) const {
  if (k < 0 || k > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(k)];
}

const BigInt& ExactUnivariatePoly::leading() const {
  static const BigInt zero = 0;
  return coeffs_.empty() ? zero : coeffs_.back();
}

BigInt ExactUnivariatePoly::operator()(const BigInt& x) const {
  BigInt acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<long double> ExactUnivariatePoly::evaluate(std::complex<long double> z) const {
  std::complex<long double> acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + to_long_double(*it);
  return acc;
}

ExactUnivariatePoly ExactUnivariatePoly::derivative() const {
  std::vector<BigInt> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<unsigned long>(k));
  return ExactUnivariatePoly(std::move(d), var_);
}

ExactUnivariatePoly ExactUnivariatePoly::reflected() const {
  std::vector<BigInt> r = coeffs_;
  for (std::size_t k = 1; k < r.size(); k += 2) r[k] = -r[k];
  return ExactUnivariatePoly(std::move(r), var_);
}

std::string ExactUnivariatePoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  const std::string_view name = variable_name(var_);
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const BigInt& c = coeffs_[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    BigInt mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0) {
      os << mag.get_str();
    } else {
      if (mag != 1) os << mag.get_str() << "*";
      os << name;
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

ExactUnivariatePoly operator+(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b) {
  std::vector<BigInt> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
  return ExactUnivariatePoly(std::move(c), a.var_);
}

ExactUnivariatePoly operator-(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b) {
  std::vector<BigInt> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(static_cast<int>(k)) - b.coeff(static_cast<int>(k));
  return ExactUnivariatePoly(std::move(c), a.var_);
}

ExactUnivariatePoly operator*(const ExactUnivariatePoly& a, const ExactUnivariatePoly& b) {
  if (a.is_zero() || b.is_zero()) return ExactUnivariatePoly({}, a.var_);
  std::vector<BigInt> c(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return ExactUnivariatePoly(std::move(c), a.var_);
}

// ---------------------------------------------------------------------------
// ExactBivariatePoly
// ---------------------------------------------------------------------------

ExactBivariatePoly::ExactBivariatePoly(int deg_lambda, int deg_b)
    : coeffs_(static_cast<std::size_t>(deg_lambda + 1), std::vector<BigInt>(static_cast<std::size_t>(deg_b + 1))) {}

ExactBivariatePoly ExactBivariatePoly::constant(const BigInt& c) {
  ExactBivariatePoly p(0, 0);
  p.coeffs_[0][0] = c;
  p.trim();
  return p;
}

ExactBivariatePoly ExactBivariatePoly::lambda() {
  ExactBivariatePoly p(1, 0);
  p.coeffs_[1][0] = 1;
  return p;
}

ExactBivariatePoly ExactBivariatePoly::b() {
  ExactBivariatePoly p(0, 1);
  p.coeffs_[0][1] = 1;
  return p;
}

int ExactBivariatePoly::degree_lambda() const { return static_cast<int>(coeffs_.size()) - 1; }

int ExactBivariatePoly::degree_b() const {
  return coeffs_.empty() ? -1 : static_cast<int>(coeffs_.front().size()) - 1;
}

int ExactBivariatePoly::total_degree() const {
  int best = -1;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < coeffs_[i].size(); ++j)
      if (coeffs_[i][j] != 0) best = std::max(best, static_cast<int>(i + j));
  return best;
}

BigInt ExactBivariatePoly::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i > degree_lambda() || j > degree_b()) return 0;
  return coeffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

void ExactBivariatePoly::set_coeff(int i, int j, const BigInt& value) {
  const auto rows = std::max<std::size_t>(coeffs_.size(), static_cast<std::size_t>(i + 1));
  const auto cols = std::max<std::size_t>(coeffs_.empty() ? 0 : coeffs_.front().size(), static_cast<std::size_t>(j + 1));
  coeffs_.resize(rows);
  for (auto& row : coeffs_) row.resize(cols);
  coeffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = value;
  trim();
}

void ExactBivariatePoly::trim() {
  auto row_zero = [](const std::vector<BigInt>& r) {
    return std::all_of(r.begin(), r.end(), [](const BigInt& c) { return c == 0; });
  };
  while (!coeffs_.empty() && row_zero(coeffs_.back())) coeffs_.pop_back();
  if (coeffs_.empty()) return;
  std::size_t cols = coeffs_.front().size();
  while (cols > 0) {
    bool zero = true;
    for (const auto& r : coeffs_) zero = zero && r[cols - 1] == 0;
    if (!zero) break;
    --cols;
  }
  for (auto& r : coeffs_) r.resize(cols);
}

ExactUnivariatePoly ExactBivariatePoly::specialize_b(const BigInt& b0) const {
  std::vector<BigInt> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    BigInt acc = 0;
    for (auto it = coeffs_[i].rbegin(); it != coeffs_[i].rend(); ++it) acc = acc * b0 + *it;
    out[i] = acc;
  }
  return ExactUnivariatePoly(std::move(out), Variable::Lambda);
}

ExactUnivariatePoly ExactBivariatePoly::specialize_lambda(const BigInt& lambda0) const {
  return ExactUnivariatePoly(transposed().specialize_b(lambda0).coeffs(), Variable::B);
}

ExactUnivariatePoly ExactBivariatePoly::lambda_coefficient(int i) const {
  if (i < 0 || i > degree_lambda()) return ExactUnivariatePoly({}, Variable::B);
  return ExactUnivariatePoly(coeffs_[static_cast<std::size_t>(i)], Variable::B);
}

ExactBivariatePoly ExactBivariatePoly::derivative_lambda() const {
  if (degree_lambda() < 1) return {};
  ExactBivariatePoly d(degree_lambda() - 1, degree_b());
  for (int i = 1; i <= degree_lambda(); ++i)
    for (int j = 0; j <= degree_b(); ++j)
      d.coeffs_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] =
          coeffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * i;
  d.trim();
  return d;
}

ExactBivariatePoly ExactBivariatePoly::derivative_b() const { return transposed().derivative_lambda().transposed(); }

ExactBivariatePoly ExactBivariatePoly::transposed() const {
  if (is_zero()) return {};
  ExactBivariatePoly t(degree_b(), degree_lambda());
  for (int i = 0; i <= degree_lambda(); ++i)
    for (int j = 0; j <= degree_b(); ++j)
      t.coeffs_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          coeffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  t.trim();
  return t;
}

std::complex<double> ExactBivariatePoly::evaluate(std::complex<double> lambda, std::complex<double> b) const {
  std::complex<double> acc = 0;
  for (auto row = coeffs_.rbegin(); row != coeffs_.rend(); ++row) {
    std::complex<double> inner = 0;
    for (auto it = row->rbegin(); it != row->rend(); ++it) inner = inner * b + it->get_d();
    acc = acc * lambda + inner;
  }
  return acc;
}

bool operator==(const ExactBivariatePoly& a, const ExactBivariatePoly& b) { return a.coeffs_ == b.coeffs_; }

ExactBivariatePoly operator+(const ExactBivariatePoly& a, const ExactBivariatePoly& b) {
  const int dl = std::max(a.degree_lambda(), b.degree_lambda());
  const int db = std::max(a.degree_b(), b.degree_b());
  if (dl < 0) return {};
  ExactBivariatePoly c(dl, db);
  for (int i = 0; i <= dl; ++i)
    for (int j = 0; j <= db; ++j) c.coeffs_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a.coeff(i, j) + b.coeff(i, j);
  c.trim();
  return c;
}

ExactBivariatePoly operator-(const ExactBivariatePoly& a, const ExactBivariatePoly& b) {
  return a + BigInt(-1) * b;
}

ExactBivariatePoly operator*(const BigInt& s, const ExactBivariatePoly& a) {
  ExactBivariatePoly c = a;
  for (auto& row : c.coeffs_)
    for (auto& x : row) x *= s;
  c.trim();
  return c;
}

ExactBivariatePoly operator*(const ExactBivariatePoly& a, const ExactBivariatePoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  ExactBivariatePoly c(a.degree_lambda() + b.degree_lambda(), a.degree_b() + b.degree_b());
  for (int i1 = 0; i1 <= a.degree_lambda(); ++i1)
    for (int j1 = 0; j1 <= a.degree_b(); ++j1) {
      const BigInt& x = a.coeffs_[static_cast<std::size_t>(i1)][static_cast<std::size_t>(j1)];
      if (x == 0) continue;
      for (int i2 = 0; i2 <= b.degree_lambda(); ++i2)
        for (int j2 = 0; j2 <= b.degree_b(); ++j2)
          c.coeffs_[static_cast<std::size_t>(i1 + i2)][static_cast<std::size_t>(j1 + j2)] +=
              x * b.coeffs_[static_cast<std::size_t>(i2)][static_cast<std::size_t>(j2)];
    }
  c.trim();
  return c;
}

// ---------------------------------------------------------------------------
// BasicComplexPoly
// ---------------------------------------------------------------------------

template <class T>
BasicComplexPoly<T>::BasicComplexPoly(std::vector<value_type> coeffs) : coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InvalidArgument("polynomial coefficient is not finite");
  while (!coeffs_.empty() && coeffs_.back() == value_type(0)) coeffs_.pop_back();
}

template <class T>
typename BasicComplexPoly<T>::value_type BasicComplexPoly<T>::operator()(value_type z) const {
  value_type acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

template <class T>
BasicComplexPoly<T> BasicComplexPoly<T>::derivative() const {
  std::vector<value_type> d;
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d.push_back(coeffs_[k] * static_cast<T>(k));
  return BasicComplexPoly(std::move(d));
}

template <class T>
BasicComplexPoly<T> BasicComplexPoly<T>::from_roots(std::span<const value_type> roots) {
  std::vector<value_type> c{value_type(1)};
  for (const auto& r : roots) {
    c.push_back(0);
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return BasicComplexPoly(std::move(c));
}

template class BasicComplexPoly<double>;
template class BasicComplexPoly<long double>;

ScaledPoly to_scaled_complex_poly(const ExactUnivariatePoly& p) {
  if (p.degree() < 1) throw InvalidArgument("to_scaled_complex_poly: degree must be at least 1");
  const auto& c = p.coeffs();
  const int n = p.degree();
  int low = 0;
  while (c[static_cast<std::size_t>(low)] == 0) ++low;
  long shift = 0;
  if (low < n) shift = std::lround((log2_abs(c[static_cast<std::size_t>(low)]) - log2_abs(c.back())) / (n - low));
  double norm = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k)
    if (c[static_cast<std::size_t>(k)] != 0)
      norm = std::max(norm, log2_abs(c[static_cast<std::size_t>(k)]) + static_cast<double>(k * shift));
  const long norm_exp = std::lround(norm);
  std::vector<std::complex<long double>> out(static_cast<std::size_t>(n + 1));
  for (int k = 0; k <= n; ++k) {
    const BigInt& x = c[static_cast<std::size_t>(k)];
    if (x == 0) continue;
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
    out[static_cast<std::size_t>(k)] =
        std::ldexp(static_cast<long double>(mant), static_cast<int>(exp + k * shift - norm_exp));
  }
  return ScaledPoly{ExtendedComplexPoly(std::move(out)), shift};
}

// ---------------------------------------------------------------------------
// Aberth iteration
// ---------------------------------------------------------------------------

template <class T>
std::vector<int> cluster_multiplicities(std::span<const std::complex<T>> points, double tol) {
  const std::size_t n = points.size();
  T scale = 1;
  for (const auto& z : points) scale = std::max<T>(scale, std::abs(z));
  const T radius = static_cast<T>(tol) * scale;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(points[i] - points[j]) <= radius) parent[find(i)] = find(j);
  std::vector<int> size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++size[find(i)];
  std::vector<int> mult(n);
  for (std::size_t i = 0; i < n; ++i) mult[i] = size[find(i)];
  return mult;
}

template std::vector<int> cluster_multiplicities<double>(std::span<const std::complex<double>>, double);
template std::vector<int> cluster_multiplicities<long double>(std::span<const std::complex<long double>>, double);

template <class T>
BasicRootSet<T> aberth_iterate(const NewtonEvaluator<T>& eval, std::vector<std::complex<T>> z,
                               const AberthOptions& opts) {
  using C = std::complex<T>;
  const std::size_t n = z.size();
  std::vector<double> residual(n, std::numeric_limits<double>::infinity());
  std::vector<char> done(n, 0);
  std::size_t remaining = n;
  int iter = 0;
  for (; iter < opts.max_iterations && remaining > 0; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const NewtonStep<T> step = eval(z[i]);
      residual[i] = step.residual;
      if (step.residual <= opts.tol) {
        done[i] = 1;
        --remaining;
        continue;
      }
      C sum = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) sum += T(1) / (z[i] - z[j]);
      C w;
      const C& nc = step.correction;
      if (!std::isfinite(nc.real()) || !std::isfinite(nc.imag())) {
        w = -T(1) / sum;
      } else {
        w = nc / (T(1) - nc * sum);
      }
      if (std::isfinite(w.real()) && std::isfinite(w.imag())) z[i] -= w;
    }
  }

  // Extra sweeps after convergence. Each move is kept only if it lowers the
  // residual; for simple roots this is a final Newton-quality correction and
  // multiple roots (where Aberth converges linearly) keep contracting.
  if (remaining == 0) {
    for (int sweep = 0; sweep < opts.polish_sweeps; ++sweep) {
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        const NewtonStep<T> step = eval(z[i]);
        if (step.residual == 0.0) continue;
        C sum = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) sum += T(1) / (z[i] - z[j]);
        const C& nc = step.correction;
        const C w = nc / (T(1) - nc * sum);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
        const C candidate = z[i] - w;
        if (candidate == z[i]) continue;
        if (eval(candidate).residual <= step.residual) {
          z[i] = candidate;
          moved = true;
        }
      }
      if (!moved) break;
    }
  }

  BasicRootSet<T> out;
  out.iterations = iter;
  out.residuals.resize(n);
  bool ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    out.residuals[i] = eval(z[i]).residual;
    ok = ok && out.residuals[i] <= opts.tol;
  }
  out.roots = std::move(z);
  out.multiplicity = cluster_multiplicities<T>(out.roots, opts.cluster_tol);
  if (!ok) {
    RootSet best;
    for (const auto& r : out.roots) best.roots.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    best.residuals = out.residuals;
    best.multiplicity = out.multiplicity;
    best.iterations = iter;
    const double worst = *std::max_element(out.residuals.begin(), out.residuals.end());
    char buf[160];
    std::snprintf(buf, sizeof buf, "Aberth iteration did not converge after %d iterations (worst residual %.3e)", iter,
                  worst);
    throw RootFindingFailure(buf,
                             std::move(best));
  }
  return out;
}

template BasicRootSet<double> aberth_iterate<double>(const NewtonEvaluator<double>&, std::vector<std::complex<double>>,
                                                     const AberthOptions&);
template BasicRootSet<long double> aberth_iterate<long double>(const NewtonEvaluator<long double>&,
                                                               std::vector<std::complex<long double>>,
                                                               const AberthOptions&);

template <class T>
T fujiwara_bound(const BasicComplexPoly<T>& p) {
  const auto& c = p.coeffs();
  const int n = p.degree();
  if (n < 1) throw InvalidArgument("fujiwara_bound: degree must be at least 1");
  const T lead = std::abs(c.back());
  T best = 0;
  for (int k = 1; k <= n; ++k) {
    T ratio = std::abs(c[static_cast<std::size_t>(n - k)]) / lead;
    if (k == n) ratio /= 2;
    if (ratio > 0) best = std::max(best, std::pow(ratio, T(1) / static_cast<T>(k)));
  }
  return 2 * best;
}

template double fujiwara_bound<double>(const ComplexPoly&);
template long double fujiwara_bound<long double>(const ExtendedComplexPoly&);

template <class T>
std::vector<std::complex<T>> aberth_initial_points(const BasicComplexPoly<T>& p) {
  const auto& c = p.coeffs();
  const int n = p.degree();
  const T bound = fujiwara_bound(p);
  std::vector<std::pair<int, T>> pts;  // (k, log|a_k|)
  for (int k = 0; k <= n; ++k)
    if (std::abs(c[static_cast<std::size_t>(k)]) > 0) pts.emplace_back(k, std::log(std::abs(c[static_cast<std::size_t>(k)])));
  // upper convex hull
  std::vector<std::pair<int, T>> hull;
  for (const auto& q : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const T cross = (b.second - a.second) * static_cast<T>(q.first - a.first) -
                      (q.second - a.second) * static_cast<T>(b.first - a.first);
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(q);
  }
  std::vector<std::complex<T>> z;
  z.reserve(static_cast<std::size_t>(n));
  const T two_pi = 2 * std::numbers::pi_v<T>;
  const T sigma = T(0.7);
  std::vector<T> radii;
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int count = hull[h + 1].first - hull[h].first;
    T r = std::exp((hull[h].second - hull[h + 1].second) / static_cast<T>(count));
    radii.push_back(std::min(r, bound));
  }
  // roots at zero (low-order coefficients vanish): small circle
  const int zeros = pts.front().first;
  const T tiny = radii.empty() ? T(1e-3) : radii.front() * T(1e-3);
  for (int j = 0; j < zeros; ++j)
    z.push_back(std::polar(tiny, two_pi * static_cast<T>(j) / static_cast<T>(zeros) + sigma));
  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const int count = hull[h + 1].first - hull[h].first;
    for (int j = 0; j < count; ++j) {
      const T angle = two_pi * static_cast<T>(j) / static_cast<T>(count) +
                      two_pi * static_cast<T>(hull[h].first) / static_cast<T>(n) + sigma;
      z.push_back(std::polar(radii[h], angle));
    }
  }
  return z;
}

template std::vector<std::complex<double>> aberth_initial_points<double>(const ComplexPoly&);
template std::vector<std::complex<long double>> aberth_initial_points<long double>(const ExtendedComplexPoly&);

namespace {

// Newton correction of a coefficient polynomial; the reversed polynomial is
// used outside the unit disk so that nothing overflows.
template <class T>
NewtonStep<T> horner_step(const std::vector<std::complex<T>>& c, std::complex<T> z) {
  using C = std::complex<T>;
  const int n = static_cast<int>(c.size()) - 1;
  const T az = std::abs(z);
  if (az <= 1) {
    C p = c.back(), dp = 0;
    T mag = std::abs(c.back());
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[static_cast<std::size_t>(k)];
      mag = mag * az + std::abs(c[static_cast<std::size_t>(k)]);
    }
    const double res = mag > 0 ? static_cast<double>(std::abs(p) / mag) : 0.0;
    if (p == C(0)) return {C(0), 0.0};
    if (dp == C(0)) return {C(std::numeric_limits<T>::infinity(), 0), res};
    return {p / dp, res};
  }
  const C y = T(1) / z;
  const T ay = T(1) / az;
  C r = c.front(), dr = 0;
  T mag = std::abs(c.front());
  for (int k = 1; k <= n; ++k) {
    dr = dr * y + r;
    r = r * y + c[static_cast<std::size_t>(k)];
    mag = mag * ay + std::abs(c[static_cast<std::size_t>(k)]);
  }
  const double res = mag > 0 ? static_cast<double>(std::abs(r) / mag) : 0.0;
  if (r == C(0)) return {C(0), 0.0};
  const C denom = static_cast<T>(n) * r - y * dr;
  if (denom == C(0)) return {C(std::numeric_limits<T>::infinity(), 0), res};
  return {z * r / denom, res};
}

template <class T>
BasicRootSet<T> aberth_poly(const BasicComplexPoly<T>& p, const AberthOptions& opts) {
  if (p.degree() < 1) throw InvalidArgument("aberth_roots: degree must be at least 1");
  const auto& c = p.coeffs();
  if (p.degree() == 1) {
    BasicRootSet<T> out;
    out.roots = {-c[0] / c[1]};
    out.residuals = {0.0};
    out.multiplicity = {1};
    return out;
  }
  NewtonEvaluator<T> eval = [&c](std::complex<T> z) { return horner_step(c, z); };
  return aberth_iterate<T>(eval, aberth_initial_points(p), opts);
}

}  // namespace

RootSet aberth_roots(const ComplexPoly& p, const AberthOptions& opts) { return aberth_poly(p, opts); }

BasicRootSet<long double> aberth_roots(const ExtendedComplexPoly& p, const AberthOptions& opts) {
  return aberth_poly(p, opts);
}

// ---------------------------------------------------------------------------
// Resultants
// ---------------------------------------------------------------------------

BigInt bareiss_determinant(std::vector<std::vector<BigInt>> a) {
  const std::size_t n = a.size();
  if (n == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        BigInt t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a[i][j] = std::move(t);
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

std::vector<std::vector<BigInt>> sylvester_matrix(const ExactUnivariatePoly& p, int deg_p,
                                                  const ExactUnivariatePoly& q, int deg_q) {
  if (deg_p < p.degree() || deg_q < q.degree())
    throw InvalidArgument("sylvester_matrix: formal degree below actual degree");
  const int size = deg_p + deg_q;
  std::vector<std::vector<BigInt>> s(static_cast<std::size_t>(size), std::vector<BigInt>(static_cast<std::size_t>(size)));
  for (int r = 0; r < deg_q; ++r)
    for (int k = 0; k <= deg_p; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = p.coeff(deg_p - k);
  for (int r = 0; r < deg_p; ++r)
    for (int k = 0; k <= deg_q; ++k)
      s[static_cast<std::size_t>(deg_q + r)][static_cast<std::size_t>(r + k)] = q.coeff(deg_q - k);
  return s;
}

BigInt resultant(const ExactUnivariatePoly& p, int deg_p, const ExactUnivariatePoly& q, int deg_q) {
  return bareiss_determinant(sylvester_matrix(p, deg_p, q, deg_q));
}

BigInt resultant(const ExactUnivariatePoly& p, const ExactUnivariatePoly& q) {
  if (p.is_zero() || q.is_zero()) return 0;
  return resultant(p, p.degree(), q, q.degree());
}

int resultant_degree_bound(const ExactBivariatePoly& p, const ExactBivariatePoly& q, Variable eliminated) {
  const ExactBivariatePoly& pp = p;
  const ExactBivariatePoly& qq = q;
  int de_p = 0, de_q = 0, ds_p = 0, ds_q = 0;
  if (eliminated == Variable::Lambda) {
    de_p = pp.degree_lambda(), de_q = qq.degree_lambda(), ds_p = pp.degree_b(), ds_q = qq.degree_b();
  } else {
    de_p = pp.degree_b(), de_q = qq.degree_b(), ds_p = pp.degree_lambda(), ds_q = qq.degree_lambda();
  }
  const int partial = de_p * ds_q + de_q * ds_p;
  const int total = p.total_degree() * q.total_degree();
  return std::min(partial, total);
}

std::vector<BigInt> centered_nodes(int count) {
  std::vector<BigInt> nodes;
  nodes.reserve(static_cast<std::size_t>(count));
  const int lo = -count / 2;
  for (int k = 0; k < count; ++k) nodes.emplace_back(lo + k);
  return nodes;
}

ExactUnivariatePoly interpolate_exact(std::span<const BigInt> nodes, std::span<const BigInt> values, int degree_bound,
                                      Variable var) {
  const std::size_t n = nodes.size();
  if (n != static_cast<std::size_t>(degree_bound + 1) || values.size() != n)
    throw InvalidArgument("interpolate_exact: need exactly degree_bound + 1 samples");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (nodes[i] == nodes[j]) throw InvalidArgument("interpolate_exact: nodes must be distinct");
  std::vector<BigRational> dd(values.begin(), values.end());
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / BigRational(nodes[i] - nodes[i - j]);
      dd[i].canonicalize();
    }
  // Newton form -> monomial
  std::vector<BigRational> poly{dd[n - 1]};
  for (std::size_t i = n - 1; i-- > 0;) {
    std::vector<BigRational> next(poly.size() + 1);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= poly[k] * BigRational(nodes[i]);
    }
    next[0] += dd[i];
    poly = std::move(next);
  }
  std::vector<BigInt> out;
  out.reserve(poly.size());
  for (auto& c : poly) {
    c.canonicalize();
    if (c.get_den() != 1) throw IntegrityFailure("interpolate_exact: non-integral coefficient " + c.get_str());
    out.push_back(c.get_num());
  }
  return ExactUnivariatePoly(std::move(out), var);
}

namespace modular {

std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t r = 1 % p;
  a %= p;
  while (e) {
    if (e & 1) r = mul(r, a, p);
    a = mul(a, a, p);
    e >>= 1;
  }
  return r;
}

std::uint64_t inverse(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw InvalidArgument("modular inverse of zero");
  return pow(a, p - 2, p);
}

std::uint64_t reduce(const BigInt& x, std::uint64_t p) {
  static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long required");
  return mpz_fdiv_ui(x.get_mpz_t(), p);
}

namespace {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
    if (n % q == 0) return n == q;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) d >>= 1, ++s;
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace

std::vector<std::uint64_t> primes(std::size_t count) {
  static std::mutex mu;
  static std::vector<std::uint64_t> cache;
  std::lock_guard lock(mu);
  std::uint64_t candidate = cache.empty() ? (1ULL << 62) - 1 : cache.back() - 2;
  while (cache.size() < count) {
    if (is_prime(candidate)) cache.push_back(candidate);
    candidate -= 2;
  }
  return {cache.begin(), cache.begin() + static_cast<std::ptrdiff_t>(count)};
}

namespace {

std::uint64_t sub(std::uint64_t a, std::uint64_t b, std::uint64_t p) { return a >= b ? a - b : a + p - b; }

void strip(std::vector<std::uint64_t>& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// remainder of a by b (b has nonzero leading coefficient)
std::vector<std::uint64_t> remainder(std::vector<std::uint64_t> a, const std::vector<std::uint64_t>& b,
                                     std::uint64_t p) {
  const std::size_t nb = b.size() - 1;
  const std::uint64_t inv_lead = inverse(b.back(), p);
  while (a.size() > nb && !a.empty()) {
    const std::uint64_t f = mul(a.back(), inv_lead, p);
    const std::size_t off = a.size() - 1 - nb;
    if (f != 0)
      for (std::size_t k = 0; k <= nb; ++k) a[off + k] = sub(a[off + k], mul(f, b[k], p), p);
    a.pop_back();
  }
  strip(a);
  return a;
}

}  // namespace

std::uint64_t resultant(std::vector<std::uint64_t> a, std::vector<std::uint64_t> b, std::uint64_t p) {
  if (a.empty() || b.empty()) return 0;
  std::uint64_t acc = 1;
  auto negate_if = [&](bool odd) {
    if (odd) acc = acc == 0 ? 0 : p - acc;
  };
  while (true) {
    std::size_t na = a.size() - 1, nb = b.size() - 1;
    // formal leading zeros
    if (na > 0 && a.back() == 0) {
      if (nb > 0 && b.back() == 0) return 0;
      if (nb == 0) return mul(acc, pow(b[0], na, p), p);
      acc = mul(acc, b.back(), p);
      negate_if(nb % 2 == 1);
      a.pop_back();
      continue;
    }
    if (nb > 0 && b.back() == 0) {
      if (na == 0) return mul(acc, pow(a[0], nb, p), p);
      acc = mul(acc, a.back(), p);
      b.pop_back();
      continue;
    }
    if (na == 0) return mul(acc, pow(a[0], nb, p), p);
    if (nb == 0) return mul(acc, pow(b[0], na, p), p);
    if (na < nb) {
      std::swap(a, b);
      std::swap(na, nb);
      negate_if((na * nb) % 2 == 1);
    }
    std::vector<std::uint64_t> r = remainder(a, b, p);
    if (r.empty()) return 0;
    const std::size_t d = r.size() - 1;
    negate_if((na * nb) % 2 == 1);
    acc = mul(acc, pow(b.back(), na - d, p), p);
    a = std::move(b);
    b = std::move(r);
  }
}

std::vector<std::uint64_t> interpolate(std::span<const std::int64_t> nodes, std::span<const std::uint64_t> values,
                                       std::uint64_t p) {
  const std::size_t n = nodes.size();
  auto red = [p](std::int64_t x) {
    const std::int64_t m = x % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
  };
  bool consecutive = true;
  for (std::size_t i = 1; i < n; ++i) consecutive = consecutive && nodes[i] - nodes[i - 1] == 1;
  std::vector<std::uint64_t> inv_step;
  if (consecutive) {
    inv_step.resize(n);
    for (std::size_t j = 1; j < n; ++j) inv_step[j] = inverse(j % p, p);
  }
  std::vector<std::uint64_t> dd(values.begin(), values.end());
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      const std::uint64_t inv = consecutive ? inv_step[j] : inverse(red(nodes[i] - nodes[i - j]), p);
      dd[i] = mul(sub(dd[i], dd[i - 1], p), inv, p);
    }
  std::vector<std::uint64_t> poly(n, 0);
  std::size_t len = 1;
  poly[0] = dd[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const std::uint64_t xi = red(nodes[i]);
    // poly = poly * (x - xi) + dd[i]
    for (std::size_t k = len; k > 0; --k) poly[k] = sub(poly[k - 1], mul(poly[k], xi, p), p);
    poly[0] = sub(dd[i], mul(poly[0], xi, p), p);
    ++len;
  }
  return poly;
}

}  // namespace modular

namespace {

// Coefficient polynomials (in the surviving variable) of p viewed as a
// polynomial in the eliminated variable.
std::vector<ExactUnivariatePoly> coefficient_polys(const ExactBivariatePoly& p, Variable eliminated) {
  const ExactBivariatePoly q = eliminated == Variable::Lambda ? p : p.transposed();
  std::vector<ExactUnivariatePoly> out;
  for (int i = 0; i <= q.degree_lambda(); ++i) out.push_back(q.lambda_coefficient(i));
  return out;
}

ExactUnivariatePoly specialize(const std::vector<ExactUnivariatePoly>& coeffs, const BigInt& x) {
  std::vector<BigInt> v;
  v.reserve(coeffs.size());
  for (const auto& c : coeffs) v.push_back(c(x));
  // formal degree is carried separately; keep trailing zeros out
  return ExactUnivariatePoly(std::move(v), Variable::Lambda);
}

ExactUnivariatePoly resultant_exact_nodes(const std::vector<ExactUnivariatePoly>& pc,
                                          const std::vector<ExactUnivariatePoly>& qc, int bound, Variable survivor) {
  const int deg_p = static_cast<int>(pc.size()) - 1;
  const int deg_q = static_cast<int>(qc.size()) - 1;
  const std::vector<BigInt> nodes = centered_nodes(bound + 2);
  std::vector<BigInt> values;
  values.reserve(nodes.size());
  for (const auto& x : nodes) values.push_back(resultant(specialize(pc, x), deg_p, specialize(qc, x), deg_q));
  const std::span<const BigInt> ns(nodes), vs(values);
  ExactUnivariatePoly r = interpolate_exact(ns.first(static_cast<std::size_t>(bound + 1)),
                                            vs.first(static_cast<std::size_t>(bound + 1)), bound, survivor);
  if (r(nodes.back()) != values.back())
    throw IntegrityFailure("resultant: samples inconsistent with degree bound " + std::to_string(bound));
  return r;
}

ExactUnivariatePoly resultant_multimodular(const std::vector<ExactUnivariatePoly>& pc,
                                           const std::vector<ExactUnivariatePoly>& qc, int bound, Variable survivor) {
  const std::size_t deg_p = pc.size() - 1;
  const std::size_t deg_q = qc.size() - 1;
  // Hadamard bound on the coefficients: each Sylvester entry is a polynomial
  // whose sup on the unit circle is at most its coefficient 1-norm.
  auto row_log2 = [](const std::vector<ExactUnivariatePoly>& cs) {
    double sumsq = 0;
    double maxlog = -1e300;
    std::vector<double> logs;
    for (const auto& c : cs) {
      BigInt norm = 0;
      for (const auto& x : c.coeffs()) norm += abs(x);
      if (norm == 0) continue;
      logs.push_back(log2_abs(norm));
      maxlog = std::max(maxlog, logs.back());
    }
    for (double l : logs) sumsq += std::exp2(2 * (l - maxlog));
    return maxlog + 0.5 * std::log2(sumsq);
  };
  const double log2_bound =
      static_cast<double>(deg_q) * row_log2(pc) + static_cast<double>(deg_p) * row_log2(qc);
  const auto nprimes = static_cast<std::size_t>(std::ceil((log2_bound + 2.0) / 61.0)) + 1;
  const std::vector<std::uint64_t> ps = modular::primes(nprimes);

  const int count = bound + 1;
  std::vector<std::int64_t> nodes(static_cast<std::size_t>(count));
  const std::int64_t lo = -(count - 1) / 2;
  for (int k = 0; k < count; ++k) nodes[static_cast<std::size_t>(k)] = lo + k;
  const std::int64_t check_node = lo + count;

  std::vector<BigInt> crt(static_cast<std::size_t>(count), 0);
  BigInt modulus = 1;
  std::vector<std::uint64_t> a(deg_p + 1), b(deg_q + 1);
  for (const std::uint64_t p : ps) {
    std::vector<std::vector<std::uint64_t>> pr(pc.size()), qr(qc.size());
    for (std::size_t i = 0; i < pc.size(); ++i)
      for (const auto& x : pc[i].coeffs()) pr[i].push_back(modular::reduce(x, p));
    for (std::size_t i = 0; i < qc.size(); ++i)
      for (const auto& x : qc[i].coeffs()) qr[i].push_back(modular::reduce(x, p));
    auto horner = [p](const std::vector<std::uint64_t>& c, std::uint64_t x) {
      std::uint64_t acc = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) {
        acc = modular::mul(acc, x, p) + *it;
        if (acc >= p) acc -= p;
      }
      return acc;
    };
    auto node_value = [&](std::int64_t node) {
      const std::int64_t m = node % static_cast<std::int64_t>(p);
      const auto x = static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
      for (std::size_t i = 0; i <= deg_p; ++i) a[i] = horner(pr[i], x);
      for (std::size_t i = 0; i <= deg_q; ++i) b[i] = horner(qr[i], x);
      return modular::resultant(a, b, p);
    };
    std::vector<std::uint64_t> values(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) values[static_cast<std::size_t>(k)] = node_value(nodes[static_cast<std::size_t>(k)]);
    const std::vector<std::uint64_t> coeffs = modular::interpolate(nodes, values, p);
    {
      const std::int64_t m = check_node % static_cast<std::int64_t>(p);
      const auto x = static_cast<std::uint64_t>(m < 0 ? m + static_cast<std::int64_t>(p) : m);
      std::uint64_t acc = 0;
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = (modular::mul(acc, x, p) + *it) % p;
      if (acc != node_value(check_node))
        throw IntegrityFailure("resultant: samples inconsistent with degree bound " + std::to_string(bound));
    }
    const std::uint64_t minv = modular::inverse(modular::reduce(modulus, p), p);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const std::uint64_t have = modular::reduce(crt[k], p);
      const std::uint64_t diff = coeffs[k] >= have ? coeffs[k] - have : coeffs[k] + p - have;
      const std::uint64_t t = modular::mul(diff, minv, p);
      mpz_addmul_ui(crt[k].get_mpz_t(), modulus.get_mpz_t(), t);
    }
    modulus *= BigInt(static_cast<unsigned long>(p));
  }
  const BigInt half = modulus / 2;
  for (auto& c : crt)
    if (c > half) c -= modulus;
  return ExactUnivariatePoly(std::move(crt), survivor);
}

}  // namespace

ExactUnivariatePoly resultant(const ExactBivariatePoly& p, const ExactBivariatePoly& q, Variable eliminated,
                              ResultantMethod method) {
  const Variable survivor = eliminated == Variable::Lambda ? Variable::B : Variable::Lambda;
  const auto pc = coefficient_polys(p, eliminated);
  const auto qc = coefficient_polys(q, eliminated);
  if (pc.empty() || qc.empty()) throw InvalidArgument("resultant: zero polynomial");
  if (pc.size() == 1 && qc.size() == 1) throw InvalidArgument("resultant: both polynomials constant in eliminated variable");
  const int bound = resultant_degree_bound(p, q, eliminated);
  if (method == ResultantMethod::Auto)
    method = (pc.size() + qc.size() - 2 <= 20) ? ResultantMethod::ExactNodes : ResultantMethod::Multimodular;
  if (method == ResultantMethod::ExactNodes) return resultant_exact_nodes(pc, qc, bound, survivor);
  return resultant_multimodular(pc, qc, bound, survivor);
}

}  // namespace qes
