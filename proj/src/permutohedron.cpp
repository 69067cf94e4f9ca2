#include "imaxent/permutohedron.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace imaxent {

PermutohedronSpec PermutohedronSpec::regular(int n)
{
  if (n < 2)
    throw std::invalid_argument("permutohedron requires n >= 2, got n = " + std::to_string(n));
  PermutohedronSpec spec;
  spec.n = n;
  spec.generator.resize(n);
  for (int i = 0; i < n; ++i)
    spec.generator[i] = static_cast<double>(n - 1 - i) / (n - 1);
  spec.plane_sum = n / 2.0;
  return spec;
}

bool contains(const std::vector<double>& point, const PermutohedronSpec& spec, double tol)
{
  if (static_cast<int>(point.size()) != spec.n)
    throw std::invalid_argument("point has dimension " + std::to_string(point.size()) +
                                ", expected n = " + std::to_string(spec.n));
  if (tol < 0.0)
    throw std::invalid_argument("membership tolerance must be non-negative");

  double sum = std::accumulate(point.begin(), point.end(), 0.0);
  if (std::abs(sum - spec.plane_sum) > tol)
    return false;

  // Rado criterion: descending partial sums majorized by the generator's.
  std::vector<double> sorted(point);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double ps = 0.0;
  double gs = 0.0;
  for (int k = 0; k + 1 < spec.n; ++k) {
    ps += sorted[k];
    gs += spec.generator[k];
    if (ps > gs + tol)
      return false;
  }
  return true;
}

bool contains(const std::vector<double>& point, const PermutohedronSpec& spec)
{
  return contains(point, spec, membership_tolerance(spec.n));
}

double circumradius(int n)
{
  if (n < 2)
    throw std::domain_error("circumradius requires n >= 2, got n = " + std::to_string(n));
  return std::sqrt(static_cast<double>(n) * (n + 1) / (12.0 * (n - 1)));
}

namespace {

long double factorial_ld(int m)
{
  long double f = 1.0L;
  for (int i = 2; i <= m; ++i)
    f *= i;
  return f;
}

} // namespace

double volume_postnikov(const std::vector<double>& x, const std::vector<double>& lambdas)
{
  const int n = static_cast<int>(x.size());
  if (n == 0)
    throw std::invalid_argument("volume_postnikov: empty generator vector");
  if (lambdas.size() != x.size())
    throw std::invalid_argument("volume_postnikov: lambdas must have the same length as x");
  if (n == 1)
    return 1.0; // a point; 0-dimensional volume
  if (n > kExactNMax)
    throw std::invalid_argument("volume_postnikov: n = " + std::to_string(n) + " exceeds n_max = " +
                                std::to_string(kExactNMax) +
                                "; use the simulated reference for large n");
  for (int i = 0; i + 1 < n; ++i)
    if (!(x[i] > x[i + 1]))
      throw std::invalid_argument("volume_postnikov: x must be strictly decreasing");
  {
    std::vector<double> ls(lambdas);
    std::sort(ls.begin(), ls.end());
    for (int i = 0; i + 1 < n; ++i)
      if (ls[i] == ls[i + 1])
        throw std::invalid_argument("volume_postnikov: lambdas must be pairwise distinct");
  }

  // Centre and rescale x. The volume is translation invariant and scales as
  // s^(n-1); working near the origin keeps the permutation sum conditioned.
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double scale = 0.0;
  std::vector<long double> xc(n);
  for (int i = 0; i < n; ++i) {
    xc[i] = x[i] - mean;
    scale = std::max(scale, std::abs(x[i] - mean));
  }
  for (int i = 0; i < n; ++i)
    xc[i] /= scale;

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<long double> lam(lambdas.begin(), lambdas.end());

  long double acc = 0.0L;
  do {
    long double dot = 0.0L;
    for (int i = 0; i < n; ++i)
      dot += lam[idx[i]] * xc[i];
    long double den = 1.0L;
    for (int i = 0; i + 1 < n; ++i)
      den *= lam[idx[i]] - lam[idx[i + 1]];
    long double num = dot;
    for (int p = 1; p < n - 1; ++p)
      num *= dot;
    acc += num / den;
  } while (std::next_permutation(idx.begin(), idx.end()));

  long double vol = acc / factorial_ld(n - 1);
  for (int p = 0; p < n - 1; ++p)
    vol *= scale;
  return static_cast<double>(vol);
}

double volume_regular(int n)
{
  if (n < 2)
    throw std::domain_error("volume_regular requires n >= 2, got n = " + std::to_string(n));
  return std::pow(static_cast<double>(n), n - 2) / std::pow(static_cast<double>(n - 1), n - 1);
}

double PiecewisePolynomialDensity::operator()(double u) const
{
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("density evaluation requires u in [0, 1]");
  std::size_t j = pieces.size() - 1;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    if (u <= pieces[k].hi) {
      j = k;
      break;
    }
  }
  const auto& c = pieces[j].coeffs;
  double v = 0.0;
  for (std::size_t p = c.size(); p-- > 0;)
    v = v * u + c[p];
  return v;
}

namespace {

double poly_integral(const std::vector<double>& coeffs, double lo, double hi)
{
  double acc = 0.0;
  double plo = lo;
  double phi = hi;
  for (std::size_t p = 0; p < coeffs.size(); ++p) {
    acc += coeffs[p] * (phi - plo) / (p + 1);
    plo *= lo;
    phi *= hi;
  }
  return acc;
}

// coefficients of (u - 1/2)^r
std::vector<double> centered_power_coeffs(int r)
{
  std::vector<double> c{ 1.0 };
  for (int k = 0; k < r; ++k) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t p = 0; p < c.size(); ++p) {
      next[p + 1] += c[p];
      next[p] += -0.5 * c[p];
    }
    c = std::move(next);
  }
  return c;
}

std::vector<double> poly_multiply(const std::vector<double>& a, const std::vector<double>& b)
{
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] += a[i] * b[j];
  return out;
}

} // namespace

double PiecewisePolynomialDensity::cdf(double u) const
{
  if (u <= 0.0)
    return 0.0;
  if (u >= 1.0)
    return 1.0;
  double acc = 0.0;
  for (const auto& piece : pieces) {
    if (u >= piece.hi) {
      acc += poly_integral(piece.coeffs, piece.lo, piece.hi);
    } else {
      acc += poly_integral(piece.coeffs, piece.lo, u);
      break;
    }
  }
  return acc;
}

double PiecewisePolynomialDensity::central_moment(int order) const
{
  if (order < 1)
    throw std::invalid_argument("central_moment requires order >= 1");
  const std::vector<double> shifted = centered_power_coeffs(order);
  double acc = 0.0;
  for (const auto& piece : pieces)
    acc += poly_integral(poly_multiply(piece.coeffs, shifted), piece.lo, piece.hi);
  return acc;
}

double marginal_density_value(int n, double u)
{
  if (n < 2)
    throw std::invalid_argument("marginal density requires n >= 2");
  if (n > kExactNMax)
    throw std::invalid_argument("marginal_density_value: n = " + std::to_string(n) +
                                " exceeds n_max = " + std::to_string(kExactNMax) +
                                "; build a simulated reference instead");
  if (u < 0.0 || u > 1.0)
    throw std::invalid_argument("marginal density requires u in [0, 1]");
  if (n == 2)
    return 1.0;

  // interval index j in 1..n-1 with u in [(j-1)/(n-1), j/(n-1)]
  int j = std::min(n - 2, static_cast<int>(std::floor(u * (n - 1)))) + 1;

  // Section of the permutohedron at height u is itself a permutohedron on
  // n-1 coordinates; both j and j-1 are replaced by a single sliding value.
  const int m = n - 1;
  std::vector<double> section;
  section.reserve(m);
  for (int v = n - 1; v >= j + 1; --v)
    section.push_back(static_cast<double>(v));
  section.push_back(2.0 * j - 1.0 - (n - 1) * u);
  for (int v = j - 2; v >= 0; --v)
    section.push_back(static_cast<double>(v));

  std::vector<double> lam(m);
  for (int i = 0; i < m; ++i)
    lam[i] = i - (m - 1) / 2.0;

  const double vol = volume_postnikov(section, lam);
  return (n - 1) * vol / std::pow(static_cast<double>(n), n - 2);
}

PiecewisePolynomialDensity marginal_density_exact(int n)
{
  if (n < 2)
    throw std::invalid_argument("marginal density requires n >= 2");
  if (n > kExactNMax)
    throw std::invalid_argument("marginal_density_exact: n = " + std::to_string(n) +
                                " exceeds n_max = " + std::to_string(kExactNMax) +
                                "; build a simulated reference instead");

  PiecewisePolynomialDensity density;
  density.n = n;
  const int npieces = n - 1;
  const int deg = n - 2;
  const int m = deg + 1; // interpolation points per piece

  for (int j = 1; j <= npieces; ++j) {
    PiecewisePolynomialDensity::Piece piece;
    piece.lo = static_cast<double>(j - 1) / (n - 1);
    piece.hi = static_cast<double>(j) / (n - 1);

    const double mid = 0.5 * (piece.lo + piece.hi);
    const double half = 0.5 * (piece.hi - piece.lo);

    Eigen::MatrixXd vand(m, m);
    Eigen::VectorXd vals(m);
    std::vector<double> nodes(m);
    for (int k = 0; k < m; ++k) {
      // Chebyshev nodes within the interval
      double node = m == 1 ? mid : mid + half * std::cos(3.14159265358979323846 * (2.0 * k + 1.0) / (2.0 * m));
      nodes[k] = node;
      vals(k) = marginal_density_value(n, node);
      double up = 1.0;
      for (int p = 0; p < m; ++p) {
        vand(k, p) = up;
        up *= node;
      }
    }

    Eigen::VectorXd coeffs = vand.colPivHouseholderQr().solve(vals);
    double residual = (vand * coeffs - vals).cwiseAbs().maxCoeff();
    if (residual >= 1e-9)
      throw std::runtime_error("marginal_density_exact: interpolation residual " +
                               std::to_string(residual) + " exceeds 1e-9 for n = " + std::to_string(n));

    piece.coeffs.assign(coeffs.data(), coeffs.data() + m);
    density.pieces.push_back(std::move(piece));
  }

  // Structural checks: knot continuity, unit mass, symmetry about 1/2.
  for (int j = 0; j + 1 < npieces; ++j) {
    const double knot = density.pieces[j].hi;
    double left = 0.0;
    double right = 0.0;
    for (std::size_t p = density.pieces[j].coeffs.size(); p-- > 0;)
      left = left * knot + density.pieces[j].coeffs[p];
    for (std::size_t p = density.pieces[j + 1].coeffs.size(); p-- > 0;)
      right = right * knot + density.pieces[j + 1].coeffs[p];
    if (std::abs(left - right) > 1e-10)
      throw std::runtime_error("marginal_density_exact: pieces disagree at a knot");
  }
  double mass = 0.0;
  for (const auto& piece : density.pieces)
    mass += poly_integral(piece.coeffs, piece.lo, piece.hi);
  if (std::abs(mass - 1.0) > 1e-10)
    throw std::runtime_error("marginal_density_exact: density does not integrate to 1");
  for (int k = 1; k < 8; ++k) {
    const double u = k / 8.0;
    if (std::abs(density(u) - density(1.0 - u)) > 1e-10)
      throw std::runtime_error("marginal_density_exact: density is not symmetric about 1/2");
  }

  return density;
}

std::vector<double> exact_moments(const PiecewisePolynomialDensity& density, const std::vector<int>& orders)
{
  std::vector<double> out;
  out.reserve(orders.size());
  for (int order : orders)
    out.push_back(density.central_moment(order));
  return out;
}

} // namespace imaxent
