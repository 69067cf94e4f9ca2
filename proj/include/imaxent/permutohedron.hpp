#pragma once

#include <vector>

namespace imaxent {

//! Largest n for which the exact n!-cost volume and density paths are used;
//! beyond this the simulated reference applies.
inline constexpr int kExactNMax = 9;

//! The rescaled regular permutohedron: the convex hull of all permutations of
//! (1, (n-2)/(n-1), ..., 1/(n-1), 0), lying in the hyperplane of points
//! summing to n/2.
struct PermutohedronSpec
{
  int n{ 0 };
  std::vector<double> generator;
  double plane_sum{ 0.0 };

  static PermutohedronSpec regular(int n);
};

//! Default membership tolerance, sized for rounding accumulated across
//! partial sums.
inline double membership_tolerance(int n) { return 1e-12 * n; }

//! Majorization membership test: point belongs iff its coordinates sum to
//! n/2 (within tol) and the sorted-descending partial sums never exceed the
//! generator's partial sums by more than tol.
bool contains(const std::vector<double>& point, const PermutohedronSpec& spec, double tol);
bool contains(const std::vector<double>& point, const PermutohedronSpec& spec);

//! Distance from the barycentre to any vertex: sqrt(n(n+1)/(12(n-1))).
double circumradius(int n);

//! (n-1)-dimensional volume of the permutohedron generated by the strictly
//! decreasing vector x, computed by the permutation sum with auxiliary
//! parameters lambdas (pairwise distinct; the result does not depend on
//! them). Requires n <= kExactNMax.
double volume_postnikov(const std::vector<double>& x, const std::vector<double>& lambdas);

//! Closed-form volume of the rescaled regular permutohedron: n^(n-2)/(n-1)^(n-1).
double volume_regular(int n);

//! Marginal density of one coordinate of a uniform draw on the rescaled
//! regular permutohedron, as a piecewise polynomial of degree n-2 on the
//! intervals [(j-1)/(n-1), j/(n-1)].
struct PiecewisePolynomialDensity
{
  struct Piece
  {
    double lo{ 0.0 };
    double hi{ 0.0 };
    std::vector<double> coeffs; // coeffs[k] multiplies u^k
  };

  int n{ 0 };
  std::vector<Piece> pieces;

  double operator()(double u) const;
  //! Antiderivative with value 0 at u = 0.
  double cdf(double u) const;
  //! Central moment about 1/2 by exact polynomial integration.
  double central_moment(int order) const;
};

//! Exact marginal density value at a point, via the section-volume identity.
double marginal_density_value(int n, double u);

//! Full piecewise polynomial for 2 <= n <= kExactNMax; coefficients are
//! recovered from exact evaluations at Chebyshev nodes.
PiecewisePolynomialDensity marginal_density_exact(int n);

//! Central moments about 1/2 of the given density, one per requested order.
std::vector<double> exact_moments(const PiecewisePolynomialDensity& density, const std::vector<int>& orders);

} // namespace imaxent
