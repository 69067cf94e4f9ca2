#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracles {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.41421356237309504880); }

//! Quadrature of the weighted CvM defining integral
//!   int [Ghat(t) - t]^2 psi(t) dt over [eps, 1-eps],
//! with Ghat the EDF of u and psi(t) = t^(alpha-1) (1-t)^(beta-1).
//! The integrand is smooth between order statistics, so each span is
//! integrated separately with an endpoint-tolerant rule.
inline double cvm_integral(std::vector<double> u, double alpha, double beta, double eps)
{
  std::sort(u.begin(), u.end());
  const int n = static_cast<int>(u.size());
  const double lo_lim = eps;
  const double hi_lim = 1.0 - eps;

  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (int j = 0; j <= n; ++j) {
    double lo = j == 0 ? 0.0 : u[j - 1];
    double hi = j == n ? 1.0 : u[j];
    lo = std::max(lo, lo_lim);
    hi = std::min(hi, hi_lim);
    if (lo >= hi)
      continue;
    const double step = static_cast<double>(j) / n;
    auto integrand = [&](double t) {
      const double d = step - t;
      return d * d * std::pow(t, alpha - 1.0) * std::pow(1.0 - t, beta - 1.0);
    };
    total += integrator.integrate(integrand, lo, hi, 1e-12);
  }
  return total;
}

//! Adaptive quadrature over a finite or infinite interval.
template <typename F>
double integrate(F&& f, double lo, double hi, double tol = 1e-10)
{
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(std::forward<F>(f), lo, hi, 15, tol,
                                                                       &error);
}

//! Membership of a point in the convex hull of a vertex set, decided by
//! Frank-Wolfe with away steps on min ||V w - p||^2 over the simplex.
//! Returns true when the distance to the hull falls below `tol`.
inline bool in_convex_hull(const std::vector<std::vector<double>>& vertices, const std::vector<double>& point,
                           double tol = 1e-7, int max_iter = 20000)
{
  const std::size_t m = vertices.size();
  const std::size_t dim = point.size();
  std::vector<double> w(m, 0.0);
  w[0] = 1.0;
  std::vector<double> x = vertices[0];

  auto dot_grad = [&](const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d)
      acc += (x[d] - point[d]) * v[d];
    return acc;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    double dist2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d)
      dist2 += (x[d] - point[d]) * (x[d] - point[d]);
    if (dist2 < tol * tol)
      return true;

    // toward vertex minimizing the gradient; away from the active vertex
    // maximizing it
    std::size_t s_best = 0;
    double s_val = dot_grad(vertices[0]);
    std::size_t a_best = 0;
    double a_val = -1e300;
    for (std::size_t v = 0; v < m; ++v) {
      const double g = dot_grad(vertices[v]);
      if (g < s_val) {
        s_val = g;
        s_best = v;
      }
      if (w[v] > 0.0 && g > a_val) {
        a_val = g;
        a_best = v;
      }
    }

    const double x_grad = dot_grad(x);
    const double fw_gap = x_grad - s_val;
    if (fw_gap < 0.5 * tol * tol)
      return dist2 < tol * tol; // certificate: gap bounds the remaining gain

    std::vector<double> dir(dim);
    double gamma_max;
    bool away = (a_val - x_grad) > fw_gap;
    std::size_t vertex = away ? a_best : s_best;
    if (away) {
      for (std::size_t d = 0; d < dim; ++d)
        dir[d] = x[d] - vertices[vertex][d];
      gamma_max = w[vertex] / (1.0 - w[vertex] + 1e-300);
    } else {
      for (std::size_t d = 0; d < dim; ++d)
        dir[d] = vertices[vertex][d] - x[d];
      gamma_max = 1.0;
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      num += (point[d] - x[d]) * dir[d];
      den += dir[d] * dir[d];
    }
    if (den <= 0.0)
      break;
    double gamma = std::clamp(num / den, 0.0, gamma_max);
    if (gamma <= 0.0)
      break;

    for (std::size_t d = 0; d < dim; ++d)
      x[d] += gamma * dir[d];
    if (away) {
      for (std::size_t v = 0; v < m; ++v)
        w[v] *= (1.0 + gamma);
      w[vertex] -= gamma;
    } else {
      for (std::size_t v = 0; v < m; ++v)
        w[v] *= (1.0 - gamma);
      w[vertex] += gamma;
    }
  }

  double dist2 = 0.0;
  for (std::size_t d = 0; d < dim; ++d)
    dist2 += (x[d] - point[d]) * (x[d] - point[d]);
  return dist2 < tol * tol;
}

//! All distinct permutations of a vector (vertex set of a permutohedron).
inline std::vector<std::vector<double>> permutation_vertices(std::vector<double> base)
{
  std::sort(base.begin(), base.end());
  std::vector<std::vector<double>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

} // namespace oracles
