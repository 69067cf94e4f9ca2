#pragma once

#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace imaxent {

//! A second-order kernel: density k, CDF K and the functionals mu2(k),
//! mu4(k) and psi21(K) = 2*int x K(x) k(x) dx. Construction validates the
//! second-order properties (k >= 0, symmetry, unit mass, K(0) = 1/2), so
//! higher-order kernels are rejected.
class KernelModel
{
public:
  static KernelModel gaussian();
  static KernelModel epanechnikov();
  static KernelModel by_name(const std::string& name);

  double k(double x) const { return k_(x); }
  double K(double x) const { return K_(x); }
  double mu2() const { return mu2_; }
  double mu4() const { return mu4_; }
  double psi21() const { return psi21_; }
  const std::string& name() const { return name_; }
  bool is_gaussian() const { return gaussian_; }

private:
  KernelModel(std::string name, std::function<double(double)> k, std::function<double(double)> K,
              double mu2, double mu4, double psi21, bool gaussian);
  void validate() const;

  std::string name_;
  std::function<double(double)> k_;
  std::function<double(double)> K_;
  double mu2_;
  double mu4_;
  double psi21_;
  bool gaussian_;
};

//! Immutable batch of observations, stored sorted with the permutation back
//! to the original order.
class Sample
{
public:
  explicit Sample(std::vector<double> values);

  int n() const { return static_cast<int>(sorted_.size()); }
  const std::vector<double>& sorted() const { return sorted_; }
  //! original index of the k-th sorted value
  const std::vector<int>& order() const { return order_; }
  //! position of original observation i in the sorted array
  int rank_of(int original_index) const { return rank_[original_index]; }

  double min() const { return sorted_.front(); }
  double max() const { return sorted_.back(); }
  double mean() const;
  double stddev() const;

private:
  std::vector<double> sorted_;
  std::vector<int> order_;
  std::vector<int> rank_;
};

//! Leave-one-out PITs at bandwidth b, aligned with the sorted sample order
//! (non-decreasing for monotone kernels, summing to n/2).
struct PitVector
{
  double b{ 0.0 };
  std::vector<double> v;
};

//! Kernel distribution function estimate at x; b = 0 gives the EDF (the
//! kernel CDF degenerates to the right-continuous indicator z >= 0).
double kdfe(const Sample& sample, const KernelModel& kernel, double b, double x);

//! Kernel density estimate at x (b > 0).
double kde(const Sample& sample, const KernelModel& kernel, double b, double x);

//! Leave-one-out PITs V_i(b) = (n-1)^-1 sum_{j != i} K_b(X_i - X_j).
PitVector loo_pits(const Sample& sample, const KernelModel& kernel, double b);

//! Windowed O(n log n + n w) evaluation for the Gaussian kernel; agrees with
//! loo_pits to well below 1e-10.
PitVector loo_pits_gaussian_fast(const Sample& sample, double b);

//! PITs recovered through the pairwise-kernel affine projection; a validation
//! oracle for loo_pits (agreement to 1e-12).
std::vector<double> pit_affine_representation(const Sample& sample, const KernelModel& kernel, double b);

//! Four-term large-n approximation of E V^r; a validation oracle against
//! Monte Carlo moments.
double pit_moment_expansion(int r, double n, double b, double xi2r, double xi1r, const KernelModel& kernel);

//! Distribution evaluators for the moment-constant integrals; infinite
//! support bounds are allowed.
struct DistFns
{
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double support_lo{ -std::numeric_limits<double>::infinity() };
  double support_hi{ std::numeric_limits<double>::infinity() };
};

//! Constants xi_{2,r}(F) = r(r-1)/2 * int F^(r-2) f^3 and
//! xi_{1,r}(F) = r(r-1)/2 * int F^(r-2) f^2, by adaptive quadrature.
std::pair<double, double> compute_xi(const DistFns& dist, int r);

//! Closed-form Var V_1(b) when both the data density and the kernel are
//! standard normal; strictly decreasing in b.
double gaussian_var_v1(int n, double b);

} // namespace imaxent
