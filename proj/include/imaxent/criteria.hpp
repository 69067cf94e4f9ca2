#pragma once

#include "imaxent/kernels.hpp"
#include "imaxent/reference.hpp"

#include <vector>

namespace imaxent {

//! Weight psi(t) = t^(alpha-1) (1-t)^(beta-1) on [eps, 1-eps]. alpha = beta
//! = 0 is the Anderson-Darling weight and must go through anderson_darling.
struct CvMWeight
{
  double alpha{ 1.0 };
  double beta{ 1.0 };
  double eps{ 0.0 };
};

//! Reference-transformed PITs u_i = L_n(V_i(b)), kept sorted ascending.
class TransformedPits
{
public:
  explicit TransformedPits(std::vector<double> u);

  const std::vector<double>& u() const { return u_; }
  int n() const { return static_cast<int>(u_.size()); }

private:
  std::vector<double> u_;
};

//! Applies the reference CDF to each PIT; clamped lookups are counted.
TransformedPits transform_pits(const PitVector& pits, const MarginalReference& ref, int* clamped_count = nullptr);

//! Unnormalized incomplete beta B(x; a, c) = int_0^x t^(a-1)(1-t)^(c-1) dt.
double incomplete_beta(double x, double a, double c);

//! Beta-weighted Cramer-von Mises discrepancy between the EDF of u and the
//! uniform CDF, by the order-statistic calculating form.
double cvm_beta(const TransformedPits& u, const CvMWeight& w);

//! Trimmed classical CvM (alpha = beta = 1) via its dedicated closed form;
//! equals cvm_beta with the same trimming.
double cvm_classical_trimmed(const TransformedPits& u, double eps);

//! Anderson-Darling criterion (alpha = beta = 0), trimmed or untrimmed.
//! With eps = 0, values are clamped away from {0, 1} before the logs and the
//! clamp count is reported through clamped_count.
double anderson_darling(const TransformedPits& u, double eps, int* clamped_count = nullptr);

//! Orthonormal shifted Legendre polynomial value (k <= 20).
double legendre_shifted(int k, double v);

//! Neyman smooth statistic over the first r polynomials.
double neyman_statistic(const TransformedPits& u, int r);

//! Moment deviations mean((V - 1/2)^j) - m_{j,n} for j = 2..r.
std::vector<double> moment_deviations(const PitVector& pits, const MarginalReference& ref, int r);

//! Continuously-updating objective n * gbar' Omega^- gbar over the moment
//! deviations of orders 2..r, with a spectral pseudo-inverse.
double cue_objective(const PitVector& pits, const MarginalReference& ref, int r);

//! Cross-validation criterion CV_1(b) = n^-1 sum [V_i(b) - F_n(x_i)]^2.
double sarda_cv(const Sample& sample, const KernelModel& kernel, double b);

//! Classical CvM of the raw PITs against the uniform CDF; CV_1 exceeds it by
//! exactly 1/(6n^2).
double cvm_uniform_classical(const PitVector& pits);

} // namespace imaxent
