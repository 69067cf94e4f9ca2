#pragma once

#include "imaxent/kernels.hpp"
#include "imaxent/rng.hpp"

#include <utility>
#include <vector>

namespace imaxent {

//! Finite normal mixture standardized to zero mean and unit variance.
struct MixtureModel
{
  int id{ 0 };
  std::vector<double> weights;
  std::vector<double> means; // standardized
  std::vector<double> sds;   // standardized
  double shift{ 0.0 };       // raw mean removed by standardization
  double scale{ 1.0 };       // raw standard deviation divided out

  double pdf(double x) const;
  double cdf(double x) const;
};

//! Benchmark shapes 1..6: Gaussian, skewed unimodal, strongly skewed,
//! kurtotic unimodal, outlier, bimodal.
MixtureModel mixture(int id);

std::pair<double, double> mixture_eval(const MixtureModel& model, double x);

Sample mixture_sample(const MixtureModel& model, int n, Rng& rng);

DistFns to_dist_fns(const MixtureModel& model);

//! Exact MISE of the kernel density estimate with a Gaussian kernel.
double mise_kde_exact(const MixtureModel& model, int n, double b);

//! Exact MISE of the kernel distribution function estimate with a Gaussian
//! kernel (b = 0 gives the EDF value).
double mise_kdfe_exact(const MixtureModel& model, int n, double b);

struct MiseBandwidths
{
  double b_kde{ 0.0 };
  double b_kdfe{ 0.0 };
  double mise_kde{ 0.0 };
  double mise_kdfe{ 0.0 };
};

//! Minimizers of the exact MISE curves for density and distribution function
//! estimation; Gaussian kernels only.
MiseBandwidths min_mise_bandwidths(const MixtureModel& model, int n, const KernelModel& kernel);

} // namespace imaxent
