#include "imaxent/mixtures.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace imaxent {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }
double Phi(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

//! normal density with variance v evaluated at d
double phi_var(double d, double v) { return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * kPi * v); }

//! antiderivative of the standard normal CDF: int_{-inf}^z Phi = z Phi(z) + phi(z)
double big_psi(double z) { return z * Phi(z) + phi(z); }

struct RawMixture
{
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;
};

// Benchmark normal-mixture shapes #1-#6 (raw parameters before
// standardization): Gaussian; skewed unimodal; strongly skewed; kurtotic
// unimodal; outlier; bimodal.
RawMixture raw_mixture(int id)
{
  switch (id) {
  case 1:
    return { { 1.0 }, { 0.0 }, { 1.0 } };
  case 2:
    return { { 0.2, 0.2, 0.6 }, { 0.0, 0.5, 13.0 / 12.0 }, { 1.0, 2.0 / 3.0, 5.0 / 9.0 } };
  case 3: {
    RawMixture mix;
    for (int l = 0; l <= 7; ++l) {
      mix.weights.push_back(1.0 / 8.0);
      mix.means.push_back(3.0 * (std::pow(2.0 / 3.0, l) - 1.0));
      mix.sds.push_back(std::pow(2.0 / 3.0, l));
    }
    return mix;
  }
  case 4:
    return { { 2.0 / 3.0, 1.0 / 3.0 }, { 0.0, 0.0 }, { 1.0, 0.1 } };
  case 5:
    return { { 0.1, 0.9 }, { 0.0, 0.0 }, { 1.0, 0.1 } };
  case 6:
    return { { 0.5, 0.5 }, { -1.0, 1.0 }, { 2.0 / 3.0, 2.0 / 3.0 } };
  default:
    throw std::invalid_argument("mixture id must lie in 1..6, got " + std::to_string(id));
  }
}

} // namespace

double MixtureModel::pdf(double x) const
{
  double acc = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c)
    acc += weights[c] * phi((x - means[c]) / sds[c]) / sds[c];
  return acc;
}

double MixtureModel::cdf(double x) const
{
  double acc = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c)
    acc += weights[c] * Phi((x - means[c]) / sds[c]);
  return acc;
}

MixtureModel mixture(int id)
{
  const RawMixture raw = raw_mixture(id);

  // analytic mixture moments, then affine standardization
  double mean = 0.0;
  for (std::size_t c = 0; c < raw.weights.size(); ++c)
    mean += raw.weights[c] * raw.means[c];
  double var = 0.0;
  for (std::size_t c = 0; c < raw.weights.size(); ++c)
    var += raw.weights[c] * (raw.sds[c] * raw.sds[c] + raw.means[c] * raw.means[c]);
  var -= mean * mean;

  MixtureModel model;
  model.id = id;
  model.shift = mean;
  model.scale = std::sqrt(var);
  model.weights = raw.weights;
  model.means.resize(raw.means.size());
  model.sds.resize(raw.sds.size());
  for (std::size_t c = 0; c < raw.weights.size(); ++c) {
    model.means[c] = (raw.means[c] - mean) / model.scale;
    model.sds[c] = raw.sds[c] / model.scale;
  }
  return model;
}

std::pair<double, double> mixture_eval(const MixtureModel& model, double x)
{
  return { model.pdf(x), model.cdf(x) };
}

Sample mixture_sample(const MixtureModel& model, int n, Rng& rng)
{
  if (n < 1)
    throw std::invalid_argument("mixture_sample requires n >= 1");
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.u01();
    double acc = 0.0;
    std::size_t c = model.weights.size() - 1;
    for (std::size_t j = 0; j < model.weights.size(); ++j) {
      acc += model.weights[j];
      if (u < acc) {
        c = j;
        break;
      }
    }
    values[i] = model.means[c] + model.sds[c] * rng.normal();
  }
  return Sample(std::move(values));
}

DistFns to_dist_fns(const MixtureModel& model)
{
  DistFns fns;
  fns.pdf = [model](double x) { return model.pdf(x); };
  fns.cdf = [model](double x) { return model.cdf(x); };
  return fns;
}

double mise_kde_exact(const MixtureModel& model, int n, double b)
{
  if (!(b > 0.0))
    throw std::invalid_argument("mise_kde_exact requires b > 0");
  const std::size_t m = model.weights.size();
  double quad = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = model.weights[i] * model.weights[j];
      const double d = model.means[i] - model.means[j];
      const double s2 = model.sds[i] * model.sds[i] + model.sds[j] * model.sds[j];
      quad += w * ((1.0 - 1.0 / n) * phi_var(d, 2.0 * b * b + s2) - 2.0 * phi_var(d, b * b + s2) +
                   phi_var(d, s2));
    }
  }
  return 1.0 / (2.0 * std::sqrt(kPi) * n * b) + quad;
}

double mise_kdfe_exact(const MixtureModel& model, int n, double b)
{
  if (b < 0.0)
    throw std::invalid_argument("mise_kdfe_exact requires b >= 0");
  const std::size_t m = model.weights.size();

  // integrated variance: (2n)^-1 E || K_b(. - X) - K_b(. - X') ||^2 with the
  // pair difference delta normal within each component pair
  double ivar = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = model.weights[i] * model.weights[j];
      const double d = model.means[i] - model.means[j];
      const double s2 = model.sds[i] * model.sds[i] + model.sds[j] * model.sds[j];
      const double rho = std::sqrt(2.0 * b * b + s2);
      const double h = d / rho;
      ivar += w * (rho * (h * (2.0 * Phi(h) - 1.0) + 2.0 * phi(h)) - 2.0 * b / std::sqrt(kPi));
    }
  }
  ivar /= 2.0 * n;

  if (b == 0.0)
    return ivar;

  // integrated squared bias via int A_i A_j with
  // A_i(x) = Phi((x-mu_i)/s_i) - Phi((x-mu_i)/sigma_i), s_i^2 = b^2 + sigma_i^2
  auto J = [](double a, double p, double e, double q) {
    const double r = std::sqrt(p * p + q * q);
    return r * big_psi((a - e) / r);
  };
  double ibias2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double si = std::sqrt(b * b + model.sds[i] * model.sds[i]);
    for (std::size_t j = 0; j < m; ++j) {
      const double sj = std::sqrt(b * b + model.sds[j] * model.sds[j]);
      const double w = model.weights[i] * model.weights[j];
      const double mi = model.means[i];
      const double mj = model.means[j];
      ibias2 -= w * (J(mi, si, mj, sj) - J(mi, si, mj, model.sds[j]) - J(mi, model.sds[i], mj, sj) +
                     J(mi, model.sds[i], mj, model.sds[j]));
    }
  }
  return ivar + ibias2;
}

namespace {

double golden_min_log(const std::function<double(double)>& f, double lo, double hi)
{
  // scan in log space, then golden-section refine around the best point
  const int scan = 160;
  double best_b = lo;
  double best_v = f(lo);
  const double r = std::log(hi / lo);
  for (int i = 1; i < scan; ++i) {
    const double b = lo * std::exp(r * i / (scan - 1));
    const double v = f(b);
    if (v < best_v) {
      best_v = v;
      best_b = b;
    }
  }
  double a = best_b * std::exp(-r / (scan - 1));
  double c = best_b * std::exp(r / (scan - 1));
  a = std::max(a, lo);
  c = std::min(c, hi);
  constexpr double g = 0.61803398874989484820;
  double x1 = c - g * (c - a);
  double x2 = a + g * (c - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (c - a > 1e-10 * best_b) {
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - g * (c - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (c - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + c);
}

} // namespace

MiseBandwidths min_mise_bandwidths(const MixtureModel& model, int n, const KernelModel& kernel)
{
  if (!kernel.is_gaussian())
    throw std::invalid_argument("exact MISE bandwidths are only available for the Gaussian kernel");
  if (n < 2)
    throw std::invalid_argument("min_mise_bandwidths requires n >= 2");

  MiseBandwidths out;
  out.b_kde = golden_min_log([&](double b) { return mise_kde_exact(model, n, b); }, 1e-4, 20.0);
  out.mise_kde = mise_kde_exact(model, n, out.b_kde);
  out.b_kdfe = golden_min_log([&](double b) { return mise_kdfe_exact(model, n, b); }, 1e-4, 20.0);
  out.mise_kdfe = mise_kdfe_exact(model, n, out.b_kdfe);
  return out;
}

} // namespace imaxent
