#include "imaxent/criteria.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace imaxent {

TransformedPits::TransformedPits(std::vector<double> u)
  : u_(std::move(u))
{
  if (u_.empty())
    throw std::invalid_argument("transformed PITs must not be empty");
  std::sort(u_.begin(), u_.end());
  if (u_.front() < 0.0 || u_.back() > 1.0)
    throw std::invalid_argument("transformed PITs must lie in [0, 1]");
}

TransformedPits transform_pits(const PitVector& pits, const MarginalReference& ref, int* clamped_count)
{
  std::vector<double> u(pits.v.size());
  int clamped = 0;
  for (std::size_t i = 0; i < pits.v.size(); ++i) {
    bool c = false;
    u[i] = cdf_lookup(ref, pits.v[i], &c);
    clamped += c ? 1 : 0;
  }
  if (clamped_count)
    *clamped_count = clamped;
  return TransformedPits(std::move(u));
}

double incomplete_beta(double x, double a, double c)
{
  if (!(a > 0.0) || !(c > 0.0))
    throw std::domain_error("incomplete_beta requires a > 0 and c > 0; use the Anderson-Darling path for the (0,0) weight");
  if (x < 0.0 || x > 1.0)
    throw std::domain_error("incomplete_beta requires x in [0, 1]");
  if (x == 0.0)
    return 0.0;
  return boost::math::beta(a, c, x); // non-normalized incomplete beta
}

namespace {

// j_min, j_max index window of the order statistics inside [eps, 1-eps];
// j_min > j_max means no order statistic falls in the window.
struct TrimWindow
{
  int j_min;
  int j_max;
};

TrimWindow trim_window(const std::vector<double>& u, double eps)
{
  const int n = static_cast<int>(u.size());
  TrimWindow w{ n + 1, 0 };
  for (int j = 1; j <= n; ++j) {
    if (u[j - 1] >= eps) {
      w.j_min = j;
      break;
    }
  }
  for (int j = n; j >= 1; --j) {
    if (u[j - 1] <= 1.0 - eps) {
      w.j_max = j;
      break;
    }
  }
  return w;
}

} // namespace

double cvm_beta(const TransformedPits& pits, const CvMWeight& w)
{
  if (w.alpha == 0.0 && w.beta == 0.0)
    throw std::invalid_argument("the (0,0) weight is the Anderson-Darling criterion; call anderson_darling");
  if (w.eps < 0.0 || w.eps >= 0.5)
    throw std::invalid_argument("trimming constant must satisfy 0 <= eps < 1/2");
  const double a = w.alpha;
  const double c = w.beta;
  const auto& u = pits.u();
  const int n = pits.n();

  if (w.eps == 0.0) {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j)
      sum += 2.0 * incomplete_beta(u[j - 1], a + 1.0, c) - (2.0 * j - 1.0) / n * incomplete_beta(u[j - 1], a, c);
    return sum / n + incomplete_beta(1.0, a, c + 2.0);
  }

  const double eps = w.eps;
  const TrimWindow tw = trim_window(u, eps);
  double sum = 0.0;
  for (int j = tw.j_min; j <= tw.j_max; ++j)
    sum += 2.0 * incomplete_beta(u[j - 1], a + 1.0, c) - (2.0 * j - 1.0) / n * incomplete_beta(u[j - 1], a, c);

  const double jmax = tw.j_max;
  const double jlo = tw.j_min - 1.0;
  const double adj = incomplete_beta(1.0 - eps, a + 2.0, c) - incomplete_beta(eps, a + 2.0, c) -
                     2.0 * jmax / n * incomplete_beta(1.0 - eps, a + 1.0, c) +
                     2.0 * jlo / n * incomplete_beta(eps, a + 1.0, c) +
                     jmax * jmax / (static_cast<double>(n) * n) * incomplete_beta(1.0 - eps, a, c) -
                     jlo * jlo / (static_cast<double>(n) * n) * incomplete_beta(eps, a, c);
  return sum / n + adj;
}

double cvm_classical_trimmed(const TransformedPits& pits, double eps)
{
  if (eps < 0.0 || eps >= 0.5)
    throw std::invalid_argument("trimming constant must satisfy 0 <= eps < 1/2");
  const auto& u = pits.u();
  const int n = pits.n();
  const TrimWindow tw = trim_window(u, eps);

  double sum = 0.0;
  for (int j = tw.j_min; j <= tw.j_max; ++j) {
    const double d = u[j - 1] - (2.0 * j - 1.0) / (2.0 * n);
    sum += d * d;
  }
  const double count = tw.j_max - tw.j_min + 1.0;
  const double upper = 1.0 - eps - static_cast<double>(tw.j_max) / n;
  const double lower = eps - (tw.j_min - 1.0) / n;
  return sum / n + count / (12.0 * static_cast<double>(n) * n * n) + upper * upper * upper / 3.0 -
         lower * lower * lower / 3.0;
}

double anderson_darling(const TransformedPits& pits, double eps, int* clamped_count)
{
  if (eps < 0.0 || eps >= 0.5)
    throw std::invalid_argument("trimming constant must satisfy 0 <= eps < 1/2");
  const int n = pits.n();

  if (eps == 0.0) {
    // Simulated reference lookups can return exact 0/1; clamp before logs.
    constexpr double kClamp = 1e-12;
    if (!clamped_count && (pits.u().front() <= 0.0 || pits.u().back() >= 1.0))
      throw std::domain_error("anderson_darling with eps = 0 requires u strictly inside (0, 1); "
                              "use a positive trimming constant instead");
    std::vector<double> u = pits.u();
    int clamped = 0;
    for (double& x : u) {
      if (x < kClamp || x > 1.0 - kClamp) {
        ++clamped;
        x = std::clamp(x, kClamp, 1.0 - kClamp);
      }
    }
    if (clamped_count)
      *clamped_count = clamped;
    double sum = 0.0;
    for (int j = 1; j <= n; ++j)
      sum += (2.0 * j - 1.0) * (std::log(u[j - 1]) + std::log(1.0 - u[n - j]));
    return -sum / (static_cast<double>(n) * n) - 1.0;
  }

  const auto& u = pits.u();
  if (clamped_count)
    *clamped_count = 0;
  const TrimWindow tw = trim_window(u, eps);
  double sum = 0.0;
  for (int j = tw.j_min; j <= tw.j_max; ++j) {
    const double uj = u[j - 1];
    sum += -2.0 * std::log(1.0 - uj) - (2.0 * j - 1.0) / n * (std::log(uj) - std::log(1.0 - uj));
  }
  const double jmax = static_cast<double>(tw.j_max) / n;
  const double jlo = (tw.j_min - 1.0) / n;
  return sum / n - 1.0 + 2.0 * eps + (jmax * jmax + (jlo - 1.0) * (jlo - 1.0)) * std::log(1.0 - eps) -
         ((jmax - 1.0) * (jmax - 1.0) + jlo * jlo) * std::log(eps);
}

double legendre_shifted(int k, double v)
{
  if (k < 0)
    throw std::invalid_argument("legendre_shifted requires k >= 0");
  if (k > 20)
    throw std::invalid_argument("legendre_shifted supports k <= 20 (binomial coefficients overflow beyond)");
  // rho_k(v) = (-1)^k sqrt(2k+1) sum_j C(k,j) C(k+j,j) (-v)^j
  double sum = 0.0;
  double binom_kj = 1.0;     // C(k, j)
  double binom_kjj = 1.0;    // C(k+j, j)
  double vpow = 1.0;         // (-v)^j
  for (int j = 0; j <= k; ++j) {
    sum += binom_kj * binom_kjj * vpow;
    binom_kj *= static_cast<double>(k - j) / (j + 1);
    binom_kjj *= static_cast<double>(k + j + 1) / (j + 1);
    vpow *= -v;
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * std::sqrt(2.0 * k + 1.0) * sum;
}

double neyman_statistic(const TransformedPits& pits, int r)
{
  if (r < 1)
    throw std::invalid_argument("neyman_statistic requires r >= 1");
  const auto& u = pits.u();
  const int n = pits.n();
  double stat = 0.0;
  for (int j = 1; j <= r; ++j) {
    double s = 0.0;
    for (double ui : u)
      s += legendre_shifted(j, ui);
    stat += s * s / n;
  }
  return stat;
}

std::vector<double> moment_deviations(const PitVector& pits, const MarginalReference& ref, int r)
{
  const int n = static_cast<int>(pits.v.size());
  if (ref.n != n)
    throw std::invalid_argument("reference is for n = " + std::to_string(ref.n) + ", PIT vector has n = " +
                                std::to_string(n));
  if (r < 2)
    throw std::invalid_argument("moment_deviations requires r >= 2");
  if (r > kReferenceMomentMax)
    throw std::invalid_argument("moment order " + std::to_string(r) + " exceeds the reference's stored moments");

  std::vector<double> dev(r - 1, 0.0);
  for (double v : pits.v) {
    const double d = v - 0.5;
    double p = d;
    for (int j = 2; j <= r; ++j) {
      p *= d;
      dev[j - 2] += p;
    }
  }
  for (int j = 2; j <= r; ++j)
    dev[j - 2] = dev[j - 2] / n - ref.m(j);
  return dev;
}

double cue_objective(const PitVector& pits, const MarginalReference& ref, int r)
{
  const int n = static_cast<int>(pits.v.size());
  if (r < 2)
    throw std::invalid_argument("cue_objective requires r >= 2");
  if (n <= r)
    throw std::invalid_argument("cue_objective requires n > r");
  if (ref.n != n)
    throw std::invalid_argument("reference/PIT size mismatch");

  const int m = r - 1;
  Eigen::MatrixXd g(n, m);
  for (int i = 0; i < n; ++i) {
    const double d = pits.v[i] - 0.5;
    double p = d;
    for (int j = 2; j <= r; ++j) {
      p *= d;
      g(i, j - 2) = p - ref.m(j);
    }
  }
  const Eigen::RowVectorXd gbar = g.colwise().mean();
  const Eigen::MatrixXd centered = g.rowwise() - gbar;
  const Eigen::MatrixXd omega = centered.transpose() * centered / n;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(omega);
  const double max_eig = eig.eigenvalues().maxCoeff();
  if (!(max_eig > 0.0))
    throw std::runtime_error("cue_objective: degenerate moments (zero covariance)");

  const double cutoff = 1e-10 * max_eig;
  double quad = 0.0;
  for (int j = 0; j < m; ++j) {
    const double lambda = eig.eigenvalues()(j);
    if (lambda > cutoff) {
      const double proj = eig.eigenvectors().col(j).dot(gbar.transpose());
      quad += proj * proj / lambda;
    }
  }
  return n * quad;
}

double sarda_cv(const Sample& sample, const KernelModel& kernel, double b)
{
  const int n = sample.n();
  if (n < 2)
    throw std::invalid_argument("sarda_cv requires n >= 2");
  const PitVector pits = loo_pits(sample, kernel, b);
  const auto& xs = sample.sorted();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), xs[i]);
    const double edf = static_cast<double>(it - xs.begin()) / n;
    const double d = pits.v[i] - edf;
    acc += d * d;
  }
  return acc / n;
}

double cvm_uniform_classical(const PitVector& pits)
{
  std::vector<double> v = pits.v;
  std::sort(v.begin(), v.end());
  const int n = static_cast<int>(v.size());
  double sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double d = v[j - 1] - (2.0 * j - 1.0) / (2.0 * n);
    sum += d * d;
  }
  return sum / n + 1.0 / (12.0 * static_cast<double>(n) * n);
}

} // namespace imaxent
