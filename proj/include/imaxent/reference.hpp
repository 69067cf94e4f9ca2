#pragma once

#include "imaxent/permutohedron.hpp"
#include "imaxent/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace imaxent {

enum class ReferenceSource
{
  exact,
  simulated
};

//! Reference marginal distribution of one coordinate of a uniform draw on
//! the rescaled regular permutohedron: CDF and density on an equispaced
//! grid over [0, 1] plus central moments m_2..m_10 about 1/2.
struct MarginalReference
{
  int n{ 0 };
  int grid_size{ 0 };                  // G; the grid has G+1 nodes j/G
  std::vector<double> cdf_values;      // size G+1, first 0, last 1
  std::vector<double> density_values;  // size G+1
  std::vector<double> central_moments; // orders 2..10
  ReferenceSource source{ ReferenceSource::exact };
  long long draw_count{ 0 };
  std::uint64_t seed{ 0 };

  //! Central moment about 1/2 of the given order (2..10).
  double m(int order) const;
};

inline constexpr int kReferenceMomentMax = 10;
inline constexpr int kReferenceFormatVersion = 1;

struct SamplerDiagnostics
{
  unsigned long long attempts{ 0 };
  unsigned long long plane_accepts{ 0 };
  unsigned long long prefilter_accepts{ 0 };
  unsigned long long accepted{ 0 };

  double acceptance_rate() const
  {
    return attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts);
  }
};

//! Draws points uniformly distributed on the rescaled regular permutohedron
//! by rejection: n-1 cube uniforms completed onto the plane, a circumradius
//! prefilter, and the majorization membership check.
class PermutohedronSampler
{
public:
  explicit PermutohedronSampler(int n);

  //! One accepted point (loops until acceptance).
  std::vector<double> draw(Rng& rng);

  const SamplerDiagnostics& diagnostics() const { return diag_; }
  const PermutohedronSpec& spec() const { return spec_; }

private:
  PermutohedronSpec spec_;
  std::vector<double> generator_partial_sums_;
  double radius2_;
  double tol_;
  std::vector<double> scratch_;
  SamplerDiagnostics diag_;
};

//! Convenience wrapper around PermutohedronSampler for a single draw.
std::vector<double> sample_uniform(int n, Rng& rng, SamplerDiagnostics* diag = nullptr);

//! Builds the reference marginal for the given n. For n <= kExactNMax the
//! exact piecewise-polynomial path is used and draws is ignored; otherwise
//! the distribution is estimated from `draws` accepted uniform draws, with
//! all n coordinates pooled. Deterministic given (n, draws, grid_size, seed)
//! regardless of the worker count.
MarginalReference build_reference(int n, long long draws, int grid_size, std::uint64_t seed, int workers = 0);

//! Linear interpolation of the reference CDF; values outside [0, 1] are
//! clamped and flagged.
double cdf_lookup(const MarginalReference& ref, double v, bool* clamped = nullptr);

//! Central moment of the uniform distribution on [0, 1] about its mean.
double uniform_central_moment(int order);

struct RateFit
{
  int order{ 0 };
  double alpha{ 0.0 };
  double beta{ 0.0 };
  int subsample_min_n{ 0 };
};

//! Least-squares fit of log10(m0 - m_hat) on log10(n) over table entries
//! with n >= min_n, where m0 is the uniform moment of the same order. All
//! deviations must be negative (m_hat < m0).
RateFit rate_regression(const std::vector<std::pair<double, double>>& moment_table, int order, double min_n);

//! JSON persistence of reference tables.
void save_reference(const MarginalReference& ref, const std::string& path);
MarginalReference load_reference(const std::string& path);

//! Disk-cached build keyed by (n, draws, grid_size, seed, format version).
MarginalReference load_or_build_reference(int n, long long draws, int grid_size, std::uint64_t seed,
                                          const std::string& cache_dir, int workers = 0);

//! Default draw budget for simulated references at a given n.
long long default_reference_draws(int n, int grid_size = 1000);

} // namespace imaxent
