#include "imaxent/reference.hpp"

#include "imaxent/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace imaxent {

namespace {

constexpr int kHistogramBins = 200;
constexpr long long kChunkDraws = 1024;

} // namespace

double MarginalReference::m(int order) const
{
  if (order < 2 || order > kReferenceMomentMax)
    throw std::invalid_argument("reference stores central moments of orders 2.." +
                                std::to_string(kReferenceMomentMax) + ", requested " +
                                std::to_string(order));
  return central_moments[order - 2];
}

PermutohedronSampler::PermutohedronSampler(int n)
  : spec_(PermutohedronSpec::regular(n))
  , tol_(membership_tolerance(n))
{
  generator_partial_sums_.resize(n);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += spec_.generator[k];
    generator_partial_sums_[k] = acc;
  }
  const double r = circumradius(n);
  radius2_ = r * r + 1e-9; // slack so the prefilter never rejects a member
  scratch_.resize(n);
}

std::vector<double> PermutohedronSampler::draw(Rng& rng)
{
  const int n = spec_.n;
  std::vector<double> u(n);
  for (;;) {
    ++diag_.attempts;
    double sum = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      u[i] = rng.u01();
      sum += u[i];
    }
    const double last = spec_.plane_sum - sum;
    if (last < 0.0 || last > 1.0)
      continue;
    u[n - 1] = last;
    ++diag_.plane_accepts;

    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = u[i] - 0.5;
      r2 += d * d;
    }
    if (r2 > radius2_)
      continue;
    ++diag_.prefilter_accepts;

    scratch_ = u;
    std::sort(scratch_.begin(), scratch_.end(), std::greater<double>());
    double ps = 0.0;
    bool ok = true;
    for (int k = 0; k + 1 < n; ++k) {
      ps += scratch_[k];
      if (ps > generator_partial_sums_[k] + tol_) {
        ok = false;
        break;
      }
    }
    if (!ok)
      continue;
    ++diag_.accepted;
    return u;
  }
}

std::vector<double> sample_uniform(int n, Rng& rng, SamplerDiagnostics* diag)
{
  PermutohedronSampler sampler(n);
  std::vector<double> u = sampler.draw(rng);
  if (diag)
    *diag = sampler.diagnostics();
  return u;
}

namespace {

struct ChunkAccumulator
{
  std::vector<long long> cdf_cells;             // grid_size cells
  std::vector<long long> hist;                  // kHistogramBins cells
  std::array<double, kReferenceMomentMax - 1> moment_sums{}; // orders 2..10
  unsigned long long attempts{ 0 };
};

ChunkAccumulator run_chunk(int n, long long target, int grid_size, std::uint64_t chunk_seed)
{
  ChunkAccumulator acc;
  acc.cdf_cells.assign(grid_size, 0);
  acc.hist.assign(kHistogramBins, 0);

  PermutohedronSampler sampler(n);
  Rng rng(chunk_seed);
  for (long long d = 0; d < target; ++d) {
    const std::vector<double> u = sampler.draw(rng);
    for (double v : u) {
      int cell = std::min(static_cast<int>(v * grid_size), grid_size - 1);
      ++acc.cdf_cells[cell];
      int bin = std::min(static_cast<int>(v * kHistogramBins), kHistogramBins - 1);
      ++acc.hist[bin];
      const double dev = v - 0.5;
      const double dev2 = dev * dev;
      double p = dev2;
      for (int order = 2; order <= kReferenceMomentMax; ++order) {
        acc.moment_sums[order - 2] += p;
        p *= dev;
      }
    }
  }
  acc.attempts = sampler.diagnostics().attempts;
  return acc;
}

} // namespace

MarginalReference build_reference(int n, long long draws, int grid_size, std::uint64_t seed, int workers)
{
  if (n < 2)
    throw std::invalid_argument("build_reference requires n >= 2");
  if (grid_size < 2)
    throw std::invalid_argument("build_reference requires grid_size >= 2");

  MarginalReference ref;
  ref.n = n;
  ref.grid_size = grid_size;
  ref.cdf_values.resize(grid_size + 1);
  ref.density_values.resize(grid_size + 1);
  ref.central_moments.resize(kReferenceMomentMax - 1);
  ref.seed = seed;

  if (n <= kExactNMax) {
    const PiecewisePolynomialDensity density = marginal_density_exact(n);
    for (int j = 0; j <= grid_size; ++j) {
      const double u = static_cast<double>(j) / grid_size;
      ref.cdf_values[j] = density.cdf(u);
      ref.density_values[j] = density(u);
    }
    ref.cdf_values[0] = 0.0;
    ref.cdf_values[grid_size] = 1.0;
    for (int order = 2; order <= kReferenceMomentMax; ++order)
      ref.central_moments[order - 2] = density.central_moment(order);
    ref.source = ReferenceSource::exact;
    ref.draw_count = 0;
    return ref;
  }

  if (draws < 10LL * grid_size)
    throw std::invalid_argument("build_reference requires draws >= 10 * grid_size for simulated references");

  const long long num_chunks = (draws + kChunkDraws - 1) / kChunkDraws;
  std::vector<ChunkAccumulator> chunks(num_chunks);
  parallel_for(static_cast<std::size_t>(num_chunks), workers, [&](std::size_t c) {
    const long long start = static_cast<long long>(c) * kChunkDraws;
    const long long target = std::min(kChunkDraws, draws - start);
    chunks[c] = run_chunk(n, target, grid_size, derive_seed(seed, c));
  });

  // Merge in chunk order so the result is independent of scheduling.
  std::vector<long long> cells(grid_size, 0);
  std::vector<long long> hist(kHistogramBins, 0);
  std::array<double, kReferenceMomentMax - 1> moment_sums{};
  for (const auto& chunk : chunks) {
    for (int j = 0; j < grid_size; ++j)
      cells[j] += chunk.cdf_cells[j];
    for (int j = 0; j < kHistogramBins; ++j)
      hist[j] += chunk.hist[j];
    for (std::size_t j = 0; j < moment_sums.size(); ++j)
      moment_sums[j] += chunk.moment_sums[j];
  }

  const double pooled = static_cast<double>(draws) * n;
  long long running = 0;
  ref.cdf_values[0] = 0.0;
  for (int j = 1; j <= grid_size; ++j) {
    running += cells[j - 1];
    ref.cdf_values[j] = static_cast<double>(running) / pooled;
  }
  for (int j = 0; j <= grid_size; ++j) {
    const double u = static_cast<double>(j) / grid_size;
    int bin = std::min(static_cast<int>(u * kHistogramBins), kHistogramBins - 1);
    ref.density_values[j] = static_cast<double>(hist[bin]) * kHistogramBins / pooled;
  }
  for (std::size_t j = 0; j < moment_sums.size(); ++j)
    ref.central_moments[j] = moment_sums[j] / pooled;

  if (!(ref.central_moments[0] > 0.0 && ref.central_moments[0] <= 1.0 / 12.0 + 1e-9))
    throw std::runtime_error("build_reference: second moment outside (0, 1/12]");

  ref.source = ReferenceSource::simulated;
  ref.draw_count = draws;
  return ref;
}

double cdf_lookup(const MarginalReference& ref, double v, bool* clamped)
{
  if (clamped)
    *clamped = false;
  if (v < 0.0 || v > 1.0) {
    if (clamped)
      *clamped = true;
    v = std::clamp(v, 0.0, 1.0);
  }
  const double t = v * ref.grid_size;
  int j = std::min(static_cast<int>(t), ref.grid_size - 1);
  const double frac = t - j;
  return ref.cdf_values[j] + frac * (ref.cdf_values[j + 1] - ref.cdf_values[j]);
}

double uniform_central_moment(int order)
{
  if (order < 1)
    throw std::invalid_argument("uniform_central_moment requires order >= 1");
  if (order % 2 == 1)
    return 0.0;
  return std::pow(0.5, order) / (order + 1);
}

RateFit rate_regression(const std::vector<std::pair<double, double>>& moment_table, int order, double min_n)
{
  if (order < 2 || order % 2 != 0)
    throw std::invalid_argument("rate_regression requires an even order >= 2");
  const double m0 = uniform_central_moment(order);

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& [n, m_hat] : moment_table) {
    if (n < min_n)
      continue;
    if (m_hat >= m0)
      throw std::invalid_argument("rate_regression: moment deviation must be negative (m_hat < uniform moment) at n = " +
                                  std::to_string(n));
    lx.push_back(std::log10(n));
    ly.push_back(std::log10(m0 - m_hat));
  }
  if (lx.size() < 3)
    throw std::invalid_argument("rate_regression requires at least 3 points with n >= min_n");

  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0)
    throw std::invalid_argument("rate_regression: sample sizes must vary");

  RateFit fit;
  fit.order = order;
  fit.beta = sxy / sxx;
  fit.alpha = my - fit.beta * mx;
  fit.subsample_min_n = static_cast<int>(min_n);
  if (!std::isfinite(fit.beta) || !std::isfinite(fit.alpha))
    throw std::runtime_error("rate_regression: non-finite fit");
  return fit;
}

namespace {

nlohmann::json reference_to_json(const MarginalReference& ref)
{
  nlohmann::json j;
  j["format_version"] = kReferenceFormatVersion;
  j["n"] = ref.n;
  j["grid_size"] = ref.grid_size;
  j["draws"] = ref.draw_count;
  j["seed"] = ref.seed;
  j["source"] = ref.source == ReferenceSource::exact ? "exact" : "simulated";
  j["cdf_values"] = ref.cdf_values;
  j["density_values"] = ref.density_values;
  j["central_moments"] = ref.central_moments;
  return j;
}

MarginalReference reference_from_json(const nlohmann::json& j)
{
  if (!j.contains("format_version") || j["format_version"].get<int>() != kReferenceFormatVersion)
    throw std::runtime_error("reference file has an unsupported format version");
  MarginalReference ref;
  ref.n = j.at("n").get<int>();
  ref.grid_size = j.at("grid_size").get<int>();
  ref.draw_count = j.at("draws").get<long long>();
  ref.seed = j.at("seed").get<std::uint64_t>();
  ref.source = j.at("source").get<std::string>() == "exact" ? ReferenceSource::exact : ReferenceSource::simulated;
  ref.cdf_values = j.at("cdf_values").get<std::vector<double>>();
  ref.density_values = j.at("density_values").get<std::vector<double>>();
  ref.central_moments = j.at("central_moments").get<std::vector<double>>();
  if (static_cast<int>(ref.cdf_values.size()) != ref.grid_size + 1 ||
      static_cast<int>(ref.density_values.size()) != ref.grid_size + 1 ||
      static_cast<int>(ref.central_moments.size()) != kReferenceMomentMax - 1)
    throw std::runtime_error("reference file has inconsistent array sizes");
  return ref;
}

} // namespace

void save_reference(const MarginalReference& ref, const std::string& path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << reference_to_json(ref).dump(2) << '\n';
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

MarginalReference load_reference(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot open reference file " + path);
  nlohmann::json j;
  in >> j;
  return reference_from_json(j);
}

MarginalReference load_or_build_reference(int n, long long draws, int grid_size, std::uint64_t seed,
                                          const std::string& cache_dir, int workers)
{
  if (n <= kExactNMax)
    return build_reference(n, draws, grid_size, seed, workers); // exact path is cheap

  char name[160];
  std::snprintf(name, sizeof(name), "ref_n%d_d%lld_g%d_s%llu_v%d.json", n, draws, grid_size,
                static_cast<unsigned long long>(seed), kReferenceFormatVersion);
  const std::filesystem::path file = std::filesystem::path(cache_dir) / name;

  if (std::filesystem::exists(file)) {
    MarginalReference ref = load_reference(file.string());
    if (ref.n == n && ref.grid_size == grid_size && ref.draw_count == draws && ref.seed == seed)
      return ref;
  }

  MarginalReference ref = build_reference(n, draws, grid_size, seed, workers);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  save_reference(ref, file.string());
  return ref;
}

long long default_reference_draws(int n, int grid_size)
{
  const long long floor_draws = 10LL * grid_size;
  const long long budget = 20000000LL / std::max(1, n);
  return std::max(floor_draws, std::min<long long>(200000, budget));
}

} // namespace imaxent
