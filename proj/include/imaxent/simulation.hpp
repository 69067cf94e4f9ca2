#pragma once

#include "imaxent/bandwidth.hpp"
#include "imaxent/mixtures.hpp"
#include "imaxent/reference.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace imaxent {

struct SimConfig
{
  int density_id{ 1 };
  int n{ 100 };
  int replications{ 500 };
  std::vector<MethodSpec> methods;
  std::string kernel{ "gaussian" };
  std::uint64_t master_seed{ 12345 };
  int workers{ 0 }; // 0 = hardware default
  SelectOptions select_options{};
  int pit_histogram_bins{ 50 };
};

//! Quantile by linear interpolation between order statistics (the
//! "order-statistic interpolation" rule: h = p (m - 1)).
double quantile_linear(const std::vector<double>& sorted_values, double p);

inline constexpr std::array<double, 7> kSummaryProbs{ 0.0, 0.025, 0.25, 0.5, 0.75, 0.975, 1.0 };

struct MethodSummary
{
  std::string method;
  std::array<double, 7> quantiles{};
  double mean{ 0.0 };
  double sd{ 0.0 };
};

struct PitHistogram
{
  std::string method;
  double b{ 0.0 };
  int bins{ 50 };
  std::vector<double> density;     // per-bin density-normalized heights
  std::vector<double> ref_density; // reference marginal averaged over each bin
};

struct SimResult
{
  int density_id{ 0 };
  int n{ 0 };
  int replications{ 0 };
  std::uint64_t master_seed{ 0 };
  std::vector<std::string> methods;
  std::vector<std::vector<double>> draws; // [method][replication]
  std::vector<MethodSummary> summary;
  std::vector<PitHistogram> pit_histograms;
};

//! Runs the seeded experiment: per replication a fresh sample from the
//! configured mixture, every method evaluated on the same sample. The result
//! is a deterministic function of the config and reference, independent of
//! the worker count.
SimResult run_simulation(const SimConfig& config, const MarginalReference& ref);

//! Pools the PIT values of all replications at one fixed bandwidth into a
//! density-normalized histogram with the reference marginal overlay.
PitHistogram pit_marginal_histogram(const std::vector<PitVector>& pits, const MarginalReference& ref,
                                    int bins = 50);

enum class EmitFormat
{
  csv,
  json
};

//! Writes summary.csv, draws.csv and pit_hist.csv (csv) or result.json
//! (json) under the given directory.
void emit(const SimResult& result, EmitFormat format, const std::string& directory);

std::string to_json_string(const SimResult& result);
SimResult from_json_string(const std::string& text);

std::string summary_csv(const SimResult& result);
std::string draws_csv(const SimResult& result);
std::string pit_hist_csv(const SimResult& result);

} // namespace imaxent
