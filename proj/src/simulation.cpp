#include "imaxent/simulation.hpp"

#include "imaxent/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace imaxent {

double quantile_linear(const std::vector<double>& sorted_values, double p)
{
  if (sorted_values.empty())
    throw std::invalid_argument("quantile of an empty vector");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("quantile probability must lie in [0, 1]");
  const std::size_t m = sorted_values.size();
  if (m == 1)
    return sorted_values[0];
  const double h = p * (m - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= m)
    return sorted_values[m - 1];
  const double frac = h - lo;
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

namespace {

MethodSummary summarize(const std::string& name, std::vector<double> draws)
{
  std::sort(draws.begin(), draws.end());
  MethodSummary s;
  s.method = name;
  for (std::size_t q = 0; q < kSummaryProbs.size(); ++q)
    s.quantiles[q] = quantile_linear(draws, kSummaryProbs[q]);
  double mean = 0.0;
  for (double d : draws)
    mean += d;
  mean /= draws.size();
  double ss = 0.0;
  for (double d : draws)
    ss += (d - mean) * (d - mean);
  s.mean = mean;
  s.sd = draws.size() > 1 ? std::sqrt(ss / (draws.size() - 1)) : 0.0;
  return s;
}

} // namespace

PitHistogram pit_marginal_histogram(const std::vector<PitVector>& pits, const MarginalReference& ref, int bins)
{
  if (pits.empty())
    throw std::invalid_argument("pit_marginal_histogram requires at least one replication");
  if (bins < 2)
    throw std::invalid_argument("pit_marginal_histogram requires bins >= 2");
  const double b = pits.front().b;
  const std::size_t n = pits.front().v.size();
  for (const auto& p : pits)
    if (p.b != b || p.v.size() != n)
      throw std::invalid_argument("pit_marginal_histogram requires a fixed bandwidth and sample size");

  PitHistogram hist;
  hist.b = b;
  hist.bins = bins;
  hist.density.assign(bins, 0.0);
  hist.ref_density.assign(bins, 0.0);

  long long total = 0;
  for (const auto& p : pits) {
    for (double v : p.v) {
      const int bin = std::min(static_cast<int>(v * bins), bins - 1);
      hist.density[bin] += 1.0;
      ++total;
    }
  }
  for (int k = 0; k < bins; ++k) {
    hist.density[k] = hist.density[k] * bins / static_cast<double>(total);
    const double lo = static_cast<double>(k) / bins;
    const double hi = static_cast<double>(k + 1) / bins;
    hist.ref_density[k] = (cdf_lookup(ref, hi) - cdf_lookup(ref, lo)) * bins;
  }
  return hist;
}

SimResult run_simulation(const SimConfig& config, const MarginalReference& ref)
{
  if (config.replications < 1)
    throw std::invalid_argument("run_simulation requires replications >= 1");
  if (ref.n != config.n)
    throw std::invalid_argument("reference is for n = " + std::to_string(ref.n) +
                                ", simulation uses n = " + std::to_string(config.n));

  const KernelModel kernel = KernelModel::by_name(config.kernel);
  const MixtureModel model = mixture(config.density_id);
  const std::size_t nmethods = config.methods.size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);

  SimResult result;
  result.density_id = config.density_id;
  result.n = config.n;
  result.replications = config.replications;
  result.master_seed = config.master_seed;
  for (const auto& m : config.methods)
    result.methods.push_back(m.name());
  result.draws.assign(nmethods, std::vector<double>(reps, 0.0));

  // replication-level parallelism; every output cell is owned by one task
  parallel_for(reps, config.workers, [&](std::size_t r) {
    Rng rng(derive_seed(config.master_seed, r));
    const Sample sample = mixture_sample(model, config.n, rng);
    for (std::size_t m = 0; m < nmethods; ++m) {
      const BandwidthEstimate est = select(config.methods[m], sample, ref, kernel, config.select_options);
      result.draws[m][r] = est.b;
    }
  });

  for (std::size_t m = 0; m < nmethods; ++m)
    result.summary.push_back(summarize(result.methods[m], result.draws[m]));

  // pooled PIT histograms at each method's median bandwidth; the samples are
  // regenerated from the same substreams
  for (std::size_t m = 0; m < nmethods; ++m) {
    const double b_median = result.summary[m].quantiles[3];
    std::vector<PitVector> pooled(reps);
    parallel_for(reps, config.workers, [&](std::size_t r) {
      Rng rng(derive_seed(config.master_seed, r));
      const Sample sample = mixture_sample(model, config.n, rng);
      pooled[r] = loo_pits(sample, kernel, b_median);
    });
    PitHistogram hist = pit_marginal_histogram(pooled, ref, config.pit_histogram_bins);
    hist.method = result.methods[m];
    result.pit_histograms.push_back(std::move(hist));
  }

  return result;
}

namespace {

void append_csv_value(std::string& out, double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

} // namespace

std::string summary_csv(const SimResult& result)
{
  std::string out = "method,min,p025,q1,median,q3,p975,max,mean,sd\n";
  for (const auto& s : result.summary) {
    out += s.method;
    for (double q : s.quantiles) {
      out += ',';
      append_csv_value(out, q);
    }
    out += ',';
    append_csv_value(out, s.mean);
    out += ',';
    append_csv_value(out, s.sd);
    out += '\n';
  }
  return out;
}

std::string draws_csv(const SimResult& result)
{
  std::string out = "replication";
  for (const auto& m : result.methods) {
    out += ',';
    out += m;
  }
  out += '\n';
  for (int r = 0; r < result.replications; ++r) {
    out += std::to_string(r);
    for (const auto& column : result.draws) {
      out += ',';
      append_csv_value(out, column[r]);
    }
    out += '\n';
  }
  if (result.methods.empty())
    out = "replication\n"; // header-only
  return out;
}

std::string pit_hist_csv(const SimResult& result)
{
  std::string out = "method,b,bin_lo,bin_hi,density,ref_density\n";
  for (const auto& h : result.pit_histograms) {
    for (int k = 0; k < h.bins; ++k) {
      out += h.method;
      out += ',';
      append_csv_value(out, h.b);
      out += ',';
      append_csv_value(out, static_cast<double>(k) / h.bins);
      out += ',';
      append_csv_value(out, static_cast<double>(k + 1) / h.bins);
      out += ',';
      append_csv_value(out, h.density[k]);
      out += ',';
      append_csv_value(out, h.ref_density[k]);
      out += '\n';
    }
  }
  return out;
}

namespace {

nlohmann::json result_to_json(const SimResult& result)
{
  nlohmann::json j;
  j["density_id"] = result.density_id;
  j["n"] = result.n;
  j["replications"] = result.replications;
  j["master_seed"] = result.master_seed;
  j["methods"] = result.methods;
  j["draws"] = result.draws;
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : result.summary) {
    nlohmann::json js;
    js["method"] = s.method;
    js["quantiles"] = s.quantiles;
    js["mean"] = s.mean;
    js["sd"] = s.sd;
    summaries.push_back(js);
  }
  j["summary"] = summaries;
  nlohmann::json hists = nlohmann::json::array();
  for (const auto& h : result.pit_histograms) {
    nlohmann::json jh;
    jh["method"] = h.method;
    jh["b"] = h.b;
    jh["bins"] = h.bins;
    jh["density"] = h.density;
    jh["ref_density"] = h.ref_density;
    hists.push_back(jh);
  }
  j["pit_histograms"] = hists;
  return j;
}

SimResult result_from_json(const nlohmann::json& j)
{
  SimResult result;
  result.density_id = j.at("density_id").get<int>();
  result.n = j.at("n").get<int>();
  result.replications = j.at("replications").get<int>();
  result.master_seed = j.at("master_seed").get<std::uint64_t>();
  result.methods = j.at("methods").get<std::vector<std::string>>();
  result.draws = j.at("draws").get<std::vector<std::vector<double>>>();
  for (const auto& js : j.at("summary")) {
    MethodSummary s;
    s.method = js.at("method").get<std::string>();
    const auto q = js.at("quantiles").get<std::vector<double>>();
    if (q.size() != s.quantiles.size())
      throw std::runtime_error("summary quantile vector has the wrong length");
    std::copy(q.begin(), q.end(), s.quantiles.begin());
    s.mean = js.at("mean").get<double>();
    s.sd = js.at("sd").get<double>();
    result.summary.push_back(std::move(s));
  }
  for (const auto& jh : j.at("pit_histograms")) {
    PitHistogram h;
    h.method = jh.at("method").get<std::string>();
    h.b = jh.at("b").get<double>();
    h.bins = jh.at("bins").get<int>();
    h.density = jh.at("density").get<std::vector<double>>();
    h.ref_density = jh.at("ref_density").get<std::vector<double>>();
    result.pit_histograms.push_back(std::move(h));
  }
  return result;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out)
    throw std::runtime_error("failed writing " + path.string());
}

} // namespace

std::string to_json_string(const SimResult& result)
{
  return result_to_json(result).dump(2) + "\n";
}

SimResult from_json_string(const std::string& text)
{
  return result_from_json(nlohmann::json::parse(text));
}

void emit(const SimResult& result, EmitFormat format, const std::string& directory)
{
  const std::filesystem::path dir(directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (format == EmitFormat::csv) {
    write_file(dir / "summary.csv", summary_csv(result));
    write_file(dir / "draws.csv", draws_csv(result));
    write_file(dir / "pit_hist.csv", pit_hist_csv(result));
  } else {
    write_file(dir / "result.json", to_json_string(result));
  }
}

} // namespace imaxent
