#include "imaxent/bandwidth.hpp"
#include "imaxent/data_io.hpp"
#include "imaxent/mixtures.hpp"
#include "imaxent/parallel.hpp"
#include "imaxent/permutohedron.hpp"
#include "imaxent/reference.hpp"
#include "imaxent/simulation.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace imaxent;

void write_text(const std::string& path, const std::string& content)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out)
    throw std::runtime_error("failed writing " + path);
}

std::string format_value(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

MarginalReference resolve_reference(const std::string& ref_arg, int n, long long draws, int grid,
                                    std::uint64_t seed, const std::string& cache_dir, int workers)
{
  if (ref_arg == "auto") {
    const long long d = draws > 0 ? draws : default_reference_draws(n, grid);
    return load_or_build_reference(n, d, grid, seed, cache_dir, workers);
  }
  MarginalReference ref = load_reference(ref_arg);
  if (ref.n != n)
    throw std::invalid_argument("reference file " + ref_arg + " is for n = " + std::to_string(ref.n) +
                                ", data has n = " + std::to_string(n));
  return ref;
}

nlohmann::json estimate_to_json(const BandwidthEstimate& est)
{
  nlohmann::json j;
  j["b"] = est.b;
  j["method"] = est.method;
  j["objective"] = est.objective_value;
  nlohmann::json minima = nlohmann::json::array();
  for (const auto& lm : est.all_local_minima) {
    nlohmann::json jm;
    jm["b"] = lm.b;
    jm["value"] = lm.value;
    jm["at_lower_edge"] = lm.at_lower_edge;
    jm["at_upper_edge"] = lm.at_upper_edge;
    minima.push_back(jm);
  }
  j["local_minima"] = minima;
  nlohmann::json flags = nlohmann::json::array();
  if (est.edge_minimum)
    flags.push_back("edge_minimum");
  j["flags"] = flags;
  j["diagnostics"] = { { "bracket_lo", est.bracket_lo },
                       { "bracket_hi", est.bracket_hi },
                       { "evaluations", est.evaluations },
                       { "b_global", est.b_global } };
  return j;
}

int run(int argc, char** argv)
{
  CLI::App app{ "Indirect maximum entropy bandwidth selection for kernel density and "
                "distribution function estimation" };
  app.require_subcommand(1);

  // reference build
  auto* ref_cmd = app.add_subcommand("reference", "Reference marginal tables");
  auto* ref_build = ref_cmd->add_subcommand("build", "Build and save a reference table");
  int rb_n = 0;
  long long rb_draws = 0;
  int rb_grid = 1000;
  std::uint64_t rb_seed = 12345;
  std::string rb_out;
  int rb_workers = 0;
  ref_build->add_option("--n", rb_n, "Sample size")->required();
  ref_build->add_option("--draws", rb_draws, "Accepted draws (ignored on the exact path; 0 = auto)");
  ref_build->add_option("--grid", rb_grid, "Grid size G (nodes j/G)");
  ref_build->add_option("--seed", rb_seed, "Master seed");
  ref_build->add_option("--out", rb_out, "Output JSON path")->required();
  ref_build->add_option("--workers", rb_workers, "Worker threads (0 = hardware)");

  // marginal
  auto* marginal_cmd = app.add_subcommand("marginal", "Emit the reference marginal density");
  int mg_n = 0;
  bool mg_exact = false;
  int mg_grid = 1000;
  long long mg_draws = 0;
  std::uint64_t mg_seed = 12345;
  std::string mg_out;
  int mg_workers = 0;
  marginal_cmd->add_option("--n", mg_n, "Sample size")->required();
  marginal_cmd->add_flag("--exact", mg_exact, "Use the exact piecewise polynomial (n <= 9) and emit its pieces");
  marginal_cmd->add_option("--grid", mg_grid, "Grid size");
  marginal_cmd->add_option("--draws", mg_draws, "Accepted draws for simulated marginals (0 = auto)");
  marginal_cmd->add_option("--seed", mg_seed, "Master seed for simulated marginals");
  marginal_cmd->add_option("--out", mg_out, "Output CSV path")->required();
  marginal_cmd->add_option("--workers", mg_workers, "Worker threads");

  // bandwidth
  auto* bw_cmd = app.add_subcommand("bandwidth", "Select a bandwidth for a data file");
  std::string bw_input;
  int bw_column = -1;
  std::string bw_method = "ad";
  std::string bw_kernel = "gaussian";
  std::string bw_ref = "auto";
  std::uint64_t bw_seed = 12345;
  std::string bw_out;
  long long bw_draws = 0;
  int bw_grid = 1000;
  std::string bw_cache = "imaxent_cache";
  int bw_workers = 0;
  bw_cmd->add_option("--input", bw_input, "Data file (one value per line, or CSV)")->required();
  bw_cmd->add_option("--column", bw_column, "Zero-based CSV column");
  bw_cmd->add_option("--method", bw_method, "ad[:EPS] | cvm:ALPHA[:EPS] | ns:R | cue:R | m2 | cv");
  bw_cmd->add_option("--kernel", bw_kernel, "gaussian | epanechnikov");
  bw_cmd->add_option("--ref", bw_ref, "Reference table path, or 'auto'");
  bw_cmd->add_option("--seed", bw_seed, "Seed for auto-built references");
  bw_cmd->add_option("--out", bw_out, "Output JSON path (stdout when omitted)");
  bw_cmd->add_option("--draws", bw_draws, "Accepted draws for auto references (0 = auto)");
  bw_cmd->add_option("--grid", bw_grid, "Grid size for auto references");
  bw_cmd->add_option("--cache-dir", bw_cache, "Reference cache directory");
  bw_cmd->add_option("--workers", bw_workers, "Worker threads");

  // mise
  auto* mise_cmd = app.add_subcommand("mise", "Exact MISE-minimizing benchmark bandwidths");
  int ms_density = 1;
  int ms_n = 100;
  std::string ms_kernel = "gaussian";
  std::string ms_out;
  mise_cmd->add_option("--density", ms_density, "Mixture id 1..6")->required();
  mise_cmd->add_option("--n", ms_n, "Sample size")->required();
  mise_cmd->add_option("--kernel", ms_kernel, "Kernel (gaussian only)");
  mise_cmd->add_option("--out", ms_out, "Output JSON path (stdout when omitted)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Seeded Monte Carlo study of the selectors");
  int sm_density = 1;
  int sm_n = 100;
  int sm_reps = 500;
  std::string sm_methods = "ad,ns:2,ns:4";
  std::string sm_kernel = "gaussian";
  std::uint64_t sm_seed = 12345;
  int sm_workers = 0;
  std::string sm_out;
  std::string sm_ref = "auto";
  long long sm_draws = 0;
  int sm_grid = 1000;
  std::string sm_cache = "imaxent_cache";
  sim_cmd->add_option("--density", sm_density, "Mixture id 1..6")->required();
  sim_cmd->add_option("--n", sm_n, "Sample size")->required();
  sim_cmd->add_option("--reps", sm_reps, "Replications");
  sim_cmd->add_option("--methods", sm_methods, "Comma-separated method list");
  sim_cmd->add_option("--kernel", sm_kernel, "gaussian | epanechnikov");
  sim_cmd->add_option("--seed", sm_seed, "Master seed");
  sim_cmd->add_option("--workers", sm_workers, "Worker threads (0 = hardware)");
  sim_cmd->add_option("--out", sm_out, "Output directory")->required();
  sim_cmd->add_option("--ref", sm_ref, "Reference table path, or 'auto'");
  sim_cmd->add_option("--draws", sm_draws, "Accepted draws for auto references (0 = auto)");
  sim_cmd->add_option("--grid", sm_grid, "Grid size for auto references");
  sim_cmd->add_option("--cache-dir", sm_cache, "Reference cache directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e); // prints the message or help text
    return code == 0 ? 0 : 2;
  }

  if (ref_build->parsed()) {
    const long long draws = rb_draws > 0 ? rb_draws : default_reference_draws(rb_n, rb_grid);
    const MarginalReference ref = build_reference(rb_n, draws, rb_grid, rb_seed, rb_workers);
    save_reference(ref, rb_out);
    std::cout << "reference for n = " << rb_n << " written to " << rb_out << "\n";
    return 0;
  }

  if (marginal_cmd->parsed()) {
    std::string csv = "u,l_n_u\n";
    if (mg_exact) {
      const PiecewisePolynomialDensity density = marginal_density_exact(mg_n);
      for (int j = 0; j <= mg_grid; ++j) {
        const double u = static_cast<double>(j) / mg_grid;
        csv += format_value(u) + "," + format_value(density(u)) + "\n";
      }
      nlohmann::json pieces = nlohmann::json::array();
      for (const auto& piece : density.pieces)
        pieces.push_back({ { "lo", piece.lo }, { "hi", piece.hi }, { "coeffs", piece.coeffs } });
      nlohmann::json j;
      j["n"] = mg_n;
      j["pieces"] = pieces;
      write_text(mg_out + ".pieces.json", j.dump(2) + "\n");
    } else {
      const long long draws = mg_draws > 0 ? mg_draws : default_reference_draws(mg_n, mg_grid);
      const MarginalReference ref = build_reference(mg_n, draws, mg_grid, mg_seed, mg_workers);
      for (int j = 0; j <= mg_grid; ++j) {
        const double u = static_cast<double>(j) / mg_grid;
        csv += format_value(u) + "," + format_value(ref.density_values[j]) + "\n";
      }
    }
    write_text(mg_out, csv);
    return 0;
  }

  if (bw_cmd->parsed()) {
    const Sample sample(load_observations(bw_input, bw_column));
    const KernelModel kernel = KernelModel::by_name(bw_kernel);
    const MethodSpec method = MethodSpec::parse(bw_method);
    const MarginalReference ref =
      resolve_reference(bw_ref, sample.n(), bw_draws, bw_grid, bw_seed, bw_cache, bw_workers);
    const BandwidthEstimate est = select(method, sample, ref, kernel);
    const std::string text = estimate_to_json(est).dump(2) + "\n";
    if (bw_out.empty())
      std::cout << text;
    else
      write_text(bw_out, text);
    return 0;
  }

  if (mise_cmd->parsed()) {
    const MixtureModel model = mixture(ms_density);
    const MiseBandwidths mise = min_mise_bandwidths(model, ms_n, KernelModel::by_name(ms_kernel));
    nlohmann::json j;
    j["b_kde"] = mise.b_kde;
    j["b_kdfe"] = mise.b_kdfe;
    j["mise_kde"] = mise.mise_kde;
    j["mise_kdfe"] = mise.mise_kdfe;
    const std::string text = j.dump(2) + "\n";
    if (ms_out.empty())
      std::cout << text;
    else
      write_text(ms_out, text);
    return 0;
  }

  if (sim_cmd->parsed()) {
    SimConfig config;
    config.density_id = sm_density;
    config.n = sm_n;
    config.replications = sm_reps;
    config.kernel = sm_kernel;
    config.master_seed = sm_seed;
    config.workers = sm_workers;
    std::stringstream ss(sm_methods);
    std::string token;
    while (std::getline(ss, token, ','))
      if (!token.empty())
        config.methods.push_back(MethodSpec::parse(token));
    const MarginalReference ref =
      resolve_reference(sm_ref, sm_n, sm_draws, sm_grid, sm_seed, sm_cache, sm_workers);
    const SimResult result = run_simulation(config, ref);
    emit(result, EmitFormat::csv, sm_out);
    emit(result, EmitFormat::json, sm_out);
    std::cout << "simulation outputs written to " << sm_out << "\n";
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
