#include "imaxent/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace imaxent {

MethodSpec MethodSpec::parse(const std::string& text)
{
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':'))
    parts.push_back(part);
  if (parts.empty())
    throw std::invalid_argument("empty method specifier");

  MethodSpec spec;
  const std::string& head = parts[0];
  try {
    if (head == "ad") {
      spec.kind = Kind::ad;
      if (parts.size() > 2)
        throw std::invalid_argument("");
      if (parts.size() == 2)
        spec.eps = std::stod(parts[1]);
    } else if (head == "cvm") {
      spec.kind = Kind::cvm;
      if (parts.size() < 2 || parts.size() > 3)
        throw std::invalid_argument("");
      spec.alpha = std::stod(parts[1]);
      if (parts.size() == 3)
        spec.eps = std::stod(parts[2]);
    } else if (head == "ns") {
      spec.kind = Kind::ns;
      if (parts.size() != 2)
        throw std::invalid_argument("");
      spec.r = std::stoi(parts[1]);
    } else if (head == "cue") {
      spec.kind = Kind::cue;
      if (parts.size() != 2)
        throw std::invalid_argument("");
      spec.r = std::stoi(parts[1]);
    } else if (head == "m2") {
      spec.kind = Kind::m2_gaussian;
    } else if (head == "cv") {
      spec.kind = Kind::cv_sarda;
    } else {
      throw std::invalid_argument("");
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("unrecognized method '" + text +
                                "'; expected ad[:EPS], cvm:ALPHA[:EPS], ns:R, cue:R, m2 or cv");
  }
  if (spec.kind == Kind::cvm && spec.alpha == 0.0) {
    spec.kind = Kind::ad; // the alpha = 0 weight is the Anderson-Darling criterion
  }
  if ((spec.kind == Kind::ns || spec.kind == Kind::cue) && spec.r < 2)
    throw std::invalid_argument("method '" + text + "' requires r >= 2");
  if (spec.eps < 0.0 || spec.eps >= 0.5)
    throw std::invalid_argument("method '" + text + "' requires 0 <= eps < 1/2");
  return spec;
}

std::string MethodSpec::name() const
{
  std::ostringstream out;
  switch (kind) {
  case Kind::ad:
    out << "ad";
    break;
  case Kind::cvm:
    out << "cvm:" << alpha << ":" << eps;
    break;
  case Kind::ns:
    out << "ns:" << r;
    break;
  case Kind::cue:
    out << "cue:" << r;
    break;
  case Kind::m2_gaussian:
    out << "m2";
    break;
  case Kind::cv_sarda:
    out << "cv";
    break;
  }
  return out.str();
}

std::vector<std::pair<double, double>> profile(const std::function<double(double)>& criterion,
                                               const std::vector<double>& b_grid)
{
  if (b_grid.empty())
    throw std::invalid_argument("profile requires a non-empty bandwidth grid");
  for (std::size_t i = 0; i + 1 < b_grid.size(); ++i)
    if (!(b_grid[i] < b_grid[i + 1]) || !(b_grid[i] > 0.0))
      throw std::invalid_argument("profile requires a strictly increasing positive grid");
  std::vector<std::pair<double, double>> out;
  out.reserve(b_grid.size());
  for (double b : b_grid)
    out.emplace_back(b, criterion(b));
  return out;
}

namespace {

constexpr double kGolden = 0.61803398874989484820;

double guarded(const std::function<double(double)>& f, double b, int& evaluations)
{
  ++evaluations;
  try {
    const double v = f(b);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const std::exception&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

// NaN-aware comparison: NaN counts as +infinity.
bool less_value(double a, double b)
{
  if (std::isnan(a))
    return false;
  if (std::isnan(b))
    return true;
  return a < b;
}

struct GoldenResult
{
  double b;
  double value;
};

GoldenResult golden_refine(const std::function<double(double)>& f, double lo, double hi, double tol,
                           int& evaluations)
{
  double a = lo;
  double b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = guarded(f, c, evaluations);
  double fd = guarded(f, d, evaluations);
  for (int iter = 0; iter < 200 && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b)); ++iter) {
    if (less_value(fc, fd)) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = guarded(f, c, evaluations);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = guarded(f, d, evaluations);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = guarded(f, mid, evaluations);
  GoldenResult best{ mid, fmid };
  if (less_value(fc, best.value))
    best = { c, fc };
  if (less_value(fd, best.value))
    best = { d, fd };
  return best;
}

} // namespace

BandwidthEstimate minimize(const std::function<double(double)>& criterion, double b_lo, double b_hi,
                           int grid_points, double tol)
{
  if (!(b_lo > 0.0) || !(b_hi > b_lo))
    throw std::invalid_argument("minimize requires 0 < b_lo < b_hi");
  if (grid_points < 16)
    throw std::invalid_argument("minimize requires at least 16 scan points");
  if (!(tol > 0.0))
    throw std::invalid_argument("minimize requires tol > 0");

  BandwidthEstimate est;
  est.bracket_lo = b_lo;
  est.bracket_hi = b_hi;

  std::vector<double> grid(grid_points);
  const double ratio = std::log(b_hi / b_lo);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = b_lo * std::exp(ratio * i / (grid_points - 1));

  std::vector<double> values(grid_points);
  int non_finite = 0;
  for (int i = 0; i < grid_points; ++i) {
    values[i] = guarded(criterion, grid[i], est.evaluations);
    if (std::isnan(values[i]))
      ++non_finite;
  }
  if (non_finite > grid_points / 2)
    throw std::runtime_error("criterion is non-finite on more than half of the scan grid");

  // every grid-local minimum, refined within its neighbouring brackets
  for (int i = 0; i < grid_points; ++i) {
    if (std::isnan(values[i]))
      continue;
    const bool left_ok = i == 0 || !less_value(values[i - 1], values[i]);
    const bool right_ok = i == grid_points - 1 || !less_value(values[i + 1], values[i]);
    if (!(left_ok && right_ok))
      continue;
    // flat plateaus: keep only the leftmost point
    if (i > 0 && values[i - 1] == values[i])
      continue;

    LocalMinimum lm;
    lm.at_lower_edge = i == 0;
    lm.at_upper_edge = i == grid_points - 1;
    if (lm.at_lower_edge || lm.at_upper_edge) {
      lm.b = grid[i];
      lm.value = values[i];
    } else {
      const GoldenResult refined = golden_refine(criterion, grid[i - 1], grid[i + 1], tol, est.evaluations);
      if (less_value(refined.value, values[i])) {
        lm.b = refined.b;
        lm.value = refined.value;
      } else {
        lm.b = grid[i];
        lm.value = values[i];
      }
    }
    est.all_local_minima.push_back(lm);
  }

  if (est.all_local_minima.empty())
    throw std::runtime_error("no finite local minimum found on the scan grid");

  const auto global = std::min_element(est.all_local_minima.begin(), est.all_local_minima.end(),
                                       [](const LocalMinimum& a, const LocalMinimum& b) {
                                         return less_value(a.value, b.value);
                                       });
  est.b = global->b;
  est.objective_value = global->value;
  est.b_global = global->b;
  est.objective_global = global->value;
  est.edge_minimum = global->at_lower_edge;
  return est;
}

namespace {

// the windowed path cuts the cost of scans over large samples; equivalence
// with the direct sum is tested to 1e-10
PitVector scan_pits(const Sample& sample, const KernelModel& kernel, double b)
{
  if (kernel.is_gaussian() && b > 0.0)
    return loo_pits_gaussian_fast(sample, b);
  return loo_pits(sample, kernel, b);
}

std::function<double(double)> make_criterion(const MethodSpec& method, const Sample& sample,
                                             const MarginalReference& ref, const KernelModel& kernel)
{
  switch (method.kind) {
  case MethodSpec::Kind::ad:
    return [&sample, &ref, &kernel, eps = method.eps](double b) {
      int clamped = 0;
      const TransformedPits u = transform_pits(scan_pits(sample, kernel, b), ref);
      return anderson_darling(u, eps, &clamped);
    };
  case MethodSpec::Kind::cvm:
    return [&sample, &ref, &kernel, w = CvMWeight{ method.alpha, method.alpha, method.eps }](double b) {
      const TransformedPits u = transform_pits(scan_pits(sample, kernel, b), ref);
      return cvm_beta(u, w);
    };
  case MethodSpec::Kind::ns:
    return [&sample, &ref, &kernel, r = method.r](double b) {
      const TransformedPits u = transform_pits(scan_pits(sample, kernel, b), ref);
      return neyman_statistic(u, r);
    };
  case MethodSpec::Kind::cue:
    return [&sample, &ref, &kernel, r = method.r](double b) {
      return cue_objective(scan_pits(sample, kernel, b), ref, r);
    };
  case MethodSpec::Kind::cv_sarda:
    return [&sample, &kernel](double b) { return sarda_cv(sample, kernel, b); };
  case MethodSpec::Kind::m2_gaussian:
    break;
  }
  throw std::logic_error("make_criterion: method has no scan criterion");
}

} // namespace

BandwidthEstimate select(const MethodSpec& method, const Sample& sample, const MarginalReference& ref,
                         const KernelModel& kernel, const SelectOptions& options)
{
  if (ref.n != sample.n())
    throw std::invalid_argument("reference is for n = " + std::to_string(ref.n) + ", sample has n = " +
                                std::to_string(sample.n()));

  if (method.kind == MethodSpec::Kind::m2_gaussian) {
    BandwidthEstimate est;
    est.method = method.name();
    est.b = m2_gaussian_bandwidth(sample.n(), ref);
    est.b_global = est.b;
    est.objective_value = std::abs(gaussian_var_v1(sample.n(), est.b) - ref.m(2));
    est.objective_global = est.objective_value;
    est.bracket_lo = est.bracket_hi = est.b;
    est.all_local_minima.push_back({ est.b, est.objective_value, false, false });
    return est;
  }

  double lo = options.bracket_lo;
  double hi = options.bracket_hi;
  if (lo <= 0.0)
    lo = 0.05 * sample.stddev() / sample.n();
  if (hi <= 0.0)
    hi = 3.0 * (sample.max() - sample.min());
  if (!(lo > 0.0) || !(hi > lo)) // degenerate samples (all values equal)
    throw std::invalid_argument("cannot form a bandwidth bracket for this sample; supply one explicitly");

  const auto criterion = make_criterion(method, sample, ref, kernel);
  BandwidthEstimate est = minimize(criterion, lo, hi, options.grid_points, options.tol);
  est.method = method.name();

  if (est.edge_minimum) {
    // documented pathology: a spurious minimum at b -> 0 can win for
    // strongly skewed data; report the interior minimum alongside it
    const LocalMinimum* interior = nullptr;
    for (const auto& lm : est.all_local_minima)
      if (!lm.at_lower_edge && (!interior || lm.b > interior->b))
        interior = &lm;
    if (interior) {
      est.b = interior->b;
      est.objective_value = interior->value;
    }
  }
  return est;
}

double m2_gaussian_bandwidth(int n, const MarginalReference& ref)
{
  if (ref.n != n)
    throw std::invalid_argument("reference/sample size mismatch in m2_gaussian_bandwidth");
  const double target = ref.m(2);

  double lo = 1e-6;
  double hi = 1e3;
  const double f_lo = gaussian_var_v1(n, lo);
  const double f_hi = gaussian_var_v1(n, hi);
  if (!(f_lo >= target && target >= f_hi))
    throw std::invalid_argument("m_{2,n} lies outside the range of Var V_1(b) on the bisection bracket");

  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * std::max(1.0, lo); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_var_v1(n, mid) >= target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace imaxent
