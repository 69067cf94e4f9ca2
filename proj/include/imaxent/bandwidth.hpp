#pragma once

#include "imaxent/criteria.hpp"
#include "imaxent/kernels.hpp"
#include "imaxent/reference.hpp"

#include <functional>
#include <string>
#include <vector>

namespace imaxent {

//! Bandwidth selection method. Parsed from strings of the form
//! "ad", "cvm:ALPHA[:EPS]", "ns:R", "cue:R", "m2", "cv".
struct MethodSpec
{
  enum class Kind
  {
    ad,
    cvm,
    ns,
    cue,
    m2_gaussian,
    cv_sarda
  };

  Kind kind{ Kind::ad };
  double alpha{ 0.0 };
  double eps{ 1e-3 };
  int r{ 2 };

  static MethodSpec parse(const std::string& text);
  std::string name() const;
};

struct LocalMinimum
{
  double b{ 0.0 };
  double value{ 0.0 };
  bool at_lower_edge{ false };
  bool at_upper_edge{ false };
};

struct BandwidthEstimate
{
  double b{ 0.0 };
  std::string method;
  double objective_value{ 0.0 };
  std::vector<LocalMinimum> all_local_minima;
  double bracket_lo{ 0.0 };
  double bracket_hi{ 0.0 };
  int evaluations{ 0 };
  //! true when the scanned global minimum sits at the lower bracket edge
  bool edge_minimum{ false };
  //! raw global minimizer before the edge-minimum policy
  double b_global{ 0.0 };
  double objective_global{ 0.0 };
};

//! Criterion values over an explicit bandwidth grid.
std::vector<std::pair<double, double>> profile(const std::function<double(double)>& criterion,
                                               const std::vector<double>& b_grid);

//! Coarse log-spaced scan over [b_lo, b_hi] followed by golden-section
//! refinement of every local minimum; the global minimum is returned with
//! all local minima so callers can detect the spurious minimum at small b.
BandwidthEstimate minimize(const std::function<double(double)>& criterion, double b_lo, double b_hi,
                           int grid_points, double tol);

struct SelectOptions
{
  double bracket_lo{ 0.0 }; // 0 = automatic
  double bracket_hi{ 0.0 }; // 0 = automatic
  int grid_points{ 64 };
  double tol{ 1e-6 };
};

//! Composes leave-one-out PITs, the reference transform and the requested
//! criterion, then minimizes over the bandwidth. When the global minimum is
//! flagged at the lower edge, the estimate falls back to the interior local
//! minimum with the largest bandwidth (if any) and keeps the flag.
BandwidthEstimate select(const MethodSpec& method, const Sample& sample, const MarginalReference& ref,
                         const KernelModel& kernel, const SelectOptions& options = {});

//! Solves Var V_1(b) = m_{2,n} for standard normal data and kernel by
//! bisection on the strictly decreasing closed form.
double m2_gaussian_bandwidth(int n, const MarginalReference& ref);

} // namespace imaxent
