#pragma once

// Caratheodory-Pesin weight functions over cylinder covers of a shift and the
// pressures extracted from them.
//
// A cover of depth t is the partition of the space into the cylinders fixing
// the coordinates [0, t-1] (one-sided) or [-(t-1), t-1] (two-sided). A string
// of m cover elements has as its domain the cylinder of a word of length
// m + width - 1, so every weight below is computed by dynamic programming over
// words, keyed by the last few symbols and the position relative to Z.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cptherm/symbolic.hpp"

namespace cpt {

class Cover {
 public:
  Cover(const ShiftSystem& system, int depth);

  int depth() const noexcept { return depth_; }
  /// First fixed coordinate: 0 or -(depth - 1).
  int lo() const noexcept { return lo_; }
  /// Number of fixed coordinates.
  int width() const noexcept { return width_; }
  Sidedness sidedness() const noexcept { return sidedness_; }
  double diameter() const;

  /// The cylinders of the partition, in lexicographic order.
  std::vector<CylinderSet> elements(const ShiftSystem& system) const;

  /// max over elements of (sup phi - inf phi) on the element.
  double oscillation(const ShiftSystem& system, const Potential& phi) const;

 private:
  int depth_;
  int lo_;
  int width_;
  Sidedness sidedness_;
};

/// A string (U_{i_0}, ..., U_{i_{m-1}}) of cover elements with its domain
/// X(U) = intersection of f^{-j} U_{i_j} and the weights of the structure.
struct CoverString {
  std::vector<int> indices;
  CylinderSet domain;
  bool empty = true;
  double xi = 0.0;   ///< exp(sup over the domain of S_m phi)
  double eta = 0.0;  ///< exp(-m)
  double psi = 0.0;  ///< 1/m; carried with the structure, not used by any estimator

  int length() const noexcept { return static_cast<int>(indices.size()); }
};

/// Indices refer to cover.elements(system).
CoverString make_cover_string(const ShiftSystem& system, const Potential& phi, const Cover& cover,
                              const std::vector<int>& indices);

enum class EstimateMode { kPressure, kCapacityLower, kCapacityUpper };

std::string to_string(EstimateMode mode);

struct DiagnosticRow {
  int n = 0;
  double log_weight = 0.0;  ///< log Lambda_N (capacity) or log M_N (pressure)
  double slope = 0.0;       ///< increment over the previous row
};

struct PressureEstimate {
  double value = 0.0;
  int cover_depth = 0;
  int n_min = 0;
  int n_max = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  EstimateMode mode = EstimateMode::kPressure;
  bool degenerate = false;  ///< Z is empty; value is -infinity
  bool convergence_warning = false;
  std::vector<DiagnosticRow> diagnostics;
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;
};

/// log Lambda(Z, phi, U, N) for N = 1..n_max; -infinity when Z is empty.
std::vector<double> log_lambda_series(const ShiftSystem& system, const SubsetSpec& z,
                                      const Potential& phi, const Cover& cover, int n_max);

double log_lambda_n(const ShiftSystem& system, const SubsetSpec& z, const Potential& phi,
                    const Cover& cover, int n);

/// Lambda itself; overflows to +infinity for large N, use log_lambda_n there.
double lambda_n(const ShiftSystem& system, const SubsetSpec& z, const Potential& phi,
                const Cover& cover, int n);

/// Lower and upper capacity pressure over the window [n_max/2, n_max].
struct CapacityPair {
  PressureEstimate lower;
  PressureEstimate upper;
};

CapacityPair capacity_pressures(const ShiftSystem& system, const SubsetSpec& z,
                                const Potential& phi, const Cover& cover, int n_max = 30);

struct WeightM {
  double log_value = 0.0;  ///< log of the capped minimum (an upper bound)
  double log_lower = 0.0;  ///< certified lower bound; -infinity when none
  int depth_cap = 0;       ///< longest string length considered
  bool lower_certified = false;
};

/// M(Z, alpha, phi, U, N) minimized over antichains of strings with lengths in
/// [N, N + cap_offset].
WeightM weight_m(const ShiftSystem& system, const SubsetSpec& z, double alpha,
                 const Potential& phi, const Cover& cover, int n, int cap_offset = 8);

struct CriticalOptions {
  double tol = 1e-7;
  int n_max = 24;
  int cap_offset = 8;
  int max_probes = 200;
};

/// Bisection on the sign of the least-squares slope of log M(N) over
/// N in [n_max/2, n_max]. Throws kInconclusive when the slope signs do not
/// bracket a single crossing.
PressureEstimate critical_alpha(const ShiftSystem& system, const SubsetSpec& z,
                                const Potential& phi, const Cover& cover,
                                const CriticalOptions& options = {});

/// Ordinary least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Bisection on the sign of the least-squares slope of log_m(alpha) against
/// ns, starting from [lo, hi]. Shared by the shift and circle estimators;
/// fills value, bracket, diagnostics and metrics.
PressureEstimate bisect_critical(const std::function<std::vector<double>(double)>& log_m,
                                 const std::vector<double>& ns, double lo, double hi,
                                 double scale, const CriticalOptions& options);

struct DepthRow {
  int depth = 0;
  double value = 0.0;
  double delta = 0.0;        ///< change from the previous depth
  double oscillation = 0.0;  ///< gamma of the depth-t cover
};

struct RefinedPressure {
  PressureEstimate estimate;  ///< from the last depth
  std::vector<DepthRow> depths;
};

RefinedPressure pressure_refined(const ShiftSystem& system, const SubsetSpec& z,
                                 const Potential& phi, const std::vector<int>& depths,
                                 const CriticalOptions& options = {}, int jobs = 1);

}  // namespace cpt
