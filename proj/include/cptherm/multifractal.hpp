#pragma once

// Entropy spectrum of an equilibrium state: T(q) = P(q phi) - q P(phi), the
// local-entropy exponents alpha(q) = -T'(q), E(alpha(q)) = T(q) + q alpha(q),
// and the correlation (Renyi) entropies -T(q)/(q-1).

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "cptherm/symbolic.hpp"
#include "cptherm/thermo.hpp"

namespace cpt {

struct TQCurve {
  std::vector<double> q;
  std::vector<double> t;
  std::vector<double> alpha;     ///< P(phi) - int phi dmu_q
  std::vector<double> spectrum;  ///< T + q alpha
  double pressure = 0.0;         ///< P(phi)
  double entropy = 0.0;          ///< h(f) = P(0)

  // Invariant defects, filled by t_curve.
  double min_second_difference = 0.0;  ///< smallest divided second difference of T
  double alpha_increase = 0.0;         ///< largest rise of alpha between grid points
};

/// q must be sorted strictly increasing.
TQCurve t_curve(const ShiftSystem& system, const Potential& phi, const std::vector<double>& q);

/// Evenly spaced grid lo, lo + step, ..., hi (inclusive up to rounding).
std::vector<double> q_grid(double lo, double hi, double step);

/// T(q) computed directly for one q.
double t_value(const ShiftSystem& system, const Potential& phi, double q);

/// max over the grid of |alpha(q) + (T(q+h) - T(q-h)) / 2h|.
double alpha_difference_defect(const ShiftSystem& system, const Potential& phi,
                               const std::vector<double>& q, double h);

struct SpectrumPoint {
  double alpha = 0.0;
  double e = 0.0;
};

std::vector<SpectrumPoint> spectrum(const ShiftSystem& system, const Potential& phi,
                                    const std::vector<double>& q);

struct LegendreResult {
  bool skipped = false;          ///< spectrum degenerate (alpha range too small)
  double forward_defect = 0.0;   ///< max |E(alpha*) - inf_q (T(q) + q alpha*)|
  double reverse_defect = 0.0;   ///< max |T(q*) - sup_alpha (E(alpha) - q* alpha)|
  double alpha_range = 0.0;

  double defect() const noexcept { return skipped ? 0.0 : std::max(forward_defect, reverse_defect); }
};

/// `resolution` is the numerical resolution of alpha; spectra whose alpha
/// range is within 10 resolutions are reported as skipped.
LegendreResult legendre_check(const TQCurve& curve, double resolution = 1e-9);

/// [min, max] of the ergodic averages of phi over invariant measures: the
/// extreme cycle means of phi on the transfer graph.
std::pair<double, double> ergodic_average_range(const ShiftSystem& system, const Potential& phi);

struct CorrelationEntropyCurve {
  std::vector<double> q;
  std::vector<double> formula;  ///< -T(q)/(q-1)
  std::vector<double> direct;   ///< -(1/(n(q-1))) log sum_w mu(w)^q over n-words
  int n = 0;
  double measure_entropy = 0.0;  ///< h_mu
  double limit_value = 0.0;      ///< direct side averaged over q = 1 +- 1e-3
};

CorrelationEntropyCurve correlation_entropy(const ShiftSystem& system, const Potential& phi,
                                            const std::vector<double>& q, int n);

/// log sum over admissible n-words of mu(w)^q, in log space.
double log_renyi_sum(const ShiftSystem& system, const MarkovMeasure& mu, double q, int n);

struct LocalEntropyResult {
  double fraction = 0.0;  ///< share of samples within tolerance of h_mu
  double tolerance = 0.0;
  double measure_entropy = 0.0;
  double mean = 0.0;
  double step_sigma = 0.0;  ///< standard deviation of the per-step log-weights
  int samples = 0;
  int n = 0;
};

/// Samples `samples` trajectories of length n from the chain and compares
/// -(1/n) log mu([x_0 ... x_{n-1}]) with h_mu. tolerance <= 0 selects
/// 3 sigma / sqrt(n).
LocalEntropyResult local_entropy_check(const ShiftSystem& system, const MarkovMeasure& mu,
                                       int samples, int n, std::uint64_t seed,
                                       double tolerance = 0.0);

/// Same, for the equilibrium state of phi.
LocalEntropyResult local_entropy_check(const ShiftSystem& system, const Potential& phi,
                                       int samples, int n, std::uint64_t seed,
                                       double tolerance = 0.0);

}  // namespace cpt
