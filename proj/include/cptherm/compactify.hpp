#pragma once

// The doubling map x -> 2x on the real line, its one-point compactification
// (a north-south map of the circle), admissible covers and Lebesgue numbers.
//
// Chart: x = tan(theta / 2) with theta in [-pi, pi]; theta = 0 is x = 0 and
// theta = +-pi is the point at infinity. In this chart the map becomes
// F(theta) = 2 atan(2 tan(theta / 2)), fixing 0 (repelling) and +-pi
// (attracting).

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cptherm/cp_pressure.hpp"

namespace cpt {

struct LineDoublingModel {
  static double map(double x) { return 2.0 * x; }
  /// f^{-1}([a, b]) = [a/2, b/2]: preimages of compact sets are compact.
  static std::pair<double, double> preimage(double a, double b) { return {a / 2.0, b / 2.0}; }
  /// arccot(x) for x < 0 and arccot(-x) for x >= 0, i.e. pi/2 + atan|x|.
  static double potential(double x);
  static double angle(double x);
  static double line_point(double theta);
  static double circle_map(double theta);
  static double circle_preimage(double theta);
  /// The extension of `potential` to the circle; pi at infinity.
  static double extended_potential(double theta);
  /// Fixed points of the compactified map, as angles.
  static std::vector<double> compactified_fixed_points() { return {0.0, std::numbers::pi}; }
};

/// Potential on the circle, radial and nondecreasing in |theta| so that the
/// sup of a Birkhoff sum over an arc sits at the endpoint farther from 0.
class CirclePotential {
 public:
  enum class Shape { kArccot, kQuadratic, kSine, kScaledSine, kConstant };

  static CirclePotential arccot() { return CirclePotential(Shape::kArccot, 0.0); }
  static CirclePotential constant(double c) { return CirclePotential(Shape::kConstant, c); }
  /// arccot | quadratic | sine | scaled_sine | zero | constant (uses c).
  static CirclePotential named(const std::string& name, double c = 0.0);

  double operator()(double theta) const;
  double at_origin() const { return (*this)(0.0); }
  double at_infinity() const;
  std::string name() const;

 private:
  CirclePotential(Shape shape, double c) : shape_(shape), c_(c) {}
  Shape shape_;
  double c_;
};

enum class CoverKind { kCircle, kLine };
enum class CircleSubset { kWhole, kOrigin };

struct Arc {
  double lo = 0.0;
  double hi = 0.0;
  bool wraps = false;  ///< [lo, pi] together with [-pi, hi]
  bool admissible = false;
};

/// M equal arcs with boundaries -pi + 2 pi k / M. The line cover merges the
/// two arcs meeting at infinity into one tail element.
std::vector<Arc> arc_cover(CoverKind kind, int arcs);

/// Independent check of the line admissibility of an arc: its closure or the
/// closure of its complement misses the point at infinity.
bool admissible_on_line(const Arc& arc);

struct CircleBudget {
  int arcs = 64;
  int n_max = 40;
  int gap_n_max = 256;
  int cap_offset = 8;
  double tol = 1e-6;
};

/// Cover-based pressure of the compactified map: critical exponent of M over
/// the join cells of the arc partition (value, bracket), plus the capacity
/// increment log Lambda_N - log Lambda_{N-1} at N = n_max ("stolz") and the
/// regression slope of log Lambda over [n_max/2, n_max] in metrics. The
/// "tolerance" metric is the bracket width plus |value - stolz| plus the
/// growth rate of the number of cells ("cell_growth").
PressureEstimate circle_pressure(const CirclePotential& phi, CoverKind kind, CircleSubset z,
                                 const CircleBudget& budget);

/// Capacity-only estimate (regression slope of log Lambda_N) at n_max.
PressureEstimate circle_capacity(const CirclePotential& phi, CoverKind kind, CircleSubset z,
                                 int arcs, int n_max);

struct TransferCheck {
  PressureEstimate line;
  PressureEstimate circle;
  double combined_tolerance = 0.0;
  bool agree = false;
};

TransferCheck compactification_transfer_check(const CirclePotential& phi, const CircleBudget& budget);

struct InvariantMeasure {
  std::string name;
  double angle = 0.0;  ///< support point in the circle chart
  double entropy = 0.0;
  double integral = 0.0;  ///< integral of the extended potential
};

/// Ergodic invariant probability measures: {delta_0} on the line,
/// {delta_0, delta_inf} on the compactification (all others are convex
/// combinations).
std::vector<InvariantMeasure> invariant_measures(bool on_compactification);

/// Mass of f^k_* nu inside [-L, L] for k = 0..iterations, where nu is a random
/// discrete probability measure with an atom of the given mass at 0. The
/// masses decrease to the atom: no invariant mass survives away from 0.
std::vector<double> pushforward_mass_decay(int points, int iterations, double half_width,
                                           double atom, std::uint64_t seed);

struct GapCertificate {
  double pressure_compactified = 0.0;  ///< max over the compactified inventory
  double sup_over_line_measures = 0.0;
  double gap = 0.0;
  std::vector<InvariantMeasure> line_inventory;
  std::vector<InvariantMeasure> compact_inventory;
  double estimated_pressure = 0.0;  ///< circle cover estimator
  double estimated_entropy = 0.0;
  double estimated_gap = 0.0;
  double estimator_tolerance = 1e-2;
};

GapCertificate gap_example(const CircleBudget& budget = {});

/// A finite metric space with a designated family of compact sets and a cover.
/// A set is compact when it lies inside one of the designated sets; an element
/// is admissible when it or its complement is compact.
struct FiniteMetricModel {
  std::vector<std::vector<double>> distance;
  std::vector<std::vector<int>> compact_sets;
  std::vector<std::vector<int>> cover;
  std::vector<bool> admissible;

  int size() const noexcept { return static_cast<int>(distance.size()); }
  void validate() const;
  bool is_compact(const std::vector<int>& set) const;
  bool element_admissible(std::size_t i) const;
};

/// Largest delta such that every open delta-ball lies in one cover element.
/// When some ball of every radius fits (an element is the whole space) the
/// value is unbounded and the largest pairwise distance is returned instead
/// (1 for a single point).
double lebesgue_number(const FiniteMetricModel& model);

}  // namespace cpt
