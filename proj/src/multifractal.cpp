#include "cptherm/multifractal.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "cptherm/perron.hpp"

namespace cpt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Karp's maximum cycle mean restricted to one strongly connected component.
double karp_max_mean(const TransferMatrix& t, const std::vector<int>& comp, int c, double sign) {
  std::vector<int> members;
  for (int v = 0; v < t.graph.size(); ++v) {
    if (comp[v] == c) members.push_back(v);
  }
  const int n = static_cast<int>(members.size());
  std::vector<int> local(static_cast<std::size_t>(t.graph.size()), -1);
  for (int i = 0; i < n; ++i) local[members[i]] = i;
  std::vector<std::vector<double>> d(static_cast<std::size_t>(n) + 1,
                                     std::vector<double>(static_cast<std::size_t>(n), kNegInf));
  d[0][0] = 0.0;
  for (int step = 1; step <= n; ++step) {
    for (int i = 0; i < n; ++i) {
      if (d[step - 1][i] == kNegInf) continue;
      const int a = members[i];
      for (std::size_t e = 0; e < t.graph.successors[a].size(); ++e) {
        const int j = local[t.graph.successors[a][e]];
        if (j < 0) continue;
        d[step][j] = std::max(d[step][j], d[step - 1][i] + sign * t.edge_potential[a][e]);
      }
    }
  }
  double best = kNegInf;
  for (int v = 0; v < n; ++v) {
    if (d[n][v] == kNegInf) continue;
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (d[k][v] == kNegInf) continue;
      worst = std::min(worst, (d[n][v] - d[k][v]) / (n - k));
    }
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace

std::vector<double> q_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw Error(ErrorCode::kInvalidArgument, "bad q grid");
  std::vector<double> q;
  const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= count; ++i) q.push_back(lo + i * step);
  return q;
}

double t_value(const ShiftSystem& system, const Potential& phi, double q) {
  return transfer_pressure(system, phi.scaled(q)) - q * transfer_pressure(system, phi);
}

TQCurve t_curve(const ShiftSystem& system, const Potential& phi, const std::vector<double>& q) {
  if (q.empty()) throw Error(ErrorCode::kInvalidArgument, "empty q grid");
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (!(q[i] > q[i - 1])) throw Error(ErrorCode::kInvalidArgument, "q grid must be increasing");
  }
  TQCurve c;
  c.q = q;
  c.pressure = transfer_pressure(system, phi);
  c.entropy = transfer_pressure(system, Potential::zero(system));
  for (double qi : q) {
    const Potential scaled = phi.scaled(qi);
    const EquilibriumState eq = equilibrium_markov(system, scaled);
    const double pq = std::log(eq.eigenvalue);
    const double integral = measure_integral(system, phi, eq.measure);
    c.t.push_back(pq - qi * c.pressure);
    c.alpha.push_back(c.pressure - integral);
    c.spectrum.push_back(c.t.back() + qi * c.alpha.back());
  }
  c.min_second_difference = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < q.size(); ++i) {
    const double left = (c.t[i] - c.t[i - 1]) / (q[i] - q[i - 1]);
    const double right = (c.t[i + 1] - c.t[i]) / (q[i + 1] - q[i]);
    c.min_second_difference = std::min(c.min_second_difference, right - left);
  }
  if (q.size() < 3) c.min_second_difference = 0.0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    c.alpha_increase = std::max(c.alpha_increase, c.alpha[i] - c.alpha[i - 1]);
  }
  return c;
}

double alpha_difference_defect(const ShiftSystem& system, const Potential& phi,
                               const std::vector<double>& q, double h) {
  const TQCurve c = t_curve(system, phi, q);
  double defect = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double derivative =
        (t_value(system, phi, q[i] + h) - t_value(system, phi, q[i] - h)) / (2.0 * h);
    defect = std::max(defect, std::abs(c.alpha[i] + derivative));
  }
  return defect;
}

std::vector<SpectrumPoint> spectrum(const ShiftSystem& system, const Potential& phi,
                                    const std::vector<double>& q) {
  const TQCurve c = t_curve(system, phi, q);
  std::vector<SpectrumPoint> out;
  for (std::size_t i = 0; i < q.size(); ++i) out.push_back(SpectrumPoint{c.alpha[i], c.spectrum[i]});
  return out;
}

LegendreResult legendre_check(const TQCurve& curve, double resolution) {
  LegendreResult r;
  const auto [amin, amax] = std::minmax_element(curve.alpha.begin(), curve.alpha.end());
  r.alpha_range = *amax - *amin;
  if (r.alpha_range <= 10.0 * resolution) {
    r.skipped = true;
    return r;
  }
  const std::size_t n = curve.q.size();
  for (std::size_t j = 0; j < n; ++j) {
    double inf = std::numeric_limits<double>::infinity();
    double sup = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
      inf = std::min(inf, curve.t[i] + curve.q[i] * curve.alpha[j]);
      sup = std::max(sup, curve.spectrum[i] - curve.q[j] * curve.alpha[i]);
    }
    r.forward_defect = std::max(r.forward_defect, std::abs(curve.spectrum[j] - inf));
    r.reverse_defect = std::max(r.reverse_defect, std::abs(curve.t[j] - sup));
  }
  return r;
}

std::pair<double, double> ergodic_average_range(const ShiftSystem& system, const Potential& phi) {
  const TransferMatrix t = make_transfer_matrix(system, phi);
  int count = 0;
  const std::vector<int> comp = strong_components(t.matrix, &count);
  double lo = std::numeric_limits<double>::infinity();
  double hi = kNegInf;
  for (int c = 0; c < count; ++c) {
    const double mx = karp_max_mean(t, comp, c, 1.0);
    if (mx == kNegInf) continue;  // trivial component without a cycle
    hi = std::max(hi, mx);
    lo = std::min(lo, -karp_max_mean(t, comp, c, -1.0));
  }
  return {lo, hi};
}

double log_renyi_sum(const ShiftSystem& system, const MarkovMeasure& mu, double q, int n) {
  (void)system;
  const BlockGraph& g = mu.graph;
  if (n < g.block_length) throw Error(ErrorCode::kInvalidArgument, "n shorter than the measure's blocks");
  std::vector<double> v(static_cast<std::size_t>(g.size()), kNegInf);
  for (int a = 0; a < g.size(); ++a) {
    if (mu.stationary[a] > 0.0) v[a] = q * std::log(mu.stationary[a]);
  }
  for (int step = g.block_length; step < n; ++step) {
    std::vector<double> next(v.size(), kNegInf);
    for (int a = 0; a < g.size(); ++a) {
      if (v[a] == kNegInf) continue;
      for (std::size_t i = 0; i < g.successors[a].size(); ++i) {
        const double p = mu.transitions[a][i];
        if (p <= 0.0) continue;
        const int b = g.successors[a][i];
        next[b] = log_sum_exp(next[b], v[a] + q * std::log(p));
      }
    }
    v = std::move(next);
  }
  double total = kNegInf;
  for (double x : v) total = log_sum_exp(total, x);
  return total;
}

CorrelationEntropyCurve correlation_entropy(const ShiftSystem& system, const Potential& phi,
                                            const std::vector<double>& q, int n) {
  if (n < 10) throw Error(ErrorCode::kInvalidArgument, "correlation entropies need n >= 10");
  for (double qi : q) {
    if (std::abs(qi - 1.0) < 1e-12) throw Error(ErrorCode::kInvalidArgument, "q = 1 is a limit, not a grid point");
  }
  const EquilibriumState eq = equilibrium_markov(system, phi);
  const double p = std::log(eq.eigenvalue);
  CorrelationEntropyCurve c;
  c.q = q;
  c.n = n;
  c.measure_entropy = eq.entropy;
  auto direct = [&](double qi) {
    return -log_renyi_sum(system, eq.measure, qi, n) / (n * (qi - 1.0));
  };
  for (double qi : q) {
    const double t = transfer_pressure(system, phi.scaled(qi)) - qi * p;
    c.formula.push_back(-t / (qi - 1.0));
    c.direct.push_back(direct(qi));
  }
  c.limit_value = 0.5 * (direct(1.0 - 1e-3) + direct(1.0 + 1e-3));
  return c;
}

LocalEntropyResult local_entropy_check(const ShiftSystem& system, const MarkovMeasure& mu,
                                       int samples, int n, std::uint64_t seed, double tolerance) {
  (void)system;
  if (samples < 1 || n < 1) throw Error(ErrorCode::kInvalidArgument, "need samples >= 1 and n >= 1");
  const BlockGraph& g = mu.graph;
  if (n < g.block_length) throw Error(ErrorCode::kInvalidArgument, "n shorter than the measure's blocks");
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> start(mu.stationary.begin(), mu.stationary.end());
  std::vector<std::discrete_distribution<int>> rows;
  for (const auto& row : mu.transitions) rows.emplace_back(row.begin(), row.end());

  LocalEntropyResult r;
  r.samples = samples;
  r.n = n;
  r.measure_entropy = measure_entropy(mu);
  std::vector<double> values;
  double step_sum = 0.0;
  double step_sq = 0.0;
  long steps = 0;
  for (int s = 0; s < samples; ++s) {
    int a = start(rng);
    double log_mu = std::log(mu.stationary[a]);
    for (int j = g.block_length; j < n; ++j) {
      const int e = rows[a](rng);
      const double w = -std::log(mu.transitions[a][e]);
      log_mu -= w;
      step_sum += w;
      step_sq += w * w;
      ++steps;
      a = g.successors[a][e];
    }
    values.push_back(-log_mu / n);
  }
  if (steps > 0) {
    const double mean = step_sum / steps;
    r.step_sigma = std::sqrt(std::max(0.0, step_sq / steps - mean * mean));
  }
  r.tolerance = tolerance > 0.0 ? tolerance : std::max(1e-12, 3.0 * r.step_sigma / std::sqrt(n));
  int hits = 0;
  for (double v : values) {
    r.mean += v / samples;
    if (std::abs(v - r.measure_entropy) <= r.tolerance) ++hits;
  }
  r.fraction = static_cast<double>(hits) / samples;
  return r;
}

LocalEntropyResult local_entropy_check(const ShiftSystem& system, const Potential& phi,
                                       int samples, int n, std::uint64_t seed, double tolerance) {
  const EquilibriumState eq = equilibrium_markov(system, phi);
  return local_entropy_check(system, eq.measure, samples, n, seed, tolerance);
}

}  // namespace cpt
