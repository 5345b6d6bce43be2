#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ekrylov/chain.hpp"
#include "ekrylov/propagate.hpp"

namespace ekrylov {

/// K(t_k) = sum_n n |c_n(t_k)|^2.
std::vector<double> krylov_complexity(const EvolutionResult& res);

/// F_j(t_k) = |c_j(t_k)|^2, one row per time.
Eigen::MatrixXd fidelity_grid(const EvolutionResult& res);

/// C(r, t) = || [X_{0,1}(t), X_{r,r+1}(0)] || for r = 0..r_max.
struct CorrelatorGrid {
  std::vector<double> times;
  /// values(r, k) at bond offset r and time times[k].
  Eigen::MatrixXd values;

  int r_max() const { return static_cast<int>(values.rows()) - 1; }
};

/// The commutator has rank at most four, so its norm is the largest |eigenvalue|
/// of a 4 x 4 matrix built from U(t) restricted to sites {0,1} x {r,r+1}.
/// Throws InvalidArgument unless r_max + 1 < M.
CorrelatorGrid correlator(const ChainPropagator& propagator, int r_max, std::span<const double> times);
CorrelatorGrid correlator(const KrylovChain& chain, int r_max, std::span<const double> times);

/// First grid time with C(r, t) > threshold, per r (nullopt if never reached).
std::vector<std::optional<double>> arrival_front(const CorrelatorGrid& grid, double threshold = 0.01);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// Least-squares line t_front(r) over r in [r_lo, r_hi] (unreached r are skipped).
LineFit fit_front(const CorrelatorGrid& grid, int r_lo, int r_hi, double threshold = 0.01);

/// Bound C(r, t) <= a exp(-r + 2 J t) with a fitted at r = 1 on the arrival front.
struct LiebRobinsonCheck {
  double a = 0.0;
  double j_max = 0.0;
  double t_fit = 0.0;
  /// max over the grid of C / (a exp(-r + 2 J t)).
  double worst_ratio = 0.0;
  int worst_r = 0;
  double worst_t = 0.0;

  bool satisfied() const { return worst_ratio <= 1.0; }
};

/// Grid values below `floor` are at round-off level and are not compared.
LiebRobinsonCheck check_lieb_robinson(const CorrelatorGrid& grid, double j_max, double threshold = 0.01,
                                      double floor = 1e-12);

/// Mandelstam-Tamm time for leaving site i (j == i, survival F) or for reaching
/// site j (j != i, transfer F).
struct QSLEntry {
  int i = 0;
  int j = 0;
  double target = 0.0;
  double tau = 0.0;
};

struct QSLReport {
  std::vector<QSLEntry> entries;
  /// pi / (2 sqrt(g_ens^2 + sigma^2)).
  double tau0 = 0.0;
  /// pi / (2 sigma); infinite for sigma = 0.
  double tauL = 0.0;
  double g_ens = 0.0;
  double sigma = 0.0;
  /// Delta H_i = sqrt(beta_i^2 + beta_{i+1}^2) per site, missing bonds counting 0.
  std::vector<double> delta_h;
};

/// Energy spread of each site: sqrt(beta_i^2 + beta_{i+1}^2).
std::vector<double> energy_spread(const ChainCoefficients& coeffs);

/// tau = arccos(sqrt(F)) / Delta H_i for j == i and arccos(sqrt(1 - F)) / Delta H_i
/// for j != i. g_ens is beta(1) in cavity-coupled mode and 0 otherwise; sigma is
/// the first ensemble bond. Throws InvalidArgument for targets outside [0, 1] or
/// site indices outside the chain.
QSLReport qsl_times(const ChainCoefficients& coeffs, std::span<const double> targets,
                    std::span<const std::pair<int, int>> pairs);

/// First grid time at which series >= target (rising) or <= target (falling).
std::optional<double> first_passage(std::span<const double> times, std::span<const double> series,
                                    double target, bool rising);

/// Local maximum above `revive` after the series first drops below `drop`.
struct RevivalReport {
  std::optional<double> drop_time;
  std::optional<double> peak_time;
  double peak_value = 0.0;

  bool revived() const { return peak_time.has_value(); }
};

RevivalReport detect_revival(std::span<const double> times, std::span<const double> series,
                             double drop = 0.05, double revive = 0.1);

/// Everything the evolve command exports for one run.
struct MetricsBundle {
  std::vector<double> complexity;
  Eigen::MatrixXd fidelities;
  std::optional<CorrelatorGrid> correlator;
  VelocityProfile velocity;
  QSLReport qsl;
};

}  // namespace ekrylov
