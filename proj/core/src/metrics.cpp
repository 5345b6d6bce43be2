#include "ekrylov/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ekrylov/errors.hpp"

namespace ekrylov {

std::vector<double> krylov_complexity(const EvolutionResult& res) {
  std::vector<double> k(static_cast<std::size_t>(res.steps()), 0.0);
  for (int i = 0; i < res.steps(); ++i) {
    double acc = 0.0;
    for (int n = 1; n < res.dimension(); ++n) acc += n * std::norm(res.amplitudes(i, n));
    k[i] = acc;
  }
  return k;
}

Eigen::MatrixXd fidelity_grid(const EvolutionResult& res) { return res.amplitudes.cwiseAbs2(); }

CorrelatorGrid correlator(const ChainPropagator& propagator, int r_max, std::span<const double> times) {
  const int m = propagator.dimension();
  if (r_max < 0 || r_max + 1 >= m) {
    std::ostringstream msg;
    msg << "correlator: r_max = " << r_max << " needs r_max + 1 < M = " << m;
    throw InvalidArgument(msg.str());
  }
  CorrelatorGrid grid;
  grid.times.assign(times.begin(), times.end());
  grid.values.resize(r_max + 1, static_cast<Eigen::Index>(times.size()));

  Eigen::Matrix2cd swap;
  swap << 0.0, 1.0, 1.0, 0.0;
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Eigen::MatrixXcd rows = propagator.block(0, 2, 0, r_max + 2, times[k]);
    for (int r = 0; r <= r_max; ++r) {
      const Eigen::Matrix2cd g = rows.block(0, r, 2, 2);
      Eigen::Matrix4cd n = Eigen::Matrix4cd::Zero();
      n.topRightCorner<2, 2>() = swap * g * swap;
      n.bottomLeftCorner<2, 2>() = -swap * g.adjoint() * swap;
      Eigen::Matrix4cd gram;
      gram << id, g, g.adjoint(), id;
      solver.compute(n * gram, false);
      grid.values(r, static_cast<Eigen::Index>(k)) = solver.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return grid;
}

CorrelatorGrid correlator(const KrylovChain& chain, int r_max, std::span<const double> times) {
  return correlator(ChainPropagator(chain), r_max, times);
}

std::vector<std::optional<double>> arrival_front(const CorrelatorGrid& grid, double threshold) {
  std::vector<std::optional<double>> front(static_cast<std::size_t>(grid.values.rows()));
  for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
    for (Eigen::Index k = 0; k < grid.values.cols(); ++k) {
      if (grid.values(r, k) > threshold) {
        front[r] = grid.times[k];
        break;
      }
    }
  }
  return front;
}

LineFit fit_front(const CorrelatorGrid& grid, int r_lo, int r_hi, double threshold) {
  if (r_lo < 0 || r_hi > grid.r_max() || r_lo >= r_hi)
    throw InvalidArgument("fit_front: r range outside the correlator grid");
  const auto front = arrival_front(grid, threshold);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int r = r_lo; r <= r_hi; ++r) {
    if (!front[r]) continue;
    const double t = *front[r];
    sx += r;
    sy += t;
    sxx += static_cast<double>(r) * r;
    sxy += r * t;
    ++n;
  }
  if (n < 2) throw NumericalFailure("fit_front: fewer than two bonds reached the threshold");
  LineFit fit;
  fit.points = n;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

LiebRobinsonCheck check_lieb_robinson(const CorrelatorGrid& grid, double j_max, double threshold,
                                      double floor) {
  if (grid.r_max() < 1) throw InvalidArgument("check_lieb_robinson: grid needs r >= 1");
  const auto front = arrival_front(grid, threshold);
  if (!front[1]) throw NumericalFailure("check_lieb_robinson: bond 1 never reaches the threshold");
  LiebRobinsonCheck c;
  c.j_max = j_max;
  c.t_fit = *front[1];
  std::size_t k_fit = 0;
  while (grid.times[k_fit] != c.t_fit) ++k_fit;
  c.a = grid.values(1, static_cast<Eigen::Index>(k_fit)) * std::exp(1.0 - 2.0 * j_max * c.t_fit);
  for (Eigen::Index r = 0; r < grid.values.rows(); ++r) {
    for (Eigen::Index k = 0; k < grid.values.cols(); ++k) {
      if (grid.values(r, k) < floor) continue;
      const double bound = c.a * std::exp(-static_cast<double>(r) + 2.0 * j_max * grid.times[k]);
      const double ratio = grid.values(r, k) / bound;
      if (ratio > c.worst_ratio) {
        c.worst_ratio = ratio;
        c.worst_r = static_cast<int>(r);
        c.worst_t = grid.times[k];
      }
    }
  }
  return c;
}

std::vector<double> energy_spread(const ChainCoefficients& coeffs) {
  const int m = coeffs.size();
  std::vector<double> dh(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double left = i >= 1 ? coeffs.beta(i) : 0.0;
    const double right = i + 1 < m && i < static_cast<int>(coeffs.betas.size()) ? coeffs.beta(i + 1) : 0.0;
    dh[i] = std::hypot(left, right);
  }
  return dh;
}

QSLReport qsl_times(const ChainCoefficients& coeffs, std::span<const double> targets,
                    std::span<const std::pair<int, int>> pairs) {
  QSLReport rep;
  rep.delta_h = energy_spread(coeffs);
  const bool cavity = coeffs.mode == ChainMode::CavityCoupled;
  const std::size_t first_spin_bond = cavity ? 1 : 0;
  rep.g_ens = cavity && !coeffs.betas.empty() ? coeffs.betas[0] : 0.0;
  rep.sigma = coeffs.betas.size() > first_spin_bond ? coeffs.betas[first_spin_bond] : 0.0;
  const double half_pi = std::numbers::pi / 2.0;
  const double spread0 = std::hypot(rep.g_ens, rep.sigma);
  rep.tau0 = spread0 > 0.0 ? half_pi / spread0 : std::numeric_limits<double>::infinity();
  rep.tauL = rep.sigma > 0.0 ? half_pi / rep.sigma : std::numeric_limits<double>::infinity();

  for (double f : targets)
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("qsl_times: target fidelities must lie in [0, 1]");
  const int m = coeffs.size();
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= m || j >= m) {
      std::ostringstream msg;
      msg << "qsl_times: site pair (" << i << ", " << j << ") outside chain of " << m << " sites";
      throw InvalidArgument(msg.str());
    }
    for (double f : targets) {
      const double overlap = i == j ? std::sqrt(f) : std::sqrt(1.0 - f);
      const double dh = rep.delta_h[i];
      double tau = 0.0;
      if (overlap < 1.0) tau = dh > 0.0 ? std::acos(overlap) / dh : std::numeric_limits<double>::infinity();
      rep.entries.push_back({i, j, f, tau});
    }
  }
  return rep;
}

std::optional<double> first_passage(std::span<const double> times, std::span<const double> series,
                                    double target, bool rising) {
  if (times.size() != series.size()) throw InvalidArgument("first_passage: length mismatch");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (rising ? series[k] >= target : series[k] <= target) return times[k];
  return std::nullopt;
}

RevivalReport detect_revival(std::span<const double> times, std::span<const double> series, double drop,
                             double revive) {
  if (times.size() != series.size()) throw InvalidArgument("detect_revival: length mismatch");
  RevivalReport rep;
  std::size_t k = 0;
  while (k < series.size() && series[k] >= drop) ++k;
  if (k == series.size()) return rep;
  rep.drop_time = times[k];
  for (std::size_t i = k + 1; i + 1 < series.size(); ++i) {
    if (series[i] > revive && series[i] >= series[i - 1] && series[i] >= series[i + 1]) {
      rep.peak_time = times[i];
      rep.peak_value = series[i];
      return rep;
    }
  }
  return rep;
}

}  // namespace ekrylov
