#include "ekrylov/propagate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ekrylov/errors.hpp"
#include "ekrylov/precision.hpp"

namespace ekrylov {

namespace {

constexpr double kNormTolerance = 1e-12;
// Above this |sigma t| (or this n_max) Laguerre values are built in extended precision.
constexpr double kLaguerreExtendedArgument = 8.0;
constexpr int kLaguerreExtendedOrder = 300;

void check_times(std::span<const double> times) {
  if (times.empty()) throw InvalidArgument("time grid is empty");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InvalidArgument("time grid must be strictly increasing");
}

double norm_deviation(const Eigen::MatrixXcd& amplitudes) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < amplitudes.rows(); ++k)
    worst = std::max(worst, std::abs(1.0 - amplitudes.row(k).squaredNorm()));
  return worst;
}

Complex minus_i_power(int d) {
  switch (d % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Fills U(t) for s = sigma t by one upward recurrence in the lower index k per
// offset d = |n - m|:
//   L_{k+1}^(d) = ((2k + 1 + d - x) L_k^(d) - (k + d) L_{k-1}^(d)) / (k + 1),  x = s^2.
// Magnitudes are combined in log space so that neither exp(-x/2) sqrt(k!/(k+d)!) s^d
// nor L overflows on its own.
template <class T>
void fill_laguerre(Eigen::MatrixXcd& u, double s, int n_max) {
  using std::abs;
  using std::exp;
  using std::log;
  u.setZero(n_max + 1, n_max + 1);
  if (s == 0.0) {
    u.setIdentity();
    return;
  }
  std::vector<T> log_fact(static_cast<std::size_t>(n_max) + 1);
  log_fact[0] = 0;
  for (int k = 1; k <= n_max; ++k) log_fact[k] = log_fact[k - 1] + log(T(k));
  const T x = T(s) * T(s);
  const T log_s = log(abs(T(s)));
  for (int d = 0; d <= n_max; ++d) {
    const double sign_s = (s < 0.0 && d % 2 == 1) ? -1.0 : 1.0;
    const Complex phase = minus_i_power(d) * sign_s;
    T prev = 0;
    T cur = 1;
    for (int k = 0; k + d <= n_max; ++k) {
      if (k == 1) {
        prev = 1;
        cur = T(1 + d) - x;
      } else if (k > 1) {
        const T next = ((T(2 * (k - 1) + 1 + d) - x) * cur - T(k - 1 + d) * prev) / T(k);
        prev = cur;
        cur = next;
      }
      double value = 0.0;
      if (cur != 0) {
        const T log_mag = -x / 2 + (log_fact[k] - log_fact[k + d]) / 2 + T(d) * log_s + log(abs(cur));
        value = static_cast<double>(exp(log_mag));
        if (cur < 0) value = -value;
      }
      const Complex entry = phase * value;
      u(k + d, k) = entry;
      u(k, k + d) = entry;
    }
  }
}

bool is_gaussian_chain(const ChainCoefficients& c, double& sigma) {
  if (c.mode != ChainMode::EnsembleOnly || c.betas.empty()) return false;
  sigma = c.betas[0];
  if (!(sigma > 0.0)) return false;
  for (double a : c.alphas)
    if (std::abs(a - c.center) > 1e-10 * sigma) return false;
  for (std::size_t k = 0; k < c.betas.size(); ++k) {
    const double expected = sigma * std::sqrt(static_cast<double>(k + 1));
    if (std::abs(c.betas[k] - expected) > 1e-10 * expected) return false;
  }
  return true;
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Eigendecomposition: return "eig";
    case Method::Laguerre: return "laguerre";
    case Method::Spectral: return "spectral";
    case Method::FullSpace: return "full-space";
  }
  return "unknown";
}

StateVector StateVector::basis(int dimension, int index) {
  if (dimension < 1 || index < 0 || index >= dimension) {
    std::ostringstream msg;
    msg << "state index " << index << " outside dimension " << dimension;
    throw InvalidArgument(msg.str());
  }
  StateVector s;
  s.amplitudes = Eigen::VectorXcd::Zero(dimension);
  s.amplitudes[index] = 1.0;
  return s;
}

StateVector StateVector::from(Eigen::VectorXcd amplitudes) {
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg << "state is not normalised: sum |c|^2 = " << norm2;
    throw InvalidArgument(msg.str());
  }
  return StateVector{std::move(amplitudes)};
}

std::vector<double> uniform_grid(double t_max, int points) {
  if (points < 2 || !(t_max > 0.0)) throw InvalidArgument("uniform_grid: need t_max > 0 and points >= 2");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
  return t;
}

ChainPropagator::ChainPropagator(const KrylovChain& chain) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(chain.diagonal, chain.offdiagonal, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "tridiagonal eigensolver did not converge (dimension " << chain.dimension()
        << ", max |alpha| " << chain.diagonal.cwiseAbs().maxCoeff() << ", max |beta| "
        << (chain.offdiagonal.size() ? chain.offdiagonal.cwiseAbs().maxCoeff() : 0.0) << ")";
    throw NumericalFailure(msg.str());
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

Eigen::VectorXcd ChainPropagator::apply(const Eigen::VectorXcd& c0, double t) const {
  const Eigen::VectorXcd modes = eigenvectors_.transpose().cast<Complex>() * c0;
  Eigen::VectorXcd phased(modes.size());
  for (Eigen::Index k = 0; k < modes.size(); ++k)
    phased[k] = std::polar(1.0, -eigenvalues_[k] * t) * modes[k];
  return eigenvectors_.cast<Complex>() * phased;
}

Eigen::MatrixXcd ChainPropagator::block(int row0, int rows, int col0, int cols, double t) const {
  Eigen::VectorXcd phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -eigenvalues_[k] * t);
  const Eigen::MatrixXcd left = eigenvectors_.middleRows(row0, rows).cast<Complex>() * phases.asDiagonal();
  return left * eigenvectors_.middleRows(col0, cols).transpose().cast<Complex>();
}

Eigen::MatrixXcd ChainPropagator::matrix(double t) const {
  return block(0, dimension(), 0, dimension(), t);
}

EvolutionResult evolve_eig(const ChainPropagator& propagator, const StateVector& psi0,
                           std::span<const double> times) {
  check_times(times);
  if (psi0.dimension() != propagator.dimension()) {
    std::ostringstream msg;
    msg << "evolve_eig: state dimension " << psi0.dimension() << " does not match chain dimension "
        << propagator.dimension();
    throw InvalidArgument(msg.str());
  }
  EvolutionResult r;
  r.method = Method::Eigendecomposition;
  r.times.assign(times.begin(), times.end());
  r.amplitudes.resize(static_cast<Eigen::Index>(times.size()), psi0.dimension());
  for (std::size_t k = 0; k < times.size(); ++k)
    r.amplitudes.row(static_cast<Eigen::Index>(k)) =
        (times[k] == 0.0 ? psi0.amplitudes : propagator.apply(psi0.amplitudes, times[k])).transpose();
  r.norm_drift = norm_deviation(r.amplitudes);
  return r;
}

EvolutionResult evolve_eig(const KrylovChain& chain, const StateVector& psi0, std::span<const double> times) {
  return evolve_eig(ChainPropagator(chain), psi0, times);
}

Eigen::MatrixXcd laguerre_matrix(double sigma, double t, int n_max) {
  if (n_max < 0) throw InvalidArgument("laguerre_matrix: n_max must be >= 0");
  Eigen::MatrixXcd u;
  const double s = sigma * t;
  if (std::abs(s) > kLaguerreExtendedArgument || n_max > kLaguerreExtendedOrder)
    fill_laguerre<Extended>(u, s, n_max);
  else
    fill_laguerre<double>(u, s, n_max);
  return u;
}

Complex laguerre_element(double sigma, int n, int m, double t) {
  if (n < 0 || m < 0) throw InvalidArgument("laguerre_element: indices must be >= 0");
  const int hi = std::max(n, m);
  return laguerre_matrix(sigma, t, hi)(n, m);
}

EvolutionResult evolve_laguerre(double sigma, const StateVector& psi0, std::span<const double> times,
                                int n_max) {
  check_times(times);
  if (!(sigma > 0.0)) throw InvalidArgument("evolve_laguerre: sigma must be > 0");
  if (psi0.dimension() > n_max + 1)
    throw InvalidArgument("evolve_laguerre: state dimension exceeds n_max + 1");
  Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(n_max + 1);
  c0.head(psi0.dimension()) = psi0.amplitudes;
  std::vector<int> support;
  for (int m = 0; m <= n_max; ++m)
    if (c0[m] != Complex(0.0, 0.0)) support.push_back(m);

  EvolutionResult r;
  r.method = Method::Laguerre;
  r.times.assign(times.begin(), times.end());
  r.amplitudes.resize(static_cast<Eigen::Index>(times.size()), n_max + 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Eigen::MatrixXcd u = laguerre_matrix(sigma, times[k], n_max);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    for (int m : support) c += u.col(m) * c0[m];
    r.amplitudes.row(static_cast<Eigen::Index>(k)) = c.transpose();
  }
  r.norm_drift = norm_deviation(r.amplitudes);
  return r;
}

EvolutionResult evolve_laguerre(const ChainCoefficients& coeffs, const StateVector& psi0,
                                std::span<const double> times, int n_max) {
  double sigma = 0.0;
  if (!is_gaussian_chain(coeffs, sigma))
    throw UnsupportedOperation(
        "evolve_laguerre: the closed-form propagator applies only to the Gaussian ensemble-only chain "
        "(b_n = sigma sqrt(n), alpha_n = centre); use evolve_eig or evolve_spectral");
  return evolve_laguerre(sigma, psi0, times, n_max);
}

EvolutionResult evolve_spectral(const ChainCoefficients& coeffs, const SpectralDistribution& dist,
                                const StateVector& psi0, std::span<const double> times,
                                int quadrature_order) {
  check_times(times);
  if (std::holds_alternative<TsallisQGaussian>(dist))
    throw UnsupportedOperation(
        "evolve_spectral: heavy-tailed (q > 1) measures have no Gauss rule of the needed order");
  if (coeffs.mode != ChainMode::EnsembleOnly)
    throw InvalidArgument("evolve_spectral: needs ensemble-only coefficients of the spin measure");
  const int q_order = quadrature_order == 0 ? coeffs.size() : quadrature_order;
  const int m = psi0.dimension();
  if (q_order > coeffs.size() || static_cast<int>(coeffs.betas.size()) < q_order - 1)
    throw InvalidArgument("evolve_spectral: quadrature order exceeds the available coefficients");
  if (q_order < m) {
    std::ostringstream msg;
    msg << "evolve_spectral: quadrature order " << q_order << " is below the state dimension " << m
        << "; the Gauss rule cannot resolve the propagator";
    throw NumericalFailure(msg.str());
  }

  // Gauss nodes and weights from the Jacobi matrix (Golub-Welsch), in the
  // rotating frame of the distribution centre.
  Eigen::VectorXd diag(q_order), off(q_order - 1);
  for (int n = 0; n < q_order; ++n) diag[n] = coeffs.alphas[n] - coeffs.center;
  for (int k = 0; k + 1 < q_order; ++k) off[k] = coeffs.betas[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalFailure("evolve_spectral: Golub-Welsch eigensolve failed");
  const Eigen::VectorXd nodes = solver.eigenvalues();

  // P(n, k) = sqrt(w_k) pi_n(x_k) is the n-th component of the k-th Jacobi
  // eigenvector with the sign fixed by pi_0 = 1. Reading it off the
  // eigenvectors keeps absolute accuracy at nodes whose weight is below
  // round-off, where the forward three-term recurrence amplifies noise.
  Eigen::MatrixXd p = solver.eigenvectors().topRows(m);
  for (int k = 0; k < q_order; ++k)
    if (solver.eigenvectors()(0, k) < 0.0) p.col(k) = -p.col(k);

  const Eigen::VectorXcd projected = p.transpose().cast<Complex>() * psi0.amplitudes;
  EvolutionResult r;
  r.method = Method::Spectral;
  r.times.assign(times.begin(), times.end());
  r.amplitudes.resize(static_cast<Eigen::Index>(times.size()), m);
  Eigen::VectorXcd weighted(q_order);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (int k = 0; k < q_order; ++k) weighted[k] = std::polar(1.0, -nodes[k] * times[i]) * projected[k];
    r.amplitudes.row(static_cast<Eigen::Index>(i)) = (p.cast<Complex>() * weighted).transpose();
  }
  r.norm_drift = norm_deviation(r.amplitudes);
  return r;
}

}  // namespace ekrylov
