#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ekrylov/chain.hpp"

namespace ekrylov {

using Complex = std::complex<double>;

enum class Method { Eigendecomposition, Laguerre, Spectral, FullSpace };
std::string to_string(Method method);

/// Amplitudes c_n over chain sites (or full-space basis states).
struct StateVector {
  Eigen::VectorXcd amplitudes;

  int dimension() const { return static_cast<int>(amplitudes.size()); }
  /// Point mass on `index`.
  static StateVector basis(int dimension, int index);
  /// Wraps amplitudes; throws InvalidArgument unless |c|^2 sums to 1 within 1e-12.
  static StateVector from(Eigen::VectorXcd amplitudes);
};

/// c_n(t_k) on a strictly increasing time grid, one row per time.
struct EvolutionResult {
  std::vector<double> times;
  Eigen::MatrixXcd amplitudes;
  /// max_k |1 - sum_n |c_n(t_k)|^2|.
  double norm_drift = 0.0;
  Method method = Method::Eigendecomposition;

  int dimension() const { return static_cast<int>(amplitudes.cols()); }
  int steps() const { return static_cast<int>(amplitudes.rows()); }
};

/// `points` equally spaced times on [0, t_max].
std::vector<double> uniform_grid(double t_max, int points);

/// Spectral decomposition of a chain, computed once and shared read-only.
class ChainPropagator {
 public:
  explicit ChainPropagator(const KrylovChain& chain);

  int dimension() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

  /// exp(-i H t) c0.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& c0, double t) const;
  /// Full propagator matrix U(t).
  Eigen::MatrixXcd matrix(double t) const;
  /// Block of U(t): rows [row0, row0+rows), columns [col0, col0+cols).
  Eigen::MatrixXcd block(int row0, int rows, int col0, int cols, double t) const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// c(t) = V exp(-i Lambda t) V^T c(0) from the tridiagonal eigendecomposition.
EvolutionResult evolve_eig(const KrylovChain& chain, const StateVector& psi0,
                           std::span<const double> times);
EvolutionResult evolve_eig(const ChainPropagator& propagator, const StateVector& psi0,
                           std::span<const double> times);

/// Closed-form propagator of the Gaussian ensemble-only chain b_n = sigma sqrt(n):
/// U_nm(t) = exp(-s^2/2) sqrt(min!/max!) (-i s)^|n-m| L_min^(|n-m|)(s^2), s = sigma t.
Complex laguerre_element(double sigma, int n, int m, double t);
/// (n_max+1) x (n_max+1) matrix of the closed-form propagator at time t.
Eigen::MatrixXcd laguerre_matrix(double sigma, double t, int n_max);

EvolutionResult evolve_laguerre(double sigma, const StateVector& psi0, std::span<const double> times,
                                int n_max);
/// As above after checking that `coeffs` is a Gaussian ensemble-only chain;
/// throws UnsupportedOperation otherwise.
EvolutionResult evolve_laguerre(const ChainCoefficients& coeffs, const StateVector& psi0,
                                std::span<const double> times, int n_max);

/// Spectral-integral propagator U_nm(t) = int exp(-i x t) pi_n(x) pi_m(x) dmu(x),
/// evaluated with the Gauss rule of order `quadrature_order` (Golub-Welsch on
/// the ensemble-only Jacobi matrix; 0 means coeffs.size()) and orthonormal
/// polynomial values read from the Jacobi eigenvectors. Heavy-tailed families are
/// rejected; a quadrature order below the state dimension is an accuracy error.
EvolutionResult evolve_spectral(const ChainCoefficients& coeffs, const SpectralDistribution& dist,
                                const StateVector& psi0, std::span<const double> times,
                                int quadrature_order = 0);

}  // namespace ekrylov
