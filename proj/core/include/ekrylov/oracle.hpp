#pragma once

#include <span>

#include <Eigen/Core>

#include "ekrylov/propagate.hpp"
#include "ekrylov/recursion.hpp"
#include "ekrylov/spectra.hpp"

namespace ekrylov {

/// Largest ensemble the dense oracle accepts.
inline constexpr int kOracleMaxSpins = 5000;

/// Single-excitation Hamiltonian on {|0> photon, |j> spin j}: arrowhead with
/// H(0,0) = omega_c, H(j,j) = omega_j, H(0,j) = H(j,0) = g_j.
struct RestrictedHamiltonian {
  Eigen::MatrixXd matrix;
  double omega_c = 0.0;
  /// g^2-weighted mean spin frequency.
  double center = 0.0;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  int spins() const { return dimension() - 1; }
};

RestrictedHamiltonian build_restricted(const Discrete& ensemble, double omega_c);

/// Photon state |0>.
Eigen::VectorXd photon_state(const RestrictedHamiltonian& h);
/// Bright state sum_j g_j |j> / g_eff.
Eigen::VectorXd bright_state(const RestrictedHamiltonian& h);

struct LanczosResult {
  ChainCoefficients coeffs;
  /// Orthonormal Krylov vectors as columns.
  Eigen::MatrixXd basis;
};

/// Lanczos with two passes of full reorthogonalisation per step. A beta below
/// 1e-13 ||H|| ends the chain (coeffs.terminated), as does a request for more
/// sites than the space has. The coefficients carry
/// provenance Lanczos, the given mode and centre, and g_eff = 0.
LanczosResult explicit_lanczos(const Eigen::MatrixXd& h, const Eigen::VectorXd& start, int M,
                               ChainMode mode = ChainMode::EnsembleOnly, double center = 0.0);

/// Lanczos from the photon state: cavity-coupled coefficients with g_eff = beta(1).
LanczosResult explicit_lanczos(const RestrictedHamiltonian& h, int M);

/// Exact evolution by dense eigendecomposition.
/// Throws InvalidArgument when the ensemble exceeds kOracleMaxSpins.
EvolutionResult evolve_full(const RestrictedHamiltonian& h, const StateVector& psi0,
                            std::span<const double> times);

/// Exact evolution under an arbitrary dense symmetric matrix.
EvolutionResult evolve_dense(const Eigen::MatrixXd& h, const StateVector& psi0, std::span<const double> times);

/// Krylov amplitudes <phi_n | psi(t)> of a full-space evolution.
Eigen::MatrixXcd project(const EvolutionResult& full, const Eigen::MatrixXd& basis);

}  // namespace ekrylov
