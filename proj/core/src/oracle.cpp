#include "ekrylov/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ekrylov/errors.hpp"

namespace ekrylov {

namespace {

constexpr double kBreakdown = 1e-13;

void guard_size(int spins) {
  if (spins > kOracleMaxSpins) {
    std::ostringstream msg;
    msg << "oracle: " << spins << " spins exceed the dense-oracle limit of " << kOracleMaxSpins;
    throw InvalidArgument(msg.str());
  }
}

}  // namespace

RestrictedHamiltonian build_restricted(const Discrete& ensemble, double omega_c) {
  const int n = static_cast<int>(ensemble.spins.size());
  if (n < 1) throw InvalidArgument("build_restricted: ensemble is empty");
  guard_size(n);
  RestrictedHamiltonian h;
  h.omega_c = omega_c;
  h.center = center(SpectralDistribution{ensemble});
  h.matrix = Eigen::MatrixXd::Zero(n + 1, n + 1);
  h.matrix(0, 0) = omega_c;
  for (int j = 0; j < n; ++j) {
    h.matrix(j + 1, j + 1) = ensemble.spins[j].omega;
    h.matrix(0, j + 1) = ensemble.spins[j].g;
    h.matrix(j + 1, 0) = ensemble.spins[j].g;
  }
  return h;
}

Eigen::VectorXd photon_state(const RestrictedHamiltonian& h) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(h.dimension());
  v[0] = 1.0;
  return v;
}

Eigen::VectorXd bright_state(const RestrictedHamiltonian& h) {
  Eigen::VectorXd v = h.matrix.col(0);
  v[0] = 0.0;
  const double norm = v.norm();
  if (norm == 0.0) throw InvalidArgument("bright_state: all couplings vanish");
  return v / norm;
}

LanczosResult explicit_lanczos(const Eigen::MatrixXd& h, const Eigen::VectorXd& start, int M, ChainMode mode,
                               double center) {
  const int dim = static_cast<int>(h.rows());
  if (M < 1) throw InvalidArgument("explicit_lanczos: M must be >= 1");
  const int m = std::min(M, dim);
  if (std::abs(start.norm() - 1.0) > 1e-12) throw InvalidArgument("explicit_lanczos: start vector is not normalised");
  const double scale = h.cwiseAbs().rowwise().sum().maxCoeff();

  LanczosResult out;
  auto& c = out.coeffs;
  c.mode = mode;
  c.center = center;
  c.provenance = Provenance::Lanczos;
  Eigen::MatrixXd q(dim, m);
  q.col(0) = start;
  int n = 0;
  for (;; ++n) {
    Eigen::VectorXd w = h * q.col(n);
    const double alpha = q.col(n).dot(w);
    c.alphas.push_back(alpha);
    if (n + 1 == m) {
      c.terminated = M > dim;
      break;
    }
    w -= alpha * q.col(n);
    if (n > 0) w -= c.betas.back() * q.col(n - 1);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(n + 1) * (q.leftCols(n + 1).transpose() * w);
    const double beta = w.norm();
    if (beta < kBreakdown * scale) {
      c.terminated = true;
      break;
    }
    c.betas.push_back(beta);
    q.col(n + 1) = w / beta;
  }
  out.basis = q.leftCols(n + 1);
  c.valid_order = static_cast<int>(c.betas.size());
  return out;
}

LanczosResult explicit_lanczos(const RestrictedHamiltonian& h, int M) {
  LanczosResult r = explicit_lanczos(h.matrix, photon_state(h), M, ChainMode::CavityCoupled, h.center);
  r.coeffs.g_eff = r.coeffs.betas.empty() ? 0.0 : r.coeffs.betas[0];
  return r;
}

EvolutionResult evolve_full(const RestrictedHamiltonian& h, const StateVector& psi0,
                            std::span<const double> times) {
  guard_size(h.spins());
  return evolve_dense(h.matrix, psi0, times);
}

EvolutionResult evolve_dense(const Eigen::MatrixXd& h, const StateVector& psi0, std::span<const double> times) {
  guard_size(static_cast<int>(h.rows()) - 1);
  if (psi0.dimension() != h.rows()) throw InvalidArgument("oracle evolution: state dimension mismatch");
  if (times.empty()) throw InvalidArgument("oracle evolution: time grid is empty");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw InvalidArgument("oracle evolution: time grid must be strictly increasing");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalFailure("oracle evolution: dense eigensolver failed");
  const Eigen::MatrixXcd v = solver.eigenvectors().cast<Complex>();
  const Eigen::VectorXcd modes = v.adjoint() * psi0.amplitudes;

  EvolutionResult r;
  r.method = Method::FullSpace;
  r.times.assign(times.begin(), times.end());
  r.amplitudes.resize(static_cast<Eigen::Index>(times.size()), h.rows());
  Eigen::VectorXcd phased(modes.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (Eigen::Index i = 0; i < modes.size(); ++i)
      phased[i] = std::polar(1.0, -solver.eigenvalues()[i] * times[k]) * modes[i];
    r.amplitudes.row(static_cast<Eigen::Index>(k)) = (v * phased).transpose();
  }
  for (Eigen::Index k = 0; k < r.amplitudes.rows(); ++k)
    r.norm_drift = std::max(r.norm_drift, std::abs(1.0 - r.amplitudes.row(k).squaredNorm()));
  return r;
}

Eigen::MatrixXcd project(const EvolutionResult& full, const Eigen::MatrixXd& basis) {
  if (basis.rows() != full.dimension()) throw InvalidArgument("project: basis does not match the full space");
  return full.amplitudes * basis.cast<Complex>();
}

}  // namespace ekrylov
