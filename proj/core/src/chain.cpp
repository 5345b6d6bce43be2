#include "ekrylov/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "ekrylov/errors.hpp"

namespace ekrylov {

Eigen::MatrixXd KrylovChain::dense() const {
  const int m = dimension();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  h.diagonal() = diagonal;
  for (int k = 0; k + 1 < m; ++k) {
    h(k, k + 1) = offdiagonal[k];
    h(k + 1, k) = offdiagonal[k];
  }
  return h;
}

KrylovChain build_chain(const ChainCoefficients& coeffs, int M, Frame frame) {
  if (M < 2) throw InvalidArgument("build_chain: M must be >= 2");
  int m = M;
  bool clipped = false;
  if (coeffs.size() < M) {
    if (!coeffs.terminated) {
      std::ostringstream msg;
      msg << "build_chain: M = " << M << " needs " << M - 1 << " betas but only "
          << coeffs.betas.size() << " are available";
      throw InvalidArgument(msg.str());
    }
    m = coeffs.size();
    clipped = true;
    if (m < 2) throw InvalidArgument("build_chain: terminated chain has fewer than two sites");
  }
  if (static_cast<int>(coeffs.betas.size()) < m - 1)
    throw InvalidArgument("build_chain: coefficient set is inconsistent (betas shorter than alphas - 1)");

  KrylovChain chain;
  chain.coeffs = coeffs;
  chain.frame = frame;
  chain.frame_shift = frame == Frame::Rotating ? coeffs.center : 0.0;
  chain.requested_dimension = M;
  chain.clipped = clipped;
  chain.diagonal.resize(m);
  chain.offdiagonal.resize(m - 1);
  for (int n = 0; n < m; ++n) chain.diagonal[n] = coeffs.alphas[n] - chain.frame_shift;
  for (int k = 0; k + 1 < m; ++k) chain.offdiagonal[k] = coeffs.betas[k];

  const double vmax = 2.0 * chain.offdiagonal.cwiseAbs().maxCoeff();
  chain.reflection_time = vmax > 0.0 ? m / vmax : std::numeric_limits<double>::infinity();
  return chain;
}

std::optional<double> asymptotic_velocity(const SpectralDistribution& dist) {
  if (const auto* a = std::get_if<QGaussianAskey>(&dist)) {
    if (a->q < 1.0) return 2.0 * a->sigma / std::sqrt(1.0 - a->q);
    return std::nullopt;
  }
  // b_n -> sqrt(3) sigma / 2 for the uniform distribution.
  if (const auto* u = std::get_if<Uniform>(&dist)) return std::sqrt(3.0) * u->sigma;
  return std::nullopt;
}

VelocityProfile velocity_profile(const KrylovChain& chain) {
  VelocityProfile p;
  p.v.reserve(static_cast<std::size_t>(chain.offdiagonal.size()));
  for (Eigen::Index k = 0; k < chain.offdiagonal.size(); ++k) p.v.push_back(2.0 * std::abs(chain.offdiagonal[k]));
  p.v_max = p.v.empty() ? 0.0 : *std::max_element(p.v.begin(), p.v.end());
  return p;
}

VelocityProfile velocity_profile(const KrylovChain& chain, const SpectralDistribution& dist) {
  VelocityProfile p = velocity_profile(chain);
  p.analytic_bound = asymptotic_velocity(dist);
  return p;
}

}  // namespace ekrylov
