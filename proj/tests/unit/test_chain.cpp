#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include <ekrylov/chain.hpp>
#include <ekrylov/errors.hpp>

using namespace ekrylov;

TEST_SUITE("chain") {
  TEST_CASE("Gaussian three-site chain in the rotating frame") {
    const auto chain = build_chain(closed_form_coefficients(Gaussian{2.0, 1.0}, 8), 3);
    Eigen::Matrix3d expected;
    expected << 0, 1, 0, 1, 0, std::sqrt(2.0), 0, std::sqrt(2.0), 0;
    CHECK((chain.dense() - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(chain.frame_shift == 2.0);
    CHECK_FALSE(chain.clipped);
  }

  TEST_CASE("the dense Hamiltonian is exactly symmetric and tridiagonal") {
    const auto chain = build_chain(assemble(closed_form_coefficients(Uniform{0.3, 1.0}, 20), 0.1, 0.5), 21, Frame::Lab);
    const Eigen::MatrixXd h = chain.dense();
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < h.rows(); ++i)
      for (int j = 0; j < h.cols(); ++j)
        if (std::abs(i - j) > 1) CHECK(h(i, j) == 0.0);
  }

  TEST_CASE("terminated chains are clipped") {
    const auto chain = build_chain(closed_form_coefficients(QGaussianAskey{0.0, 1.0, -1.0}, 10), 10);
    CHECK(chain.clipped);
    CHECK(chain.dimension() == 2);
    CHECK(chain.requested_dimension == 10);
  }

  TEST_CASE("dimension errors") {
    const auto c = closed_form_coefficients(Gaussian{0.0, 1.0}, 5);
    CHECK_THROWS_AS(build_chain(c, 1), InvalidArgument);
    CHECK_THROWS_AS(build_chain(c, 6), InvalidArgument);
  }

  TEST_CASE("two-level Rabi limit") {
    ChainCoefficients single;
    single.alphas = {0.0};
    const auto c = assemble(single, 0.0, 0.8);
    const auto chain = build_chain(c, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain.dense());
    CHECK(es.eigenvalues()(1) - es.eigenvalues()(0) == doctest::Approx(1.6));
  }

  TEST_CASE("velocity profiles") {
    const auto q0 = build_chain(closed_form_coefficients(QGaussianAskey{0.0, 1.0, 0.0}, 50), 50);
    const auto p = velocity_profile(q0, QGaussianAskey{0.0, 1.0, 0.0});
    for (double v : p.v) CHECK(v == 2.0);
    CHECK(p.v_max == 2.0);
    REQUIRE(p.analytic_bound);
    CHECK(*p.analytic_bound == 2.0);

    const auto g = build_chain(closed_form_coefficients(Gaussian{0.0, 1.0}, 128), 128);
    double expected = 0.0;
    for (int n = 1; n <= 127; ++n) expected = std::max(expected, 2.0 * std::sqrt(static_cast<double>(n)));
    CHECK(velocity_profile(g).v_max == doctest::Approx(expected).epsilon(1e-15));
    CHECK_FALSE(velocity_profile(g, Gaussian{0.0, 1.0}).analytic_bound);

    const auto u = build_chain(closed_form_coefficients(Uniform{0.0, 1.0}, 2000), 2000);
    const auto pu = velocity_profile(u, Uniform{0.0, 1.0});
    CHECK(pu.v.back() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-6));
    CHECK(*pu.analytic_bound == doctest::Approx(std::sqrt(3.0)));
    CHECK(*asymptotic_velocity(QGaussianAskey{0.0, 1.0, 0.5}) == doctest::Approx(2.0 / std::sqrt(0.5)));
  }

  TEST_CASE("reflection time is M / v_max") {
    const auto chain = build_chain(closed_form_coefficients(QGaussianAskey{0.0, 1.0, 0.0}, 64), 64);
    CHECK(chain.reflection_time == doctest::Approx(32.0));
  }

  TEST_CASE("bipartite spectrum is symmetric about zero") {
    const auto chain = build_chain(closed_form_coefficients(Gaussian{5.0, 1.0}, 31), 31);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain.dense());
    const auto& ev = es.eigenvalues();
    for (int k = 0; k < ev.size(); ++k) CHECK(ev[k] == doctest::Approx(-ev[ev.size() - 1 - k]).scale(1.0).epsilon(1e-12));
  }

  TEST_CASE("spectral radius bounds the largest hopping") {
    const auto chain = build_chain(closed_form_coefficients(Uniform{0.0, 1.0}, 40), 40);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain.dense());
    CHECK(es.eigenvalues().cwiseAbs().maxCoeff() >= chain.offdiagonal.maxCoeff());
  }

  TEST_CASE("changing frame shifts every eigenvalue by the centre") {
    const auto c = closed_form_coefficients(QGaussianAskey{1.7, 1.0, 0.3}, 25);
    const auto lab = build_chain(c, 25, Frame::Lab);
    const auto rot = build_chain(c, 25, Frame::Rotating);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a(lab.dense()), b(rot.dense());
    CHECK(((a.eigenvalues() - b.eigenvalues()).array() - 1.7).abs().maxCoeff() < 1e-12);
    const auto again = build_chain(c, 25, Frame::Lab);
    CHECK((again.dense() - lab.dense()).cwiseAbs().maxCoeff() == 0.0);
  }
}
