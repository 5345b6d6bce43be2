#include <doctest.h>

#include <cmath>

#include <ekrylov/errors.hpp>
#include <ekrylov/oracle.hpp>
#include <ekrylov/recursion.hpp>

#include "reference.hpp"

using namespace ekrylov;

namespace {

Discrete to_discrete(const reference::Ensemble& e) {
  Discrete d;
  for (std::size_t j = 0; j < e.omega.size(); ++j) d.spins.push_back({e.omega[j], e.g[j]});
  return d;
}

}  // namespace

TEST_SUITE("recursion") {
  TEST_CASE("closed-form coefficients") {
    CHECK(closed_form_beta(Gaussian{0.0, 1.0}, 4) == 2.0);
    for (int n = 1; n <= 20; ++n) CHECK(closed_form_beta(QGaussianAskey{0.0, 1.0, 0.0}, n) == 1.0);
    CHECK(closed_form_beta(QGaussianAskey{0.0, 1.0, -1.0}, 2) == 0.0);
    CHECK(closed_form_beta(QGaussianAskey{0.0, 1.0, -1.0}, 3) == 1.0);
    CHECK(closed_form_beta(Uniform{0.0, 1.0}, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(closed_form_beta(Uniform{0.0, 2.0}, 2) == doctest::Approx(2.0 * 2.0 * std::sqrt(3.0) / std::sqrt(15.0)));
  }

  TEST_CASE("closed form rejects families without one") {
    CHECK_THROWS_AS(closed_form_coefficients(TsallisQGaussian{0.0, 1.0, 1.2}, 4), UnsupportedOperation);
    CHECK_THROWS_AS(closed_form_coefficients(Discrete{{{0.0, 1.0}, {1.0, 1.0}}}, 2), UnsupportedOperation);
    CHECK_THROWS_AS(closed_form_coefficients(Gaussian{0.0, 1.0}, 1), InvalidArgument);
  }

  TEST_CASE("q = -1 chain terminates after the first bond") {
    const auto c = closed_form_coefficients(QGaussianAskey{0.5, 1.0, -1.0}, 10);
    CHECK(c.terminated);
    CHECK(c.size() == 2);
    REQUIRE(c.betas.size() == 1);
    CHECK(c.betas[0] == 1.0);
    CHECK(c.valid_order == 1);
  }

  TEST_CASE("symmetric distributions give constant alphas") {
    const auto c = closed_form_coefficients(Gaussian{0.7, 1.3}, 6);
    for (double a : c.alphas) CHECK(a == 0.7);
    const auto h = hankel_coefficients(moments(Uniform{-0.2, 1.0}, 12), 7);
    for (double a : h.alphas) CHECK(a == doctest::Approx(-0.2).epsilon(1e-14));
  }

  TEST_CASE("Hankel route on Gaussian moments") {
    const auto c = hankel_coefficients(moments(Gaussian{0.0, 1.0}, 6), 4);
    REQUIRE(c.betas.size() == 3);
    CHECK(c.betas[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(c.betas[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(c.betas[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(c.provenance == Provenance::Hankel);
  }

  TEST_CASE("Hankel route reports divergent Tsallis moments") {
    const TsallisQGaussian t{0.0, 1.0, 1.2};
    try {
      hankel_coefficients(moments(t, 14), 8);
      FAIL("expected DivergentMoment");
    } catch (const DivergentMoment& e) {
      CHECK(e.largest_valid() == 4);
    }
    const auto ok = hankel_coefficients(moments(t, 8), 5);
    const auto m = moments(t, 2);
    CHECK(ok.betas[0] == doctest::Approx(std::sqrt(static_cast<double>(m[2] / m[0]))).epsilon(1e-14));
    CHECK(ok.valid_order == 4);
    CHECK_THROWS_AS(hankel_coefficients(moments(TsallisQGaussian{0.0, 1.0, 2.0}, 2), 2), DivergentMoment);
  }

  TEST_CASE("Hankel route flags lost precision") {
    try {
      hankel_coefficients(moments(Gaussian{0.0, 1.0}, 2 * 60 - 2), 60);
      FAIL("expected ConditioningError");
    } catch (const ConditioningError& e) {
      CHECK(e.valid_order() >= 12);
      CHECK(e.valid_order() < 59);
    }
  }

  TEST_CASE("Hankel route on a raw discrete measure carries g_eff") {
    const Discrete d{{{-1.0, 0.6}, {0.0, 0.3}, {1.5, 0.9}}};
    const auto h = hankel_coefficients(moments(d, 5), 3);
    double g2 = 0;
    for (const auto& s : d.spins) g2 += s.g * s.g;
    CHECK(h.g_eff == doctest::Approx(std::sqrt(g2)));
    const auto s = stieltjes_coefficients(d, 3);
    CHECK(max_relative_deviation(h, s, 1.0) < 1e-12);
  }

  TEST_CASE("Hankel route closes the chain on a finite support") {
    const Discrete d{{{-1.0, 1.0}, {1.0, 1.0}}};
    const auto h = hankel_coefficients(moments(d, 6, true), 4);
    CHECK(h.terminated);
    CHECK(h.size() == 2);
    CHECK(h.betas[0] == doctest::Approx(1.0));
  }

  TEST_CASE("Stieltjes on a two-point measure") {
    const double g = 1.0 / std::sqrt(2.0);
    const auto c = stieltjes_coefficients(Discrete{{{-1.0, g}, {1.0, g}}}, 2);
    REQUIRE(c.size() == 2);
    CHECK(c.alphas[0] == doctest::Approx(0.0).scale(1.0));
    CHECK(c.alphas[1] == doctest::Approx(0.0).scale(1.0));
    CHECK(c.betas[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.g_eff == doctest::Approx(1.0));
  }

  TEST_CASE("Stieltjes on a single spin and on exhausted ensembles") {
    const auto one = stieltjes_coefficients(Discrete{{{0.4, 2.0}}}, 1);
    CHECK(one.size() == 1);
    CHECK(one.alphas[0] == 0.4);
    CHECK(one.betas.empty());
    CHECK_THROWS_AS(stieltjes_coefficients(Discrete{{{0.0, 1.0}, {1.0, 1.0}}}, 3), ChainExhausted);
  }

  TEST_CASE("Stieltjes stops on a repeated frequency") {
    const Discrete d{{{-1.0, 1.0}, {-1.0, 0.5}, {1.0, 1.0}, {1.0, 2.0}}};
    const auto c = stieltjes_coefficients(d, 4);
    CHECK(c.terminated);
    CHECK(c.size() == 2);
  }

  TEST_CASE("Stieltjes agrees with a textbook long-double recurrence") {
    for (unsigned seed : {1u, 2u, 3u}) {
      const auto e = reference::random_ensemble(10, seed);
      std::vector<double> w;
      for (double g : e.g) w.push_back(g * g);
      const auto [alphas, betas] = reference::stieltjes(e.omega, w, 8);
      const auto c = stieltjes_coefficients(to_discrete(e), 8);
      for (int n = 0; n < 8; ++n) CHECK(c.alphas[n] == doctest::Approx(alphas[n]).epsilon(1e-10).scale(1.0));
      for (int k = 0; k < 7; ++k) CHECK(c.betas[k] == doctest::Approx(betas[k]).epsilon(1e-10));
    }
  }

  TEST_CASE("Stieltjes equals explicit Lanczos for N <= 12") {
    for (int n = 2; n <= 12; n += 2) {
      const auto e = reference::random_ensemble(n, 100 + n);
      const Discrete d = to_discrete(e);
      const auto s = stieltjes_coefficients(d, n);
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd start(n);
      for (int j = 0; j < n; ++j) {
        h(j, j) = e.omega[j];
        start[j] = e.g[j];
      }
      start.normalize();
      const auto l = explicit_lanczos(h, start, n);
      CHECK(max_relative_deviation(s, l.coeffs, 1.0) < 1e-10);
    }
  }

  TEST_CASE("assemble prepends the photon") {
    const auto b = closed_form_coefficients(Gaussian{0.0, 1.0}, 4);
    const auto c = assemble(b, 0.3, 2.0);
    CHECK(c.mode == ChainMode::CavityCoupled);
    CHECK(c.alphas.front() == 0.3);
    REQUIRE(c.betas.size() == 4);
    CHECK(c.betas[0] == 2.0);
    CHECK(c.betas[1] == 1.0);
    CHECK(c.betas[2] == doctest::Approx(std::sqrt(2.0)));
    CHECK(c.beta(1) == 2.0);
    CHECK(c.valid_order == b.valid_order + 1);
    CHECK(assemble(b, 0.0, 0.0).betas[0] == 0.0);
    const auto resonant = assemble(b, 0.0, 1.0);
    for (double a : resonant.alphas) CHECK(a == 0.0);
    CHECK_THROWS_AS(assemble(c, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(assemble(b, 0.0, -1.0), InvalidArgument);
  }

  TEST_CASE("route agreement between closed forms and Hankel determinants") {
    const std::vector<SpectralDistribution> families = {
        Gaussian{0.0, 1.0},           QGaussianAskey{0.0, 1.0, -0.5}, QGaussianAskey{0.0, 1.0, 0.0},
        QGaussianAskey{0.0, 1.0, 0.5}, QGaussianAskey{0.0, 1.0, 1.0},  Uniform{0.0, 1.0}};
    for (const auto& d : families) {
      const auto closed = closed_form_coefficients(d, 13);
      const auto hankel = hankel_coefficients(moments(d, 24), 13);
      INFO(family_name(d));
      CHECK(max_relative_deviation(closed, hankel, 1.0) <= 1e-10);
    }
  }

  TEST_CASE("bounded families approach their limits monotonically") {
    double prev = 2.0;
    for (int n = 1; n <= 200; ++n) {
      const double b = closed_form_beta(Uniform{0.0, 1.0}, n);
      CHECK(b < prev);
      CHECK(b > std::sqrt(3.0) / 2.0);
      prev = b;
    }
    CHECK(prev == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-5));
    for (double q : {-0.5, 0.0, 0.5, 0.9}) {
      const double limit = 1.0 / std::sqrt(1.0 - q);
      double last = 0.0;
      for (int n = 1; n <= 400; ++n) {
        const double b = closed_form_beta(QGaussianAskey{0.0, 1.0, q}, n);
        if (q >= 0.0) {
          CHECK(b >= last);
          CHECK(b <= limit + 1e-15);
        }
        last = b;
      }
      CHECK(last == doctest::Approx(limit).epsilon(1e-12));
    }
  }

  TEST_CASE("q = 1 Askey coefficients equal the Gaussian ones") {
    const auto a = closed_form_coefficients(QGaussianAskey{0.0, 1.5, 1.0}, 30);
    const auto g = closed_form_coefficients(Gaussian{0.0, 1.5}, 30);
    CHECK(a.betas == g.betas);
  }

  TEST_CASE("names round-trip") {
    for (auto p : {Provenance::ClosedForm, Provenance::Hankel, Provenance::Stieltjes, Provenance::Lanczos,
                   Provenance::Imported})
      CHECK(parse_provenance(to_string(p)) == p);
    CHECK(parse_chain_mode(to_string(ChainMode::CavityCoupled)) == ChainMode::CavityCoupled);
    CHECK_THROWS_AS(parse_chain_mode("sideways"), InvalidArgument);
  }
}
