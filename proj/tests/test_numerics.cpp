#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sdss/numerics.hpp"

using namespace sdss;

TEST_CASE("mat_exp closed forms") {
  Matrix zero = Matrix::Zero(2, 2);
  CHECK((mat_exp(zero, 1.0) - Matrix::Identity(2, 2)).norm() == 0.0);

  Matrix nilpotent(2, 2);
  nilpotent << 0, 1, 0, 0;
  const double tau = 0.37;
  Matrix expected(2, 2);
  expected << 1, tau, 0, 1;
  CHECK((mat_exp(nilpotent, tau) - expected).norm() < 1e-14);

  Matrix scalar(1, 1);
  scalar << -1.0;
  CHECK(mat_exp(scalar, 1.0)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("mat_exp validation") {
  CHECK_THROWS_AS(mat_exp(Matrix::Zero(2, 3), 1.0), NumericsError);
  Matrix bad(1, 1);
  bad << std::nan("");
  CHECK_THROWS_AS(mat_exp(bad, 1.0), NumericsError);
  CHECK_THROWS_AS(mat_exp(Matrix::Zero(1, 1), std::nan("")), NumericsError);
}

TEST_CASE("mat_exp semigroup property on random stable matrices") {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 5);
    const Matrix A = oracles::random_stable_continuous(gen, n);
    const double t1 = 0.3 + 0.1 * rep;
    const double t2 = 1.1;
    const Matrix lhs = mat_exp(A, t1) * mat_exp(A, t2);
    const Matrix rhs = mat_exp(A, t1 + t2);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("mat_exp matches independent Taylor oracle") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix A = oracles::random_matrix(gen, 4, 4);
    const Matrix got = mat_exp(A, 0.9);
    const Matrix want = oracles::taylor_exp(A * 0.9);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-11 * want.cwiseAbs().maxCoeff() + 1e-13);
  }
}

TEST_CASE("discretize_pair closed forms") {
  SUBCASE("A = 0 gives G = I, H = tau B") {
    Matrix A = Matrix::Zero(3, 3);
    Matrix B = Matrix::Ones(3, 2);
    auto [G, H] = discretize_pair(A, B, 0.25);
    CHECK((G - Matrix::Identity(3, 3)).norm() < 1e-14);
    CHECK((H - 0.25 * B).norm() < 1e-14);
  }
  SUBCASE("scalar closed form") {
    Matrix A(1, 1), B(1, 1);
    A << -0.8;
    B << 1.0;
    const double tau = 0.6;
    auto [G, H] = discretize_pair(A, B, tau);
    CHECK(G(0, 0) == doctest::Approx(std::exp(-0.8 * tau)).epsilon(1e-12));
    CHECK(H(0, 0) ==
          doctest::Approx((std::exp(-0.8 * tau) - 1.0) / -0.8).epsilon(1e-12));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(discretize_pair(Matrix::Zero(2, 2), Matrix::Zero(3, 1), 0.1),
                    NumericsError);
    CHECK_THROWS_AS(discretize_pair(Matrix::Zero(2, 2), Matrix::Zero(2, 1), 0.0),
                    NumericsError);
  }
}

TEST_CASE("discretize_pair matches Simpson quadrature on a random 3x3 pair") {
  std::mt19937_64 gen(3);
  const Matrix A = oracles::random_matrix(gen, 3, 3);
  const Matrix B = oracles::random_matrix(gen, 3, 2);
  const double tau = 0.7;
  auto [G, H] = discretize_pair(A, B, tau);
  const Matrix H_ref = oracles::simpson_zoh_input(A, B, tau, 10000);
  CHECK((H - H_ref).cwiseAbs().maxCoeff() <
        1e-8 * std::max(1.0, H_ref.cwiseAbs().maxCoeff()));
  CHECK((G - oracles::taylor_exp(A * tau)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("discretize_pair small-tau limit") {
  std::mt19937_64 gen(5);
  const Matrix A = oracles::random_matrix(gen, 4, 4);
  const Matrix B = oracles::random_matrix(gen, 4, 2);
  auto [G, H] = discretize_pair(A, B, 1e-8);
  CHECK((G - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(H.cwiseAbs().maxCoeff() <= 1e-6 * B.cwiseAbs().maxCoeff());
}

TEST_CASE("spectrum basics") {
  CHECK(spectrum(Matrix::Identity(3, 3)).spectral_radius ==
        doctest::Approx(1.0).epsilon(1e-12));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.5;
  diag(1, 1) = 1.2;
  CHECK(spectrum(diag).spectral_radius == doctest::Approx(1.2).epsilon(1e-12));

  // companion matrix of s^2 - s - 1: spectral radius is the golden ratio
  Matrix companion(2, 2);
  companion << 1, 1, 1, 0;
  CHECK(spectrum(companion).spectral_radius ==
        doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));

  CHECK(spectrum(diag).eigenvalues.size() == 2);
}

TEST_CASE("discrete Lyapunov closed forms") {
  SUBCASE("G = 0 reduces to M = Q") {
    const auto sol =
        solve_discrete_lyapunov(Matrix::Zero(3, 3), Matrix::Identity(3, 3));
    CHECK((sol.solution - Matrix::Identity(3, 3)).norm() < 1e-12);
    CHECK(sol.positive_definite);
  }
  SUBCASE("stable scalar") {
    Matrix g(1, 1), q(1, 1);
    g << 0.5;
    q << 1.0;
    const auto sol = solve_discrete_lyapunov(g, q);
    CHECK(sol.solution(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(sol.positive_definite);
  }
  SUBCASE("unstable scalar is not positive definite") {
    Matrix g(1, 1), q(1, 1);
    g << 2.0;
    q << 1.0;
    const auto sol = solve_discrete_lyapunov(g, q);
    CHECK(sol.solution(0, 0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(sol.positive_definite);
  }
  SUBCASE("singular pairing is reported distinctly") {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = 2.0;
    g(1, 1) = 0.5;  // 2 * 0.5 = 1
    CHECK_THROWS_AS(solve_discrete_lyapunov(g, Matrix::Identity(2, 2)),
                    SingularLyapunovError);
  }
  SUBCASE("Q validation") {
    Matrix q(2, 2);
    q << 1, 2, 3, 4;
    CHECK_THROWS_AS(solve_discrete_lyapunov(Matrix::Zero(2, 2), q),
                    NumericsError);
  }
}

TEST_CASE("Lyapunov PD solution iff radius below one") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> radius_dist(0.5, 1.5);
  for (int rep = 0; rep < 60; ++rep) {
    double rho = radius_dist(gen);
    if (std::fabs(rho - 1.0) <= 1e-6) continue;
    const Matrix M = oracles::random_with_radius(gen, 3, rho);
    bool pd = false;
    try {
      pd = solve_discrete_lyapunov(M, Matrix::Identity(3, 3)).positive_definite;
    } catch (const SingularLyapunovError&) {
      pd = false;  // no PD certificate exists either way
    }
    CHECK(pd == (rho < 1.0));
  }
}

TEST_CASE("beta_quantile anchors") {
  CHECK(beta_quantile(0.5, 1, 1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(beta_quantile(0.25, 2, 1) == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(beta_quantile(0.0, 3, 4) == 0.0);
  CHECK(beta_quantile(1.0, 3, 4) == 1.0);
  CHECK_THROWS_AS(beta_quantile(-0.1, 1, 1), NumericsError);
  CHECK_THROWS_AS(beta_quantile(0.5, 0.0, 1), NumericsError);
}

TEST_CASE("beta_quantile agrees with numeric CDF inversion") {
  const double got = beta_quantile(0.5, 5, 7);
  // bisect the quadrature CDF
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (oracles::beta_cdf_quadrature(mid, 5, 7, 20000) < 0.5) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  CHECK(got == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
}

TEST_CASE("beta_quantile monotone in p") {
  double last = 0.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    const double q = beta_quantile(p, 3.2, 1.7);
    CHECK(q >= last);
    last = q;
  }
}

TEST_CASE("fd_jacobian") {
  SUBCASE("linear map is exact") {
    std::mt19937_64 gen(23);
    const Matrix A = oracles::random_matrix(gen, 3, 3);
    const Vector x = oracles::random_matrix(gen, 3, 1);
    const Matrix J = fd_jacobian([&](const Vector& v) { return A * v; }, x);
    CHECK((J - A).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("scalar square") {
    Vector x(1);
    x << 3.0;
    const Matrix J = fd_jacobian(
        [](const Vector& v) {
          Vector out(1);
          out << v(0) * v(0);
          return out;
        },
        x);
    CHECK(J(0, 0) == doctest::Approx(6.0).epsilon(1e-6));
  }
  SUBCASE("non-finite values are reported") {
    Vector x(1);
    x << 0.0;
    CHECK_THROWS_AS(fd_jacobian(
                        [](const Vector&) {
                          Vector out(1);
                          out << std::nan("");
                          return out;
                        },
                        x),
                    NumericsError);
  }
}
