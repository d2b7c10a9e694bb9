#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isoplete/bench.hpp"
#include "isoplete/common.hpp"
#include "isoplete/forecast.hpp"
#include "isoplete/linalg.hpp"

using namespace isoplete;

namespace {

Eigen::VectorXd random_vector(int m, Rng& rng) {
  Eigen::VectorXd x(m);
  for (int t = 0; t < m; ++t) x(t) = rng.normal();
  return x;
}

}  // namespace

TEST_CASE("circulant embedding of a 3-vector") {
  Eigen::VectorXd x(3);
  x << 1, 2, 3;
  Eigen::MatrixXd expected(3, 3);
  expected << 1, 3, 2, 2, 1, 3, 3, 2, 1;
  CHECK((convolution_matrix(x) - expected).norm() == doctest::Approx(0.0));
}

TEST_CASE("circulant embedding of a unit vector is a permutation pattern") {
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(4);
  e1(0) = 1.0;
  const Eigen::MatrixXd C = convolution_matrix(e1);
  CHECK((C - Eigen::MatrixXd::Identity(4, 4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("sine circulant has rank two and coherence one") {
  const Eigen::MatrixXd C = convolution_matrix(sine_series(16));
  CHECK(rank_estimate(C) == 2);
  CHECK(coherence(C) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("sine circulant spectrum across sizes") {
  for (int m : {8, 16, 50, 100}) {
    const Eigen::MatrixXd C = convolution_matrix(sine_series(m));
    CHECK(rank_above(C, 1e-6 * spectral_norm(C)) == 2);
  }
}

TEST_CASE("de-embedding inverts the circulant map") {
  Rng rng(3);
  for (int m : {1, 2, 5, 12}) {
    const Eigen::VectorXd x = random_vector(m, rng);
    CHECK((deconvolve(convolution_matrix(x)) - x).norm() < 1e-12);
  }
}

TEST_CASE("orbit-mean-free noise is invisible to the de-embedding") {
  Rng rng(5);
  const int m = 6;
  const Eigen::VectorXd x = random_vector(m, rng);
  // noise whose circulant orbits each average to zero
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(m, m);
  for (int t = 0; t < m; ++t) {
    Eigen::VectorXd bump = random_vector(m, rng);
    bump.array() -= bump.mean();
    for (int j = 0; j < m; ++j) noise((t + j) % m, j) = bump(j);
  }
  CHECK((deconvolve(convolution_matrix(x) + noise) - x).norm() < 1e-10);
}

TEST_CASE("de-embedding of a generic matrix matches the direct orbit means") {
  Rng rng(7);
  const int m = 5;
  Eigen::MatrixXd L(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) L(i, j) = rng.normal();
  }
  const Eigen::VectorXd x = deconvolve(L);
  for (int t = 0; t < m; ++t) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j) acc += L((t + j) % m, j);
    CHECK(x(t) == doctest::Approx(acc / m));
  }
}

TEST_CASE("the embedding is linear") {
  Rng rng(11);
  const int m = 7;
  const Eigen::VectorXd x = random_vector(m, rng);
  const Eigen::VectorXd y = random_vector(m, rng);
  const Eigen::MatrixXd lhs = convolution_matrix(2.0 * x - 3.0 * y);
  const Eigen::MatrixXd rhs = 2.0 * convolution_matrix(x) - 3.0 * convolution_matrix(y);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("forecast with a full prefix returns the series") {
  const int m = 16;
  SeriesTask task;
  task.length = m;
  task.observed = sine_series(m);
  task.solver = SolverKind::convex;
  const ForecastResult result = forecast(task);
  CHECK((result.x_hat - task.observed).norm() < 1e-6);
}

TEST_CASE("forecast of a sine series from ninety percent of it") {
  const int m = 50;
  const Eigen::VectorXd x = sine_series(m);
  SeriesTask task;
  task.length = m;
  task.observed = x.head(45);
  task.solver = SolverKind::convex;
  const ForecastResult result = forecast(task);

  const Eigen::VectorXd tail_true = x.tail(5);
  const Eigen::VectorXd tail_hat = result.x_hat.tail(5);
  CHECK((tail_hat - tail_true).norm() / x.norm() < 0.01);
  CHECK(result.report.rank == 2);
  // every line of the embedded sampling set carries the prefix length
  CHECK(result.solve.L_hat.rows() == m);
}

TEST_CASE("forecast breaks down when most of the series is missing") {
  const int m = 50;
  const Eigen::VectorXd x = sine_series(m);
  SeriesTask task;
  task.length = m;
  task.observed = x.head(10);
  task.solver = SolverKind::convex;
  const ForecastResult result = forecast(task);
  const double err = (result.x_hat - x).norm() / x.norm();
  CHECK(err > 0.05);
}

TEST_CASE("embedded sampling set has constant line cardinality") {
  std::vector<int> y(20, 0);
  for (int t = 0; t < 13; ++t) y[static_cast<std::size_t>(t)] = 1;
  const SamplingSet omega = mask_from_convolution(y);
  for (int i = 0; i < 20; ++i) CHECK(omega.row(i).size() == 13);
  for (int j = 0; j < 20; ++j) CHECK(omega.column(j).size() == 13);
}

TEST_CASE("forecast rejects invalid prefix lengths") {
  SeriesTask task;
  task.length = 5;
  task.observed = Eigen::VectorXd();
  CHECK_THROWS_AS(forecast(task), InvalidInputError);
}
