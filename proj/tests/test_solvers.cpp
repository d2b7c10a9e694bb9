#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "isoplete/bench.hpp"
#include "isoplete/common.hpp"
#include "isoplete/forecast.hpp"
#include "isoplete/linalg.hpp"
#include "isoplete/solvers.hpp"

using namespace isoplete;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd M(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) M(i, j) = rng.normal();
  }
  return M;
}

Eigen::MatrixXd random_low_rank(int rows, int cols, int rank, Rng& rng) {
  return random_matrix(rows, rank, rng) * random_matrix(rank, cols, rng);
}

PartialMatrix fully_observed(const Eigen::MatrixXd& M) {
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) all.emplace_back(i, j);
  }
  return PartialMatrix::observe(M, SamplingSet(static_cast<int>(M.rows()),
                                               static_cast<int>(M.cols()), all));
}

PartialMatrix sine_forecasting_instance(int m, double rho, Eigen::MatrixXd* L0_out) {
  const Eigen::MatrixXd L0 = convolution_matrix(sine_series(m));
  std::vector<int> y(static_cast<std::size_t>(m), 0);
  const int l = static_cast<int>(std::llround(rho * m));
  for (int t = 0; t < l; ++t) y[static_cast<std::size_t>(t)] = 1;
  if (L0_out) *L0_out = L0;
  return PartialMatrix::observe(L0, mask_from_convolution(y));
}

void check_non_increasing(const std::vector<double>& trace) {
  for (std::size_t k = 1; k < trace.size(); ++k) {
    CHECK(trace[k] <= trace[k - 1] + 1e-9 * std::max(1.0, std::abs(trace[k - 1])));
  }
}

}  // namespace

TEST_CASE("convex solver reproduces a fully observed matrix") {
  Rng rng(1);
  const Eigen::MatrixXd L0 = random_low_rank(12, 10, 3, rng);
  const SolveResult result = solve_convex_nuclear(fully_observed(L0));
  CHECK((result.L_hat - L0).norm() / L0.norm() < 1e-6);
  CHECK(result.fit_mse < 1e-9);
}

TEST_CASE("convex solver rejects an empty sampling set") {
  const PartialMatrix empty(SamplingSet(3, 3, {}), Eigen::VectorXd());
  CHECK_THROWS_AS(solve_convex_nuclear(empty), InvalidInputError);
}

TEST_CASE("convex completion of a gently masked sine circulant is clean") {
  Eigen::MatrixXd L0;
  const PartialMatrix partial = sine_forecasting_instance(50, 0.9, &L0);
  const SolveResult result = solve_convex_nuclear(partial);
  CHECK(psnr(L0, result.L_hat) >= 40.0);
}

TEST_CASE("convex completion breaks down at high missing rates") {
  Eigen::MatrixXd L0;
  const PartialMatrix partial = sine_forecasting_instance(50, 0.2, &L0);
  const SolveResult result = solve_convex_nuclear(partial);
  CHECK(psnr(L0, result.L_hat) < 40.0);
}

TEST_CASE("convex fit tightens as the final lambda shrinks") {
  Rng rng(3);
  const Eigen::MatrixXd L0 = random_low_rank(14, 14, 2, rng);
  const PartialMatrix partial =
      PartialMatrix::observe(L0, gen_uniform_mask(14, 14, 0.8, 5));
  double previous = std::numeric_limits<double>::max();
  for (double lambda : {1e-1, 1e-3, 1e-6}) {
    SolverConfig cfg;
    cfg.lambda = lambda * partial.values.cwiseAbs().maxCoeff();
    const SolveResult result = solve_convex_nuclear(partial, cfg);
    CHECK(result.fit_mse <= previous + 1e-15);
    previous = result.fit_mse;
  }
  CHECK(previous < 1e-10);
}

TEST_CASE("bilinear solver fits a fully observed rank-1 matrix with p = 1") {
  Rng rng(5);
  Eigen::VectorXd u = random_matrix(6, 1, rng);
  Eigen::VectorXd v = random_matrix(5, 1, rng);
  const Eigen::MatrixXd L0 = u * v.transpose();
  SolverConfig cfg;
  cfg.p = 1;
  const SolveResult result = solve_bilinear_frobenius(fully_observed(L0), cfg);
  CHECK((result.L_hat - L0).norm() / L0.norm() < 1e-6);
  REQUIRE(result.factors.has_value());
  const double objective =
      0.5 * (result.factors->A.squaredNorm() + result.factors->X.squaredNorm());
  // the balanced optimum value is the nuclear norm; feasibility bounds it below
  CHECK(objective >= nuclear_norm(result.L_hat) * (1.0 - 1e-9));
  check_non_increasing(result.objective_trace);
}

TEST_CASE("bilinear solver attains the nuclear norm when the start is aligned") {
  // dictionary initialization already spans the column space, so the
  // alternating ridge steps land on the balanced optimum
  Rng rng(7);
  Eigen::VectorXd v = random_matrix(5, 1, rng);
  v.normalize();
  Eigen::MatrixXd L0 = Eigen::MatrixXd::Zero(6, 5);
  L0.row(0) = v.transpose();  // u = e1, singular value 1
  SolverConfig cfg;
  cfg.p = 1;
  cfg.max_iters = 2000;
  cfg.rel_tol = 1e-14;
  const SolveResult result = solve_bilinear_frobenius(fully_observed(L0), cfg);
  REQUIRE(result.factors.has_value());
  const double objective =
      0.5 * (result.factors->A.squaredNorm() + result.factors->X.squaredNorm());
  CHECK(objective == doctest::Approx(nuclear_norm(L0)).epsilon(1e-3));
}

TEST_CASE("bilinear solver fits but cannot identify the alpha-family example") {
  const double s = std::sqrt(3.0);
  Eigen::MatrixXd L0(2, 2);
  L0 << 1.0, s, 1.0 / s, 1.0;
  const PartialMatrix partial =
      PartialMatrix::observe(L0, SamplingSet(2, 2, {{0, 0}, {1, 1}}));
  SolverConfig cfg;
  cfg.p = 1;
  cfg.random_init = true;
  cfg.seed = 9;
  cfg.lambda = 1e-8;
  cfg.max_iters = 2000;
  const SolveResult result = solve_bilinear_frobenius(partial, cfg);
  // the observations are matched almost exactly...
  CHECK(result.fit_mse < 1e-10);
  // ...but the product is a different completion, not the target
  CHECK((result.L_hat - L0).norm() / L0.norm() > 0.3);

  // the all-ones factor pair is feasible and scores 2, strictly below the
  // exact pair's 4/sqrt(3), so the target cannot be the global optimum
  Eigen::MatrixXd A_star(2, 1), X_star(1, 2);
  A_star << 1, 1;
  X_star << 1, 1;
  CHECK((A_star * X_star)(0, 0) == doctest::Approx(L0(0, 0)));
  CHECK((A_star * X_star)(1, 1) == doctest::Approx(L0(1, 1)));
  const double all_ones_objective = 0.5 * (A_star.squaredNorm() + X_star.squaredNorm());
  const double exact_pair_objective = 4.0 / std::sqrt(3.0);
  CHECK(all_ones_objective == doctest::Approx(2.0));
  CHECK(all_ones_objective < exact_pair_objective);
}

TEST_CASE("a generous inner dimension still fits the observations") {
  Rng rng(11);
  const Eigen::MatrixXd L0 = random_low_rank(10, 10, 2, rng);
  const PartialMatrix partial =
      PartialMatrix::observe(L0, gen_diagonal_band_mask(10, 10, 0.5));
  SolverConfig cfg;
  cfg.p = 10;
  const SolveResult result = solve_bilinear_frobenius(partial, cfg);
  CHECK(result.fit_mse < 1e-6 * partial.values.cwiseAbs().maxCoeff());
}

TEST_CASE("mixed-norm solver recovers a fully observed matrix") {
  Rng rng(13);
  const Eigen::MatrixXd L0 = random_low_rank(10, 10, 3, rng);
  SolverConfig cfg;
  cfg.lambda = 1e-6 * spectral_norm(L0);
  cfg.continuation = ContinuationSchedule{0.0, 1.0};  // single fixed-lambda stage
  const SolveResult result = solve_isodp(fully_observed(L0), cfg);
  CHECK((result.L_hat - L0).norm() / L0.norm() < 1e-4);
  REQUIRE(result.factors.has_value());
  const double lambda = *cfg.lambda;
  const double objective = lambda * (nuclear_norm(result.factors->A) +
                                     0.5 * result.factors->X.squaredNorm());
  CHECK(objective >= lambda * schatten23_objective(result.L_hat) * (1.0 - 1e-9));
  check_non_increasing(result.objective_trace);
}

TEST_CASE("mixed-norm solver completes a rank-1 matrix from a uniform mask") {
  Rng rng(17);
  const Eigen::MatrixXd L0 = random_low_rank(10, 10, 1, rng);
  const PartialMatrix partial =
      PartialMatrix::observe(L0, gen_uniform_mask(10, 10, 0.6, 21));
  SolverConfig cfg;
  cfg.lambda = 1e-4;
  const SolveResult result = solve_isodp(partial, cfg);
  CHECK(psnr(L0, result.L_hat) >= 40.0);
}

TEST_CASE("mixed-norm solver rejects non-positive lambda") {
  Rng rng(19);
  const Eigen::MatrixXd L0 = random_low_rank(4, 4, 1, rng);
  SolverConfig cfg;
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(solve_isodp(fully_observed(L0), cfg), InvalidInputError);
}

TEST_CASE("objective value of the 2/3 power sum") {
  Eigen::MatrixXd M(1, 1);
  M << 8.0;
  CHECK(schatten23_objective(M) == doctest::Approx(6.0));
  CHECK(schatten23_objective(Eigen::MatrixXd::Zero(3, 3)) == doctest::Approx(0.0));
}

TEST_CASE("no feasible factorization beats the 2/3 power bound") {
  Rng rng(23);
  const Eigen::MatrixXd L0 = random_low_rank(7, 6, 2, rng);
  const double bound = schatten23_objective(L0);
  const SkinnySvd f = skinny_svd(L0);
  const int r = f.rank();
  for (int trial = 0; trial < 100; ++trial) {
    const int p = rng.uniform_int(r, 8);
    // A = U C Q^T and X = Q C^{-1} S V^T (+ an optional null component)
    // multiply back to L0 for any invertible C and orthonormal Q
    Eigen::MatrixXd C = random_matrix(r, r, rng);
    while (std::abs(C.determinant()) < 1e-3) C = random_matrix(r, r, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(p, r, rng));
    const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(p, r);
    const Eigen::MatrixXd A = f.U * C * Q.transpose();
    Eigen::MatrixXd X = Q * C.inverse() * f.S.asDiagonal() * f.V.transpose();
    if (trial % 4 == 0 && p > r) {
      const Eigen::MatrixXd null_part =
          (Eigen::MatrixXd::Identity(p, p) - Q * Q.transpose()) * random_matrix(p, static_cast<int>(L0.cols()), rng);
      X += null_part;
    }
    REQUIRE((A * X - L0).norm() / L0.norm() < 1e-8);
    CHECK(nuclear_norm(A) + 0.5 * X.squaredNorm() >= bound - 1e-9);
  }
}

TEST_CASE("alternating solvers keep their subproblems exactly optimal") {
  Rng rng(29);
  for (int run = 0; run < 20; ++run) {
    const int m = rng.uniform_int(8, 16);
    const int n = rng.uniform_int(8, 16);
    const int r = rng.uniform_int(1, 3);
    const Eigen::MatrixXd L0 = random_low_rank(m, n, r, rng);
    const PartialMatrix partial = PartialMatrix::observe(
        L0, gen_uniform_mask(m, n, 0.7, mix_seed(3000, static_cast<std::uint64_t>(run))));
    const Eigen::MatrixXd observed = partial.zero_filled();
    const Eigen::ArrayXXd mask = partial.omega.dense_mask();

    SolverConfig cfg;
    cfg.max_iters = 40;
    cfg.lambda = 1e-3 * partial.values.cwiseAbs().mean();
    cfg.continuation = ContinuationSchedule{0.0, 1.0};  // fixed lambda keeps traces monotone
    int audited = 0;
    cfg.observer = [&](const IterationSnapshot& snap) {
      // X-step: every column satisfies its ridge normal equations
      for (int j = 0; j < n; ++j) {
        const auto& rows = partial.omega.column(j);
        if (rows.empty()) continue;
        Eigen::MatrixXd A_j(static_cast<Eigen::Index>(rows.size()), snap.A_prev->cols());
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
          A_j.row(static_cast<Eigen::Index>(k)) = snap.A_prev->row(rows[k]);
          y(static_cast<Eigen::Index>(k)) = observed(rows[k], j);
        }
        const Eigen::VectorXd residual =
            (A_j.transpose() * A_j + snap.lambda * Eigen::MatrixXd::Identity(A_j.cols(), A_j.cols())) *
                snap.X->col(j) -
            A_j.transpose() * y;
        CHECK(residual.norm() < 1e-8 * std::max(1.0, y.norm()));
      }
      // A-step: the SVT output is the exact proximal point, certified by the
      // nuclear-norm subgradient inclusion
      if (snap.prox_target != nullptr) {
        const Eigen::MatrixXd gap = *snap.prox_target - *snap.A_next;
        const double tau = snap.lambda / snap.mu;
        CHECK(spectral_norm(gap) <= tau * (1.0 + 1e-8) + 1e-12);
        const double pairing = (gap.transpose() * *snap.A_next).trace();
        CHECK(std::abs(pairing - tau * nuclear_norm(*snap.A_next)) <
              1e-8 * std::max(1.0, tau * nuclear_norm(*snap.A_next)));
      }
      ++audited;
    };

    const SolveResult isodp = solve_isodp(partial, cfg);
    check_non_increasing(isodp.objective_trace);
    const SolveResult bilinear = solve_bilinear_frobenius(partial, cfg);
    check_non_increasing(bilinear.objective_trace);
    CHECK(audited > 0);
  }
}
