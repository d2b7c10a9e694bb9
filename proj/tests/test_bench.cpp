#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "isoplete/bench.hpp"
#include "isoplete/common.hpp"

using namespace isoplete;

namespace {

ExperimentGrid tiny_grid(MaskFamily family, std::uint64_t seed) {
  ExperimentGrid grid;
  grid.rank_axis = {1, 8};
  grid.fraction_axis = {0.2, 0.95};
  grid.mask_family = family;
  grid.trials = 3;
  grid.seed = seed;
  grid.size = 16;
  return grid;
}

}  // namespace

TEST_CASE("psnr of an exact recovery is capped") {
  const Eigen::MatrixXd M = Eigen::MatrixXd::Random(4, 4);
  CHECK(psnr(M, M) == doctest::Approx(300.0));
}

TEST_CASE("psnr of a uniform perturbation matches the formula") {
  Eigen::MatrixXd L0 = Eigen::MatrixXd::Zero(5, 5);
  L0(2, 3) = 1.0;  // peak 1
  const Eigen::MatrixXd L_hat = L0 + Eigen::MatrixXd::Constant(5, 5, 0.01);
  CHECK(psnr(L0, L_hat) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("psnr threshold marks the success boundary") {
  Eigen::MatrixXd L0 = Eigen::MatrixXd::Zero(3, 3);
  L0(0, 0) = 1.0;
  Eigen::MatrixXd close = L0 + Eigen::MatrixXd::Constant(3, 3, 0.009);
  Eigen::MatrixXd far = L0 + Eigen::MatrixXd::Constant(3, 3, 0.02);
  CHECK(psnr(L0, close) >= kPsnrSuccessDb);
  CHECK(psnr(L0, far) < kPsnrSuccessDb);
}

TEST_CASE("mse basics") {
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 1, 2, 3;
  CHECK(mse(a, b) == doctest::Approx(0.0));
  CHECK(mse(a, b.array() + 1.0) == doctest::Approx(1.0));

  Rng rng(2);
  Eigen::VectorXd u(50), v(50);
  for (int k = 0; k < 50; ++k) {
    u(k) = rng.normal();
    v(k) = rng.normal();
  }
  double direct = 0.0;
  for (int k = 49; k >= 0; --k) direct += (u(k) - v(k)) * (u(k) - v(k));
  CHECK(mse(u, v) == doctest::Approx(direct / 50.0).epsilon(1e-12));
}

TEST_CASE("rank estimates") {
  CHECK(rank_estimate(Eigen::MatrixXd::Zero(3, 3)) == 0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(3, 3);
  D(0, 0) = 1.0;
  D(1, 1) = 1e-2;
  D(2, 2) = 1e-5;
  CHECK(rank_estimate(D) == 2);
  CHECK(rank_estimate(convolution_matrix(sine_series(20))) == 2);
}

TEST_CASE("metrics ignore entry order") {
  Rng rng(3);
  Eigen::MatrixXd A(4, 4), B(4, 4);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) {
      A(i, j) = rng.normal();
      B(i, j) = rng.normal();
    }
  }
  // permuting rows and columns jointly preserves the error statistics
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
  perm.setIdentity();
  std::swap(perm.indices()(0), perm.indices()(3));
  const Eigen::MatrixXd Ap = perm * A * perm;
  const Eigen::MatrixXd Bp = perm * B * perm;
  CHECK(psnr(A, B) == doctest::Approx(psnr(Ap, Bp)));
  CHECK(rank_estimate(A) == rank_estimate(perm * A));
}

TEST_CASE("phase grid runs are reproducible and sane") {
  const ExperimentGrid grid = tiny_grid(MaskFamily::uniform, 77);
  SolverConfig quick;
  quick.max_iters = 120;
  quick.rel_tol = 1e-5;
  const PhaseGridReport a = run_phase_grid(grid, {SolverKind::isodp}, quick);
  const PhaseGridReport b = run_phase_grid(grid, {SolverKind::isodp}, quick);
  REQUIRE(a.cells.size() == 4);
  for (std::size_t c = 0; c < a.cells.size(); ++c) {
    for (int t = 0; t < grid.trials; ++t) {
      CHECK(a.cells[c].outcomes[0][static_cast<std::size_t>(t)].psnr_db ==
            b.cells[c].outcomes[0][static_cast<std::size_t>(t)].psnr_db);
    }
  }

  // r0 = 8 at fraction 0.2 leaves fewer observations than degrees of freedom
  const PhaseCell* impossible = nullptr;
  const PhaseCell* easy = nullptr;
  for (const auto& cell : a.cells) {
    if (cell.r0 == 8 && cell.fraction == 0.2) impossible = &cell;
    if (cell.r0 == 1 && cell.fraction == 0.95) easy = &cell;
  }
  REQUIRE(impossible != nullptr);
  REQUIRE(easy != nullptr);
  for (const auto& outcome : impossible->outcomes[0]) CHECK_FALSE(outcome.success);
  for (const auto& outcome : easy->outcomes[0]) CHECK(outcome.success);

  const std::string csv = a.to_csv();
  CHECK(csv.rfind("r0,fraction,solver,successes,trials\n", 0) == 0);
  CHECK(csv.find("isodp") != std::string::npos);
}

TEST_CASE("isomerism region matches expectations on extreme fractions") {
  ExperimentGrid grid = tiny_grid(MaskFamily::uniform, 11);
  grid.fraction_axis = {0.05, 1.0};
  grid.rank_axis = {2};
  const IsomerismRegionReport report = run_isomerism_region(grid);
  REQUIRE(report.cells.size() == 2);
  // full observation is always isomeric; 5% of a 16x16 grid starves lines
  for (bool flag : report.cells[1].isomeric) CHECK(flag);
  for (bool flag : report.cells[0].isomeric) CHECK_FALSE(flag);
  CHECK(report.to_csv().rfind("r0,fraction,isomeric,trials\n", 0) == 0);
}

TEST_CASE("condition-number sweep is monotone and size-insensitive") {
  const std::vector<double> rhos = {0.9, 0.7, 0.5, 0.3, 0.1};
  const auto rows = run_rcn_sweep({40, 80}, rhos);
  REQUIRE(rows.size() == 10);
  for (std::size_t k = 1; k < 5; ++k) CHECK(rows[k].gamma < rows[k - 1].gamma);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(std::abs(rows[k].gamma - rows[k + 5].gamma) < 0.02);
  }
  const auto full = run_rcn_sweep({30}, {1.0});
  CHECK(full[0].gamma == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rank-targeted fits hit the requested rank on full observation") {
  Rng rng(5);
  Eigen::MatrixXd B(20, 3), C(3, 20);
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 20; ++i) B(i, j) = rng.normal();
  }
  for (int j = 0; j < 20; ++j) {
    for (int i = 0; i < 3; ++i) C(i, j) = rng.normal();
  }
  const Eigen::MatrixXd L0 = B * C;
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) all.emplace_back(i, j);
  }
  const PartialMatrix partial = PartialMatrix::observe(L0, SamplingSet(20, 20, all));
  SolverConfig quick;
  quick.max_iters = 200;
  const auto rows = run_rank_constrained_fit(partial, {SolverKind::isodp, SolverKind::convex},
                                             {3}, quick, 20);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK(row.achieved);
    CHECK(row.achieved_rank == 3);
    CHECK(row.train_mse < 1e-4);
  }
}

TEST_CASE("holdout protocol orders the reference predictors") {
  const PartialMatrix ratings = synthetic_ratings(40, 30, 3, 0.5, 7);
  SolverConfig quick;
  quick.max_iters = 200;
  const auto rows = run_holdout_eval(ratings, 0.1, {SolverKind::isodp}, 7, quick);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == "random");
  CHECK(rows[1].method == "average");
  CHECK(rows[2].method == "isodp");
  CHECK(rows[2].test_mse < rows[1].test_mse);
  CHECK(rows[1].test_mse < rows[0].test_mse);
}

TEST_CASE("average predictor is exact on constant ratings") {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) pairs.emplace_back(i, j);
  }
  const SamplingSet omega(10, 10, pairs);
  const PartialMatrix ratings(omega, Eigen::VectorXd::Constant(100, 4.0));
  const auto rows = run_holdout_eval(ratings, 0.2, {}, 3);
  CHECK(rows[1].method == "average");
  CHECK(rows[1].test_mse == doctest::Approx(0.0));
}
