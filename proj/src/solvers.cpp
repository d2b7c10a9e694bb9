#include "isoplete/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isoplete/linalg.hpp"

namespace isoplete {

namespace {

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& M, const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), M.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = M.row(rows[k]);
  return out;
}

Eigen::MatrixXd select_cols(const Eigen::MatrixXd& M, const std::vector<int>& cols) {
  Eigen::MatrixXd out(M.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = M.col(cols[k]);
  return out;
}

double observed_fit_mse(const Eigen::MatrixXd& L, const PartialMatrix& partial) {
  const auto& pairs = partial.omega.entries();
  if (pairs.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double diff = L(pairs[k].first, pairs[k].second) - partial.values(static_cast<Eigen::Index>(k));
    acc += diff * diff;
  }
  return acc / static_cast<double>(pairs.size());
}

double mean_observed_magnitude(const PartialMatrix& partial) {
  if (partial.values.size() == 0) return 0.0;
  return partial.values.cwiseAbs().mean();
}

double resolve_lambda(const SolverConfig& cfg, double fallback) {
  if (!cfg.lambda) return fallback;
  if (*cfg.lambda <= 0.0) throw InvalidInputError("solver: lambda must be positive");
  return *cfg.lambda;
}

// Geometric lambda ladder ending at lambda_final. A factor outside (0,1)
// requests a single fixed-lambda stage; start <= 0 means "use auto_start".
std::vector<double> lambda_ladder(const SolverConfig& cfg, double lambda_final,
                                  double auto_start) {
  const ContinuationSchedule schedule = cfg.continuation.value_or(ContinuationSchedule{});
  if (schedule.factor <= 0.0 || schedule.factor >= 1.0) return {lambda_final};
  double lambda = schedule.start_lambda > 0.0 ? schedule.start_lambda : auto_start;
  lambda = std::max(lambda, lambda_final);
  std::vector<double> ladder;
  while (lambda > lambda_final) {
    ladder.push_back(lambda);
    lambda = std::max(lambda_final, lambda * schedule.factor);
  }
  ladder.push_back(lambda_final);
  return ladder;
}

// One-SVD shrinkage that also reports the nuclear norm of its output, so the
// per-iteration trace does not need a second factorization.
struct ShrinkResult {
  Eigen::MatrixXd M;
  double nuclear = 0.0;
};

ShrinkResult svt_with_nuclear(const Eigen::MatrixXd& M, double tau) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int keep = 0;
  while (keep < sv.size() && sv(keep) > tau) ++keep;
  ShrinkResult out;
  if (keep == 0) {
    out.M = Eigen::MatrixXd::Zero(M.rows(), M.cols());
    return out;
  }
  const Eigen::VectorXd shrunk = sv.head(keep).array() - tau;
  out.M = svd.matrixU().leftCols(keep) * shrunk.asDiagonal() *
          svd.matrixV().leftCols(keep).transpose();
  out.nuclear = shrunk.sum();
  return out;
}

Eigen::MatrixXd initial_dictionary(int m, int p, const SolverConfig& cfg) {
  if (!cfg.random_init) return Eigen::MatrixXd::Identity(m, p);
  Rng rng(cfg.seed);
  Eigen::MatrixXd A(m, p);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < m; ++i) A(i, j) = scale * rng.normal();
  }
  return A;
}

// Ridge X-step shared by both bilinear solvers: column j of X solves
// (A_j^T A_j + lambda I) x = A_j^T y_j over the rows sampled in Omega^j.
Eigen::MatrixXd ridge_representation(const Eigen::MatrixXd& A, const PartialMatrix& partial,
                                     double lambda) {
  const int p = static_cast<int>(A.cols());
  const int n = partial.cols();
  const Eigen::MatrixXd observed = partial.zero_filled();
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(p, n);
  const Eigen::MatrixXd reg = lambda * Eigen::MatrixXd::Identity(p, p);
  for (int j = 0; j < n; ++j) {
    const auto& rows = partial.omega.column(j);
    if (rows.empty()) continue;  // ridge term pins the column at zero
    const Eigen::MatrixXd A_j = select_rows(A, rows);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) y(static_cast<Eigen::Index>(k)) = observed(rows[k], j);
    const Eigen::MatrixXd gram = A_j.transpose() * A_j + reg;
    X.col(j) = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(A_j.transpose() * y);
  }
  return X;
}

}  // namespace

SolveResult solve_convex_nuclear(const PartialMatrix& partial, const SolverConfig& cfg) {
  if (partial.omega.size() == 0) throw InvalidInputError("solve_convex_nuclear: empty sampling set");
  const double peak = partial.values.size() > 0 ? partial.values.cwiseAbs().maxCoeff() : 0.0;
  const double lambda_final = resolve_lambda(cfg, std::max(1e-6 * peak, 1e-300));
  const std::vector<double> ladder = lambda_ladder(cfg, lambda_final, std::max(peak, lambda_final));

  const Eigen::MatrixXd observed = partial.zero_filled();
  const Eigen::ArrayXXd mask = partial.omega.dense_mask();

  SolveResult result;
  Eigen::MatrixXd L = observed;
  bool last_stage_converged = false;
  for (double lambda : ladder) {
    last_stage_converged = false;
    for (int it = 0; it < cfg.max_iters; ++it) {
      // gradient step replaces the observed entries, SVT shrinks the spectrum
      const Eigen::MatrixXd target = (L.array() * (1.0 - mask)).matrix() + observed;
      ShrinkResult next = svt_with_nuclear(target, lambda);
      const double change = (next.M - L).norm() / std::max(1.0, L.norm());
      L = std::move(next.M);
      ++result.iters;
      const double penalty = 0.5 * ((L - observed).array() * mask).matrix().squaredNorm();
      result.objective_trace.push_back(lambda * next.nuclear + penalty);
      if (change < cfg.rel_tol) {
        last_stage_converged = true;
        break;
      }
    }
  }

  result.L_hat = std::move(L);
  result.stop_reason = last_stage_converged ? StopReason::converged : StopReason::max_iters;
  result.fit_mse = observed_fit_mse(result.L_hat, partial);
  return result;
}

SolveResult solve_bilinear_frobenius(const PartialMatrix& partial, const SolverConfig& cfg) {
  const int m = partial.rows();
  const int n = partial.cols();
  const int p = cfg.p.value_or(m);
  if (p < 1) throw InvalidInputError("solve_bilinear_frobenius: inner dimension below 1");
  const double lambda = resolve_lambda(cfg, std::max(1e-6 * mean_observed_magnitude(partial), 1e-300));

  const Eigen::MatrixXd observed = partial.zero_filled();
  const Eigen::ArrayXXd mask = partial.omega.dense_mask();
  Eigen::MatrixXd A = initial_dictionary(m, p, cfg);
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(p, n);

  const PartialMatrix transposed =
      PartialMatrix::observe(observed.transpose(), partial.omega.transpose());

  SolveResult result;
  Eigen::MatrixXd product_prev;
  for (int it = 0; it < cfg.max_iters; ++it) {
    const Eigen::MatrixXd A_before = A;
    X = ridge_representation(A, partial, lambda);
    // the A-step is the same ridge problem on the transposed data
    A = ridge_representation(X.transpose(), transposed, lambda).transpose();

    const Eigen::MatrixXd product = A * X;
    const double penalty = 0.5 * ((product - observed).array() * mask).matrix().squaredNorm();
    result.objective_trace.push_back(0.5 * lambda * (A.squaredNorm() + X.squaredNorm()) + penalty);
    ++result.iters;

    if (cfg.observer) {
      IterationSnapshot snap;
      snap.iter = it;
      snap.lambda = lambda;
      snap.A_prev = &A_before;
      snap.X = &X;
      snap.A_next = &A;
      cfg.observer(snap);
    }

    if (it > 0) {
      const double change = (product - product_prev).norm() / std::max(1.0, product_prev.norm());
      if (change < cfg.rel_tol) {
        result.stop_reason = StopReason::converged;
        product_prev = product;
        break;
      }
    }
    product_prev = product;
  }

  result.L_hat = A * X;
  result.factors = FactorPair{std::move(A), std::move(X)};
  result.fit_mse = observed_fit_mse(result.L_hat, partial);
  return result;
}

SolveResult solve_isodp(const PartialMatrix& partial, const SolverConfig& cfg) {
  const int m = partial.rows();
  const int p = cfg.p.value_or(m);
  if (p < 1) throw InvalidInputError("solve_isodp: inner dimension below 1");
  const double lambda_final =
      resolve_lambda(cfg, std::max(1e-3 * mean_observed_magnitude(partial), 1e-300));

  const Eigen::MatrixXd observed = partial.zero_filled();
  const Eigen::ArrayXXd mask = partial.omega.dense_mask();

  // With a small lambda the per-iteration shrinkage lambda/mu is tiny and the
  // spectrum of A barely moves, so the fixed-lambda iteration stalls at the
  // initial rank. A geometric lambda ladder with warm starts (each stage the
  // plain alternating-proximal loop at its own lambda) reaches the same
  // small-lambda solution in a practical number of iterations. The start sits
  // at the per-entry scale: much above it the shared lambda crushes the ridge
  // step and the iteration collapses to zero.
  const std::vector<double> ladder = lambda_ladder(
      cfg, lambda_final, std::max(mean_observed_magnitude(partial), lambda_final));

  Eigen::MatrixXd A = initial_dictionary(m, p, cfg);

  SolveResult result;
  Eigen::MatrixXd X;
  for (double lambda : ladder) {
    result.stop_reason = StopReason::max_iters;
    Eigen::MatrixXd product_prev;
    for (int it = 0; it < cfg.max_iters; ++it) {
      X = ridge_representation(A, partial, lambda);

      const Eigen::MatrixXd residual = ((A * X - observed).array() * mask).matrix();
      const Eigen::MatrixXd gradient = residual * X.transpose();
      const double x_norm = spectral_norm(X);
      const double mu = std::max(x_norm * x_norm, 1e-12);
      const Eigen::MatrixXd prox_target = A - gradient / mu;
      ShrinkResult shrunk = svt_with_nuclear(prox_target, lambda / mu);

      if (cfg.observer) {
        IterationSnapshot snap;
        snap.iter = it;
        snap.lambda = lambda;
        snap.mu = mu;
        snap.A_prev = &A;
        snap.X = &X;
        snap.prox_target = &prox_target;
        snap.A_next = &shrunk.M;
        cfg.observer(snap);
      }
      A = std::move(shrunk.M);

      const Eigen::MatrixXd product = A * X;
      const double penalty = 0.5 * ((product - observed).array() * mask).matrix().squaredNorm();
      result.objective_trace.push_back(lambda * (shrunk.nuclear + 0.5 * X.squaredNorm()) + penalty);
      ++result.iters;

      if (it > 0) {
        const double change = (product - product_prev).norm() / std::max(1.0, product_prev.norm());
        if (change < cfg.rel_tol) {
          result.stop_reason = StopReason::converged;
          break;
        }
      }
      product_prev = product;
    }
  }

  result.L_hat = A * X;
  result.factors = FactorPair{std::move(A), std::move(X)};
  result.fit_mse = observed_fit_mse(result.L_hat, partial);
  return result;
}

double schatten23_objective(const Eigen::MatrixXd& L) {
  if (L.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(L);
  return 1.5 * svd.singularValues().array().pow(2.0 / 3.0).sum();
}

}  // namespace isoplete
