#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "isoplete/sampling.hpp"

namespace isoplete {

// Route used for relative condition numbers. `pinv` follows the definition
// gamma_w(M) = 1/||M ([M]_{w,:})^+||^2 and is total; `eigen` uses the smallest
// eigenvalue of U^T D U and assumes the sampled submatrix preserves rank.
enum class GammaRoute { pinv, eigen };

struct KIsomerismMode {
  enum Kind { exact, randomized } kind = exact;
  int trials = 10000;             // randomized mode
  std::uint64_t seed = 0;         // randomized mode
  std::uint64_t subset_budget = 1000000;  // exact mode refuses beyond this
};

// Randomized answers are one-sided: `false` is certain, `true` is not.
struct KIsomerismResult {
  bool isomeric = false;
  bool certain = true;
};

// Def: every k-row sampled submatrix of M preserves rank(M).
KIsomerismResult is_k_isomeric(const Eigen::MatrixXd& M, int k, const KIsomerismMode& mode = {});

// Smallest k such that M is k-isomeric (k-isomerism is monotone in k).
int min_isomeric_k(const Eigen::MatrixXd& M, const KIsomerismMode& mode = {});

// Def: rank([M]_{Omega^j,:}) = rank(M) for every column j of Omega.
// Throws PreconditionError (naming j) when a column of Omega is empty.
bool is_omega_isomeric(const Eigen::MatrixXd& M, const SamplingSet& omega);

// Def: L is Omega-isomeric and L^T is Omega^T-isomeric. Throws on empty lines.
bool is_pair_isomeric(const Eigen::MatrixXd& L, const SamplingSet& omega);

// omega-relative condition number of M for a 1D row sampling set.
// Throws InvalidInputError when the sampled submatrix is zero.
double gamma_1d(const Eigen::MatrixXd& M, const std::vector<int>& omega_rows,
                GammaRoute route = GammaRoute::pinv);

struct Gamma2dResult {
  double value = 0.0;                 // min over columns
  Eigen::VectorXd per_column;         // gamma_{Omega^j}(M), j = 1..n
  std::vector<int> rank_deficient_columns;  // columns where Lemma-style rank preservation fails
};

// gamma_Omega(M) = min_j gamma_{Omega^j}(M).
Gamma2dResult gamma_2d(const Eigen::MatrixXd& M, const SamplingSet& omega,
                       GammaRoute route = GammaRoute::pinv);

// gamma_{Omega,Omega^T}(L) = min(gamma_Omega(L), gamma_{Omega^T}(L^T)).
double gamma_pair(const Eigen::MatrixXd& L, const SamplingSet& omega,
                  GammaRoute route = GammaRoute::pinv);

// Sufficient condition: rho > 1 - (1-alpha)/(mu0*r0) guarantees pair-isomerism
// together with gamma_pair > alpha, for any coherence-mu0 rank-r0 target.
bool sufficient_coverage_check(double mu0, int r0, double rho, double alpha);

// rho = min over lines of the observed fraction, the quantity the sufficient
// condition is stated in.
double min_line_fraction(const SamplingSet& omega);

// Non-identifiability witness: a unit-Frobenius Delta != 0 vanishing on Omega
// whose columns stay in the column space of L (or, on the transposed side,
// whose rows stay in the row space), so L + Delta fits every observation with
// rank(L + Delta) <= rank(L). Absent iff L is pair-isomeric (empty sampling
// lines count as rank-deficient here).
std::optional<Eigen::MatrixXd> witness_nonidentifiability(const Eigen::MatrixXd& L,
                                                          const SamplingSet& omega);

struct DiagnosticsReport {
  int rank = 0;
  double coherence = 0.0;
  bool omega_isomeric = false;
  bool omegaT_isomeric = false;
  double gamma_omega = 0.0;
  double gamma_omegaT = 0.0;
  double gamma_pair = 0.0;
  Eigen::VectorXd per_column_gammas;  // n values
  Eigen::VectorXd per_row_gammas;     // m values (transposed problem)
  std::vector<int> rank_deficient_columns;
  std::vector<int> rank_deficient_rows;
  std::optional<Eigen::MatrixXd> witness;
};

// Full identifiability report for (L, Omega). Requires L != 0 and every line
// of Omega nonempty.
DiagnosticsReport diagnose(const Eigen::MatrixXd& L, const SamplingSet& omega,
                           GammaRoute route = GammaRoute::pinv);

}  // namespace isoplete
