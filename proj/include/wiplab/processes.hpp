#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "wiplab/decomposition.hpp"
#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/transfer.hpp"

namespace wiplab {

// Piecewise-constant realization of (W_n, WW_n) on the grid t_i = i/n,
// i = 0..floor(nK).  ww_path is empty when only the level-1 path was built.
struct PathPair {
  std::vector<double> times;
  Eigen::MatrixXd w_path;                // (steps+1) x d
  std::vector<Eigen::MatrixXd> ww_path;  // steps+1 entries, each d x d
  long n = 0;
  double K = 1.0;
};

PathPair wip_path(const Orbit& orbit, long n, double K);
PathPair iterated_path(const Orbit& orbit, long n, double K);

// Largest relative Frobenius error of
//   W(t) (x) W(t) = WW(t) + WW(t)^T + (1/n) sum_{j<nt} v_j (x) v_j
// over the grid; algebraically zero.
double shuffle_identity_error(const PathPair& pair, const Orbit& orbit);

struct MatrixEstimate {
  Eigen::MatrixXd value;
  Eigen::MatrixXd se;  // zero for quadrature estimates
};

struct DegeneracyVerdict {
  bool degenerate = false;
  double min_eigenvalue = 0.0;
  Eigen::VectorXd witness;  // eigenvector of the smallest eigenvalue
};

struct SigmaReport {
  MatrixEstimate direct;
  MatrixEstimate green_kubo;
  MatrixEstimate martingale;
  MatrixEstimate drift;  // E = sum_{j>=1} int v (x) (v o T^j) dmu
  double drift_tail = 0.0;
  DegeneracyVerdict verdict;
};

// C_j = int v (x) (v o T^j) dmu for j = 0..J, batch-mean standard errors
// from one long orbit.
std::vector<MatrixEstimate> lag_correlations_mc(const MapDescriptor& desc,
                                                const Observable& v, int J,
                                                long orbit_budget,
                                                std::uint64_t seed);

// Same correlations by Ulam quadrature: C_j = sum_i w_i (P^j v)_i (x) v_i.
std::vector<Eigen::MatrixXd> lag_correlations_ulam(const UlamOperator& op,
                                                   const GridFunction& v,
                                                   int J);

// Sigma = C_0 + sum_{j=1}^J (C_j + C_j^T).
MatrixEstimate sigma_green_kubo(const std::vector<MatrixEstimate>& corr);
Eigen::MatrixXd sigma_green_kubo(const std::vector<Eigen::MatrixXd>& corr);

// Initial condition policy for ensembles: stationary draws use a burn-in;
// a base_interval draw is uniform on that sub-interval with no burn-in
// (absolutely continuous initial law).
struct EnsembleSpec {
  long n = 10'000;
  int replicas = 2000;
  long burn_in = 10'000;
  std::optional<std::pair<double, double>> base_interval;
  int threads = 1;
};

// replicas x d matrix of W_n(1) terminal values.
Eigen::MatrixXd wip_terminal_ensemble(const MapDescriptor& desc,
                                      const Observable& v,
                                      const EnsembleSpec& spec,
                                      std::uint64_t master_seed);

// WW_n(1) per replica.
std::vector<Eigen::MatrixXd> iterated_terminal_ensemble(
    const MapDescriptor& desc, const Observable& v, const EnsembleSpec& spec,
    std::uint64_t master_seed);

MatrixEstimate sigma_direct(const MapDescriptor& desc, const Observable& v,
                            const EnsembleSpec& spec,
                            std::uint64_t master_seed);

Eigen::MatrixXd sigma_martingale(const UlamOperator& op,
                                 const Decomposition& dec);

MatrixEstimate drift_matrix(const std::vector<MatrixEstimate>& corr,
                            double* tail_estimate = nullptr);
Eigen::MatrixXd drift_matrix(const std::vector<Eigen::MatrixXd>& corr);

// entrywise mean and stderr over a matrix ensemble
MatrixEstimate matrix_ensemble_mean(const std::vector<Eigen::MatrixXd>& ms);

DegeneracyVerdict degeneracy_check(const Eigen::MatrixXd& sigma, double tol);

}  // namespace wiplab
