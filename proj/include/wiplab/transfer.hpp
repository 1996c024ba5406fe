#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"

namespace wiplab {

// Values of a function on the Ulam grid, one row per cell.
struct GridFunction {
  Eigen::MatrixXd values;  // N x d
  int grid_size() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

struct DecaySeries {
  std::vector<int> lags;
  std::vector<double> norms;
  std::vector<double> stderrs;  // empty for quadrature-based series
  int p = 1;
  std::optional<double> fitted_exponent;
  double tail_sum = 0.0;
  int tail_cutoff = 0;
};

// Ulam discretization of the transfer operator for the base (interval)
// maps.  The forward matrix is column-stochastic: entry (i,j) is the
// fraction of cell j mapped into cell i, estimated with a van der Corput
// point set per cell.  Cell weights are the stationary distribution of
// that matrix, so P1 = 1 holds to solver precision; for the doubling map
// they coincide with Lebesgue.
class UlamOperator {
 public:
  UlamOperator(const MapDescriptor& desc, int grid_size, int samples_per_cell);

  int grid_size() const { return n_; }
  const MapDescriptor& descriptor() const { return desc_; }
  const Eigen::VectorXd& cell_weights() const { return weights_; }
  const Eigen::SparseMatrix<double>& forward_matrix() const { return forward_; }
  double cell_center(int i) const { return (i + 0.5) / n_; }
  int cell_of(double x) const;

  // P^n v on the grid; n = 0 returns v unchanged.
  GridFunction apply(const GridFunction& v, int n = 1) const;
  // Koopman image v o T on the grid (average of v over each cell image).
  GridFunction koopman(const GridFunction& v) const;

  // Grid projection by per-cell van der Corput averaging, consistent with
  // the matrix construction.
  GridFunction discretize(const Observable& obs) const;
  GridFunction discretize(const std::function<double(double)>& f) const;

  // Weighted norms: p = 1, 2, or 0 for sup.  Rows are measured in the
  // Euclidean norm when d > 1.
  double norm(const GridFunction& v, int p) const;
  Eigen::VectorXd integral(const GridFunction& v) const;

  void dump_binary(const std::string& path) const;

 private:
  MapDescriptor desc_;
  int n_;
  int samples_per_cell_;
  Eigen::SparseMatrix<double> forward_;
  Eigen::VectorXd weights_;
};

// L1 distance between P(v o T) and v; PU = I up to grid resolution.
double koopman_check(const UlamOperator& op, const GridFunction& v);

// Records |P^n v|_1 for n = 0..n_max, fits a log-log slope over the final
// half of the range, and reports the tail sum past the cutoff
// (default n_max/2).
DecaySeries gordin_l1_diagnostic(const UlamOperator& op, const GridFunction& v,
                                 int n_max, int tail_cutoff = -1);

// Monte Carlo estimates of |int v (w o T^n) dmu| with batch-mean standard
// errors, n = 0..n_max.
DecaySeries correlation_decay(const MapDescriptor& desc, const Observable& v,
                              const Observable& w, int n_max,
                              long orbit_budget, std::uint64_t seed);

// Least squares slope of log(norm) against log(lag) over lags in [from,to];
// nullopt when fewer than two usable (positive) norms remain.
std::optional<double> fit_loglog_exponent(const std::vector<int>& lags,
                                          const std::vector<double>& norms,
                                          int from, int to);

}  // namespace wiplab
