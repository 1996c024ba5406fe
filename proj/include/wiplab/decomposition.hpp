#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/transfer.hpp"

namespace wiplab {

// Martingale-coboundary split on the Ulam grid:
//   v = mart + chi o T - chi + P^k v,   chi = sum_{j=1}^k P^j v.
struct Decomposition {
  GridFunction chi;
  GridFunction mart;
  int truncation_k = 0;
  double residual_ker_p = 0.0;  // |P mart|_1, should vanish
  double l2_cauchy_gap = 0.0;   // |m^(k) - m^(2k)|_2
};

GridFunction chi_truncated(const UlamOperator& op, const GridFunction& v,
                           int k);

// Throws if |P mart|_1 > 0.1 (under-resolved grid).
Decomposition martingale_part(const UlamOperator& op, const GridFunction& v,
                              int k);

// Smallest k with |P^k v|_1 < 1e-6, capped at k_cap.
int default_truncation(const UlamOperator& op, const GridFunction& v,
                       int k_cap = 40);

// (lhs, rhs) of the L2 Cauchy bound
//   |m^(k) - m^(ell)|_2^2 <= 4 |v|_inf sum_{n>=ell} |P^n v|_1,
// the tail truncated at 4k with geometric extrapolation.
std::pair<double, double> l2_cauchy_bound_check(const UlamOperator& op,
                                                const GridFunction& v, int ell,
                                                int k);

// Piecewise-constant function of the base coordinate.
struct BaseTable {
  std::vector<double> edges;  // bins()+1 ascending breakpoints spanning [0,1]
  Eigen::MatrixXd values;     // bins() x d

  int bins() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
  Eigen::VectorXd eval(double base) const;
};

enum class CondMethod { ExactQuadrature, Binned };

// E0(w) as a function of the base coordinate.  ExactQuadrature integrates
// 256 fiber midpoints per cell (uniform baker only, where the conditional
// fiber measure is Lebesgue); Binned averages a long orbit over
// equal-mass base bins.
BaseTable fiber_conditional_expectation(const MapDescriptor& desc,
                                        const Observable& w, CondMethod method,
                                        int resolution,
                                        long orbit_budget = 2'000'000,
                                        std::uint64_t seed = 0x901d1eafULL);

struct HybridDiagnostic {
  DecaySeries series_minus;  // |E0(v o T^-n)|_1, n = 0..n_max
  DecaySeries series_plus;   // |E0(v o T^n) - v o T^n|_2, n = 0..n_max
};

// Backward series computed as |P^n(E0 v)|_1 on a base-map Ulam grid
// (conditioning the n-step preimage on the base coordinate averages the
// fiber first, then applies the base transfer operator n times); forward
// series by per-point fiber quadrature along forward traces.
HybridDiagnostic hybrid_criterion_diagnostic(const MapDescriptor& desc,
                                             const Observable& v, int n_max,
                                             int grid_size = 4096,
                                             long sample_budget = 20'000,
                                             std::uint64_t seed = 0xbadcafeULL);

// v = v_hat + chi_plus o T - chi_plus with v_hat a function of the base
// coordinate up to truncation; mart = v - chi o T + chi, chi = chi_minus +
// chi_plus.  Evaluators are pure closures over shared immutable state.
struct InvertibleDecomposition {
  int truncation_k = 0;       // chi_minus (backward) truncation
  int truncation_k_plus = 0;  // chi_plus (forward) truncation
  double truncation_allowance = 0.0;
  std::function<Eigen::VectorXd(const Point&)> chi_minus;
  std::function<Eigen::VectorXd(const Point&)> chi_plus;
  std::function<Eigen::VectorXd(const Point&)> v_hat;
  std::function<Eigen::VectorXd(const Point&)> mart;
};

InvertibleDecomposition invertible_decomposition(
    const MapDescriptor& desc, const Observable& v, int k, int grid_size = 4096,
    long orbit_budget = 2'000'000, std::uint64_t seed = 0x1d3c0deULL);

struct DriftIdentityReport {
  Eigen::MatrixXd lhs;  // sum_{j=1}^{J} int v (x) (v o T^j) dmu
  Eigen::MatrixXd rhs;  // int (chi (x) v - mart (x) (chi_plus o T)) dmu
  Eigen::MatrixXd lhs_stderr;
  Eigen::MatrixXd rhs_stderr;
  double truncation_allowance = 0.0;

  bool within_tolerance(double n_sigma = 3.0) const;
};

DriftIdentityReport drift_identity_check(const MapDescriptor& desc,
                                         const Observable& v, int k,
                                         long orbit_budget, std::uint64_t seed,
                                         int lag_cutoff = 60);

// Binned L1 size of the conditional mean of f given the fiber coordinate
// (which encodes the past symbol sequence); near zero exactly when f is a
// martingale difference for the filtration of the past.
double conditional_mean_residual(
    const MapDescriptor& desc,
    const std::function<Eigen::VectorXd(const Point&)>& f, int bins,
    long samples, std::uint64_t seed);

}  // namespace wiplab
