#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/stats.hpp"

namespace wiplab {

using VecField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using MatField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
// db(x)[alpha](beta, gamma) = d b^{beta gamma} / d x^alpha
using MatJacobian =
    std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)>;

// slow recurrence x_{k+1} = x_k + eps^2 a(x_k) + eps b(x_k) v(y_k) driven
// by the fast map orbit y_k
struct FastSlowConfig {
  double epsilon = 0.01;
  Eigen::VectorXd xi;
  VecField a;
  MatField b;
  MapDescriptor fast;
  Observable obs;
  double t_end = 1.0;
};

struct SlowPath {
  std::vector<double> times;  // macro grid, 1001 points on [0, t_end]
  Eigen::MatrixXd values;     // times.size() x d
};

// Exact recurrence iteration, sampled on the macro grid; throws on
// |x| > 1e6 (non-Lipschitz blowup guard).
SlowPath fast_slow_simulate(const FastSlowConfig& cfg, std::uint64_t seed);

enum class DriftConvention { Proposition, LiteralHalf };

// a^beta + factor * sum_{alpha,gamma,delta}
//   E^{gamma delta} d_alpha b^{beta delta} b^{alpha gamma},
// factor 1 (Proposition) or 1/2 (LiteralHalf).
VecField corrected_drift(const VecField& a, const MatField& b,
                         const MatJacobian& db, const Eigen::MatrixXd& drift_e,
                         DriftConvention convention);

struct SDEConfig {
  VecField drift;
  MatField diffusion;
  Eigen::MatrixXd sigma;  // driving-noise covariance
  double dt = 1e-4;
  Eigen::VectorXd xi;
  double t_end = 1.0;
};

// Ito convention: increments multiply the pre-step diffusion value.
SlowPath euler_maruyama(const SDEConfig& cfg, std::uint64_t seed);

Eigen::MatrixXd fast_slow_terminal_ensemble(const FastSlowConfig& cfg,
                                            int replicas,
                                            std::uint64_t master_seed,
                                            int threads = 1);

Eigen::MatrixXd sde_terminal_ensemble(const SDEConfig& cfg, int replicas,
                                      std::uint64_t master_seed,
                                      int threads = 1);

// Mean/variance/covariance agreement at 3 combined standard errors plus a
// per-component two-sample KS.
std::vector<TestReport> homogenisation_compare(const Eigen::MatrixXd& fs,
                                               const Eigen::MatrixXd& sde);

}  // namespace wiplab
