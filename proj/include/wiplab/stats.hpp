#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/processes.hpp"
#include "wiplab/transfer.hpp"

namespace wiplab {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  bool passed = false;
  long n1 = 0;
  long n2 = 0;
  std::uint64_t seed = 0;
  std::string note;
};

// 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)
double ks_asymptotic_pvalue(double lambda);

// One-sample Kolmogorov-Smirnov against N(0, variance).
TestReport ks_normality(const std::vector<double>& samples, double variance);

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b);

// Per-column two-sample KS with a Bonferroni-combined p-value.
TestReport two_sample_compare(const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

// Simulates the limit pair: W Brownian with covariance sigma on an n_fine
// grid, WW(1) the left-point (Ito) Riemann sum of W (x) dW plus drift.
struct ReferenceLawSampler {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd drift;
  int n_fine = 4096;
};

struct LimitPairSample {
  Eigen::MatrixXd w;                   // count x d, W(1)
  std::vector<Eigen::MatrixXd> ww;     // count entries, WW(1)
};

LimitPairSample sample_limit_pair(const ReferenceLawSampler& sampler,
                                  long count, std::uint64_t seed);

// Rio-type and Doob bounds over a replica ensemble; the right-hand sides
// carry a 1.1 safety factor for Monte Carlo noise on the left only.
std::vector<TestReport> maximal_inequality_suite(const MapDescriptor& desc,
                                                 const Observable& v,
                                                 const UlamOperator& op,
                                                 long n, int replicas,
                                                 std::uint64_t seed,
                                                 int threads = 1);

// W_n(1) under a uniform initial law on base_interval (no burn-in) against
// the stationary ensemble; flags preasymptotic n instead of pretending the
// test is meaningful there.
TestReport zweimuller_robustness(const MapDescriptor& desc,
                                 const Observable& v,
                                 std::pair<double, double> base_interval,
                                 long n, int replicas, std::uint64_t seed,
                                 int threads = 1);

}  // namespace wiplab
