#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wiplab/maps.hpp"

namespace wiplab {

// Mean-zero bounded observable v : Lambda -> R^d.  Built-ins are centered
// against the invariant measure of the map they are attached to.
struct Observable {
  std::string name;
  int dimension = 1;
  std::function<Eigen::VectorXd(const Point&)> eval;
  double sup_norm_bound = 0.0;
  std::optional<double> lipschitz_bound;

  Eigen::VectorXd operator()(const Point& p) const { return eval(p); }
};

// Registry of built-in observables.  Names:
//   base            x - E[x]                       (d=1, any map)
//   cos2pi          cos(2 pi x) - centering        (d=1, any map)
//   coboundary      cos(4 pi x) - cos(2 pi x)      (d=1, doubling: h o T - h)
//   doubling-pair   (x-1/2, Tx-1/2 + cos 2 pi x)   (d=2, doubling only)
//   degenerate-pair (x-1/2, Tx-1/2)                (d=2, doubling only)
//   fiber           y - E[y]                       (d=1, baker kinds)
//   baker-pair      (x-E[x], y-E[y])               (d=2, baker kinds)
Observable make_observable(const std::string& name, const MapDescriptor& desc);

std::vector<std::string> observable_names();

struct Orbit {
  std::vector<Point> points;
  Eigen::MatrixXd values;  // n_steps x d, values.row(j) = v(points[j])
  int burn_in = 0;
  std::uint64_t seed = 0;
};

// Iterates burn_in times from x0 (drawn uniformly from the seeded stream
// when absent), then records n_steps points and observable values.
Orbit sample_orbit(const MapDescriptor& desc, const Observable& obs,
                   std::optional<Point> x0, long n_steps, long burn_in,
                   std::uint64_t seed);

// Uniform draw on the map's phase space from a derived stream.
Point random_point(const MapDescriptor& desc, std::uint64_t master_seed,
                   std::uint64_t stream_index);

// Birkhoff estimate of E[f] under the physical measure; deterministic
// given the seed.  Used for centering constants.
double birkhoff_mean(const MapDescriptor& desc,
                     const std::function<double(const Point&)>& f,
                     long n_steps, std::uint64_t seed);

}  // namespace wiplab
