#include "wiplab/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kCenteringSeed = 0x5eedc0ffee123456ULL;
constexpr long kCenteringSteps = 4'000'000;

bool needs_numeric_centering(const MapDescriptor& desc) {
  // Doubling and the uniform baker preserve Lebesgue; moments are exact.
  return desc.base_is_lsv();
}

double center_of(const MapDescriptor& desc,
                 const std::function<double(const Point&)>& f,
                 double exact_lebesgue_value) {
  if (!needs_numeric_centering(desc)) return exact_lebesgue_value;
  return birkhoff_mean(desc, f, kCenteringSteps, kCenteringSeed);
}

}  // namespace

Point random_point(const MapDescriptor& desc, std::uint64_t master_seed,
                   std::uint64_t stream_index) {
  auto g = make_stream(master_seed, stream_index);
  Point p;
  p.base = uniform01(g);
  p.fiber = desc.is_baker() ? uniform01(g) : 0.0;
  return p;
}

double birkhoff_mean(const MapDescriptor& desc,
                     const std::function<double(const Point&)>& f,
                     long n_steps, std::uint64_t seed) {
  Point p = random_point(desc, seed, 0);
  for (int i = 0; i < 10000; ++i) p = map_step(p, desc);
  double acc = 0.0;
  for (long i = 0; i < n_steps; ++i) {
    acc += f(p);
    p = map_step(p, desc);
  }
  return acc / static_cast<double>(n_steps);
}

Observable make_observable(const std::string& name,
                           const MapDescriptor& desc) {
  desc.validate();
  Observable obs;
  obs.name = name;

  if (name == "base") {
    const double c =
        center_of(desc, [](const Point& p) { return p.base; }, 0.5);
    obs.dimension = 1;
    obs.eval = [c](const Point& p) {
      return Eigen::VectorXd::Constant(1, p.base - c);
    };
    obs.sup_norm_bound = std::max(c, 1.0 - c);
    obs.lipschitz_bound = 1.0;
    return obs;
  }

  if (name == "cos2pi") {
    const double c = center_of(
        desc, [](const Point& p) { return std::cos(2.0 * kPi * p.base); },
        0.0);
    obs.dimension = 1;
    obs.eval = [c](const Point& p) {
      return Eigen::VectorXd::Constant(1, std::cos(2.0 * kPi * p.base) - c);
    };
    obs.sup_norm_bound = 1.0 + std::abs(c);
    obs.lipschitz_bound = 2.0 * kPi;
    return obs;
  }

  if (name == "coboundary") {
    // h o T - h with h = cos(2 pi x) for the doubling map; mean zero for
    // any map since both cosines are centered individually below.
    const double c4 = center_of(
        desc, [](const Point& p) { return std::cos(4.0 * kPi * p.base); },
        0.0);
    const double c2 = center_of(
        desc, [](const Point& p) { return std::cos(2.0 * kPi * p.base); },
        0.0);
    obs.dimension = 1;
    obs.eval = [c4, c2](const Point& p) {
      return Eigen::VectorXd::Constant(
          1, (std::cos(4.0 * kPi * p.base) - c4) -
                 (std::cos(2.0 * kPi * p.base) - c2));
    };
    obs.sup_norm_bound = 2.0 + std::abs(c4) + std::abs(c2);
    obs.lipschitz_bound = 6.0 * kPi;
    return obs;
  }

  if (name == "doubling-pair" || name == "degenerate-pair") {
    if (desc.kind != MapKind::Doubling)
      throw std::invalid_argument(name + " is defined for the doubling map");
    const bool with_cos = name == "doubling-pair";
    obs.dimension = 2;
    obs.eval = [with_cos](const Point& p) {
      Eigen::VectorXd v(2);
      v(0) = p.base - 0.5;
      v(1) = doubling_step(p.base) - 0.5;
      if (with_cos) v(1) += std::cos(2.0 * kPi * p.base);
      return v;
    };
    obs.sup_norm_bound = with_cos ? std::sqrt(0.25 + 2.25) : std::sqrt(0.5);
    obs.lipschitz_bound = std::nullopt;  // second component jumps at x=1/2
    return obs;
  }

  if (name == "fiber") {
    if (!desc.is_baker())
      throw std::invalid_argument("fiber observable needs a baker kind");
    const double c =
        center_of(desc, [](const Point& p) { return p.fiber; }, 0.5);
    obs.dimension = 1;
    obs.eval = [c](const Point& p) {
      return Eigen::VectorXd::Constant(1, p.fiber - c);
    };
    obs.sup_norm_bound = std::max(c, 1.0 - c);
    obs.lipschitz_bound = 1.0;
    return obs;
  }

  if (name == "baker-pair") {
    if (!desc.is_baker())
      throw std::invalid_argument("baker-pair observable needs a baker kind");
    const double cb =
        center_of(desc, [](const Point& p) { return p.base; }, 0.5);
    const double cf =
        center_of(desc, [](const Point& p) { return p.fiber; }, 0.5);
    obs.dimension = 2;
    obs.eval = [cb, cf](const Point& p) {
      Eigen::VectorXd v(2);
      v(0) = p.base - cb;
      v(1) = p.fiber - cf;
      return v;
    };
    obs.sup_norm_bound = std::sqrt(2.0) * std::max({cb, 1.0 - cb, cf, 1.0 - cf});
    obs.lipschitz_bound = 1.0;
    return obs;
  }

  throw std::invalid_argument("unknown observable: " + name);
}

std::vector<std::string> observable_names() {
  return {"base",           "cos2pi",     "coboundary", "doubling-pair",
          "degenerate-pair", "fiber",      "baker-pair"};
}

Orbit sample_orbit(const MapDescriptor& desc, const Observable& obs,
                   std::optional<Point> x0, long n_steps, long burn_in,
                   std::uint64_t seed) {
  desc.validate();
  if (n_steps < 1) throw std::invalid_argument("sample_orbit: n_steps >= 1");
  if (burn_in < 0) throw std::invalid_argument("sample_orbit: burn_in >= 0");
  Orbit orbit;
  orbit.burn_in = static_cast<int>(burn_in);
  orbit.seed = seed;
  Point p = x0 ? *x0 : random_point(desc, seed, 0);
  for (long i = 0; i < burn_in; ++i) p = map_step(p, desc);
  orbit.points.resize(static_cast<std::size_t>(n_steps));
  orbit.values.resize(n_steps, obs.dimension);
  for (long i = 0; i < n_steps; ++i) {
    orbit.points[static_cast<std::size_t>(i)] = p;
    orbit.values.row(i) = obs.eval(p).transpose();
    p = map_step(p, desc);
  }
  return orbit;
}

}  // namespace wiplab
