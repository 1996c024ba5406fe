#include "wiplab/maps.hpp"

#include <bit>
#include <cmath>

#include "wiplab/rng.hpp"

namespace wiplab {

namespace {

// 2x mod 1 discards one mantissa bit per iteration, so every bare
// floating-point orbit of the doubling map reaches the fixed point 0 in at
// most ~60 steps.  Reinject one deterministic pseudo-random bit at machine
// precision, emulating iteration on an infinite binary expansion.  The
// perturbation (<= 2^-52) is far below every tolerance used elsewhere and
// keeps orbits bit-reproducible across runs and thread counts.
double reinject_low_bit(double y, double x) {
  const std::uint64_t h =
      splitmix64(std::bit_cast<std::uint64_t>(x) ^ 0x9e3779b97f4a7c15ULL);
  const double z = y + ((h & 1) ? 0x1p-53 : 0x1p-52);
  return z < 1.0 ? z : y;
}

}  // namespace

std::string map_kind_name(MapKind k) {
  switch (k) {
    case MapKind::Doubling: return "doubling";
    case MapKind::LSV: return "lsv";
    case MapKind::UniformBaker: return "uniform-baker";
    case MapKind::IntermittentBaker: return "intermittent-baker";
  }
  return "?";
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "doubling") return MapKind::Doubling;
  if (name == "lsv") return MapKind::LSV;
  if (name == "uniform-baker") return MapKind::UniformBaker;
  if (name == "intermittent-baker") return MapKind::IntermittentBaker;
  throw std::invalid_argument("unknown map kind: " + name);
}

void MapDescriptor::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::domain_error("gamma must lie in [0,1)");
  if (!(fiber_contraction > 0.0 && fiber_contraction < 1.0))
    throw std::domain_error("fiber_contraction must lie in (0,1)");
}

double lsv_step(double x, double gamma) {
  if (!(x >= 0.0 && x < 1.0)) throw std::domain_error("lsv_step: x outside [0,1)");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::domain_error("lsv_step: gamma outside [0,1)");
  double y;
  if (x < 0.5) {
    y = x * (1.0 + std::pow(2.0 * x, gamma));
  } else {
    y = 2.0 * x - 1.0;
  }
  if (y >= 1.0) y = std::nextafter(1.0, 0.0);
  if (y < 1e-15) y = 1e-15;
  return y;
}

double doubling_step(double x) {
  if (!(x >= 0.0 && x < 1.0))
    throw std::domain_error("doubling_step: x outside [0,1)");
  double y = 2.0 * x;
  if (y >= 1.0) y -= 1.0;
  return reinject_low_bit(y, x);
}

double lsv_branch0_inverse(double y, double gamma) {
  if (!(y >= 0.0 && y < 1.0))
    throw std::domain_error("lsv_branch0_inverse: y outside [0,1)");
  if (gamma == 0.0) return 0.5 * y;
  // g(x) = x + 2^g x^{1+g} is increasing on [0,1/2); Newton from the
  // midpoint with bisection safeguarding.
  double lo = 0.0, hi = 0.5;
  double x = 0.5 * y;
  const double c = std::pow(2.0, gamma);
  for (int it = 0; it < 100; ++it) {
    const double fx = x + c * std::pow(x, 1.0 + gamma) - y;
    if (fx > 0.0) hi = x; else lo = x;
    const double dfx = 1.0 + c * (1.0 + gamma) * std::pow(x, gamma);
    double nx = x - fx / dfx;
    if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
    if (std::abs(nx - x) < 1e-16) { x = nx; break; }
    x = nx;
  }
  return x;
}

double base_step(double x, const MapDescriptor& desc) {
  return desc.base_is_lsv() ? lsv_step(x, desc.gamma) : doubling_step(x);
}

Point map_step(const Point& p, const MapDescriptor& desc) {
  if (desc.is_baker()) return baker_step(p, desc);
  return Point{base_step(p.base, desc), 0.0};
}

Point baker_step(const Point& p, const MapDescriptor& desc) {
  if (!desc.is_baker())
    throw std::invalid_argument("baker_step: not a baker kind");
  if (!(p.base >= 0.0 && p.base < 1.0 && p.fiber >= 0.0 && p.fiber < 1.0))
    throw std::domain_error("baker_step: point outside [0,1)^2");
  const int b = branch_index(p.base);
  const double c = desc.fiber_contraction;
  Point q;
  q.base = base_step(p.base, desc);
  q.fiber = c * p.fiber + static_cast<double>(b) * (1.0 - c);
  return q;
}

Point baker_inverse(const Point& p, const MapDescriptor& desc) {
  if (!desc.is_baker())
    throw std::invalid_argument("baker_inverse: not a baker kind");
  if (!(p.base >= 0.0 && p.base < 1.0 && p.fiber >= 0.0 && p.fiber < 1.0))
    throw std::domain_error("baker_inverse: point outside [0,1)^2");
  const double c = desc.fiber_contraction;
  const int b = p.fiber < 1.0 - c ? 0 : 1;
  Point q;
  q.fiber = (p.fiber - static_cast<double>(b) * (1.0 - c)) / c;
  if (q.fiber < 0.0) q.fiber = 0.0;
  if (q.fiber >= 1.0) q.fiber = std::nextafter(1.0, 0.0);
  if (desc.base_is_lsv()) {
    q.base = b == 0 ? lsv_branch0_inverse(p.base, desc.gamma)
                    : 0.5 * (p.base + 1.0);
  } else {
    q.base = 0.5 * (p.base + static_cast<double>(b));
  }
  return q;
}

}  // namespace wiplab
