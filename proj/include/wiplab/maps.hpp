#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace wiplab {

enum class MapKind { Doubling, LSV, UniformBaker, IntermittentBaker };

std::string map_kind_name(MapKind k);
MapKind parse_map_kind(const std::string& name);

// Interval / skew-product map selector.  gamma is the intermittency
// parameter of the LSV branch; fiber_contraction the affine contraction
// rate of the baker fibers.
struct MapDescriptor {
  MapKind kind = MapKind::Doubling;
  double gamma = 0.0;
  double fiber_contraction = 0.5;

  bool is_baker() const {
    return kind == MapKind::UniformBaker || kind == MapKind::IntermittentBaker;
  }
  bool base_is_lsv() const {
    return kind == MapKind::LSV || kind == MapKind::IntermittentBaker;
  }
  double base_gamma() const { return base_is_lsv() ? gamma : 0.0; }
  void validate() const;
};

struct Point {
  double base = 0.0;
  double fiber = 0.0;  // meaningful only for baker kinds
};

// x(1 + 2^g x^g) on [0,1/2), 2x-1 on [1/2,1).  The boundary x=1/2 goes to
// the second branch.  A floor of 1e-15 keeps orbits from being absorbed
// at the neutral fixed point.
double lsv_step(double x, double gamma);
double doubling_step(double x);

// Inverse of the first LSV branch: solves y = x(1+2^g x^g) for x in [0,1/2).
double lsv_branch0_inverse(double y, double gamma);

// Branch assignment of the base map: 0 on [0,1/2), 1 on [1/2,1).
inline int branch_index(double base) { return base < 0.5 ? 0 : 1; }

double base_step(double x, const MapDescriptor& desc);
Point map_step(const Point& p, const MapDescriptor& desc);

Point baker_step(const Point& p, const MapDescriptor& desc);
Point baker_inverse(const Point& p, const MapDescriptor& desc);

}  // namespace wiplab
