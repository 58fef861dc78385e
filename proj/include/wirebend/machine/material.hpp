#pragma once

#include <string>

#include "wirebend/machine/profile.hpp"

namespace wirebend {

struct MaterialSpec {
  std::string name;
  double diameter = 0.0;         // mm
  double yield_stress = 0.0;     // MPa
  double uts = 0.0;              // MPa
  double elastic_modulus = 0.0;  // GPa
  double fracture_strain = 0.0;

  /// Throws InvalidInput unless every property is positive and yield <= UTS.
  void validate() const;

  /// Tensile-tested 3 mm aluminium 6061-T6 stock.
  static MaterialSpec aluminium_6061_t6();
};

/// Fully plastic bending moment of a solid round section: (d^3 / 6) * UTS, in N*m.
double required_bend_torque(const MaterialSpec& m);

struct TorqueFeasibility {
  double required = 0.0;   // N*m
  double available = 0.0;  // N*m
  double margin = 0.0;     // available / required
  bool fabricable = false;
};

/// Margin = available / required; fabricable iff margin >= profile.safety_factor.
/// A zero requirement (d = 0) counts as an unbounded margin.
TorqueFeasibility feasibility(const MaterialSpec& m, const MachineProfile& profile);

}  // namespace wirebend
