#include "wirebend/machine/material.hpp"

#include <limits>

#include "wirebend/errors.hpp"

namespace wirebend {

void MaterialSpec::validate() const {
  if (!(diameter > 0.0 && yield_stress > 0.0 && uts > 0.0 && elastic_modulus > 0.0 && fracture_strain > 0.0)) {
    throw InvalidInput("material '" + name + "': properties must be positive");
  }
  if (yield_stress > uts) throw InvalidInput("material '" + name + "': yield stress exceeds UTS");
}

MaterialSpec MaterialSpec::aluminium_6061_t6() {
  return {"Al 6061-T6", 3.0, 268.47, 362.14, 68.03, 0.0541};
}

double required_bend_torque(const MaterialSpec& m) {
  const double plastic_modulus = m.diameter * m.diameter * m.diameter / 6.0;  // mm^3
  return plastic_modulus * m.uts / 1000.0;                                    // N*mm -> N*m
}

TorqueFeasibility feasibility(const MaterialSpec& m, const MachineProfile& profile) {
  TorqueFeasibility f;
  f.required = required_bend_torque(m);
  f.available = profile.available_bend_torque;
  if (f.required > 0.0) {
    f.margin = f.available / f.required;
  } else {
    f.margin = f.available > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  f.fabricable = f.margin >= profile.safety_factor;
  return f;
}

}  // namespace wirebend
