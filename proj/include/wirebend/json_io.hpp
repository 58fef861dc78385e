#pragma once

// JSON forms of the core types. Field names here are the API contract with the design UI.

#include <exception>

#include <json.hpp>

#include "wirebend/errormodel.hpp"
#include "wirebend/fabcheck.hpp"
#include "wirebend/fabsim.hpp"
#include "wirebend/graph.hpp"
#include "wirebend/instructions.hpp"
#include "wirebend/machine/controller.hpp"
#include "wirebend/machine/material.hpp"
#include "wirebend/machine/profile.hpp"

namespace wirebend {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CompensationParams, peg_arc_radius, bend_rod_radius,
                                                nozzle_rod_radius, setback_distance, springback, k_factor,
                                                wire_diameter, inner_bend_radius)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FeedAxis, wheel_diameter, steps_per_rev, microstep)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(BendAxis, gearbox_ratio, external_ratio, microstep, max_bend,
                                                hard_stop)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RotateAxis, microstep, transmission_ratio, max_cumulative)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MachineSpeeds, feed, bend, rotate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TimeOverheads, homing, peg_retract)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MachineLimits, min_feed, tail_reserve, min_edge, stock_length)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MaterialCost, dollars_per_foot)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MachineProfile, name, feed, bend, rotate, speeds, overheads, limits,
                                                available_bend_torque, safety_factor, cost, compensation)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MaterialSpec, name, diameter, yield_stress, uts, elastic_modulus,
                                                fracture_strain)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AxisSteps, feed, bend_swept, rotate)

void to_json(json& j, const Vec3& v);
void to_json(json& j, const EulerStatus& s);
void to_json(json& j, const Diagnostics& d);
void to_json(json& j, const ProgramDiagnostics& d);
void to_json(json& j, const InstructionProgram& p);
void to_json(json& j, const WirePolyline& w);
void to_json(json& j, const Timeline& t);
void to_json(json& j, const TorqueFeasibility& f);
void to_json(json& j, const RunReport& r);

/// {"kind": "F"|"B"|"R", "magnitude": x}, range-checked. Throws ParseError.
Instruction instruction_from_json(const json& item);

/// Accepts either {"instructions": [{"kind": "F", "magnitude": 10}, ...], "error_corrected": b}
/// or {"text": "<instruction text>"}.
InstructionProgram program_from_json(const json& j);

/// {"error": {"kind": ..., "message": ...}}
json error_json(const std::exception& e);

}  // namespace wirebend
