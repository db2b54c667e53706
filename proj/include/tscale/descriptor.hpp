#pragma once

// JSON descriptors for time scales and dual representations.
//
//   {"kind":"reals","start":0}
//   {"kind":"integers","start":0}
//   {"kind":"arithmetic","start":0,"step":0.5}
//   {"kind":"geometric","start":1,"ratio":2}
//   {"kind":"periodic","start":0,"length":1,"period":2}
//   {"kind":"generated","start":1,"next":"2*t+1"}
//   {"kind":"union","blocks":[{"interval":[0,1]},{"point":1.5}],
//    "tail":{"kind":"arithmetic","start":2,"step":1}}
//
// Every kind accepts an optional "snap". The bare words integers and reals
// are shorthands for the start-0 scales.

#include <string_view>

#include <json.hpp>

#include "tscale/isolated_dual.hpp"
#include "tscale/timescale.hpp"

namespace tscale {

TimeScale scale_from_json(const nlohmann::json& j);
// Accepts JSON text or a shorthand word.
TimeScale parse_scale(std::string_view text);
// Generated tails serialize their start only ("next" is null).
nlohmann::json scale_to_json(const TimeScale& ts);

// {"b": 1, "coeffs": [...]}
DualRep dual_from_json(const nlohmann::json& j);
nlohmann::json dual_to_json(const DualRep& rep);

}  // namespace tscale
