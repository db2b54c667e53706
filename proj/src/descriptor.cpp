#include "tscale/descriptor.hpp"

#include <cmath>

#include "tscale/expr.hpp"

namespace tscale {
namespace {

using nlohmann::json;

double number(const json& j, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ScaleError(std::string("time scale descriptor needs \"") + key + "\"");
  }
  const json& v = j.at(key);
  if (!v.is_number()) throw ScaleError(std::string("\"") + key + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScaleError(std::string("\"") + key + "\" must be finite");
  return d;
}

Tail tail_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw ScaleError("time scale descriptor needs a string \"kind\"");
  }
  const std::string kind = j.at("kind").get<std::string>();
  const double start = number(j, "start", 0.0);
  if (kind == "reals") return HalfLine{start};
  if (kind == "integers") return ArithmeticTail{start, 1.0};
  if (kind == "arithmetic") return ArithmeticTail{start, number(j, "step")};
  if (kind == "geometric") return GeometricTail{start, number(j, "ratio")};
  if (kind == "periodic") return PeriodicTail{start, number(j, "length"), number(j, "period")};
  if (kind == "generated") {
    if (!j.contains("next") || !j.at("next").is_string()) {
      throw ScaleError("generated tail needs \"next\" as an expression in t");
    }
    const expr::Expr e = expr::parse(j.at("next").get<std::string>());
    if (e.uses(expr::Var::X)) throw ScaleError("generated tail expression may only use t");
    return GeneratedTail{start, [e](double t) { return e.eval_t(t); }};
  }
  if (kind == "union") throw ScaleError("a union cannot be used as a tail");
  throw ScaleError("unknown time scale kind \"" + kind + "\"");
}

json tail_to_json(const Tail& tail) {
  return std::visit(
      [](const auto& t) -> json {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return {{"kind", "reals"}, {"start", t.start}};
        } else if constexpr (std::is_same_v<T, ArithmeticTail>) {
          if (t.step == 1.0) return {{"kind", "integers"}, {"start", t.start}};
          return {{"kind", "arithmetic"}, {"start", t.start}, {"step", t.step}};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          return {{"kind", "geometric"}, {"start", t.start}, {"ratio", t.ratio}};
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          return {{"kind", "periodic"}, {"start", t.start}, {"length", t.length}, {"period", t.period}};
        } else {
          return {{"kind", "generated"}, {"start", t.start}, {"next", nullptr}};
        }
      },
      tail);
}

}  // namespace

TimeScale scale_from_json(const json& j) {
  if (j.is_string()) return parse_scale(j.get<std::string>());
  if (!j.is_object()) throw ScaleError("time scale descriptor must be an object");
  const double snap = number(j, "snap", kDefaultSnap);
  if (j.value("kind", "") != "union") return TimeScale(tail_from_json(j), {}, snap);

  if (!j.contains("tail")) throw ScaleError("union descriptor needs a \"tail\"");
  std::vector<Block> blocks;
  for (const json& b : j.value("blocks", json::array())) {
    if (b.contains("interval")) {
      const json& iv = b.at("interval");
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number()) {
        throw ScaleError("\"interval\" must be [lo, hi]");
      }
      blocks.push_back(Block::interval(iv[0].get<double>(), iv[1].get<double>()));
    } else if (b.contains("point")) {
      blocks.push_back(Block::point(number(b, "point")));
    } else {
      throw ScaleError("union blocks are {\"interval\":[lo,hi]} or {\"point\":p}");
    }
  }
  return TimeScale(tail_from_json(j.at("tail")), std::move(blocks), snap);
}

TimeScale parse_scale(std::string_view text) {
  if (text == "integers") return TimeScale::integers();
  if (text == "reals") return TimeScale::reals();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScaleError(std::string("time scale descriptor is not valid JSON: ") + e.what());
  }
  return scale_from_json(j);
}

json scale_to_json(const TimeScale& ts) {
  json out;
  if (ts.blocks().empty()) {
    out = tail_to_json(ts.tail());
  } else {
    json blocks = json::array();
    for (const Block& b : ts.blocks()) {
      if (b.lo == b.hi) {
        blocks.push_back({{"point", b.lo}});
      } else {
        blocks.push_back({{"interval", {b.lo, b.hi}}});
      }
    }
    out = {{"kind", "union"}, {"blocks", blocks}, {"tail", tail_to_json(ts.tail())}};
  }
  if (ts.snap() != kDefaultSnap) out["snap"] = ts.snap();
  return out;
}

DualRep dual_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("dual representation must be an object {\"b\":..,\"coeffs\":[..]}");
  const double b = j.value("b", 0.0);
  std::vector<double> coeffs;
  if (j.contains("coeffs")) {
    if (!j.at("coeffs").is_array()) throw std::invalid_argument("\"coeffs\" must be an array of numbers");
    for (const json& c : j.at("coeffs")) {
      if (!c.is_number()) throw std::invalid_argument("\"coeffs\" must be an array of numbers");
      coeffs.push_back(c.get<double>());
    }
  }
  return DualRep::finite(b, std::move(coeffs));
}

json dual_to_json(const DualRep& rep) {
  const std::vector<double> seq = to_ell1(rep);
  return {{"b", rep.b}, {"coeffs", std::vector<double>(seq.begin() + 1, seq.end())}};
}

}  // namespace tscale
