#include "tscale/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tscale/adapters.hpp"
#include "tscale/descriptor.hpp"
#include "tscale/expr.hpp"
#include "tscale/function_spaces.hpp"
#include "tscale/integration.hpp"
#include "tscale/isolated_dual.hpp"
#include "tscale/kernel_transform.hpp"

namespace tscale::cli {
namespace {

using nlohmann::json;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

std::string join(const std::vector<double>& v, const char* sep = ", ") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : sep) + num(x);
  return s;
}

struct Options {
  bool json = false;
  bool trace = false;
  bool strict = false;

  std::string scale;
  std::string f;
  double a = kUnset;
  double b = kUnset;
  double tol = kUnset;

  double first_step = 1.0;
  double growth = 2.0;
  int stall = 3;

  std::string kernel;
  std::string xscale;
  std::string tscale;
  double alpha = kUnset;
  double beta = kUnset;
  std::vector<double> xs;
  std::vector<double> x0s;
  std::vector<double> ys;
  double x_horizon = 65536.0;

  std::string action;
  std::string rep;
  std::size_t r = 10;

  std::string op;
  std::string row;
  std::size_t width = 10;
  bool verify = false;

  std::size_t window = 32;
  double horizon = 1e7;
  bool accelerate = false;
  double sup_span = 1000.0;
  std::vector<double> points;
};

double or_default(double v, double d) { return std::isnan(v) ? d : v; }

void require(const std::string& v, const char* flag) {
  if (v.empty()) throw ConfigError(std::string(flag) + " is required");
}

void require(double v, const char* flag) {
  if (std::isnan(v)) throw ConfigError(std::string(flag) + " is required");
}

json segment_json(const SegmentTrace& s) {
  json j;
  if (const auto* d = std::get_if<DenseRun>(&s.segment)) {
    j = {{"kind", "dense"}, {"lo", d->lo}, {"hi", d->hi}, {"panels", s.panels}};
  } else {
    const auto& jp = std::get<Jump>(s.segment);
    j = {{"kind", "jump"}, {"at", jp.at}, {"gap", jp.gap}};
  }
  j["value"] = s.value;
  j["error"] = s.error;
  return j;
}

json integral_json(const IntegralResult& r, bool trace) {
  json j = {{"value", r.value},
            {"abs_error_estimate", r.abs_error_estimate},
            {"converged", r.converged},
            {"evaluations", r.evaluations},
            {"truncation_point", r.truncation_point}};
  if (trace) {
    json segs = json::array();
    json partition = json::array();
    for (const auto& s : r.segments) {
      segs.push_back(segment_json(s));
      if (const auto* d = std::get_if<DenseRun>(&s.segment)) {
        if (partition.empty()) partition.push_back(d->lo);
        partition.push_back(d->hi);
      } else {
        const auto& jp = std::get<Jump>(s.segment);
        if (partition.empty()) partition.push_back(jp.at);
        partition.push_back(jp.at + jp.gap);
      }
    }
    j["segments"] = segs;
    j["partition"] = partition;
    json steps = json::array();
    for (const auto& s : r.steps) {
      steps.push_back({{"upper", s.upper}, {"partial", s.partial}, {"increment", s.increment}});
    }
    if (!r.steps.empty()) j["steps"] = steps;
  }
  return j;
}

void print_integral(std::ostream& out, const IntegralResult& r, bool trace) {
  out << "value               " << num(r.value) << "\n"
      << "abs_error_estimate  " << num(r.abs_error_estimate) << "\n"
      << "converged           " << (r.converged ? "yes" : "no") << "\n"
      << "evaluations         " << r.evaluations << "\n";
  if (!r.steps.empty() || trace) out << "truncation_point    " << num(r.truncation_point) << "\n";
  if (!trace) return;
  for (const auto& s : r.segments) {
    out << "  " << to_string(s.segment) << "  value " << num(s.value) << "  error " << num(s.error);
    if (s.panels) out << "  panels " << s.panels;
    out << "\n";
  }
  for (const auto& s : r.steps) {
    out << "  A = " << num(s.upper) << "  F(A) = " << num(s.partial) << "  dF = " << num(s.increment) << "\n";
  }
}

expr::Expr parse_expr(const std::string& src, const char* flag) {
  require(src, flag);
  return expr::parse(src);
}

struct KernelJob {
  TimeScale xs;
  TimeScale ts;
  Kernel kernel;
};

Kernel make_kernel(const Options& o) {
  require(o.xscale, "--xscale");
  require(o.tscale, "--tscale");
  const expr::Expr e = parse_expr(o.kernel, "--kernel");
  TimeScale xs = parse_scale(o.xscale);
  TimeScale ts = parse_scale(o.tscale);
  const double alpha = or_default(o.alpha, xs.min());
  const double beta = or_default(o.beta, ts.min());
  return to_kernel(e, std::move(xs), alpha, std::move(ts), beta);
}

int finish(std::ostream& err, const Options& o, bool converged) {
  if (o.strict && !converged) {
    err << "error: numeric procedure did not converge\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_integrate(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.scale, "--scale");
  require(o.a, "--a");
  require(o.b, "--b");
  const TimeScale ts = parse_scale(o.scale);
  const ScaleFunction f = to_scale_function(parse_expr(o.f, "--f"), ts, o.a);
  QuadratureOptions q;
  q.tol = or_default(o.tol, 1e-8);
  q.trace = o.trace;
  const IntegralResult r = delta_integral(f.evaluator, ts, o.a, o.b, q);
  if (o.json) {
    out << integral_json(r, o.trace).dump(2) << "\n";
  } else {
    print_integral(out, r, o.trace);
  }
  return finish(err, o, r.converged);
}

int cmd_improper(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.scale, "--scale");
  require(o.a, "--a");
  const TimeScale ts = parse_scale(o.scale);
  const ScaleFunction f = to_scale_function(parse_expr(o.f, "--f"), ts, o.a);
  TruncationPolicy p;
  p.first_step = o.first_step;
  p.growth = o.growth;
  p.stall_count = o.stall;
  p.trace = o.trace;
  const IntegralResult r = improper_integral(f.evaluator, ts, o.a, or_default(o.tol, 1e-6), p);
  if (o.json) {
    out << integral_json(r, o.trace).dump(2) << "\n";
  } else {
    print_integral(out, r, o.trace);
  }
  return finish(err, o, r.converged);
}

int cmd_transform(const Options& o, std::ostream& out, std::ostream& err) {
  const Kernel k = make_kernel(o);
  const std::string fsrc = o.f.empty() ? "1" : o.f;
  const ScaleFunction f = to_scale_function(expr::parse(fsrc), k.t_scale, k.beta);
  if (o.xs.empty()) throw ConfigError("--x needs at least one point");
  TruncationPolicy p;
  p.trace = o.trace;
  const double tol = or_default(o.tol, 1e-6);
  bool converged = true;
  json rows = json::array();
  if (!o.json) out << "x\tLf(x)\tabs_error_estimate\tconverged\n";
  for (double x : o.xs) {
    const IntegralResult r = apply_transform(k, f, x, tol, p);
    converged = converged && r.converged;
    if (o.json) {
      json row = integral_json(r, o.trace);
      row["x"] = x;
      rows.push_back(row);
    } else {
      out << num(x) << "\t" << num(r.value) << "\t" << num(r.abs_error_estimate) << "\t"
          << (r.converged ? "yes" : "no") << "\n";
    }
  }
  if (o.json) out << json{{"kernel", o.kernel}, {"f", fsrc}, {"tol", tol}, {"rows", rows}}.dump(2) << "\n";
  return finish(err, o, converged);
}

json condition_json(const char* name, const ConditionResult& c, const char* param) {
  json w = json::array();
  for (const auto& x : c.witnesses) {
    json e = {{"x", x.at}, {"value", x.value}};
    if (x.param) e[param] = *x.param;
    w.push_back(e);
  }
  json j = {{"name", name}, {"passed", c.passed}, {"converged", c.converged}, {"tol", c.tol}, {"witnesses", w}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

int cmd_regularity(const Options& o, std::ostream& out, std::ostream& err) {
  const Kernel k = make_kernel(o);
  RegularityConfig cfg;
  cfg.tol = or_default(o.tol, 1e-6);
  cfg.x_horizon = o.x_horizon;
  cfg.x_probes = o.xs;
  cfg.x0_samples = o.x0s;
  cfg.y_samples = o.ys;
  const RegularityReport r = regularity_report(k, cfg);
  const bool converged = r.cond_i.converged && r.cond_ii.converged && r.cond_iii.converged && r.cond_iv.converged;
  const std::pair<const char*, const ConditionResult*> conds[] = {
      {"i", &r.cond_i}, {"ii", &r.cond_ii}, {"iii", &r.cond_iii}, {"iv", &r.cond_iv}};
  if (o.json) {
    json cj = json::array();
    for (const auto& [name, c] : conds) {
      cj.push_back(condition_json(name, *c, std::string(name) == "i" ? "x0" : "y"));
    }
    out << json{{"M_estimate", r.M_estimate},
                {"conditions", cj},
                {"verdict", to_string(r.verdict)},
                {"failed", r.failed}}
               .dump(2)
        << "\n";
  } else {
    out << "M_estimate  " << num(r.M_estimate) << "\n";
    for (const auto& [name, c] : conds) {
      out << "(" << name << ")  " << (c->passed ? "pass" : "FAIL") << "  tol " << num(c->tol) << "  witnesses "
          << c->witnesses.size();
      if (!c->note.empty()) out << "  " << c->note;
      out << "\n";
      if (o.trace) {
        for (const auto& w : c->witnesses) {
          out << "    x " << num(w.at) << "  value " << num(w.value);
          if (w.param) out << "  " << (std::string(name) == "i" ? "x0 " : "y ") << num(*w.param);
          out << "\n";
        }
      }
    }
    out << "verdict  " << to_string(r.verdict);
    if (!r.failed.empty()) {
      out << " [";
      for (std::size_t i = 0; i < r.failed.size(); ++i) out << (i ? ", " : "") << "(" << r.failed[i] << ")";
      out << "]";
    }
    out << "\n";
  }
  return finish(err, o, converged);
}

IsolatedScale isolated_from(const Options& o, const std::string& descriptor) {
  const TimeScale ts = parse_scale(descriptor.empty() ? "integers" : descriptor);
  return IsolatedScale(ts, or_default(o.beta, ts.min()));
}

int cmd_dual(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.rep, "--rep");
  json rj;
  try {
    rj = json::parse(o.rep);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("--rep is not valid JSON: ") + e.what());
  }
  const DualRep rep = dual_from_json(rj);
  const double tol = or_default(o.tol, 1e-9);

  if (o.action == "norm") {
    const Approx n = functional_norm(rep);
    const std::vector<double> seq = to_ell1(rep);
    if (o.json) {
      out << json{{"norm", n.value}, {"error", n.error}, {"ell1", seq}}.dump(2) << "\n";
    } else {
      out << "norm  " << num(n.value) << "\nell1  (" << join(seq) << ")\n";
    }
    return kExitOk;
  }

  const IsolatedScale s = isolated_from(o, o.scale);
  LimitOptions lim;
  lim.tol = or_default(o.tol, 1e-6);
  if (o.action == "apply") {
    const ScaleFunction f = to_scale_function(parse_expr(o.f, "--f"), s.scale(), s.beta());
    Approx v;
    try {
      v = apply_functional(rep, f, s, tol, lim);
    } catch (const std::domain_error& e) {
      err << "error: " << e.what() << "\n";
      return o.strict ? kExitNotConverged : kExitFailure;
    }
    if (o.json) {
      out << json{{"value", v.value}, {"error", v.error}}.dump(2) << "\n";
    } else {
      out << "F(f)   " << num(v.value) << "\nerror  " << num(v.error) << "\n";
    }
    return kExitOk;
  }
  if (o.action == "witness") {
    if (o.r == 0) throw ConfigError("--r must be >= 1");
    const ScaleFunction w = norm_witness(rep, s, o.r);
    const Approx v = apply_functional(rep, w, s, tol, lim);
    const Approx n = functional_norm(rep);
    std::vector<double> pts, vals;
    for (std::size_t i = 1; i <= o.r + 2; ++i) {
      pts.push_back(s.point(i));
      vals.push_back(w(pts.back()));
    }
    if (o.json) {
      out << json{{"r", o.r}, {"points", pts}, {"values", vals}, {"F", v.value}, {"norm", n.value}}.dump(2) << "\n";
    } else {
      out << "t       " << join(pts, "\t") << "\nf(t)    " << join(vals, "\t") << "\nF(f)    " << num(v.value)
          << "\n||F||   " << num(n.value) << "\n";
    }
    return kExitOk;
  }
  throw ConfigError("dual action must be apply, norm or witness");
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.op, "--operator");
  const IsolatedScale s = isolated_from(o, o.tscale);
  const TimeScale xs = o.xscale.empty() ? s.scale() : parse_scale(o.xscale);
  const double alpha = or_default(o.alpha, xs.min());
  if (o.width == 0) throw ConfigError("--width must be >= 1");

  AbstractOperator op;
  if (o.op == "identity") {
    op = identity_operator(s);
  } else if (o.op == "shift") {
    op = shift_operator(s);
  } else if (o.op == "cesaro") {
    op = cesaro_operator(s);
  } else if (o.op == "custom") {
    const expr::Expr row = parse_expr(o.row, "--row");
    const Kernel rk = to_kernel(row, xs, alpha, s.scale(), s.beta());
    const std::size_t width = o.width;
    op = {"custom", [rk, s, width](const ScaleFunction& f, double x) {
            double sum = 0.0;
            for (std::size_t k = 1; k <= width; ++k) sum += rk(x, s.point(k)) * f(s.point(k));
            return sum;
          }};
  } else {
    throw ConfigError("--operator must be identity, shift, cesaro or custom");
  }

  const ExtractedKernel ek = extract_kernel(op, xs, alpha, s, o.width);
  for (const auto& w : ek.warnings) err << "warning: " << w << "\n";

  std::vector<double> xgrid = o.xs;
  if (xgrid.empty()) {
    double x = xs.ceil_point(alpha);
    for (int i = 0; i < 6; ++i, x = xs.ceil_point(x + 1.0)) xgrid.push_back(x);
  }
  std::vector<double> tk;
  for (std::size_t k = 1; k <= o.width; ++k) tk.push_back(s.point(k));

  json rows = json::array();
  if (!o.json) out << "x \\ t\t" << join(tk, "\t") << "\n";
  for (double x : xgrid) {
    std::vector<double> vals;
    for (double t : tk) vals.push_back(ek.kernel(x, t));
    if (o.json) {
      rows.push_back({{"x", x}, {"K", vals}});
    } else {
      out << num(x) << "\t" << join(vals, "\t") << "\n";
    }
  }

  json report = {{"operator", op.name}, {"width", o.width}, {"t", tk}, {"rows", rows}, {"warnings", ek.warnings}};
  bool ok = true;
  if (o.verify) {
    std::vector<ScaleFunction> fns;
    for (std::size_t k = 1; k <= o.width; ++k) fns.push_back(basis_element(s, k));
    const ReconstructionReport rr = verify_reconstruction(op, ek, s, fns, xgrid, or_default(o.tol, 1e-12));
    ok = rr.all_ok;
    json unit = json::array();
    for (const auto& [x, v] : rr.unit_rows) unit.push_back({{"x", x}, {"row_integral", v}});
    report["verification"] = {{"all_ok", rr.all_ok}, {"max_abs_diff", rr.max_abs_diff}, {"unit_rows", unit}};
    if (!o.json) {
      out << "reconstruction on e_1..e_" << o.width << ": " << (rr.all_ok ? "match" : "MISMATCH")
          << " (max |diff| " << num(rr.max_abs_diff) << ")\n";
      for (const auto& [x, v] : rr.unit_rows) out << "  row integral at x = " << num(x) << ": " << num(v) << "\n";
    }
  }
  if (o.json) out << report.dump(2) << "\n";
  return finish(err, o, ok);
}

std::string point_class(const PointClass& c) {
  if (c.isolated()) return "isolated";
  if (c.dense()) return "dense";
  if (c.right_scattered) return "left-dense right-scattered";
  return "left-scattered right-dense";
}

int cmd_scale(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.scale, "--scale");
  const TimeScale ts = parse_scale(o.scale);
  if (o.action == "info") {
    std::vector<double> pts = o.points;
    if (pts.empty()) {
      double t = ts.min();
      for (int i = 0; i < 5; ++i, t = ts.sigma(t) > t ? ts.sigma(t) : ts.ceil_point(t + 1.0)) pts.push_back(t);
    }
    json rows = json::array();
    if (!o.json) {
      out << "descriptor  " << scale_to_json(ts).dump() << "\nmin         " << num(ts.min()) << "\n"
          << "t\tsigma\trho\tmu\tclass\n";
    }
    for (double raw : pts) {
      const auto c = ts.canonical(raw);
      if (!c) throw ConfigError("point " + num(raw) + " is not in the time scale");
      const double t = *c;
      const std::string cls = point_class(ts.classify(t));
      if (o.json) {
        rows.push_back({{"t", t}, {"sigma", ts.sigma(t)}, {"rho", ts.rho(t)}, {"mu", ts.graininess(t)}, {"class", cls}});
      } else {
        out << num(t) << "\t" << num(ts.sigma(t)) << "\t" << num(ts.rho(t)) << "\t" << num(ts.graininess(t)) << "\t"
            << cls << "\n";
      }
    }
    if (o.json) {
      out << json{{"descriptor", scale_to_json(ts)}, {"min", ts.min()}, {"points", rows}}.dump(2) << "\n";
    }
    return kExitOk;
  }
  if (o.action == "probe") {
    MembershipConfig cfg;
    cfg.limit.tol = or_default(o.tol, 1e-6);
    cfg.limit.window = o.window;
    cfg.limit.horizon = o.horizon;
    cfg.limit.accelerate = o.accelerate;
    cfg.sup_span = o.sup_span;
    const ScaleFunction f =
        to_scale_function(parse_expr(o.f, "--f"), ts, ts.ceil_point(or_default(o.beta, ts.min())));
    const MembershipReport r = membership_report(f, cfg);
    json j = {{"in_C", to_string(r.in_C)},
              {"in_C0", to_string(r.in_C0)},
              {"sup_estimate", r.sup_estimate},
              {"limit",
               {{"status", to_string(r.limit.status)},
                {"value", r.limit.value},
                {"horizon", r.limit.horizon},
                {"oscillation", r.limit.oscillation},
                {"drift", r.limit.drift}}}};
    if (o.trace) j["limit"]["window_points"] = r.limit.window_points;
    if (o.json) {
      out << j.dump(2) << "\n";
    } else {
      out << "in_C          " << to_string(r.in_C) << "\nin_C0         " << to_string(r.in_C0)
          << "\nlimit         " << to_string(r.limit.status);
      if (r.limit.status == LimitStatus::Converged) out << " (" << num(r.limit.value) << ")";
      out << "\noscillation   " << num(r.limit.oscillation) << "\ndrift         " << num(r.limit.drift)
          << "\nsup_estimate  " << num(r.sup_estimate) << "\n";
      if (o.trace) out << "window        " << join(r.limit.window_points) << "\n";
    }
    return finish(err, o, r.limit.status != LimitStatus::Unknown);
  }
  throw ConfigError("scale action must be info or probe");
}

// Keys of a --config JSON object become long flags unless already given.
std::vector<std::string> expand_config(std::vector<std::string> args,
                                       const std::vector<std::string>& commands) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");

  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto command_pos = std::find_first_of(args.begin(), args.end(), commands.begin(), commands.end());
  if (command_pos == args.end()) {
    if (!cfg.contains("command") || !cfg["command"].is_string()) {
      throw ConfigError("no subcommand given on the command line or as \"command\" in the config");
    }
    args.insert(args.begin(), cfg["command"].get<std::string>());
    command_pos = args.begin();
  }
  if (cfg.contains("action") && cfg["action"].is_string()) {
    const std::string action = cfg["action"].get<std::string>();
    const auto next = command_pos + 1;
    const bool has_action = next != args.end() && next->rfind("-", 0) != 0;
    if (!has_action) args.insert(next, action);
  }

  for (const auto& [key, value] : cfg.items()) {
    if (key == "command" || key == "action") continue;
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& e : value) {
        if (!e.is_number()) throw ConfigError("config key \"" + key + "\" must be an array of numbers");
        joined += (joined.empty() ? "" : ",") + num(e.get<double>());
      }
      args.push_back(flag);
      args.push_back(joined);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(num(value.get<double>()));
    } else {
      args.push_back(flag);
      args.push_back(value.dump());
    }
  }
  return args;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Riemann delta-calculus on time scales"};
  app.name("tscale");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", o.json, "Machine-readable JSON output");
  app.add_flag("--trace", o.trace, "Include segments, partitions and witnesses");
  app.add_flag("--strict", o.strict, "Exit 3 when a numeric procedure does not converge");
  app.add_option("--config", "JSON file whose keys mirror the long flags");

  auto* integrate = app.add_subcommand("integrate", "Bounded delta-integral over [a, b]");
  auto* improper = app.add_subcommand("improper", "Improper delta-integral over [a, inf)");
  for (auto* sc : {integrate, improper}) {
    sc->add_option("--scale", o.scale, "Time scale descriptor (JSON or integers/reals)");
    sc->add_option("--f", o.f, "Integrand, an expression in t");
    sc->add_option("--a", o.a, "Lower limit");
    sc->add_option("--tol", o.tol, "Absolute tolerance");
  }
  integrate->add_option("--b", o.b, "Upper limit");
  improper->add_option("--first-step", o.first_step, "First truncation step");
  improper->add_option("--growth", o.growth, "Truncation step growth factor");
  improper->add_option("--stall", o.stall, "Consecutive small increments needed");

  auto* transform = app.add_subcommand("transform", "Evaluate (Lf)(x) on an x-grid");
  auto* regularity = app.add_subcommand("regularity", "Sampled regularity report for a kernel");
  for (auto* sc : {transform, regularity}) {
    sc->add_option("--kernel", o.kernel, "Kernel, an expression in x and t");
    sc->add_option("--xscale", o.xscale, "x time scale descriptor");
    sc->add_option("--tscale", o.tscale, "t time scale descriptor");
    sc->add_option("--alpha", o.alpha, "Start of the x domain (default: x-scale minimum)");
    sc->add_option("--beta", o.beta, "Start of the t domain (default: t-scale minimum)");
    sc->add_option("--tol", o.tol, "Tolerance (default 1e-6)");
    sc->add_option("--x", o.xs, "x points (comma separated)")->delimiter(',');
  }
  transform->add_option("--f", o.f, "Function of t (default 1)");
  regularity->add_option("--x-horizon", o.x_horizon, "Largest probed x (default 65536)");
  regularity->add_option("--x0", o.x0s, "x0 samples for condition (i)")->delimiter(',');
  regularity->add_option("--y", o.ys, "y samples for condition (iii)")->delimiter(',');

  auto* dual = app.add_subcommand("dual", "Functionals b lim f + sum b_n f(t_n)");
  dual->add_option("action", o.action, "apply | norm | witness")->required();
  dual->add_option("--rep", o.rep, "{\"b\":..,\"coeffs\":[..]}");
  dual->add_option("--scale", o.scale, "Isolated time scale (default integers)");
  dual->add_option("--beta", o.beta, "First point t_1");
  dual->add_option("--f", o.f, "Function of t (apply)");
  dual->add_option("--r", o.r, "Witness sign cutoff (witness)");
  dual->add_option("--tol", o.tol, "Tolerance");

  auto* extract = app.add_subcommand("extract-kernel", "Recover K from an operator via its action on e_k");
  extract->add_option("--operator", o.op, "identity | shift | cesaro | custom");
  extract->add_option("--row", o.row, "custom: (Lf)(x) = sum_k row(x, t_k) f(t_k)");
  extract->add_option("--tscale", o.tscale, "Isolated t-scale (default integers)");
  extract->add_option("--xscale", o.xscale, "x-scale (default: the t-scale)");
  extract->add_option("--alpha", o.alpha, "Start of the x domain");
  extract->add_option("--beta", o.beta, "First point t_1");
  extract->add_option("--width", o.width, "Number of materialized indices (default 10)");
  extract->add_option("--x", o.xs, "x points to print (comma separated)")->delimiter(',');
  extract->add_flag("--verify", o.verify, "Check the reconstruction on e_1..e_width and f == 1");
  extract->add_option("--tol", o.tol, "Reconstruction tolerance (default 1e-12)");

  auto* scale = app.add_subcommand("scale", "Inspect a time scale or probe a function on it");
  scale->add_option("action", o.action, "info | probe")->required();
  scale->add_option("--scale", o.scale, "Time scale descriptor");
  scale->add_option("--t", o.points, "Points to classify (info)")->delimiter(',');
  scale->add_option("--f", o.f, "Function of t (probe)");
  scale->add_option("--beta", o.beta, "Domain start (probe)");
  scale->add_option("--tol", o.tol, "Limit tolerance (default 1e-6)");
  scale->add_option("--window", o.window, "Window size (default 32)");
  scale->add_option("--horizon", o.horizon, "Horizon (default 1e7)");
  scale->add_flag("--accelerate", o.accelerate, "Aitken-accelerated limit diagnosis");
  scale->add_option("--sup-span", o.sup_span, "Span sampled for sup |f| (default 1000)");

  const std::vector<std::string> commands{"integrate", "improper", "transform", "regularity",
                                          "dual", "extract-kernel", "scale"};
  try {
    std::vector<std::string> args = expand_config(raw_args, commands);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (integrate->parsed()) return cmd_integrate(o, out, err);
    if (improper->parsed()) return cmd_improper(o, out, err);
    if (transform->parsed()) return cmd_transform(o, out, err);
    if (regularity->parsed()) return cmd_regularity(o, out, err);
    if (dual->parsed()) return cmd_dual(o, out, err);
    if (extract->parsed()) return cmd_extract(o, out, err);
    if (scale->parsed()) return cmd_scale(o, out, err);
  } catch (const expr::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace tscale::cli
