#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tscale/cli.hpp"

using nlohmann::json;
namespace cli = tscale::cli;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json j() const { return json::parse(out); }
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string kCesaro = "if(t<=x, 1/(x+1), 0)";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("integrate") {
    const Outcome o = run({"--json", "integrate", "--scale", R"({"kind":"integers","start":0})", "--f", "t", "--a", "0",
                           "--b", "4"});
    REQUIRE(o.code == cli::kExitOk);
    const json j = o.j();
    CHECK(j["value"] == 6.0);
    CHECK(j["abs_error_estimate"] == 0.0);
    CHECK(j["converged"] == true);
    CHECK(j.contains("evaluations"));
    CHECK(j["truncation_point"] == 4.0);
    const Outcome text = run({"integrate", "--scale", "integers", "--f", "t", "--a", "0", "--b", "4"});
    CHECK(text.code == 0);
    CHECK(text.out.find("value") != std::string::npos);
  }

  TEST_CASE("errors map to exit codes") {
    const Outcome rev = run({"integrate", "--scale", "integers", "--f", "t", "--a", "4", "--b", "0"});
    CHECK(rev.code == cli::kExitConfig);
    CHECK(rev.err.find("a must not exceed b") != std::string::npos);
    const Outcome bad = run({"integrate", "--scale", "integers", "--f", "2**t", "--a", "0", "--b", "4"});
    CHECK(bad.code == cli::kExitConfig);
    CHECK(bad.err.find("offset 2") != std::string::npos);
    CHECK(run({"integrate", "--scale", "integers", "--f", "x", "--a", "0", "--b", "4"}).code == cli::kExitConfig);
    CHECK(run({"integrate", "--scale", "{", "--f", "t", "--a", "0", "--b", "4"}).code == cli::kExitConfig);
    CHECK(run({"nonsense"}).code == cli::kExitConfig);
    CHECK(run({}).code == cli::kExitConfig);
    CHECK(run({"integrate", "--scale", "integers", "--f", "1/(t-2)", "--a", "0", "--b", "4"}).code == cli::kExitFailure);
  }

  TEST_CASE("strict mode reports non-convergence") {
    const std::vector<std::string> args{"--json", "improper", "--scale", "reals", "--f", "1", "--a", "0"};
    const Outcome lax = run(args);
    CHECK(lax.code == 0);
    CHECK(lax.j()["converged"] == false);
    auto strict = args;
    strict.insert(strict.begin(), "--strict");
    CHECK(run(strict).code == cli::kExitNotConverged);
    const Outcome ok = run({"--json", "--strict", "improper", "--scale", "integers", "--f", "2^(-t)", "--a", "0"});
    CHECK(ok.code == 0);
    CHECK(ok.j()["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  }

  TEST_CASE("trace lists partitions and segments") {
    const Outcome o = run({"--json", "--trace", "integrate", "--scale",
                           R"({"kind":"periodic","start":0,"length":1,"period":2})", "--f", "t", "--a", "0", "--b", "3"});
    REQUIRE(o.code == 0);
    const json j = o.j();
    CHECK(j["value"].get<double>() == doctest::Approx(4.0));
    REQUIRE(j["segments"].size() == 3);
    CHECK(j.contains("partition"));
    double sum = 0;
    for (const auto& s : j["segments"]) sum += s["value"].get<double>();
    CHECK(sum == doctest::Approx(4.0));
  }

  TEST_CASE("transform") {
    const Outcome o = run({"--json", "transform", "--kernel", kCesaro, "--xscale", "integers", "--tscale", "integers",
                           "--x", "3", "--x", "5", "--f", "1"});
    REQUIRE(o.code == 0);
    const json rows = o.j()["rows"];
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["x"] == 3.0);
    CHECK(rows[1]["value"].get<double>() == doctest::Approx(1.0));
  }

  TEST_CASE("regularity") {
    const Outcome o = run({"--json", "regularity", "--kernel", kCesaro, "--xscale", "integers", "--tscale", "integers"});
    REQUIRE(o.code == 0);
    const json j = o.j();
    CHECK(j["verdict"] == "Evidence-Regular");
    CHECK(j["M_estimate"].get<double>() == doctest::Approx(1.0));
    REQUIRE(j["conditions"].size() == 4);
    for (const auto& c : j["conditions"]) {
      CHECK(c["passed"] == true);
      CHECK(c.contains("witnesses"));
      CHECK(c.contains("tol"));
    }
    const Outcome d = run({"--json", "regularity", "--kernel", "if(t<=x, 2/(x+1), 0)", "--xscale", "integers",
                           "--tscale", "integers"});
    CHECK(d.j()["verdict"] == "Evidence-C0-Preserving");
    CHECK(d.j()["failed"] == json::array({"iv"}));
  }

  TEST_CASE("dual") {
    const std::string rep = R"({"b":-2,"coeffs":[3,-1]})";
    CHECK(run({"--json", "dual", "norm", "--rep", rep}).j()["norm"] == 6.0);
    const Outcome w = run({"--json", "dual", "witness", "--rep", R"({"b":1,"coeffs":[-1]})", "--scale", "integers",
                           "--r", "1"});
    REQUIRE(w.code == 0);
    CHECK(w.j()["F"] == 2.0);
    CHECK(w.j()["norm"] == 2.0);
    CHECK(w.j()["values"][0] == -1.0);
    CHECK(w.j()["values"][1] == 1.0);
    const Outcome a = run({"--json", "dual", "apply", "--rep", R"({"b":0,"coeffs":[1]})", "--scale", "integers",
                           "--f", "t+5"});
    REQUIRE(a.code == 0);
    CHECK(a.j()["value"] == 5.0);
    CHECK(run({"dual", "frobnicate", "--rep", rep}).code == cli::kExitConfig);
  }

  TEST_CASE("extract-kernel") {
    const Outcome o = run({"--json", "extract-kernel", "--operator", "cesaro", "--tscale", "integers", "--xscale",
                           "integers", "--width", "16", "--x", "0", "--x", "5", "--verify"});
    REQUIRE(o.code == 0);
    CHECK(o.j().dump().find("\"all_ok\":true") != std::string::npos);
  }

  TEST_CASE("scale info and probe") {
    const Outcome i = run({"--json", "scale", "info", "--scale", "integers", "--t", "3"});
    REQUIRE(i.code == 0);
    const json p0 = i.j()["points"][0];
    CHECK(p0["sigma"] == 4.0);
    CHECK(p0["rho"] == 2.0);
    CHECK(p0["mu"] == 1.0);
    CHECK(p0["class"] == "isolated");
    const Outcome p = run({"--json", "scale", "probe", "--scale", "integers", "--f", "1/(t+1)"});
    REQUIRE(p.code == 0);
    CHECK(p.j()["in_C0"] == "Evidence-For");
  }

  TEST_CASE("config files mirror flags") {
    const std::string path = "tscale_cli_test_config.json";
    {
      std::ofstream f(path);
      f << R"({"command":"integrate","scale":{"kind":"integers","start":0},"f":"t","a":0,"b":4,"json":true})";
    }
    const Outcome o = run({"--config", path});
    std::remove(path.c_str());
    REQUIRE(o.code == 0);
    CHECK(o.j()["value"] == 6.0);
    CHECK(run({"--config", "does-not-exist.json"}).code == cli::kExitConfig);
  }

  TEST_CASE("identical runs give identical bytes") {
    const std::vector<std::string> args{"--json", "--trace", "improper", "--scale",
                                        R"({"kind":"geometric","start":1,"ratio":2})", "--f", "1/t^2", "--a", "1"};
    const Outcome a = run(args);
    const Outcome b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.j()["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  }
}
