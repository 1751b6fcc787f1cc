#include <doctest.h>

#include <json.hpp>

#include "cflab/errors.hpp"
#include "cflab/runner.hpp"

using namespace cflab;
using nlohmann::json;

namespace {

json base_dim_config() {
  return json::parse(R"({
    "command": "dim",
    "dim": {"estimator": "solve_root", "B": 1.0, "M": 2, "depth": 8, "tol": 1e-10}
  })");
}

}  // namespace

TEST_CASE("runner: strict schema rejects unknown fields, listing them") {
  auto cfg = base_dim_config();
  cfg["surprise"] = 1;
  try {
    cli::execute(cfg, {}, {});
    FAIL("expected a schema error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("surprise") != std::string::npos);
  }

  auto cfg2 = base_dim_config();
  cfg2["dim"]["unknown_knob"] = true;
  CHECK_THROWS_AS(cli::execute(cfg2, {}, {}), InvalidInput);

  json missing = {{"command", "dim"}};
  CHECK_THROWS_AS(cli::execute(missing, {}, {}), InvalidInput);

  json badcmd = {{"command", "frobnicate"}, {"frobnicate", json::object()}};
  CHECK_THROWS_AS(cli::execute(badcmd, {}, {}), InvalidInput);

  auto badseed = base_dim_config();
  badseed["seed"] = -4;
  CHECK_THROWS_AS(cli::execute(badseed, {}, {}), InvalidInput);

  // wrong json types surface as schema errors, not internal ones
  auto badtype = base_dim_config();
  badtype["dim"]["M"] = "two";
  CHECK_THROWS_AS(cli::execute(badtype, {}, {}), InvalidInput);
}

TEST_CASE("runner: deterministic report apart from wall time") {
  auto cfg = base_dim_config();
  auto a = cli::execute(cfg, 7, 1);
  auto b = cli::execute(cfg, 7, 1);
  a.report.erase("wall_time_ms");
  b.report.erase("wall_time_ms");
  CHECK(a.report.dump() == b.report.dump());
  CHECK(a.exit_code == 0);
  CHECK(a.report["result"]["value"].get<double>() > 0.5);
}

TEST_CASE("runner: thread count does not change results") {
  auto cfg = base_dim_config();
  auto a = cli::execute(cfg, 7, 1);
  auto b = cli::execute(cfg, 7, 4);
  a.report.erase("wall_time_ms");
  b.report.erase("wall_time_ms");
  a.report.erase("threads");
  b.report.erase("threads");
  CHECK(a.report.dump() == b.report.dump());
}

TEST_CASE("runner: gate refusal becomes exit code 2 with the gate named") {
  auto cfg = base_dim_config();
  cfg["dim"]["M"] = 10;
  cfg["dim"]["depth"] = 12;
  cfg["dim"]["max_words"] = 1000;
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.exit_code == 2);
  CHECK(out.report["result"]["refusal"]["gate"] == "enumeration_budget");
}

TEST_CASE("runner: classify command end to end") {
  auto cfg = json::parse(R"({
    "command": "classify",
    "classify": {"family": {"family": "linear", "params": {"alpha": 3}}, "window": [1, 1000]}
  })");
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["result"]["verdict"] == "ruled_out_sublinear");
}

TEST_CASE("runner: csv output formats") {
  auto cfg = base_dim_config();
  cfg["output"] = {{"path", ""}, {"format", "csv"}};
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.text.rfind("depth,root,bracket_lo,bracket_hi\n", 0) == 0);
  // one row per recorded depth
  int rows = 0;
  for (char c : out.text)
    if (c == '\n') ++rows;
  CHECK(rows == 9);  // header + 8 depths

  auto vcfg = json::parse(R"({
    "command": "verify",
    "output": {"path": "", "format": "csv"},
    "verify": {"check": "interval_bounds", "mode": "exhaustive", "max_len": 3, "max_digit": 2}
  })");
  auto vout = cli::execute(vcfg, {}, {});
  CHECK(vout.text.rfind("instance,hypothesis,conclusion,margin\n", 0) == 0);

  auto jcfg = vcfg;
  jcfg["output"]["format"] = "jsonl";
  auto jout = cli::execute(jcfg, {}, {});
  CHECK(jout.text.find("\"conclusion_holds\":true") != std::string::npos);

  // jsonl is verify-only
  auto bad = base_dim_config();
  bad["output"] = {{"path", ""}, {"format", "jsonl"}};
  CHECK_THROWS_AS(cli::execute(bad, {}, {}), InvalidInput);
}

TEST_CASE("runner: construct command with pinned report") {
  auto cfg = json::parse(R"({
    "command": "construct",
    "construct": {"spec": {"kind": "h_m", "M": 3, "beta": 0.5, "N": 2, "policy": "all_ones"},
                   "n": 9}
  })");
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.exit_code == 0);
  CHECK(out.report["result"]["pinned"][0]["digit"] == "4");
  CHECK(out.report["result"]["pinned"][1]["digit"] == "12");
  CHECK(out.report["result"]["t_count"] == 3);
  CHECK(out.report["result"]["pinned_count"] == 2);
  CHECK(out.report["result"]["deleted"].size() == 7);
}

TEST_CASE("runner: verify single comparison instance") {
  auto cfg = json::parse(R"({
    "command": "verify",
    "verify": {"check": "comparison", "mode": "single",
               "sigma": [1,2,3,4,5,1,2,3,4,5], "tau": [1,2,3,4,3,1,2,3,4,5],
               "epsilon": 0.7, "psi": 6}
  })");
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.report["result"]["hypothesis_satisfied"] == true);
  CHECK(out.report["result"]["conclusion_holds"] == true);
}

TEST_CASE("runner: seed flows into seeded verify runs") {
  auto cfg = json::parse(R"({
    "command": "verify",
    "verify": {"check": "comparison", "mode": "random", "count": 50, "n_max": 16,
               "digit_max": 6}
  })");
  auto a = cli::execute(cfg, 11, 1);
  auto b = cli::execute(cfg, 11, 1);
  auto c = cli::execute(cfg, 12, 1);
  CHECK(a.report["result"].dump() == b.report["result"].dump());
  CHECK(a.report["result"]["conclusion_pass"] == 50);
  CHECK(c.report["result"]["conclusion_pass"] == 50);
  CHECK(a.report["seed"] == 11);
  CHECK(c.report["seed"] == 12);
}

TEST_CASE("runner: construct e_bc and perturbed kinds") {
  auto cfg = json::parse(R"({
    "command": "construct",
    "construct": {"spec": {"kind": "e_bc", "b": 2, "c": 2}, "n": 3}
  })");
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.report["result"]["word"] == nlohmann::json({"4", "16", "256"}));
  CHECK(out.report["result"]["deleted"].empty());

  auto pcfg = json::parse(R"({
    "command": "construct",
    "construct": {"spec": {"kind": "perturbed"}, "n": 5, "base": [1, 1, 1, 1, 1]}
  })");
  auto pout = cli::execute(pcfg, {}, {});
  CHECK(pout.report["result"]["word"] == nlohmann::json({"1", "1", "1", "8", "1"}));
}

TEST_CASE("runner: pressure via collocation") {
  auto cfg = json::parse(R"({
    "command": "pressure",
    "pressure": {"s": 1.0, "B": 1.0, "M": 2, "depth": 4, "method": "collocation"}
  })");
  auto out = cli::execute(cfg, {}, {});
  CHECK(out.exit_code == 0);
  // at s=1 the truncated-alphabet pressure is negative (contraction)
  CHECK(out.report["result"]["pressure"].get<double>() < 0.0);
}

TEST_CASE("runner: top-level budget block applies to commands") {
  auto cfg = base_dim_config();
  cfg["budget"] = {{"max_depth", 6}};
  auto out = cli::execute(cfg, {}, {});  // depth 8 > budget 6
  CHECK(out.exit_code == 2);
  CHECK(out.report["result"]["refusal"]["gate"] == "depth_budget");

  auto cfg2 = base_dim_config();
  cfg2["budget"] = {{"max_words", 100}};
  auto out2 = cli::execute(cfg2, {}, {});  // 2^8 words > 100
  CHECK(out2.exit_code == 2);
  CHECK(out2.report["result"]["refusal"]["gate"] == "enumeration_budget");

  auto ccfg = json::parse(R"({
    "command": "construct",
    "budget": {"max_digit_bits": 64},
    "construct": {"spec": {"kind": "e_bc", "b": 2, "c": 2}, "n": 9}
  })");
  auto out3 = cli::execute(ccfg, {}, {});  // 2^{2^9} needs 512 bits
  CHECK(out3.exit_code == 2);
  CHECK(out3.report["result"]["refusal"]["gate"] == "digit_budget");

  auto bad = base_dim_config();
  bad["budget"] = {{"max_steps", 5}};
  CHECK_THROWS_AS(cli::execute(bad, {}, {}), InvalidInput);
}
