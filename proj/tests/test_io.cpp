// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "dostab/config.hpp"
#include "dostab/csv.hpp"
#include "dostab/io.hpp"

#include "test_util.hpp"

using namespace dostab;

namespace {

void expect_code(errc expected, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected error code " << to_string(expected));
  } catch (const error& e) {
    CHECK(e.code() == expected);
  }
}

}  // namespace

TEST_CASE("an empty ledger serialises to a fixed canonical document") {
  const vote_ledger ledger(vote_ledger::config{"ea", {}}, {});
  const std::string expected = R"({
  "booths": null,
  "current_interval": 0,
  "ea_credential": "ea",
  "oracle_credentials": [
    "ea"
  ],
  "phase": "registration",
  "proposals": [],
  "registration_window": false,
  "registry": [],
  "version": 1,
  "votes": []
}
)";
  CHECK(serialise_ledger(ledger) == expected);
}

TEST_CASE("serialisation is idempotent through a parse") {
  rng gen(404);
  for (int round = 0; round < 100; ++round) {
    const vote_ledger ledger = testutil::random_ledger(gen);
    const std::string once = serialise_ledger(ledger);
    const std::string twice = serialise_ledger(parse_ledger(once));
    CHECK(once == twice);
  }
}

TEST_CASE("distinct ledgers have distinct canonical texts") {
  vote_ledger a(vote_ledger::config{"ea", {}}, {proposal{0, "q", proposal_kind::generic}});
  vote_ledger b(vote_ledger::config{"ea", {}}, {proposal{0, "q", proposal_kind::generic}});
  CHECK(serialise_ledger(a) == serialise_ledger(b));

  b.register_stakeholder("ea", stakeholder_id{1}, 1, "token:1");
  CHECK(serialise_ledger(a) != serialise_ledger(b));
}

TEST_CASE("truncated documents are parse errors") {
  const vote_ledger ledger(vote_ledger::config{"ea", {}}, {});
  const std::string text = serialise_ledger(ledger);
  expect_code(errc::parse_error, [&] { (void)parse_ledger(text.substr(0, text.size() / 2)); });
  expect_code(errc::parse_error, [&] { (void)parse_ledger("not json at all"); });
  expect_code(errc::parse_error, [&] { (void)parse_ledger("{}"); });
}

TEST_CASE("wrong versions and phases are parse errors") {
  const vote_ledger ledger(vote_ledger::config{"ea", {}}, {});
  std::string text = serialise_ledger(ledger);

  std::string v2 = text;
  v2.replace(v2.find("\"version\": 1"), 12, "\"version\": 2");
  expect_code(errc::parse_error, [&] { (void)parse_ledger(v2); });

  std::string bad_phase = text;
  bad_phase.replace(bad_phase.find("registration\""), 13, "limbo\"");
  expect_code(errc::parse_error, [&] { (void)parse_ledger(bad_phase); });
}

namespace {

// A small valid document the mutation tests below rewrite piecemeal.
std::string reference_document() {
  const std::string ea = "ea";
  vote_ledger ledger(vote_ledger::config{ea, {}}, {proposal{0, "q", proposal_kind::generic}});
  ledger.register_stakeholder(ea, stakeholder_id{1}, 2, "token:1");
  ledger.register_stakeholder(ea, stakeholder_id{2}, 1, "token:2");
  ledger.advance_phase(ea);
  ledger.vote_in_interval(0, interval_id{0}, stakeholder_id{1}, vote_choice::from_ordinal(2),
                          identity_proof{stakeholder_id{1}, "token:1"});
  return serialise_ledger(ledger);
}

std::string replaced(std::string text, const std::string& from, const std::string& to) {
  const std::size_t at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("documents breaking core invariants are rejected as such") {
  const std::string good = reference_document();
  (void)parse_ledger(good);

  expect_code(errc::invariant_violation, [&] {
    (void)parse_ledger(replaced(good, "\"choice\": 2", "\"choice\": 7"));
  });
  expect_code(errc::invariant_violation, [&] {
    (void)parse_ledger(replaced(good, "\"weight\": 1", "\"weight\": 0"));
  });
  expect_code(errc::invariant_violation, [&] {
    // Point the vote at a stakeholder the registry does not hold.
    (void)parse_ledger(replaced(good, "\"stakeholder\": 1", "\"stakeholder\": 9"));
  });
  expect_code(errc::invariant_violation, [&] {
    // A vote in an interval beyond the current one.
    (void)parse_ledger(replaced(good, "\"interval\": 0", "\"interval\": 3"));
  });

  // Duplicate the single vote row verbatim.
  const std::string vote_row =
      "{\n      \"choice\": 2,\n      \"interval\": 0,\n      \"proposal\": 0,\n      "
      "\"stakeholder\": 1,\n      \"weight\": 2\n    }";
  expect_code(errc::invariant_violation, [&] {
    (void)parse_ledger(replaced(good, vote_row, vote_row + ",\n    " + vote_row));
  });
}

TEST_CASE("proof documents parse into the right variant") {
  const elapsed_time_proof height =
      parse_proof(R"({"type":"block_height","prev_height":0,"cur_height":16,"required_blocks":16})");
  REQUIRE(std::holds_alternative<block_height_proof>(height));
  CHECK(std::get<block_height_proof>(height).cur_height == 16);

  const elapsed_time_proof quorum =
      parse_proof(R"({"type":"oracle_quorum","certificates":["a","b"],"ea_total":3})");
  REQUIRE(std::holds_alternative<oracle_quorum_proof>(quorum));
  CHECK(std::get<oracle_quorum_proof>(quorum).certificates.size() == 2);

  expect_code(errc::parse_error, [] { (void)parse_proof("{\"type\":\"sundial\"}"); });
  expect_code(errc::parse_error, [] { (void)parse_proof("{"); });
  expect_code(errc::invariant_violation, [] {
    (void)parse_proof(R"({"type":"block_height","prev_height":0,"cur_height":1,"required_blocks":0})");
  });
  expect_code(errc::invariant_violation, [] {
    (void)parse_proof(R"({"type":"oracle_quorum","certificates":[],"ea_total":0})");
  });
}

TEST_CASE("sim configs parse with defaults, comments and strict keys") {
  const sim_file_config defaults = parse_sim_config("");
  CHECK(defaults.sampler == "uniform");
  CHECK(defaults.voters == 8);
  CHECK(defaults.intervals == 30);
  CHECK_FALSE(defaults.has_seed);
  CHECK(defaults.lambda == 0.2);
  CHECK(defaults.blocks_per_interval == 16);

  const sim_file_config cfg = parse_sim_config(
      "# drift reproduction\n"
      "sampler = drift\n"
      "voters = 12\n"
      "intervals = 40   # longer horizon\n"
      "seed = 99\n"
      "lambda = 0.25\n"
      "initial_p = 0.05, 0.15, 0.15, 0.30, 0.35\n"
      "step_up = 0.02\n"
      "step_down = 0.005\n");
  CHECK(cfg.sampler == "drift");
  CHECK(cfg.voters == 12);
  CHECK(cfg.intervals == 40);
  CHECK(cfg.has_seed);
  CHECK(cfg.seed == 99);
  CHECK(cfg.lambda == 0.25);
  CHECK(cfg.initial_p[3] == 0.30);

  expect_code(errc::bad_config, [] { (void)parse_sim_config("samplr = uniform\n"); });
  expect_code(errc::bad_config, [] { (void)parse_sim_config("voters\n"); });
  expect_code(errc::bad_config, [] { (void)parse_sim_config("voters = eight\n"); });
  expect_code(errc::bad_config, [] { (void)parse_sim_config("initial_p = 0.5, 0.5\n"); });
  expect_code(errc::bad_config, [] { (void)parse_sim_config("sampler = stratified\n"); });
}

TEST_CASE("numeric series parse with comments, separators and strict tokens") {
  const auto series = parse_series("0.5 0.4\n0.7, 0.55\t0.62 # trailing note\n");
  REQUIRE(series.size() == 5);
  CHECK(series[0] == 0.5);
  CHECK(series[4] == 0.62);

  CHECK(parse_series("# only a comment\n").empty());
  expect_code(errc::parse_error, [] { (void)parse_series("0.5 oops 0.7"); });
}

TEST_CASE("doubles format as their shortest round-trip form") {
  CHECK(format_double(0.125) == "0.125");
  CHECK(format_double(0.4375) == "0.4375");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1 + 0.2) != format_double(0.3));  // distinct doubles stay distinct
}

TEST_CASE("score and chart CSV layouts are stable") {
  const tally t = testutil::make_tally({2, 1, 3, 1, 1}, 0, 4);
  const std::string csv = score_csv(std::vector<tally>{t});
  CHECK(csv ==
        "interval,proposal,T1,T2,T3,T4,T5,T,NWA,NIWA\n"
        "4,0,2,1,3,1,1,8,0.125,0.4375\n");

  const control_chart chart = i_chart(std::vector<double>{0.5, 0.5, 0.5, 0.5, 2.0});
  REQUIRE(chart.violations.size() == 1);
  const std::string chart_text = chart_csv(chart);
  CHECK(chart_text.rfind("index,point,center,lcl,ucl,violation\n", 0) == 0);
  CHECK(std::count(chart_text.begin(), chart_text.end(), '\n') == 6);
  CHECK(chart_text.find("\n4,2,") != std::string::npos);
  // Flat series then a jump: the jump is the only flagged row.
  std::size_t flagged = 0;
  for (std::size_t pos = chart_text.find(",1\n"); pos != std::string::npos;
       pos = chart_text.find(",1\n", pos + 1))
    ++flagged;
  CHECK(flagged == 1);
}

TEST_CASE("charts serialise to JSON with the CSV's content") {
  const control_chart chart = i_chart(std::vector<double>{0.5, 0.5, 0.5, 0.5, 2.0});
  const nlohmann::json doc = chart_to_json(chart);

  CHECK(doc["kind"] == "individuals");
  CHECK(doc["center"].get<double>() == chart.center);
  CHECK(doc["points"].get<std::vector<double>>() == chart.points);
  CHECK(doc["lcl"].get<std::vector<double>>() == chart.lcl);
  CHECK(doc["ucl"].get<std::vector<double>>() == chart.ucl);
  REQUIRE(doc["violations"].size() == chart.violations.size());
  REQUIRE(doc["violations"].size() == 1);
  CHECK(doc["violations"][0]["index"] == 4);
  CHECK(doc["violations"][0]["side"] == "high");
}

TEST_CASE("ledger files write atomically and read back") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "dostab_io_test";
  fs::create_directories(dir);
  const fs::path path = dir / "ledger.json";

  rng gen(11);
  const vote_ledger ledger = testutil::random_ledger(gen);
  store_ledger(path, ledger);
  CHECK(serialise_ledger(load_ledger(path)) == serialise_ledger(ledger));
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));

  expect_code(errc::io_error, [&] { (void)read_text_file(dir / "absent.json"); });
  fs::remove_all(dir);
}
