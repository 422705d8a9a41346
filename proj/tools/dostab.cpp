// Copyright (c) 2026 The dostab developers
// SPDX-License-Identifier: Apache-2.0
//
// dostab command line tool. Drives 1-out-of-5 weighted opinion polls through
// a file-backed ledger: registration, booth partitioning, voting, tallying,
// interval updates, NIWA scoring, control charts and reproduction
// experiments.
//
// Exit codes: 0 success, 1 domain or usage error, 2 I/O failure.

#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dostab/dostab.hpp"

namespace fs = std::filesystem;

namespace {

// Advisory exclusive lock on <ledger>.lock, held for the duration of a
// mutating command. Readers do not take it; writes are atomic renames.
class file_lock {
 public:
  explicit file_lock(const fs::path& ledger_path) : path_(ledger_path.string() + ".lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw dostab::error(dostab::errc::io_error, "cannot open lock file " + path_);
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw dostab::error(dostab::errc::io_error, "cannot lock " + path_);
    }
  }
  ~file_lock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  file_lock(const file_lock&) = delete;
  file_lock& operator=(const file_lock&) = delete;

 private:
  std::string path_;
  int fd_{-1};
};

std::string default_credential(std::uint64_t id) { return "token:" + std::to_string(id); }

// Proof flags accept inline JSON or @path to a JSON file.
std::string resolve_proof_text(const std::string& arg) {
  if (!arg.empty() && arg.front() == '@') return dostab::read_text_file(arg.substr(1));
  return arg;
}

std::string tally_row(const dostab::tally& t) {
  std::string row = std::to_string(t.interval.index) + ',' + std::to_string(t.proposal);
  for (std::uint64_t count : t.counts) row += ',' + std::to_string(count);
  row += ',' + std::to_string(t.total());
  return row;
}

// -- init ----------------------------------------------------------------------

struct init_opts {
  std::string ledger;
  std::string ea;
  std::vector<std::string> oracles;
  std::vector<std::string> proposals;  // "id:kind:question"
  bool force{false};
};

dostab::proposal parse_proposal_arg(const std::string& arg) {
  const std::size_t first = arg.find(':');
  const std::size_t second = first == std::string::npos ? std::string::npos
                                                        : arg.find(':', first + 1);
  if (second == std::string::npos)
    throw dostab::error(dostab::errc::bad_config,
                        "proposal must look like id:kind:question, got '" + arg + "'");
  std::uint64_t id = 0;
  try {
    id = std::stoull(arg.substr(0, first));
  } catch (const std::exception&) {
    throw dostab::error(dostab::errc::bad_config,
                        "'" + arg.substr(0, first) + "' is not a proposal id");
  }
  return dostab::proposal{id, arg.substr(second + 1),
                          dostab::detail::parse_kind(arg.substr(first + 1, second - first - 1))};
}

void cmd_init(const init_opts& opts) {
  if (!opts.force && fs::exists(opts.ledger))
    throw dostab::error(dostab::errc::bad_config,
                        "ledger file " + opts.ledger + " already exists (use --force)");
  std::vector<dostab::proposal> proposals;
  for (const auto& arg : opts.proposals) proposals.push_back(parse_proposal_arg(arg));

  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger(dostab::vote_ledger::config{opts.ea, opts.oracles},
                             std::move(proposals));
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << "initialised " << opts.ledger << " with " << opts.proposals.size()
            << " proposal(s)\n";
}

// -- register ------------------------------------------------------------------

struct register_opts {
  std::string ledger;
  std::string ea;
  std::uint64_t id{0};
  std::uint64_t weight{1};
  std::string credential;
};

void cmd_register(const register_opts& opts) {
  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const std::string credential =
      opts.credential.empty() ? default_credential(opts.id) : opts.credential;
  ledger.register_stakeholder(opts.ea, dostab::stakeholder_id{opts.id}, opts.weight, credential);
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << "registered stakeholder " << opts.id << " (weight " << opts.weight << ")\n";
}

// -- assign-booths ---------------------------------------------------------------

struct assign_opts {
  std::string ledger;
  std::uint32_t booths{1};
  std::uint64_t seed{0};
};

void cmd_assign_booths(const assign_opts& opts) {
  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const dostab::booth_assignment assignment = ledger.assign_booths(opts.booths, opts.seed);
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << "assigned " << assignment.assignment.size() << " stakeholder(s) to "
            << assignment.booth_count << " booth(s); sizes:";
  for (std::size_t size : assignment.booth_sizes()) std::cout << ' ' << size;
  std::cout << '\n';
}

// -- advance-phase ---------------------------------------------------------------

struct advance_opts {
  std::string ledger;
  std::string ea;
};

void cmd_advance_phase(const advance_opts& opts) {
  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const dostab::election_phase before = ledger.phase();
  ledger.advance_phase(opts.ea);
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << to_string(before) << " -> " << to_string(ledger.phase()) << '\n';
}

// -- vote ------------------------------------------------------------------------

struct vote_opts {
  std::string ledger;
  std::uint64_t proposal{0};
  std::uint64_t interval{0};
  std::uint64_t voter{0};
  int choice{0};
  std::string token;
};

void cmd_vote(const vote_opts& opts) {
  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const std::string token =
      opts.token.empty() ? default_credential(opts.voter) : opts.token;
  ledger.vote_in_interval(opts.proposal, dostab::interval_id{opts.interval},
                          dostab::stakeholder_id{opts.voter},
                          dostab::vote_choice::from_ordinal(opts.choice),
                          dostab::identity_proof{dostab::stakeholder_id{opts.voter}, token});
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << "recorded choice " << opts.choice << " for stakeholder " << opts.voter
            << " in interval " << opts.interval << '\n';
}

// -- tally -----------------------------------------------------------------------

struct tally_opts {
  std::string ledger;
  std::uint64_t proposal{0};
  std::uint64_t interval{0};
  std::optional<std::uint32_t> booth;
};

void cmd_tally(const tally_opts& opts) {
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const dostab::tally t =
      opts.booth ? ledger.booth_tally(*opts.booth, opts.proposal,
                                      dostab::interval_id{opts.interval})
                 : ledger.tally_in_interval(opts.proposal, dostab::interval_id{opts.interval});
  std::cout << tally_row(t) << '\n';
}

// -- update-interval --------------------------------------------------------------

struct update_opts {
  std::string ledger;
  std::string proof;
  std::string ea;
  bool open_registration{false};
};

void cmd_update_interval(const update_opts& opts) {
  file_lock lock{opts.ledger};
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  if (opts.open_registration) {
    if (opts.ea.empty())
      throw dostab::error(dostab::errc::bad_config, "--open-registration needs --ea");
    ledger.request_registration_window(opts.ea);
  }
  ledger.update_interval(dostab::parse_proof(resolve_proof_text(opts.proof)));
  dostab::store_ledger(opts.ledger, ledger);
  std::cout << "interval advanced to " << ledger.current_interval().index << " (phase "
            << to_string(ledger.phase()) << ")\n";
}

// -- score -----------------------------------------------------------------------

struct score_opts {
  std::string ledger;
  std::uint64_t proposal{0};
  std::uint64_t interval{0};
};

void cmd_score(const score_opts& opts) {
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);
  const dostab::tally t =
      ledger.tally_in_interval(opts.proposal, dostab::interval_id{opts.interval});
  if (t.total() == 0)
    throw dostab::error(dostab::errc::empty_tally,
                        "no votes in interval " + std::to_string(opts.interval));
  std::cout << tally_row(t) << ',' << dostab::format_double(dostab::nwa(t).value()) << ','
            << dostab::format_double(dostab::niwa(t).value()) << '\n';
}

// -- chart -----------------------------------------------------------------------

struct chart_opts {
  std::string kind;
  std::string series;
  double lambda{0.2};
  std::string out;
  std::string json;
  std::string svg;
};

void cmd_chart(const chart_opts& opts) {
  const std::vector<double> series = dostab::parse_series(dostab::read_text_file(opts.series));
  dostab::control_chart chart;
  if (opts.kind == "individuals" || opts.kind == "i") {
    chart = dostab::i_chart(series);
  } else if (opts.kind == "moving-range" || opts.kind == "mr") {
    chart = dostab::mr_chart(series);
  } else {
    chart = dostab::ewma_chart(series, dostab::ewma_config{opts.lambda});
  }

  if (opts.out.empty())
    std::cout << dostab::chart_csv(chart);
  else
    dostab::write_text_file_atomic(opts.out, dostab::chart_csv(chart));
  if (!opts.json.empty())
    dostab::write_text_file_atomic(opts.json, dostab::chart_to_json(chart).dump(2) + "\n");
  if (!opts.svg.empty()) dostab::write_text_file_atomic(opts.svg, dostab::chart_svg(chart));
}

// -- simulate / report shared output ------------------------------------------------

struct report_data {
  std::vector<dostab::tally> tallies;
  std::vector<double> series;
  std::optional<dostab::control_chart> individuals;
  std::optional<dostab::control_chart> moving_range;
  std::optional<dostab::control_chart> ewma;
};

nlohmann::json violations_json(const report_data& data) {
  auto section = [](const std::optional<dostab::control_chart>& chart) {
    nlohmann::json doc;
    if (!chart) {
      doc["count"] = 0;
      doc["violations"] = nlohmann::json::array();
      return doc;
    }
    doc["count"] = chart->violations.size();
    doc["violations"] = dostab::chart_to_json(*chart)["violations"];
    return doc;
  };
  nlohmann::json doc;
  doc["individuals"] = section(data.individuals);
  doc["moving_range"] = section(data.moving_range);
  doc["ewma"] = section(data.ewma);
  return doc;
}

void write_experiment_files(const fs::path& dir, const report_data& data, bool with_svg) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw dostab::error(dostab::errc::io_error, "cannot create directory " + dir.string());

  auto chart_text = [](const std::optional<dostab::control_chart>& chart) {
    if (!chart) return std::string(dostab::chart_csv_header) + "\n";
    return dostab::chart_csv(*chart);
  };
  dostab::write_text_file_atomic(dir / "niwa.csv", dostab::score_csv(data.tallies));
  dostab::write_text_file_atomic(dir / "i_chart.csv", chart_text(data.individuals));
  dostab::write_text_file_atomic(dir / "mr_chart.csv", chart_text(data.moving_range));
  dostab::write_text_file_atomic(dir / "ewma_chart.csv", chart_text(data.ewma));
  dostab::write_text_file_atomic(dir / "violations.json", violations_json(data).dump(2) + "\n");
  if (with_svg) {
    if (data.individuals)
      dostab::write_text_file_atomic(dir / "i_chart.svg", dostab::chart_svg(*data.individuals));
    if (data.moving_range)
      dostab::write_text_file_atomic(dir / "mr_chart.svg", dostab::chart_svg(*data.moving_range));
    if (data.ewma)
      dostab::write_text_file_atomic(dir / "ewma_chart.svg", dostab::chart_svg(*data.ewma));
  }
}

// -- simulate --------------------------------------------------------------------

struct simulate_opts {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool svg{false};
};

void cmd_simulate(const simulate_opts& opts) {
  std::string config_text;
  try {
    config_text = dostab::read_text_file(opts.config);
  } catch (const dostab::error&) {
    throw dostab::error(dostab::errc::bad_config, "cannot read config " + opts.config);
  }
  const dostab::sim_file_config file_cfg = dostab::parse_sim_config(config_text);
  if (!opts.seed && !file_cfg.has_seed)
    throw dostab::error(dostab::errc::bad_config,
                        "no seed given: pass --seed or set seed= in the config");
  const std::uint64_t seed = opts.seed ? *opts.seed : file_cfg.seed;

  dostab::experiment_result result =
      dostab::run_experiment(dostab::make_experiment_config(file_cfg, seed));
  report_data data{std::move(result.tallies), std::move(result.series),
                   std::move(result.individuals), std::move(result.moving_range),
                   std::move(result.ewma)};
  write_experiment_files(opts.out, data, opts.svg);
  std::cout << "wrote " << (opts.svg ? "8" : "5") << " files to " << opts.out << " ("
            << data.series.size() << " intervals; violations: I="
            << result.violations.individuals << " MR=" << result.violations.moving_range
            << " EWMA=" << result.violations.ewma << ")\n";
}

// -- report ----------------------------------------------------------------------

struct report_opts {
  std::string ledger;
  std::uint64_t proposal{0};
  std::uint64_t first{0};
  std::optional<std::uint64_t> last;
  double lambda{0.2};
  std::string out;
  bool svg{false};
};

void cmd_report(const report_opts& opts) {
  dostab::vote_ledger ledger = dostab::load_ledger(opts.ledger);

  std::uint64_t last;
  if (opts.last) {
    last = *opts.last;
  } else if (ledger.phase() == dostab::election_phase::tallying) {
    last = ledger.current_interval().index;
  } else if (ledger.current_interval().index > 0) {
    last = ledger.current_interval().index - 1;
  } else {
    throw dostab::error(dostab::errc::interval_not_existing, "no closed interval to report on");
  }
  if (last < opts.first)
    throw dostab::error(dostab::errc::bad_config, "report range is empty");

  const auto scores = dostab::niwa_series(ledger, opts.proposal, dostab::interval_id{opts.first},
                                          dostab::interval_id{last});
  report_data data;
  for (const auto& score : scores) {
    data.tallies.push_back(ledger.tally_in_interval(opts.proposal, score.interval));
    data.series.push_back(score.value.value());
  }
  if (data.series.size() >= 2) {
    data.individuals = dostab::i_chart(data.series);
    data.moving_range = dostab::mr_chart(data.series);
    data.ewma = dostab::ewma_chart(data.series, dostab::ewma_config{opts.lambda});
  }

  std::cout << "proposal " << opts.proposal << ", intervals " << opts.first << ".." << last
            << '\n';
  double mean = 0.0;
  for (double v : data.series) mean += v;
  mean /= static_cast<double>(data.series.size());
  auto count = [](const std::optional<dostab::control_chart>& chart) {
    return chart ? chart->violations.size() : std::size_t{0};
  };
  std::cout << "mean NIWA " << dostab::format_double(mean) << '\n'
            << "violations: I=" << count(data.individuals) << " MR=" << count(data.moving_range)
            << " EWMA=" << count(data.ewma) << '\n';
  if (!opts.out.empty()) write_experiment_files(opts.out, data, opts.svg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1-out-of-5 weighted opinion polls: ledger, NIWA scores, control charts"};
  app.require_subcommand(1);

  auto init = std::make_shared<init_opts>();
  {
    CLI::App* cmd = app.add_subcommand("init", "Create a new ledger file");
    cmd->add_option("--ledger", init->ledger, "Ledger file to create")->required();
    cmd->add_option("--ea", init->ea, "Election authority credential")->required();
    cmd->add_option("--oracle", init->oracles,
                    "EA oracle credential accepted in quorum proofs (repeatable)");
    cmd->add_option("--proposal", init->proposals,
                    "Proposal as id:kind:question, kind one of own_group, other_group, exit, "
                    "generic (repeatable)");
    cmd->add_flag("--force", init->force, "Overwrite an existing ledger file");
    cmd->callback([init] { cmd_init(*init); });
  }

  auto reg = std::make_shared<register_opts>();
  {
    CLI::App* cmd = app.add_subcommand("register", "Register a stakeholder (EA only)");
    cmd->add_option("--ledger", reg->ledger, "Ledger file")->required();
    cmd->add_option("--ea", reg->ea, "Election authority credential")->required();
    cmd->add_option("--id", reg->id, "Stakeholder id")->required();
    cmd->add_option("--weight", reg->weight, "Voting weight (shares), default 1");
    cmd->add_option("--credential", reg->credential,
                    "Voting credential (default token:<id>)");
    cmd->callback([reg] { cmd_register(*reg); });
  }

  auto assign = std::make_shared<assign_opts>();
  {
    CLI::App* cmd = app.add_subcommand("assign-booths",
                                       "Randomly partition stakeholders into booths");
    cmd->add_option("--ledger", assign->ledger, "Ledger file")->required();
    cmd->add_option("--booths", assign->booths, "Number of booths")->required();
    cmd->add_option("--seed", assign->seed, "Shuffle seed")->required();
    cmd->callback([assign] { cmd_assign_booths(*assign); });
  }

  auto advance = std::make_shared<advance_opts>();
  {
    CLI::App* cmd = app.add_subcommand("advance-phase",
                                       "registration -> voting -> tallying (EA only)");
    cmd->add_option("--ledger", advance->ledger, "Ledger file")->required();
    cmd->add_option("--ea", advance->ea, "Election authority credential")->required();
    cmd->callback([advance] { cmd_advance_phase(*advance); });
  }

  auto vote = std::make_shared<vote_opts>();
  {
    CLI::App* cmd = app.add_subcommand("vote", "Cast or change a vote in the open interval");
    cmd->add_option("--ledger", vote->ledger, "Ledger file")->required();
    cmd->add_option("--proposal", vote->proposal, "Proposal id")->required();
    cmd->add_option("--interval", vote->interval, "Interval index")->required();
    cmd->add_option("--voter", vote->voter, "Stakeholder id")->required();
    cmd->add_option("--choice", vote->choice, "Choice ordinal 1 (agree) .. 5 (disagree)")
        ->required();
    cmd->add_option("--token", vote->token, "Voting credential (default token:<voter>)");
    cmd->callback([vote] { cmd_vote(*vote); });
  }

  auto tally = std::make_shared<tally_opts>();
  {
    CLI::App* cmd = app.add_subcommand("tally", "Print a tally row for one interval");
    cmd->add_option("--ledger", tally->ledger, "Ledger file")->required();
    cmd->add_option("--proposal", tally->proposal, "Proposal id")->required();
    cmd->add_option("--interval", tally->interval, "Interval index")->required();
    cmd->add_option("--booth", tally->booth, "Restrict to one booth");
    cmd->callback([tally] { cmd_tally(*tally); });
  }

  auto update = std::make_shared<update_opts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "update-interval", "Close the tallied interval with an elapsed-time proof");
    cmd->add_option("--ledger", update->ledger, "Ledger file")->required();
    cmd->add_option("--proof", update->proof, "Proof JSON, inline or @file")->required();
    cmd->add_option("--ea", update->ea, "EA credential (needed for --open-registration)");
    cmd->add_flag("--open-registration", update->open_registration,
                  "Open the next interval in the registration phase");
    cmd->callback([update] { cmd_update_interval(*update); });
  }

  auto score = std::make_shared<score_opts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "score", "Print interval,proposal,T1..T5,T,NWA,NIWA for one closed interval");
    cmd->add_option("--ledger", score->ledger, "Ledger file")->required();
    cmd->add_option("--proposal", score->proposal, "Proposal id")->required();
    cmd->add_option("--interval", score->interval, "Interval index")->required();
    cmd->callback([score] { cmd_score(*score); });
  }

  auto chart = std::make_shared<chart_opts>();
  {
    CLI::App* cmd = app.add_subcommand("chart", "Compute a control chart from a numeric series");
    cmd->add_option("--kind", chart->kind, "individuals|moving-range|ewma (aliases i, mr)")
        ->required()
        ->check(CLI::IsMember({"individuals", "i", "moving-range", "mr", "ewma"}));
    cmd->add_option("--series", chart->series, "File of whitespace-separated values")
        ->required();
    cmd->add_option("--lambda", chart->lambda, "EWMA smoothing weight in (0,1], default 0.2");
    cmd->add_option("--out", chart->out, "Write chart CSV here instead of standard output");
    cmd->add_option("--json", chart->json, "Also write the chart as JSON");
    cmd->add_option("--svg", chart->svg, "Also render the chart as SVG");
    cmd->callback([chart] { cmd_chart(*chart); });
  }

  auto simulate = std::make_shared<simulate_opts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "simulate", "Run a full sampled election and write CSV/JSON results");
    cmd->add_option("--config", simulate->config, "Key=value experiment config file")
        ->required();
    cmd->add_option("--out", simulate->out, "Output directory")->required();
    cmd->add_option("--seed", simulate->seed, "Seed override (required if the config has none)");
    cmd->add_flag("--svg", simulate->svg, "Also render SVG charts");
    cmd->callback([simulate] { cmd_simulate(*simulate); });
  }

  auto report = std::make_shared<report_opts>();
  {
    CLI::App* cmd = app.add_subcommand(
        "report", "Score a ledger's closed intervals and summarise chart violations");
    cmd->add_option("--ledger", report->ledger, "Ledger file")->required();
    cmd->add_option("--proposal", report->proposal, "Proposal id (default 0)");
    cmd->add_option("--first", report->first, "First interval (default 0)");
    cmd->add_option("--last", report->last, "Last interval (default: newest closed)");
    cmd->add_option("--lambda", report->lambda, "EWMA smoothing weight, default 0.2");
    cmd->add_option("--out", report->out, "Also write CSV/JSON results to this directory");
    cmd->add_flag("--svg", report->svg, "Also render SVG charts (needs --out)");
    cmd->callback([report] { cmd_report(*report); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const dostab::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == dostab::errc::io_error ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
