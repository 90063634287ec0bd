// src/cli/commands.cpp

// Copyright 2026  The voxeval Authors

// See LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "voxeval/cli.hpp"

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "voxeval/analysis.hpp"
#include "voxeval/diarisation.hpp"
#include "voxeval/errors.hpp"
#include "voxeval/rttm.hpp"
#include "voxeval/service/http.hpp"
#include "voxeval/service/service.hpp"
#include "voxeval/text.hpp"
#include "voxeval/trials.hpp"
#include "voxeval/verification.hpp"

namespace voxeval::cli {

namespace {

struct DcfFlags {
  DcfParams params;
  void add(CLI::App* app) {
    app->add_option("--c-miss", params.c_miss, "Cost of a miss")->capture_default_str();
    app->add_option("--c-fa", params.c_fa, "Cost of a false alarm")->capture_default_str();
    app->add_option("--p-tar", params.p_tar, "Prior probability of a target trial")->capture_default_str();
  }
  void check() const {
    if (!(params.c_miss > 0 && params.c_fa > 0 && params.p_tar > 0 && params.p_tar < 1)) {
      throw ConfigError("DCF parameters need c_miss > 0, c_fa > 0 and 0 < p_tar < 1");
    }
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  if (!f) throw Error("cannot write " + path);
}

std::vector<ScoredTrial> load_scored(const std::string& trials_path, const std::string& scores_path) {
  const auto trials = parse_trial_list(read_text_file(trials_path), /*expect_labels=*/true);
  const auto scores = parse_score_file(read_text_file(scores_path));
  return join_scores(trials, scores);
}

std::string format_percent(double ratio, int decimals) {
  return fmt::format("{:.{}f}%", 100.0 * ratio, decimals);
}

std::string format_metric(Metric m, double v) {
  return m == Metric::eer ? format_percent(v, 3) : fmt::format("{:.4f}", v);
}

// Parses `text` one line at a time so every bad line is reported.
template <typename Parse>
std::vector<std::string> collect_line_errors(std::string_view text, Parse&& parse) {
  std::vector<std::string> errors;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    try {
      parse(line);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      msg = msg.substr(msg.find(": ") + 2);
      errors.push_back(fmt::format("line {}: {}", line_no, msg));
    }
  });
  return errors;
}

bool looks_labelled(std::string_view text) {
  bool labelled = false;
  bool decided = false;
  for_each_line(text, [&](std::size_t, std::string_view line) {
    if (decided) return;
    auto f = split_fields(line);
    if (f.empty() || f.front().front() == '#') return;
    labelled = f.size() == 3;
    decided = true;
  });
  return labelled;
}

int validate_scores(const std::string& trials_path, const std::string& submission_path,
                    std::ostream& out) {
  const std::string trials_text = read_text_file(trials_path);
  const auto trials = parse_trial_list(trials_text, looks_labelled(trials_text));
  const std::string text = read_text_file(submission_path);
  std::vector<std::string> findings =
      collect_line_errors(text, [](std::string_view line) { parse_score_file(line); });
  std::vector<ScoreRecord> scores;
  for_each_line(text, [&](std::size_t, std::string_view line) {
    try {
      auto rec = parse_score_file(line);
      scores.insert(scores.end(), rec.begin(), rec.end());
    } catch (const ParseError&) {
    }
  });
  const auto report = check_coverage(trials, scores);
  for (auto& f : report.findings()) findings.push_back(std::move(f));
  if (findings.empty()) {
    out << fmt::format("OK: {} scores cover the {} trials\n", scores.size(), trials.size());
    return kExitOk;
  }
  out << fmt::format("INVALID: {} finding(s)\n", findings.size());
  for (const auto& f : findings) out << "  " << f << '\n';
  return kExitInvalid;
}

int validate_rttm(const std::string& ref_path, const std::string& submission_path, std::ostream& out) {
  const auto refs = parse_rttm(read_text_file(ref_path));
  const std::string text = read_text_file(submission_path);
  std::vector<std::string> findings =
      collect_line_errors(text, [](std::string_view line) { parse_rttm(line); });
  if (findings.empty()) {
    for (const auto& [file_id, _] : parse_rttm(text)) {
      if (!refs.contains(file_id)) findings.push_back("hypothesis for unknown file: " + file_id);
    }
  }
  if (findings.empty()) {
    out << "OK: submission RTTM is valid\n";
    return kExitOk;
  }
  out << fmt::format("INVALID: {} finding(s)\n", findings.size());
  for (const auto& f : findings) out << "  " << f << '\n';
  return kExitInvalid;
}

int serve(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const service::ServiceConfig config = service::load_config(config_path);
  // Block termination signals before any thread starts so sigwait below owns them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::ChallengeService svc(config, [&err](const std::string& line) { err << line << std::endl; });
  service::HttpFrontend http(svc);
  const int port = http.bind(config.listen_host, config.listen_port);
  if (port == 0) {
    throw ConfigError(fmt::format("cannot listen on {}:{}", config.listen_host, config.listen_port));
  }
  out << fmt::format("listening on {}:{}", config.listen_host, port) << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.stop();
  });
  http.listen();
  // listen() returned on its own (stop never requested); release the waiter.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  err << "shut down" << std::endl;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Speaker verification and diarisation scoring toolkit", "voxeval"};
  app.require_subcommand(1);

  std::string trials_path, scores_path, ref_path, hyp_path, submission_path, config_path;
  std::string det_out, csv_out, metadata_path, pairs_path;
  std::vector<std::string> slice_specs, system_specs;
  bool probit_axes = false;
  double collar = kDefaultCollar;
  BootstrapOptions boot;
  std::string metric = "eer";

  auto* verif = app.add_subcommand("score-verif", "EER and minDCF of a score file");
  DcfFlags verif_dcf;
  verif->add_option("--trials", trials_path, "Labelled trial list")->required();
  verif->add_option("--scores", scores_path, "Score file")->required();
  verif_dcf.add(verif);
  verif->add_option("--det-out", det_out, "Write DET points as CSV");
  verif->add_flag("--probit", probit_axes, "Add probit-transformed DET columns");

  auto* det = app.add_subcommand("det", "DET curve points as CSV");
  DcfFlags det_dcf;
  det->add_option("--trials", trials_path, "Labelled trial list")->required();
  det->add_option("--scores", scores_path, "Score file")->required();
  det_dcf.add(det);
  det->add_flag("--probit", probit_axes, "Add probit-transformed columns");
  det->add_option("--out", det_out, "Output path (default: standard output)");

  auto* diar = app.add_subcommand("score-diar", "DER and JER of a hypothesis RTTM");
  diar->add_option("--ref", ref_path, "Reference RTTM")->required();
  diar->add_option("--hyp", hyp_path, "Hypothesis RTTM")->required();
  diar->add_option("--collar", collar, "Forgiveness collar in seconds")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  diar->add_option("--csv-out", csv_out, "Write per-file results as CSV");

  auto* bs = app.add_subcommand("bootstrap", "Percentile bootstrap confidence interval");
  DcfFlags bs_dcf;
  bs->add_option("--trials", trials_path, "Labelled trial list")->required();
  bs->add_option("--scores", scores_path, "Score file")->required();
  bs->add_option("--metric", metric, "eer or min_dcf")->capture_default_str()
      ->check(CLI::IsMember({"eer", "min_dcf", "mindcf"}));
  bs->add_option("--n", boot.n_resamples, "Number of resamples")->capture_default_str()
      ->check(CLI::PositiveNumber);
  bs->add_option("--level", boot.level, "Confidence level")->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  bs->add_option("--seed", boot.seed, "Random seed")->capture_default_str();
  bs->add_option("--threads", boot.threads, "Worker threads")->capture_default_str();
  bs_dcf.add(bs);

  auto* slice = app.add_subcommand("slice", "EER and minDCF per metadata slice");
  DcfFlags slice_dcf;
  slice->add_option("--trials", trials_path, "Labelled trial list")->required();
  slice->add_option("--scores", scores_path, "Score file")->required();
  slice->add_option("--metadata", metadata_path, "CSV utterance_id,duration,gender,language");
  slice->add_option("--pairs", pairs_path, "CSV enroll,test,pair_kind");
  slice->add_option("--slice", slice_specs,
                    "Slice: all | dur>X | gender=male|female | lang=L | kind=A|B")->required();
  slice->add_option("--csv-out", csv_out, "Write the table as CSV");
  slice_dcf.add(slice);

  auto* progress = app.add_subcommand("progress", "Rank several systems on one trial list");
  DcfFlags progress_dcf;
  progress->add_option("--trials", trials_path, "Labelled trial list")->required();
  progress->add_option("--system", system_specs, "name=path/to/scores")->required();
  progress->add_option("--csv-out", csv_out, "Write the table as CSV");
  progress_dcf.add(progress);

  auto* validate = app.add_subcommand("validate", "Check a submission's format and coverage");
  auto* v_trials = validate->add_option("--trials", trials_path, "Trial list (labelled or blind)");
  auto* v_ref = validate->add_option("--ref", ref_path, "Reference RTTM");
  v_trials->excludes(v_ref);
  validate->add_option("--submission", submission_path, "Score file or RTTM")->required();

  auto* srv = app.add_subcommand("serve", "Run the submission server");
  srv->add_option("--config", config_path, "Service configuration (JSON)")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verif) {
      verif_dcf.check();
      const ErrorProfile profile = error_profile(load_scored(trials_path, scores_path));
      const DcfResult best = min_dcf(profile, verif_dcf.params);
      out << fmt::format("EER: {}  minDCF: {:.4f}  threshold: {}\n", format_percent(eer(profile), 3),
                         best.value, best.threshold);
      if (!det_out.empty()) {
        write_file(det_out, det_csv(det_points(profile, probit_axes, verif_dcf.params), probit_axes));
      }
    } else if (*det) {
      det_dcf.check();
      const ErrorProfile profile = error_profile(load_scored(trials_path, scores_path));
      const std::string csv = det_csv(det_points(profile, probit_axes, det_dcf.params), probit_axes);
      if (det_out.empty()) {
        out << csv;
      } else {
        write_file(det_out, csv);
      }
    } else if (*diar) {
      const auto refs = parse_rttm(read_text_file(ref_path));
      const auto hyps = parse_rttm(read_text_file(hyp_path));
      const DiarisationReport report = score_diarisation(refs, hyps, collar);
      out << diarisation_text(report);
      if (!csv_out.empty()) write_file(csv_out, diarisation_csv(report));
    } else if (*bs) {
      bs_dcf.check();
      boot.metric = parse_metric(metric);
      boot.params = bs_dcf.params;
      const ConfidenceInterval ci = bootstrap_ci(load_scored(trials_path, scores_path), boot);
      out << fmt::format("metric: {}\n", metric_name(boot.metric));
      out << fmt::format("point: {}\n", format_metric(boot.metric, ci.point));
      out << fmt::format("ci{:g}: [{}, {}]\n", 100.0 * ci.level, format_metric(boot.metric, ci.low),
                         format_metric(boot.metric, ci.high));
      out << fmt::format("relative_width: {}\n",
                         ci.point > 0 ? format_percent((ci.high - ci.low) / ci.point, 2) : std::string("-"));
      out << fmt::format("resamples: {}  seed: {}\n", ci.n_resamples, ci.seed);
    } else if (*slice) {
      slice_dcf.check();
      std::vector<SlicePredicate> predicates;
      for (const auto& s : slice_specs) predicates.push_back(parse_slice_spec(s));
      MetadataTable table;
      if (!metadata_path.empty()) table.load_utterances(read_text_file(metadata_path));
      if (!pairs_path.empty()) table.load_pair_kinds(read_text_file(pairs_path));
      const auto rows = slice_eval(load_scored(trials_path, scores_path), table, predicates, slice_dcf.params);
      out << slice_text(rows);
      if (!csv_out.empty()) write_file(csv_out, slice_csv(rows));
    } else if (*progress) {
      progress_dcf.check();
      const auto trials = parse_trial_list(read_text_file(trials_path), /*expect_labels=*/true);
      std::vector<SystemScores> systems;
      for (const auto& spec : system_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--system expects name=path, got " + spec);
        systems.push_back({spec.substr(0, eq), parse_score_file(read_text_file(spec.substr(eq + 1)))});
      }
      const auto rows = progression_table(trials, systems, progress_dcf.params);
      out << progression_text(rows);
      if (!csv_out.empty()) write_file(csv_out, progression_csv(rows));
    } else if (*validate) {
      if (trials_path.empty() == ref_path.empty()) {
        throw ConfigError("validate needs exactly one of --trials or --ref");
      }
      return trials_path.empty() ? validate_rttm(ref_path, submission_path, out)
                                 : validate_scores(trials_path, submission_path, out);
    } else if (*srv) {
      return serve(config_path, out, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& f : e.findings()) err << "  " << f << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace voxeval::cli
