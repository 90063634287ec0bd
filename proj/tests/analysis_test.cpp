// tests/analysis_test.cpp

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

#include <gtest/gtest.h>

#include <random>

#include "voxeval/analysis.hpp"
#include "voxeval/errors.hpp"

using namespace voxeval;

namespace {

std::vector<ScoredTrial> hand_trials() {
  return {{"e", "t1", true, 0.9},  {"e", "t2", true, 0.8},  {"e", "t3", true, 0.4},
          {"e", "n1", false, 0.6}, {"e", "n2", false, 0.2}, {"e", "n3", false, 0.1}};
}

std::vector<ScoredTrial> random_trials(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution is_target(0.3);
  std::vector<ScoredTrial> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool t = is_target(rng);
    out.push_back({"e" + std::to_string(i), "t" + std::to_string(i), t, noise(rng) + (t ? 1.5 : 0.0)});
  }
  return out;
}

ConfidenceInterval ci_of(double point, double low, double high) {
  ConfidenceInterval ci;
  ci.point = point;
  ci.low = low;
  ci.high = high;
  return ci;
}

}  // namespace

TEST(Bootstrap, ZeroVarianceSource) {
  std::vector<ScoredTrial> trials;
  for (int i = 0; i < 20; ++i) {
    trials.push_back({"e", "t" + std::to_string(i), true, 1.0});
    trials.push_back({"e", "n" + std::to_string(i), false, 0.0});
  }
  BootstrapOptions opt;
  opt.n_resamples = 200;
  const auto ci = bootstrap_ci(trials, opt);
  EXPECT_EQ(ci.point, 0.0);
  EXPECT_EQ(ci.low, 0.0);
  EXPECT_EQ(ci.high, 0.0);
  opt.metric = Metric::min_dcf;
  EXPECT_EQ(bootstrap_ci(trials, opt).high, 0.0);
}

TEST(Bootstrap, DeterministicAcrossRunsAndThreads) {
  const auto trials = random_trials(31, 2000);
  BootstrapOptions opt;
  opt.n_resamples = 300;
  opt.seed = 17;
  std::vector<double> a, b, c;
  const auto ci1 = bootstrap_ci(trials, opt, a);
  const auto ci2 = bootstrap_ci(trials, opt, b);
  opt.threads = 4;
  const auto ci3 = bootstrap_ci(trials, opt, c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
  EXPECT_EQ(ci1.low, ci3.low);
  EXPECT_EQ(ci1.high, ci3.high);
  EXPECT_EQ(ci1.low, ci2.low);
  EXPECT_EQ(ci1.point, eer(error_profile(trials)));
  EXPECT_LE(ci1.low, ci1.high);
  EXPECT_EQ(ci1.n_resamples, 300u);
  EXPECT_EQ(ci1.seed, 17u);
}

TEST(Bootstrap, SeedChangesResamples) {
  const auto trials = random_trials(32, 500);
  BootstrapOptions opt;
  opt.n_resamples = 50;
  std::vector<double> a, b;
  bootstrap_ci(trials, opt, a);
  opt.seed = 1;
  bootstrap_ci(trials, opt, b);
  EXPECT_NE(a, b);
}

TEST(Bootstrap, IntervalFromResampleQuantiles) {
  const auto trials = random_trials(33, 1000);
  BootstrapOptions opt;
  opt.n_resamples = 101;
  opt.metric = Metric::min_dcf;
  std::vector<double> values;
  const auto ci = bootstrap_ci(trials, opt, values);
  ASSERT_EQ(values.size(), 101u);
  std::sort(values.begin(), values.end());
  EXPECT_EQ(ci.low, quantile_linear(values, 0.025));
  EXPECT_EQ(ci.high, quantile_linear(values, 0.975));
  EXPECT_EQ(ci.point, min_dcf(error_profile(trials), opt.params).value);
}

TEST(Bootstrap, RejectsSingleClassInput) {
  std::vector<ScoredTrial> trials = {{"e", "t", true, 1.0}, {"e", "u", true, 0.5}};
  EXPECT_THROW(bootstrap_ci(trials, BootstrapOptions{}), UndefinedMetricError);
}

TEST(Quantile, Linear) {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  EXPECT_EQ(quantile_linear(v, 0.0), 1.0);
  EXPECT_EQ(quantile_linear(v, 1.0), 5.0);
  EXPECT_EQ(quantile_linear(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile_linear(v, 0.1), 1.4);
  EXPECT_EQ(quantile_linear(std::vector<double>{7.0}, 0.3), 7.0);
}

TEST(Metric, Names) {
  EXPECT_EQ(parse_metric("eer"), Metric::eer);
  EXPECT_EQ(parse_metric("min_dcf"), Metric::min_dcf);
  EXPECT_EQ(parse_metric("mindcf"), Metric::min_dcf);
  EXPECT_EQ(metric_name(Metric::min_dcf), "min_dcf");
  EXPECT_THROW(parse_metric("auc"), Error);
}

TEST(WidthStats, SingleInterval) {
  const std::vector<ConfidenceInterval> cis = {ci_of(1.0, 0.9, 1.1)};
  const auto s = ci_width_stats(cis);
  EXPECT_DOUBLE_EQ(s.min, 0.2);
  EXPECT_DOUBLE_EQ(s.mean, 0.2);
  EXPECT_DOUBLE_EQ(s.max, 0.2);
}

TEST(WidthStats, TwoIntervals) {
  const std::vector<ConfidenceInterval> cis = {ci_of(1.0, 0.95, 1.05), ci_of(2.0, 1.7, 2.3)};
  const auto s = ci_width_stats(cis);
  EXPECT_NEAR(s.min, 0.1, 1e-12);
  EXPECT_NEAR(s.mean, 0.2, 1e-12);
  EXPECT_NEAR(s.max, 0.3, 1e-12);
}

TEST(WidthStats, ZeroWidthAndExcluded) {
  const std::vector<ConfidenceInterval> cis = {ci_of(0.5, 0.5, 0.5), ci_of(0.0, 0.0, 0.0)};
  const auto s = ci_width_stats(cis);
  EXPECT_EQ(s.min, 0.0);
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.max, 0.0);
  EXPECT_EQ(s.n_used, 1u);
  EXPECT_EQ(s.n_excluded, 1u);
  const std::vector<ConfidenceInterval> zeros = {ci_of(0.0, 0.0, 0.0)};
  EXPECT_THROW(ci_width_stats(zeros), UndefinedMetricError);
}

// ---------------------------------------------------------------------------

namespace {

// Long utterances (ids starting with 'L') give separable scores; short ones
// are noise.
struct SliceCorpus {
  std::vector<ScoredTrial> trials;
  MetadataTable metadata;
};

SliceCorpus slice_corpus() {
  SliceCorpus c;
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    const bool is_long = i % 2 == 0;
    const bool target = i % 4 < 2;
    const std::string e = (is_long ? "L" : "S") + std::to_string(i) + "e";
    const std::string t = (is_long ? "L" : "S") + std::to_string(i) + "t";
    const double score = is_long ? (target ? 2.0 + u(rng) : u(rng)) : u(rng);
    c.trials.push_back({e, t, target, score});
    const double dur = is_long ? 12.0 : 3.0;
    const Gender g = i % 3 == 0 ? Gender::female : Gender::male;
    c.metadata.set_utterance(e, {dur, g, i % 5 == 0 ? "en" : "fr"});
    c.metadata.set_utterance(t, {dur, g, "en"});
    c.metadata.set_pair_kind(e, t, i % 2 ? "same" : "cross");
  }
  return c;
}

}  // namespace

TEST(Slices, AllEqualsGlobal) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_all()};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  ASSERT_EQ(rows.size(), 1u);
  const auto profile = error_profile(c.trials);
  EXPECT_EQ(rows[0].n_pairs, c.trials.size());
  EXPECT_EQ(*rows[0].eer, eer(profile));
  EXPECT_EQ(rows[0].min_dcf->value, min_dcf(profile, DcfParams{}).value);
  EXPECT_EQ(rows[0].min_dcf->threshold, min_dcf(profile, DcfParams{}).threshold);
}

TEST(Slices, EmptySliceHasNoMetrics) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_min_duration(100.0)};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  EXPECT_EQ(rows[0].n_pairs, 0u);
  EXPECT_FALSE(rows[0].eer.has_value());
  EXPECT_FALSE(rows[0].min_dcf.has_value());
}

TEST(Slices, LongDurationSliceIsEasier) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_all(), slice_min_duration(10.0)};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  EXPECT_EQ(rows[1].n_pairs, 200u);
  EXPECT_EQ(*rows[1].eer, 0.0);
  EXPECT_LT(*rows[1].eer, *rows[0].eer);
  EXPECT_LE(rows[1].n_pairs, rows[0].n_pairs);
}

TEST(Slices, DurationThresholdIsStrict) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_min_duration(12.0), slice_min_duration(2.9)};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  EXPECT_EQ(rows[0].n_pairs, 0u);
  EXPECT_EQ(rows[1].n_pairs, 400u);
}

TEST(Slices, PartitionCoversEveryTrialOnce) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_pair_kind_in({"same"}), slice_pair_kind_in({"cross"}),
                                              slice_pair_kind_in({"same", "cross"})};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  EXPECT_EQ(rows[0].n_pairs + rows[1].n_pairs, c.trials.size());
  EXPECT_EQ(rows[2].n_pairs, c.trials.size());
  EXPECT_EQ(rows[0].n_target + rows[1].n_target, rows[2].n_target);
}

TEST(Slices, GenderAndLanguage) {
  const auto c = slice_corpus();
  const std::vector<SlicePredicate> slices = {slice_same_gender(Gender::female), slice_same_language("en")};
  const auto rows = slice_eval(c.trials, c.metadata, slices);
  EXPECT_EQ(rows[0].n_pairs, 134u);  // i % 3 == 0 for i in [0, 400)
  EXPECT_EQ(rows[1].n_pairs, 80u);
}

TEST(Slices, MissingAttributesAreExcluded) {
  std::vector<ScoredTrial> trials = {{"a", "b", true, 1.0}, {"c", "d", false, 0.0}};
  MetadataTable meta;
  meta.set_utterance("a", {5.0, std::nullopt, std::nullopt});
  meta.set_utterance("b", {5.0, std::nullopt, std::nullopt});
  meta.set_utterance("c", {5.0, std::nullopt, std::nullopt});
  const std::vector<SlicePredicate> slices = {slice_min_duration(1.0)};
  const auto rows = slice_eval(trials, meta, slices);
  EXPECT_EQ(rows[0].n_pairs, 1u);
  EXPECT_EQ(rows[0].n_excluded, 1u);
}

TEST(Slices, UnknownColumnIsConfigError) {
  std::vector<ScoredTrial> trials = {{"a", "b", true, 1.0}};
  MetadataTable meta;
  meta.load_utterances("utterance_id,duration\na,4.0\nb,5.5\n");
  const std::vector<SlicePredicate> ok = {slice_min_duration(1.0)};
  EXPECT_NO_THROW(slice_eval(trials, meta, ok));
  const std::vector<SlicePredicate> bad = {slice_same_gender(Gender::male)};
  EXPECT_THROW(slice_eval(trials, meta, bad), ConfigError);
}

TEST(Slices, SpecParsing) {
  EXPECT_EQ(parse_slice_spec("all").name, "all");
  EXPECT_EQ(parse_slice_spec("dur>4").columns, std::vector<Column>{Column::duration});
  EXPECT_EQ(parse_slice_spec("gender=f").columns, std::vector<Column>{Column::gender});
  EXPECT_EQ(parse_slice_spec("lang=en").columns, std::vector<Column>{Column::language});
  EXPECT_EQ(parse_slice_spec("kind=a|b").columns, std::vector<Column>{Column::pair_kind});
  EXPECT_THROW(parse_slice_spec("snr<3"), ConfigError);
  EXPECT_THROW(parse_slice_spec("dur>abc"), ConfigError);
}

TEST(Slices, MetadataCsv) {
  MetadataTable meta;
  meta.load_utterances("utterance_id,gender,language\nu1,f,en\nu2,m,\n");
  meta.load_pair_kinds("enroll,test,pair_kind\nu1,u2,cross\n");
  EXPECT_TRUE(meta.has_column(Column::gender));
  EXPECT_TRUE(meta.has_column(Column::pair_kind));
  EXPECT_FALSE(meta.has_column(Column::duration));
  const auto attrs = meta.attributes("u1", "u2");
  EXPECT_EQ(attrs.enroll_gender, Gender::female);
  EXPECT_EQ(attrs.test_gender, Gender::male);
  EXPECT_EQ(attrs.enroll_language, "en");
  EXPECT_FALSE(attrs.test_language.has_value());
  EXPECT_EQ(attrs.pair_kind, "cross");
  EXPECT_THROW(meta.load_utterances("id,duration\nu1,3\n"), Error);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<TrialPair> pairs_of(const std::vector<ScoredTrial>& trials) {
  std::vector<TrialPair> out;
  for (const auto& t : trials) out.push_back({t.enroll_id, t.test_id, t.target});
  return out;
}

SystemScores system_of(const std::string& name, const std::vector<ScoredTrial>& trials) {
  SystemScores s{name, {}};
  for (const auto& t : trials) s.scores.push_back({t.score, t.enroll_id, t.test_id});
  return s;
}

std::vector<ScoredTrial> with_scores(std::vector<ScoredTrial> trials, const std::vector<double>& scores) {
  for (std::size_t i = 0; i < trials.size(); ++i) trials[i].score = scores[i];
  return trials;
}

}  // namespace

TEST(Progression, Singleton) {
  const auto trials = hand_trials();
  const std::vector<SystemScores> systems = {system_of("base", trials)};
  const auto rows = progression_table(pairs_of(trials), systems);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].name, "base");
  EXPECT_NEAR(rows[0].eer, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(rows[0].min_dcf.value, 0.05 / 3.0, 1e-12);
}

TEST(Progression, DominatorFirst) {
  const auto trials = hand_trials();
  const auto perfect = with_scores(trials, {0.9, 0.8, 0.7, 0.3, 0.2, 0.1});
  const std::vector<SystemScores> systems = {system_of("old", trials), system_of("new", perfect)};
  const auto rows = progression_table(pairs_of(trials), systems);
  EXPECT_EQ(rows[0].name, "new");
  EXPECT_EQ(rows[1].name, "old");
}

TEST(Progression, EqualMinDcfBrokenByEer) {
  // Search small integer score sets for a pair with the same minDCF and a
  // different EER.
  std::vector<ScoredTrial> base;
  for (int i = 0; i < 4; ++i) base.push_back({"e", "t" + std::to_string(i), true, 0.0});
  for (int i = 0; i < 6; ++i) base.push_back({"e", "n" + std::to_string(i), false, 0.0});
  std::mt19937_64 rng(35);
  std::uniform_int_distribution<int> grid(0, 9);
  auto draw = [&] {
    std::vector<double> s;
    for (std::size_t i = 0; i < base.size(); ++i) s.push_back(grid(rng));
    return with_scores(base, s);
  };
  const auto a = draw();
  const auto pa = error_profile(a);
  std::vector<ScoredTrial> b;
  for (int k = 0; k < 100000 && b.empty(); ++k) {
    auto cand = draw();
    const auto pb = error_profile(cand);
    if (min_dcf(pb, {}).value == min_dcf(pa, {}).value && eer(pb) != eer(pa)) b = cand;
  }
  ASSERT_FALSE(b.empty());
  const bool a_better = eer(pa) < eer(error_profile(b));
  const std::vector<SystemScores> systems = {system_of("a", a), system_of("b", b)};
  const auto rows = progression_table(pairs_of(base), systems);
  EXPECT_EQ(rows[0].name, a_better ? "a" : "b");
  EXPECT_EQ(rows[0].min_dcf.value, rows[1].min_dcf.value);
  EXPECT_LT(rows[0].eer, rows[1].eer);
}

TEST(Progression, IncompleteSystemIsNamed) {
  const auto trials = hand_trials();
  auto broken = system_of("broken", trials);
  broken.scores.pop_back();
  const std::vector<SystemScores> systems = {system_of("ok", trials), broken};
  try {
    progression_table(pairs_of(trials), systems);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken"), std::string::npos);
  }
}

TEST(Progression, CsvHeader) {
  const auto trials = hand_trials();
  const std::vector<SystemScores> systems = {system_of("base", trials)};
  const auto rows = progression_table(pairs_of(trials), systems);
  const auto csv = progression_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rank,system,eer,min_dcf,threshold");
}
