// tests/unit/simulate_test.cpp

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sga/scoring.hpp"
#include "sga/simulate.hpp"

namespace sga {
namespace {

TaggedParagraph fixture(const char *name) {
  return parse_tagged_or_throw(oracle::read_fixture(name));
}

TEST(SimulateReading, SkillOneReadsGoldSkillZeroNeverDoes) {
  auto p = fixture("poetry.txt");
  auto gold = render_gold(p).gold_tokens;
  EXPECT_EQ(simulate_reading(p, 1.0, 3).transcript.tokens, gold);
  auto r = simulate_reading(p, 0.0, 3);
  for (const auto &s : p.slots) EXPECT_NE(r.choices[s.index], s.correct_index);
  EXPECT_EQ(r.transcript.tokens, oracle::reading(p, r.choices));
  EXPECT_THROW(simulate_reading(p, 1.5, 0), DecodeError);
}

TEST(SimulateReading, DeterministicPerSeed) {
  auto p = fixture("poetry.txt");
  EXPECT_EQ(simulate_reading(p, 0.5, 42).choices, simulate_reading(p, 0.5, 42).choices);
  bool differs = false;
  for (std::uint64_t s = 0; s < 10 && !differs; ++s)
    differs = simulate_reading(p, 0.5, s).choices != simulate_reading(p, 0.5, s + 100).choices;
  EXPECT_TRUE(differs);
}

TEST(SimulateAsr, NoNoiseNoBiasIsIdentity) {
  auto p = fixture("poetry.txt");
  auto reading = simulate_reading(p, 0.3, 9);
  auto out = simulate_asr(reading.transcript, p, ChannelConfig{}, 1);
  EXPECT_EQ(out.tokens, reading.transcript.tokens);
  EXPECT_EQ(out.source, TranscriptSource::simulator);
}

TEST(SimulateAsr, BiasRewritesWrongOptions) {
  auto p = fixture("walk_script.txt");
  auto wrong = tokenize(
      "it is a late afternoon probably on the 15th of february 2019 my friend and i were walking "
      "on the footpath in central bangalore");
  ChannelConfig ch;
  ch.bias = BiasMode::grammar_correcting;
  auto out = simulate_asr(Transcript{wrong}, p, ch, 0);
  EXPECT_EQ(out.tokens, render_gold(p).gold_tokens);

  auto opening = fixture("poetry_opening.txt");
  auto spoken = tokenize("for the student studying poetry can be a roller coaster ride");
  auto heard = simulate_asr(Transcript{spoken}, opening, ch, 0);
  EXPECT_EQ(heard.tokens[1], "a");
}

TEST(SimulateAsr, NoiseIsReplayable) {
  auto p = fixture("poetry.txt");
  auto reading = simulate_reading(p, 0.7, 5);
  ChannelConfig ch;
  ch.p_sub = 0.1;
  ch.p_del = 0.05;
  ch.p_ins = 0.05;
  auto a = simulate_asr(reading.transcript, p, ch, 77);
  auto b = simulate_asr(reading.transcript, p, ch, 77);
  EXPECT_EQ(a.tokens, b.tokens);
  EXPECT_NE(a.tokens, reading.transcript.tokens);
}

TEST(SimulateCohort, BiasedLiteralScoringErrsMoreThanConstrainedDecoding) {
  auto p = fixture("poetry.txt");
  CohortSimulation cfg;
  auto rows = simulate_cohort(p, cfg);
  ASSERT_EQ(rows.size(), 17u);
  auto table = cohort_report(rows);
  EXPECT_LT(table.clm_total, table.baseline_total);
  EXPECT_EQ(rows.front().student, "#1");
  // Same seeds, same table.
  auto again = simulate_cohort(p, cfg);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].baseline_score, again[i].baseline_score);
    EXPECT_EQ(rows[i].clm_score, again[i].clm_score);
  }
}

}  // namespace
}  // namespace sga
