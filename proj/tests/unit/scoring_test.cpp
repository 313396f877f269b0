// tests/unit/scoring_test.cpp

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sga/scoring.hpp"
#include "sga/transcript_io.hpp"

namespace sga {
namespace {

TaggedParagraph poetry() { return parse_tagged_or_throw(oracle::read_fixture("poetry.txt")); }

TokenList random_tokens(std::mt19937_64 &rng, std::size_t max_len) {
  static const TokenList alphabet = {"a", "b", "c", "d"};
  TokenList t(rng() % (max_len + 1));
  for (auto &w : t) w = alphabet[rng() % alphabet.size()];
  return t;
}

TEST(Align, CostEqualsEditDistanceOnRandomPairs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    auto ref = random_tokens(rng, 10), hyp = random_tokens(rng, 10);
    auto a = align(ref, hyp);
    ASSERT_EQ(a.cost(), oracle::edit_distance(ref, hyp));
    // The ops must consume both sequences in order.
    std::size_t r = 0, h = 0;
    for (const auto &op : a.ops) {
      if (op.ref) ASSERT_EQ(*op.ref, r++);
      if (op.hyp) ASSERT_EQ(*op.hyp, h++);
      if (op.kind == EditKind::match) ASSERT_EQ(ref[*op.ref], hyp[*op.hyp]);
      if (op.kind == EditKind::substitution) ASSERT_NE(ref[*op.ref], hyp[*op.hyp]);
    }
    ASSERT_EQ(r, ref.size());
    ASSERT_EQ(h, hyp.size());
  }
}

TEST(Align, PrefersMoreMatchesAmongMinimalAlignments) {
  // Both "sub sub" and "del match ins" cost two edits; the latter keeps
  // the shared word.
  TokenList ref = {"x", "a"}, hyp = {"a", "y"};
  auto a = align(ref, hyp);
  EXPECT_EQ(a.cost(), 2u);
  EXPECT_EQ(a.count(EditKind::match), 1u);
}

TEST(Wer, KnownValuesAndErrors) {
  TokenList ref = tokenize("for a student studying poetry");
  EXPECT_DOUBLE_EQ(wer(ref, ref), 0.0);
  EXPECT_DOUBLE_EQ(wer(ref, tokenize("for the student studying poetry")), 0.2);
  EXPECT_DOUBLE_EQ(wer(ref, TokenList{}), 1.0);
  EXPECT_DOUBLE_EQ(wer(TokenList{"a"}, TokenList{"b", "c", "d"}), 3.0);
  EXPECT_THROW(wer(TokenList{}, ref), ScoringError);
}

TEST(Wer, MatchesOracleOnRandomPairs) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    auto ref = random_tokens(rng, 10), hyp = random_tokens(rng, 10);
    if (ref.empty()) continue;
    ASSERT_DOUBLE_EQ(wer(ref, hyp), static_cast<double>(oracle::edit_distance(ref, hyp)) /
                                        static_cast<double>(ref.size()));
  }
}

TEST(Wer, BiasedRecognizerPairs) {
  auto truth = parse_transcript(oracle::read_fixture("asr_truth1.txt"));
  auto heard = parse_transcript(oracle::read_fixture("asr_biased1.txt"));
  EXPECT_DOUBLE_EQ(wer(truth, heard), 1.0 / 24.0);
  auto truth2 = parse_transcript(oracle::read_fixture("asr_truth2.txt"));
  auto heard2 = parse_transcript(oracle::read_fixture("asr_biased2.txt"));
  EXPECT_DOUBLE_EQ(wer(truth2, heard2), 6.0 / 24.0);
}

TEST(GScore, GoldReadingEarnsEverySlot) {
  auto p = poetry();
  auto f = render_gold(p);
  auto r = g_score(Transcript{f.gold_tokens}, f);
  EXPECT_EQ(r.score, 10);
  EXPECT_EQ(r.p2_size, 10u);
  EXPECT_EQ(r.p1_size, 0u);
  for (const auto &s : r.slots) EXPECT_TRUE(s.credited);
}

TEST(GScore, OneWrongOptionLosesExactlyThatSlot) {
  auto p = poetry();
  auto f = render_gold(p);
  for (const auto &slot : p.slots) {
    for (std::size_t o = 0; o < slot.options.size(); ++o) {
      if (o == slot.correct_index) continue;
      std::vector<std::size_t> choice;
      for (const auto &s : p.slots) choice.push_back(s.correct_index);
      choice[slot.index] = o;
      auto r = g_score(Transcript{oracle::reading(p, choice)}, f);
      for (const auto &c : r.slots) EXPECT_EQ(c.credited, c.index != slot.index) << slot.index << "/" << o;
      EXPECT_EQ(r.score, 9);
    }
  }
}

TEST(GScore, MultiTokenSlotNeedsEveryToken) {
  auto p = poetry();
  auto f = render_gold(p);
  auto t = f.gold_tokens;
  t.erase(t.begin() + 13);  // drop "is" from "is punctuated"
  auto r = g_score(Transcript{t}, f);
  EXPECT_FALSE(r.slots[2].credited);
  EXPECT_EQ(r.slots[2].observed, (TokenList{"punctuated"}));
  EXPECT_EQ(r.score, 9);
}

// Oracle by construction: option tokens are unique to their option, and
// noise only replaces tokens with words foreign to the paragraph, so a slot
// is credited exactly when its correct option was read and none of its
// tokens was replaced.
TEST(GScore, MatchesConstructionOracleOnRandomParagraphs) {
  std::mt19937_64 rng(123);
  for (int i = 0; i < 500; ++i) {
    auto d = oracle::damaged_reading(rng);
    auto r = g_score(Transcript{d.hyp}, render_gold(parse_tagged_or_throw(d.source.text)));
    int expected = 0;
    for (std::size_t s = 0; s < d.credited.size(); ++s) {
      expected += d.credited[s];
      ASSERT_EQ(r.slots[s].credited, d.credited[s]) << d.source.text << "\n" << join(d.hyp);
    }
    ASSERT_EQ(r.score, expected);
  }
}

TEST(GScore, NonSlotSubstitutionsNeverChangeTheScore) {
  auto p = poetry();
  auto f = render_gold(p);
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    auto [clean, noisy] = oracle::fixed_text_perturbation(p, rng);
    ASSERT_EQ(g_score(Transcript{noisy}, f).score, g_score(Transcript{clean}, f).score)
        << join(noisy);
  }
}

TEST(GrammarError, AbsoluteDifferenceAgainstReference) {
  auto p = poetry();
  auto f = render_gold(p);
  auto machine = g_score(Transcript{f.gold_tokens}, f);
  std::vector<std::size_t> choice;
  for (const auto &s : p.slots) choice.push_back((s.correct_index + 1) % s.options.size());
  choice[0] = p.slots[0].correct_index;
  auto human = g_score(Transcript{oracle::reading(p, choice)}, f);
  EXPECT_EQ(human.score, 1);
  EXPECT_EQ(grammar_error(machine, human), 9);
  EXPECT_EQ(machine.gold_score, 1);
  EXPECT_EQ(machine.epsilon_g, 9);

  auto other = g_score(Transcript{tokenize("a b c")},
                       render_gold(parse_tagged_or_throw(oracle::read_fixture("poetry_opening.txt"))));
  EXPECT_THROW(grammar_error(machine, other), ScoringError);
}

TEST(GScore, ReportJsonRoundTrip) {
  auto f = render_gold(poetry());
  auto r = g_score(Transcript{tokenize("for the student studying poetry")}, f);
  r.gold_score = 4;
  r.epsilon_g = 3;
  auto back = report_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
}

}  // namespace
}  // namespace sga
