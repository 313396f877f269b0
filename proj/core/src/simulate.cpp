// sga/simulate.cpp

#include "sga/simulate.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "sga/scoring.hpp"

namespace sga {

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t pick(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(unit(rng) * static_cast<double>(n));
}

// Common short words a recognizer tends to confuse; mixed with the
// paragraph's own vocabulary when substituting or inserting.
const std::vector<std::string> &confusion_words() {
  static const std::vector<std::string> words = {
      "a",   "the", "an",  "and", "in",   "on",   "of",  "to",
      "is",  "it",  "at",  "as",  "uh",   "um",   "for", "that",
      "this", "was", "with", "but", "so",  "then", "or",  "by"};
  return words;
}

std::vector<std::string> word_pool(const TaggedParagraph &p) {
  std::set<std::string> pool(confusion_words().begin(), confusion_words().end());
  for (const auto &seg : p.segments)
    if (const auto *f = std::get_if<FixedText>(&seg))
      pool.insert(f->tokens.begin(), f->tokens.end());
  for (const auto &slot : p.slots)
    for (const auto &o : slot.options) pool.insert(o.tokens.begin(), o.tokens.end());
  return {pool.begin(), pool.end()};
}

TokenList apply_bias(const TokenList &truth, const TaggedParagraph &p) {
  auto lattices = paragraph_lattices(p);
  ChannelConfig unit_costs;
  auto decoded = constrained_decode(Transcript{truth, TranscriptSource::manual},
                                    lattices, nullptr, FusionConfig{0.0}, unit_costs);
  TokenList out = truth;
  // Right to left so earlier offsets stay valid.
  for (auto it = decoded.choices.rbegin(); it != decoded.choices.rend(); ++it) {
    const auto &slot = p.slots.at(it->slot);
    if (it->option == slot.correct_index) continue;
    const auto &spoken = slot.options[it->option].tokens;
    const auto &correct = slot.correct().tokens;
    if (spoken == correct) continue;
    TokenList region(out.begin() + it->observed_begin, out.begin() + it->observed_end);
    if (region != spoken) continue;
    out.erase(out.begin() + it->observed_begin, out.begin() + it->observed_end);
    out.insert(out.begin() + it->observed_begin, correct.begin(), correct.end());
  }
  return out;
}

}  // namespace

SimulatedReading simulate_reading(const TaggedParagraph &p, double skill,
                                  std::uint64_t seed) {
  if (!(skill >= 0.0 && skill <= 1.0))
    throw DecodeError("reader skill must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  SimulatedReading r;
  r.choices.resize(p.slots.size());
  for (const auto &slot : p.slots) {
    std::size_t choice = slot.correct_index;
    if (unit(rng) >= skill && slot.options.size() > 1) {
      std::size_t k = pick(rng, slot.options.size() - 1);
      choice = k >= slot.correct_index ? k + 1 : k;
    }
    r.choices[slot.index] = choice;
  }
  for (const auto &seg : p.segments) {
    const TokenList *toks = nullptr;
    if (const auto *f = std::get_if<FixedText>(&seg)) {
      toks = &f->tokens;
    } else {
      const auto &slot = p.slots.at(std::get<SlotRef>(seg).index);
      toks = &slot.options[r.choices[slot.index]].tokens;
    }
    r.transcript.tokens.insert(r.transcript.tokens.end(), toks->begin(), toks->end());
  }
  r.transcript.source = TranscriptSource::manual;
  return r;
}

Transcript simulate_asr(const Transcript &truth, const TaggedParagraph &p,
                        const ChannelConfig &ch, std::uint64_t seed) {
  ch.validate();
  TokenList words = truth.tokens;
  if (ch.bias == BiasMode::grammar_correcting && !words.empty())
    words = apply_bias(words, p);

  Transcript out;
  out.source = TranscriptSource::simulator;
  if (ch.p_sub == 0.0 && ch.p_del == 0.0 && ch.p_ins == 0.0) {
    out.tokens = std::move(words);
    return out;
  }

  std::mt19937_64 rng(seed);
  auto pool = word_pool(p);
  auto random_word = [&](const std::string &avoid) {
    for (int tries = 0; tries < 16; ++tries) {
      const auto &w = pool[pick(rng, pool.size())];
      if (w != avoid) return w;
    }
    return avoid + "s";
  };
  for (const auto &w : words) {
    double r = unit(rng);
    if (r < ch.p_del) {
      // dropped
    } else if (r < ch.p_del + ch.p_sub) {
      out.tokens.push_back(random_word(w));
    } else {
      out.tokens.push_back(w);
    }
    if (unit(rng) < ch.p_ins) out.tokens.push_back(random_word(""));
  }
  return out;
}

std::vector<CohortRow> simulate_cohort(const TaggedParagraph &p, const CohortSimulation &cfg) {
  auto forms = render_gold(p);
  auto lattices = paragraph_lattices(p);
  auto lm = NGramLM::train(variant_corpus(p), cfg.lm_order);
  FusionConfig fusion{cfg.gamma};
  fusion.validate();

  ChannelConfig biased;
  biased.p_sub = cfg.p_sub;
  biased.p_del = cfg.p_del;
  biased.p_ins = cfg.p_ins;
  biased.bias = BiasMode::grammar_correcting;
  ChannelConfig plain = biased;
  plain.bias = BiasMode::none;

  std::vector<CohortRow> rows;
  for (std::size_t i = 0; i < cfg.students; ++i) {
    double t = cfg.students > 1 ? static_cast<double>(i) / static_cast<double>(cfg.students - 1) : 0.0;
    double skill = cfg.skill_min + (cfg.skill_max - cfg.skill_min) * t;
    std::uint64_t seed = cfg.seed + i;
    auto reading = simulate_reading(p, skill, seed);
    auto literal = simulate_asr(reading.transcript, p, biased, channel_seed(seed));
    auto heard = simulate_asr(reading.transcript, p, plain, channel_seed(seed));
    auto decoded = constrained_decode(heard, lattices, &lm, fusion, ChannelConfig{});

    CohortRow row;
    row.student = "#" + std::to_string(i + 1);
    row.baseline_score = g_score(literal, forms).score;
    row.clm_score = g_score(Transcript{decoded.tokens, TranscriptSource::constrained_decode}, forms).score;
    row.gold_score = g_score(reading.transcript, forms).score;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sga
