// sga/decode.hpp
//
// Producing the transcript that gets scored: N-best rescoring by shallow
// fusion, and noisy-channel decoding constrained to a paragraph's variant
// lattices.

#ifndef SGA_DECODE_HPP_
#define SGA_DECODE_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sga/ngram_lm.hpp"
#include "sga/variants.hpp"

namespace sga {

enum class TranscriptSource { manual, nbest_rescored, constrained_decode, simulator };

std::string_view to_string(TranscriptSource s);

struct Transcript {
  TokenList tokens;
  TranscriptSource source = TranscriptSource::manual;

  static Transcript from_text(std::string_view text,
                              TranscriptSource source = TranscriptSource::manual);
};

struct NBestEntry {
  TokenList tokens;
  double acoustic_log = 0.0;
};

struct NBestList {
  std::vector<NBestEntry> entries;

  // Throws DecodeError when empty or when a score is not finite.
  void validate() const;
};

enum class BiasMode { none, grammar_correcting };

std::string_view to_string(BiasMode b);
BiasMode bias_mode_from_string(std::string_view s);

struct ChannelConfig {
  double substitution_cost = 1.0;
  double insertion_cost = 1.0;
  double deletion_cost = 1.0;
  double p_sub = 0.0;
  double p_del = 0.0;
  double p_ins = 0.0;
  BiasMode bias = BiasMode::none;

  void validate() const;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

struct RescoreResult {
  Transcript transcript;
  std::size_t index = 0;
  std::vector<double> fused;  // per entry
};

// Picks the entry maximizing acoustic + gamma * LM; ties go to the lower
// index.
RescoreResult rescore_nbest_detailed(const NBestList &nbest, const NGramLM &lm,
                                     const FusionConfig &cfg);
Transcript rescore_nbest(const NBestList &nbest, const NGramLM &lm,
                         const FusionConfig &cfg);

struct SlotChoice {
  std::size_t slot = 0;
  std::size_t option = 0;
  // Observed positions [begin, end) aligned to the option's tokens,
  // including insertions between them. Empty when every token was deleted.
  std::size_t observed_begin = 0;
  std::size_t observed_end = 0;
};

struct DecodeResult {
  TokenList tokens;                 // the chosen variant(s), concatenated
  std::vector<SlotChoice> choices;  // in slot order
  double cost = 0.0;                // channel_cost - gamma * lm_log10
  double channel_cost = 0.0;
  double lm_log10 = 0.0;
};

// Dynamic program over (expanded lattice state, observed position).
// Lattices are decoded as consecutive sentences; each sentence is scored
// by the LM from <s> to </s>. `lm` may be null, which drops the LM term.
// Ties prefer match, then substitution, then deletion, then insertion,
// then the lower option index.
DecodeResult constrained_decode(const Transcript &observed,
                                std::span<const VariantLattice> lattices,
                                const NGramLM *lm, const FusionConfig &cfg,
                                const ChannelConfig &ch);

inline DecodeResult constrained_decode(const Transcript &observed,
                                       const VariantLattice &lattice,
                                       const NGramLM *lm,
                                       const FusionConfig &cfg,
                                       const ChannelConfig &ch) {
  return constrained_decode(observed, std::span<const VariantLattice>(&lattice, 1),
                            lm, cfg, ch);
}

// Lattices for every sentence of a paragraph.
std::vector<VariantLattice> paragraph_lattices(const TaggedParagraph &p);

}  // namespace sga

#endif  // SGA_DECODE_HPP_
