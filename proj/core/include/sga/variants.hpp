// sga/variants.hpp
//
// Sentence-local variant sets: every combination of options within one
// sentence, either listed explicitly or as an acyclic lattice.

#ifndef SGA_VARIANTS_HPP_
#define SGA_VARIANTS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "sga/paragraph.hpp"

namespace sga {

using SentencePiece = std::variant<FixedText, GrammarSlot>;

struct SentenceUnit {
  std::size_t index = 0;
  std::vector<SentencePiece> pieces;

  std::size_t slot_count() const;
  TokenList gold_tokens() const;
};

class SentenceSplitError : public Error {
 public:
  using Error::Error;
};

// Splits at '.', '!' or '?' followed by whitespace or end of text. Throws
// SentenceSplitError when an option phrase contains a terminator.
std::vector<SentenceUnit> split_sentences(const TaggedParagraph &p);

inline constexpr std::uint64_t kDefaultVariantCap = 10000;

class VariantCapExceeded : public Error {
 public:
  explicit VariantCapExceeded(std::uint64_t count);
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_;
};

// Product of option counts, saturating at UINT64_MAX.
std::uint64_t variant_count(const SentenceUnit &s);

// Cartesian product over the sentence's slots, lexicographic by
// (slot, option) with the first slot varying slowest.
std::vector<TokenList> enumerate_variants(const SentenceUnit &s,
                                          std::uint64_t cap = kDefaultVariantCap);

struct VariantCounts {
  std::vector<std::uint64_t> per_sentence;
  std::uint64_t total = 0;
};

VariantCounts variant_count(const TaggedParagraph &p);

struct LatticeArc {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string token;
  std::optional<std::size_t> slot;  // set on arcs spelling an option
  std::size_t option = 0;
};

// Nodes are numbered so that every arc goes from a lower to a higher node.
struct VariantLattice {
  std::size_t num_nodes = 1;
  std::size_t source = 0;
  std::size_t sink = 0;
  std::vector<LatticeArc> arcs;
  // slot index -> option index -> arc ids, in spelling order
  std::vector<std::pair<std::size_t, std::vector<std::vector<std::size_t>>>>
      slot_arcs;

  std::vector<std::vector<std::size_t>> outgoing() const;
  std::uint64_t path_count() const;
  // All token sequences spelled by source->sink paths.
  std::vector<TokenList> paths() const;
};

VariantLattice build_lattice(const SentenceUnit &s);

// One variant per line, tokens separated by single spaces.
void write_corpus(std::ostream &os, const std::vector<TokenList> &variants);

// All variants of all sentences of a paragraph, sentence by sentence.
std::vector<TokenList> variant_corpus(const TaggedParagraph &p,
                                      std::uint64_t cap = kDefaultVariantCap);

}  // namespace sga

#endif  // SGA_VARIANTS_HPP_
