// sga/scoring.hpp
//
// Edit-distance alignment, word error rate and the alignment-based grammar
// score: a slot earns credit only when every token of its correct phrase
// is aligned as an exact match in the spoken transcript.

#ifndef SGA_SCORING_HPP_
#define SGA_SCORING_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sga/decode.hpp"
#include "sga/paragraph.hpp"

namespace sga {

enum class EditKind { match, substitution, insertion, deletion };

std::string_view to_string(EditKind k);

struct AlignmentOp {
  EditKind kind = EditKind::match;
  std::optional<std::size_t> ref;  // absent for insertions
  std::optional<std::size_t> hyp;  // absent for deletions
  bool operator==(const AlignmentOp &) const = default;
};

struct Alignment {
  std::vector<AlignmentOp> ops;

  std::size_t count(EditKind k) const;
  std::size_t cost() const;  // substitutions + insertions + deletions
};

// Unit-cost Levenshtein alignment. Among alignments with the minimal edit
// count, one with the most exact matches is chosen; remaining ties are
// broken on backtrace preferring match, substitution, deletion, insertion.
Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp);

class ScoringError : public Error {
 public:
  using Error::Error;
};

// Edits / |ref|. Throws ScoringError on an empty reference.
double wer(std::span<const std::string> ref, std::span<const std::string> hyp);
double wer(const Transcript &ref, const Transcript &hyp);

struct SlotCredit {
  std::size_t index = 0;
  std::string correct;
  bool credited = false;
  TokenList observed;  // hypothesis tokens aligned to the slot's span
};

struct GrammarReport {
  std::vector<SlotCredit> slots;
  int score = 0;
  std::size_t p1_size = 0;  // gold tokens not aligned as exact matches
  std::size_t p2_size = 0;  // credited slots
  std::optional<int> gold_score;
  std::optional<int> epsilon_g;
};

GrammarReport g_score(const Transcript &hyp, const RenderedForms &forms);

// |report.score - gold.score|, also stored in report.gold_score and
// report.epsilon_g. Throws ScoringError when the two reports are for
// different paragraphs.
int grammar_error(GrammarReport &report, const GrammarReport &gold);

nlohmann::json to_json(const GrammarReport &r);
GrammarReport report_from_json(const nlohmann::json &j);

}  // namespace sga

#endif  // SGA_SCORING_HPP_
