// sga/paragraph.hpp
//
// Option-tagged paragraphs. The canonical form is the raw tag text
//
//   For <grammar><correct>a</correct>/an/the</grammar> student, ...
//
// from which the display paragraph (every option group shown as
// "(a/an/the)"), the gold paragraph (each group replaced by its correct
// option) and the list of graded phrases are derived.

#ifndef SGA_PARAGRAPH_HPP_
#define SGA_PARAGRAPH_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sga/text.hpp"

namespace sga {

struct OptionPhrase {
  std::string text;  // trimmed, inner whitespace collapsed
  TokenList tokens;

  static OptionPhrase from_text(std::string_view raw);
  bool operator==(const OptionPhrase &) const = default;
};

struct GrammarSlot {
  std::size_t index = 0;
  std::vector<OptionPhrase> options;
  std::size_t correct_index = 0;
  // Byte range of the whole <grammar> group in the source text.
  std::size_t source_begin = 0;
  std::size_t source_end = 0;

  const OptionPhrase &correct() const { return options.at(correct_index); }
  bool operator==(const GrammarSlot &) const = default;
};

// Verbatim text between option groups. Whitespace or punctuation only
// pieces (e.g. the "." after a final group) carry no tokens.
struct FixedText {
  std::string text;
  TokenList tokens;

  static FixedText from_text(std::string_view raw);
  bool operator==(const FixedText &) const = default;
};

struct SlotRef {
  std::size_t index = 0;
  bool operator==(const SlotRef &) const = default;
};

using Segment = std::variant<FixedText, SlotRef>;

struct TaggedParagraph {
  std::vector<Segment> segments;
  std::vector<GrammarSlot> slots;
  std::string source_text;

  std::size_t slot_count() const { return slots.size(); }
};

enum class Severity { error, warning };

enum class IssueKind {
  unclosed_tag,
  missing_correct,
  multiple_correct,
  fewer_than_two_options,
  duplicate_option,
  empty_option,
  stray_tag_text,
};

std::string_view to_string(Severity s);
std::string_view to_string(IssueKind k);

struct ValidationIssue {
  Severity severity = Severity::error;
  IssueKind kind = IssueKind::unclosed_tag;
  std::size_t begin = 0;  // byte offsets into the source text
  std::size_t end = 0;
  std::string message;
};

bool has_errors(const std::vector<ValidationIssue> &issues);

struct ParseResult {
  // Present iff no error-severity issue was found.
  std::optional<TaggedParagraph> paragraph;
  // All issues, including warnings attached to a successful parse.
  std::vector<ValidationIssue> issues;

  bool ok() const { return paragraph.has_value(); }
};

ParseResult parse_tagged(std::string_view text);

// Throws ParagraphError carrying the first error when parsing fails.
TaggedParagraph parse_tagged_or_throw(std::string_view text);

class ParagraphError : public Error {
 public:
  ParagraphError(std::string what, std::vector<ValidationIssue> issues)
      : Error(std::move(what)), issues_(std::move(issues)) {}
  const std::vector<ValidationIssue> &issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

// Structural checks plus duplicate / case-only-different option warnings.
std::vector<ValidationIssue> validate(const TaggedParagraph &p);

// Re-serializes to tag syntax.
std::string serialize_tagged(const TaggedParagraph &p);

// The display paragraph: each group as "(opt1/opt2/...)".
std::string render_display(const TaggedParagraph &p);

struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
  bool operator==(const TokenSpan &) const = default;
};

struct GrammarWord {
  std::size_t slot = 0;
  OptionPhrase phrase;
};

struct RenderedForms {
  std::string display_text;
  std::string gold_text;
  TokenList gold_tokens;
  std::vector<TokenSpan> slot_spans;       // indexed by slot
  std::vector<GrammarWord> grammar_words;  // slot order
};

RenderedForms render_gold(const TaggedParagraph &p);

}  // namespace sga

#endif  // SGA_PARAGRAPH_HPP_
